//! Lower bounds on `S(K, F, Z)`, the least `S` of any `(K, F, Z, S)` PDA.
//!
//! All arithmetic is on unsigned integers; `⌈a/b⌉` is `a.div_ceil(b)`.
//! Every [`BoundReport`] keeps the integer terms it was summed from.

use std::fmt;

/// Which bound produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundSource {
    /// `Z = 0`: every cell holds a distinct code, `S = KF`.
    TrivialZ0,
    /// `Z = F`: no codes at all.
    TrivialZF,
    /// Nested ceilings, peeling off the busiest row `F - Z` times.
    Recursive,
    /// `⌈(F-Z)K/F⌉ + F - Z - 1`.
    Simple,
    /// The simple bound plus one, when the busiest-code argument rules it out.
    Improved,
    /// The improved bound specialised to `Z = F - 2`.
    FMinus2,
    /// The improved bound specialised to `K = F`.
    Square,
    /// Raised by refuting candidate values through a sub-array argument.
    SubArrayRefined,
}

impl BoundSource {
    /// Tie-break order for [`best_lower_bound`]: earlier wins.
    const PRIORITY: [BoundSource; 8] = [
        BoundSource::TrivialZ0,
        BoundSource::TrivialZF,
        BoundSource::Simple,
        BoundSource::Recursive,
        BoundSource::Improved,
        BoundSource::FMinus2,
        BoundSource::Square,
        BoundSource::SubArrayRefined,
    ];

    fn priority(self) -> usize {
        Self::PRIORITY.iter().position(|&s| s == self).unwrap()
    }

    pub fn id(self) -> &'static str {
        match self {
            BoundSource::TrivialZ0 => "trivial-Z0",
            BoundSource::TrivialZF => "trivial-ZF",
            BoundSource::Recursive => "recursive",
            BoundSource::Simple => "simple",
            BoundSource::Improved => "improved",
            BoundSource::FMinus2 => "f-minus-2",
            BoundSource::Square => "square",
            BoundSource::SubArrayRefined => "sub-array-refined",
        }
    }
}

impl fmt::Display for BoundSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// A lower bound with its provenance. `value == terms.iter().sum()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub value: u64,
    pub source: BoundSource,
    pub terms: Vec<u64>,
    /// Every bound considered on the way, in evaluation order (aggregate
    /// reports only).
    pub chain: Vec<(BoundSource, u64)>,
}

impl BoundReport {
    fn new(source: BoundSource, terms: Vec<u64>) -> Self {
        BoundReport {
            value: terms.iter().sum(),
            source,
            terms,
            chain: Vec::new(),
        }
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.value, self.source)
    }
}

fn check(k: u64, f: u64, z: u64) {
    assert!(k >= 1 && f >= 1, "K and F must be positive (K={k}, F={f})");
    assert!(z <= f, "Z={z} exceeds F={f}");
}

fn trivial(k: u64, f: u64, z: u64) -> Option<BoundReport> {
    if z == 0 {
        Some(BoundReport::new(BoundSource::TrivialZ0, vec![k * f]))
    } else if z == f {
        Some(BoundReport::new(BoundSource::TrivialZF, vec![]))
    } else {
        None
    }
}

/// `T₁ = ⌈(F-Z)K/F⌉`, `Tᵢ = ⌈(F-Z-i+1)·Tᵢ₋₁ / (F-i+1)⌉` for `i = 2..=F-Z`,
/// summed. `Z = 0` and `Z = F` return the exact trivial values.
pub fn recursive_bound(k: u64, f: u64, z: u64) -> BoundReport {
    check(k, f, z);
    if let Some(t) = trivial(k, f, z) {
        return t;
    }
    let gap = f - z;
    let mut terms = Vec::with_capacity(gap as usize);
    let mut t = (gap * k).div_ceil(f);
    terms.push(t);
    for i in 2..=gap {
        t = ((gap - i + 1) * t).div_ceil(f - i + 1);
        terms.push(t);
    }
    BoundReport::new(BoundSource::Recursive, terms)
}

/// `⌈(F-Z)K/F⌉ + F - Z - 1`, clamped to 0 when `Z = F`.
pub fn simple_bound(k: u64, f: u64, z: u64) -> BoundReport {
    check(k, f, z);
    if z == f {
        return BoundReport::new(BoundSource::Simple, vec![]);
    }
    let gap = f - z;
    BoundReport::new(BoundSource::Simple, vec![(gap * k).div_ceil(f), gap - 1])
}

/// `⌈(F-Z)K/F⌉ + F - Z` when both
/// `⌈(F-Z-1)·T₁/(F-1)⌉ = 1` and `T₁·F < ⌈(F-Z)K/B⌉·B` hold, with
/// `T₁ = ⌈(F-Z)K/F⌉` and `B = T₁ + F - Z - 1`. Needs `1 ≤ Z ≤ F - 2`.
pub fn improved_bound(k: u64, f: u64, z: u64) -> Option<BoundReport> {
    check(k, f, z);
    if z == 0 || z + 2 > f {
        return None;
    }
    let gap = f - z;
    let t1 = (gap * k).div_ceil(f);
    let b = t1 + gap - 1;
    let first = ((gap - 1) * t1).div_ceil(f - 1) == 1;
    let second = t1 * f < (gap * k).div_ceil(b) * b;
    (first && second).then(|| BoundReport::new(BoundSource::Improved, vec![t1, gap]))
}

/// For `Z = F - 2`: `⌈2K/F⌉ + 2` when `K ≤ F(F-1)/2` and
/// `⌈2K/F⌉·F < ⌈2K/(⌈2K/F⌉+1)⌉·(⌈2K/F⌉+1)`.
pub fn f_minus_2_bound(k: u64, f: u64) -> Option<BoundReport> {
    assert!(k >= 1, "K must be positive");
    if f < 3 || 2 * k > f * (f - 1) {
        return None;
    }
    let c = (2 * k).div_ceil(f);
    (c * f < (2 * k).div_ceil(c + 1) * (c + 1)).then(|| BoundReport::new(BoundSource::FMinus2, vec![c, 2]))
}

/// For `K = F`: `2(F-Z)` when `(2F-2Z-1) ∤ (F-Z)F`. Needs `1 ≤ Z < F`.
pub fn square_bound(f: u64, z: u64) -> Option<BoundReport> {
    check(f, f, z);
    if z == 0 || z == f {
        return None;
    }
    let gap = f - z;
    (!(gap * f).is_multiple_of(2 * gap - 1)).then(|| BoundReport::new(BoundSource::Square, vec![gap, gap]))
}

/// The sub-array `(K', F', Z')` cut out around the most frequent code of a
/// hypothetical `(K, F, Z, h)` PDA.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubInstance {
    pub k: u64,
    pub f: u64,
    /// May be negative, meaning no such sub-array fits.
    pub z: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refinement {
    /// The hypothesis survives: the sub-array's bound is at most `h - 1`.
    Consistent { sub: SubInstance, sub_bound: u64 },
    /// No `(K, F, Z, h)` PDA can exist.
    Contradiction { sub: SubInstance, reason: String },
}

impl Refinement {
    pub fn is_contradiction(&self) -> bool {
        matches!(self, Refinement::Contradiction { .. })
    }
}

/// Tests the hypothesis that a `(K, F, Z, h)` PDA exists.
///
/// Some code occurs `c = ⌈(F-Z)K/h⌉` times; the rows and columns of `c` such
/// occurrences leave a `(c, F-c, Z-c+1)` PDA using at most `h - 1` codes. If
/// that sub-array cannot exist, or its closed-form bound exceeds `h - 1`,
/// the hypothesis is refuted. Requires `1 ≤ Z ≤ F - 2` and `h ≥ 1`.
pub fn refine_by_sub_array(k: u64, f: u64, z: u64, h: u64) -> Refinement {
    check(k, f, z);
    assert!(h >= 1, "hypothesis must be positive");
    assert!(z >= 1 && z + 2 <= f, "needs 1 <= Z <= F-2 (F={f}, Z={z})");
    let c = ((f - z) * k).div_ceil(h);
    let sub = SubInstance {
        k: c,
        f: f.saturating_sub(c),
        z: z as i64 - c as i64 + 1,
    };
    let contradiction = |reason: String| Refinement::Contradiction { sub, reason };
    if c > k {
        return contradiction(format!("a code would occur {c} times in {k} columns"));
    }
    if sub.z < 0 || c >= f {
        return contradiction(format!(
            "a code occurring {c} times needs {} stars per column, only {z} available",
            c - 1
        ));
    }
    let sub_bound = closed_form_bound(sub.k, sub.f, sub.z as u64).value;
    if sub_bound + 1 > h {
        contradiction(format!(
            "sub-array ({},{},{}) needs at least {sub_bound} codes, only {} left",
            sub.k,
            sub.f,
            sub.z,
            h - 1
        ))
    } else {
        Refinement::Consistent { sub, sub_bound }
    }
}

fn better(current: Option<BoundReport>, candidate: BoundReport) -> BoundReport {
    match current {
        Some(cur)
            if cur.value > candidate.value
                || (cur.value == candidate.value && cur.source.priority() <= candidate.source.priority()) =>
        {
            cur
        }
        _ => candidate,
    }
}

/// Maximum of the closed-form bounds, ties broken by [`BoundSource`] priority.
pub fn closed_form_bound(k: u64, f: u64, z: u64) -> BoundReport {
    check(k, f, z);
    if let Some(t) = trivial(k, f, z) {
        let mut t = t;
        t.chain = vec![(t.source, t.value)];
        return t;
    }
    let mut candidates = vec![simple_bound(k, f, z), recursive_bound(k, f, z)];
    candidates.extend(improved_bound(k, f, z));
    if z + 2 == f {
        candidates.extend(f_minus_2_bound(k, f));
    }
    if k == f {
        candidates.extend(square_bound(f, z));
    }
    let chain: Vec<(BoundSource, u64)> = candidates.iter().map(|b| (b.source, b.value)).collect();
    let mut best = candidates
        .into_iter()
        .fold(None, |acc, b| Some(better(acc, b)))
        .unwrap();
    best.chain = chain;
    best
}

/// Extra values the refinement loop may add on top of the closed-form bound.
pub const REFINE_STEPS: u64 = 3;

/// The best lower bound known: the closed-form maximum, then raised while
/// [`refine_by_sub_array`] refutes the current value (at most [`REFINE_STEPS`] times).
pub fn best_lower_bound(k: u64, f: u64, z: u64) -> BoundReport {
    let mut best = closed_form_bound(k, f, z);
    if z == 0 || z + 2 > f {
        return best;
    }
    let base = best.value;
    let mut value = base;
    for _ in 0..REFINE_STEPS {
        if value == 0 || !refine_by_sub_array(k, f, z, value).is_contradiction() {
            break;
        }
        value += 1;
    }
    if value > base {
        let mut terms = vec![base];
        terms.extend(std::iter::repeat_n(1, (value - base) as usize));
        let mut chain = best.chain;
        chain.push((BoundSource::SubArrayRefined, value));
        best = BoundReport::new(BoundSource::SubArrayRefined, terms);
        best.chain = chain;
    }
    best
}
