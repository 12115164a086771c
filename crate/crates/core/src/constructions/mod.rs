//! Explicit PDA constructions.
//!
//! The building blocks are the AN array ([`an_pda`]) and its transpose, glued
//! together side by side ([`hconcat`]) or along a diagonal of stars
//! ([`block_diagonal`]), and trimmed by deleting trailing columns. The
//! named families compose these; [`Family`] pairs each one with the
//! parameters it is supposed to reach so callers can check the two agree.

mod builtin;
mod subset;

use std::fmt;

use thiserror::Error;

use crate::pda::{Entry, Grid, Params, Pda, PdaError};

pub use builtin::Builtin;
pub use subset::{binomial, SubsetRank};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no parts given")]
    NoParts,
    #[error("part {index} has {field}={found}, expected {expected}")]
    MismatchedPart {
        index: usize,
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Pda(#[from] PdaError),
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<(), ConstructionError> {
    if ok {
        Ok(())
    } else {
        Err(ConstructionError::Precondition(msg()))
    }
}

fn choose(n: usize, r: usize) -> usize {
    binomial(n as u64, r as u64) as usize
}

/// The AN array: rows are the `t`-subsets `T` of `[0, k)` in lexicographic
/// order, and cell `(T, j)` is the rank of `T ∪ {j}` among `(t+1)`-subsets,
/// or a star when `j ∈ T`.
pub fn an_pda(k: usize, t: usize) -> Result<Pda, ConstructionError> {
    require(k >= 1, || format!("k must be positive, got {k}"))?;
    require(t <= k, || format!("t={t} must lie in [0,{k}]"))?;
    let rows = SubsetRank::new(k, t);
    let codes = SubsetRank::new(k, t + 1);
    let grid = rows
        .iter()
        .map(|subset| {
            (0..k)
                .map(|j| {
                    if subset.contains(&j) {
                        Entry::Star
                    } else {
                        let mut joined = subset.clone();
                        let at = joined.partition_point(|&x| x < j);
                        joined.insert(at, j);
                        Entry::Code(codes.rank(&joined) as u32)
                    }
                })
                .collect()
        })
        .collect();
    Ok(Pda::from_rows(grid)?)
}

/// Transpose of [`an_pda`]: a `(C(k,t), k, t, C(k,t+1))` array.
pub fn an_transpose(k: usize, t: usize) -> Result<Pda, ConstructionError> {
    Ok(an_pda(k, t)?.transpose()?)
}

/// Side-by-side concatenation, part `i` shifted by the total `S` of the parts
/// before it. All parts must share `F` and `Z`.
pub fn hconcat(parts: &[Pda]) -> Result<Pda, ConstructionError> {
    let first = parts.first().ok_or(ConstructionError::NoParts)?;
    for (index, p) in parts.iter().enumerate() {
        for (field, expected, found) in [("F", first.f(), p.f()), ("Z", first.z(), p.z())] {
            if expected != found {
                return Err(ConstructionError::MismatchedPart {
                    index,
                    field,
                    expected,
                    found,
                });
            }
        }
    }
    let f = first.f();
    let k: usize = parts.iter().map(Pda::k).sum();
    let mut grid = Grid::filled(f, k, Entry::Star);
    let mut col = 0;
    let mut offset = 0u32;
    for p in parts {
        let shifted = p.shift(offset);
        for i in 0..f {
            for j in 0..p.k() {
                grid.set(i, col + j, shifted.get(i, j));
            }
        }
        col += p.k();
        offset += p.s() as u32;
    }
    Ok(Pda::new(grid)?)
}

/// Parts on the diagonal, stars everywhere else. Codes are reused across
/// blocks, so `S` is the largest part's `S`. All parts must share `F - Z`.
pub fn block_diagonal(parts: &[Pda]) -> Result<Pda, ConstructionError> {
    let first = parts.first().ok_or(ConstructionError::NoParts)?;
    let gap = first.f() - first.z();
    for (index, p) in parts.iter().enumerate() {
        if p.f() - p.z() != gap {
            return Err(ConstructionError::MismatchedPart {
                index,
                field: "F-Z",
                expected: gap,
                found: p.f() - p.z(),
            });
        }
    }
    let f: usize = parts.iter().map(Pda::f).sum();
    let k: usize = parts.iter().map(Pda::k).sum();
    let mut grid = Grid::filled(f, k, Entry::Star);
    let (mut row, mut col) = (0, 0);
    for p in parts {
        for i in 0..p.f() {
            for j in 0..p.k() {
                grid.set(row + i, col + j, p.get(i, j));
            }
        }
        row += p.f();
        col += p.k();
    }
    Ok(crate::pda::normalize(&grid)?)
}

fn copies(p: Pda, m: usize) -> Vec<Pda> {
    vec![p; m]
}

/// Block diagonals of the four `S`-tight AN shapes (`t = 0` and `t = k - 2`,
/// plain and transposed):
///
/// 1. `(mk, m, m-1, k)`
/// 2. `(m, mk, (m-1)k, k)`
/// 3. `(mk, m·C(k,2), m·C(k,2)-k+1, k)`
/// 4. `(m·C(k,2), mk, mk-2, k)`
pub fn z0_family(variant: u8, m: usize, k: usize) -> Result<Pda, ConstructionError> {
    require(m >= 1 && k >= 1, || format!("m={m} and k={k} must be positive"))?;
    let base = match variant {
        1 => an_pda(k, 0)?,
        2 => an_transpose(k, 0)?,
        3 | 4 => {
            require(k >= 2, || format!("variant {variant} needs k >= 2, got {k}"))?;
            if variant == 3 {
                an_pda(k, k - 2)?
            } else {
                an_transpose(k, k - 2)?
            }
        }
        _ => {
            return Err(ConstructionError::Precondition(format!(
                "variant must be 1..=4, got {variant}"
            )))
        }
    };
    block_diagonal(&copies(base, m))
}

/// Writes `k = (m-1)·f + κ` with `0 < κ ≤ f`, i.e. `m = ⌈k/f⌉` copies of a
/// width-`f` block followed by deleting `f - κ` trailing columns.
fn split_width(k: usize, f: usize) -> (usize, usize) {
    let m = k.div_ceil(f);
    (m, m * f - k)
}

/// `(K, F, F-1, ⌈K/F⌉)`: copies of the single-code `(F,F,F-1,1)` array,
/// trailing columns removed.
pub fn z_f_minus_1(k: usize, f: usize) -> Result<Pda, ConstructionError> {
    require(k >= 1 && f >= 1, || format!("K={k} and F={f} must be positive"))?;
    let (m, excess) = split_width(k, f);
    let wide = hconcat(&copies(an_pda(f, f - 1)?, m))?;
    Ok(wide.delete_last_columns(excess)?)
}

/// `(K, F, 1, S)`: copies of the `(F,F,1,C(F,2))` transposed AN array,
/// trailing columns removed.
pub fn z_one(k: usize, f: usize) -> Result<Pda, ConstructionError> {
    require(k >= 1, || format!("K must be positive, got {k}"))?;
    require(f >= 2, || format!("F must be at least 2, got {f}"))?;
    let (m, excess) = split_width(k, f);
    let wide = hconcat(&copies(an_transpose(f, 1)?, m))?;
    Ok(wide.delete_last_columns(excess)?)
}

/// `(F, F, F-3, 6)` for `F > 10`, `5 ∤ F`: a block diagonal of `P4` blocks
/// topped up with `P6` and/or `P7` according to `F mod 4`.
pub fn z_f_minus_3(f: usize) -> Result<Pda, ConstructionError> {
    require(f > 10, || format!("F must exceed 10, got {f}"))?;
    require(!f.is_multiple_of(5), || {
        format!("F must not be divisible by 5, got {f}")
    })?;
    let (six, seven) = match f % 4 {
        0 => (false, false),
        2 => (true, false),
        3 => (false, true),
        _ => (true, true),
    };
    let fours = (f - 6 * six as usize - 7 * seven as usize) / 4;
    let mut parts = copies(Builtin::P4.pda(), fours);
    if six {
        parts.push(Builtin::P6.pda());
    }
    if seven {
        parts.push(Builtin::P7.pda());
    }
    block_diagonal(&parts)
}

/// `(n²/2, n, n-2, n+2)` for even `n`: the transposed AN array for
/// `t = n - 2` next to `n/2` stacked `(1,2,0,2)` columns.
pub fn comb(n: usize) -> Result<Pda, ConstructionError> {
    require(n >= 2 && n.is_multiple_of(2), || {
        format!("n must be even and positive, got {n}")
    })?;
    hconcat(&[an_transpose(n, n - 2)?, z0_family(2, n / 2, 2)?])
}

/// Block diagonal of `m` copies of a base meeting the simple bound with
/// equality, then the last `κ` columns deleted. `S` stays that of the base.
pub fn trim_block_diagonal(base: &Pda, m: usize, kappa: usize) -> Result<Pda, ConstructionError> {
    let Params { k, f, z, s } = base.params();
    require(m >= 2, || format!("m must be at least 2, got {m}"))?;
    require(f > z, || format!("base has no integers (F={f}, Z={z})"))?;
    let gap = f - z;
    require((gap * k) % f == 0, || {
        format!("F0={f} must divide (F0-Z0)K0={}", gap * k)
    })?;
    let tight = gap * k / f + gap - 1;
    require(s == tight, || {
        format!("base S0={s} must equal (F0-Z0)K0/F0+F0-Z0-1={tight}")
    })?;
    require(kappa * gap < m * f, || {
        format!("kappa={kappa} must be below mF0/(F0-Z0)={}/{gap}", m * f)
    })?;
    let blocks = block_diagonal(&copies(base.clone(), m))?;
    Ok(blocks.delete_last_columns(kappa)?)
}

/// Which AN orientation [`deleted_block_family`] starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// `an_pda(k, k-2)`.
    Rows,
    /// `an_transpose(k, k-2)`.
    Columns,
}

/// `(mk-κ, m·C(k,2), m·C(k,2)-k+1, k)` from [`Orientation::Rows`], or
/// `(m·C(k,2)-κ, mk, mk-2, k)` from [`Orientation::Columns`], for
/// `0 ≤ κ < mk/2`.
pub fn deleted_block_family(
    orientation: Orientation,
    k: usize,
    m: usize,
    kappa: usize,
) -> Result<Pda, ConstructionError> {
    require(k >= 2, || format!("k must be at least 2, got {k}"))?;
    require(2 * kappa < m * k, || {
        format!("kappa={kappa} must be below mk/2={}/2", m * k)
    })?;
    let base = match orientation {
        Orientation::Rows => an_pda(k, k - 2)?,
        Orientation::Columns => an_transpose(k, k - 2)?,
    };
    trim_block_diagonal(&base, m, kappa)
}

/// `(K, F, F-2, S)` for `F | K` and `F³ ≥ 2K²`, with `n = K/F` and
/// `S = 2n+1` when `(2n+1) | F`, otherwise `2n+2`.
pub fn z_f_minus_2(k: usize, f: usize) -> Result<Pda, ConstructionError> {
    require(k >= 1 && f >= 1, || format!("K={k} and F={f} must be positive"))?;
    require(k.is_multiple_of(f), || format!("F={f} must divide K={k}"))?;
    require((f as u128).pow(3) >= 2 * (k as u128).pow(2), || {
        format!("need F^3 >= 2K^2 (F={f}, K={k})")
    })?;
    let n = k / f;
    if f.is_multiple_of(2 * n + 1) {
        return z0_family(4, f / (2 * n + 1), 2 * n + 1);
    }
    // F = 2an + b with 0 <= b < 2n; F >= 2n² gives a >= n > b/2.
    let (a, b) = (f / (2 * n), f % (2 * n));
    let odd = an_transpose(2 * n + 1, 2 * n - 1)?;
    let parts = if b < a {
        let mut parts = copies(comb(2 * n)?, a - b);
        parts.extend(copies(odd, b));
        parts
    } else {
        // b > a, since b == a would make 2n+1 divide F
        let even = an_transpose(2 * n + 2, 2 * n)?.delete_last_columns(n + 1)?;
        let mut parts = copies(even, b - a);
        parts.extend(copies(odd, 2 * a - b));
        parts
    };
    block_diagonal(&parts)
}

/// A named construction together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    AnPda {
        k: usize,
        t: usize,
    },
    AnTranspose {
        k: usize,
        t: usize,
    },
    /// `m` side-by-side copies of the transposed AN array.
    HconcatRepeat {
        k: usize,
        t: usize,
        m: usize,
    },
    /// `m` diagonal copies of the AN array.
    BlockDiagonal {
        k: usize,
        t: usize,
        m: usize,
    },
    ZOne {
        k: usize,
        f: usize,
    },
    ZFMinus1 {
        k: usize,
        f: usize,
    },
    ZFMinus2 {
        k: usize,
        f: usize,
    },
    ZFMinus3 {
        f: usize,
    },
    Comb {
        n: usize,
    },
    DeletedBlocks {
        orientation: Orientation,
        k: usize,
        m: usize,
        kappa: usize,
    },
    Z0 {
        variant: u8,
        m: usize,
        k: usize,
    },
    Builtin(Builtin),
}

/// Identifier, parameter flags and a one-line description for every family.
pub const FAMILY_INDEX: &[(&str, &str, &str)] = &[
    (
        "an-pda",
        "--k --t",
        "AN array (k, C(k,t), C(k-1,t-1), C(k,t+1)); alias: an",
    ),
    (
        "an-transpose",
        "--k --t",
        "transposed AN array (C(k,t), k, t, C(k,t+1))",
    ),
    (
        "hconcat-repeat",
        "--k --t --m",
        "m transposed AN arrays side by side (mC(k,t), k, t, mC(k,t+1))",
    ),
    ("block-diagonal", "--k --t --m", "m AN arrays on a star diagonal"),
    ("z-one", "--K --F", "Z=1 for any K and F>=2, trailing columns deleted"),
    ("z-f-minus-1", "--K --F", "(K, F, F-1, ceil(K/F)) for any K and F"),
    (
        "z-f-minus-2",
        "--K --F",
        "(K, F, F-2, 2K/F+1 or +2) for F|K and F^3>=2K^2",
    ),
    ("z-f-minus-3", "--F", "(F, F, F-3, 6) for F>10, 5 not dividing F"),
    ("comb", "--n", "(n^2/2, n, n-2, n+2) for even n"),
    (
        "deleted-blocks-rows",
        "--k --m --kappa",
        "(mk-kappa, mC(k,2), mC(k,2)-k+1, k), kappa < mk/2",
    ),
    (
        "deleted-blocks-columns",
        "--k --m --kappa",
        "(mC(k,2)-kappa, mk, mk-2, k), kappa < mk/2",
    ),
    ("z0-family-1", "--m --k", "(mk, m, m-1, k)"),
    ("z0-family-2", "--m --k", "(m, mk, (m-1)k, k)"),
    ("z0-family-3", "--m --k", "(mk, mC(k,2), mC(k,2)-k+1, k)"),
    ("z0-family-4", "--m --k", "(mC(k,2), mk, mk-2, k)"),
    (
        "builtin",
        "<P4|P6|P7|P86>",
        "hardcoded (4,4,1,6), (6,6,3,6), (7,7,4,6) and (6,8,5,5) arrays",
    ),
];

impl Family {
    pub fn id(&self) -> &'static str {
        match self {
            Family::AnPda { .. } => "an-pda",
            Family::AnTranspose { .. } => "an-transpose",
            Family::HconcatRepeat { .. } => "hconcat-repeat",
            Family::BlockDiagonal { .. } => "block-diagonal",
            Family::ZOne { .. } => "z-one",
            Family::ZFMinus1 { .. } => "z-f-minus-1",
            Family::ZFMinus2 { .. } => "z-f-minus-2",
            Family::ZFMinus3 { .. } => "z-f-minus-3",
            Family::Comb { .. } => "comb",
            Family::DeletedBlocks {
                orientation: Orientation::Rows,
                ..
            } => "deleted-blocks-rows",
            Family::DeletedBlocks {
                orientation: Orientation::Columns,
                ..
            } => "deleted-blocks-columns",
            Family::Z0 { variant: 1, .. } => "z0-family-1",
            Family::Z0 { variant: 2, .. } => "z0-family-2",
            Family::Z0 { variant: 3, .. } => "z0-family-3",
            Family::Z0 { .. } => "z0-family-4",
            Family::Builtin(_) => "builtin",
        }
    }

    pub fn build(&self) -> Result<Pda, ConstructionError> {
        match *self {
            Family::AnPda { k, t } => an_pda(k, t),
            Family::AnTranspose { k, t } => an_transpose(k, t),
            Family::HconcatRepeat { k, t, m } => {
                require(m >= 1, || "m must be positive".into())?;
                hconcat(&copies(an_transpose(k, t)?, m))
            }
            Family::BlockDiagonal { k, t, m } => {
                require(m >= 1, || "m must be positive".into())?;
                block_diagonal(&copies(an_pda(k, t)?, m))
            }
            Family::ZOne { k, f } => z_one(k, f),
            Family::ZFMinus1 { k, f } => z_f_minus_1(k, f),
            Family::ZFMinus2 { k, f } => z_f_minus_2(k, f),
            Family::ZFMinus3 { f } => z_f_minus_3(f),
            Family::Comb { n } => comb(n),
            Family::DeletedBlocks {
                orientation,
                k,
                m,
                kappa,
            } => deleted_block_family(orientation, k, m, kappa),
            Family::Z0 { variant, m, k } => z0_family(variant, m, k),
            Family::Builtin(b) => Ok(b.pda()),
        }
    }

    /// The parameters the family is supposed to reach, computed from its
    /// closed-form statement rather than from the built array.
    pub fn claimed(&self) -> Params {
        let c = choose;
        match *self {
            Family::AnPda { k, t } => {
                let z = if t == 0 { 0 } else { c(k - 1, t - 1) };
                Params::new(k, c(k, t), z, c(k, t + 1))
            }
            Family::AnTranspose { k, t } => Params::new(c(k, t), k, t, c(k, t + 1)),
            Family::HconcatRepeat { k, t, m } => Params::new(m * c(k, t), k, t, m * c(k, t + 1)),
            Family::BlockDiagonal { k, t, m } => {
                let rows = c(k, t);
                let z = if t == 0 { 0 } else { c(k - 1, t - 1) };
                Params::new(m * k, m * rows, m * rows - (rows - z), c(k, t + 1))
            }
            Family::ZOne { k, f } => {
                let (m, excess) = split_width(k, f);
                Params::new(k, f, 1, m * c(f, 2) - c(excess, 2))
            }
            Family::ZFMinus1 { k, f } => Params::new(k, f, f - 1, k.div_ceil(f)),
            Family::ZFMinus2 { k, f } => {
                let n = k / f;
                let s = if f % (2 * n + 1) == 0 { 2 * n + 1 } else { 2 * n + 2 };
                Params::new(k, f, f - 2, s)
            }
            Family::ZFMinus3 { f } => Params::new(f, f, f - 3, 6),
            Family::Comb { n } => Params::new(n * n / 2, n, n - 2, n + 2),
            Family::DeletedBlocks {
                orientation: Orientation::Rows,
                k,
                m,
                kappa,
            } => Params::new(m * k - kappa, m * c(k, 2), m * c(k, 2) + 1 - k, k),
            Family::DeletedBlocks {
                orientation: Orientation::Columns,
                k,
                m,
                kappa,
            } => Params::new(m * c(k, 2) - kappa, m * k, m * k - 2, k),
            Family::Z0 { variant, m, k } => match variant {
                1 => Params::new(m * k, m, m - 1, k),
                2 => Params::new(m, m * k, (m - 1) * k, k),
                3 => Params::new(m * k, m * c(k, 2), m * c(k, 2) + 1 - k, k),
                _ => Params::new(m * c(k, 2), m * k, m * k - 2, k),
            },
            Family::Builtin(b) => match b {
                Builtin::P4 => Params::new(4, 4, 1, 6),
                Builtin::P6 => Params::new(6, 6, 3, 6),
                Builtin::P7 => Params::new(7, 7, 4, 6),
                Builtin::P86 => Params::new(6, 8, 5, 5),
            },
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())?;
        match *self {
            Family::AnPda { k, t } | Family::AnTranspose { k, t } => write!(f, " k={k} t={t}"),
            Family::HconcatRepeat { k, t, m } | Family::BlockDiagonal { k, t, m } => {
                write!(f, " k={k} t={t} m={m}")
            }
            Family::ZOne { k, f: rows } | Family::ZFMinus1 { k, f: rows } | Family::ZFMinus2 { k, f: rows } => {
                write!(f, " K={k} F={rows}")
            }
            Family::ZFMinus3 { f: rows } => write!(f, " F={rows}"),
            Family::Comb { n } => write!(f, " n={n}"),
            Family::DeletedBlocks { k, m, kappa, .. } => write!(f, " k={k} m={m} kappa={kappa}"),
            Family::Z0 { m, k, .. } => write!(f, " m={m} k={k}"),
            Family::Builtin(b) => write!(f, " {b}"),
        }
    }
}
