//! Exact `S(K, F, Z)` by exhaustive backtracking.
//!
//! Columns are filled left to right: first a star pattern, then codes for the
//! remaining cells top to bottom. Every new occurrence `(i, j)` of a code must
//! see stars at `(i, j')` and `(i', j)` for each earlier occurrence `(i', j')`.
//!
//! Codes are always introduced in order of first use, so a cell may only take
//! an already used code or the next fresh one. Relabelling by first use maps
//! any PDA onto such a one.
//!
//! With symmetry breaking on, rows that are all stars so far are treated as
//! interchangeable: within that class stars come first and codes strictly
//! increase top to bottom. Permuting rows inside the class and then
//! relabelling by first use maps any PDA onto one obeying this rule.
//!
//! A search that reports [`Outcome::Infeasible`] ran to completion and is a
//! proof of non-existence; running out of budget is reported separately.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::bounds::{best_lower_bound, BoundReport};
use crate::pda::{Entry, Grid, Pda};

const STAR: i32 = -1;
const EMPTY: i32 = -2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub k: usize,
    pub f: usize,
    pub z: usize,
    /// Largest `S` [`exhaustive_min_s`] will try.
    pub s_max: Option<usize>,
    /// Limit on explored nodes (star patterns plus cell assignments).
    pub node_budget: Option<u64>,
    /// Row-class symmetry breaking. First-use code labelling is always on.
    pub symmetry_breaking: bool,
    /// Fan out over the second column's candidates. Results are identical
    /// to the sequential run.
    pub parallel: bool,
}

impl SearchConfig {
    pub fn new(k: usize, f: usize, z: usize) -> Self {
        assert!(k >= 1 && f >= 1, "K and F must be positive");
        assert!(z <= f, "Z={z} exceeds F={f}");
        SearchConfig {
            k,
            f,
            z,
            s_max: None,
            node_budget: None,
            symmetry_breaking: true,
            parallel: false,
        }
    }

    pub fn node_budget(mut self, budget: u64) -> Self {
        self.node_budget = Some(budget);
        self
    }

    pub fn s_max(mut self, s_max: usize) -> Self {
        self.s_max = Some(s_max);
        self
    }

    pub fn symmetry_breaking(mut self, on: bool) -> Self {
        self.symmetry_breaking = on;
        self
    }

    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    /// Number of integer cells, `(F - Z)K`; every cell distinct always works.
    pub fn cells(&self) -> usize {
        (self.f - self.z) * self.k
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Found(Pda),
    Infeasible,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub outcome: Outcome,
    pub nodes: u64,
}

#[derive(Clone)]
struct State {
    cells: Vec<i32>,
    occ: Vec<Vec<(usize, usize)>>,
    used: usize,
    // rows holding only stars so far
    open: Vec<bool>,
}

enum Flow {
    Found,
    Exhausted,
    Stop,
}

struct Solver<'a> {
    k: usize,
    f: usize,
    z: usize,
    cap: usize,
    sym: bool,
    budget: u64,
    nodes: u64,
    stop_col: usize,
    collect: Option<Vec<State>>,
    cancel: Option<(&'a AtomicUsize, usize)>,
    cancelled: bool,
    solution: Option<Vec<i32>>,
}

fn combinations(pool: &[usize], r: usize, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    fn go(
        pool: &[usize],
        r: usize,
        start: usize,
        cur: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if cur.len() == r {
            return visit(cur);
        }
        for idx in start..=pool.len() - (r - cur.len()) {
            cur.push(pool[idx]);
            let go_on = go(pool, r, idx + 1, cur, visit);
            cur.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
    if r > pool.len() {
        return true;
    }
    go(pool, r, 0, &mut Vec::with_capacity(r), &mut visit)
}

impl<'a> Solver<'a> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            return false;
        }
        if let Some((best, me)) = self.cancel {
            if self.nodes & 0xfff == 0 && best.load(Ordering::Relaxed) < me {
                self.cancelled = true;
                return false;
            }
        }
        true
    }

    fn compatible(&self, st: &State, code: usize, i: usize, j: usize) -> bool {
        let k = self.k;
        st.occ[code]
            .iter()
            .all(|&(i2, j2)| i2 != i && j2 != j && st.cells[i * k + j2] == STAR && st.cells[i2 * k + j] == STAR)
    }

    fn column(&mut self, st: &mut State, j: usize) -> Flow {
        if j == self.stop_col {
            return match self.collect.as_mut() {
                Some(out) => {
                    out.push(st.clone());
                    Flow::Exhausted
                }
                None => {
                    self.solution = Some(st.cells.clone());
                    Flow::Found
                }
            };
        }
        let mut patterns: Vec<Vec<usize>> = Vec::new();
        if self.sym {
            let (open, closed): (Vec<usize>, Vec<usize>) = (0..self.f).partition(|&i| st.open[i]);
            let hi = open.len().min(self.z);
            let lo = self.z.saturating_sub(closed.len());
            for x in (lo..=hi).rev() {
                combinations(&closed, self.z - x, |rest| {
                    let mut p: Vec<usize> = open[..x].to_vec();
                    p.extend_from_slice(rest);
                    p.sort_unstable();
                    patterns.push(p);
                    true
                });
            }
        } else {
            let all: Vec<usize> = (0..self.f).collect();
            combinations(&all, self.z, |p| {
                patterns.push(p.to_vec());
                true
            });
        }
        for stars in patterns {
            if !self.tick() {
                return Flow::Stop;
            }
            for &i in &stars {
                st.cells[i * self.k + j] = STAR;
            }
            let rows: Vec<usize> = (0..self.f).filter(|i| !stars.contains(i)).collect();
            let flow = self.assign(st, j, &rows, 0, -1);
            for &i in &stars {
                st.cells[i * self.k + j] = EMPTY;
            }
            match flow {
                Flow::Exhausted => {}
                other => return other,
            }
        }
        Flow::Exhausted
    }

    fn assign(&mut self, st: &mut State, j: usize, rows: &[usize], idx: usize, last_open: i32) -> Flow {
        if idx == rows.len() {
            let saved: Vec<bool> = rows.iter().map(|&i| st.open[i]).collect();
            for &i in rows {
                st.open[i] = false;
            }
            let flow = self.column(st, j + 1);
            for (&i, &was) in rows.iter().zip(&saved) {
                st.open[i] = was;
            }
            return flow;
        }
        let i = rows[idx];
        let in_class = self.sym && st.open[i];
        let lo = if in_class { (last_open + 1) as usize } else { 0 };
        let hi = (st.used + 1).min(self.cap);
        for code in lo..hi {
            if !self.compatible(st, code, i, j) {
                continue;
            }
            if !self.tick() {
                return Flow::Stop;
            }
            let fresh = st.occ[code].is_empty();
            st.cells[i * self.k + j] = code as i32;
            st.occ[code].push((i, j));
            if fresh {
                st.used += 1;
            }
            let next_open = if in_class { code as i32 } else { last_open };
            let flow = self.assign(st, j, rows, idx + 1, next_open);
            st.occ[code].pop();
            if fresh {
                st.used -= 1;
            }
            st.cells[i * self.k + j] = EMPTY;
            match flow {
                Flow::Exhausted => {}
                other => return other,
            }
        }
        Flow::Exhausted
    }
}

fn to_grid(cells: &[i32], f: usize, k: usize) -> Grid {
    let rows = (0..f)
        .map(|i| {
            (0..k)
                .map(|j| match cells[i * k + j] {
                    STAR => Entry::Star,
                    c => Entry::Code(c as u32),
                })
                .collect()
        })
        .collect();
    Grid::from_rows(rows).expect("search grid is rectangular")
}

/// Splits repeated codes into fresh singletons until `s` codes are in use.
fn pad_codes(grid: &Grid, s: usize) -> Option<Pda> {
    let mut g = grid.compacted();
    let mut next = g.codes().len();
    while next < s {
        let occ = g.occurrences();
        let (_, cells) = occ.iter().find(|(_, v)| v.len() >= 2)?;
        let last = *cells.last().unwrap();
        g.set(last.row, last.col, Entry::Code(next as u32));
        next += 1;
    }
    Some(Pda::new(g).expect("splitting a code keeps C1/C2"))
}

/// The all-singleton `(K, F, Z, (F-Z)K)` PDA: stars on top, distinct codes below.
pub fn singleton_pda(k: usize, f: usize, z: usize) -> Pda {
    let mut g = Grid::filled(f, k, Entry::Star);
    let mut next = 0;
    for i in z..f {
        for j in 0..k {
            g.set(i, j, Entry::Code(next));
            next += 1;
        }
    }
    Pda::new(g).expect("singleton codes satisfy C2 vacuously")
}

/// Looks for a `(K, F, Z, S)` PDA.
pub fn exists_pda(cfg: &SearchConfig, s: usize) -> SearchResult {
    let (k, f, z) = (cfg.k, cfg.f, cfg.z);
    if z == f {
        let outcome = if s == 0 {
            Outcome::Found(singleton_pda(k, f, z))
        } else {
            Outcome::Infeasible
        };
        return SearchResult { outcome, nodes: 0 };
    }
    if s > cfg.cells() || s < f - z {
        // a column's codes are pairwise distinct
        return SearchResult {
            outcome: Outcome::Infeasible,
            nodes: 0,
        };
    }
    let budget = cfg.node_budget.unwrap_or(u64::MAX);
    let root = State {
        cells: vec![EMPTY; f * k],
        occ: vec![Vec::new(); s],
        used: 0,
        open: vec![true; f],
    };
    let prefix_depth = if cfg.symmetry_breaking { k.min(2) } else { 0 };

    let mut solver = Solver {
        k,
        f,
        z,
        cap: s,
        sym: cfg.symmetry_breaking,
        budget,
        nodes: 0,
        stop_col: prefix_depth,
        collect: Some(Vec::new()),
        cancel: None,
        cancelled: false,
        solution: None,
    };
    let mut st = root;
    if let Flow::Stop = solver.column(&mut st, 0) {
        return SearchResult {
            outcome: Outcome::BudgetExceeded,
            nodes: budget,
        };
    }
    let branches = solver.collect.take().unwrap();
    let prefix_nodes = solver.nodes;
    let cap = budget - prefix_nodes;

    let run = |index: usize, branch: &State, cancel: Option<&AtomicUsize>| {
        let mut solver = Solver {
            k,
            f,
            z,
            cap: s,
            sym: cfg.symmetry_breaking,
            budget: cap,
            nodes: 0,
            stop_col: k,
            collect: None,
            cancel: cancel.map(|c| (c, index)),
            cancelled: false,
            solution: None,
        };
        let mut st = branch.clone();
        let flow = solver.column(&mut st, prefix_depth);
        let found = solver.solution.as_deref().map(|c| to_grid(c, f, k));
        let stopped = matches!(flow, Flow::Stop) && !solver.cancelled;
        (found, stopped, solver.nodes)
    };

    let mut total = prefix_nodes;
    let merge = |total: &mut u64, (found, stopped, nodes): (Option<Grid>, bool, u64)| {
        *total += nodes;
        if stopped || *total > budget {
            return Some(SearchResult {
                outcome: Outcome::BudgetExceeded,
                nodes: budget,
            });
        }
        found.map(|g| SearchResult {
            outcome: Outcome::Found(pad_codes(&g, s).expect("s <= (F-Z)K")),
            nodes: *total,
        })
    };

    if cfg.parallel && branches.len() > 1 {
        let best = AtomicUsize::new(usize::MAX);
        let results: Vec<_> = branches
            .par_iter()
            .enumerate()
            .map(|(index, branch)| {
                if best.load(Ordering::Relaxed) < index {
                    return None;
                }
                let r = run(index, branch, Some(&best));
                if r.0.is_some() {
                    best.fetch_min(index, Ordering::Relaxed);
                }
                Some(r)
            })
            .collect();
        for r in results {
            // everything before the winner ran to completion
            let r = r.expect("branches before the first witness are never skipped");
            if let Some(done) = merge(&mut total, r) {
                return done;
            }
        }
    } else {
        for (index, branch) in branches.iter().enumerate() {
            if let Some(done) = merge(&mut total, run(index, branch, None)) {
                return done;
            }
        }
    }
    SearchResult {
        outcome: Outcome::Infeasible,
        nodes: total,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinS {
    /// `S(K, F, Z) = s`, with every smaller value refuted.
    Exact { s: usize, witness: Pda, nodes: u64 },
    /// `lower ≤ S(K, F, Z) ≤ upper`; the budget or `s_max` ran out first.
    Undecided { lower: usize, upper: usize, nodes: u64 },
}

/// Smallest feasible `S`, counting up from the best lower bound.
pub fn exhaustive_min_s(cfg: &SearchConfig) -> MinS {
    let upper = cfg.cells();
    let mut s = best_lower_bound(cfg.k as u64, cfg.f as u64, cfg.z as u64).value as usize;
    let mut nodes = 0u64;
    let budget = cfg.node_budget.unwrap_or(u64::MAX);
    loop {
        if s == upper {
            return MinS::Exact {
                s,
                witness: singleton_pda(cfg.k, cfg.f, cfg.z),
                nodes,
            };
        }
        if cfg.s_max.is_some_and(|m| s > m) {
            return MinS::Undecided { lower: s, upper, nodes };
        }
        let mut step = cfg.clone();
        step.node_budget = Some(budget - nodes);
        let r = exists_pda(&step, s);
        nodes += r.nodes;
        match r.outcome {
            Outcome::Found(witness) => return MinS::Exact { s, witness, nodes },
            Outcome::Infeasible => s += 1,
            Outcome::BudgetExceeded => {
                return MinS::Undecided {
                    lower: s,
                    upper,
                    nodes: budget,
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    /// A lower bound equals the achieved `S`.
    BoundMatched,
    /// Exhaustive search found no PDA with one code fewer.
    SearchExhaustive,
    /// Search found a PDA with one code fewer: the input is not optimal.
    Improvable,
    /// Neither route settled it; optimum lies in `[lower, achieved]`.
    Undecided,
}

impl CertificateKind {
    pub fn id(self) -> &'static str {
        match self {
            CertificateKind::BoundMatched => "bound-matched",
            CertificateKind::SearchExhaustive => "search-exhaustive",
            CertificateKind::Improvable => "improvable",
            CertificateKind::Undecided => "undecided",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub lower: BoundReport,
    pub achieved: usize,
    /// For [`CertificateKind::Improvable`], the better PDA.
    pub witness: Option<Pda>,
    pub nodes: u64,
}

impl Certificate {
    pub fn is_optimal(&self) -> bool {
        matches!(
            self.kind,
            CertificateKind::BoundMatched | CertificateKind::SearchExhaustive
        )
    }
}

#[derive(Clone, Debug)]
pub struct CertifyConfig {
    pub node_budget: Option<u64>,
    /// Largest `K·F` for which a search is attempted.
    pub desk_scale_cells: usize,
    pub parallel: bool,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            node_budget: Some(100_000_000),
            desk_scale_cells: 30,
            parallel: false,
        }
    }
}

pub fn certify_optimal(p: &Pda, cfg: &CertifyConfig) -> Certificate {
    let lower = best_lower_bound(p.k() as u64, p.f() as u64, p.z() as u64);
    let achieved = p.s();
    assert!(
        lower.value as usize <= achieved,
        "lower bound {} exceeds achieved S={achieved} for {}",
        lower.value,
        p.params()
    );
    let mut cert = Certificate {
        kind: CertificateKind::Undecided,
        lower,
        achieved,
        witness: None,
        nodes: 0,
    };
    if cert.lower.value as usize == achieved {
        cert.kind = CertificateKind::BoundMatched;
        return cert;
    }
    if p.k() * p.f() > cfg.desk_scale_cells {
        return cert;
    }
    let mut search = SearchConfig::new(p.k(), p.f(), p.z()).parallel(cfg.parallel);
    search.node_budget = cfg.node_budget;
    let r = exists_pda(&search, achieved - 1);
    cert.nodes = r.nodes;
    match r.outcome {
        Outcome::Infeasible => cert.kind = CertificateKind::SearchExhaustive,
        Outcome::Found(w) => {
            cert.kind = CertificateKind::Improvable;
            cert.witness = Some(w);
        }
        Outcome::BudgetExceeded => {}
    }
    cert
}
