mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{grid, sweep, P_4X12, P_4X6, P_6X4};
use num_rational::Ratio;
use pda::bounds::{best_lower_bound, improved_bound, recursive_bound, square_bound, BoundSource};
use pda::constructions::{an_pda, an_transpose, binomial, hconcat, Builtin};
use pda::pda::{verify_with, ReportMode, Rule};
use pda::search::{
    certify_optimal, exhaustive_min_s, exists_pda, CertificateKind, CertifyConfig, MinS, Outcome, SearchConfig,
};
use pda::sim::{simulate, simulate_grid, DemandMode, SimConfig};
use pda::{Entry, Grid, Params};

type Check = fn() -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const NODE_BUDGET: u64 = 100_000_000;

fn golden_arrays() -> Result<String, String> {
    let ex1 = an_pda(4, 2).map_err(|e| e.to_string())?;
    ensure!(ex1.grid() == &grid(P_6X4), "an_pda(4,2) differs:\n{ex1}");
    let t = an_transpose(4, 2).map_err(|e| e.to_string())?;
    ensure!(t.grid() == &grid(P_4X6), "an_transpose(4,2) differs:\n{t}");
    let h = hconcat(&[t.clone(), t]).map_err(|e| e.to_string())?;
    ensure!(h.grid() == &grid(P_4X12), "hconcat differs:\n{h}");
    ensure!(h.params() == Params::new(12, 4, 2, 8), "hconcat params {}", h.params());
    let p86 = Builtin::P86.pda();
    let report = pda::verify(p86.grid());
    ensure!(report.valid, "P86: {report}");
    ensure!(p86.params() == Params::new(6, 8, 5, 5), "P86 params {}", p86.params());
    Ok("4 arrays exact".into())
}

fn telescoping() -> Result<String, String> {
    let mut n = 0;
    for k in 1..=12u64 {
        for t in 0..k {
            let got = recursive_bound(binomial(k, t), k, t).value;
            ensure!(
                got == binomial(k, t + 1),
                "k={k} t={t}: {got} != {}",
                binomial(k, t + 1)
            );
            n += 1;
        }
    }
    Ok(format!("{n} (k,t) pairs"))
}

fn sweeps() -> Result<String, String> {
    let cfg = CertifyConfig::default();
    let families = sweep();
    for family in &families {
        let p = family.build().map_err(|e| format!("{family}: {e}"))?;
        ensure!(
            p.params() == family.claimed(),
            "{family}: got {} claimed {}",
            p.params(),
            family.claimed()
        );
        let report = pda::verify(p.grid());
        ensure!(report.valid, "{family}: {report}");
        let c = certify_optimal(&p, &cfg);
        ensure!(
            c.kind == CertificateKind::BoundMatched,
            "{family}: {} lower={} achieved={}",
            c.kind.id(),
            c.lower.value,
            c.achieved
        );
    }
    Ok(format!("{} instances bound-matched", families.len()))
}

fn exact(k: usize, f: usize, z: usize) -> Result<(usize, u64), String> {
    match exhaustive_min_s(&SearchConfig::new(k, f, z).node_budget(NODE_BUDGET)) {
        MinS::Exact { s, nodes, .. } => Ok((s, nodes)),
        MinS::Undecided { lower, upper, nodes } => Err(format!(
            "({k},{f},{z}) budget blowout after {nodes} nodes, S in [{lower},{upper}]"
        )),
    }
}

fn oracle_agreement() -> Result<String, String> {
    let mut pinned = vec![((2, 2, 1), 1), ((4, 6, 3), 4), ((3, 3, 1), 3)];
    for k in 1..=3 {
        for f in 1..=3 {
            pinned.push(((k, f, 0), k * f));
            pinned.push(((k, f, f), 0));
        }
    }
    for &((k, f, z), want) in &pinned {
        let (s, _) = exact(k, f, z)?;
        ensure!(s == want, "({k},{f},{z}): search {s}, expected {want}");
    }
    let below = exists_pda(&SearchConfig::new(4, 6, 3).node_budget(NODE_BUDGET), 3).outcome;
    ensure!(below == Outcome::Infeasible, "exists_pda(4,6,3,3) = {below:?}");

    let (mut instances, mut nodes, mut blowouts) = (0, 0, Vec::new());
    for k in 1..=20usize {
        for f in 1..=20 / k {
            for z in 0..=f {
                let lb = best_lower_bound(k as u64, f as u64, z as u64).value as usize;
                match exact(k, f, z) {
                    Ok((s, n)) => {
                        ensure!(lb <= s, "({k},{f},{z}): bound {lb} > S {s}");
                        nodes += n;
                    }
                    Err(e) => blowouts.push(e),
                }
                instances += 1;
            }
        }
    }
    ensure!(
        blowouts.is_empty(),
        "{} blowouts: {}",
        blowouts.len(),
        blowouts.join("; ")
    );
    Ok(format!(
        "{} pinned, {instances} instances with K*F<=20, {nodes} nodes",
        pinned.len()
    ))
}

fn symmetry_soundness() -> Result<String, String> {
    let mut runs = 0;
    for k in 1..=16usize {
        for f in 1..=16 / k {
            for z in 0..=f {
                for s in 0..=(f - z) * k {
                    let on = exists_pda(&SearchConfig::new(k, f, z).node_budget(NODE_BUDGET), s).outcome;
                    let off = exists_pda(
                        &SearchConfig::new(k, f, z)
                            .node_budget(NODE_BUDGET)
                            .symmetry_breaking(false),
                        s,
                    )
                    .outcome;
                    ensure!(
                        on != Outcome::BudgetExceeded && off != Outcome::BudgetExceeded,
                        "({k},{f},{z},{s}) budget blowout"
                    );
                    ensure!(
                        matches!(on, Outcome::Found(_)) == matches!(off, Outcome::Found(_)),
                        "({k},{f},{z},{s}): on={on:?} off={off:?}"
                    );
                    runs += 1;
                }
            }
        }
    }
    Ok(format!("{runs} (K,F,Z,S) queries agree"))
}

fn simulator() -> Result<String, String> {
    let ex1 = an_pda(4, 2).unwrap();
    let r = simulate(&ex1, &SimConfig::new(4)).map_err(|e| e.to_string())?;
    ensure!(r.demands_run == 256 && r.failed == 0, "{r}");
    ensure!(r.load_packets == 4 && r.baseline_packets == 12, "{r}");
    ensure!(r.load_ratio() == Some(Ratio::new(1, 3)), "{r}");
    let families = sweep();
    for (seed, family) in families.iter().enumerate() {
        let p = family.build().map_err(|e| e.to_string())?;
        let cfg = SimConfig::new(p.k()).demands(DemandMode::Sample(50)).seed(seed as u64);
        let r = simulate(&p, &cfg).map_err(|e| format!("{family}: {e}"))?;
        ensure!(r.demands_run == 50 && r.success(), "{family}: {r}");
    }
    Ok(format!(
        "256/256 demands, load 4 vs 12; {} families x 50 demands",
        families.len()
    ))
}

/// Rules broken by `g`, computed from the definition.
fn broken_rules(g: &Grid) -> BTreeSet<Rule> {
    let mut rules = BTreeSet::new();
    let stars: BTreeSet<usize> = (0..g.cols()).map(|j| g.column_stars(j)).collect();
    if stars.len() > 1 {
        rules.insert(Rule::C1);
    }
    let cells: Vec<(usize, usize, u32)> = g
        .cells()
        .filter_map(|(c, e)| e.code().map(|v| (c.row, c.col, v)))
        .collect();
    for (a, &(i1, j1, v1)) in cells.iter().enumerate() {
        for &(i2, j2, v2) in &cells[a + 1..] {
            if v1 != v2 {
                continue;
            }
            if i1 == i2 || j1 == j2 {
                rules.insert(Rule::C2a);
            } else if !g.get(i1, j2).is_star() || !g.get(i2, j1).is_star() {
                rules.insert(Rule::C2b);
            }
        }
    }
    let codes = g.codes();
    if !codes.iter().copied().eq(0..codes.len() as u32) {
        rules.insert(Rule::CodeRange);
    }
    rules
}

fn negative_controls() -> Result<String, String> {
    let base = grid(P_6X4);
    let s = 4u32;
    let mut mutants: Vec<(&str, Grid)> = Vec::new();
    for i in 0..base.rows() {
        for j in 0..base.cols() {
            match base.get(i, j) {
                Entry::Star => {
                    for c in 0..s {
                        let mut g = base.clone();
                        g.set(i, j, Entry::Code(c));
                        mutants.push(("star->code", g));
                    }
                }
                Entry::Code(old) => {
                    let mut g = base.clone();
                    g.set(i, j, Entry::Star);
                    mutants.push(("code->star", g));
                    for c in (0..s).filter(|&c| c != old) {
                        let mut g = base.clone();
                        g.set(i, j, Entry::Code(c));
                        mutants.push(("relabel", g));
                    }
                }
            }
        }
    }
    let mut c2b_failures = 0;
    for (class, g) in &mutants {
        let report = verify_with(g, ReportMode::All);
        let want = broken_rules(g);
        ensure!(!report.valid, "{class} mutant accepted:\n{g}");
        ensure!(
            report.rules() == want,
            "{class}: verify named {:?}, expected {want:?}\n{g}",
            report.rules()
        );
        let c2 = want.contains(&Rule::C2a) || want.contains(&Rule::C2b);
        match *class {
            "star->code" => ensure!(want.contains(&Rule::C1), "star->code without C1"),
            "code->star" => ensure!(want == BTreeSet::from([Rule::C1]), "code->star named {want:?}"),
            _ => ensure!(c2 && !want.contains(&Rule::C1), "relabel named {want:?}"),
        }
        if want.contains(&Rule::C2b) && !want.contains(&Rule::C2a) {
            let r = simulate_grid(g, &SimConfig::new(4)).map_err(|e| e.to_string())?;
            ensure!(r.failed > 0, "C2b mutant decoded every demand:\n{g}");
            c2b_failures += 1;
        }
    }
    ensure!(c2b_failures > 0, "no pure C2b mutant found");
    Ok(format!(
        "{} mutants rejected, {c2b_failures} C2b mutants fail decoding",
        mutants.len()
    ))
}

fn bound_edges() -> Result<String, String> {
    let b = best_lower_bound(6, 8, 5);
    ensure!(
        b.value == 5 && b.source == BoundSource::Simple,
        "(6,8,5): {} via {}",
        b.value,
        b.source
    );
    ensure!(improved_bound(6, 8, 5).is_none(), "improved bound applied to (6,8,5)");
    for f in 4..=40u64 {
        let applies = square_bound(f, f - 3).is_some();
        ensure!(applies == (f % 5 != 0), "square bound F={f}: applies={applies}");
    }
    Ok("(6,8,5) -> 5 simple; square bound F<=40".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, Check); 8] = [
        ("golden arrays", 1, golden_arrays),
        ("telescoping bound identity", 1, telescoping),
        ("construction sweeps certify bound-matched", 30, sweeps),
        ("search oracle agreement", 600, oracle_agreement),
        ("symmetry-breaking soundness", 300, symmetry_soundness),
        ("simulator", 60, simulator),
        ("negative controls", 1, negative_controls),
        ("bound edge cases", 1, bound_edges),
    ];
    let mut failed = 0;
    for (idx, (name, limit, check)) in criteria.into_iter().enumerate() {
        let limit = Duration::from_secs(limit);
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (status, detail) = match result {
            Ok(_) if elapsed >= limit => ("FAIL", format!("over time limit {limit:?}")),
            Ok(detail) => ("PASS", detail),
            Err(why) => ("FAIL", why),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {}: {status} {name} ({elapsed:.3?} of {limit:?}) {detail}",
            idx + 1
        );
    }
    if failed == 0 {
        println!("acceptance: 8/8 passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 8 failed");
        ExitCode::FAILURE
    }
}
