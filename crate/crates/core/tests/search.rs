mod common;

use common::is_pda;
use pda::bounds::best_lower_bound;
use pda::search::{exhaustive_min_s, exists_pda, singleton_pda, MinS, Outcome, SearchConfig};
use pda::{Entry, Grid, Params};

/// Smallest `s` for which some grid with codes in `[0, s)` is a PDA, found by
/// trying every grid.
fn brute_min_s(k: usize, f: usize, z: usize) -> usize {
    let cells = f * k;
    for s in 0.. {
        let mut digits = vec![0usize; cells];
        // each cell is a star (0) or code d-1
        loop {
            let mut g = Grid::filled(f, k, Entry::Star);
            for (idx, &d) in digits.iter().enumerate() {
                if d > 0 {
                    g.set(idx / k, idx % k, Entry::Code(d as u32 - 1));
                }
            }
            if is_pda(&g, z) {
                return s;
            }
            let mut pos = 0;
            while pos < cells && digits[pos] == s {
                digits[pos] = 0;
                pos += 1;
            }
            if pos == cells {
                break;
            }
            digits[pos] += 1;
        }
    }
    unreachable!()
}

fn exact(k: usize, f: usize, z: usize) -> (usize, u64) {
    match exhaustive_min_s(&SearchConfig::new(k, f, z).node_budget(100_000_000)) {
        MinS::Exact { s, witness, nodes } => {
            assert_eq!(witness.params(), Params::new(k, f, z, s));
            assert!(is_pda(witness.grid(), z));
            (s, nodes)
        }
        other => panic!("({k},{f},{z}) undecided: {other:?}"),
    }
}

#[test]
fn agrees_with_brute_force_on_tiny_instances() {
    for k in 1..=6 {
        for f in 1..=6 {
            if k * f > 6 {
                continue;
            }
            for z in 0..=f {
                assert_eq!(exact(k, f, z).0, brute_min_s(k, f, z), "({k},{f},{z})");
            }
        }
    }
}

#[test]
fn pinned_values() {
    assert_eq!(exact(2, 2, 1).0, 1);
    assert_eq!(exact(3, 3, 1).0, 3);
    assert_eq!(exact(4, 6, 3).0, 4);
    for k in 1..=3 {
        for f in 1..=3 {
            assert_eq!(exact(k, f, 0).0, k * f);
            assert_eq!(exact(k, f, f).0, 0);
        }
    }
    assert_eq!(exists_pda(&SearchConfig::new(4, 6, 3), 3).outcome, Outcome::Infeasible);
}

#[test]
fn matches_known_optima_for_small_k_and_f() {
    for k in 1..=4usize {
        for f in 1..=5usize {
            // Z = F - 1: ceil(K/F)
            assert_eq!(exact(k, f, f - 1).0, k.div_ceil(f), "({k},{f},{})", f - 1);
            if f >= 2 {
                // K = (m-1)F + kappa with 0 <= kappa < F
                let (m, kappa) = (k / f + 1, k % f);
                let want = m * f * (f - 1) / 2 - (f - kappa) * (f - kappa - 1) / 2;
                assert_eq!(exact(k, f, 1).0, want, "({k},{f},1)");
            }
        }
    }
    // (k, C(k,t), C(k-1,t-1)) -> C(k,t+1)
    assert_eq!(exact(3, 3, 1).0, 3);
    assert_eq!(exact(3, 3, 2).0, 1);
    assert_eq!(exact(4, 4, 1).0, 6);
    assert_eq!(exact(4, 4, 3).0, 1);
}

#[test]
fn lower_bound_never_exceeds_the_optimum() {
    for k in 1..=30usize {
        for f in 1..=30usize {
            if k * f > 30 {
                continue;
            }
            for z in 0..=f {
                let lb = best_lower_bound(k as u64, f as u64, z as u64).value as usize;
                let (s, _) = exact(k, f, z);
                assert!(lb <= s, "({k},{f},{z}) bound {lb} > S {s}");
            }
        }
    }
}

#[test]
fn bound_gaps_found_by_search() {
    assert_eq!(best_lower_bound(4, 7, 2).value, 10);
    assert_eq!(exact(4, 7, 2).0, 11);
    assert_eq!(best_lower_bound(6, 5, 2).value, 7);
    assert_eq!(exact(6, 5, 2).0, 8);
}

#[test]
fn row_symmetry_breaking_loses_nothing() {
    for k in 1..=16usize {
        for f in 1..=16usize {
            if k * f > 16 {
                continue;
            }
            for z in 0..=f {
                for s in 0..=(f - z) * k {
                    let on = exists_pda(&SearchConfig::new(k, f, z), s);
                    let off = exists_pda(&SearchConfig::new(k, f, z).symmetry_breaking(false), s);
                    assert_eq!(
                        matches!(on.outcome, Outcome::Found(_)),
                        matches!(off.outcome, Outcome::Found(_)),
                        "({k},{f},{z},{s})"
                    );
                    if on.outcome == Outcome::Infeasible {
                        assert!(on.nodes <= off.nodes, "({k},{f},{z},{s})");
                    }
                }
            }
        }
    }
}

#[test]
fn witnesses_have_exactly_the_requested_s() {
    for (k, f, z) in [(4, 6, 3), (3, 4, 2), (5, 3, 1)] {
        let (min, _) = exact(k, f, z);
        for s in min..=(f - z) * k {
            match exists_pda(&SearchConfig::new(k, f, z), s).outcome {
                Outcome::Found(p) => assert_eq!(p.params(), Params::new(k, f, z, s)),
                other => panic!("({k},{f},{z},{s}) {other:?}"),
            }
        }
        assert_eq!(
            exists_pda(&SearchConfig::new(k, f, z), (f - z) * k + 1).outcome,
            Outcome::Infeasible
        );
    }
}

#[test]
fn parallel_runs_are_identical() {
    for (k, f, z) in [(4, 6, 3), (4, 7, 2), (6, 5, 2), (5, 5, 2)] {
        let lb = best_lower_bound(k as u64, f as u64, z as u64).value as usize;
        for s in lb.saturating_sub(1)..=lb + 1 {
            let seq = exists_pda(&SearchConfig::new(k, f, z), s);
            let par = exists_pda(&SearchConfig::new(k, f, z).parallel(true), s);
            assert_eq!(seq, par, "({k},{f},{z},{s})");
        }
        let seq = exhaustive_min_s(&SearchConfig::new(k, f, z));
        let par = exhaustive_min_s(&SearchConfig::new(k, f, z).parallel(true));
        assert_eq!(seq, par);
    }
}

#[test]
fn budget_exhaustion_is_reported_not_hidden() {
    let tight = SearchConfig::new(6, 5, 2).node_budget(1_000);
    assert_eq!(exists_pda(&tight, 7).outcome, Outcome::BudgetExceeded);
    match exhaustive_min_s(&tight) {
        MinS::Undecided { lower, upper, nodes } => {
            assert_eq!((lower, upper), (7, 18));
            assert_eq!(nodes, 1_000);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn singleton_array() {
    let p = singleton_pda(3, 4, 1);
    assert_eq!(p.params(), Params::new(3, 4, 1, 9));
}
