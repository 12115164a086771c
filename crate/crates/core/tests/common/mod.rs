#![allow(dead_code)]

use std::collections::BTreeMap;

use pda::{Entry, Grid};

// Printed reference arrays, named by shape F x K.
pub const P_6X4: &str = "
* * 0 1
* 0 * 2
* 1 2 *
0 * * 3
1 * 3 *
2 3 * *";

pub const P_4X6: &str = "
* * * 0 1 2
* 0 1 * * 3
0 * 2 * 3 *
1 2 * 3 * *";

pub const P_4X12: &str = "
* * * 0 1 2 * * * 4 5 6
* 0 1 * * 3 * 4 5 * * 7
0 * 2 * 3 * 4 * 6 * 7 *
1 2 * 3 * * 5 6 * 7 * *";

pub const P_12X8: &str = "
* * 0 1 * * * *
* 0 * 2 * * * *
* 1 2 * * * * *
0 * * 3 * * * *
1 * 3 * * * * *
2 3 * * * * * *
* * * * * * 0 1
* * * * * 0 * 2
* * * * * 1 2 *
* * * * 0 * * 3
* * * * 1 * 3 *
* * * * 2 3 * *";

pub const P_8X12: &str = "
* * * 0 1 2 * * * * * *
* 0 1 * * 3 * * * * * *
0 * 2 * 3 * * * * * * *
1 2 * 3 * * * * * * * *
* * * * * * * * * 0 1 2
* * * * * * * 0 1 * * 3
* * * * * * 0 * 2 * 3 *
* * * * * * 1 2 * 3 * *";

pub const P_4X8: &str = "
* * * 0 1 2 4 *
* 0 1 * * 3 5 *
0 * 2 * 3 * * 4
1 2 * 3 * * * 5";

pub fn grid(text: &str) -> Grid {
    text.parse().expect("test grid parses")
}

/// Renumbers codes by first row-major occurrence.
pub fn first_use(g: &Grid) -> Grid {
    let mut map = BTreeMap::new();
    let mut out = g.clone();
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            if let Entry::Code(c) = g.get(i, j) {
                let next = map.len() as u32;
                let new = *map.entry(c).or_insert(next);
                out.set(i, j, Entry::Code(new));
            }
        }
    }
    out
}

pub fn reverse_rows(g: &Grid) -> Grid {
    let mut out = g.clone();
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            out.set(i, j, g.get(g.rows() - 1 - i, j));
        }
    }
    out
}

pub fn reverse_cols(g: &Grid) -> Grid {
    let keep: Vec<usize> = (0..g.cols()).rev().collect();
    g.select_columns(&keep)
}

/// Independent C1/C2 check written straight from the definition.
pub fn is_pda(g: &Grid, z: usize) -> bool {
    let (f, k) = (g.rows(), g.cols());
    if (0..k).any(|j| (0..f).filter(|&i| g.get(i, j).is_star()).count() != z) {
        return false;
    }
    let cells: Vec<(usize, usize, u32)> = (0..f)
        .flat_map(|i| (0..k).filter_map(move |j| g.get(i, j).code().map(|c| (i, j, c))))
        .collect();
    for (a, &(i1, j1, c1)) in cells.iter().enumerate() {
        for &(i2, j2, c2) in &cells[a + 1..] {
            if c1 != c2 {
                continue;
            }
            if i1 == i2 || j1 == j2 {
                return false;
            }
            if !g.get(i1, j2).is_star() || !g.get(i2, j1).is_star() {
                return false;
            }
        }
    }
    true
}

use pda::constructions::{Family, Orientation};

/// Every family instance in the construction sweeps.
pub fn sweep() -> Vec<Family> {
    let mut out = Vec::new();
    for f in 1..=8 {
        for k in 1..=40 {
            out.push(Family::ZFMinus1 { k, f });
            if f >= 2 {
                out.push(Family::ZOne { k, f });
            }
        }
    }
    out.extend((11..=40).filter(|f| f % 5 != 0).map(|f| Family::ZFMinus3 { f }));
    out.extend((2..=10).step_by(2).map(|n| Family::Comb { n }));
    for variant in 1..=4u8 {
        for m in 1..=4 {
            for k in if variant <= 2 { 1 } else { 2 }..=6 {
                out.push(Family::Z0 { variant, m, k });
            }
        }
    }
    for orientation in [Orientation::Rows, Orientation::Columns] {
        for k in 2..=5 {
            for m in 2..=3 {
                for kappa in (0..).take_while(|&kappa| 2 * kappa < m * k) {
                    out.push(Family::DeletedBlocks {
                        orientation,
                        k,
                        m,
                        kappa,
                    });
                }
            }
        }
    }
    for f in 1..=30usize {
        for k in (f..).step_by(f).take_while(|&k| f.pow(3) >= 2 * k * k) {
            if f >= 2 {
                out.push(Family::ZFMinus2 { k, f });
            }
        }
    }
    out
}
