//! The placement delivery array itself.
//!
//! A [`Grid`] is any rectangular array over `{*} ∪ ℕ`; a [`Pda`] is a grid
//! that passed [`verify`] and whose codes are exactly `0..S`. Every transform
//! here is a pure function returning a fresh value.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use thiserror::Error;

/// A single cell: the star symbol or a nonnegative integer code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entry {
    Star,
    Code(u32),
}

impl Entry {
    pub fn is_star(self) -> bool {
        matches!(self, Entry::Star)
    }

    pub fn code(self) -> Option<u32> {
        match self {
            Entry::Star => None,
            Entry::Code(c) => Some(c),
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Star => f.write_str("*"),
            Entry::Code(c) => write!(f, "{c}"),
        }
    }
}

impl FromStr for Entry {
    type Err = PdaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "*" {
            return Ok(Entry::Star);
        }
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(PdaError::BadToken(s.to_string()));
        }
        s.parse::<u32>()
            .map(Entry::Code)
            .map_err(|_| PdaError::BadToken(s.to_string()))
    }
}

/// Row/column coordinates of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PdaError {
    #[error("grid is empty")]
    Empty,
    #[error("ragged grid: row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("invalid token {0:?}: expected '*' or a nonnegative integer")]
    BadToken(String),
    #[error("not a PDA: {0}")]
    Invalid(VerificationReport),
    #[error("not transposable: row {first_row} has {first_stars} stars but row {second_row} has {second_stars}")]
    NotTransposable {
        first_row: usize,
        first_stars: usize,
        second_row: usize,
        second_stars: usize,
    },
    #[error("column {column} out of range for a grid with {cols} columns")]
    ColumnOutOfRange { column: usize, cols: usize },
    #[error("cannot delete every column")]
    DeleteAll,
}

/// A rectangular `F × K` array of entries, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<Entry>,
}

impl Grid {
    pub fn from_rows(rows: Vec<Vec<Entry>>) -> Result<Self, PdaError> {
        let f = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if f == 0 || k == 0 {
            return Err(PdaError::Empty);
        }
        let mut cells = Vec::with_capacity(f * k);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != k {
                return Err(PdaError::Ragged {
                    row: i,
                    expected: k,
                    found: row.len(),
                });
            }
            cells.extend(row);
        }
        Ok(Grid {
            rows: f,
            cols: k,
            cells,
        })
    }

    /// A grid with every cell set to `entry`. Panics on a zero dimension.
    pub fn filled(rows: usize, cols: usize, entry: Entry) -> Self {
        assert!(rows > 0 && cols > 0, "grid dimensions must be positive");
        Grid {
            rows,
            cols,
            cells: vec![entry; rows * cols],
        }
    }

    /// Number of rows (`F`).
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns (`K`).
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Entry {
        self.cells[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, entry: Entry) {
        self.cells[row * self.cols + col] = entry;
    }

    pub fn row(&self, row: usize) -> &[Entry] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = Entry> + '_ {
        (0..self.rows).map(move |i| self.get(i, col))
    }

    /// All cells with their coordinates, row-major.
    pub fn cells(&self) -> impl Iterator<Item = (Cell, Entry)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .map(move |(idx, &e)| (Cell::new(idx / self.cols, idx % self.cols), e))
    }

    pub fn column_stars(&self, col: usize) -> usize {
        self.column(col).filter(|e| e.is_star()).count()
    }

    pub fn row_stars(&self, row: usize) -> usize {
        self.row(row).iter().filter(|e| e.is_star()).count()
    }

    /// Distinct codes present, ascending.
    pub fn codes(&self) -> BTreeSet<u32> {
        self.cells.iter().filter_map(|e| e.code()).collect()
    }

    /// Occurrences of every code, each list in row-major order.
    pub fn occurrences(&self) -> BTreeMap<u32, Vec<Cell>> {
        let mut occ: BTreeMap<u32, Vec<Cell>> = BTreeMap::new();
        for (cell, e) in self.cells() {
            if let Entry::Code(c) = e {
                occ.entry(c).or_default().push(cell);
            }
        }
        occ
    }

    pub fn transposed(&self) -> Grid {
        let mut cells = Vec::with_capacity(self.cells.len());
        for j in 0..self.cols {
            cells.extend(self.column(j));
        }
        Grid {
            rows: self.cols,
            cols: self.rows,
            cells,
        }
    }

    /// Adds `offset` to every code; stars are unchanged.
    pub fn shifted(&self, offset: u32) -> Grid {
        let cells = self
            .cells
            .iter()
            .map(|e| match *e {
                Entry::Star => Entry::Star,
                Entry::Code(c) => Entry::Code(c + offset),
            })
            .collect();
        Grid {
            rows: self.rows,
            cols: self.cols,
            cells,
        }
    }

    /// Relabels codes onto `0..S` preserving their numeric order.
    pub fn compacted(&self) -> Grid {
        let map: BTreeMap<u32, u32> = self
            .codes()
            .into_iter()
            .enumerate()
            .map(|(i, c)| (c, i as u32))
            .collect();
        let cells = self
            .cells
            .iter()
            .map(|e| match *e {
                Entry::Star => Entry::Star,
                Entry::Code(c) => Entry::Code(map[&c]),
            })
            .collect();
        Grid {
            rows: self.rows,
            cols: self.cols,
            cells,
        }
    }

    /// The sub-grid made of the listed columns, in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> Grid {
        assert!(!keep.is_empty());
        let mut cells = Vec::with_capacity(self.rows * keep.len());
        for i in 0..self.rows {
            cells.extend(keep.iter().map(|&j| self.get(i, j)));
        }
        Grid {
            rows: self.rows,
            cols: keep.len(),
            cells,
        }
    }
}

/// Whitespace-separated rows, one per line; blank lines are skipped.
impl FromStr for Grid {
    type Err = PdaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rows = s
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.split_whitespace().map(str::parse).collect())
            .collect::<Result<Vec<Vec<Entry>>, _>>()?;
        Grid::from_rows(rows)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(Entry::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Which condition a violation breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// Star count per column.
    C1,
    /// Equal codes in a shared row or column.
    C2a,
    /// Equal codes without stars on the opposite corners.
    C2b,
    /// Code set not equal to `0..S`.
    CodeRange,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::C1 => "C1",
            Rule::C2a => "C2a",
            Rule::C2b => "C2b",
            Rule::CodeRange => "CodeRange",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    StarCount {
        column: usize,
        expected: usize,
        found: usize,
    },
    SharedLine {
        code: u32,
        first: Cell,
        second: Cell,
    },
    MissingStar {
        code: u32,
        first: Cell,
        second: Cell,
        /// The opposite corners that are not stars.
        corners: Vec<Cell>,
    },
    CodeGap {
        missing: u32,
    },
}

impl Violation {
    pub fn rule(&self) -> Rule {
        match self {
            Violation::StarCount { .. } => Rule::C1,
            Violation::SharedLine { .. } => Rule::C2a,
            Violation::MissingStar { .. } => Rule::C2b,
            Violation::CodeGap { .. } => Rule::CodeRange,
        }
    }

    /// Cells the violation involves.
    pub fn cells(&self, rows: usize) -> Vec<Cell> {
        match self {
            Violation::StarCount { column, .. } => (0..rows).map(|i| Cell::new(i, *column)).collect(),
            Violation::SharedLine { first, second, .. } => vec![*first, *second],
            Violation::MissingStar {
                first, second, corners, ..
            } => {
                let mut v = vec![*first, *second];
                v.extend(corners);
                v
            }
            Violation::CodeGap { .. } => Vec::new(),
        }
    }

    // Row-major position used to order a report.
    fn sort_key(&self, rows: usize) -> (usize, usize) {
        match self {
            Violation::StarCount { column, .. } => (0, *column),
            Violation::SharedLine { second, .. } | Violation::MissingStar { second, .. } => (second.row, second.col),
            Violation::CodeGap { .. } => (rows, 0),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::StarCount {
                column,
                expected,
                found,
            } => write!(f, "C1 column {column}: {found} stars, expected {expected}"),
            Violation::SharedLine { code, first, second } => {
                write!(f, "C2a code {code}: {first} and {second} share a row or column")
            }
            Violation::MissingStar {
                code,
                first,
                second,
                corners,
            } => {
                let corners: Vec<String> = corners.iter().map(Cell::to_string).collect();
                write!(
                    f,
                    "C2b code {code}: {first} and {second} need stars at {}",
                    corners.join(" ")
                )
            }
            Violation::CodeGap { missing } => write!(f, "CodeRange: code {missing} never occurs"),
        }
    }
}

/// How many witnesses [`verify_with`] reports.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReportMode {
    /// The first witnessing pair per (rule, code).
    #[default]
    FirstPerCode,
    /// Every offending pair.
    All,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub valid: bool,
    pub k: usize,
    pub f: usize,
    /// Reference star count: the most common column count.
    pub z: usize,
    /// Number of distinct codes.
    pub s: usize,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn rules(&self) -> BTreeSet<Rule> {
        self.violations.iter().map(Violation::rule).collect()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule() == rule)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            return write!(f, "valid ({},{},{},{})", self.k, self.f, self.z, self.s);
        }
        write!(f, "{} violation(s)", self.violations.len())?;
        if let Some(v) = self.violations.first() {
            write!(f, ", first: {v}")?;
        }
        Ok(())
    }
}

pub fn verify(grid: &Grid) -> VerificationReport {
    verify_with(grid, ReportMode::FirstPerCode)
}

pub fn verify_with(grid: &Grid, mode: ReportMode) -> VerificationReport {
    let mut violations = Vec::new();

    // The reference star count is the most common one, ties going to the
    // leftmost column, so a single bad column is the one reported.
    let counts: Vec<usize> = (0..grid.cols()).map(|j| grid.column_stars(j)).collect();
    let mut tally: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (j, &c) in counts.iter().enumerate() {
        let e = tally.entry(c).or_insert((0, j));
        e.0 += 1;
    }
    let z = tally
        .iter()
        .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
        .map(|(&c, _)| c)
        .unwrap_or(0);
    for (j, &c) in counts.iter().enumerate() {
        if c != z {
            violations.push(Violation::StarCount {
                column: j,
                expected: z,
                found: c,
            });
        }
    }

    let occurrences = grid.occurrences();
    for (&code, cells) in &occurrences {
        let mut seen_a = false;
        let mut seen_b = false;
        for (idx, &second) in cells.iter().enumerate() {
            for &first in &cells[..idx] {
                if first.row == second.row || first.col == second.col {
                    if mode == ReportMode::All || !seen_a {
                        violations.push(Violation::SharedLine { code, first, second });
                        seen_a = true;
                    }
                    continue;
                }
                let corners: Vec<Cell> = [Cell::new(first.row, second.col), Cell::new(second.row, first.col)]
                    .into_iter()
                    .filter(|c| !grid.get(c.row, c.col).is_star())
                    .collect();
                if !corners.is_empty() && (mode == ReportMode::All || !seen_b) {
                    violations.push(Violation::MissingStar {
                        code,
                        first,
                        second,
                        corners,
                    });
                    seen_b = true;
                }
            }
        }
    }

    let s = occurrences.len();
    if let Some((&max, _)) = occurrences.iter().next_back() {
        for missing in 0..=max {
            if !occurrences.contains_key(&missing) {
                violations.push(Violation::CodeGap { missing });
            }
        }
    }

    let rows = grid.rows();
    violations.sort_by_key(|v| (v.sort_key(rows), v.rule()));

    VerificationReport {
        valid: violations.is_empty(),
        k: grid.cols(),
        f: grid.rows(),
        z,
        s,
        violations,
    }
}

/// The four parameters `(K, F, Z, S)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Params {
    pub k: usize,
    pub f: usize,
    pub z: usize,
    pub s: usize,
}

impl Params {
    pub const fn new(k: usize, f: usize, z: usize, s: usize) -> Self {
        Params { k, f, z, s }
    }
}

impl From<(usize, usize, usize, usize)> for Params {
    fn from((k, f, z, s): (usize, usize, usize, usize)) -> Self {
        Params { k, f, z, s }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.k, self.f, self.z, self.s)
    }
}

/// A verified `(K, F, Z, S)` placement delivery array with codes `0..S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pda {
    grid: Grid,
    z: usize,
    s: usize,
}

impl Pda {
    pub fn new(grid: Grid) -> Result<Self, PdaError> {
        let report = verify(&grid);
        if !report.valid {
            return Err(PdaError::Invalid(report));
        }
        Ok(Pda {
            grid,
            z: report.z,
            s: report.s,
        })
    }

    pub fn from_rows(rows: Vec<Vec<Entry>>) -> Result<Self, PdaError> {
        Pda::new(Grid::from_rows(rows)?)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn into_grid(self) -> Grid {
        self.grid
    }

    pub fn k(&self) -> usize {
        self.grid.cols
    }

    pub fn f(&self) -> usize {
        self.grid.rows
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn params(&self) -> Params {
        Params::new(self.k(), self.f(), self.z, self.s)
    }

    pub fn get(&self, row: usize, col: usize) -> Entry {
        self.grid.get(row, col)
    }

    /// Delivery rate `S/F` and memory ratio `M/N = Z/F`, exactly.
    pub fn rate_and_memory(&self) -> (Ratio<u64>, Ratio<u64>) {
        let f = self.f() as u64;
        (Ratio::new(self.s as u64, f), Ratio::new(self.z as u64, f))
    }

    pub fn transpose(&self) -> Result<Pda, PdaError> {
        let first = self.grid.row_stars(0);
        for i in 1..self.f() {
            let stars = self.grid.row_stars(i);
            if stars != first {
                return Err(PdaError::NotTransposable {
                    first_row: 0,
                    first_stars: first,
                    second_row: i,
                    second_stars: stars,
                });
            }
        }
        Pda::new(self.grid.transposed())
    }

    /// `P + s`. The result keeps C1/C2 but its codes start at `offset`.
    pub fn shift(&self, offset: u32) -> Grid {
        self.grid.shifted(offset)
    }

    /// Removes the listed columns; codes that survive are compacted onto `0..S'`.
    pub fn delete_columns(&self, drop: &BTreeSet<usize>) -> Result<Pda, PdaError> {
        if let Some(&bad) = drop.iter().find(|&&j| j >= self.k()) {
            return Err(PdaError::ColumnOutOfRange {
                column: bad,
                cols: self.k(),
            });
        }
        if drop.len() == self.k() {
            return Err(PdaError::DeleteAll);
        }
        let keep: Vec<usize> = (0..self.k()).filter(|j| !drop.contains(j)).collect();
        normalize(&self.grid.select_columns(&keep))
    }

    /// Removes the last `count` columns.
    pub fn delete_last_columns(&self, count: usize) -> Result<Pda, PdaError> {
        let k = self.k();
        let drop: BTreeSet<usize> = (k.saturating_sub(count)..k).collect();
        if count > k {
            return Err(PdaError::DeleteAll);
        }
        self.delete_columns(&drop)
    }
}

impl fmt::Display for Pda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.grid.fmt(f)
    }
}

impl FromStr for Pda {
    type Err = PdaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pda::new(s.parse()?)
    }
}

/// Relabels the codes of a C1/C2-valid grid onto `0..S` (order-preserving)
/// and verifies it. Idempotent.
pub fn normalize(grid: &Grid) -> Result<Pda, PdaError> {
    Pda::new(grid.compacted())
}
