//! Plain-text PDA files.
//!
//! ```text
//! pda v1
//! K=4 F=6 Z=3 S=4
//! * * 0 1
//! ...
//! ```
//!
//! The header must agree with the body. The writer emits single spaces and a
//! trailing newline, so `to_text(&from_text(s)?) == s` for canonical input.

use std::fmt::Write as _;

use thiserror::Error;

use crate::pda::{Entry, Grid, Pda, PdaError};

pub const MAGIC: &str = "pda v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub k: usize,
    pub f: usize,
    pub z: usize,
    pub s: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("missing or wrong magic line, expected {MAGIC:?}")]
    BadMagic,
    #[error("malformed header line {0:?}, expected \"K=<int> F=<int> Z=<int> S=<int>\"")]
    BadHeader(String),
    #[error("header declares {expected} rows but the body has {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row} has {found} tokens, expected {expected}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("row {row} column {col}: bad token {token:?}")]
    BadToken { row: usize, col: usize, token: String },
    #[error("row {row} column {col}: code {code} outside [0,{s})")]
    CodeOutOfRange {
        row: usize,
        col: usize,
        code: u32,
        s: usize,
    },
    #[error("header says {field}={declared} but the array has {field}={actual}")]
    HeaderMismatch {
        field: &'static str,
        declared: usize,
        actual: usize,
    },
    #[error(transparent)]
    Pda(#[from] PdaError),
}

pub fn to_text(p: &Pda) -> String {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    let _ = writeln!(out, "K={} F={} Z={} S={}", p.k(), p.f(), p.z(), p.s());
    out.push_str(&p.grid().to_string());
    out
}

fn parse_header(line: &str) -> Result<Header, FormatError> {
    let bad = || FormatError::BadHeader(line.to_string());
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 4 {
        return Err(bad());
    }
    let mut values = [0usize; 4];
    for ((token, key), slot) in tokens.iter().zip(["K", "F", "Z", "S"]).zip(&mut values) {
        let (name, value) = token.split_once('=').ok_or_else(bad)?;
        if name != key || value.is_empty() || !value.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        *slot = value.parse().map_err(|_| bad())?;
    }
    let [k, f, z, s] = values;
    Ok(Header { k, f, z, s })
}

/// Parses the header and body without checking the PDA conditions.
pub fn parse_raw(text: &str) -> Result<(Header, Grid), FormatError> {
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r'));
    if lines.next().map(str::trim) != Some(MAGIC) {
        return Err(FormatError::BadMagic);
    }
    let header = parse_header(lines.next().unwrap_or(""))?;
    let body: Vec<&str> = lines.collect();
    // trailing blank lines are tolerated, nothing else is
    let body_len = body.iter().rposition(|l| !l.trim().is_empty()).map_or(0, |p| p + 1);
    if body_len != header.f {
        return Err(FormatError::RowCount {
            expected: header.f,
            found: body_len,
        });
    }
    let mut rows = Vec::with_capacity(header.f);
    for (i, line) in body[..body_len].iter().enumerate() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != header.k {
            return Err(FormatError::RowLength {
                row: i,
                expected: header.k,
                found: tokens.len(),
            });
        }
        let mut row = Vec::with_capacity(header.k);
        for (j, token) in tokens.into_iter().enumerate() {
            let entry: Entry = token.parse().map_err(|_| FormatError::BadToken {
                row: i,
                col: j,
                token: token.to_string(),
            })?;
            if let Entry::Code(code) = entry {
                if code as usize >= header.s {
                    return Err(FormatError::CodeOutOfRange {
                        row: i,
                        col: j,
                        code,
                        s: header.s,
                    });
                }
            }
            row.push(entry);
        }
        rows.push(row);
    }
    Ok((header, Grid::from_rows(rows)?))
}

/// Parses and verifies a PDA, checking Z and S against the header.
pub fn from_text(text: &str) -> Result<Pda, FormatError> {
    let (header, grid) = parse_raw(text)?;
    let pda = Pda::new(grid)?;
    check_header(&header, &pda)?;
    Ok(pda)
}

pub fn check_header(header: &Header, pda: &Pda) -> Result<(), FormatError> {
    for (field, declared, actual) in [
        ("K", header.k, pda.k()),
        ("F", header.f, pda.f()),
        ("Z", header.z, pda.z()),
        ("S", header.s, pda.s()),
    ] {
        if declared != actual {
            return Err(FormatError::HeaderMismatch {
                field,
                declared,
                actual,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "pda v1\nK=4 F=6 Z=3 S=4\n* * 0 1\n* 0 * 2\n* 1 2 *\n0 * * 3\n1 * 3 *\n2 3 * *\n";

    #[test]
    fn round_trip_is_bit_exact() {
        let p = from_text(TEXT).unwrap();
        assert_eq!(to_text(&p), TEXT);
    }

    #[test]
    fn tolerant_whitespace_but_strict_shape() {
        let loose = "pda v1\r\nK=2 F=1 Z=0 S=2\r\n0    1\r\n\n";
        let p = from_text(loose).unwrap();
        assert_eq!(to_text(&p), "pda v1\nK=2 F=1 Z=0 S=2\n0 1\n");
    }

    #[test]
    fn header_errors() {
        assert_eq!(from_text("pda v2\n"), Err(FormatError::BadMagic));
        assert!(matches!(
            from_text("pda v1\nF=1 K=2 Z=0 S=2\n0 1\n"),
            Err(FormatError::BadHeader(_))
        ));
        assert!(matches!(
            from_text("pda v1\nK=2 F=1 Z=0 S=-2\n0 1\n"),
            Err(FormatError::BadHeader(_))
        ));
        assert_eq!(
            from_text("pda v1\nK=2 F=2 Z=0 S=2\n0 1\n"),
            Err(FormatError::RowCount { expected: 2, found: 1 })
        );
        assert_eq!(
            from_text("pda v1\nK=2 F=1 Z=0 S=2\n0 1 *\n"),
            Err(FormatError::RowLength {
                row: 0,
                expected: 2,
                found: 3
            })
        );
        assert_eq!(
            from_text("pda v1\nK=2 F=1 Z=0 S=2\n0 2\n"),
            Err(FormatError::CodeOutOfRange {
                row: 0,
                col: 1,
                code: 2,
                s: 2
            })
        );
        assert!(matches!(
            from_text("pda v1\nK=2 F=1 Z=0 S=2\n0 x\n"),
            Err(FormatError::BadToken { row: 0, col: 1, .. })
        ));
        assert_eq!(
            from_text("pda v1\nK=2 F=1 Z=0 S=3\n0 1\n"),
            Err(FormatError::HeaderMismatch {
                field: "S",
                declared: 3,
                actual: 2
            })
        );
        assert_eq!(
            from_text("pda v1\nK=2 F=1 Z=1 S=2\n0 1\n"),
            Err(FormatError::HeaderMismatch {
                field: "Z",
                declared: 1,
                actual: 0
            })
        );
    }

    #[test]
    fn invalid_body_surfaces_report() {
        let err = from_text("pda v1\nK=2 F=1 Z=0 S=1\n0 0\n").unwrap_err();
        assert!(matches!(err, FormatError::Pda(PdaError::Invalid(_))));
    }
}
