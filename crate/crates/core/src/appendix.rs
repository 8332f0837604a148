//! Regression against the published figure-eight table (`p = 20`, `q = 7`,
//! `k = 1..10`).

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::pipeline::{construct_series, validate_fig8, Params, PipelineError};
use crate::psl2::Mat2;
use crate::quadint::QuadInt;

/// The embedded golden table.
pub const GOLDEN: &str = include_str!("../data/appendix_p20_q7.txt");

pub const P: i64 = 20;
pub const Q: i64 = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AppendixError {
    #[error("golden table line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenRow {
    pub k: u64,
    pub d_k: BigInt,
    pub g_k: Mat2<QuadInt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenTable {
    pub h: Mat2<QuadInt>,
    pub rows: Vec<GoldenRow>,
}

pub fn parse_golden(text: &str) -> Result<GoldenTable, AppendixError> {
    let mut h = None;
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: String| AppendixError::Parse { line: i + 1, reason };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let mat = |s: &str| Mat2::parse(s, 3).map_err(|e| err(e.to_string()));
        match fields.as_slice() {
            ["h", m] => {
                if h.is_some() {
                    return Err(err("duplicate h".into()));
                }
                h = Some(mat(m)?);
            }
            [k, d, m] => {
                let k: u64 = k.parse().map_err(|_| err(format!("bad k {k:?}")))?;
                let d_k: BigInt = d.parse().map_err(|_| err(format!("bad D_k {d:?}")))?;
                rows.push(GoldenRow { k, d_k, g_k: mat(m)? });
            }
            _ => return Err(err("expected `h <matrix>` or `<k> <D_k> <matrix>`".into())),
        }
    }
    let h = h.ok_or(AppendixError::Parse { line: 0, reason: "missing h".into() })?;
    if rows.is_empty() {
        return Err(AppendixError::Parse { line: 0, reason: "no rows".into() });
    }
    if rows.iter().enumerate().any(|(i, r)| r.k != i as u64 + 1) {
        return Err(AppendixError::Parse { line: 0, reason: "rows must be k = 1, 2, ... in order".into() });
    }
    Ok(GoldenTable { h, rows })
}

/// The first field where the computation and the table disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub field: String,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: expected {}, computed {}", self.field, self.expected, self.actual)
    }
}

fn diff_matrix(name: &str, expected: &Mat2<QuadInt>, actual: &Mat2<QuadInt>) -> Option<Mismatch> {
    let pos = ["1,1", "1,2", "2,1", "2,2"];
    expected
        .entries()
        .into_iter()
        .zip(actual.entries())
        .zip(pos)
        .find(|((e, a), _)| e != a)
        .map(|((e, a), p)| Mismatch { field: format!("{name}[{p}]"), expected: e.to_string(), actual: a.to_string() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppendixReport {
    pub rows: usize,
    pub mismatch: Option<Mismatch>,
}

impl AppendixReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Constructs `h` and `g_1, ..., g_n` for `(20, 7)` and compares them
/// entry-by-entry with `table`.
pub fn check_table(table: &GoldenTable) -> Result<AppendixReport, AppendixError> {
    let params = Params::Fig8(validate_fig8(P, Q)?);
    let n = table.rows.len() as u64;
    let ws = construct_series(&params, 1..=n)?;
    let mut mismatch = diff_matrix("h", &table.h, &ws[0].h);
    for (row, w) in table.rows.iter().zip(&ws) {
        if mismatch.is_some() {
            break;
        }
        if row.d_k != w.d_k {
            mismatch = Some(Mismatch {
                field: format!("D_{}", row.k),
                expected: row.d_k.to_string(),
                actual: w.d_k.to_string(),
            });
        } else {
            mismatch = diff_matrix(&format!("g_{}", row.k), &row.g_k, &w.g_k);
        }
    }
    Ok(AppendixReport { rows: table.rows.len(), mismatch })
}

pub fn check_golden(text: &str) -> Result<AppendixReport, AppendixError> {
    check_table(&parse_golden(text)?)
}
