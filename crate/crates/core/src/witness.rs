//! Serialization of compression witnesses.
//!
//! The machine format is a JSON document
//!
//! ```json
//! { "format": "bianchi-witness/1", "witnesses": [ { "mode": "fig8", ... } ] }
//! ```
//!
//! in which every number is a decimal string and every element of `O_d` uses
//! the canonical `u+v*sqrt(-d)` text. Field order is fixed, so identical
//! inputs give byte-identical output.

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pipeline::{CompressionWitness, Mode};
use crate::psl2::{Mat2, Word};
use crate::quadint::QuadInt;

pub const FORMAT: &str = "bianchi-witness/1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("malformed witness document: {0}")]
    Json(String),
    #[error("unsupported format {0:?}")]
    Format(String),
    #[error("witness {index}, field {field}: {reason}")]
    Field { index: usize, field: &'static str, reason: String },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    format: String,
    witnesses: Vec<Record>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckRecord {
    name: String,
    pass: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    mode: String,
    d: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<String>,
    xi: String,
    norm_xi: String,
    r: String,
    t: String,
    h: String,
    k: String,
    n_k: String,
    #[serde(rename = "D_k")]
    d_k: String,
    g_k: String,
    alpha_k: String,
    beta_k: String,
    word: String,
    checks: Vec<CheckRecord>,
    assumptions: Vec<String>,
}

impl From<&CompressionWitness> for Record {
    fn from(w: &CompressionWitness) -> Self {
        Record {
            mode: w.mode.to_string(),
            d: w.d.to_string(),
            p: w.p.as_ref().map(BigInt::to_string),
            q: w.q.as_ref().map(BigInt::to_string),
            x: w.x.map(|x| x.to_string()),
            xi: w.xi.to_string(),
            norm_xi: w.norm_xi.to_string(),
            r: w.r.to_string(),
            t: w.t.to_string(),
            h: w.h.to_string(),
            k: w.k.to_string(),
            n_k: w.n_k.to_string(),
            d_k: w.d_k.to_string(),
            g_k: w.g_k.to_string(),
            alpha_k: w.alpha_k.to_string(),
            beta_k: w.beta_k.to_string(),
            word: w.word.to_string(),
            checks: w.checks.iter().map(|(n, ok)| CheckRecord { name: n.clone(), pass: *ok }).collect(),
            assumptions: w.assumptions.clone(),
        }
    }
}

impl Record {
    fn into_witness(self, index: usize) -> Result<CompressionWitness, WitnessError> {
        let bad = |field: &'static str, reason: String| WitnessError::Field { index, field, reason };
        let int = |field: &'static str, s: &str| -> Result<BigInt, WitnessError> {
            s.parse::<BigInt>().map_err(|_| bad(field, format!("not an integer: {s:?}")))
        };
        let mode = Mode::parse(&self.mode).ok_or_else(|| bad("mode", format!("unknown mode {:?}", self.mode)))?;
        let d: u64 = self.d.parse().map_err(|_| bad("d", format!("not a positive integer: {:?}", self.d)))?;
        let quad = |field: &'static str, s: &str| QuadInt::parse(s, d).map_err(|e| bad(field, e.to_string()));
        let mat = |field: &'static str, s: &str| Mat2::parse(s, d).map_err(|e| bad(field, e.to_string()));
        let k: u64 = self.k.parse().map_err(|_| bad("k", format!("not a positive integer: {:?}", self.k)))?;
        let x = match &self.x {
            Some(s) => Some(s.parse::<u64>().map_err(|_| bad("x", format!("not a positive integer: {s:?}")))?),
            None => None,
        };
        Ok(CompressionWitness {
            mode,
            d,
            p: self.p.as_deref().map(|s| int("p", s)).transpose()?,
            q: self.q.as_deref().map(|s| int("q", s)).transpose()?,
            x,
            xi: quad("xi", &self.xi)?,
            norm_xi: int("norm_xi", &self.norm_xi)?,
            r: int("r", &self.r)?,
            t: int("t", &self.t)?,
            h: mat("h", &self.h)?,
            k,
            n_k: int("n_k", &self.n_k)?,
            d_k: int("D_k", &self.d_k)?,
            g_k: mat("g_k", &self.g_k)?,
            alpha_k: quad("alpha_k", &self.alpha_k)?,
            beta_k: quad("beta_k", &self.beta_k)?,
            word: Word::parse(&self.word).ok_or_else(|| bad("word", format!("unparseable word {:?}", self.word)))?,
            checks: self.checks.into_iter().map(|c| (c.name, c.pass)).collect(),
            assumptions: self.assumptions,
        })
    }
}

/// Renders witnesses in the machine format.
pub fn to_machine(ws: &[CompressionWitness]) -> String {
    let doc = Document { format: FORMAT.to_string(), witnesses: ws.iter().map(Record::from).collect() };
    let mut s = serde_json::to_string_pretty(&doc).expect("witness documents always serialize");
    s.push('\n');
    s
}

pub fn from_machine(text: &str) -> Result<Vec<CompressionWitness>, WitnessError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| WitnessError::Json(e.to_string()))?;
    if doc.format != FORMAT {
        return Err(WitnessError::Format(doc.format));
    }
    doc.witnesses.into_iter().enumerate().map(|(i, r)| r.into_witness(i)).collect()
}

/// Human-readable rendering.
pub fn to_text(ws: &[CompressionWitness]) -> String {
    let mut s = String::new();
    for (i, w) in ws.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        let params = match w.mode {
            Mode::Fig8 => format!("p = {}, q = {}", w.p.as_ref().unwrap(), w.q.as_ref().unwrap()),
            Mode::General => format!("d = {}, x = {}", w.d, w.x.unwrap()),
        };
        let _ = writeln!(s, "{} witness ({params}), k = {}", w.mode, w.k);
        let _ = writeln!(s, "  xi      = {}   |xi|^2 = {}", w.xi, w.norm_xi);
        let _ = writeln!(s, "  r, t    = {}, {}", w.r, w.t);
        let _ = writeln!(s, "  h       = {}", w.h);
        let _ = writeln!(s, "  n_k     = {}", w.n_k);
        let _ = writeln!(s, "  D_k     = {}", w.d_k);
        let _ = writeln!(s, "  g_k     = {}", w.g_k);
        let _ = writeln!(s, "  alpha_k = {}", w.alpha_k);
        let _ = writeln!(s, "  beta_k  = {}", w.beta_k);
        let _ = writeln!(s, "  word    = {}", w.word);
        for (name, ok) in &w.checks {
            let _ = writeln!(s, "  [{}] {name}", if *ok { "pass" } else { "FAIL" });
        }
        for a in &w.assumptions {
            let _ = writeln!(s, "  assumes: {a}");
        }
    }
    s
}
