//! CSV reports: a block of measure rows, then optionally a blank line and a
//! block of inequality checks.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::Interval;
use crate::measures::{CertifiedValue, Check};

pub const MEASURE_HEADER: &str = "kind,name,estimate,lower,upper,method,tol,wall_ms";
pub const CHECK_HEADER: &str = "kind,name,lhs,rhs,slack,status";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("unexpected header {0:?}")]
    Header(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureRow {
    pub kind: String,
    pub name: String,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub method: String,
    pub tol: f64,
    pub wall_ms: f64,
}

impl MeasureRow {
    pub fn new(
        kind: &str,
        name: impl Into<String>,
        v: &CertifiedValue,
        tol: f64,
        wall_ms: f64,
    ) -> MeasureRow {
        MeasureRow {
            kind: kind.into(),
            name: name.into(),
            estimate: v.estimate,
            lower: v.lower,
            upper: v.upper,
            method: v.method.name().into(),
            tol,
            wall_ms,
        }
    }

    pub fn from_interval(
        kind: &str,
        name: impl Into<String>,
        iv: Interval,
        method: &str,
        tol: f64,
        wall_ms: f64,
    ) -> MeasureRow {
        let estimate = if iv.hi.is_finite() {
            0.5 * (iv.lo + iv.hi)
        } else {
            iv.lo
        };
        MeasureRow {
            kind: kind.into(),
            name: name.into(),
            estimate,
            lower: iv.lo,
            upper: iv.hi,
            method: method.into(),
            tol,
            wall_ms,
        }
    }

    pub fn is_ordered(&self) -> bool {
        self.lower <= self.estimate && self.estimate <= self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub kind: String,
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub slack: f64,
    pub status: String,
}

impl CheckRow {
    pub fn new(kind: &str, c: &Check) -> CheckRow {
        CheckRow {
            kind: kind.into(),
            name: c.name.clone(),
            lhs: fmt_interval(c.lhs),
            rhs: fmt_interval(c.rhs),
            slack: c.slack,
            status: c.status.to_string(),
        }
    }
}

pub fn fmt_interval(iv: Interval) -> String {
    format!("[{:e}, {:e}]", iv.lo, iv.hi)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub measures: Vec<MeasureRow>,
    pub checks: Vec<CheckRow>,
}

impl Report {
    pub fn extend(&mut self, other: Report) {
        self.measures.extend(other.measures);
        self.checks.extend(other.checks);
    }

    pub fn violated(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.status == "VIOLATED")
            .count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = block(MEASURE_HEADER, &self.measures);
        if !self.checks.is_empty() {
            out.push('\n');
            out.push_str(&block(CHECK_HEADER, &self.checks));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Report, ReportError> {
        let (first, second) = match text.find("\n\n") {
            Some(i) => (&text[..=i], Some(&text[i + 2..])),
            None => (text, None),
        };
        Ok(Report {
            measures: read_block(MEASURE_HEADER, first)?,
            checks: match second {
                Some(t) => read_block(CHECK_HEADER, t)?,
                None => Vec::new(),
            },
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), ReportError> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Human-readable summary, one line per row.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for m in &self.measures {
            let _ = writeln!(
                s,
                "{:<8} {:<28} {:>12.6e} in [{:.6e}, {:.6e}] ({})",
                m.kind, m.name, m.estimate, m.lower, m.upper, m.method
            );
        }
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{:<12} {:<9} {} (slack {:.3e})",
                c.kind, c.status, c.name, c.slack
            );
        }
        s
    }
}

fn block<T: Serialize>(header: &str, rows: &[T]) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8");
    format!("{header}\n{body}")
}

fn read_block<T: for<'de> Deserialize<'de>>(
    header: &str,
    text: &str,
) -> Result<Vec<T>, ReportError> {
    let first = text.lines().next().unwrap_or("");
    if first != header {
        return Err(ReportError::Header(first.into()));
    }
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}
