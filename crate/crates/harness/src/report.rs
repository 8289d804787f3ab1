//! Result rows and their CSV / JSON-lines encodings.

use std::fmt::Write as _;

use ratioslab_core::density::{DensityReport, SDecomposition};
use serde::{Deserialize, Serialize};

use crate::config::MethodSet;

/// One `(q, σ, φ)` comparison of the density methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub q: u64,
    pub sigma: f64,
    pub phi: String,
    pub methods: MethodSet,
    pub empirical: Option<f64>,
    pub explicit: Option<f64>,
    pub ratios: Option<f64>,
    /// `empirical − explicit`.
    pub d_emp_exp: Option<f64>,
    /// `explicit − ratios`, i.e. minus the prime term.
    pub d_exp_ratios: Option<f64>,
    pub truncation_bound: Option<f64>,
    pub t_max: Option<f64>,
    pub decomposition: Option<SDecomposition>,
    /// `ok`, or `error: …` for rows that failed and are excluded from fits.
    pub status: String,
}

impl ComparisonRow {
    pub fn key(&self) -> RowKey {
        RowKey {
            q: self.q,
            sigma_bits: self.sigma.to_bits(),
            phi: self.phi.clone(),
            methods: self.methods.clone(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Idempotency key of a row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowKey {
    pub q: u64,
    pub sigma_bits: u64,
    pub phi: String,
    pub methods: MethodSet,
}

pub const ROW_COLUMNS: [&str; 18] = [
    "q", "sigma", "phi", "methods", "empirical", "explicit", "ratios", "d_emp_exp", "d_exp_ratios",
    "trunc_bound", "t_max", "S", "S1", "S2", "B1", "B2", "B3", "status",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn clean(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

pub fn csv_header() -> String {
    ROW_COLUMNS.join(",")
}

pub fn row_to_csv(row: &ComparisonRow) -> String {
    let d = row.decomposition;
    let fields = [
        row.q.to_string(),
        row.sigma.to_string(),
        clean(&row.phi),
        row.methods.to_string(),
        opt(row.empirical),
        opt(row.explicit),
        opt(row.ratios),
        opt(row.d_emp_exp),
        opt(row.d_exp_ratios),
        opt(row.truncation_bound),
        opt(row.t_max),
        opt(d.map(|d| d.s)),
        opt(d.map(|d| d.s1)),
        opt(d.map(|d| d.s2)),
        opt(d.map(|d| d.b1)),
        opt(d.map(|d| d.b2)),
        opt(d.map(|d| d.b3)),
        clean(&row.status),
    ];
    fields.join(",")
}

pub fn row_from_csv(line: &str) -> Result<ComparisonRow, String> {
    let f: Vec<&str> = line.trim_end_matches(['\r', '\n']).split(',').collect();
    if f.len() != ROW_COLUMNS.len() {
        return Err(format!("expected {} fields, found {}", ROW_COLUMNS.len(), f.len()));
    }
    let num = |i: usize| -> Result<Option<f64>, String> {
        if f[i].is_empty() {
            Ok(None)
        } else {
            f[i].parse::<f64>()
                .map(Some)
                .map_err(|_| format!("column {}: bad number '{}'", ROW_COLUMNS[i], f[i]))
        }
    };
    let q: u64 = f[0].parse().map_err(|_| format!("bad q '{}'", f[0]))?;
    let sigma: f64 = f[1].parse().map_err(|_| format!("bad sigma '{}'", f[1]))?;
    let parts = [num(11)?, num(12)?, num(13)?, num(14)?, num(15)?, num(16)?];
    let decomposition = match parts {
        [Some(s), Some(s1), Some(s2), Some(b1), Some(b2), Some(b3)] => Some(SDecomposition {
            q,
            sigma,
            s,
            s1,
            s2,
            b1,
            b2,
            b3,
        }),
        [None, None, None, None, None, None] => None,
        _ => return Err("partial decomposition".into()),
    };
    Ok(ComparisonRow {
        q,
        sigma,
        phi: f[2].to_string(),
        methods: f[3].parse()?,
        empirical: num(4)?,
        explicit: num(5)?,
        ratios: num(6)?,
        d_emp_exp: num(7)?,
        d_exp_ratios: num(8)?,
        truncation_bound: num(9)?,
        t_max: num(10)?,
        decomposition,
        status: f[17].to_string(),
    })
}

/// Parses a CSV document written by [`rows_to_csv`].
pub fn rows_from_csv(text: &str) -> Result<Vec<ComparisonRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == csv_header() => {}
        _ => return Err("missing or unexpected CSV header".into()),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| row_from_csv(l).map_err(|e| format!("line {}: {e}", i + 2)))
        .collect()
}

pub fn rows_to_csv(rows: &[ComparisonRow]) -> String {
    let mut out = csv_header();
    out.push('\n');
    for r in rows {
        out.push_str(&row_to_csv(r));
        out.push('\n');
    }
    out
}

pub fn rows_to_jsonl(rows: &[ComparisonRow]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&serde_json::to_string(r).expect("rows serialize"));
        out.push('\n');
    }
    out
}

pub const REPORT_COLUMNS: [&str; 9] =
    ["q", "sigma", "phi", "method", "main", "gamma", "prime", "total", "trunc_bound"];

pub fn reports_to_csv(reports: &[DensityReport]) -> String {
    let mut out = REPORT_COLUMNS.join(",");
    out.push('\n');
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.q,
            r.phi.sigma,
            r.phi.name(),
            r.method.as_str(),
            r.main_term,
            opt(r.gamma_term),
            opt(r.prime_term),
            r.total,
            r.truncation_bound
        );
    }
    out
}
