//! Report tables and their CSV form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use trigapprox::NormIndex;

pub const ORDER_COLUMNS: [&str; 9] = [
    "n",
    "m",
    "psi_n_value",
    "e_m_upper",
    "e_m_certificate",
    "e_orth_upper",
    "E_n_value",
    "ratio_upper",
    "ratio_cert",
];

/// One `(n, m)` row of an order experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderRow {
    pub n: usize,
    pub m: usize,
    pub psi_n_value: f64,
    pub e_m_upper: f64,
    pub e_m_certificate: f64,
    pub e_orth_upper: f64,
    #[serde(rename = "E_n_value")]
    pub e_n_value: f64,
    pub ratio_upper: f64,
    pub ratio_cert: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OrderReport {
    pub rows: Vec<OrderRow>,
    /// Downgraded requests and other non-fatal notes.
    pub warnings: Vec<String>,
    /// Rows whose invariants failed.
    pub failures: Vec<String>,
}

impl OrderReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("unexpected header: {0}")]
    Header(String),
    #[error("row {row}: {msg}")]
    Row { row: usize, msg: String },
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_order_csv<W: Write>(out: W, rows: &[OrderRow]) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ORDER_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.m.to_string(),
            fmt_f64(r.psi_n_value),
            fmt_f64(r.e_m_upper),
            fmt_f64(r.e_m_certificate),
            fmt_f64(r.e_orth_upper),
            fmt_f64(r.e_n_value),
            fmt_f64(r.ratio_upper),
            fmt_f64(r.ratio_cert),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_order_csv`]; values must be finite and
/// `m ∈ {2n−1, 2n}`.
pub fn read_order_csv<R: Read>(input: R) -> Result<Vec<OrderRow>, ReportError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != ORDER_COLUMNS {
        return Err(ReportError::Header(header.join(",")));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.deserialize::<OrderRow>().enumerate() {
        let r = rec?;
        let row = i + 1;
        let values = [
            r.psi_n_value,
            r.e_m_upper,
            r.e_m_certificate,
            r.e_orth_upper,
            r.e_n_value,
            r.ratio_upper,
            r.ratio_cert,
        ];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ReportError::Row { row, msg: "non-finite value".into() });
        }
        if r.n == 0 || r.n > usize::MAX / 4 || (r.m != 2 * r.n && r.m + 1 != 2 * r.n) {
            return Err(ReportError::Row { row, msg: format!("m = {} does not match n = {}", r.m, r.n) });
        }
        rows.push(r);
    }
    Ok(rows)
}

/// A chain row that failed, with the function it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainViolation {
    /// `"fstar"` or `"sample-<i>"`.
    pub source: String,
    pub s: NormIndex,
    pub n: usize,
    pub m: usize,
    pub best: f64,
    pub orthogonal: f64,
    pub fourier: f64,
}

pub const CHAIN_COLUMNS: [&str; 7] = ["source", "s", "n", "m", "e_m", "e_orth", "E_n"];

pub fn write_chain_csv<W: Write>(out: W, rows: &[ChainViolation]) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CHAIN_COLUMNS)?;
    for v in rows {
        w.write_record([
            v.source.clone(),
            v.s.to_string(),
            v.n.to_string(),
            v.m.to_string(),
            fmt_f64(v.best),
            fmt_f64(v.orthogonal),
            fmt_f64(v.fourier),
        ])?;
    }
    w.flush()?;
    Ok(())
}
