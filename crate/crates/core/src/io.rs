//! CSV import and export.
//!
//! Floats are written with 17 significant digits so every value round-trips
//! bit for bit.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::approx::{MTermResult, Method, Witness};
use crate::extremal::ExtremalFunction;
use crate::norm::NormIndex;
use crate::poly::{node, GridSignal, PolyError, TrigPoly};

/// Largest `|k|` accepted when decoding a polynomial.
pub const MAX_DECODED_DEGREE: usize = 1 << 20;
/// Largest grid accepted when decoding a sampled signal.
pub const MAX_DECODED_GRID: usize = 1 << 24;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("line {line}: {msg}")]
    Format { line: u64, msg: String },
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_err(line: u64, msg: impl Into<String>) -> IoError {
    IoError::Format { line, msg: msg.into() }
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

fn field<'r>(rec: &'r csv::StringRecord, i: usize, name: &str) -> Result<&'r str, IoError> {
    rec.get(i).map(str::trim).ok_or_else(|| format_err(line_of(rec), format!("missing column {name}")))
}

fn parse_f64(rec: &csv::StringRecord, i: usize, name: &str) -> Result<f64, IoError> {
    let s = field(rec, i, name)?;
    let v: f64 = s.parse().map_err(|_| format_err(line_of(rec), format!("{name}: cannot parse {s:?}")))?;
    if !v.is_finite() {
        return Err(format_err(line_of(rec), format!("{name} is not finite")));
    }
    Ok(v)
}

fn parse_int<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str) -> Result<T, IoError> {
    let s = field(rec, i, name)?;
    s.parse().map_err(|_| format_err(line_of(rec), format!("{name}: cannot parse {s:?}")))
}

fn expect_header(rec: &csv::StringRecord, want: &[&str]) -> Result<(), IoError> {
    let got: Vec<&str> = rec.iter().map(str::trim).collect();
    if got.len() < want.len() || got[..want.len()] != *want {
        return Err(format_err(line_of(rec), format!("expected header {}", want.join(","))));
    }
    Ok(())
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(r)
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().flexible(true).from_writer(w)
}

const POLY_HEADER: [&str; 3] = ["k", "re", "im"];

fn write_poly_rows<W: Write>(w: &mut csv::Writer<W>, poly: &TrigPoly) -> Result<(), IoError> {
    w.write_record(POLY_HEADER)?;
    for (k, c) in poly.iter() {
        w.write_record([k.to_string(), fmt_f64(c.re), fmt_f64(c.im)])?;
    }
    Ok(())
}

/// Writes `k,re,im` rows for `k = −N, …, N`.
pub fn write_trigpoly<W: Write>(out: W, poly: &TrigPoly) -> Result<(), IoError> {
    let mut w = writer(out);
    write_poly_rows(&mut w, poly)?;
    w.flush()?;
    Ok(())
}

fn poly_from_rows(rows: &[(u64, i64, Complex64)]) -> Result<TrigPoly, IoError> {
    let mut degree = 0usize;
    for &(line, k, _) in rows {
        let a = k.unsigned_abs() as usize;
        if a > MAX_DECODED_DEGREE {
            return Err(format_err(line, format!("|k| = {a} exceeds {MAX_DECODED_DEGREE}")));
        }
        degree = degree.max(a);
    }
    let mut coeffs = vec![None; 2 * degree + 1];
    for &(line, k, c) in rows {
        let slot = &mut coeffs[(k + degree as i64) as usize];
        if slot.is_some() {
            return Err(format_err(line, format!("k = {k} appears twice")));
        }
        *slot = Some(c);
    }
    let coeffs = coeffs.into_iter().map(|c| c.unwrap_or_default()).collect();
    Ok(TrigPoly::new(degree, coeffs)?)
}

fn poly_row(rec: &csv::StringRecord) -> Result<(u64, i64, Complex64), IoError> {
    let k = parse_int(rec, 0, "k")?;
    let c = Complex64::new(parse_f64(rec, 1, "re")?, parse_f64(rec, 2, "im")?);
    Ok((line_of(rec), k, c))
}

/// Reads the `k,re,im` format. Missing indices are zero; the degree is the
/// largest `|k|` present.
pub fn read_trigpoly<R: Read>(input: R) -> Result<TrigPoly, IoError> {
    let mut records = reader(input).into_records();
    let header = records.next().ok_or_else(|| format_err(1, "empty input"))??;
    expect_header(&header, &POLY_HEADER)?;
    let rows = records.map(|r| poly_row(&r?)).collect::<Result<Vec<_>, _>>()?;
    poly_from_rows(&rows)
}

/// Writes `j,t,value` rows; complex signals carry a fourth column `value_im`.
pub fn write_grid<W: Write>(out: W, signal: &GridSignal) -> Result<(), IoError> {
    let mut w = writer(out);
    let real = signal.is_real();
    if real {
        w.write_record(["j", "t", "value"])?;
    } else {
        w.write_record(["j", "t", "value", "value_im"])?;
    }
    for (j, v) in signal.values().iter().enumerate() {
        let mut rec = vec![j.to_string(), fmt_f64(signal.node(j)), fmt_f64(v.re)];
        if !real {
            rec.push(fmt_f64(v.im));
        }
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the `j,t,value[,value_im]` format. Rows must be in order
/// `j = 0, …, M−1` with `M` a power of two and `t_j = 2πj/M`.
pub fn read_grid<R: Read>(input: R) -> Result<GridSignal, IoError> {
    let mut records = reader(input).into_records();
    let header = records.next().ok_or_else(|| format_err(1, "empty input"))??;
    expect_header(&header, &["j", "t", "value"])?;
    let complex = header.get(3).map(str::trim) == Some("value_im");
    let mut values = Vec::new();
    let mut nodes = Vec::new();
    for rec in records {
        let rec = rec?;
        let j: usize = parse_int(&rec, 0, "j")?;
        if j != values.len() {
            return Err(format_err(line_of(&rec), format!("expected j = {}, got {j}", values.len())));
        }
        if values.len() >= MAX_DECODED_GRID {
            return Err(format_err(line_of(&rec), "grid too large"));
        }
        nodes.push((line_of(&rec), parse_f64(&rec, 1, "t")?));
        let im = if complex { parse_f64(&rec, 3, "value_im")? } else { 0.0 };
        values.push(Complex64::new(parse_f64(&rec, 2, "value")?, im));
    }
    let m = values.len();
    for (j, &(line, t)) in nodes.iter().enumerate() {
        if (t - node(j, m)).abs() > 1e-9 {
            return Err(format_err(line, format!("t = {t} is not the node 2π·{j}/{m}")));
        }
    }
    Ok(GridSignal::new(values)?)
}

const MTERM_HEADER: [&str; 6] = ["m", "s", "method", "error", "certificate", "gamma"];

/// One decoded row of the m-term result format.
#[derive(Debug, Clone, PartialEq)]
pub struct MTermRecord {
    pub m: usize,
    pub s: NormIndex,
    pub method: Method,
    pub error: f64,
    pub certificate: Option<f64>,
    pub gamma: Vec<i64>,
}

impl From<&MTermResult> for MTermRecord {
    fn from(r: &MTermResult) -> Self {
        MTermRecord { m: r.m, s: r.s, method: r.method, error: r.error, certificate: r.certificate, gamma: r.gamma.clone() }
    }
}

/// Writes `m,s,method,error,certificate,gamma`; `gamma` is `;`-separated and
/// a missing certificate is an empty field.
pub fn write_mterm_results<W: Write>(out: W, results: &[MTermResult]) -> Result<(), IoError> {
    let mut w = writer(out);
    w.write_record(MTERM_HEADER)?;
    for r in results {
        let gamma: Vec<String> = r.gamma.iter().map(i64::to_string).collect();
        w.write_record([
            r.m.to_string(),
            r.s.to_string(),
            r.method.to_string(),
            fmt_f64(r.error),
            r.certificate.map(fmt_f64).unwrap_or_default(),
            gamma.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_mterm_results<R: Read>(input: R) -> Result<Vec<MTermRecord>, IoError> {
    let mut records = reader(input).into_records();
    let header = records.next().ok_or_else(|| format_err(1, "empty input"))??;
    expect_header(&header, &MTERM_HEADER)?;
    let mut out = Vec::new();
    for rec in records {
        let rec = rec?;
        let line = line_of(&rec);
        let s = field(&rec, 1, "s")?.parse().map_err(|e| format_err(line, format!("s: {e}")))?;
        let method = field(&rec, 2, "method")?;
        let method = Method::parse(method).ok_or_else(|| format_err(line, format!("unknown method {method:?}")))?;
        let certificate = match field(&rec, 4, "certificate")? {
            "" => None,
            _ => Some(parse_f64(&rec, 4, "certificate")?),
        };
        let gamma_field = field(&rec, 5, "gamma")?;
        let gamma = if gamma_field.is_empty() {
            Vec::new()
        } else {
            gamma_field
                .split(';')
                .map(|g| g.trim().parse().map_err(|_| format_err(line, format!("gamma: cannot parse {g:?}"))))
                .collect::<Result<Vec<i64>, _>>()?
        };
        let m: usize = parse_int(&rec, 0, "m")?;
        if gamma.len() != m {
            return Err(format_err(line, format!("gamma has {} entries, m = {m}", gamma.len())));
        }
        out.push(MTermRecord { m, s, method, error: parse_f64(&rec, 3, "error")?, certificate, gamma });
    }
    Ok(out)
}

/// Writes `k_star,s_conj,norm` for a single-harmonic witness.
pub fn write_witness<W: Write>(out: W, witness: &Witness) -> Result<(), IoError> {
    let mut w = writer(out);
    w.write_record(["k_star", "s_conj", "norm"])?;
    w.write_record([
        witness.k_star.map(|k| k.to_string()).unwrap_or_default(),
        witness.s_conj.to_string(),
        fmt_f64(witness.norm()),
    ])?;
    w.flush()?;
    Ok(())
}

/// Constants and coefficients of an exported extremal polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalRecord {
    pub k0: f64,
    pub a: f64,
    pub c1: f64,
    pub n: usize,
    pub poly: TrigPoly,
}

const EXTREMAL_KEYS: [&str; 4] = ["K0", "A", "C1", "n"];

/// Writes four `key,value` rows (`K0`, `A`, `C1`, `n`) followed by the
/// `k,re,im` block.
pub fn write_extremal<W: Write>(out: W, fs: &ExtremalFunction) -> Result<(), IoError> {
    let mut w = writer(out);
    w.write_record(["K0", &fmt_f64(fs.k0)])?;
    w.write_record(["A", &fmt_f64(fs.a)])?;
    w.write_record(["C1", &fmt_f64(fs.c1)])?;
    w.write_record(["n", &fs.n.to_string()])?;
    write_poly_rows(&mut w, &fs.poly)?;
    w.flush()?;
    Ok(())
}

pub fn read_extremal<R: Read>(input: R) -> Result<ExtremalRecord, IoError> {
    let mut records = reader(input).into_records();
    let mut consts = [0.0f64; 3];
    let mut n = 0usize;
    for (i, key) in EXTREMAL_KEYS.iter().enumerate() {
        let rec = records.next().ok_or_else(|| format_err(i as u64 + 1, format!("missing {key} row")))??;
        if field(&rec, 0, "key")? != *key {
            return Err(format_err(line_of(&rec), format!("expected {key} row")));
        }
        if i < 3 {
            consts[i] = parse_f64(&rec, 1, key)?;
        } else {
            n = parse_int(&rec, 1, key)?;
        }
    }
    let header = records.next().ok_or_else(|| format_err(5, "missing coefficient block"))??;
    expect_header(&header, &POLY_HEADER)?;
    let rows = records.map(|r| poly_row(&r?)).collect::<Result<Vec<_>, _>>()?;
    let poly = poly_from_rows(&rows)?;
    if poly.degree() > n {
        return Err(format_err(0, format!("degree {} exceeds n = {n}", poly.degree())));
    }
    let [k0, a, c1] = consts;
    Ok(ExtremalRecord { k0, a, c1, n, poly })
}
