//! CSV tables: spectra, parameter sweeps and optimizer traces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::TraceRow;

/// Significant digits written for every real number.
pub const DIGITS: usize = 12;

/// Decimal text with `digits` significant digits. Magnitudes outside
/// [1e-6, 1e15) fall back to exponent notation.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-6..15).contains(&mag) {
        return format!("{:.*e}", digits.saturating_sub(1), x);
    }
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    // rounding can carry into a new leading digit; drop one decimal then
    let significant = s.chars().filter(char::is_ascii_digit).skip_while(|c| *c == '0').count();
    if decimals > 0 && significant > digits {
        return format!("{:.*}", decimals - 1, x);
    }
    s
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// One line of a spectrum table.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub k: usize,
    pub lambda: f64,
    /// lambda times the volume
    pub normalized: f64,
    pub multiplicity_note: String,
}

#[derive(Serialize, Deserialize)]
struct SpectrumRecord {
    k: usize,
    lambda: String,
    #[serde(rename = "Lambda")]
    normalized: String,
    multiplicity_note: String,
}

/// Header "k,lambda,Lambda,multiplicity_note", one row per entry.
pub fn spectrum_csv(rows: &[SpectrumRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(SpectrumRecord {
            k: r.k,
            lambda: format_sig(r.lambda, DIGITS),
            normalized: format_sig(r.normalized, DIGITS),
            multiplicity_note: r.multiplicity_note.clone(),
        })
        .map_err(csv_err)?;
    }
    if rows.is_empty() {
        w.write_record(["k", "lambda", "Lambda", "multiplicity_note"]).map_err(csv_err)?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Inverse of [`spectrum_csv`]; rows must be ascending in k.
pub fn parse_spectrum_csv(text: &str) -> Result<Vec<SpectrumRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != ["k", "lambda", "Lambda", "multiplicity_note"] {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let mut rows: Vec<SpectrumRow> = Vec::new();
    for rec in r.deserialize::<SpectrumRecord>() {
        let rec = rec.map_err(csv_err)?;
        if rows.last().is_some_and(|p| p.k >= rec.k) {
            return Err(Error::Parse(format!("row k = {} is out of order", rec.k)));
        }
        rows.push(SpectrumRow {
            k: rec.k,
            lambda: parse_f64(&rec.lambda)?,
            normalized: parse_f64(&rec.normalized)?,
            multiplicity_note: rec.multiplicity_note,
        });
    }
    Ok(rows)
}

/// One value of a parameter sweep; `b` is absent for one-parameter sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub a: f64,
    pub b: Option<f64>,
    pub k: usize,
    pub normalized: f64,
}

/// Long format: "a,b,k,Lambda", or "a,k,Lambda" when no row has b.
pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let two = rows.iter().any(|r| r.b.is_some());
    let mut w = csv::Writer::from_writer(Vec::new());
    if two {
        w.write_record(["a", "b", "k", "Lambda"]).map_err(csv_err)?;
    } else {
        w.write_record(["a", "k", "Lambda"]).map_err(csv_err)?;
    }
    for r in rows {
        let mut rec = vec![format_sig(r.a, DIGITS)];
        if two {
            let b = r.b.ok_or_else(|| Error::InvalidInput("sweep mixes one- and two-parameter rows".into()))?;
            rec.push(format_sig(b, DIGITS));
        }
        rec.push(r.k.to_string());
        rec.push(format_sig(r.normalized, DIGITS));
        w.write_record(&rec).map_err(csv_err)?;
    }
    finish(w)
}

/// Inverse of [`sweep_csv`].
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let two = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["a", "b", "k", "Lambda"] => true,
        ["a", "k", "Lambda"] => false,
        _ => return Err(Error::Parse(format!("unexpected header {header:?}"))),
    };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let f: Vec<&str> = rec.iter().collect();
        let off = usize::from(two);
        rows.push(SweepRow {
            a: parse_f64(f[0])?,
            b: if two { Some(parse_f64(f[1])?) } else { None },
            k: f[1 + off].trim().parse().map_err(|_| Error::Parse(format!("bad k {:?}", f[1 + off])))?,
            normalized: parse_f64(f[2 + off])?,
        });
    }
    Ok(rows)
}

/// Optimizer trace, one row per accepted iterate.
pub fn trace_csv(rows: &[TraceRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["outer", "iteration", "Lambda_k", "objective", "grad_norm", "step", "a", "b"]).map_err(csv_err)?;
    let opt = |v: Option<f64>| v.map(|x| format_sig(x, DIGITS)).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.outer.to_string(),
            r.iteration.to_string(),
            format_sig(r.lambda_k, DIGITS),
            format_sig(r.objective, DIGITS),
            format_sig(r.grad_norm, DIGITS),
            format_sig(r.step, DIGITS),
            opt(r.a),
            opt(r.b),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

/// A single column of values with a header line.
pub fn values_csv(name: &str, values: &[f64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([name]).map_err(csv_err)?;
    for v in values {
        w.write_record([format_sig(*v, DIGITS)]).map_err(csv_err)?;
    }
    finish(w)
}

/// Inverse of [`values_csv`]; also accepts a bare list of numbers.
pub fn parse_values_csv(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        match t.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => {}
            Err(_) => return Err(Error::Parse(format!("line {}: not a number: {t:?}", i + 1))),
        }
    }
    Ok(out)
}
