//! Text formats: piecewise spectra (JSON records `{a, b, re, im}`), grid
//! spectra (CSV `omega,re,im`), integer samples (CSV `k,re,im`), point
//! values (CSV `x,re,im`) and partitions (JSON lists of `[lo, hi]`).
//!
//! CSV readers skip blank lines, `#` comments and a non-numeric header row.
//! Rows missing from a grid or sample file are zero, so writers only emit
//! nonzero rows.

use std::fmt::Write as _;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sisbox_core::decomposition::PeriodicPartition;
use sisbox_core::grid::FrequencyGrid;
use sisbox_core::samples::TimeSamples;
use sisbox_core::signal::{GridSpectrum, PiecewiseConstantSpectrum};
use sisbox_core::SupportMask;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PieceRecord {
    pub a: f64,
    pub b: f64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn parse_error(source: &str, line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse { origin: source.to_string(), line, message: message.into() }
}

fn json_error(source: &str, e: serde_json::Error) -> CliError {
    parse_error(source, e.line(), e.to_string())
}

pub fn read_piecewise(source: &str, text: &str) -> Result<PiecewiseConstantSpectrum<f64>, CliError> {
    let records: Vec<PieceRecord> = serde_json::from_str(text).map_err(|e| json_error(source, e))?;
    let intervals: Vec<_> = records.iter().map(|r| (r.a, r.b, Complex::new(r.re, r.im))).collect();
    PiecewiseConstantSpectrum::from_intervals(&intervals).map_err(|e| parse_error(source, 1, e.to_string()))
}

pub fn write_piecewise(spectrum: &PiecewiseConstantSpectrum<f64>) -> String {
    let records: Vec<PieceRecord> =
        spectrum.intervals().into_iter().map(|(a, b, v)| PieceRecord { a, b, re: v.re, im: v.im }).collect();
    serde_json::to_string_pretty(&records).expect("records serialize") + "\n"
}

/// Numeric CSV rows of exactly `width` fields, with their 1-based line numbers.
fn csv_rows(source: &str, text: &str, width: usize) -> Result<Vec<(usize, Vec<f64>)>, CliError> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(values) if values.len() == width => rows.push((i + 1, values)),
            Ok(values) => {
                return Err(parse_error(source, i + 1, format!("expected {width} fields, found {}", values.len())))
            }
            // a header is only allowed before the first data row
            Err(_) if rows.is_empty() && fields.iter().all(|f| f.chars().all(|c| c.is_alphanumeric() || c == '_')) => {}
            Err(_) => {
                let bad = fields.iter().find(|f| f.parse::<f64>().is_err()).unwrap_or(&"");
                return Err(parse_error(source, i + 1, format!("`{bad}` is not a number")));
            }
        }
    }
    Ok(rows)
}

pub fn read_grid_spectrum(source: &str, text: &str, grid: FrequencyGrid) -> Result<GridSpectrum<f64>, CliError> {
    let mut values = vec![Complex::new(0.0, 0.0); grid.len()];
    let n = grid.resolution() as f64;
    let k = grid.half_bandwidth() as f64;
    for (line, row) in csv_rows(source, text, 3)? {
        let pos = (row[0] + k) * n;
        let j = pos.round();
        if (pos - j).abs() > 1e-6 || j < 0.0 || j >= grid.len() as f64 {
            return Err(parse_error(
                source,
                line,
                format!("ω = {} is not a point of the grid K = {}, N = {}", row[0], grid.half_bandwidth(), grid.resolution()),
            ));
        }
        values[j as usize] = Complex::new(row[1], row[2]);
    }
    GridSpectrum::new(grid, values).map_err(|e| parse_error(source, 1, e.to_string()))
}

pub fn write_grid_spectrum(values: &[Complex<f64>], grid: &FrequencyGrid) -> String {
    let mut out = String::from("omega,re,im\n");
    for (j, v) in values.iter().enumerate() {
        if v.norm_sqr() > 0.0 {
            let _ = writeln!(out, "{},{},{}", grid.omega::<f64>(j), v.re, v.im);
        }
    }
    out
}

pub fn read_samples(source: &str, text: &str) -> Result<TimeSamples<f64>, CliError> {
    let mut pairs = Vec::new();
    for (line, row) in csv_rows(source, text, 3)? {
        if row[0].fract() != 0.0 || row[0].abs() > 1e15 {
            return Err(parse_error(source, line, format!("sample index {} is not an integer", row[0])));
        }
        let k = row[0] as i64;
        if pairs.iter().any(|&(j, _)| j == k) {
            return Err(parse_error(source, line, format!("duplicate sample index {k}")));
        }
        pairs.push((k, Complex::new(row[1], row[2])));
    }
    Ok(TimeSamples::from_pairs(pairs))
}

pub fn write_samples(samples: &TimeSamples<f64>) -> String {
    let mut out = String::from("k,re,im\n");
    for (k, v) in samples.iter() {
        if v.norm_sqr() > 0.0 {
            let _ = writeln!(out, "{k},{},{}", v.re, v.im);
        }
    }
    out
}

/// Points with values, as written by `reconstruct`.
pub fn read_points(source: &str, text: &str) -> Result<Vec<(f64, Complex<f64>)>, CliError> {
    Ok(csv_rows(source, text, 3)?.into_iter().map(|(_, r)| (r[0], Complex::new(r[1], r[2]))).collect())
}

pub fn write_points(xs: &[f64], values: &[Complex<f64>]) -> String {
    let mut out = String::from("x,re,im\n");
    for (x, v) in xs.iter().zip(values) {
        let _ = writeln!(out, "{x},{},{}", v.re, v.im);
    }
    out
}

/// Evaluation points: one number per line (extra columns are ignored).
pub fn read_abscissae(source: &str, text: &str) -> Result<Vec<f64>, CliError> {
    let mut xs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let first = line.split(',').next().unwrap_or("").trim();
        match first.parse::<f64>() {
            Ok(x) => xs.push(x),
            Err(_) if xs.is_empty() && first.chars().all(|c| c.is_alphanumeric() || c == '_') => {}
            Err(_) => return Err(parse_error(source, i + 1, format!("`{first}` is not a number"))),
        }
    }
    Ok(xs)
}

pub fn read_partition(source: &str, text: &str, resolution: usize) -> Result<PeriodicPartition, CliError> {
    let parts: Vec<Vec<[f64; 2]>> = serde_json::from_str(text).map_err(|e| json_error(source, e))?;
    for part in &parts {
        for &[lo, hi] in part {
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                return Err(parse_error(source, 1, format!("[{lo}, {hi}] is not a subinterval of [0, 1]")));
            }
        }
    }
    let parts: Vec<Vec<(f64, f64)>> = parts.iter().map(|p| p.iter().map(|&[a, b]| (a, b)).collect()).collect();
    Ok(PeriodicPartition::from_intervals(resolution, &parts))
}

pub fn write_partition(masks: &[SupportMask]) -> String {
    let parts: Vec<Vec<[f64; 2]>> = masks.iter().map(|m| m.intervals().into_iter().map(|(a, b)| [a, b]).collect()).collect();
    serde_json::to_string(&parts).expect("intervals serialize") + "\n"
}

/// Values on the cells `r/n`, `0 ≤ r < n`, of `[0, 1)`; missing rows are zero.
pub fn read_periodic(source: &str, text: &str, n: usize) -> Result<Vec<Complex<f64>>, CliError> {
    let mut values = vec![Complex::new(0.0, 0.0); n];
    for (line, row) in csv_rows(source, text, 3)? {
        let r = (row[0] * n as f64).round();
        if !(0.0..n as f64).contains(&row[0]) || (r - row[0] * n as f64).abs() > 1e-6 {
            return Err(parse_error(source, line, format!("omega = {} is not a cell of [0, 1) at N = {n}", row[0])));
        }
        values[r as usize] = Complex::new(row[1], row[2]);
    }
    Ok(values)
}

/// Values of a periodic function on `[0, 1)`, one row per grid cell.
pub fn write_periodic(values: &[Complex<f64>]) -> String {
    let n = values.len() as f64;
    let mut out = String::from("omega,re,im\n");
    for (r, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", r as f64 / n, v.re, v.im);
    }
    out
}
