//! File emission: indicator table, correlogram, network snapshot and the
//! run manifest. Floats are written with 12 significant digits.

use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::indicators::IndicatorSeries;

pub const INDICATORS_FILE: &str = "indicators.csv";
pub const CORRELOGRAM_FILE: &str = "correlogram.csv";
pub const MANIFEST_FILE: &str = "run_manifest.json";

/// Formats `x` with 12 significant digits, plain notation for exponents in
/// [-5, 12) and scientific otherwise; trailing zeros are dropped.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        trim_zeros(&format!("{:.*}", (11 - exp) as usize, x))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Writes one row per epoch: `end_date` followed by `columns`.
pub fn write_indicators(path: &Path, series: &IndicatorSeries, columns: &[&str]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["end_date"];
    header.extend_from_slice(columns);
    w.write_record(&header)?;
    for row in &series.rows {
        let mut record = vec![row.end_date.clone()];
        for &c in columns {
            let cell = match c {
                "edge_count" => row.edge_count.to_string(),
                "community_count" => row.community_count.to_string(),
                _ => IndicatorSeries::value(row, c).map_or_else(String::new, format_float),
            };
            record.push(cell);
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Square correlation table with a leading `indicator` column.
pub fn write_correlogram(path: &Path, columns: &[String], corr: &DMatrix<f64>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["indicator".to_string()];
    header.extend(columns.iter().cloned());
    w.write_record(&header)?;
    for (i, name) in columns.iter().enumerate() {
        let mut record = vec![name.clone()];
        record.extend((0..columns.len()).map(|j| format_float(corr[(i, j)])));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// One edge of a threshold network with the communities of its endpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotEdge {
    pub ticker_i: String,
    pub ticker_j: String,
    pub corr: f64,
    pub dist: f64,
    pub community_i: usize,
    pub community_j: usize,
}

pub fn write_snapshot(path: &Path, edges: &[SnapshotEdge]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["ticker_i", "ticker_j", "corr", "dist", "community_i", "community_j"])?;
    for e in edges {
        w.write_record([
            e.ticker_i.clone(),
            e.ticker_j.clone(),
            format_float(e.corr),
            format_float(e.dist),
            e.community_i.to_string(),
            e.community_j.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}
