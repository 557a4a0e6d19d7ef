//! Price panel ingestion from CSV.
//!
//! Layout: a header row `date,<ticker>,...[,INDEX]`, then one row per trading
//! day in strictly ascending ISO-8601 date order. Empty cells and the tokens
//! `NA`, `NaN` and `null` count as missing and are handled by a
//! [`MissingPolicy`].

use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::output::format_float;
use crate::error::{Error, Result};

pub const INDEX_COLUMN: &str = "INDEX";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingPolicy {
    /// Drop every row with at least one missing cell.
    #[default]
    DropRow,
    /// Carry the last observed price forward; leading gaps are dropped.
    ForwardFill,
}

impl FromStr for MissingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop-row" => Ok(Self::DropRow),
            "forward-fill" => Ok(Self::ForwardFill),
            other => Err(Error::InvalidArgument(format!(
                "unknown missing-value policy {other:?} (expected drop-row or forward-fill)"
            ))),
        }
    }
}

/// Validated daily closing prices, `T x N`, plus an optional market index.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    pub dates: Vec<String>,
    pub tickers: Vec<String>,
    pub prices: DMatrix<f64>,
    pub index: Option<Vec<f64>>,
}

impl PricePanel {
    pub fn new(dates: Vec<String>, tickers: Vec<String>, prices: DMatrix<f64>, index: Option<Vec<f64>>) -> Result<Self> {
        let (t, n) = prices.shape();
        if dates.len() != t || tickers.len() != n {
            return Err(Error::Dimension(format!(
                "{} dates and {} tickers for a {t}x{n} price matrix",
                dates.len(),
                tickers.len()
            )));
        }
        if let Some(idx) = &index {
            if idx.len() != t {
                return Err(Error::Dimension(format!("{} index prices for {t} rows", idx.len())));
            }
        }
        check_dates(&dates)?;
        for j in 0..n {
            for i in 0..t {
                check_price(prices[(i, j)], i, &dates[i], &tickers[j])?;
            }
        }
        if let Some(idx) = &index {
            for (i, &p) in idx.iter().enumerate() {
                check_price(p, i, &dates[i], INDEX_COLUMN)?;
            }
        }
        Ok(Self {
            dates,
            tickers,
            prices,
            index,
        })
    }

    pub fn rows(&self) -> usize {
        self.prices.nrows()
    }

    pub fn tickers(&self) -> usize {
        self.prices.ncols()
    }

    /// SHA-256 over dates, tickers and the exact bits of every price.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for d in &self.dates {
            h.update(d.as_bytes());
            h.update([0]);
        }
        for t in &self.tickers {
            h.update(t.as_bytes());
            h.update([0]);
        }
        for v in self.prices.iter() {
            h.update(v.to_bits().to_le_bytes());
        }
        if let Some(idx) = &self.index {
            h.update(INDEX_COLUMN.as_bytes());
            for v in idx {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }
}

/// Writes the panel in the layout [`parse_prices`] reads, INDEX last.
pub fn write_prices(path: &Path, panel: &PricePanel) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["date".to_string()];
    header.extend(panel.tickers.iter().cloned());
    if panel.index.is_some() {
        header.push(INDEX_COLUMN.to_string());
    }
    w.write_record(&header)?;
    for (i, date) in panel.dates.iter().enumerate() {
        let mut record = vec![date.clone()];
        record.extend(panel.prices.row(i).iter().map(|&p| format_float(p)));
        if let Some(idx) = &panel.index {
            record.push(format_float(idx[i]));
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

fn check_price(p: f64, row: usize, date: &str, ticker: &str) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositivePrice {
            row,
            date: date.to_string(),
            ticker: ticker.to_string(),
            value: p,
        })
    }
}

fn parse_date(s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| Error::Malformed(format!("bad date {s:?}: {e}")))
}

fn check_dates(dates: &[String]) -> Result<()> {
    let parsed = dates.iter().map(|d| parse_date(d)).collect::<Result<Vec<_>>>()?;
    for (k, pair) in parsed.windows(2).enumerate() {
        if pair[1] == pair[0] {
            return Err(Error::Malformed(format!("duplicate date {}", dates[k + 1])));
        }
        if pair[1] < pair[0] {
            return Err(Error::Malformed(format!(
                "dates not ascending: {} follows {}",
                dates[k + 1],
                dates[k]
            )));
        }
    }
    Ok(())
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "NaN" | "nan" | "null")
}

/// Reads and validates a price panel; at least `min_rows` rows must survive
/// the missing-value policy.
pub fn ingest_prices(path: &Path, policy: MissingPolicy, min_rows: usize) -> Result<PricePanel> {
    let file = std::fs::File::open(path)?;
    parse_prices(file, policy, min_rows)
}

pub fn parse_prices<R: Read>(reader: R, policy: MissingPolicy, min_rows: usize) -> Result<PricePanel> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.len() < 2 || !header[0].eq_ignore_ascii_case("date") {
        return Err(Error::Malformed("header must be `date` followed by ticker columns".into()));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut seen = std::collections::HashSet::new();
    for name in &names {
        if name.is_empty() || !seen.insert(name.as_str()) {
            return Err(Error::Malformed(format!("empty or duplicate column name {name:?}")));
        }
    }

    let mut dates = Vec::new();
    let mut cells: Vec<Vec<Option<f64>>> = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let record = record?;
        let row = k + 1;
        if record.len() != header.len() {
            return Err(Error::Malformed(format!(
                "data row {row} has {} fields, header has {}",
                record.len(),
                header.len()
            )));
        }
        let date = record[0].to_string();
        let mut values = Vec::with_capacity(names.len());
        for (j, cell) in record.iter().skip(1).enumerate() {
            if is_missing(cell) {
                values.push(None);
                continue;
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::Malformed(format!("data row {row}, column {}: {cell:?} is not a number", names[j])))?;
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositivePrice {
                    row,
                    date,
                    ticker: names[j].clone(),
                    value: v,
                });
            }
            values.push(Some(v));
        }
        dates.push(date);
        cells.push(values);
    }
    check_dates(&dates)?;
    for (j, name) in names.iter().enumerate() {
        if !cells.is_empty() && cells.iter().all(|r| r[j].is_none()) {
            return Err(Error::Malformed(format!("column {name} has no values")));
        }
    }

    let before = cells.len();
    let missing: usize = cells.iter().map(|r| r.iter().filter(|c| c.is_none()).count()).sum();
    let (dates, rows) = apply_policy(dates, cells, policy);
    if missing > 0 {
        log::warn!(
            "{missing} missing cells; {policy:?} kept {} of {before} rows",
            rows.len()
        );
    }
    if rows.len() < min_rows {
        return Err(Error::Malformed(format!(
            "{} rows after cleaning, at least {min_rows} required",
            rows.len()
        )));
    }

    let index_col = names.iter().position(|n| n == INDEX_COLUMN);
    let stock_cols: Vec<usize> = (0..names.len()).filter(|&j| Some(j) != index_col).collect();
    if stock_cols.is_empty() {
        return Err(Error::Malformed("no ticker columns".into()));
    }
    let prices = DMatrix::from_fn(rows.len(), stock_cols.len(), |i, j| rows[i][stock_cols[j]]);
    let index = index_col.map(|c| rows.iter().map(|r| r[c]).collect());
    let tickers = stock_cols.iter().map(|&j| names[j].clone()).collect();
    PricePanel::new(dates, tickers, prices, index)
}

fn apply_policy(
    dates: Vec<String>,
    cells: Vec<Vec<Option<f64>>>,
    policy: MissingPolicy,
) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut out_dates = Vec::with_capacity(dates.len());
    let mut out_rows = Vec::with_capacity(cells.len());
    let mut last: Vec<Option<f64>> = vec![None; cells.first().map_or(0, Vec::len)];
    for (date, row) in dates.into_iter().zip(cells) {
        let filled: Option<Vec<f64>> = match policy {
            MissingPolicy::DropRow => row.iter().copied().collect(),
            MissingPolicy::ForwardFill => {
                for (slot, cell) in last.iter_mut().zip(&row) {
                    if cell.is_some() {
                        *slot = *cell;
                    }
                }
                last.iter().copied().collect()
            }
        };
        if let Some(values) = filled {
            out_dates.push(date);
            out_rows.push(values);
        }
    }
    (out_dates, out_rows)
}
