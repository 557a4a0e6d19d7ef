//! One-factor synthetic price panels with a crash window.
//!
//! Log-returns follow `r_it = s_t (b_t f_t + sqrt(1 - b_t^2) e_it) + m_t` with
//! i.i.d. standard normal `f_t` and `e_it`, so the pairwise correlation is
//! `b_t^2`. Inside the crash window `b_t^2` is `crash_corr`, the scale `s_t`
//! is multiplied and the common drift `m_t` turns negative; elsewhere
//! `b_t^2 = normal_corr`. The INDEX column is the equal-weight average.

use std::ops::Range;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::pipeline::PricePanel;

#[derive(Debug, Clone, PartialEq)]
pub struct FactorPanelConfig {
    pub tickers: usize,
    /// Price rows; the return panel has one row fewer.
    pub rows: usize,
    pub normal_corr: f64,
    pub crash_corr: f64,
    /// First return row of the crash window.
    pub crash_start: usize,
    pub crash_len: usize,
    /// Daily return standard deviation outside the crash.
    pub volatility: f64,
    pub crash_vol_multiplier: f64,
    /// Common daily log-return drift inside the crash.
    pub crash_drift: f64,
    pub seed: u64,
    pub start_date: NaiveDate,
}

impl Default for FactorPanelConfig {
    fn default() -> Self {
        Self {
            tickers: 50,
            rows: 600,
            normal_corr: 0.2,
            crash_corr: 0.8,
            crash_start: 300,
            crash_len: 60,
            volatility: 0.01,
            crash_vol_multiplier: 2.5,
            crash_drift: -0.004,
            seed: 2008,
            start_date: NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date"),
        }
    }
}

impl FactorPanelConfig {
    /// Return rows inside the crash window.
    pub fn crash_rows(&self) -> Range<usize> {
        self.crash_start..self.crash_start + self.crash_len
    }
}

/// `count` consecutive weekdays from `start` (moved forward off a weekend).
pub fn business_days(start: NaiveDate, count: usize) -> Vec<String> {
    let mut d = start;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d.format("%Y-%m-%d").to_string());
        }
        d = d + Days::new(1);
    }
    out
}

pub fn factor_panel(cfg: &FactorPanelConfig) -> Result<PricePanel> {
    let n = cfg.tickers;
    if n < 2 || cfg.rows < 2 {
        return Err(Error::InvalidArgument("need at least 2 tickers and 2 rows".into()));
    }
    for c in [cfg.normal_corr, cfg.crash_corr] {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::InvalidArgument(format!("factor correlation {c} outside [0, 1]")));
        }
    }
    if !(cfg.volatility > 0.0) || !(cfg.crash_vol_multiplier > 0.0) {
        return Err(Error::InvalidArgument("volatilities must be positive".into()));
    }
    let t = cfg.rows - 1;
    let crash = cfg.crash_rows();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut log_level = vec![(100.0f64).ln(); n];
    let mut prices = DMatrix::zeros(cfg.rows, n);
    let mut index = Vec::with_capacity(cfg.rows);
    let mut index_level = 0.0f64;
    for j in 0..n {
        prices[(0, j)] = 100.0;
    }
    index.push(1000.0);
    for s in 0..t {
        let in_crash = crash.contains(&s);
        let (rho, scale, drift) = if in_crash {
            (cfg.crash_corr, cfg.volatility * cfg.crash_vol_multiplier, cfg.crash_drift)
        } else {
            (cfg.normal_corr, cfg.volatility, 0.0)
        };
        let (b, idio) = (rho.sqrt(), (1.0 - rho).sqrt());
        let f: f64 = rng.sample(StandardNormal);
        let mut mean = 0.0;
        for (j, level) in log_level.iter_mut().enumerate() {
            let e: f64 = rng.sample(StandardNormal);
            let r = scale * (b * f + idio * e) + drift;
            *level += r;
            mean += r / n as f64;
            prices[(s + 1, j)] = level.exp();
        }
        index_level += mean;
        index.push(1000.0 * index_level.exp());
    }
    PricePanel::new(
        business_days(cfg.start_date, cfg.rows),
        (0..n).map(|j| format!("S{j:03}")).collect(),
        prices,
        Some(index),
    )
}
