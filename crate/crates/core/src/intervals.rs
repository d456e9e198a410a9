//! Confidence intervals for a mean with known variance factor `σ`.
//!
//! | Model | Center | Half-width |
//! |-------|--------|------------|
//! | subgaussian | empirical mean | `σ/√N · √(2 log(1/δ))` |
//! | chebyshev | empirical mean | `σ/√N · √(1/δ)` |
//! | mom | `MoM_K` | `σ/√N · 4√(2 log(1/δ))` with `δ = exp(-K/8)` |
//!
//! The MoM interval exists only at the single level fixed by `K`; its
//! half-width reduces to `2σ√K/√N`.

use serde::{Deserialize, Serialize};

use crate::error::{check_delta, check_positive, Error, Result};
use crate::estimators::median_of_means;
use crate::format::to_csv_string;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalModel {
    Subgaussian,
    Chebyshev,
    Mom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub center: f64,
    pub half_width: f64,
    /// Nominal level `1 - δ`.
    pub level: f64,
    pub model: IntervalModel,
}

impl ConfidenceInterval {
    pub fn lower(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.center + self.half_width
    }

    /// Closed-interval membership.
    pub fn contains(&self, x: f64) -> bool {
        (x - self.center).abs() <= self.half_width
    }

    pub fn delta(&self) -> f64 {
        1.0 - self.level
    }
}

fn check_common(sigma: f64, n: usize) -> Result<()> {
    check_positive("sigma", sigma)?;
    if n == 0 {
        return Err(Error::domain("sample size N must be >= 1"));
    }
    Ok(())
}

/// `σ/√N · √(2 log(1/δ))`.
pub fn subgaussian_half_width(sigma: f64, n: usize, delta: f64) -> Result<f64> {
    check_common(sigma, n)?;
    check_delta(delta)?;
    Ok(sigma / (n as f64).sqrt() * (2.0 * (1.0 / delta).ln()).sqrt())
}

/// `σ/√N · √(1/δ)`.
pub fn chebyshev_half_width(sigma: f64, n: usize, delta: f64) -> Result<f64> {
    check_common(sigma, n)?;
    check_delta(delta)?;
    Ok(sigma / (n as f64).sqrt() * (1.0 / delta).sqrt())
}

/// MoM half-width and its level parameter `δ = exp(-K/8)`, as
/// `σ/√N · 4√(2 log(1/δ))`.
pub fn mom_half_width(sigma: f64, n: usize, k: usize) -> Result<(f64, f64)> {
    check_common(sigma, n)?;
    if k == 0 || k > n {
        return Err(Error::BlockCount { k, n });
    }
    let delta = mom_delta(k);
    let log_inv = k as f64 / 8.0;
    Ok((sigma / (n as f64).sqrt() * 4.0 * (2.0 * log_inv).sqrt(), delta))
}

/// The only level `δ` at which `MoM_K` carries an interval.
pub fn mom_delta(k: usize) -> f64 {
    (-(k as f64) / 8.0).exp()
}

pub fn subgaussian_interval(center: f64, sigma: f64, n: usize, delta: f64) -> Result<ConfidenceInterval> {
    Ok(ConfidenceInterval {
        center,
        half_width: subgaussian_half_width(sigma, n, delta)?,
        level: 1.0 - delta,
        model: IntervalModel::Subgaussian,
    })
}

pub fn chebyshev_interval(center: f64, sigma: f64, n: usize, delta: f64) -> Result<ConfidenceInterval> {
    Ok(ConfidenceInterval {
        center,
        half_width: chebyshev_half_width(sigma, n, delta)?,
        level: 1.0 - delta,
        model: IntervalModel::Chebyshev,
    })
}

/// MoM interval around `MoM_K(sample)`; returns the interval and the `δ`
/// it certifies. `δ` is an output: it cannot be chosen independently of `K`.
pub fn mom_interval(sample: &[f64], sigma: f64, k: usize) -> Result<(ConfidenceInterval, f64)> {
    let center = median_of_means(sample, k)?;
    let (half_width, delta) = mom_half_width(sigma, sample.len(), k)?;
    Ok((
        ConfidenceInterval {
            center,
            half_width,
            level: 1.0 - delta,
            model: IntervalModel::Mom,
        },
        delta,
    ))
}

/// Cheap-to-expensive half-width ratio `√(1/δ) / √(2 log(1/δ))` at fixed `σ`, `N`.
pub fn width_ratio(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let log_inv = (1.0 / delta).ln();
    if log_inv <= 0.0 {
        return Err(Error::domain(format!("log(1/delta) must be > 0, got {log_inv}")));
    }
    Ok((1.0 / delta).sqrt() / (2.0 * log_inv).sqrt())
}

/// One row of the interval-width comparison, widths in units of `σ/√N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthRow {
    pub delta: f64,
    pub width_subgaussian: f64,
    pub width_chebyshev: f64,
    pub ratio: f64,
}

pub const FIG1_HEADER: [&str; 4] = ["delta", "width_subgaussian", "width_chebyshev", "ratio"];

/// Log-spaced grid of `points` values from `delta_min` to `delta_max`
/// inclusive. A single point requires `delta_min == delta_max`.
pub fn log_grid(delta_min: f64, delta_max: f64, points: usize) -> Result<Vec<f64>> {
    check_delta(delta_min)?;
    check_delta(delta_max)?;
    if points == 0 {
        return Err(Error::domain("grid needs at least one point"));
    }
    if delta_min > delta_max {
        return Err(Error::domain(format!(
            "delta_min ({delta_min}) must not exceed delta_max ({delta_max})"
        )));
    }
    if points == 1 {
        if delta_min != delta_max {
            return Err(Error::domain("a one-point grid needs delta_min == delta_max"));
        }
        return Ok(vec![delta_min]);
    }
    if delta_min == delta_max {
        return Err(Error::domain("delta_min == delta_max only admits a one-point grid"));
    }
    let (lo, hi) = (delta_min.ln(), delta_max.ln());
    let step = (hi - lo) / (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points).map(|i| (lo + step * i as f64).exp()).collect();
    // Pin the endpoints exactly.
    grid[0] = delta_min;
    grid[points - 1] = delta_max;
    Ok(grid)
}

/// Width comparison rows on a log-spaced `δ` grid.
pub fn width_table(delta_min: f64, delta_max: f64, points: usize) -> Result<Vec<WidthRow>> {
    log_grid(delta_min, delta_max, points)?
        .into_iter()
        .map(|delta| {
            Ok(WidthRow {
                delta,
                width_subgaussian: subgaussian_half_width(1.0, 1, delta)?,
                width_chebyshev: chebyshev_half_width(1.0, 1, delta)?,
                ratio: width_ratio(delta)?,
            })
        })
        .collect()
}

/// CSV with header `delta,width_subgaussian,width_chebyshev,ratio`.
pub fn width_table_csv(rows: &[WidthRow]) -> String {
    let body: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| vec![r.delta, r.width_subgaussian, r.width_chebyshev, r.ratio])
        .collect();
    to_csv_string(&FIG1_HEADER, &body)
}
