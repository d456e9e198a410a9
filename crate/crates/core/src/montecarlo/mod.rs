//! Trial-replicated experiments.
//!
//! Trial `t` of a run draws from stream `(master_seed, t)`. Per-trial
//! outcomes are collected in trial order and reduced sequentially, so every
//! report is bit-identical for any worker count.
//!
//! Each experiment has its own JSON config type. All of them carry
//! `master_seed` and `trials`, reject unknown fields, and are echoed in full
//! inside the report they produce.

mod bounds;
mod coverage;
mod gibbs;
mod union;

pub use bounds::{bound_violation_experiment, BoundArm, BoundCheckConfig, BoundCheckReport, PosteriorSpec};
pub use coverage::{
    coverage_experiment, mom_demo_experiment, subgaussian_width_failure_probe, CoverageConfig, CoverageReport,
    Estimator, MomDemoConfig, MomDemoReport, MomDemoRow,
};
pub use gibbs::{gibbs_comparison_experiment, Contamination, GibbsConfig, GibbsReport, GibbsRow};
pub use union::{union_blowup_experiment, UnionConfig, UnionReport, UnionRow};

use rayon::prelude::*;
use serde::Serialize;

use crate::divergences::DiscreteMeasure;
use crate::error::{Error, Result};
use crate::rng::{make_stream, RandomStream};

/// Header of every coverage-style CSV.
pub const COVERAGE_HEADER: [&str; 4] = ["K_or_delta", "coverage", "stderr", "nominal"];

/// Header of the Gibbs comparison CSV.
pub const GIBBS_HEADER: [&str; 4] = ["gamma", "risk_emp", "risk_mom", "win_fraction"];

/// Fields shared by every experiment config; lets callers override the seed
/// and trial count after parsing.
pub trait ExperimentConfig: Serialize {
    fn master_seed_mut(&mut self) -> &mut u64;
    fn trials_mut(&mut self) -> &mut usize;
    fn validate(&self) -> Result<()>;
}

macro_rules! impl_experiment_config {
    ($ty:ty) => {
        impl $crate::montecarlo::ExperimentConfig for $ty {
            fn master_seed_mut(&mut self) -> &mut u64 {
                &mut self.master_seed
            }

            fn trials_mut(&mut self) -> &mut usize {
                &mut self.trials
            }

            fn validate(&self) -> $crate::error::Result<()> {
                <$ty>::validate(self)
            }
        }
    };
}
pub(crate) use impl_experiment_config;

/// Runs `trial` once per index in `0..trials` on a pool of `workers`
/// threads and returns the outcomes in trial order.
pub fn run_trials<T, F>(master_seed: u64, trials: usize, workers: usize, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RandomStream) -> Result<T> + Sync,
{
    if workers == 0 {
        return Err(Error::config("workers", "must be >= 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))?;
    pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| trial(&mut make_stream(master_seed, t as u64)))
            .collect()
    })
}

/// A Bernoulli frequency with its plug-in standard error `√(p(1−p)/T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Frequency {
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub stderr: f64,
}

impl Frequency {
    pub fn new(successes: usize, trials: usize) -> Self {
        debug_assert!(successes <= trials && trials > 0);
        let rate = successes as f64 / trials as f64;
        Self {
            trials,
            successes,
            rate,
            stderr: (rate * (1.0 - rate) / trials as f64).sqrt(),
        }
    }

    pub fn count<I: IntoIterator<Item = bool>>(outcomes: I, trials: usize) -> Self {
        Self::new(outcomes.into_iter().filter(|&b| b).count(), trials)
    }
}

/// Sequential mean of a slice; the order is the trial order.
pub(crate) fn ordered_mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut n = 0usize;
    let mut sum = 0.0;
    for v in values {
        sum += v;
        n += 1;
    }
    sum / n as f64
}

pub(crate) fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        Err(Error::config("trials", "must be >= 1"))
    } else {
        Ok(())
    }
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::config("n", "must be >= 1"))
    } else {
        Ok(())
    }
}

pub(crate) fn check_delta_field(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::config("delta", format!("must lie in (0, 1), got {delta}")))
    }
}

pub(crate) fn check_sigma_field(sigma: Option<f64>) -> Result<()> {
    match sigma {
        Some(s) if !(s.is_finite() && s > 0.0) => Err(Error::config("sigma", format!("must be finite and > 0, got {s}"))),
        _ => Ok(()),
    }
}

pub(crate) fn check_blocks(k: usize, n: usize, field: &str) -> Result<()> {
    if k == 0 || k > n {
        Err(Error::config(field, format!("block count must satisfy 1 <= K <= N = {n}, got {k}")))
    } else {
        Ok(())
    }
}

/// Uniform prior, or the normalized explicit weights.
pub(crate) fn resolve_prior(weights: Option<&[f64]>, m: usize) -> Result<DiscreteMeasure> {
    match weights {
        None => DiscreteMeasure::uniform(m),
        Some(w) => {
            if w.len() != m {
                return Err(Error::config(
                    "prior_weights",
                    format!("has {} entries for {m} hypotheses", w.len()),
                ));
            }
            DiscreteMeasure::from_unnormalized(w.to_vec()).map_err(|e| Error::config("prior_weights", e.to_string()))
        }
    }
}

pub(crate) fn echo<T: Serialize>(config: &T) -> serde_json::Value {
    serde_json::to_value(config).expect("configs serialize infallibly")
}
