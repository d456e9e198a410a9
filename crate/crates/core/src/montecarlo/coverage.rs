use serde::{Deserialize, Serialize};

use super::{
    check_blocks, check_delta_field, check_n, check_sigma_field, check_trials, echo, impl_experiment_config, run_trials,
    Frequency, COVERAGE_HEADER,
};
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::estimators::{empirical_mean, median_of_means};
use crate::format::to_csv_string;
use crate::intervals::{chebyshev_half_width, mom_half_width, subgaussian_half_width, IntervalModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Mean,
    Mom,
}

/// Coverage of one interval construction around one estimator.
///
/// `delta` is required for the subgaussian and Chebyshev widths; `k` is
/// required for the MoM width and for the MoM estimator. `sigma` defaults to
/// the law's standard deviation. `probe` marks a run as a failure probe: the
/// report then states whether non-coverage exceeded `δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageConfig {
    pub master_seed: u64,
    pub trials: usize,
    pub distribution: DistributionSpec,
    pub n: usize,
    pub interval: IntervalModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<Estimator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub probe: bool,
}

impl_experiment_config!(CoverageConfig);

impl CoverageConfig {
    pub fn validate(&self) -> Result<()> {
        check_trials(self.trials)?;
        check_n(self.n)?;
        check_sigma_field(self.sigma)?;
        match self.interval {
            IntervalModel::Subgaussian | IntervalModel::Chebyshev => {
                let delta = self
                    .delta
                    .ok_or_else(|| Error::config("delta", "required for this interval"))?;
                check_delta_field(delta)?;
            }
            IntervalModel::Mom => {
                if self.delta.is_some() {
                    return Err(Error::config("delta", "the MoM interval fixes delta = exp(-K/8); give k instead"));
                }
            }
        }
        if self.interval == IntervalModel::Mom || self.estimator() == Estimator::Mom {
            let k = self.k.ok_or_else(|| Error::config("k", "required for MoM"))?;
            check_blocks(k, self.n, "k")?;
        }
        if self.probe && self.interval == IntervalModel::Mom {
            return Err(Error::config("probe", "probes apply to the subgaussian or chebyshev width"));
        }
        Ok(())
    }

    pub fn estimator(&self) -> Estimator {
        self.estimator.unwrap_or(match self.interval {
            IntervalModel::Mom => Estimator::Mom,
            _ => Estimator::Mean,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma.unwrap_or_else(|| self.distribution.variance().sqrt())
    }

    /// `(half-width, δ)`.
    fn width(&self) -> Result<(f64, f64)> {
        let sigma = self.sigma();
        match self.interval {
            IntervalModel::Subgaussian => {
                let d = self.delta.expect("validated");
                Ok((subgaussian_half_width(sigma, self.n, d)?, d))
            }
            IntervalModel::Chebyshev => {
                let d = self.delta.expect("validated");
                Ok((chebyshev_half_width(sigma, self.n, d)?, d))
            }
            IntervalModel::Mom => mom_half_width(sigma, self.n, self.k.expect("validated")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub master_seed: u64,
    pub trials: usize,
    pub successes: usize,
    pub coverage: f64,
    /// `1 − δ`.
    pub nominal: f64,
    pub stderr: f64,
    pub delta: f64,
    pub non_coverage: f64,
    pub half_width: f64,
    pub sigma: f64,
    pub true_mean: f64,
    /// Probes only: `non_coverage > δ`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub under_coverage: Option<bool>,
    pub config: serde_json::Value,
}

impl CoverageReport {
    /// One `K_or_delta,coverage,stderr,nominal` row, keyed by `K` for MoM and
    /// by `δ` otherwise.
    pub fn to_csv(&self, key: f64) -> String {
        to_csv_string(&COVERAGE_HEADER, &[vec![key, self.coverage, self.stderr, self.nominal]])
    }
}

/// Fraction of trials whose interval contains the true mean.
pub fn coverage_experiment(config: &CoverageConfig, workers: usize) -> Result<CoverageReport> {
    config.validate()?;
    let (half_width, delta) = config.width()?;
    let mu = config.distribution.mean();
    let estimator = config.estimator();
    let hits = run_trials(config.master_seed, config.trials, workers, |stream| {
        let xs = config.distribution.sample(config.n, stream)?;
        let center = match estimator {
            Estimator::Mean => empirical_mean(&xs)?,
            Estimator::Mom => median_of_means(&xs, config.k.expect("validated"))?,
        };
        Ok((mu - center).abs() <= half_width)
    })?;
    let freq = Frequency::count(hits, config.trials);
    let non_coverage = (freq.trials - freq.successes) as f64 / freq.trials as f64;
    Ok(CoverageReport {
        master_seed: config.master_seed,
        trials: freq.trials,
        successes: freq.successes,
        coverage: freq.rate,
        nominal: 1.0 - delta,
        stderr: freq.stderr,
        delta,
        non_coverage,
        half_width,
        sigma: config.sigma(),
        true_mean: mu,
        under_coverage: config.probe.then_some(non_coverage > delta),
        config: echo(config),
    })
}

/// Coverage run flagged as a probe: the report states whether the width
/// under-covers at its nominal level.
pub fn subgaussian_width_failure_probe(config: &CoverageConfig, workers: usize) -> Result<CoverageReport> {
    let mut config = config.clone();
    config.probe = true;
    coverage_experiment(&config, workers)
}

/// MoM coverage across a grid of block counts, every `K` sharing each
/// trial's sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomDemoConfig {
    pub master_seed: u64,
    pub trials: usize,
    pub distribution: DistributionSpec,
    pub n: usize,
    pub ks: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

impl_experiment_config!(MomDemoConfig);

impl MomDemoConfig {
    pub fn validate(&self) -> Result<()> {
        check_trials(self.trials)?;
        check_n(self.n)?;
        check_sigma_field(self.sigma)?;
        if self.ks.is_empty() {
            return Err(Error::config("ks", "needs at least one block count"));
        }
        for (i, &k) in self.ks.iter().enumerate() {
            check_blocks(k, self.n, &format!("ks[{i}]"))?;
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        self.sigma.unwrap_or_else(|| self.distribution.variance().sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomDemoRow {
    pub k: usize,
    pub delta: f64,
    pub half_width: f64,
    pub successes: usize,
    pub coverage: f64,
    pub stderr: f64,
    pub nominal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomDemoReport {
    pub master_seed: u64,
    pub trials: usize,
    pub sigma: f64,
    pub rows: Vec<MomDemoRow>,
    pub config: serde_json::Value,
}

impl MomDemoReport {
    pub fn to_csv(&self) -> String {
        let rows: Vec<Vec<f64>> = self
            .rows
            .iter()
            .map(|r| vec![r.k as f64, r.coverage, r.stderr, r.nominal])
            .collect();
        to_csv_string(&COVERAGE_HEADER, &rows)
    }
}

pub fn mom_demo_experiment(config: &MomDemoConfig, workers: usize) -> Result<MomDemoReport> {
    config.validate()?;
    let sigma = config.sigma();
    let widths: Vec<(f64, f64)> = config
        .ks
        .iter()
        .map(|&k| mom_half_width(sigma, config.n, k))
        .collect::<Result<_>>()?;
    let mu = config.distribution.mean();
    let hits = run_trials(config.master_seed, config.trials, workers, |stream| {
        let xs = config.distribution.sample(config.n, stream)?;
        config
            .ks
            .iter()
            .zip(&widths)
            .map(|(&k, &(hw, _))| Ok((mu - median_of_means(&xs, k)?).abs() <= hw))
            .collect::<Result<Vec<bool>>>()
    })?;
    let rows = config
        .ks
        .iter()
        .zip(&widths)
        .enumerate()
        .map(|(j, (&k, &(half_width, delta)))| {
            let freq = Frequency::count(hits.iter().map(|h| h[j]), config.trials);
            MomDemoRow {
                k,
                delta,
                half_width,
                successes: freq.successes,
                coverage: freq.rate,
                stderr: freq.stderr,
                nominal: 1.0 - delta,
            }
        })
        .collect();
    Ok(MomDemoReport {
        master_seed: config.master_seed,
        trials: config.trials,
        sigma,
        rows,
        config: echo(config),
    })
}
