use serde::{Deserialize, Serialize};

use super::{
    check_blocks, check_n, check_sigma_field, check_trials, echo, impl_experiment_config, run_trials, Frequency,
    COVERAGE_HEADER,
};
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::estimators::{mom_with_partition, BlockPartition};
use crate::format::to_csv_string;
use crate::intervals::mom_delta;

/// Joint failure of `K_hyp` per-hypothesis MoM statements.
///
/// Hypothesis `f` has loss `x[f]` where the coordinates of a datum are iid
/// draws from `distribution`, so the statements are independent. Statement
/// `f` holds when `|R(f) − MoM_K(losses of f)| <= c · σ/√N · √(log(1/δ))`,
/// `δ = exp(−K/8)`, with `c = width_constant`. Every grid entry reuses the
/// same hypotheses, so joint failure is nondecreasing in `K_hyp` per seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnionConfig {
    pub master_seed: u64,
    pub trials: usize,
    pub distribution: DistributionSpec,
    pub n: usize,
    /// MoM block count.
    pub k: usize,
    #[serde(default = "default_grid")]
    pub k_hyp_grid: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default = "default_width_constant")]
    pub width_constant: f64,
}

fn default_grid() -> Vec<usize> {
    (0..=8).map(|i| 1usize << i).collect()
}

fn default_width_constant() -> f64 {
    4.0 * std::f64::consts::SQRT_2
}

impl_experiment_config!(UnionConfig);

impl UnionConfig {
    pub fn validate(&self) -> Result<()> {
        check_trials(self.trials)?;
        check_n(self.n)?;
        check_sigma_field(self.sigma)?;
        check_blocks(self.k, self.n, "k")?;
        if !(self.width_constant.is_finite() && self.width_constant > 0.0) {
            return Err(Error::config("width_constant", "must be finite and > 0"));
        }
        if self.k_hyp_grid.is_empty() {
            return Err(Error::config("k_hyp_grid", "needs at least one entry"));
        }
        for (i, w) in self.k_hyp_grid.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::config(format!("k_hyp_grid[{}]", i + 1), "grid must be strictly increasing"));
            }
        }
        if self.k_hyp_grid[0] == 0 {
            return Err(Error::config("k_hyp_grid[0]", "must be >= 1"));
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        self.sigma.unwrap_or_else(|| self.distribution.variance().sqrt())
    }

    pub fn delta(&self) -> f64 {
        mom_delta(self.k)
    }

    pub fn half_width(&self) -> f64 {
        self.width_constant * self.sigma() / (self.n as f64).sqrt() * (self.k as f64 / 8.0).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnionRow {
    pub k_hyp: usize,
    pub joint_failures: usize,
    pub joint_failure_rate: f64,
    pub stderr: f64,
    /// Union-bound guarantee `max(0, 1 − K_hyp·δ)` on joint coverage.
    pub nominal: f64,
    /// `K_hyp · δ >= 1`: the union bound certifies nothing.
    pub vacuous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnionReport {
    pub master_seed: u64,
    pub trials: usize,
    pub delta: f64,
    pub half_width: f64,
    pub sigma: f64,
    pub rows: Vec<UnionRow>,
    /// Smallest grid entry with `K_hyp · δ >= 1`, if any.
    pub vacuous_from: Option<usize>,
    pub config: serde_json::Value,
}

impl UnionReport {
    /// `K_or_delta = K_hyp`, `coverage` = joint coverage.
    pub fn to_csv(&self) -> String {
        let rows: Vec<Vec<f64>> = self
            .rows
            .iter()
            .map(|r| vec![r.k_hyp as f64, 1.0 - r.joint_failure_rate, r.stderr, r.nominal])
            .collect();
        to_csv_string(&COVERAGE_HEADER, &rows)
    }

    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].joint_failures >= w[0].joint_failures)
    }
}

pub fn union_blowup_experiment(config: &UnionConfig, workers: usize) -> Result<UnionReport> {
    config.validate()?;
    let k_max = *config.k_hyp_grid.last().expect("validated");
    let mu = config.distribution.mean();
    let half_width = config.half_width();
    let partition = BlockPartition::new(config.n, config.k)?;
    // Per trial: index of the first failing statement, or k_max.
    let first_fail = run_trials(config.master_seed, config.trials, workers, |stream| {
        let xs = config.distribution.sample(config.n * k_max, stream)?;
        let mut column = vec![0.0; config.n];
        for f in 0..k_max {
            for (i, c) in column.iter_mut().enumerate() {
                *c = xs[i * k_max + f];
            }
            if (mu - mom_with_partition(&column, &partition)?).abs() > half_width {
                return Ok(f);
            }
        }
        Ok(k_max)
    })?;
    let delta = config.delta();
    let rows: Vec<UnionRow> = config
        .k_hyp_grid
        .iter()
        .map(|&k_hyp| {
            let freq = Frequency::count(first_fail.iter().map(|&f| f < k_hyp), config.trials);
            let union = k_hyp as f64 * delta;
            UnionRow {
                k_hyp,
                joint_failures: freq.successes,
                joint_failure_rate: freq.rate,
                stderr: freq.stderr,
                nominal: (1.0 - union).max(0.0),
                vacuous: union >= 1.0,
            }
        })
        .collect();
    Ok(UnionReport {
        master_seed: config.master_seed,
        trials: config.trials,
        delta,
        half_width,
        sigma: config.sigma(),
        vacuous_from: rows.iter().find(|r| r.vacuous).map(|r| r.k_hyp),
        rows,
        config: echo(config),
    })
}
