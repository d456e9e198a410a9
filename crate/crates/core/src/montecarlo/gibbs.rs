use serde::{Deserialize, Serialize};

use super::{
    check_blocks, check_n, check_trials, echo, impl_experiment_config, ordered_mean, resolve_prior, run_trials,
    GIBBS_HEADER,
};
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::format::to_csv_string;
use crate::pacbayes::{aggregated, empirical_risks, gibbs_posterior, robust_risk_estimates, Dataset, EnsembleSpec};

/// Replace the first `round(fraction · N)` data points with `value`. A
/// contiguous prefix spoils as few MoM blocks as possible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Contamination {
    pub fraction: f64,
    pub value: f64,
}

impl Contamination {
    pub fn count(&self, n: usize) -> usize {
        (self.fraction * n as f64).round() as usize
    }
}

/// Gibbs posteriors built from empirical-mean and MoM risk estimates on the
/// same data, scored by their aggregated true risk under the clean law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GibbsConfig {
    pub master_seed: u64,
    pub trials: usize,
    pub distribution: DistributionSpec,
    pub n: usize,
    /// MoM block count.
    pub k: usize,
    pub ensemble: EnsembleSpec,
    pub gammas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contamination: Option<Contamination>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior_weights: Option<Vec<f64>>,
}

impl_experiment_config!(GibbsConfig);

impl GibbsConfig {
    pub fn validate(&self) -> Result<()> {
        check_trials(self.trials)?;
        check_n(self.n)?;
        check_blocks(self.k, self.n, "k")?;
        self.ensemble.validate()?;
        resolve_prior(self.prior_weights.as_deref(), self.ensemble.len())?;
        if self.gammas.is_empty() {
            return Err(Error::config("gammas", "needs at least one gamma"));
        }
        for (i, g) in self.gammas.iter().enumerate() {
            if !(g.is_finite() && *g >= 0.0) {
                return Err(Error::config(format!("gammas[{i}]"), format!("must be finite and >= 0, got {g}")));
            }
        }
        if let Some(c) = &self.contamination {
            if !(c.fraction >= 0.0 && c.fraction < 1.0) {
                return Err(Error::config("contamination.fraction", "must lie in [0, 1)"));
            }
            if !c.value.is_finite() {
                return Err(Error::config("contamination.value", "must be finite"));
            }
        }
        Ok(())
    }

    /// The grid's middle entry, `gammas[len / 2]`.
    pub fn mid_gamma(&self) -> f64 {
        self.gammas[self.gammas.len() / 2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GibbsRow {
    pub gamma: f64,
    /// Trial mean of `ρ_emp[R]`.
    pub risk_emp: f64,
    /// Trial mean of `ρ_mom[R]`.
    pub risk_mom: f64,
    /// Fraction of trials with `ρ_mom[R] < ρ_emp[R]`.
    pub win_fraction: f64,
    /// Fraction of trials with `ρ_mom[R] == ρ_emp[R]`.
    pub tie_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsReport {
    pub master_seed: u64,
    pub trials: usize,
    pub contaminated_points: usize,
    pub true_risks: Vec<f64>,
    pub mid_gamma: f64,
    pub mid_win_fraction: f64,
    pub rows: Vec<GibbsRow>,
    pub config: serde_json::Value,
}

impl GibbsReport {
    pub fn to_csv(&self) -> String {
        let rows: Vec<Vec<f64>> = self
            .rows
            .iter()
            .map(|r| vec![r.gamma, r.risk_emp, r.risk_mom, r.win_fraction])
            .collect();
        to_csv_string(&GIBBS_HEADER, &rows)
    }
}

pub fn gibbs_comparison_experiment(config: &GibbsConfig, workers: usize) -> Result<GibbsReport> {
    config.validate()?;
    let law = &config.distribution;
    // σ plays no role in the comparison.
    let ensemble = config.ensemble.build(law, 1.0)?;
    let pi = resolve_prior(config.prior_weights.as_deref(), ensemble.len())?;
    let dim = config.ensemble.datum_dim();
    let contaminated = config.contamination.map_or(0, |c| c.count(config.n));
    // Per trial, per γ: (ρ_emp[R], ρ_mom[R]).
    let outcomes = run_trials(config.master_seed, config.trials, workers, |stream| {
        let mut data = Dataset::new(dim, law.sample(config.n * dim, stream)?)?;
        if let Some(c) = &config.contamination {
            for i in 0..contaminated {
                data.fill_row(i, c.value);
            }
        }
        let emp = empirical_risks(&ensemble, &data)?;
        let mom = robust_risk_estimates(&ensemble, &data, config.k)?;
        config
            .gammas
            .iter()
            .map(|&g| {
                let r_emp = aggregated(&gibbs_posterior(&pi, &emp, g)?, ensemble.true_risks())?;
                let r_mom = aggregated(&gibbs_posterior(&pi, &mom, g)?, ensemble.true_risks())?;
                Ok((r_emp, r_mom))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let t = config.trials as f64;
    let rows: Vec<GibbsRow> = config
        .gammas
        .iter()
        .enumerate()
        .map(|(j, &gamma)| {
            let col = || outcomes.iter().map(move |o| o[j]);
            GibbsRow {
                gamma,
                risk_emp: ordered_mean(col().map(|(e, _)| e)),
                risk_mom: ordered_mean(col().map(|(_, m)| m)),
                win_fraction: col().filter(|(e, m)| m < e).count() as f64 / t,
                tie_fraction: col().filter(|(e, m)| m == e).count() as f64 / t,
            }
        })
        .collect();
    let mid = config.gammas.len() / 2;
    Ok(GibbsReport {
        master_seed: config.master_seed,
        trials: config.trials,
        contaminated_points: contaminated,
        true_risks: ensemble.true_risks().to_vec(),
        mid_gamma: config.mid_gamma(),
        mid_win_fraction: rows[mid].win_fraction,
        rows,
        config: echo(config),
    })
}
