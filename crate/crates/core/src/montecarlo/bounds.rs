use serde::{Deserialize, Serialize};

use super::{
    check_delta_field, check_n, check_sigma_field, check_trials, echo, impl_experiment_config, ordered_mean,
    resolve_prior, run_trials, Frequency, COVERAGE_HEADER,
};
use crate::distributions::DistributionSpec;
use crate::divergences::{DiscreteMeasure, Extended};
use crate::error::{Error, Result};
use crate::format::to_csv_string;
use crate::pacbayes::{
    aggregated, bound, dirac_collapse_argmin, empirical_risks, gibbs_posterior, BoundModel, Dataset, EnsembleSpec,
};

/// How a posterior is chosen. `dirac_argmin` and `gibbs` depend on the
/// trial's empirical risks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PosteriorSpec {
    Prior,
    Dirac { index: usize },
    Weights { weights: Vec<f64> },
    DiracArgmin,
    Gibbs { gamma: f64 },
}

impl PosteriorSpec {
    pub fn label(&self) -> String {
        match self {
            PosteriorSpec::Prior => "prior".into(),
            PosteriorSpec::Dirac { index } => format!("dirac[{index}]"),
            PosteriorSpec::Weights { .. } => "weights".into(),
            PosteriorSpec::DiracArgmin => "dirac_argmin".into(),
            PosteriorSpec::Gibbs { gamma } => format!("gibbs[{gamma}]"),
        }
    }

    fn validate(&self, m: usize, field: &str) -> Result<()> {
        match self {
            PosteriorSpec::Dirac { index } if *index >= m => {
                Err(Error::config(field, format!("index {index} out of range for {m} hypotheses")))
            }
            PosteriorSpec::Weights { weights } => DiscreteMeasure::from_unnormalized(weights.clone())
                .and_then(|w| {
                    if w.len() == m {
                        Ok(())
                    } else {
                        Err(Error::LengthMismatch {
                            expected: m,
                            actual: w.len(),
                        })
                    }
                })
                .map_err(|e| Error::config(field, e.to_string())),
            PosteriorSpec::Gibbs { gamma } if !(gamma.is_finite() && *gamma >= 0.0) => {
                Err(Error::config(field, format!("gamma must be finite and >= 0, got {gamma}")))
            }
            _ => Ok(()),
        }
    }

    pub fn resolve(&self, pi: &DiscreteMeasure, emp_risks: &[f64]) -> Result<DiscreteMeasure> {
        match self {
            PosteriorSpec::Prior => Ok(pi.clone()),
            PosteriorSpec::Dirac { index } => DiscreteMeasure::dirac(pi.len(), *index),
            PosteriorSpec::Weights { weights } => DiscreteMeasure::from_unnormalized(weights.clone()),
            PosteriorSpec::DiracArgmin => dirac_collapse_argmin(emp_risks),
            PosteriorSpec::Gibbs { gamma } => gibbs_posterior(pi, emp_risks, *gamma),
        }
    }
}

/// Violation frequency of a PAC-Bayes bound, one arm per posterior, every
/// arm sharing each trial's dataset.
///
/// `sigma` defaults to the ensemble's subgaussian factor for the expensive
/// bound and to its loss standard deviation for the cheap bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundCheckConfig {
    pub master_seed: u64,
    pub trials: usize,
    pub distribution: DistributionSpec,
    pub n: usize,
    pub ensemble: EnsembleSpec,
    pub bound: BoundModel,
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior_weights: Option<Vec<f64>>,
    pub posteriors: Vec<PosteriorSpec>,
}

impl_experiment_config!(BoundCheckConfig);

impl BoundCheckConfig {
    pub fn validate(&self) -> Result<()> {
        check_trials(self.trials)?;
        check_n(self.n)?;
        check_delta_field(self.delta)?;
        check_sigma_field(self.sigma)?;
        self.ensemble.validate()?;
        let m = self.ensemble.len();
        resolve_prior(self.prior_weights.as_deref(), m)?;
        if self.posteriors.is_empty() {
            return Err(Error::config("posteriors", "needs at least one posterior"));
        }
        for (i, p) in self.posteriors.iter().enumerate() {
            p.validate(m, &format!("posteriors[{i}]"))?;
        }
        self.sigma().map(|_| ())
    }

    pub fn sigma(&self) -> Result<f64> {
        if let Some(s) = self.sigma {
            return Ok(s);
        }
        match self.bound {
            BoundModel::Expensive => self.ensemble.loss_subgaussian_bound(&self.distribution).ok_or_else(|| {
                Error::config("sigma", "losses are not known to be subgaussian; give sigma explicitly")
            }),
            BoundModel::Cheap => {
                let s = self.ensemble.loss_sd_bound(&self.distribution);
                if s.is_finite() && s > 0.0 {
                    Ok(s)
                } else {
                    Err(Error::config("sigma", "loss variance is not finite; give sigma explicitly"))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundArm {
    pub posterior: PosteriorSpec,
    pub label: String,
    pub trials: usize,
    pub violations: usize,
    pub violation_rate: f64,
    pub stderr: f64,
    /// `1 − violation_rate`.
    pub coverage: f64,
    /// `1 − δ`.
    pub nominal: f64,
    pub vacuous_trials: usize,
    /// Mean over non-vacuous trials; `null` when every trial was vacuous.
    pub mean_bound: Option<f64>,
    pub mean_true_risk: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheckReport {
    pub master_seed: u64,
    pub model: BoundModel,
    pub delta: f64,
    pub sigma: f64,
    pub true_risks: Vec<f64>,
    pub arms: Vec<BoundArm>,
    pub config: serde_json::Value,
}

impl BoundCheckReport {
    /// One coverage row per arm, keyed by `δ`.
    pub fn to_csv(&self) -> String {
        let rows: Vec<Vec<f64>> = self
            .arms
            .iter()
            .map(|a| vec![self.delta, a.coverage, a.stderr, a.nominal])
            .collect();
        to_csv_string(&COVERAGE_HEADER, &rows)
    }
}

struct ArmOutcome {
    violated: bool,
    bound: Extended,
    true_risk: f64,
}

/// Per trial: draw a dataset, compute empirical risks, evaluate the bound for
/// each posterior and record `ρ[R] > bound`.
pub fn bound_violation_experiment(config: &BoundCheckConfig, workers: usize) -> Result<BoundCheckReport> {
    config.validate()?;
    let sigma = config.sigma()?;
    let law = &config.distribution;
    let ensemble = config.ensemble.build(law, sigma)?;
    let pi = resolve_prior(config.prior_weights.as_deref(), ensemble.len())?;
    let dim = config.ensemble.datum_dim();
    let outcomes = run_trials(config.master_seed, config.trials, workers, |stream| {
        let data = Dataset::new(dim, law.sample(config.n * dim, stream)?)?;
        let emp = empirical_risks(&ensemble, &data)?;
        config
            .posteriors
            .iter()
            .map(|spec| {
                let rho = spec.resolve(&pi, &emp)?;
                let report = bound(config.bound, &rho, &pi, &emp, sigma, config.n, config.delta)?;
                let true_risk = aggregated(&rho, ensemble.true_risks())?;
                Ok(ArmOutcome {
                    violated: report.is_violated_by(true_risk),
                    bound: report.bound,
                    true_risk,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let arms = config
        .posteriors
        .iter()
        .enumerate()
        .map(|(j, spec)| {
            let arm = || outcomes.iter().map(move |o| &o[j]);
            let freq = Frequency::count(arm().map(|o| o.violated), config.trials);
            let finite: Vec<f64> = arm().filter_map(|o| o.bound.finite()).collect();
            BoundArm {
                posterior: spec.clone(),
                label: spec.label(),
                trials: config.trials,
                violations: freq.successes,
                violation_rate: freq.rate,
                stderr: freq.stderr,
                coverage: 1.0 - freq.rate,
                nominal: 1.0 - config.delta,
                vacuous_trials: config.trials - finite.len(),
                mean_bound: (!finite.is_empty()).then(|| ordered_mean(finite.iter().copied())),
                mean_true_risk: ordered_mean(arm().map(|o| o.true_risk)),
            }
        })
        .collect();
    Ok(BoundCheckReport {
        master_seed: config.master_seed,
        model: config.bound,
        delta: config.delta,
        sigma,
        true_risks: ensemble.true_risks().to_vec(),
        arms,
        config: echo(config),
    })
}
