use serde::{Deserialize, Serialize};

use super::{HypothesisEnsemble, LossOracle};
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};

/// Synthetic hypothesis sets over iid draws from a [`DistributionSpec`].
///
/// - `independent`: each datum is a vector of `M` iid draws and
///   `ℓ(f, x) = offsets[f] + x[f]`, so losses of distinct hypotheses are
///   independent.
/// - `affine`: scalar datum, `ℓ(f, x) = offsets[f] + slopes[f]·x`.
/// - `squared_location`: scalar datum, `ℓ(f, x) = (centers[f] − x)²`, with
///   `R(f) = (centers[f] − mean)² + variance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnsembleSpec {
    Independent { offsets: Vec<f64> },
    Affine { offsets: Vec<f64>, slopes: Vec<f64> },
    SquaredLocation { centers: Vec<f64> },
}

/// Loss oracle built from an [`EnsembleSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum SyntheticLoss {
    Independent { offsets: Vec<f64> },
    Affine { offsets: Vec<f64>, slopes: Vec<f64> },
    SquaredLocation { centers: Vec<f64> },
}

impl LossOracle for SyntheticLoss {
    fn loss(&self, f: usize, x: &[f64]) -> f64 {
        match self {
            SyntheticLoss::Independent { offsets } => offsets[f] + x[f],
            SyntheticLoss::Affine { offsets, slopes } => offsets[f] + slopes[f] * x[0],
            SyntheticLoss::SquaredLocation { centers } => {
                let r = centers[f] - x[0];
                r * r
            }
        }
    }
}

fn check_finite(field: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::config(field, "needs at least one hypothesis"));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::config(format!("{field}[{i}]"), "must be finite"));
    }
    Ok(())
}

impl EnsembleSpec {
    pub fn len(&self) -> usize {
        match self {
            EnsembleSpec::Independent { offsets } | EnsembleSpec::Affine { offsets, .. } => offsets.len(),
            EnsembleSpec::SquaredLocation { centers } => centers.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates per datum.
    pub fn datum_dim(&self) -> usize {
        match self {
            EnsembleSpec::Independent { offsets } => offsets.len(),
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EnsembleSpec::Independent { offsets } => check_finite("ensemble.offsets", offsets),
            EnsembleSpec::Affine { offsets, slopes } => {
                check_finite("ensemble.offsets", offsets)?;
                check_finite("ensemble.slopes", slopes)?;
                if slopes.len() != offsets.len() {
                    return Err(Error::config(
                        "ensemble.slopes",
                        format!("has {} entries, offsets has {}", slopes.len(), offsets.len()),
                    ));
                }
                if slopes.iter().all(|b| *b == 0.0) {
                    return Err(Error::config("ensemble.slopes", "all slopes are zero, so sigma = 0"));
                }
                Ok(())
            }
            EnsembleSpec::SquaredLocation { centers } => check_finite("ensemble.centers", centers),
        }
    }

    /// Exact true risks `R(f) = E ℓ(f, X)` under `law`.
    pub fn true_risks(&self, law: &DistributionSpec) -> Vec<f64> {
        let (mean, var) = law.moments();
        match self {
            EnsembleSpec::Independent { offsets } => offsets.iter().map(|a| a + mean).collect(),
            EnsembleSpec::Affine { offsets, slopes } => {
                offsets.iter().zip(slopes).map(|(a, b)| a + b * mean).collect()
            }
            EnsembleSpec::SquaredLocation { centers } => {
                centers.iter().map(|c| (c - mean).powi(2) + var).collect()
            }
        }
    }

    /// Smallest `s` with `Var ℓ(f, X) <= s²` for every `f`; `+∞` when some
    /// loss has infinite variance.
    pub fn loss_sd_bound(&self, law: &DistributionSpec) -> f64 {
        let (mean, var) = law.moments();
        let sd = var.sqrt();
        match self {
            EnsembleSpec::Independent { .. } => sd,
            EnsembleSpec::Affine { slopes, .. } => slopes.iter().fold(0.0f64, |m, b| m.max(b.abs())) * sd,
            EnsembleSpec::SquaredLocation { centers } => {
                let (Some(m3), Some(m4)) = (law.third_central_moment(), law.fourth_central_moment()) else {
                    return f64::INFINITY;
                };
                // Var (Y + d)² = μ4 − μ2² + 4dμ3 + 4d²μ2 with Y centred, d = mean − c.
                centers
                    .iter()
                    .map(|c| {
                        let d = mean - c;
                        m4 - var * var + 4.0 * d * m3 + 4.0 * d * d * var
                    })
                    .fold(0.0f64, f64::max)
                    .sqrt()
            }
        }
    }

    /// Subgaussian factor of the losses when `law` is subgaussian and the
    /// losses are affine in the data; `None` otherwise.
    pub fn loss_subgaussian_bound(&self, law: &DistributionSpec) -> Option<f64> {
        let s = law.subgaussian_variance_factor()?.sqrt();
        match self {
            EnsembleSpec::Independent { .. } => Some(s),
            EnsembleSpec::Affine { slopes, .. } => Some(slopes.iter().fold(0.0f64, |m, b| m.max(b.abs())) * s),
            EnsembleSpec::SquaredLocation { .. } => None,
        }
    }

    /// Builds the ensemble with exact true risks and `σ = sigma`.
    pub fn build(&self, law: &DistributionSpec, sigma: f64) -> Result<HypothesisEnsemble<SyntheticLoss>> {
        self.validate()?;
        let oracle = match self.clone() {
            EnsembleSpec::Independent { offsets } => SyntheticLoss::Independent { offsets },
            EnsembleSpec::Affine { offsets, slopes } => SyntheticLoss::Affine { offsets, slopes },
            EnsembleSpec::SquaredLocation { centers } => SyntheticLoss::SquaredLocation { centers },
        };
        HypothesisEnsemble::new(oracle, self.true_risks(law), sigma)
    }
}
