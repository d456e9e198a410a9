//! f-divergences between probability vectors on a finite index set.
//!
//! `D_f(μ, ν) = Σ_{ν_i > 0} ν_i f(μ_i / ν_i)` when `μ ≪ ν`, and `+∞`
//! otherwise. Conventions: `0 · log 0 = 0`, and indices with `ν_i = μ_i = 0`
//! contribute nothing. Infinite divergences are reported as
//! [`Extended::PosInf`], never as an overflowed float.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance on `Σ w_i = 1`.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A nonnegative extended real: finite, or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Extended {
    Finite(f64),
    PosInf,
}

impl Extended {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Extended::Finite(v) => Some(v),
            Extended::PosInf => None,
        }
    }

    /// The value as an `f64`, mapping `PosInf` to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::PosInf => f.write_str("+inf"),
        }
    }
}

/// Finite values serialize as numbers, `+∞` as `null`.
impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => s.serialize_f64(*v),
            Extended::PosInf => s.serialize_none(),
        }
    }
}

/// Probability vector over hypotheses `0..M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DiscreteMeasure {
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Validates nonnegativity and unit mass (within [`MASS_TOLERANCE`]).
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty("measure needs at least one atom"));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidMeasure(format!(
                "weight {i} is {} (must be finite and >= 0)",
                weights[i]
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { weights })
    }

    /// Normalizes nonnegative weights with positive total mass.
    pub fn from_unnormalized(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty("measure needs at least one atom"));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidMeasure(format!("weight {i} is {}", weights[i])));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidMeasure(format!("total mass {total} is not positive")));
        }
        Ok(Self {
            weights: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Empty("measure needs at least one atom"));
        }
        Ok(Self {
            weights: vec![1.0 / m as f64; m],
        })
    }

    /// Point mass on `index` (0-based) among `m` atoms.
    pub fn dirac(m: usize, index: usize) -> Result<Self> {
        if index >= m {
            return Err(Error::domain(format!("dirac index {index} out of range for {m} atoms")));
        }
        let mut weights = vec![0.0; m];
        weights[index] = 1.0;
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `μ[g] = Σ μ_i g_i`.
    pub fn expectation(&self, values: &[f64]) -> Result<f64> {
        check_len(self.len(), values.len())?;
        Ok(self
            .weights
            .iter()
            .zip(values)
            .filter(|(w, _)| **w > 0.0)
            .map(|(w, v)| w * v)
            .sum())
    }

    /// True when every atom of `self` carries `other` mass (`self ≪ other`).
    pub fn is_absolutely_continuous(&self, other: &DiscreteMeasure) -> bool {
        self.len() == other.len()
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(m, n)| *n > 0.0 || *m == 0.0)
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}

/// Convex generator `f` with `f(1) = 0`.
#[derive(Clone)]
pub enum FSpec {
    /// `f(x) = x log x`.
    Kl,
    /// `f(x) = x² − 1`.
    D2,
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for FSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FSpec::Kl => f.write_str("Kl"),
            FSpec::D2 => f.write_str("D2"),
            FSpec::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl FSpec {
    /// Wraps a pointwise generator after checking `|f(1)| <= 1e-12`.
    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let at_one = f(1.0);
        if !(at_one.abs() <= 1e-12) {
            return Err(Error::domain(format!("f(1) must be 0, got {at_one}")));
        }
        Ok(FSpec::Custom {
            name: name.into(),
            f: Arc::new(f),
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            FSpec::Kl => {
                if x == 0.0 {
                    0.0
                } else {
                    x * x.ln()
                }
            }
            FSpec::D2 => x * x - 1.0,
            FSpec::Custom { f, .. } => f(x),
        }
    }
}

/// Generic `D_f(μ, ν)`.
pub fn f_divergence(fspec: &FSpec, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Extended> {
    check_len(nu.len(), mu.len())?;
    let mut total = 0.0;
    for (&m, &n) in mu.weights.iter().zip(&nu.weights) {
        if n == 0.0 {
            if m > 0.0 {
                return Ok(Extended::PosInf);
            }
            continue;
        }
        total += n * fspec.eval(m / n);
    }
    Ok(Extended::Finite(total))
}

/// `KL(μ, ν) = Σ μ_i log(μ_i / ν_i)`.
pub fn kl_discrete(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Extended> {
    check_len(nu.len(), mu.len())?;
    let mut total = 0.0;
    for (&m, &n) in mu.weights.iter().zip(&nu.weights) {
        if m == 0.0 {
            continue;
        }
        if n == 0.0 {
            return Ok(Extended::PosInf);
        }
        total += m * (m.ln() - n.ln());
    }
    // Rounding may leave a value a few ulps below the true (nonnegative) one.
    Ok(Extended::Finite(total.max(0.0)))
}

/// `D2(μ, ν) = Σ μ_i² / ν_i − 1`, Pearson's χ² divergence.
pub fn chi2_d2_discrete(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Extended> {
    check_len(nu.len(), mu.len())?;
    let mut total = 0.0;
    for (&m, &n) in mu.weights.iter().zip(&nu.weights) {
        if m == 0.0 {
            continue;
        }
        if n == 0.0 {
            return Ok(Extended::PosInf);
        }
        total += m * (m / n);
    }
    Ok(Extended::Finite((total - 1.0).max(0.0)))
}

/// `KL(N(a, I), N(0, I)) = ‖a‖² / 2`.
pub fn gaussian_kl(a: &[f64]) -> f64 {
    0.5 * squared_norm(a)
}

/// `D2(N(a, I), N(0, I)) = exp(‖a‖²) − 1`.
pub fn gaussian_d2(a: &[f64]) -> f64 {
    squared_norm(a).exp_m1()
}

fn squared_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

/// `log π[e^g]`, max-shifted over the support of `π`.
pub fn log_expectation_exp(pi: &DiscreteMeasure, g: &[f64]) -> Result<f64> {
    check_len(pi.len(), g.len())?;
    check_finite(g)?;
    let shift = support_max(pi, g);
    let sum: f64 = pi
        .weights
        .iter()
        .zip(g)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, v)| w * (v - shift).exp())
        .sum();
    Ok(shift + sum.ln())
}

fn support_max(pi: &DiscreteMeasure, g: &[f64]) -> f64 {
    pi.weights
        .iter()
        .zip(g)
        .filter(|(w, _)| **w > 0.0)
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

/// Exponential tilt `ρ_i ∝ π_i e^{g_i}`; the maximiser of `ρ[g] − KL(ρ, π)`.
pub fn exponential_tilt(pi: &DiscreteMeasure, g: &[f64]) -> Result<DiscreteMeasure> {
    check_len(pi.len(), g.len())?;
    check_finite(g)?;
    let shift = support_max(pi, g);
    let raw: Vec<f64> = pi
        .weights
        .iter()
        .zip(g)
        .map(|(w, v)| if *w > 0.0 { w * (v - shift).exp() } else { 0.0 })
        .collect();
    DiscreteMeasure::from_unnormalized(raw)
}

/// `log π[e^g] + KL(ρ, π) − ρ[g]`, which is `>= 0` for every `ρ`, with
/// equality at the exponential tilt of `π` by `g`.
pub fn change_of_measure_gap(rho: &DiscreteMeasure, pi: &DiscreteMeasure, g: &[f64]) -> Result<Extended> {
    check_len(pi.len(), rho.len())?;
    let kl = match kl_discrete(rho, pi)? {
        Extended::Finite(v) => v,
        Extended::PosInf => return Ok(Extended::PosInf),
    };
    let log_mgf = log_expectation_exp(pi, g)?;
    let rho_g = rho.expectation(g)?;
    Ok(Extended::Finite(log_mgf + kl - rho_g))
}
