//! Synthetic data-generating laws with exact analytic moments.
//!
//! Every admissible [`DistributionSpec`] has finite variance, so it belongs to
//! the finite-variance ("cheap") class with variance factor equal to its
//! variance. Gaussian and two-point laws are additionally subgaussian: a
//! centred variable `Y` with `E[exp(λY)] <= exp(λ²s²/2)` for all real `λ`.
//!
//! Specs serialize as `{"family": "...", "params": {...}}`.

use rand::Rng;
use rand_distr::{Distribution, LogNormal, Normal, Pareto, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
enum Law {
    Gaussian { mean: f64, variance: f64 },
    StudentT { nu: f64 },
    Pareto { alpha: f64, scale: f64 },
    LogNormal { mu: f64, sigma: f64 },
    TwoPoint { low: f64, high: f64, p: f64 },
}

/// An admissible data-generating law. Construct through the validating
/// constructors or by deserializing; both reject infinite-variance or
/// degenerate parameterizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Law", into = "Law")]
pub struct DistributionSpec(Law);

impl TryFrom<Law> for DistributionSpec {
    type Error = Error;

    fn try_from(law: Law) -> Result<Self> {
        validate(&law)?;
        Ok(Self(law))
    }
}

impl From<DistributionSpec> for Law {
    fn from(spec: DistributionSpec) -> Law {
        spec.0
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite, got {v}")))
    }
}

fn validate(law: &Law) -> Result<()> {
    match *law {
        Law::Gaussian { mean, variance } => {
            finite("mean", mean)?;
            if !(variance.is_finite() && variance > 0.0) {
                return Err(Error::domain(format!(
                    "gaussian variance must be finite and > 0, got {variance}"
                )));
            }
        }
        Law::StudentT { nu } => {
            if !(nu.is_finite() && nu > 2.0) {
                return Err(Error::domain(format!(
                    "student_t requires nu > 2 for finite variance, got {nu}"
                )));
            }
        }
        Law::Pareto { alpha, scale } => {
            if !(alpha.is_finite() && alpha > 2.0) {
                return Err(Error::domain(format!(
                    "pareto requires alpha > 2 for finite variance, got {alpha}"
                )));
            }
            if !(scale.is_finite() && scale > 0.0) {
                return Err(Error::domain(format!("pareto scale must be > 0, got {scale}")));
            }
        }
        Law::LogNormal { mu, sigma } => {
            finite("mu", mu)?;
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(Error::domain(format!("log_normal sigma must be > 0, got {sigma}")));
            }
            if (sigma * sigma).exp_m1().is_infinite() {
                return Err(Error::domain("log_normal variance overflows"));
            }
        }
        Law::TwoPoint { low, high, p } => {
            finite("low", low)?;
            finite("high", high)?;
            if !(low < high) {
                return Err(Error::domain(format!(
                    "two_point requires low < high, got low = {low}, high = {high}"
                )));
            }
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::domain(format!(
                    "two_point requires 0 < p < 1 (nonzero variance), got {p}"
                )));
            }
        }
    }
    Ok(())
}

impl DistributionSpec {
    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        Law::Gaussian { mean, variance }.try_into()
    }

    /// Standard Student t with `nu` degrees of freedom (location 0, scale 1).
    pub fn student_t(nu: f64) -> Result<Self> {
        Law::StudentT { nu }.try_into()
    }

    /// Pareto with tail index `alpha` and minimum value `scale`.
    pub fn pareto(alpha: f64, scale: f64) -> Result<Self> {
        Law::Pareto { alpha, scale }.try_into()
    }

    /// `exp(Z)` where `Z ~ N(mu, sigma²)`.
    pub fn log_normal(mu: f64, sigma: f64) -> Result<Self> {
        Law::LogNormal { mu, sigma }.try_into()
    }

    /// `high` with probability `p`, otherwise `low`.
    pub fn two_point(low: f64, high: f64, p: f64) -> Result<Self> {
        Law::TwoPoint { low, high, p }.try_into()
    }

    pub fn family_name(&self) -> &'static str {
        match self.0 {
            Law::Gaussian { .. } => "gaussian",
            Law::StudentT { .. } => "student_t",
            Law::Pareto { .. } => "pareto",
            Law::LogNormal { .. } => "log_normal",
            Law::TwoPoint { .. } => "two_point",
        }
    }

    pub fn mean(&self) -> f64 {
        self.moments().0
    }

    pub fn variance(&self) -> f64 {
        self.moments().1
    }

    /// Exact `(mean, variance)`.
    pub fn moments(&self) -> (f64, f64) {
        match self.0 {
            Law::Gaussian { mean, variance } => (mean, variance),
            Law::StudentT { nu } => (0.0, nu / (nu - 2.0)),
            Law::Pareto { alpha, scale } => {
                let mean = alpha * scale / (alpha - 1.0);
                let var = alpha * scale * scale / ((alpha - 1.0).powi(2) * (alpha - 2.0));
                (mean, var)
            }
            Law::LogNormal { mu, sigma } => {
                let s2 = sigma * sigma;
                let mean = (mu + s2 / 2.0).exp();
                let var = s2.exp_m1() * (2.0 * mu + s2).exp();
                (mean, var)
            }
            Law::TwoPoint { low, high, p } => {
                let d = high - low;
                (low + p * d, p * (1.0 - p) * d * d)
            }
        }
    }

    /// `E[(X - mean)^3]`, or `None` when it does not exist.
    pub fn third_central_moment(&self) -> Option<f64> {
        let (_, var) = self.moments();
        match self.0 {
            Law::Gaussian { .. } => Some(0.0),
            Law::StudentT { nu } => (nu > 3.0).then_some(0.0),
            Law::Pareto { alpha, .. } => (alpha > 3.0).then(|| {
                let skew = 2.0 * (1.0 + alpha) / (alpha - 3.0) * ((alpha - 2.0) / alpha).sqrt();
                skew * var.powf(1.5)
            }),
            Law::LogNormal { sigma, .. } => {
                let e = (sigma * sigma).exp();
                Some((e + 2.0) * (e - 1.0).sqrt() * var.powf(1.5))
            }
            Law::TwoPoint { low, high, p } => {
                let d = high - low;
                let up = (1.0 - p) * d;
                let down = -p * d;
                Some(p * up.powi(3) + (1.0 - p) * down.powi(3))
            }
        }
    }

    /// `E[(X - mean)^4]`, or `None` when it is infinite.
    pub fn fourth_central_moment(&self) -> Option<f64> {
        let (_, var) = self.moments();
        match self.0 {
            Law::Gaussian { variance, .. } => Some(3.0 * variance * variance),
            Law::StudentT { nu } => (nu > 4.0).then(|| (3.0 + 6.0 / (nu - 4.0)) * var * var),
            Law::Pareto { alpha, .. } => (alpha > 4.0).then(|| {
                let excess = 6.0 * (alpha.powi(3) + alpha.powi(2) - 6.0 * alpha - 2.0)
                    / (alpha * (alpha - 3.0) * (alpha - 4.0));
                (excess + 3.0) * var * var
            }),
            Law::LogNormal { sigma, .. } => {
                let s2 = sigma * sigma;
                let excess = (4.0 * s2).exp() + 2.0 * (3.0 * s2).exp() + 3.0 * (2.0 * s2).exp() - 6.0;
                Some((excess + 3.0) * var * var)
            }
            Law::TwoPoint { low, high, p } => {
                let d = high - low;
                let up = (1.0 - p) * d;
                let down = -p * d;
                Some(p * up.powi(4) + (1.0 - p) * down.powi(4))
            }
        }
    }

    /// True for Gaussian and two-point (bounded) laws.
    pub fn is_subgaussian(&self) -> bool {
        matches!(self.0, Law::Gaussian { .. } | Law::TwoPoint { .. })
    }

    /// Variance factor `s²` of the subgaussian class, if the law belongs to
    /// it. Bounded laws on `[a, b]` get Hoeffding's `(b - a)² / 4`.
    pub fn subgaussian_variance_factor(&self) -> Option<f64> {
        match self.0 {
            Law::Gaussian { variance, .. } => Some(variance),
            Law::TwoPoint { low, high, .. } => Some((high - low).powi(2) / 4.0),
            _ => None,
        }
    }

    /// Variance factor of the finite-variance class: the variance itself.
    pub fn cheap_variance_factor(&self) -> f64 {
        self.variance()
    }

    pub fn sampler(&self) -> Sampler {
        let inner = match self.0 {
            Law::Gaussian { mean, variance } => {
                SamplerKind::Gaussian(Normal::new(mean, variance.sqrt()).expect("validated"))
            }
            Law::StudentT { nu } => SamplerKind::StudentT(StudentT::new(nu).expect("validated")),
            Law::Pareto { alpha, scale } => {
                SamplerKind::Pareto(Pareto::new(scale, alpha).expect("validated"))
            }
            Law::LogNormal { mu, sigma } => {
                SamplerKind::LogNormal(LogNormal::new(mu, sigma).expect("validated"))
            }
            Law::TwoPoint { low, high, p } => SamplerKind::TwoPoint { low, high, p },
        };
        Sampler(inner)
    }

    /// `n` iid draws from this law.
    pub fn sample(&self, n: usize, stream: &mut RandomStream) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::Empty("sample size n must be >= 1"));
        }
        let sampler = self.sampler();
        Ok((0..n).map(|_| sampler.sample(stream)).collect())
    }
}

/// Free-function form of [`DistributionSpec::sample`].
pub fn sample(spec: &DistributionSpec, n: usize, stream: &mut RandomStream) -> Result<Vec<f64>> {
    spec.sample(n, stream)
}

/// Free-function form of [`DistributionSpec::moments`].
pub fn population_moments(spec: &DistributionSpec) -> (f64, f64) {
    spec.moments()
}

#[derive(Debug, Clone, Copy)]
enum SamplerKind {
    Gaussian(Normal<f64>),
    StudentT(StudentT<f64>),
    Pareto(Pareto<f64>),
    LogNormal(LogNormal<f64>),
    TwoPoint { low: f64, high: f64, p: f64 },
}

/// Prepared sampler for a [`DistributionSpec`].
#[derive(Debug, Clone, Copy)]
pub struct Sampler(SamplerKind);

impl Distribution<f64> for Sampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.0 {
            SamplerKind::Gaussian(d) => d.sample(rng),
            SamplerKind::StudentT(d) => d.sample(rng),
            SamplerKind::Pareto(d) => d.sample(rng),
            SamplerKind::LogNormal(d) => d.sample(rng),
            SamplerKind::TwoPoint { low, high, p } => {
                if rng.random::<f64>() < *p {
                    *high
                } else {
                    *low
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::make_stream;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn analytic_moments() {
        assert_eq!(DistributionSpec::gaussian(2.0, 4.0).unwrap().moments(), (2.0, 4.0));
        assert_eq!(DistributionSpec::student_t(3.0).unwrap().moments(), (0.0, 3.0));
        let (m, v) = DistributionSpec::pareto(2.5, 1.0).unwrap().moments();
        assert!((m - 5.0 / 3.0).abs() < 1e-15);
        assert!((v - 20.0 / 9.0).abs() < 1e-14);
        let (m, v) = DistributionSpec::two_point(0.0, 10.0, 0.01).unwrap().moments();
        assert!((m - 0.1).abs() < 1e-15);
        assert!((v - 0.99).abs() < 1e-14);
    }

    #[test]
    fn rejects_infinite_variance_and_degenerate_laws() {
        assert!(matches!(DistributionSpec::student_t(2.0), Err(Error::Domain(_))));
        assert!(DistributionSpec::student_t(1.5).is_err());
        assert!(DistributionSpec::pareto(2.0, 1.0).is_err());
        assert!(DistributionSpec::pareto(3.0, 0.0).is_err());
        assert!(DistributionSpec::gaussian(0.0, 0.0).is_err());
        assert!(DistributionSpec::two_point(1.0, 1.0, 0.5).is_err());
        assert!(DistributionSpec::two_point(0.0, 1.0, 1.0).is_err());
        assert!(DistributionSpec::log_normal(0.0, -1.0).is_err());
    }

    #[test]
    fn json_shape_round_trips_and_validates() {
        let json = r#"{"family":"student_t","params":{"nu":3.0}}"#;
        let spec: DistributionSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec, DistributionSpec::student_t(3.0).unwrap());
        assert_eq!(serde_json::to_string(&spec).unwrap(), json);

        let bad = r#"{"family":"student_t","params":{"nu":2.0}}"#;
        assert!(serde_json::from_str::<DistributionSpec>(bad).is_err());
    }

    #[test]
    fn membership_flags() {
        assert!(DistributionSpec::gaussian(0.0, 1.0).unwrap().is_subgaussian());
        assert!(DistributionSpec::two_point(0.0, 1.0, 0.5).unwrap().is_subgaussian());
        assert!(!DistributionSpec::student_t(3.0).unwrap().is_subgaussian());
        assert_eq!(
            DistributionSpec::two_point(0.0, 4.0, 0.5).unwrap().subgaussian_variance_factor(),
            Some(4.0)
        );
        assert_eq!(DistributionSpec::pareto(3.0, 1.0).unwrap().subgaussian_variance_factor(), None);
    }

    #[test]
    fn zero_size_sample_rejected() {
        let spec = DistributionSpec::gaussian(0.0, 1.0).unwrap();
        assert!(spec.sample(0, &mut make_stream(1, 0)).is_err());
    }

    #[test]
    fn gaussian_sample_mean_within_four_sigma() {
        let spec = DistributionSpec::gaussian(0.0, 1.0).unwrap();
        let xs = spec.sample(100_000, &mut make_stream(42, 0)).unwrap();
        let (m, _) = mean_var(&xs);
        assert!(m.abs() < 4.0 / (1e5f64).sqrt(), "mean {m}");
    }

    #[test]
    fn two_point_sample_mean_within_four_sigma() {
        let spec = DistributionSpec::two_point(0.0, 10.0, 0.01).unwrap();
        let xs = spec.sample(100_000, &mut make_stream(42, 0)).unwrap();
        let (m, _) = mean_var(&xs);
        let se = (spec.variance() / 1e5).sqrt();
        assert!((m - 0.1).abs() < 4.0 * se, "mean {m}");
    }

    #[test]
    fn student_t_sample_variance_near_three() {
        // Infinite fourth moment: the sample variance converges slowly.
        let spec = DistributionSpec::student_t(3.0).unwrap();
        for seed in 0..5 {
            let xs = spec.sample(100_000, &mut make_stream(seed, 0)).unwrap();
            let (_, v) = mean_var(&xs);
            assert!((v - 3.0).abs() < 0.75, "seed {seed}: variance {v}");
        }
    }

    #[test]
    fn every_family_mean_within_five_standard_errors() {
        let specs = [
            DistributionSpec::gaussian(2.0, 4.0).unwrap(),
            DistributionSpec::student_t(3.0).unwrap(),
            DistributionSpec::pareto(2.5, 1.0).unwrap(),
            DistributionSpec::log_normal(0.0, 1.0).unwrap(),
            DistributionSpec::two_point(0.0, 10.0, 0.01).unwrap(),
        ];
        for (i, spec) in specs.iter().enumerate() {
            let xs = spec.sample(1_000_000, &mut make_stream(7, i as u64)).unwrap();
            let (m, _) = mean_var(&xs);
            let se = (spec.variance() / 1e6).sqrt();
            assert!(
                (m - spec.mean()).abs() < 5.0 * se,
                "{}: sample mean {m} vs {}",
                spec.family_name(),
                spec.mean()
            );
        }
    }

    #[test]
    fn higher_moments_match_simulation() {
        // Light-tailed families only: sample fourth moments converge.
        let specs = [
            DistributionSpec::gaussian(1.0, 2.0).unwrap(),
            DistributionSpec::two_point(-1.0, 3.0, 0.3).unwrap(),
            DistributionSpec::log_normal(0.0, 0.25).unwrap(),
            DistributionSpec::student_t(12.0).unwrap(),
        ];
        for (i, spec) in specs.iter().enumerate() {
            let xs = spec.sample(2_000_000, &mut make_stream(11, i as u64)).unwrap();
            let m = spec.mean();
            let n = xs.len() as f64;
            let m3 = xs.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
            let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
            let v = spec.variance();
            let t3 = spec.third_central_moment().unwrap();
            let t4 = spec.fourth_central_moment().unwrap();
            assert!((m3 - t3).abs() < 0.05 * v.powf(1.5) + 0.02 * t3.abs(), "{i}: m3 {m3} vs {t3}");
            assert!((m4 - t4).abs() < 0.03 * t4, "{i}: m4 {m4} vs {t4}");
        }
        assert_eq!(DistributionSpec::student_t(3.0).unwrap().fourth_central_moment(), None);
        assert_eq!(DistributionSpec::pareto(3.5, 1.0).unwrap().fourth_central_moment(), None);
    }

    #[test]
    fn pareto_moments_against_long_simulation() {
        let spec = DistributionSpec::pareto(2.5, 1.0).unwrap();
        let xs = spec.sample(10_000_000, &mut make_stream(3, 0)).unwrap();
        let (m, v) = mean_var(&xs);
        let se = (spec.variance() / 1e7).sqrt();
        assert!((m - 5.0 / 3.0).abs() < 5.0 * se, "mean {m}");
        // Infinite fourth moment: variance converges slowly.
        assert!((v - 20.0 / 9.0).abs() < 0.3, "variance {v}");
    }
}
