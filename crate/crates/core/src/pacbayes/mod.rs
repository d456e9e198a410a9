//! Finite-hypothesis PAC-Bayes machinery.
//!
//! With `M` hypotheses, a prior `π` and a posterior `ρ` are probability
//! vectors and every aggregated quantity `ρ[g] = Σ ρ_i g_i` is exact. Two
//! bounds are provided, each holding with probability at least `1 − δ`:
//!
//! - expensive (subgaussian losses): `ρ[R] <= ρ[R_N] + σ/√N · √(2(log(1/δ) + KL(ρ, π)))`
//! - cheap (variance <= σ²): `ρ[R] <= ρ[R_N] + σ/√N · √((D2(ρ, π) + 1)/δ)`
//!
//! An infinite divergence makes the bound vacuous; the report then carries
//! `+∞` rather than an error.

mod ensembles;

pub use ensembles::{EnsembleSpec, SyntheticLoss};

use serde::{Deserialize, Serialize};

use crate::divergences::{chi2_d2_discrete, exponential_tilt, kl_discrete, DiscreteMeasure, Extended};
use crate::error::{check_delta, check_positive, Error, Result};
use crate::estimators::{mom_with_partition, BlockPartition};

/// Loss of hypothesis `f` on one datum.
pub trait LossOracle: Send + Sync {
    fn loss(&self, hypothesis: usize, datum: &[f64]) -> f64;
}

impl<F> LossOracle for F
where
    F: Fn(usize, &[f64]) -> f64 + Send + Sync,
{
    fn loss(&self, hypothesis: usize, datum: &[f64]) -> f64 {
        self(hypothesis, datum)
    }
}

/// Row-major table of `N` data points, each a vector of `dim` reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    values: Vec<f64>,
}

impl Dataset {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("datum dimension must be >= 1"));
        }
        if values.is_empty() {
            return Err(Error::Empty("dataset must contain at least one datum"));
        }
        if !values.len().is_multiple_of(dim) {
            return Err(Error::domain(format!(
                "{} values do not split into rows of {dim}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { dim, values })
    }

    /// One scalar per datum.
    pub fn from_scalars(values: Vec<f64>) -> Result<Self> {
        Self::new(1, values)
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.dim)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    /// Overwrites every coordinate of row `i`.
    pub fn fill_row(&mut self, i: usize, value: f64) {
        let dim = self.dim;
        self.values[i * dim..(i + 1) * dim].fill(value);
    }
}

/// A finite hypothesis set with known true risks `R(f)` and a common
/// variance (or subgaussian) factor `σ` for the losses. `σ = +∞` records
/// that no finite bound exists; the PAC-Bayes bounds then need an explicit
/// finite `σ` from the caller.
#[derive(Debug, Clone)]
pub struct HypothesisEnsemble<L> {
    oracle: L,
    true_risks: Vec<f64>,
    sigma: f64,
}

impl<L: LossOracle> HypothesisEnsemble<L> {
    pub fn new(oracle: L, true_risks: Vec<f64>, sigma: f64) -> Result<Self> {
        if true_risks.is_empty() {
            return Err(Error::Empty("ensemble needs at least one hypothesis"));
        }
        if let Some(i) = true_risks.iter().position(|r| !r.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if !(sigma > 0.0) {
            return Err(Error::domain(format!("sigma must be > 0, got {sigma}")));
        }
        Ok(Self {
            oracle,
            true_risks,
            sigma,
        })
    }

    pub fn len(&self) -> usize {
        self.true_risks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.true_risks.is_empty()
    }

    pub fn true_risks(&self) -> &[f64] {
        &self.true_risks
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn oracle(&self) -> &L {
        &self.oracle
    }

    pub fn loss(&self, hypothesis: usize, datum: &[f64]) -> f64 {
        self.oracle.loss(hypothesis, datum)
    }

    /// `ℓ(f, x_1), …, ℓ(f, x_N)`.
    pub fn losses(&self, hypothesis: usize, dataset: &Dataset) -> Vec<f64> {
        dataset.rows().map(|x| self.oracle.loss(hypothesis, x)).collect()
    }
}

/// `R_N(f) = (1/N) Σ ℓ(f, x_i)` for every hypothesis.
pub fn empirical_risks<L: LossOracle>(ensemble: &HypothesisEnsemble<L>, dataset: &Dataset) -> Result<Vec<f64>> {
    if dataset.is_empty() {
        return Err(Error::Empty("dataset must contain at least one datum"));
    }
    let n = dataset.len() as f64;
    Ok((0..ensemble.len())
        .map(|f| dataset.rows().map(|x| ensemble.loss(f, x)).sum::<f64>() / n)
        .collect())
}

/// Per-hypothesis median-of-means of the loss sequence, all hypotheses
/// sharing one block partition.
pub fn robust_risk_estimates<L: LossOracle>(
    ensemble: &HypothesisEnsemble<L>,
    dataset: &Dataset,
    k: usize,
) -> Result<Vec<f64>> {
    let partition = BlockPartition::new(dataset.len(), k)?;
    (0..ensemble.len())
        .map(|f| mom_with_partition(&ensemble.losses(f, dataset), &partition))
        .collect()
}

/// `ρ[R] = Σ ρ_i R_i`.
pub fn aggregated(measure: &DiscreteMeasure, risks: &[f64]) -> Result<f64> {
    measure.expectation(risks)
}

/// `λ = √(2N(log(1/δ) + KL)) / σ`, the minimiser of the expensive bound's
/// `(log π[e^{λ(R−R_N)}] + KL)/λ` after the Markov step.
pub fn optimal_lambda(sigma: f64, n: usize, delta: f64, kl: Extended) -> Result<f64> {
    check_positive("sigma", sigma)?;
    check_delta(delta)?;
    check_n(n)?;
    let kl = kl
        .finite()
        .ok_or(Error::InfiniteDivergence("optimal lambda needs a finite KL"))?;
    Ok((2.0 * n as f64 * ((1.0 / delta).ln() + kl)).sqrt() / sigma)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::domain("sample size N must be >= 1"))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundModel {
    Expensive,
    Cheap,
}

/// An evaluated PAC-Bayes bound.
///
/// Serialized as `{"model", "rho_emp", "complexity", "delta", "lambda", "bound"}`
/// with `null` standing for `+∞` (and for `lambda` on the cheap bound).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub model: BoundModel,
    /// `ρ[R_N]` (or `ρ[R̂]` for another risk estimate).
    pub rho_emp: f64,
    /// `KL(ρ, π)` for the expensive bound, `D2(ρ, π)` for the cheap one.
    pub complexity: Extended,
    pub delta: f64,
    pub lambda: Option<f64>,
    pub bound: Extended,
}

impl BoundReport {
    /// `bound − ρ[R_N]`, the `σ/√N · A(ρ, π, δ)` term.
    pub fn additive_term(&self) -> Extended {
        match self.bound {
            Extended::Finite(b) => Extended::Finite(b - self.rho_emp),
            Extended::PosInf => Extended::PosInf,
        }
    }

    pub fn is_vacuous(&self) -> bool {
        !self.bound.is_finite()
    }

    /// `true` when `value` exceeds the bound.
    pub fn is_violated_by(&self, value: f64) -> bool {
        match self.bound {
            Extended::Finite(b) => value > b,
            Extended::PosInf => false,
        }
    }
}

fn check_bound_inputs(
    rho: &DiscreteMeasure,
    pi: &DiscreteMeasure,
    risks: &[f64],
    sigma: f64,
    n: usize,
    delta: f64,
) -> Result<f64> {
    check_positive("sigma", sigma)?;
    check_n(n)?;
    check_delta(delta)?;
    if pi.len() != rho.len() {
        return Err(Error::LengthMismatch {
            expected: pi.len(),
            actual: rho.len(),
        });
    }
    if let Some(i) = risks.iter().position(|r| !r.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    aggregated(rho, risks)
}

/// `ρ[R_N] + σ/√N · √(2(log(1/δ) + KL(ρ, π)))`.
pub fn expensive_bound(
    rho: &DiscreteMeasure,
    pi: &DiscreteMeasure,
    emp_risks: &[f64],
    sigma: f64,
    n: usize,
    delta: f64,
) -> Result<BoundReport> {
    let rho_emp = check_bound_inputs(rho, pi, emp_risks, sigma, n, delta)?;
    let complexity = kl_discrete(rho, pi)?;
    let (bound, lambda) = match complexity {
        Extended::Finite(kl) => {
            let term = sigma / (n as f64).sqrt() * (2.0 * ((1.0 / delta).ln() + kl)).sqrt();
            (
                Extended::Finite(rho_emp + term),
                Some(optimal_lambda(sigma, n, delta, complexity)?),
            )
        }
        Extended::PosInf => (Extended::PosInf, None),
    };
    Ok(BoundReport {
        model: BoundModel::Expensive,
        rho_emp,
        complexity,
        delta,
        lambda,
        bound,
    })
}

/// `ρ[R_N] + σ/√N · √((D2(ρ, π) + 1)/δ)`.
pub fn cheap_bound(
    rho: &DiscreteMeasure,
    pi: &DiscreteMeasure,
    emp_risks: &[f64],
    sigma: f64,
    n: usize,
    delta: f64,
) -> Result<BoundReport> {
    let rho_emp = check_bound_inputs(rho, pi, emp_risks, sigma, n, delta)?;
    let complexity = chi2_d2_discrete(rho, pi)?;
    let bound = match complexity {
        Extended::Finite(d2) => {
            let term = sigma / (n as f64).sqrt() * ((d2 + 1.0) / delta).sqrt();
            Extended::Finite(rho_emp + term)
        }
        Extended::PosInf => Extended::PosInf,
    };
    Ok(BoundReport {
        model: BoundModel::Cheap,
        rho_emp,
        complexity,
        delta,
        lambda: None,
        bound,
    })
}

/// Evaluates the bound selected by `model`.
pub fn bound(
    model: BoundModel,
    rho: &DiscreteMeasure,
    pi: &DiscreteMeasure,
    emp_risks: &[f64],
    sigma: f64,
    n: usize,
    delta: f64,
) -> Result<BoundReport> {
    match model {
        BoundModel::Expensive => expensive_bound(rho, pi, emp_risks, sigma, n, delta),
        BoundModel::Cheap => cheap_bound(rho, pi, emp_risks, sigma, n, delta),
    }
}

/// Gibbs measure `ρ_i ∝ π_i exp(−γ R̂_i)`. `γ = 0` returns `π` unchanged.
pub fn gibbs_posterior(pi: &DiscreteMeasure, risk_estimates: &[f64], gamma: f64) -> Result<DiscreteMeasure> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::domain(format!("gamma must be finite and >= 0, got {gamma}")));
    }
    if pi.len() != risk_estimates.len() {
        return Err(Error::LengthMismatch {
            expected: pi.len(),
            actual: risk_estimates.len(),
        });
    }
    if let Some(i) = risk_estimates.iter().position(|r| !r.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    if gamma == 0.0 {
        return Ok(pi.clone());
    }
    let scores: Vec<f64> = risk_estimates.iter().map(|r| -gamma * r).collect();
    exponential_tilt(pi, &scores)
}

/// `sup_f {R(f) − R̂(f)}`, which dominates `ρ[R] − ρ[R̂]` for every `ρ`.
pub fn sup_deviation(true_risks: &[f64], est_risks: &[f64]) -> Result<f64> {
    if true_risks.len() != est_risks.len() {
        return Err(Error::LengthMismatch {
            expected: true_risks.len(),
            actual: est_risks.len(),
        });
    }
    if true_risks.is_empty() {
        return Err(Error::Empty("no hypotheses"));
    }
    Ok(true_risks
        .iter()
        .zip(est_risks)
        .map(|(r, e)| r - e)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Dirac at the lowest index attaining `min R̂`: the minimiser over the
/// simplex of `ρ[R̂] + c` for any `ρ`-independent `c`.
pub fn dirac_collapse_argmin(est_risks: &[f64]) -> Result<DiscreteMeasure> {
    if est_risks.is_empty() {
        return Err(Error::Empty("no hypotheses"));
    }
    if let Some(i) = est_risks.iter().position(|r| r.is_nan()) {
        return Err(Error::NonFinite(i));
    }
    let mut best = 0;
    for (i, r) in est_risks.iter().enumerate().skip(1) {
        if *r < est_risks[best] {
            best = i;
        }
    }
    DiscreteMeasure::dirac(est_risks.len(), best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table_ensemble(table: Vec<Vec<f64>>) -> HypothesisEnsemble<impl LossOracle> {
        let m = table.len();
        HypothesisEnsemble::new(
            move |f: usize, x: &[f64]| table[f][x[0] as usize],
            vec![0.0; m],
            1.0,
        )
        .unwrap()
    }

    fn index_dataset(n: usize) -> Dataset {
        Dataset::from_scalars((0..n).map(|i| i as f64).collect()).unwrap()
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(0, vec![1.0]).is_err());
        assert!(Dataset::new(2, vec![1.0, 2.0, 3.0]).is_err());
        assert!(Dataset::new(1, vec![]).is_err());
        assert!(Dataset::new(1, vec![f64::NAN]).is_err());
        let d = Dataset::new(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn ensemble_validation() {
        let zero = |_: usize, _: &[f64]| 0.0;
        assert!(HypothesisEnsemble::new(zero, vec![], 1.0).is_err());
        assert!(HypothesisEnsemble::new(zero, vec![f64::NAN], 1.0).is_err());
        assert!(HypothesisEnsemble::new(zero, vec![0.0], 0.0).is_err());
        assert!(HypothesisEnsemble::new(zero, vec![0.0], f64::INFINITY).is_ok());
    }

    #[test]
    fn empirical_risk_examples() {
        let ens = table_ensemble(vec![vec![1.0, 2.0, 3.0], vec![0.0, 0.0, 6.0], vec![0.0; 3], vec![4.5; 3]]);
        let risks = empirical_risks(&ens, &index_dataset(3)).unwrap();
        assert_eq!(risks, vec![2.0, 2.0, 0.0, 4.5]);
    }

    #[test]
    fn robust_risk_examples() {
        let ens = table_ensemble(vec![vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], vec![2.0; 6]]);
        let data = index_dataset(6);
        assert_eq!(robust_risk_estimates(&ens, &data, 3).unwrap(), vec![3.5, 2.0]);
        assert_eq!(
            robust_risk_estimates(&ens, &data, 1).unwrap(),
            empirical_risks(&ens, &data).unwrap()
        );
        assert!(robust_risk_estimates(&ens, &data, 7).is_err());
    }

    #[test]
    fn aggregated_examples() {
        let risks = [1.0, 2.0, 3.0];
        assert_eq!(aggregated(&DiscreteMeasure::dirac(3, 2).unwrap(), &risks).unwrap(), 3.0);
        assert!((aggregated(&DiscreteMeasure::uniform(3).unwrap(), &risks).unwrap() - 2.0).abs() < 1e-15);
        let rho = DiscreteMeasure::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert!((aggregated(&rho, &[4.0; 3]).unwrap() - 4.0).abs() < 1e-15);
        assert!(aggregated(&rho, &[1.0]).is_err());
    }

    #[test]
    fn optimal_lambda_examples() {
        let l = optimal_lambda(1.0, 100, 0.05, Extended::Finite(0.0)).unwrap();
        assert!((l - (200.0 * 20f64.ln()).sqrt()).abs() < 1e-12);
        assert!((l - 24.478).abs() < 1e-3);
        let e = std::f64::consts::E;
        let l = optimal_lambda(2.0, 50, 1.0 / e, Extended::Finite(0.0)).unwrap();
        assert!((l - 10.0 / 2.0).abs() < 1e-12);
        let l1 = optimal_lambda(1.0, 25, 0.1, Extended::Finite(0.3)).unwrap();
        let l4 = optimal_lambda(1.0, 100, 0.1, Extended::Finite(0.3)).unwrap();
        assert!((l4 - 2.0 * l1).abs() < 1e-12);
        assert!(matches!(
            optimal_lambda(1.0, 10, 0.1, Extended::PosInf),
            Err(Error::InfiniteDivergence(_))
        ));
    }

    #[test]
    fn bounds_reduce_to_intervals_when_rho_is_pi() {
        let pi = DiscreteMeasure::uniform(4).unwrap();
        let risks = [0.1, 0.2, 0.3, 0.4];
        let ex = expensive_bound(&pi, &pi, &risks, 1.0, 100, 0.05).unwrap();
        let ch = cheap_bound(&pi, &pi, &risks, 1.0, 100, 0.05).unwrap();
        let sg = crate::intervals::subgaussian_half_width(1.0, 100, 0.05).unwrap();
        let cb = crate::intervals::chebyshev_half_width(1.0, 100, 0.05).unwrap();
        let ex_term = ex.additive_term().finite().unwrap();
        let ch_term = ch.additive_term().finite().unwrap();
        assert!((ex_term - sg).abs() / sg < 1e-12);
        assert!((ch_term - cb).abs() / cb < 1e-12);
        assert!((ex_term - 0.24478).abs() < 1e-5);
        assert!((ch_term - 0.44721).abs() < 1e-5);
        assert_eq!(ex.lambda, Some(optimal_lambda(1.0, 100, 0.05, Extended::Finite(0.0)).unwrap()));
        assert_eq!(ch.lambda, None);
    }

    #[test]
    fn dirac_posterior_terms() {
        let m = 7;
        let pi = DiscreteMeasure::uniform(m).unwrap();
        let rho = DiscreteMeasure::dirac(m, 3).unwrap();
        let risks = [0.0; 7];
        let (sigma, n, delta) = (1.5, 64, 0.1);
        let ex = expensive_bound(&rho, &pi, &risks, sigma, n, delta).unwrap();
        let ch = cheap_bound(&rho, &pi, &risks, sigma, n, delta).unwrap();
        let scale = sigma / (n as f64).sqrt();
        let ex_expected = scale * (2.0 * ((1.0 / delta).ln() + (m as f64).ln())).sqrt();
        let ch_expected = scale * (m as f64 / delta).sqrt();
        assert!((ex.additive_term().finite().unwrap() - ex_expected).abs() < 1e-12);
        assert!((ch.additive_term().finite().unwrap() - ch_expected).abs() < 1e-12);
    }

    #[test]
    fn support_outside_prior_is_vacuous() {
        let pi = DiscreteMeasure::dirac(3, 0).unwrap();
        let rho = DiscreteMeasure::dirac(3, 1).unwrap();
        let risks = [0.0, 1.0, 2.0];
        for model in [BoundModel::Expensive, BoundModel::Cheap] {
            let r = bound(model, &rho, &pi, &risks, 1.0, 10, 0.1).unwrap();
            assert!(r.is_vacuous());
            assert_eq!(r.complexity, Extended::PosInf);
            assert_eq!(r.lambda, None);
            assert!(!r.is_violated_by(1e300));
        }
    }

    #[test]
    fn bound_report_json_schema() {
        let pi = DiscreteMeasure::uniform(2).unwrap();
        let r = expensive_bound(&pi, &pi, &[0.5, 0.5], 1.0, 4, 0.5).unwrap();
        let v: serde_json::Value = serde_json::to_value(r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        assert_eq!(keys.len(), 6);
        for k in ["model", "rho_emp", "complexity", "delta", "lambda", "bound"] {
            assert!(keys.contains(&k), "missing {k}");
        }
        assert_eq!(v["model"], "expensive");
        let rho = DiscreteMeasure::dirac(2, 0).unwrap();
        let piv = DiscreteMeasure::dirac(2, 1).unwrap();
        let vac = cheap_bound(&rho, &piv, &[0.5, 0.5], 1.0, 4, 0.5).unwrap();
        let v = serde_json::to_value(vac).unwrap();
        assert!(v["bound"].is_null() && v["complexity"].is_null() && v["lambda"].is_null());
    }

    #[test]
    fn bound_input_errors() {
        let pi = DiscreteMeasure::uniform(2).unwrap();
        assert!(expensive_bound(&pi, &pi, &[0.0], 1.0, 10, 0.1).is_err());
        assert!(expensive_bound(&pi, &pi, &[0.0, 0.0], 0.0, 10, 0.1).is_err());
        assert!(cheap_bound(&pi, &pi, &[0.0, 0.0], 1.0, 0, 0.1).is_err());
        assert!(cheap_bound(&pi, &pi, &[0.0, 0.0], 1.0, 10, 1.0).is_err());
        assert!(cheap_bound(&pi, &DiscreteMeasure::uniform(3).unwrap(), &[0.0, 0.0], 1.0, 10, 0.5).is_err());
    }

    #[test]
    fn additive_terms_monotone() {
        let pi = DiscreteMeasure::uniform(3).unwrap();
        let rho = DiscreteMeasure::new(vec![0.6, 0.3, 0.1]).unwrap();
        let risks = [0.0; 3];
        let term = |model, n, delta| {
            bound(model, &rho, &pi, &risks, 1.0, n, delta)
                .unwrap()
                .additive_term()
                .finite()
                .unwrap()
        };
        for model in [BoundModel::Expensive, BoundModel::Cheap] {
            let deltas = [0.5, 0.2, 0.1, 0.05, 0.01, 1e-4];
            for w in deltas.windows(2) {
                assert!(term(model, 100, w[1]) > term(model, 100, w[0]));
            }
            for n in [10, 20, 40, 80] {
                assert!(term(model, 2 * n, 0.1) < term(model, n, 0.1));
            }
        }
        // Nondecreasing in the divergence: walk ρ from π towards a Dirac.
        let mut prev = (0.0, 0.0);
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            let w = vec![1.0 / 3.0 + t * 2.0 / 3.0, (1.0 - t) / 3.0, (1.0 - t) / 3.0];
            let r = DiscreteMeasure::from_unnormalized(w).unwrap();
            let e = expensive_bound(&r, &pi, &risks, 1.0, 50, 0.1).unwrap().additive_term().finite().unwrap();
            let c = cheap_bound(&r, &pi, &risks, 1.0, 50, 0.1).unwrap().additive_term().finite().unwrap();
            assert!(e >= prev.0 && c >= prev.1);
            prev = (e, c);
        }
    }

    #[test]
    fn gibbs_examples() {
        let pi = DiscreteMeasure::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(gibbs_posterior(&pi, &[1.0, 0.0, 2.0], 0.0).unwrap(), pi);

        let hot = gibbs_posterior(&pi, &[1.0, 0.0, 2.0], 1e6).unwrap();
        assert!(hot.weights()[1] >= 1.0 - 1e-9);

        let gamma = 3.0;
        let u = DiscreteMeasure::uniform(2).unwrap();
        let rho = gibbs_posterior(&u, &[0.0, 2f64.ln() / gamma], gamma).unwrap();
        assert!((rho.weights()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((rho.weights()[1] - 1.0 / 3.0).abs() < 1e-15);

        assert!(gibbs_posterior(&pi, &[0.0; 3], -1.0).is_err());
        assert!(gibbs_posterior(&pi, &[0.0, f64::INFINITY, 0.0], 1.0).is_err());
        assert!(gibbs_posterior(&pi, &[0.0; 2], 1.0).is_err());
    }

    #[test]
    fn gibbs_respects_prior_support() {
        let pi = DiscreteMeasure::new(vec![0.0, 0.5, 0.5]).unwrap();
        let rho = gibbs_posterior(&pi, &[-100.0, 1.0, 2.0], 10.0).unwrap();
        assert_eq!(rho.weights()[0], 0.0);
        assert!(rho.weights()[1] > rho.weights()[2]);
    }

    #[test]
    fn sup_deviation_examples() {
        assert_eq!(sup_deviation(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(sup_deviation(&[1.0, 2.0], &[0.0, 3.0]).unwrap(), 1.0);
        assert!(sup_deviation(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn dirac_collapse_examples() {
        assert_eq!(dirac_collapse_argmin(&[3.0, 1.0, 2.0]).unwrap(), DiscreteMeasure::dirac(3, 1).unwrap());
        assert_eq!(dirac_collapse_argmin(&[1.0, 1.0, 2.0]).unwrap(), DiscreteMeasure::dirac(3, 0).unwrap());
        assert!(dirac_collapse_argmin(&[]).is_err());
    }

    fn risks_and_weights() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
        (1usize..15).prop_flat_map(|m| {
            (
                prop::collection::vec(-10.0f64..10.0, m),
                prop::collection::vec(-10.0f64..10.0, m),
                prop::collection::vec(0.0f64..1.0, m),
            )
        })
    }

    proptest! {
        #[test]
        fn sup_deviation_dominates_aggregated_gap((truth, est, w) in risks_and_weights()) {
            prop_assume!(w.iter().sum::<f64>() > 1e-6);
            let rho = DiscreteMeasure::from_unnormalized(w).unwrap();
            let gap = aggregated(&rho, &truth).unwrap() - aggregated(&rho, &est).unwrap();
            prop_assert!(gap <= sup_deviation(&truth, &est).unwrap() + 1e-12);
        }

        #[test]
        fn argmin_dirac_attains_minimum((v, _, w) in risks_and_weights(), c in -5.0f64..5.0) {
            let d = dirac_collapse_argmin(&v).unwrap();
            let min = v.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert_eq!(aggregated(&d, &v).unwrap(), min);
            prop_assume!(w.iter().sum::<f64>() > 1e-6);
            let rho = DiscreteMeasure::from_unnormalized(w).unwrap();
            prop_assert!(aggregated(&d, &v).unwrap() + c <= aggregated(&rho, &v).unwrap() + c + 1e-12);
        }

        #[test]
        fn bound_never_below_aggregated_empirical((risks, _, w) in risks_and_weights(), delta in 0.001f64..0.999) {
            prop_assume!(w.iter().sum::<f64>() > 1e-6);
            let m = risks.len();
            let rho = DiscreteMeasure::from_unnormalized(w).unwrap();
            let pi = DiscreteMeasure::uniform(m).unwrap();
            for model in [BoundModel::Expensive, BoundModel::Cheap] {
                let r = bound(model, &rho, &pi, &risks, 1.0, 30, delta).unwrap();
                prop_assert!(r.bound.to_f64() >= r.rho_emp);
            }
        }
    }
}
