//! Robust mean estimation and finite-hypothesis PAC-Bayes bounds.
//!
//! The crate is organised bottom-up:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`rng`] | Counter-based seeded streams (`master_seed`, `stream_id`) |
//! | [`distributions`] | Samplers with exact analytic moments |
//! | [`estimators`] | Empirical mean, block partitions, median-of-means |
//! | [`intervals`] | Subgaussian, Chebyshev and MoM confidence intervals |
//! | [`divergences`] | Discrete f-divergences, Gaussian closed forms, change of measure |
//! | [`pacbayes`] | Risks, KL and D2 bounds, Gibbs posteriors, sup-deviation |
//! | [`montecarlo`] | Trial-replicated coverage and violation experiments |
//! | [`format`] | 17-significant-digit JSON and CSV output |
//!
//! Every experiment is deterministic given its `master_seed`: trial `t` draws
//! from stream `(master_seed, t)`, so reports do not depend on the number of
//! worker threads.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod divergences;
pub mod error;
pub mod estimators;
pub mod format;
pub mod intervals;
pub mod montecarlo;
pub mod pacbayes;
pub mod rng;

pub use error::{Error, Result};
