//! Predictive value curves of scoring functions with finite-sample
//! confidence bands.
//!
//! Given scores and binary labels, [`compute_curves`] gives the empirical
//! positive and negative predictive values of every top-`k` classifier,
//! [`build_band`] wraps them in simultaneous confidence bands, and the
//! [`selection`] rules pick a threshold. [`complexity`] holds brute-force
//! calculators for the combinatorial terms of the uniform bands, and
//! [`analytic`] a Gaussian example with known curves.

pub mod analytic;
pub mod bands;
pub mod complexity;
pub mod curves;
pub mod error;
pub mod rng;
pub mod selection;

pub use bands::{
    bias_bound, build_band, deviation_halfwidth_fixed, deviation_halfwidth_uniform, growth_bound, theta_surrogate,
    BandConfig, BandMode, BandRow, Complexity, ConfidenceBand, GrowthBound, Side, ThetaTable,
};
pub use curves::{
    compute_curves, empirical_npv, empirical_ppv, empirical_quantile, stable_top_k, CurvePoint, EmpiricalCurves,
    LabeledSample, ScoredDataset,
};
pub use error::{Error, Result};
pub use selection::{select_accuracy, select_maximin_lcb, SelectionRule, ThresholdChoice};
