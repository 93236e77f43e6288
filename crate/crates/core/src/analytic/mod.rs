//! The Gaussian example: closed-form predictive value curves for the
//! regression function and a linear score, the special functions they need,
//! a seeded sampler and a Monte Carlo curve oracle.

pub mod gaussian;
pub mod special;

pub use gaussian::{
    analytic_curves, analytic_grid, label_bias, monte_carlo_curve_oracle, ppv_f1_form, sample_dataset,
    uniform_alpha_grid, AnalyticCurvePoint, F1PpvForm, GaussianExampleConfig, OracleEstimate, Scorer,
};
