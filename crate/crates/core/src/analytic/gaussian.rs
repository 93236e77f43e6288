//! The Gaussian example: `x ~ N(0, I_d)`, `P{y = 1 | x} = exp(-|x|²)`,
//! scored either by the regression function itself or by the first
//! coordinate `x[0]`.

use serde::{Deserialize, Serialize};

use super::special::{
    chi_square_quantile, reg_gamma_lower, reg_gamma_upper, std_normal_cdf, std_normal_quantile,
    std_normal_sf,
};
use crate::curves::{compute_curves, LabeledSample, ScoredDataset};
use crate::error::{Error, Result};
use crate::rng::SampleRng;

/// Scoring function of the example.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scorer {
    /// `exp(-|x|²)`, the regression function.
    Eta,
    /// First coordinate of `x`.
    F1,
}

impl Scorer {
    pub fn name(self) -> &'static str {
        match self {
            Scorer::Eta => "eta",
            Scorer::F1 => "f1",
        }
    }
}

impl std::str::FromStr for Scorer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eta" => Ok(Scorer::Eta),
            "f1" => Ok(Scorer::F1),
            other => Err(Error::InvalidInput(format!("unknown scorer {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianExampleConfig {
    pub d: u32,
    pub scorer: Scorer,
    pub seed: u64,
    pub n: usize,
}

impl GaussianExampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Config("dimension d must be >= 1".into()));
        }
        if self.n < 2 {
            return Err(Error::Config(format!("sample size n = {} must be >= 2", self.n)));
        }
        Ok(())
    }
}

/// Population curves of both scorers at one positive rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticCurvePoint {
    pub alpha: f64,
    pub ppv_eta: f64,
    pub npv_eta: f64,
    pub ppv_f1: f64,
    pub npv_f1: f64,
    /// `alpha`-quantile of the chi-square distribution with `d` degrees of freedom.
    pub s_alpha: f64,
    /// `(1 - alpha)`-quantile of the standard normal.
    pub t_alpha: f64,
}

impl AnalyticCurvePoint {
    pub fn ppv(&self, scorer: Scorer) -> f64 {
        match scorer {
            Scorer::Eta => self.ppv_eta,
            Scorer::F1 => self.ppv_f1,
        }
    }

    pub fn npv(&self, scorer: Scorer) -> f64 {
        match scorer {
            Scorer::Eta => self.npv_eta,
            Scorer::F1 => self.npv_f1,
        }
    }
}

/// `P{y = 1} = E exp(-|x|²) = 3^(-d/2)`.
pub fn label_bias(d: u32) -> f64 {
    3f64.powf(-0.5 * d as f64)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    Ok(())
}

fn check_d(d: u32) -> Result<()> {
    if d == 0 {
        return Err(Error::Domain("dimension d must be >= 1".into()));
    }
    Ok(())
}

/// Population ppv/npv curves of both scorers at positive rate `alpha`.
///
/// With `s` the `alpha`-quantile of `χ²_d`, the top-`alpha` set of the
/// regression function is the ball `|x|² <= s`, and
///
/// ```text
/// ppv(eta) = P(d/2, 3s/2) / (alpha 3^(d/2))
/// npv(eta) = 1 - Q(d/2, 3s/2) / ((1 - alpha) 3^(d/2))
/// ```
///
/// With `t` the `(1 - alpha)`-quantile of the standard normal, the top set of
/// `x[0]` is `x[0] > t`, and integrating `exp(-x0²)` against the normal
/// density gives `(1/√3) (1 - Φ(√3 t))` above `t` and `(1/√3) Φ(√3 t)` below:
///
/// ```text
/// ppv(f1) = (1 - Φ(√3 t)) / (alpha 3^(d/2))
/// npv(f1) = 1 - Φ(√3 t) / ((1 - alpha) 3^(d/2))
/// ```
pub fn analytic_curves(alpha: f64, d: u32) -> Result<AnalyticCurvePoint> {
    check_alpha(alpha)?;
    check_d(d)?;
    let a = 0.5 * d as f64;
    let bias = label_bias(d);

    let s_alpha = chi_square_quantile(d, alpha)?;
    let inside = reg_gamma_lower(a, 1.5 * s_alpha)?;
    let outside = reg_gamma_upper(a, 1.5 * s_alpha)?;
    let ppv_eta = (bias * inside / alpha).min(1.0);
    let npv_eta = (1.0 - bias * outside / (1.0 - alpha)).max(0.0);

    // Φ⁻¹(1 - alpha) = -Φ⁻¹(alpha) avoids rounding 1 - alpha.
    let t_alpha = -std_normal_quantile(alpha)?;
    let scaled = 3f64.sqrt() * t_alpha;
    let ppv_f1 = (bias * std_normal_sf(scaled) / alpha).min(1.0);
    let npv_f1 = (1.0 - bias * std_normal_cdf(scaled) / (1.0 - alpha)).max(0.0);

    Ok(AnalyticCurvePoint {
        alpha,
        ppv_eta,
        npv_eta,
        ppv_f1,
        npv_f1,
        s_alpha,
        t_alpha,
    })
}

/// Closed forms of `ppv(f1, alpha)` that can be compared against data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum F1PpvForm {
    /// Inner term `(1/√3)(1 - Φ(√3 t))`; the form used by [`analytic_curves`].
    Corrected,
    /// Inner term `1 - (1/√3) Φ(√3 t)`. Its `alpha -> 1` limit is
    /// `3^(-(d-1)/2)` rather than the label bias.
    Uncorrected,
}

/// `ppv(f1, alpha)` under either closed form, unclipped.
pub fn ppv_f1_form(alpha: f64, d: u32, form: F1PpvForm) -> Result<f64> {
    check_alpha(alpha)?;
    check_d(d)?;
    let t_alpha = -std_normal_quantile(alpha)?;
    let scaled = 3f64.sqrt() * t_alpha;
    let outer = 1.0 / (alpha * 3f64.powf(0.5 * (d as f64 - 1.0)));
    let inner = match form {
        F1PpvForm::Corrected => std_normal_sf(scaled) / 3f64.sqrt(),
        F1PpvForm::Uncorrected => 1.0 - std_normal_cdf(scaled) / 3f64.sqrt(),
    };
    Ok(outer * inner)
}

/// Evaluates [`analytic_curves`] on [`uniform_alpha_grid`].
pub fn analytic_grid(d: u32, grid: usize) -> Result<Vec<AnalyticCurvePoint>> {
    uniform_alpha_grid(grid)?
        .into_iter()
        .map(|alpha| analytic_curves(alpha, d))
        .collect()
}

/// `grid` evenly spaced positive rates from `1/grid` to `(grid - 1)/grid`
/// inclusive, keeping clear of the undefined endpoints 0 and 1.
pub fn uniform_alpha_grid(grid: usize) -> Result<Vec<f64>> {
    if grid < 3 {
        return Err(Error::InvalidInput(format!("grid size {grid} must be >= 3")));
    }
    let g = grid as f64;
    let first = 1.0 / g;
    let step = (g - 2.0) / g / (g - 1.0);
    Ok((0..grid).map(|i| first + i as f64 * step).collect())
}

/// Draws `n` labeled samples: `x ~ N(0, I_d)`, `y ~ Bernoulli(exp(-|x|²))`.
///
/// For each sample the generator yields `d` normal coordinates and then one
/// uniform for the label, so the output depends only on the configuration.
pub fn sample_dataset(config: &GaussianExampleConfig) -> Result<ScoredDataset> {
    config.validate()?;
    let mut rng = SampleRng::new(config.seed);
    let mut samples = Vec::with_capacity(config.n);
    let mut x = vec![0.0; config.d as usize];
    for _ in 0..config.n {
        for xi in x.iter_mut() {
            *xi = rng.normal();
        }
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        let eta = libm::exp(-norm2);
        let positive = rng.bernoulli(eta);
        let score = match config.scorer {
            Scorer::Eta => eta,
            Scorer::F1 => x[0],
        };
        samples.push(LabeledSample { score, positive });
    }
    ScoredDataset::new(samples)
}

/// Monte Carlo estimate of a curve value with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub alpha: f64,
    pub k: usize,
    pub ppv: f64,
    pub ppv_se: f64,
    pub npv: f64,
    pub npv_se: f64,
}

/// Estimates the population curves from one large simulated sample,
/// reading the empirical curves at `k = round(alpha n_mc)`.
pub fn monte_carlo_curve_oracle(
    n_mc: usize,
    d: u32,
    scorer: Scorer,
    alpha_grid: &[f64],
    seed: u64,
) -> Result<Vec<OracleEstimate>> {
    if n_mc < 10_000 {
        return Err(Error::InvalidInput(format!("n_mc = {n_mc} must be >= 10000")));
    }
    for &alpha in alpha_grid {
        check_alpha(alpha)?;
    }
    let dataset = sample_dataset(&GaussianExampleConfig {
        d,
        scorer,
        seed,
        n: n_mc,
    })?;
    let curves = compute_curves(&dataset);
    alpha_grid
        .iter()
        .map(|&alpha| {
            let k = ((alpha * n_mc as f64).round() as usize).clamp(1, n_mc - 1);
            let p = curves.point(k)?;
            let se = |v: f64, m: usize| (v * (1.0 - v) / m as f64).sqrt();
            Ok(OracleEstimate {
                alpha,
                k,
                ppv: p.ppv_hat,
                ppv_se: se(p.ppv_hat, k),
                npv: p.npv_hat,
                npv_se: se(p.npv_hat, n_mc - k),
            })
        })
        .collect()
}
