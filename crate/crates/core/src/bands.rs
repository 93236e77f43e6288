//! Finite-sample confidence bands for the empirical predictive value curves.
//!
//! Each band half-width is a deviation term plus a bias term:
//!
//! * bias (both modes): `n / (2m) * sqrt(pi / (2(n - 1)))`
//! * fixed scorer: `(1/m) * sqrt(n ln(4n/delta) / 2)`
//! * uniform over a class: `(1/m) * sqrt(2n ln(8n theta^2 / delta))`
//!
//! where `m = k` on the ppv side and `m = n - k` on the npv side, and `theta`
//! is the order coefficient of the class at `k` (ppv) or `n - k` (npv). When
//! only a VC-subgraph dimension `d` is known, `theta` is replaced by the
//! Sauer-Shelah count `sum_{i <= d} C(n, i)` for every `k`.
//!
//! Logarithms are natural. `theta` is carried as a big integer and only its
//! logarithm enters floating point.

use std::f64::consts::{E, LN_2, PI};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::curves::EmpiricalCurves;
use crate::error::{check_index, Error, Result};

/// Which predictive value a bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Ppv,
    Npv,
}

impl Side {
    /// Number of samples on this side of the split at index `k`.
    fn count(self, n: usize, k: usize) -> usize {
        match self {
            Side::Ppv => k,
            Side::Npv => n - k,
        }
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InsufficientData { required: 2, got: n });
    }
    check_index("k", k, 1, n - 1)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::range("delta", delta, "(0, 1)"));
    }
    Ok(())
}

/// Bound on the bias of the empirical estimator at index `k`.
pub fn bias_bound(n: usize, k: usize, side: Side) -> Result<f64> {
    check_nk(n, k)?;
    Ok(bias_term(n, side.count(n, k)))
}

fn bias_term(n: usize, m: usize) -> f64 {
    let n = n as f64;
    n / (2.0 * m as f64) * (PI / (2.0 * (n - 1.0))).sqrt()
}

/// Deviation half-width for a fixed scoring function (bias excluded).
pub fn deviation_halfwidth_fixed(n: usize, k: usize, delta: f64, side: Side) -> Result<f64> {
    check_nk(n, k)?;
    check_delta(delta)?;
    Ok(fixed_deviation(n, side.count(n, k), delta))
}

/// `(1/m) sqrt(n ln(4n/delta) / 2)` without range checks.
pub(crate) fn fixed_deviation(n: usize, m: usize, delta: f64) -> f64 {
    let n = n as f64;
    (n * (4.0 * n / delta).ln() / 2.0).sqrt() / m as f64
}

/// Deviation half-width uniform over a class with order coefficient bound
/// `theta` (bias excluded). Pass `Θ(F, n, k)` for [`Side::Ppv`] and
/// `Θ(F, n, n - k)` for [`Side::Npv`].
pub fn deviation_halfwidth_uniform(
    n: usize,
    k: usize,
    delta: f64,
    theta: &BigUint,
    side: Side,
) -> Result<f64> {
    check_nk(n, k)?;
    check_delta(delta)?;
    if theta.is_zero() {
        return Err(Error::range("theta", theta, "[1, inf)"));
    }
    Ok(uniform_deviation(n, side.count(n, k), delta, ln_biguint(theta)))
}

fn uniform_deviation(n: usize, m: usize, delta: f64, ln_theta: f64) -> f64 {
    let n = n as f64;
    let log_arg = (8.0 * n / delta).ln() + 2.0 * ln_theta;
    (2.0 * n * log_arg).sqrt() / m as f64
}

/// Natural logarithm of a positive big integer without converting the whole
/// value to `f64`.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map_or(f64::INFINITY, f64::ln);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * LN_2
}

/// Sauer-Shelah growth bounds for VC-subgraph dimension `d` on `n` points.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthBound {
    /// `sum_{i=0..d} C(n, i)`, exact.
    pub exact: BigUint,
    /// `(e n / d)^d` in floating point (may be `inf` for large `d`).
    pub closed_form: f64,
}

impl GrowthBound {
    pub fn ln_exact(&self) -> f64 {
        ln_biguint(&self.exact)
    }

    pub fn ln_closed_form(&self, n: usize, d: usize) -> f64 {
        d as f64 * (1.0 + (n as f64 / d as f64).ln())
    }
}

pub fn growth_bound(n: usize, d: usize) -> Result<GrowthBound> {
    if n == 0 {
        return Err(Error::range("n", n, "[1, inf)"));
    }
    check_index("d", d, 1, n)?;
    let mut term = BigUint::one();
    let mut exact = BigUint::one();
    for i in 1..=d {
        // C(n, i) = C(n, i-1) * (n - i + 1) / i, exact at every step.
        term = term * BigUint::from(n - i + 1) / BigUint::from(i);
        exact += &term;
    }
    let closed_form = (E * n as f64 / d as f64).powf(d as f64);
    Ok(GrowthBound { exact, closed_form })
}

/// Order-coefficient bound when only a VC-subgraph dimension is known:
/// `min(sum_{i <= d} C(n, i), 2^n)`.
pub fn theta_surrogate(n: usize, d: usize) -> Result<BigUint> {
    let sum = growth_bound(n, d)?.exact;
    let full = BigUint::one() << n;
    Ok(sum.min(full))
}

/// Per-`k` order coefficients `Θ(F, n, k)` for `k = 1..n-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaTable {
    values: Vec<BigUint>,
}

impl ThetaTable {
    /// `values[k - 1]` is `Θ(F, n, k)`.
    pub fn new(values: Vec<BigUint>) -> Result<Self> {
        if let Some(pos) = values.iter().position(Zero::is_zero) {
            return Err(Error::Config(format!("theta for k = {} is zero", pos + 1)));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, k: usize) -> Option<&BigUint> {
        k.checked_sub(1).and_then(|i| self.values.get(i))
    }
}

/// Complexity input for the uniform band.
#[derive(Debug, Clone, PartialEq)]
pub enum Complexity {
    /// VC-subgraph dimension of the class.
    VcDimension(usize),
    /// Explicit order coefficients.
    Theta(ThetaTable),
}

#[derive(Debug, Clone, PartialEq)]
pub enum BandMode {
    Fixed,
    Uniform(Complexity),
}

impl BandMode {
    pub fn name(&self) -> &'static str {
        match self {
            BandMode::Fixed => "fixed",
            BandMode::Uniform(_) => "uniform",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandConfig {
    pub delta: f64,
    pub mode: BandMode,
}

impl BandConfig {
    pub fn fixed(delta: f64) -> Self {
        Self {
            delta,
            mode: BandMode::Fixed,
        }
    }

    pub fn uniform_vc(delta: f64, d: usize) -> Self {
        Self {
            delta,
            mode: BandMode::Uniform(Complexity::VcDimension(d)),
        }
    }

    pub fn uniform_theta(delta: f64, table: ThetaTable) -> Self {
        Self {
            delta,
            mode: BandMode::Uniform(Complexity::Theta(table)),
        }
    }

    /// Checks the configuration against a sample of size `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        check_delta(self.delta).map_err(|e| Error::Config(e.to_string()))?;
        match &self.mode {
            BandMode::Fixed => Ok(()),
            BandMode::Uniform(Complexity::VcDimension(d)) => {
                if *d == 0 || *d > n {
                    return Err(Error::Config(format!("VC dimension {d} outside [1, {n}]")));
                }
                Ok(())
            }
            BandMode::Uniform(Complexity::Theta(table)) => {
                if table.len() != n - 1 {
                    return Err(Error::Config(format!(
                        "theta table has {} entries, expected {} (k = 1..n-1)",
                        table.len(),
                        n - 1
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Band values at one threshold index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandRow {
    pub k: usize,
    pub alpha: f64,
    pub ppv_hat: f64,
    pub ppv_lo: f64,
    pub ppv_hi: f64,
    pub npv_hat: f64,
    pub npv_lo: f64,
    pub npv_hi: f64,
    /// Unclipped terms.
    pub ppv_deviation: f64,
    pub ppv_bias: f64,
    pub npv_deviation: f64,
    pub npv_bias: f64,
}

impl BandRow {
    pub fn ppv_halfwidth(&self) -> f64 {
        self.ppv_deviation + self.ppv_bias
    }

    pub fn npv_halfwidth(&self) -> f64 {
        self.npv_deviation + self.npv_bias
    }

    pub fn ppv_contains(&self, value: f64) -> bool {
        self.ppv_lo <= value && value <= self.ppv_hi
    }

    pub fn npv_contains(&self, value: f64) -> bool {
        self.npv_lo <= value && value <= self.npv_hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceBand {
    pub n: usize,
    pub delta: f64,
    pub mode: BandMode,
    pub rows: Vec<BandRow>,
}

impl ConfidenceBand {
    pub fn row(&self, k: usize) -> Result<&BandRow> {
        check_index("k", k, 1, self.n - 1)?;
        Ok(&self.rows[k - 1])
    }

    /// Rows with `c n <= k <= (1 - c) n`.
    pub fn trimmed(&self, c: f64) -> Result<Vec<BandRow>> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::range("c", c, "(0, 1)"));
        }
        let n = self.n as f64;
        Ok(self
            .rows
            .iter()
            .filter(|r| {
                let k = r.k as f64;
                c * n <= k && k <= (1.0 - c) * n
            })
            .copied()
            .collect())
    }
}

fn clip(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Assembles the clipped band around `curves`.
pub fn build_band(curves: &EmpiricalCurves, config: &BandConfig) -> Result<ConfidenceBand> {
    let n = curves.n();
    config.validate(n)?;
    let delta = config.delta;

    // ln(theta) per k, or None in fixed mode.
    let ln_theta: Option<Vec<f64>> = match &config.mode {
        BandMode::Fixed => None,
        BandMode::Uniform(Complexity::VcDimension(d)) => {
            let ln = ln_biguint(&theta_surrogate(n, *d)?);
            Some(vec![ln; n - 1])
        }
        BandMode::Uniform(Complexity::Theta(table)) => {
            Some(table.values.iter().map(ln_biguint).collect())
        }
    };

    let rows = curves
        .points()
        .iter()
        .map(|p| {
            let k = p.k;
            let (ppv_deviation, npv_deviation) = match &ln_theta {
                None => (fixed_deviation(n, k, delta), fixed_deviation(n, n - k, delta)),
                Some(ln) => (
                    uniform_deviation(n, k, delta, ln[k - 1]),
                    uniform_deviation(n, n - k, delta, ln[n - k - 1]),
                ),
            };
            let ppv_bias = bias_term(n, k);
            let npv_bias = bias_term(n, n - k);
            let ppv_hw = ppv_deviation + ppv_bias;
            let npv_hw = npv_deviation + npv_bias;
            BandRow {
                k,
                alpha: p.alpha,
                ppv_hat: p.ppv_hat,
                ppv_lo: clip(p.ppv_hat - ppv_hw),
                ppv_hi: clip(p.ppv_hat + ppv_hw),
                npv_hat: p.npv_hat,
                npv_lo: clip(p.npv_hat - npv_hw),
                npv_hi: clip(p.npv_hat + npv_hw),
                ppv_deviation,
                ppv_bias,
                npv_deviation,
                npv_bias,
            }
        })
        .collect();

    Ok(ConfidenceBand {
        n,
        delta,
        mode: config.mode.clone(),
        rows,
    })
}
