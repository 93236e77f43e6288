//! Special functions for the Gaussian example: log-gamma, the regularized
//! incomplete gamma functions, the standard normal cdf and quantile, and the
//! chi-square quantile.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

const MAX_ITER: usize = 1000;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Γ(x) Γ(1 - x) = π / sin(πx).
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}

fn check_gamma_args(a: f64, x: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("incomplete gamma shape a = {a} must be positive")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("incomplete gamma argument x = {x} must be >= 0")));
    }
    Ok(())
}

/// Returns `(P(a, x), Q(a, x))`. The smaller of the two is computed directly
/// (series below `a + 1`, continued fraction above) and the other as its
/// complement.
fn reg_gamma_pair(a: f64, x: f64) -> Result<(f64, f64)> {
    check_gamma_args(a, x)?;
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x.is_infinite() {
        return Ok((1.0, 0.0));
    }
    let log_prefactor = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let p = (log_prefactor + series_sum(a, x)?.ln()).exp();
        Ok((p, 1.0 - p))
    } else {
        let q = (log_prefactor - continued_fraction(a, x)?.ln()).exp();
        Ok((1.0 - q, q))
    }
}

/// `sum_{n>=0} x^n / (a (a+1) ... (a+n))`.
fn series_sum(a: f64, x: f64) -> Result<f64> {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * f64::EPSILON {
            return Ok(sum);
        }
    }
    Err(Error::Convergence("incomplete gamma series"))
}

/// Modified Lentz evaluation of
/// `x + 1 - a - 1(1-a)/(x + 3 - a - 2(2-a)/(x + 5 - a - ...))`,
/// the reciprocal of `Q(a, x)` up to the prefactor.
fn continued_fraction(a: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            return Ok(1.0 / h);
        }
    }
    Err(Error::Convergence("incomplete gamma continued fraction"))
}

/// Regularized lower incomplete gamma `P(a, x) = γ(a, x) / Γ(a)`.
pub fn reg_gamma_lower(a: f64, x: f64) -> Result<f64> {
    reg_gamma_pair(a, x).map(|(p, _)| p)
}

/// Regularized upper incomplete gamma `Q(a, x) = Γ(a, x) / Γ(a)`.
pub fn reg_gamma_upper(a: f64, x: f64) -> Result<f64> {
    reg_gamma_pair(a, x).map(|(_, q)| q)
}

/// Standard normal cdf `Φ(z)`, via `Φ(-|z|) = Q(1/2, z²/2) / 2`.
pub fn std_normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    let tail = half_tail(z);
    if z < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// Upper tail `1 - Φ(z)`, accurate in relative terms for large `z`.
pub fn std_normal_sf(z: f64) -> f64 {
    std_normal_cdf(-z)
}

/// `Φ(-|z|)`.
fn half_tail(z: f64) -> f64 {
    // a = 1/2 and x = z²/2 are always in the domain.
    0.5 * reg_gamma_upper(0.5, 0.5 * z * z).unwrap_or(0.0)
}

pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

// Acklam's rational approximation to the normal quantile (relative error
// about 1.2e-9), refined below by one Halley step.
#[allow(clippy::excessive_precision)]
const ACKLAM_A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const ACKLAM_B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const ACKLAM_C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const ACKLAM_D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];

fn acklam(p: f64) -> f64 {
    const P_LOW: f64 = 0.02425;
    let (a, b, c, d) = (&ACKLAM_A, &ACKLAM_B, &ACKLAM_C, &ACKLAM_D);
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
            / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
    }
}

/// Standard normal quantile `Φ⁻¹(p)` for `0 < p < 1`.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("normal quantile needs 0 < p < 1, got {p}")));
    }
    if p > 0.5 {
        // 1 - p is exact for p in [0.5, 1].
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

/// Quantile for `p <= 0.5`, where `Φ` is evaluated without cancellation.
fn lower_quantile(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let x = acklam(p);
    let e = std_normal_cdf(x) - p;
    let u = e / std_normal_pdf(x);
    x - u / (1.0 + 0.5 * x * u)
}

/// Chi-square cdf with `d` degrees of freedom.
pub fn chi_square_cdf(d: u32, s: f64) -> Result<f64> {
    reg_gamma_lower(0.5 * d as f64, 0.5 * s.max(0.0))
}

fn chi_square_pdf(d: u32, s: f64) -> f64 {
    let a = 0.5 * d as f64;
    if s <= 0.0 {
        return 0.0;
    }
    ((a - 1.0) * (0.5 * s).ln() - 0.5 * s - ln_gamma(a) - LN_2).exp()
}

/// `s` with `P{χ²_d <= s} = p`, by safeguarded Newton iteration on the
/// regularized incomplete gamma function. The lower or upper function is
/// inverted depending on which side of the median `p` falls, so tail
/// quantiles do not suffer from cancellation.
pub fn chi_square_quantile(d: u32, p: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::Domain("chi-square degrees of freedom must be >= 1".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("chi-square quantile needs 0 < p < 1, got {p}")));
    }
    let a = 0.5 * d as f64;
    let upper = p > 0.5;
    let target = if upper { 1.0 - p } else { p };
    // Increasing in s, zero at the quantile.
    let residual = |s: f64| -> Result<f64> {
        let (lower_p, upper_q) = reg_gamma_pair(a, 0.5 * s)?;
        Ok(if upper { target - upper_q } else { lower_p - target })
    };

    let mut lo = 0.0;
    let mut hi = d as f64;
    while residual(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Convergence("chi-square quantile bracketing"));
        }
    }

    let mut s = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        let r = residual(s)?;
        if r == 0.0 {
            return Ok(s);
        }
        if r < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let slope = chi_square_pdf(d, s);
        let newton = s - r / slope;
        let next = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - s).abs() <= 4.0 * f64::EPSILON * s || hi - lo <= f64::EPSILON * hi {
            return Ok(next);
        }
        s = next;
    }
    Err(Error::Convergence("chi-square quantile"))
}
