//! Hermite and generalized Laguerre polynomials, and Gaussian moment integrals.

use std::f64::consts::PI;

use crate::error::{domain, BeamError, Result};

/// Largest polynomial degree accepted by the recurrences.
pub const MAX_DEGREE: u32 = 64;

/// A polynomial evaluated at a point, tagged with its degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolynomialValue {
    pub value: f64,
    pub degree: u32,
}

fn check_degree(degree: u32) -> Result<()> {
    if degree > MAX_DEGREE {
        return Err(BeamError::UnsupportedDegree { degree, max: MAX_DEGREE });
    }
    Ok(())
}

/// Physicists' Hermite polynomial `H_m(x)`.
pub fn hermite(m: u32, x: f64) -> Result<f64> {
    check_degree(m)?;
    Ok(hermite_unchecked(m, x))
}

pub(crate) fn hermite_unchecked(m: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if m == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..m {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn hermite_value(m: u32, x: f64) -> Result<PolynomialValue> {
    Ok(PolynomialValue { value: hermite(m, x)?, degree: m })
}

/// Generalized Laguerre polynomial `L_p^a(x)`.
pub fn laguerre(p: u32, a: u32, x: f64) -> Result<f64> {
    check_degree(p)?;
    Ok(laguerre_unchecked(p, a, x))
}

pub(crate) fn laguerre_unchecked(p: u32, a: u32, x: f64) -> f64 {
    let a = a as f64;
    let mut prev = 1.0;
    if p == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..p {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

pub fn laguerre_value(p: u32, a: u32, x: f64) -> Result<PolynomialValue> {
    Ok(PolynomialValue { value: laguerre(p, a, x)?, degree: p })
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Moments `int x^power H_m(sqrt(alpha) x)^2 exp(-alpha x^2) dx` for `power` in `{0, 1, 2}`.
///
/// Uses the standard norm `2^m m! sqrt(pi / alpha)`; the second moment is
/// `2^m m! sqrt(pi / alpha^3) (m + 1/2)`.
pub fn gaussian_moment(m: u32, alpha: f64, power: u32) -> Result<f64> {
    check_degree(m)?;
    if !(alpha.is_finite() && alpha > 0.0) {
        return domain(format!("Gaussian exponent must be positive, got {alpha}"));
    }
    let norm = 2f64.powi(m as i32) * factorial(m);
    match power {
        0 => Ok(norm * (PI / alpha).sqrt()),
        1 => Ok(0.0),
        2 => Ok(norm * (PI / alpha.powi(3)).sqrt() * (m as f64 + 0.5)),
        _ => domain(format!("moment power must be 0, 1 or 2, got {power}")),
    }
}
