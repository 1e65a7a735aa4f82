//! Four-vectors and the axial Lorentz boosts of coordinates and wavevectors.

use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{domain, Result};
use crate::params::UnitSystem;
use crate::wavefield::Event;

/// Four real components in `(1, 2, 3, 4)` order, component 4 time-like.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourVector {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl FourVector {
    pub const ZERO: FourVector = FourVector { c1: 0.0, c2: 0.0, c3: 0.0, c4: 0.0 };

    pub const fn new(c1: f64, c2: f64, c3: f64, c4: f64) -> Self {
        Self { c1, c2, c3, c4 }
    }

    /// Wavevector `(0, 0, k3, k4)`.
    pub const fn axial(k3: f64, k4: f64) -> Self {
        Self::new(0.0, 0.0, k3, k4)
    }

    pub fn components(&self) -> [f64; 4] {
        [self.c1, self.c2, self.c3, self.c4]
    }

    pub fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(f(self.c1), f(self.c2), f(self.c3), f(self.c4))
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.components().iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn norm_sqr(self) -> f64 {
        contraction(self, self)
    }
}

impl Index<usize> for FourVector {
    type Output = f64;

    /// Zero-based: `v[0]` is component 1, `v[3]` is the time-like component.
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.c1,
            1 => &self.c2,
            2 => &self.c3,
            3 => &self.c4,
            _ => panic!("four-vector index {i} out of range"),
        }
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector::new(self.c1 + o.c1, self.c2 + o.c2, self.c3 + o.c3, self.c4 + o.c4)
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector::new(self.c1 - o.c1, self.c2 - o.c2, self.c3 - o.c3, self.c4 - o.c4)
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        self.map(|v| -v)
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        self.map(|v| v * s)
    }
}

impl Mul<FourVector> for f64 {
    type Output = FourVector;
    fn mul(self, v: FourVector) -> FourVector {
        v * self
    }
}

/// `a4 b4 - a1 b1 - a2 b2 - a3 b3`.
pub fn contraction(a: FourVector, b: FourVector) -> f64 {
    a.c4 * b.c4 - a.c1 * b.c1 - a.c2 * b.c2 - a.c3 * b.c3
}

fn lorentz_gamma(beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta.abs() < 1.0) {
        return domain(format!("boost requires |beta| < 1, got {beta}"));
    }
    Ok(1.0 / (1.0 - beta * beta).sqrt())
}

/// Boost along the beam axis: `x3' = gamma (x3 - beta c tau)`,
/// `tau' = gamma (tau - beta x3 / c)`.
pub fn boost_coordinates(x3: f64, tau: f64, beta: f64, units: UnitSystem) -> Result<(f64, f64)> {
    let gamma = lorentz_gamma(beta)?;
    let c = units.c;
    Ok((gamma * (x3 - beta * c * tau), gamma * (tau - beta * x3 / c)))
}

/// `k3' = gamma (k3 - beta k4)`, `k4' = gamma (k4 - beta k3)`.
pub fn boost_wavevector(k3: f64, k4: f64, beta: f64) -> Result<(f64, f64)> {
    let gamma = lorentz_gamma(beta)?;
    Ok((gamma * (k3 - beta * k4), gamma * (k4 - beta * k3)))
}

/// Boost of a whole event; transverse coordinates are unchanged.
pub fn boost_event(e: Event, beta: f64, units: UnitSystem) -> Result<Event> {
    let (x3, t) = boost_coordinates(e.x3, e.t, beta, units)?;
    Ok(Event { x1: e.x1, x2: e.x2, x3, t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn contraction_signature() {
        let t = FourVector::new(0.0, 0.0, 0.0, 1.0);
        let x = FourVector::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(contraction(t, t), 1.0);
        assert_eq!(contraction(x, x), -1.0);
        assert_eq!(FourVector::axial(1.0, 2.0).norm_sqr(), 3.0);
    }

    #[test]
    fn boost_examples() {
        let u = UnitSystem::natural();
        assert_eq!(boost_coordinates(1.0, 0.0, 0.0, u).unwrap(), (1.0, 0.0));
        let gamma = 1.0 / 0.75f64.sqrt();
        let (x, t) = boost_coordinates(0.0, 1.0, 0.5, u).unwrap();
        assert_relative_eq!(x, -0.5 * gamma, epsilon = 1e-15);
        assert_relative_eq!(t, gamma, epsilon = 1e-15);
        assert_relative_eq!(gamma, 1.1547005, epsilon = 1e-7);
        let (x0, t0) = boost_coordinates(x, t, -0.5, u).unwrap();
        assert!(x0.abs() < 1e-15 && (t0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wavevector_comoving_frame() {
        let (k3, k4) = boost_wavevector(1.0, 2.0, 0.5).unwrap();
        assert_eq!(k3, 0.0);
        assert_relative_eq!(k4, 3f64.sqrt(), epsilon = 1e-15);
        assert_eq!(boost_wavevector(1.3, 2.7, 0.0).unwrap(), (1.3, 2.7));
    }

    #[test]
    fn superluminal_boost_rejected() {
        let u = UnitSystem::natural();
        assert!(boost_coordinates(0.0, 0.0, 1.0, u).is_err());
        assert!(boost_wavevector(1.0, 2.0, -1.5).is_err());
        assert!(boost_wavevector(1.0, 2.0, f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn interval_invariant(x in -10.0f64..10.0, t in -10.0f64..10.0, beta in -0.95f64..0.95, c in 0.5f64..5.0) {
            let u = UnitSystem::new(1.0, c).unwrap();
            let (xp, tp) = boost_coordinates(x, t, beta, u).unwrap();
            let before = x * x - c * c * t * t;
            let after = xp * xp - c * c * tp * tp;
            prop_assert!((before - after).abs() < 1e-11 * (x * x + c * c * t * t).max(1.0));
        }

        #[test]
        fn wavevector_invariant_and_roundtrip(k3 in -5.0f64..5.0, dk in 0.01f64..5.0, beta in -0.95f64..0.95) {
            let k4 = k3.abs() + dk;
            let (a, b) = boost_wavevector(k3, k4, beta).unwrap();
            prop_assert!(((b * b - a * a) - (k4 * k4 - k3 * k3)).abs() < 1e-12 * (a * a + b * b));
            let (k3r, k4r) = boost_wavevector(a, b, -beta).unwrap();
            prop_assert!((k3r - k3).abs() < 1e-12 * k4 && (k4r - k4).abs() < 1e-12 * k4);
        }
    }
}
