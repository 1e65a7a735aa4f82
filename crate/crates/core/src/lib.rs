//! Exact localized beam solutions of the Klein-Gordon equation.
//!
//! The crate evaluates Hermite-Gaussian and Laguerre-Gaussian beam modes of a
//! massive scalar particle in closed form, together with their particle
//! 4-current, the split of canonical 4-momentum into a kinetic part and a
//! quantum 4-potential, the scalar potential built from it, and the Bohm
//! potential of the non-relativistic limit. Every closed-form statement is
//! paired with an independent numerical route: finite differences in
//! [`diffops`] and Gauss-Hermite slice quadrature in [`expectation`].
//!
//! Conventions: components are stored in `(1, 2, 3, 4)` order with index 4
//! time-like, contractions use `a4 b4 - a1 b1 - a2 b2 - a3 b3`, and natural
//! units `hbar = c = 1` are the default.

pub mod currents;
pub mod diffops;
pub mod error;
pub mod expectation;
pub mod lorentz;
pub mod params;
pub mod potentials;
pub mod quadrature;
pub mod specfn;
pub mod wavefield;

#[cfg(test)]
mod testutil;

pub use error::{BeamError, Result};
pub use lorentz::{boost_coordinates, boost_event, boost_wavevector, contraction, FourVector};
pub use params::{derive_parameters, solve_dispersion, BeamMode, BeamParameters, UnitSystem};
pub use wavefield::{Beam, Event, EventCoordinates, Perturbation};

pub use num_complex::Complex64;
