//! Expectation values on the constraint surface `xi3 = v3 tau`.
//!
//! Each slice is a transverse plane at fixed `tau`. Integrals over it use a
//! tensor Gauss-Hermite rule whose nodes are stretched to the local spot size
//! `w(s)`, which makes polynomial-times-Gaussian integrands exact. The error
//! estimate is the change when the node count is halved.

use std::f64::consts::SQRT_2;
use std::ops::Add;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::currents::{current_analytic, current_field};
use crate::diffops::{second_derivative, FieldValue, StencilSpec};
use crate::error::{domain, Result};
use crate::lorentz::FourVector;
use crate::params::{BeamMode, BeamParameters};
use crate::potentials::{quantum_potential, scalar_potential};
use crate::quadrature::{GaussHermite, GaussLegendre};
use crate::wavefield::{beam_radius, Beam, EventCoordinates};

/// Values that can be integrated over a slice.
pub trait Integrand: FieldValue + Send + Sync {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for FourVector {
    fn zero() -> Self {
        FourVector::ZERO
    }
    fn magnitude(&self) -> f64 {
        self.max_abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxialHandling {
    PerSlice,
    Windowed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss-Hermite nodes per transverse axis.
    pub nodes: usize,
    /// Gauss-Legendre panels over the axial window.
    pub axial_panels: usize,
    /// Gauss-Legendre nodes per panel.
    pub axial_nodes: usize,
    pub axial: AxialHandling,
    /// Relative node-halving change above which a result is flagged unconverged.
    pub tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { nodes: 64, axial_panels: 8, axial_nodes: 16, axial: AxialHandling::PerSlice, tolerance: 1e-8 }
    }
}

impl QuadratureSpec {
    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn windowed(mut self) -> Self {
        self.axial = AxialHandling::Windowed;
        self
    }

    /// Smallest node count for which the halved rule still integrates the
    /// mode's polynomial factor exactly: `2 (polynomial degree) + 8`, doubled.
    pub fn required_nodes(mode: BeamMode) -> usize {
        let degree = match mode {
            BeamMode::Hg { m, n } => m.max(n) as usize,
            BeamMode::Lg { l, p } => l.unsigned_abs() as usize + 2 * p as usize,
        };
        2 * (2 * degree + 8)
    }

    fn check(&self, mode: BeamMode) -> Result<()> {
        let need = Self::required_nodes(mode);
        if self.nodes < need {
            return domain(format!("{mode} needs at least {need} Gauss-Hermite nodes, got {}", self.nodes));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationResult<T> {
    pub value: T,
    /// Magnitude of the change when the node count is halved.
    pub estimated_error: f64,
    pub slices: usize,
    pub converged: bool,
}

impl<T: Integrand> ExpectationResult<T> {
    fn from_pair(fine: T, coarse: T, tolerance: f64, slices: usize) -> Self {
        let estimated_error = (fine - coarse).magnitude();
        let converged = estimated_error <= tolerance * fine.magnitude().max(f64::MIN_POSITIVE)
            || estimated_error <= 1e-15;
        Self { value: fine, estimated_error, slices, converged }
    }
}

/// Coordinates of the slice at `tau` on the constraint surface.
pub fn slice_point(params: &BeamParameters, xi1: f64, xi2: f64, tau: f64) -> EventCoordinates {
    EventCoordinates::on_slice(params, xi1, xi2, tau)
}

fn integrate_rule<T: Integrand>(
    rule: &GaussHermite,
    params: &BeamParameters,
    tau: f64,
    f: &(impl Fn(EventCoordinates) -> T + Sync),
) -> T {
    let d0 = slice_point(params, 0.0, 0.0, tau);
    let half_width = beam_radius(params, d0.s(params.units.c)) / SQRT_2;
    let nodes = rule.nodes();
    let weights = rule.scaled_weights();
    let area = half_width * half_width;
    (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let mut row = T::zero();
            for j in 0..nodes.len() {
                let d = slice_point(params, half_width * nodes[i], half_width * nodes[j], tau);
                row = row + f(d) * (weights[i] * weights[j]);
            }
            row * area
        })
        .reduce(T::zero, |a, b| a + b)
}

/// `int int f dxi1 dxi2` over the slice at `tau`, with node-halving error.
pub fn slice_integral<T: Integrand>(
    params: &BeamParameters,
    tau: f64,
    spec: &QuadratureSpec,
    f: impl Fn(EventCoordinates) -> T + Sync,
) -> Result<ExpectationResult<T>> {
    spec.check(params.mode)?;
    let fine = integrate_rule(&GaussHermite::new(spec.nodes)?, params, tau, &f);
    let coarse = integrate_rule(&GaussHermite::new(spec.nodes / 2)?, params, tau, &f);
    Ok(ExpectationResult::from_pair(fine, coarse, spec.tolerance, 1))
}

/// `int f / int |Psi|^2` over one slice, for integrands already weighted by the field.
pub fn slice_ratio<T: Integrand>(
    beam: &Beam,
    tau: f64,
    spec: &QuadratureSpec,
    f: impl Fn(EventCoordinates) -> T + Sync,
) -> Result<ExpectationResult<T>> {
    spec.check(beam.params.mode)?;
    let p = &beam.params;
    let norm = |rule: &GaussHermite| integrate_rule(rule, p, tau, &|d| beam.density(d));
    let fine_rule = GaussHermite::new(spec.nodes)?;
    let coarse_rule = GaussHermite::new(spec.nodes / 2)?;
    let fine = integrate_rule(&fine_rule, p, tau, &f) * (1.0 / norm(&fine_rule));
    let coarse = integrate_rule(&coarse_rule, p, tau, &f) * (1.0 / norm(&coarse_rule));
    Ok(ExpectationResult::from_pair(fine, coarse, spec.tolerance, 1))
}

/// `<O>` on one slice: `int O |Psi|^2 / int |Psi|^2` for a pointwise observable.
pub fn slice_expectation<T: Integrand>(
    beam: &Beam,
    tau: f64,
    spec: &QuadratureSpec,
    observable: impl Fn(EventCoordinates) -> T + Sync,
) -> Result<ExpectationResult<T>> {
    slice_ratio(beam, tau, spec, |d| observable(d) * beam.density(d))
}

/// `int int |Psi|^2` over one slice; `1 / L` for a normalized mode.
pub fn slice_norm(beam: &Beam, tau: f64, spec: &QuadratureSpec) -> Result<ExpectationResult<f64>> {
    slice_integral(&beam.params, tau, spec, |d| beam.density(d))
}

/// `tau` of the slice whose axial coordinate is `s = (v3 + c) tau`.
pub fn tau_for_s(params: &BeamParameters, s: f64) -> f64 {
    s / (params.v3 + params.units.c)
}

/// Windowed normalization `int_{-T}^{T} (int int |Psi|^2) |v3| dtau` with `T = L / (2 |v3|)`.
pub fn normalization_check(beam: &Beam, spec: &QuadratureSpec) -> Result<ExpectationResult<f64>> {
    let p = &beam.params;
    if p.v3 == 0.0 {
        return domain("windowed normalization needs a nonzero axial velocity (k3 != 0)");
    }
    spec.check(p.mode)?;
    let v3 = p.v3.abs();
    let half = p.length / (2.0 * v3);
    let gl = GaussLegendre::new(spec.axial_nodes)?;
    let fine_rule = GaussHermite::new(spec.nodes)?;
    let coarse_rule = GaussHermite::new(spec.nodes / 2)?;
    let window = |rule: &GaussHermite| {
        gl.integrate(-half, half, spec.axial_panels, |tau| v3 * integrate_rule(rule, p, tau, &|d| beam.density(d)))
    };
    let slices = spec.axial_panels * spec.axial_nodes;
    Ok(ExpectationResult::from_pair(window(&fine_rule), window(&coarse_rule), spec.tolerance, slices))
}

fn uses_closed_form(beam: &Beam) -> bool {
    beam.params.mode.is_hg() && beam.is_exact() && beam.params.m0 > 0.0
}

/// `<m0 j_mu>` on one slice. Closed-form current for exact HG beams, finite differences otherwise.
pub fn current_expectation(beam: &Beam, tau: f64, spec: &QuadratureSpec) -> Result<ExpectationResult<FourVector>> {
    let p = beam.params;
    let stencil = StencilSpec::for_params(&p);
    // surface errors (massless, LG closed form) before the parallel map
    current_field(beam, EventCoordinates::default(), &stencil)?;
    let closed = uses_closed_form(beam);
    slice_ratio(beam, tau, spec, |d| {
        let j = if closed {
            current_analytic(&p, d).expect("HG with mass").j
        } else {
            current_field(beam, d, &stencil).expect("mass checked").j
        };
        j * p.m0
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialExpectation {
    pub u: ExpectationResult<FourVector>,
    pub v2: ExpectationResult<f64>,
    /// `2 hbar^2 N / w^2` at the slice.
    pub v2_expected: f64,
}

/// `<U_mu>` and `<V^2>` on one slice of an HG beam.
pub fn potential_expectation(params: &BeamParameters, tau: f64, spec: &QuadratureSpec) -> Result<PotentialExpectation> {
    quantum_potential(params, EventCoordinates::default())?;
    let beam = Beam::new(*params);
    let u = slice_expectation(&beam, tau, spec, |d| quantum_potential(params, d).expect("checked"))?;
    let v2 = slice_expectation(&beam, tau, spec, |d| scalar_potential(params, d).expect("checked"))?;
    let w = beam_radius(params, slice_point(params, 0.0, 0.0, tau).s(params.units.c));
    let hbar = params.units.hbar;
    Ok(PotentialExpectation { u, v2, v2_expected: 2.0 * hbar * hbar * params.mode_constant / (w * w) })
}

/// `Re <p1^2 + p2^2>` on one slice, with second derivatives by finite differences.
pub fn transverse_kinetic_expectation(params: &BeamParameters, tau: f64, spec: &QuadratureSpec) -> Result<ExpectationResult<f64>> {
    let beam = Beam::new(*params);
    let stencil = StencilSpec::for_params(params);
    let hbar = params.units.hbar;
    slice_ratio(&beam, tau, spec, |d| {
        let psi = beam.psi(d);
        let lap: Complex64 = (0..2)
            .map(|axis| second_derivative(|h| beam.psi(d.shifted(axis, h)), stencil.steps[axis], &stencil))
            .fold(Complex64::new(0.0, 0.0), Add::add);
        -hbar * hbar * (psi.conj() * lap).re
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeEnergy {
    /// `c sqrt(hbar^2 k3^2 + 2 hbar^2 N / w0^2 + m0^2 c^2)`.
    pub e_mode: f64,
    /// `c sqrt(hbar^2 k3^2 + m0^2 c^2)`.
    pub e_free: f64,
    /// `E_mode^2 - E_free^2 = c^2 hbar^2 K_T`.
    pub transverse_term: f64,
}

pub fn mode_energy(params: &BeamParameters) -> ModeEnergy {
    let hbar = params.units.hbar;
    let c = params.units.c;
    let p3 = hbar * params.k3;
    let rest = params.m0 * c;
    let fluct = 2.0 * hbar * hbar * params.mode_constant / (params.w0 * params.w0);
    let e_mode = c * (p3 * p3 + fluct + rest * rest).sqrt();
    let e_free = c * (p3 * p3 + rest * rest).sqrt();
    ModeEnergy { e_mode, e_free, transverse_term: c * c * fluct }
}
