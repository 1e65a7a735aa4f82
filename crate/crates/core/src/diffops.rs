//! Finite-difference checks of the operator identities satisfied by the beam modes.
//!
//! All derivatives are central differences of order 2 or 4 with an optional
//! Richardson step. Residuals are reported relative to a local scale built from
//! the magnitudes of the individual terms, so an exact solution gives a small
//! number independent of where the point sits in the beam.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::error::{domain, BeamError, Result};
use crate::params::BeamParameters;
use crate::potentials::bohm_potential;
use crate::wavefield::{beam_radius, schrodinger_form, Beam, Event, EventCoordinates};

/// Values that finite differences can combine.
pub trait FieldValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>> FieldValue for T {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilOrder {
    Second,
    Fourth,
}

impl StencilOrder {
    fn exponent(self) -> i32 {
        match self {
            StencilOrder::Second => 2,
            StencilOrder::Fourth => 4,
        }
    }
}

/// Step per axis (`x1, x2, x3` in length, `t` in time), order and Richardson flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilSpec {
    pub steps: [f64; 4],
    pub order: StencilOrder,
    pub richardson: bool,
}

impl StencilSpec {
    /// Default stencil: `h = 1e-3 min(w0, 2b, 1/k4)`, time step `h / c`,
    /// second order with one Richardson level.
    pub fn for_params(params: &BeamParameters) -> Self {
        Self::with_relative_step(params, 1e-3)
    }

    pub fn with_relative_step(params: &BeamParameters, fraction: f64) -> Self {
        let h = fraction * params.length_scale();
        Self { steps: [h, h, h, h / params.units.c], order: StencilOrder::Second, richardson: true }
    }

    pub fn with_order(mut self, order: StencilOrder) -> Self {
        self.order = order;
        self
    }

    pub fn with_richardson(mut self, richardson: bool) -> Self {
        self.richardson = richardson;
        self
    }

    /// All steps multiplied by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        for s in &mut self.steps {
            *s *= factor;
        }
        self
    }

    /// Rejects non-positive or non-finite steps.
    pub fn validate(&self, _params: &BeamParameters) -> Result<()> {
        if self.steps.iter().all(|s| s.is_finite() && *s > 0.0) {
            Ok(())
        } else {
            domain(format!("stencil steps must be positive and finite, got {:?}", self.steps))
        }
    }

    /// Whether every step is small against the beam length scales
    /// (at most 5% of `min(w0, 2b, 1/k4)`, and of that over `c` in time).
    pub fn is_fine(&self, params: &BeamParameters) -> bool {
        let limit = 0.05 * params.length_scale();
        self.steps[..3].iter().all(|&s| s <= limit) && self.steps[3] <= limit / params.units.c
    }
}

fn first_raw<T: FieldValue>(f: &impl Fn(f64) -> T, h: f64, order: StencilOrder) -> T {
    match order {
        StencilOrder::Second => (f(h) - f(-h)) * (0.5 / h),
        StencilOrder::Fourth => ((f(-2.0 * h) - f(2.0 * h)) + (f(h) - f(-h)) * 8.0) * (1.0 / (12.0 * h)),
    }
}

fn second_raw<T: FieldValue>(f: &impl Fn(f64) -> T, h: f64, order: StencilOrder) -> T {
    let f0 = f(0.0);
    match order {
        StencilOrder::Second => (f(h) + f(-h) - f0 * 2.0) * (1.0 / (h * h)),
        StencilOrder::Fourth => {
            ((f(h) + f(-h)) * 16.0 - (f(2.0 * h) + f(-2.0 * h)) - f0 * 30.0) * (1.0 / (12.0 * h * h))
        }
    }
}

fn richardson<T: FieldValue>(coarse: T, fine: T, order: StencilOrder) -> T {
    let r = 2f64.powi(order.exponent());
    (fine * r - coarse) * (1.0 / (r - 1.0))
}

/// `f'(0)` of a one-dimensional slice `f(h)`.
pub fn derivative<T: FieldValue>(f: impl Fn(f64) -> T, h: f64, stencil: &StencilSpec) -> T {
    let coarse = first_raw(&f, h, stencil.order);
    if !stencil.richardson {
        return coarse;
    }
    richardson(coarse, first_raw(&f, 0.5 * h, stencil.order), stencil.order)
}

/// `f''(0)` of a one-dimensional slice `f(h)`.
pub fn second_derivative<T: FieldValue>(f: impl Fn(f64) -> T, h: f64, stencil: &StencilSpec) -> T {
    let coarse = second_raw(&f, h, stencil.order);
    if !stencil.richardson {
        return coarse;
    }
    richardson(coarse, second_raw(&f, 0.5 * h, stencil.order), stencil.order)
}

/// Worst-case residual over a set of points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub max_abs: f64,
    /// Largest `|residual| / scale` over the checked points.
    pub max_rel: f64,
    pub points_checked: usize,
    /// Points dropped because the field is too small there for a relative measure.
    pub points_skipped: usize,
    /// Local scale at the point that produced `max_rel`.
    pub scale: f64,
    /// Set when the stencil was coarse against the beam length scales.
    pub coarse_stencil: bool,
}

impl Default for ResidualReport {
    fn default() -> Self {
        Self::empty()
    }
}

impl ResidualReport {
    pub fn empty() -> Self {
        Self { max_abs: 0.0, max_rel: 0.0, points_checked: 0, points_skipped: 0, scale: 0.0, coarse_stencil: false }
    }

    pub fn skipped() -> Self {
        Self { points_skipped: 1, ..Self::empty() }
    }

    pub fn single(abs: f64, scale: f64) -> Self {
        let rel = if scale > 0.0 { abs / scale } else if abs == 0.0 { 0.0 } else { f64::INFINITY };
        Self { max_abs: abs, max_rel: rel, points_checked: 1, points_skipped: 0, scale, coarse_stencil: false }
    }

    /// Associative combination of two reports.
    pub fn merge(self, other: Self) -> Self {
        let (max_rel, scale) = if other.max_rel > self.max_rel || self.points_checked == 0 && other.points_checked > 0 {
            (other.max_rel, other.scale)
        } else {
            (self.max_rel, self.scale)
        };
        Self {
            max_abs: self.max_abs.max(other.max_abs),
            max_rel,
            points_checked: self.points_checked + other.points_checked,
            points_skipped: self.points_skipped + other.points_skipped,
            scale,
            coarse_stencil: self.coarse_stencil || other.coarse_stencil,
        }
    }

    /// True when at least one point was checked, the stencil was fine and `max_rel < tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.points_checked > 0 && !self.coarse_stencil && self.max_rel < tol
    }
}

/// Random points with `|s| <= 4b`, `|tau| <= 2b / c` and `rho <= 2.5 w(s)`, uniform over the disk.
pub fn sample_points(params: &BeamParameters, count: usize, seed: u64) -> Vec<EventCoordinates> {
    let mut rng = StdRng::seed_from_u64(seed);
    let c = params.units.c;
    let b = params.b;
    (0..count)
        .map(|_| {
            let s = rng.gen_range(-4.0 * b..=4.0 * b);
            let tau = rng.gen_range(-2.0 * b / c..=2.0 * b / c);
            let rho = 2.5 * beam_radius(params, s) * rng.gen::<f64>().sqrt();
            let phi = rng.gen_range(0.0..2.0 * PI);
            EventCoordinates::new(rho * phi.cos(), rho * phi.sin(), s - c * tau, tau)
        })
        .collect()
}

/// Points where `|Psi|` is below `1e-6` of the on-axis envelope scale `C w0 / w(s)`.
pub fn below_amplitude_floor(beam: &Beam, d: EventCoordinates) -> bool {
    beam.psi(d).norm() < 1e-6 * beam.reference_amplitude(d)
}

fn run_points(
    beam: &Beam,
    points: &[EventCoordinates],
    stencil: &StencilSpec,
    check: impl Fn(EventCoordinates) -> (f64, f64) + Sync,
) -> Result<ResidualReport> {
    stencil.validate(&beam.params)?;
    let mut report = points
        .par_iter()
        .map(|&d| {
            if below_amplitude_floor(beam, d) {
                ResidualReport::skipped()
            } else {
                let (abs, scale) = check(d);
                ResidualReport::single(abs, scale)
            }
        })
        .reduce(ResidualReport::empty, ResidualReport::merge);
    report.coarse_stencil = !stencil.is_fine(&beam.params);
    Ok(report)
}

fn envelope_length(params: &BeamParameters) -> f64 {
    params.w0.min(2.0 * params.b)
}

/// Second derivatives of the full field along each axis and the field itself.
fn second_partials(beam: &Beam, point: Event, stencil: &StencilSpec) -> [Complex64; 4] {
    std::array::from_fn(|axis| second_derivative(|h| beam.psi_at(point.shifted(axis, h)), stencil.steps[axis], stencil))
}

/// Klein-Gordon residual `lap Psi - (1/c^2) d_t^2 Psi - (m0 c / hbar)^2 Psi`.
pub fn kg_residual(beam: &Beam, points: &[EventCoordinates], stencil: &StencilSpec) -> Result<ResidualReport> {
    let p = beam.params;
    let c = p.units.c;
    let mass = p.m0 * c / p.units.hbar;
    run_points(beam, points, stencil, |d| {
        let point = beam.waist.offset(d);
        let psi = beam.psi_at(point);
        let d2 = second_partials(beam, point, stencil);
        let mass_term = psi * (mass * mass);
        let r = d2[0] + d2[1] + d2[2] - d2[3] / (c * c) - mass_term;
        let scale = d2[0].norm() + d2[1].norm() + d2[2].norm() + d2[3].norm() / (c * c) + mass_term.norm();
        (r.norm(), scale)
    })
}

/// Envelope derivatives `(Phi, d1, d2, d3, dt, d11, d22)` at a point.
struct EnvelopeJet {
    phi: Complex64,
    d3: Complex64,
    dt: Complex64,
    d11: Complex64,
    d22: Complex64,
}

fn envelope_jet(beam: &Beam, d: EventCoordinates, stencil: &StencilSpec) -> EnvelopeJet {
    let env = |axis: usize, h: f64| beam.envelope(d.shifted(axis, h));
    EnvelopeJet {
        phi: beam.envelope(d),
        d3: derivative(|h| env(2, h), stencil.steps[2], stencil),
        dt: derivative(|h| env(3, h), stencil.steps[3], stencil),
        d11: second_derivative(|h| env(0, h), stencil.steps[0], stencil),
        d22: second_derivative(|h| env(1, h), stencil.steps[1], stencil),
    }
}

/// Residual of the envelope equation
/// `Phi_11 + Phi_22 + 2i (k3 + kappa) Phi_3 + (2i / c)(k4 - kappa) Phi_t = 0`.
pub fn parabolic_residual(beam: &Beam, points: &[EventCoordinates], stencil: &StencilSpec) -> Result<ResidualReport> {
    let p = beam.params;
    let c = p.units.c;
    let floor = 1.0 / envelope_length(&p).powi(2);
    run_points(beam, points, stencil, |d| {
        let j = envelope_jet(beam, d, stencil);
        let i = Complex64::i();
        let axial = i * j.d3 * (2.0 * (p.k3 + p.kappa));
        let temporal = i * j.dt * (2.0 * (p.k4 - p.kappa) / c);
        let r = j.d11 + j.d22 + axial + temporal;
        let scale = j.d11.norm() + j.d22.norm() + axial.norm() + temporal.norm() + floor * j.phi.norm();
        (r.norm(), scale)
    })
}

/// The three envelope identities checked by [`envelope_identities`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeReport {
    /// `d3 Phi = (1/c) dt Phi`, equivalently `p3 Phi = -p4 Phi`.
    pub axial: ResidualReport,
    /// `p3 Phi = -(p1^2 + p2^2) Phi / (2 hbar (k3 + k4))`.
    pub operator: ResidualReport,
    /// `d3 |Psi|^2 = (1/c) dt |Psi|^2`.
    pub density: ResidualReport,
}

impl EnvelopeReport {
    pub fn worst(&self) -> ResidualReport {
        self.axial.merge(self.operator).merge(self.density)
    }
}

pub fn envelope_identities(beam: &Beam, points: &[EventCoordinates], stencil: &StencilSpec) -> Result<EnvelopeReport> {
    let p = beam.params;
    let c = p.units.c;
    let hbar = p.units.hbar;
    let k_sum = p.k3 + p.k4;
    let inv_len = 1.0 / envelope_length(&p);
    let axial = run_points(beam, points, stencil, |d| {
        let j = envelope_jet(beam, d, stencil);
        let r = j.d3 - j.dt / c;
        (r.norm(), j.d3.norm() + j.dt.norm() / c + inv_len * j.phi.norm())
    })?;
    let operator = run_points(beam, points, stencil, |d| {
        let j = envelope_jet(beam, d, stencil);
        let p3 = -Complex64::i() * j.d3 * hbar;
        let transverse = (j.d11 + j.d22) * (hbar / (2.0 * k_sum));
        let r = p3 - transverse;
        (r.norm(), p3.norm() + transverse.norm() + hbar * inv_len * j.phi.norm())
    })?;
    let density = run_points(beam, points, stencil, |d| {
        let rho = |axis: usize, h: f64| beam.density(d.shifted(axis, h));
        let d3 = derivative(|h| rho(2, h), stencil.steps[2], stencil);
        let dt = derivative(|h| rho(3, h), stencil.steps[3], stencil);
        ((d3 - dt / c).abs(), d3.abs() + dt.abs() / c + inv_len * beam.density(d))
    })?;
    Ok(EnvelopeReport { axial, operator, density })
}

/// `p_mu Psi / Psi` with `p_i = -i hbar d_i` and `p4 = (i hbar / c) d_t`, at relative coordinates.
pub fn canonical_momentum(beam: &Beam, d: EventCoordinates, stencil: &StencilSpec) -> [Complex64; 4] {
    let p = beam.params;
    let hbar = p.units.hbar;
    let point = beam.waist.offset(d);
    let psi = beam.psi_at(point);
    std::array::from_fn(|axis| {
        let g = derivative(|h| beam.psi_at(point.shifted(axis, h)), stencil.steps[axis], stencil);
        let op = if axis == 3 { Complex64::i() * hbar / p.units.c } else { -Complex64::i() * hbar };
        op * g / psi
    })
}

/// `P_mu Psi / Psi` for the kinetic operator
/// `p_mu(x) + p_mu(X) - hbar kappa_mu`, `kappa_mu = (0, 0, kappa, -kappa)`,
/// where `p_mu(X)` differentiates with respect to the waist event.
pub fn kinetic_momentum(beam: &Beam, d: EventCoordinates, stencil: &StencilSpec) -> [Complex64; 4] {
    let p = beam.params;
    let hbar = p.units.hbar;
    let point = beam.waist.offset(d);
    let psi = beam.psi_at(point);
    let kappa = [0.0, 0.0, p.kappa, -p.kappa];
    std::array::from_fn(|axis| {
        let field = |h: f64| beam.psi_at(point.shifted(axis, h));
        let waist = |h: f64| beam.psi_with_waist(point, beam.waist.shifted(axis, h));
        let g = derivative(field, stencil.steps[axis], stencil) + derivative(waist, stencil.steps[axis], stencil);
        let op = if axis == 3 { Complex64::i() * hbar / p.units.c } else { -Complex64::i() * hbar };
        op * g / psi - hbar * kappa[axis]
    })
}

/// Residual of `P_mu Psi = hbar k_mu Psi`, relative to `hbar k4 |Psi|`, worst component.
pub fn kinetic_momentum_check(beam: &Beam, points: &[EventCoordinates], stencil: &StencilSpec) -> Result<ResidualReport> {
    let p = beam.params;
    let hbar = p.units.hbar;
    let k = [0.0, 0.0, p.k3, p.k4];
    run_points(beam, points, stencil, |d| {
        let psi = beam.psi(d).norm();
        let ev = kinetic_momentum(beam, d, stencil);
        let worst = (0..4).map(|mu| (ev[mu] - hbar * k[mu]).norm() * psi).fold(0.0, f64::max);
        (worst, hbar * p.k4 * psi)
    })
}

/// OAM eigenvalue measurements: azimuthal derivative and Cartesian `xi1 p2 - xi2 p1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OamReport {
    /// `l hbar`.
    pub expected: f64,
    pub azimuthal: ResidualReport,
    pub cartesian: ResidualReport,
    /// Real part of `L3 Psi / Psi` at the worst azimuthal point.
    pub worst_eigenvalue: f64,
}

/// `(hbar / i) d Psi / d phi / Psi`, differentiating along a rotation about the beam axis.
pub fn azimuthal_eigenvalue(beam: &Beam, d: EventCoordinates, stencil: &StencilSpec) -> Complex64 {
    let hbar = beam.params.units.hbar;
    let rotate = |a: f64| {
        let (s, c) = a.sin_cos();
        beam.psi(EventCoordinates::new(c * d.xi1 - s * d.xi2, s * d.xi1 + c * d.xi2, d.xi3, d.tau))
    };
    let h = stencil.steps[0] / beam.params.w0;
    -Complex64::i() * hbar * derivative(rotate, h, stencil) / beam.psi(d)
}

/// `(xi1 p2 - xi2 p1) Psi / Psi`.
pub fn cartesian_eigenvalue(beam: &Beam, d: EventCoordinates, stencil: &StencilSpec) -> Complex64 {
    let p = canonical_momentum(beam, d, stencil);
    p[1] * d.xi1 - p[0] * d.xi2
}

pub fn oam_check(beam: &Beam, points: &[EventCoordinates], stencil: &StencilSpec) -> Result<OamReport> {
    let p = beam.params;
    let l = match p.mode {
        crate::params::BeamMode::Lg { l, .. } => l,
        crate::params::BeamMode::Hg { m: 0, n: 0 } => 0,
        crate::params::BeamMode::Hg { .. } => {
            return Err(BeamError::UnsupportedMode { mode: "HG", what: "OAM eigenvalue (only HG(0,0) is an OAM eigenstate)" })
        }
    };
    let hbar = p.units.hbar;
    let expected = l as f64 * hbar;
    let scale = hbar * (l.unsigned_abs().max(1)) as f64;
    let azimuthal =
        run_points(beam, points, stencil, |d| ((azimuthal_eigenvalue(beam, d, stencil) - expected).norm(), scale))?;
    let cartesian =
        run_points(beam, points, stencil, |d| ((cartesian_eigenvalue(beam, d, stencil) - expected).norm(), scale))?;
    Ok(OamReport { expected, azimuthal, cartesian, worst_eigenvalue: expected + azimuthal.max_abs })
}

/// Terms of `-dS/dt = |grad S|^2 / 2m0 + Q` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonJacobiTerms {
    pub neg_dt_s: f64,
    pub kinetic: f64,
    pub q: f64,
}

impl HamiltonJacobiTerms {
    pub fn residual(&self, include_q: bool) -> f64 {
        self.neg_dt_s - self.kinetic - if include_q { self.q } else { 0.0 }
    }

    pub fn scale(&self) -> f64 {
        self.neg_dt_s.abs() + self.kinetic.abs() + self.q.abs()
    }
}

/// Time step for the non-relativistic phase: the spatial step over `hbar / (m0 w0)`.
fn hj_time_step(params: &BeamParameters, stencil: &StencilSpec) -> f64 {
    stencil.steps[0] * params.m0 * params.w0 / params.units.hbar
}

pub fn hamilton_jacobi_terms(params: &BeamParameters, d: EventCoordinates, stencil: &StencilSpec) -> Result<HamiltonJacobiTerms> {
    let phase = |d: EventCoordinates| schrodinger_form(params, d).map(|f| f.s);
    phase(d)?;
    let s_at = |axis: usize, h: f64| phase(d.shifted(axis, h)).expect("checked above");
    let grad_sq: f64 =
        (0..3).map(|axis| derivative(|h| s_at(axis, h), stencil.steps[axis], stencil).powi(2)).sum();
    let dt = derivative(|h| s_at(3, h), hj_time_step(params, stencil), stencil);
    Ok(HamiltonJacobiTerms { neg_dt_s: -dt, kinetic: grad_sq / (2.0 * params.m0), q: bohm_potential(params, d)? })
}

/// Hamilton-Jacobi residual of the non-relativistic HG beam; `include_q = false`
/// drops the Bohm potential (negative control).
pub fn hamilton_jacobi_residual(
    params: &BeamParameters,
    points: &[EventCoordinates],
    stencil: &StencilSpec,
    include_q: bool,
) -> Result<ResidualReport> {
    stencil.validate(params)?;
    hamilton_jacobi_terms(params, EventCoordinates::default(), stencil)?;
    let report = points
        .par_iter()
        .map(|&d| {
            let t = hamilton_jacobi_terms(params, d, stencil).expect("checked above");
            ResidualReport::single(t.residual(include_q).abs(), t.scale())
        })
        .reduce(ResidualReport::empty, ResidualReport::merge);
    Ok(report)
}
