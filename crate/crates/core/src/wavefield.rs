//! Closed-form beam wavefunctions.
//!
//! A beam mode is `Psi = Phi(xi1, xi2, xi3 + c tau) exp[i (k3 + kappa) x3 - i c (k4 - kappa) t]`
//! where the envelope `Phi` depends on the axial coordinates only through
//! `s = xi3 + c tau`, and `xi`, `tau` are measured from the waist event.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::currents;
use crate::error::{domain, BeamError, Result};
use crate::params::{BeamMode, BeamParameters};
use crate::specfn::{factorial, hermite_unchecked, laguerre_unchecked};

/// An absolute spacetime event.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Event {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub t: f64,
}

impl Event {
    pub const ORIGIN: Event = Event { x1: 0.0, x2: 0.0, x3: 0.0, t: 0.0 };

    pub const fn new(x1: f64, x2: f64, x3: f64, t: f64) -> Self {
        Self { x1, x2, x3, t }
    }

    /// The event displaced by relative coordinates.
    pub fn offset(self, d: EventCoordinates) -> Event {
        Event::new(self.x1 + d.xi1, self.x2 + d.xi2, self.x3 + d.xi3, self.t + d.tau)
    }

    /// Coordinates of `self` relative to `waist`.
    pub fn relative_to(self, waist: Event) -> EventCoordinates {
        EventCoordinates::new(self.x1 - waist.x1, self.x2 - waist.x2, self.x3 - waist.x3, self.t - waist.t)
    }

    pub fn component(&self, axis: usize) -> f64 {
        [self.x1, self.x2, self.x3, self.t][axis]
    }

    pub fn shifted(mut self, axis: usize, h: f64) -> Event {
        match axis {
            0 => self.x1 += h,
            1 => self.x2 += h,
            2 => self.x3 += h,
            3 => self.t += h,
            _ => panic!("event axis {axis} out of range"),
        }
        self
    }
}

/// Position and time of a field point relative to the waist event.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EventCoordinates {
    pub xi1: f64,
    pub xi2: f64,
    pub xi3: f64,
    pub tau: f64,
}

impl EventCoordinates {
    pub const fn new(xi1: f64, xi2: f64, xi3: f64, tau: f64) -> Self {
        Self { xi1, xi2, xi3, tau }
    }

    /// Point on the slice `xi3 = v3 tau`.
    pub fn on_slice(params: &BeamParameters, xi1: f64, xi2: f64, tau: f64) -> Self {
        Self::new(xi1, xi2, params.v3 * tau, tau)
    }

    /// `s = xi3 + c tau`.
    pub fn s(&self, c: f64) -> f64 {
        self.xi3 + c * self.tau
    }

    pub fn rho_sq(&self) -> f64 {
        self.xi1 * self.xi1 + self.xi2 * self.xi2
    }

    pub fn shifted(self, axis: usize, h: f64) -> Self {
        Event::ORIGIN.offset(self).shifted(axis, h).relative_to(Event::ORIGIN)
    }
}

/// Deliberate modifications of the exact solution, used only by negative controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    /// Replaces the Gouy multiplier `N`.
    pub gouy_multiplier: Option<f64>,
    /// Scales the confinement parameter `b` inside the envelope.
    pub b_factor: f64,
    /// Envelope depends on `xi3 + factor * c tau` instead of `xi3 + c tau`.
    pub axial_time_factor: f64,
    /// Drops the `w0 / w` amplitude factor.
    pub drop_amplitude_decay: bool,
}

impl Default for Perturbation {
    fn default() -> Self {
        Self { gouy_multiplier: None, b_factor: 1.0, axial_time_factor: 1.0, drop_amplitude_decay: false }
    }
}

impl Perturbation {
    pub fn none() -> Self {
        Self::default()
    }

    /// Gouy multiplier replaced by 1, or by 2 when the true multiplier already is 1.
    pub fn wrong_gouy(mode: BeamMode) -> Self {
        let wrong = if mode.gouy_multiplier() == 1.0 { 2.0 } else { 1.0 };
        Self { gouy_multiplier: Some(wrong), ..Self::default() }
    }

    pub fn scaled_b(factor: f64) -> Self {
        Self { b_factor: factor, ..Self::default() }
    }

    pub fn skewed_axial(factor: f64) -> Self {
        Self { axial_time_factor: factor, ..Self::default() }
    }

    pub fn no_decay() -> Self {
        Self { drop_amplitude_decay: true, ..Self::default() }
    }

    pub fn is_exact(&self) -> bool {
        *self == Self::default()
    }
}

/// A beam mode with a waist event; evaluates the field at arbitrary events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beam {
    pub params: BeamParameters,
    pub waist: Event,
    pub perturbation: Perturbation,
    amplitude: f64,
}

impl Beam {
    pub fn new(params: BeamParameters) -> Self {
        Self { params, waist: Event::ORIGIN, perturbation: Perturbation::none(), amplitude: normalization_constant(&params) }
    }

    pub fn with_waist(mut self, waist: Event) -> Self {
        self.waist = waist;
        self
    }

    pub fn with_perturbation(mut self, perturbation: Perturbation) -> Self {
        self.perturbation = perturbation;
        self
    }

    /// Replaces the normalization constant `C`.
    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    /// True when neither the envelope nor the constant `C` has been altered.
    pub fn is_exact(&self) -> bool {
        self.perturbation.is_exact() && self.amplitude == normalization_constant(&self.params)
    }

    fn envelope_b(&self) -> f64 {
        self.params.b * self.perturbation.b_factor
    }

    fn envelope_s(&self, d: &EventCoordinates) -> f64 {
        d.xi3 + self.perturbation.axial_time_factor * self.params.units.c * d.tau
    }

    /// Envelope `Phi` at relative coordinates.
    pub fn envelope(&self, d: EventCoordinates) -> Complex64 {
        let p = &self.params;
        let s = self.envelope_s(&d);
        let b = self.envelope_b();
        let x = s / (2.0 * b);
        let w = p.w0 * (1.0 + x * x).sqrt();
        let rho2 = d.rho_sq();
        let decay = if self.perturbation.drop_amplitude_decay { 1.0 } else { p.w0 / w };

        let transverse = match p.mode {
            BeamMode::Hg { m, n } => {
                let h = hermite_unchecked(m, SQRT_2 * d.xi1 / w) * hermite_unchecked(n, SQRT_2 * d.xi2 / w);
                Complex64::new(h, 0.0)
            }
            BeamMode::Lg { l, p: radial } => {
                let al = l.unsigned_abs();
                let u = 2.0 * rho2 / w / w;
                let radial_part = u.sqrt().powi(al as i32) * laguerre_unchecked(radial, al, u);
                let phi = d.xi2.atan2(d.xi1);
                Complex64::from_polar(radial_part, l as f64 * phi)
            }
        };

        // i 2b rho^2 / (w0^2 (s - i 2b)), written out to avoid a complex division.
        let denom = s * s + 4.0 * b * b;
        let gauss_exponent = Complex64::new(-4.0 * b * b * rho2, 2.0 * b * rho2 * s) / (p.w0 * p.w0 * denom);
        let gouy = self.perturbation.gouy_multiplier.unwrap_or(p.mode.gouy_multiplier()) * x.atan();

        self.amplitude * decay * transverse * (gauss_exponent - Complex64::new(0.0, gouy)).exp()
    }

    /// Plane-wave factor `exp[i (k3 + kappa) x3 - i c (k4 - kappa) t]` at an absolute event.
    pub fn plane_wave(&self, point: Event) -> Complex64 {
        let p = &self.params;
        let phase = (p.k3 + p.kappa) * point.x3 - p.units.c * (p.k4 - p.kappa) * point.t;
        Complex64::from_polar(1.0, phase)
    }

    /// Full field at an absolute event with an explicit waist event.
    pub fn psi_with_waist(&self, point: Event, waist: Event) -> Complex64 {
        self.envelope(point.relative_to(waist)) * self.plane_wave(point)
    }

    pub fn psi_at(&self, point: Event) -> Complex64 {
        self.psi_with_waist(point, self.waist)
    }

    /// Field at coordinates relative to this beam's waist event.
    pub fn psi(&self, d: EventCoordinates) -> Complex64 {
        self.psi_at(self.waist.offset(d))
    }

    pub fn density(&self, d: EventCoordinates) -> f64 {
        self.envelope(d).norm_sqr()
    }

    /// Envelope amplitude scale `C w0 / w(s)` at the slice of `d`.
    pub fn reference_amplitude(&self, d: EventCoordinates) -> f64 {
        self.amplitude * self.params.w0 / beam_radius(&self.params, d.s(self.params.units.c))
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }
}

/// `w(s) = w0 sqrt(1 + (s / 2b)^2)`.
pub fn beam_radius(params: &BeamParameters, s: f64) -> f64 {
    let x = params.reduced_axial(s);
    params.w0 * (1.0 + x * x).sqrt()
}

/// Gouy phase `N arctan(s / 2b)`.
pub fn gouy_phase(params: &BeamParameters, s: f64) -> f64 {
    params.mode.gouy_multiplier() * params.reduced_axial(s).atan()
}

/// Normalization constant giving probability 1 per beam length `L`.
///
/// HG: `sqrt(2 / (pi w0^2 L 2^(m+n) m! n!))`; LG: `sqrt(2 p! / (pi w0^2 L (p+|l|)!))`.
pub fn normalization_constant(params: &BeamParameters) -> f64 {
    let base = 2.0 / (PI * params.w0 * params.w0 * params.length);
    match params.mode {
        BeamMode::Hg { m, n } => (base / (2f64.powi((m + n) as i32) * factorial(m) * factorial(n))).sqrt(),
        BeamMode::Lg { l, p } => (base * factorial(p) / factorial(p + l.unsigned_abs())).sqrt(),
    }
}

/// The LG constant in its printed form `sqrt(4 p! / (w0^2 L (p+|l|)!))`; its slice
/// norm comes out as `2 pi / L`. Kept for the normalization report only.
pub fn printed_lg_constant(params: &BeamParameters) -> Result<f64> {
    let BeamMode::Lg { l, p } = params.mode else {
        return Err(BeamError::UnsupportedMode { mode: "HG", what: "printed LG constant" });
    };
    Ok((4.0 * factorial(p) / (params.w0 * params.w0 * params.length * factorial(p + l.unsigned_abs()))).sqrt())
}

fn require_hg(params: &BeamParameters, what: &'static str) -> Result<()> {
    if params.mode.is_hg() {
        Ok(())
    } else {
        Err(BeamError::UnsupportedMode { mode: "LG", what })
    }
}

/// Hermite-Gaussian field with the waist at the origin.
pub fn evaluate_hg(params: &BeamParameters, d: EventCoordinates) -> Result<Complex64> {
    require_hg(params, "evaluate_hg")?;
    Ok(Beam::new(*params).psi(d))
}

/// Laguerre-Gaussian field with the waist at the origin.
pub fn evaluate_lg(params: &BeamParameters, d: EventCoordinates) -> Result<Complex64> {
    if params.mode.is_hg() {
        return Err(BeamError::UnsupportedMode { mode: "HG", what: "evaluate_lg" });
    }
    Ok(Beam::new(*params).psi(d))
}

/// `|Psi|^2`, the probability density per unit transverse area and beam length.
pub fn probability_density(params: &BeamParameters, d: EventCoordinates) -> f64 {
    Beam::new(*params).density(d)
}

/// `j4 / c`, the conventional Klein-Gordon density, for comparison with `|Psi|^2`.
///
/// Uses the closed-form current for HG modes and the finite-difference current otherwise.
pub fn klein_gordon_density(params: &BeamParameters, d: EventCoordinates) -> Result<f64> {
    let j = if params.mode.is_hg() {
        currents::current_analytic(params, d)?.j
    } else {
        let stencil = crate::diffops::StencilSpec::for_params(params);
        currents::current_numeric(params, d, &stencil)?.j
    };
    Ok(j.c4 / params.units.c)
}

/// Non-relativistic amplitude/phase decomposition `Psi = R exp(i S / hbar)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchrodingerForm {
    /// Amplitude (signed where Hermite factors are negative).
    pub r: f64,
    /// Phase in action units.
    pub s: f64,
    /// Spot radius `w0 sqrt(1 + 4 omega0^2 tau^2)`.
    pub w_s: f64,
    /// `hbar / (m0 w0^2)`.
    pub omega0: f64,
}

/// Energy constant in the phase: fixed so that the total linear-in-`t`
/// coefficient of `S` is `-P3^2 / 2m0`, which the Hamilton-Jacobi equation requires.
pub fn schrodinger_energy(params: &BeamParameters) -> f64 {
    let hbar = params.units.hbar;
    let p3 = hbar * params.k3;
    let omega0 = hbar / (params.m0 * params.w0 * params.w0);
    p3 * p3 / (2.0 * params.m0) - params.mode_constant * hbar * omega0
}

/// Amplitude and phase of the Schrodinger-limit HG beam, waist at the origin.
pub fn schrodinger_form(params: &BeamParameters, d: EventCoordinates) -> Result<SchrodingerForm> {
    require_hg(params, "schrodinger_form")?;
    if !(params.m0 > 0.0) {
        return domain("the Schrodinger form needs a positive rest mass");
    }
    let BeamMode::Hg { m, n } = params.mode else { unreachable!() };
    let hbar = params.units.hbar;
    let big_n = params.mode_constant;
    let omega0 = hbar / (params.m0 * params.w0 * params.w0);
    let u = 2.0 * omega0 * d.tau;
    let w_s = params.w0 * (1.0 + u * u).sqrt();
    let rho2 = d.rho_sq();

    let r = normalization_constant(params) * params.w0 / w_s
        * hermite_unchecked(m, SQRT_2 * d.xi1 / w_s)
        * hermite_unchecked(n, SQRT_2 * d.xi2 / w_s)
        * (-rho2 / (w_s * w_s)).exp();

    let (x3, t) = (d.xi3, d.tau);
    let p3 = hbar * params.k3;
    let s = p3 * x3 - schrodinger_energy(params) * t - big_n * hbar * omega0 * t
        + 2.0 * rho2 * hbar * omega0 * d.tau / (w_s * w_s)
        - hbar * big_n * u.atan();

    Ok(SchrodingerForm { r, s, w_s, omega0 })
}
