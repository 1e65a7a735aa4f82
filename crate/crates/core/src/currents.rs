//! Particle 4-current: closed form for HG modes, finite differences for any mode,
//! and continuity-equation residuals.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::diffops::{derivative, ResidualReport, StencilSpec};
use crate::error::{domain, BeamError, Result};
use crate::lorentz::FourVector;
use crate::params::BeamParameters;
use crate::wavefield::{probability_density, Beam, EventCoordinates};

/// Current density components and `|Psi|^2` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentSample {
    pub j: FourVector,
    pub density: f64,
}

impl CurrentSample {
    /// `j / |Psi|^2`; zero where the density vanishes.
    pub fn velocity(&self) -> FourVector {
        if self.density > 0.0 {
            self.j * (1.0 / self.density)
        } else {
            FourVector::ZERO
        }
    }
}

fn require_mass(params: &BeamParameters) -> Result<()> {
    if !(params.m0 > 0.0) {
        return domain("current requires a positive rest mass");
    }
    Ok(())
}

/// Localization terms of `j / |Psi|^2` shared by the current and the quantum potential.
///
/// Returns `(transverse factor, gouy term, quadrupole term)` with
/// `j1 = factor xi1`, `j3 = k3 + kappa - gouy - quad`, `j4 = k4 - kappa + gouy + quad`,
/// all in units of `hbar / m0`.
pub(crate) fn localization_terms(params: &BeamParameters, d: &EventCoordinates) -> (f64, f64, f64) {
    let s = d.s(params.units.c);
    let b = params.b;
    let w0sq = params.w0 * params.w0;
    let denom = s * s + 4.0 * b * b;
    let transverse = 4.0 * b * s / (w0sq * denom);
    let gouy = 2.0 * b * params.mode_constant / denom;
    let quad = 2.0 * b * d.rho_sq() * (s * s - 4.0 * b * b) / (w0sq * denom * denom);
    (transverse, gouy, quad)
}

/// Closed-form current of an HG mode.
pub fn current_analytic(params: &BeamParameters, d: EventCoordinates) -> Result<CurrentSample> {
    if !params.mode.is_hg() {
        return Err(BeamError::UnsupportedMode { mode: "LG", what: "closed-form current" });
    }
    require_mass(params)?;
    let density = probability_density(params, d);
    let f = params.units.hbar / params.m0 * density;
    let (tr, gouy, quad) = localization_terms(params, &d);
    let j = FourVector::new(
        tr * d.xi1 * f,
        tr * d.xi2 * f,
        (params.k3 + params.kappa - gouy - quad) * f,
        (params.k4 - params.kappa + gouy + quad) * f,
    );
    Ok(CurrentSample { j, density })
}

/// Current `(1/2m0)(Psi* p Psi - Psi p Psi*)` by finite differences of the field.
pub fn current_field(beam: &Beam, d: EventCoordinates, stencil: &StencilSpec) -> Result<CurrentSample> {
    require_mass(&beam.params)?;
    Ok(current_field_unchecked(beam, d, stencil))
}

pub(crate) fn current_field_unchecked(beam: &Beam, d: EventCoordinates, stencil: &StencilSpec) -> CurrentSample {
    let p = &beam.params;
    let point = beam.waist.offset(d);
    let psi = beam.psi_at(point);
    let grad: [Complex64; 4] = std::array::from_fn(|axis| {
        derivative(|h| beam.psi_at(point.shifted(axis, h)), stencil.steps[axis], stencil)
    });
    let f = p.units.hbar / p.m0;
    let im = |g: Complex64| (psi.conj() * g).im;
    CurrentSample {
        j: FourVector::new(f * im(grad[0]), f * im(grad[1]), f * im(grad[2]), -f / p.units.c * im(grad[3])),
        density: psi.norm_sqr(),
    }
}

/// Finite-difference current of the exact mode with its waist at the origin.
pub fn current_numeric(params: &BeamParameters, d: EventCoordinates, stencil: &StencilSpec) -> Result<CurrentSample> {
    stencil.validate(params)?;
    current_field(&Beam::new(*params), d, stencil)
}

/// `m0 (j3 + j4) / (hbar (k3 + k4))` from the closed-form HG current.
pub fn axial_probability_density(params: &BeamParameters, d: EventCoordinates) -> Result<f64> {
    let j = current_analytic(params, d)?.j;
    Ok(params.m0 * (j.c3 + j.c4) / (params.units.hbar * (params.k3 + params.k4)))
}

/// Terms of the continuity equation at one point, before summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityTerms {
    /// `d1 j1, d2 j2, d3 j3, (1/c) dt j4`.
    pub divergence: [f64; 4],
    /// `(hbar (k3 + k4) / (m0 c)) dt |Psi|^2`.
    pub density_rate: f64,
    /// Local magnitude used to normalize residuals: `sum |j| / min(w0, 2b, 1/k4)`.
    pub scale: f64,
}

impl ContinuityTerms {
    /// `d1 j1 + d2 j2 + d3 j3 + (1/c) dt j4`.
    pub fn full(&self) -> f64 {
        self.divergence.iter().sum()
    }

    /// `d1 j1 + d2 j2 + (hbar (k3 + k4) / (m0 c)) dt |Psi|^2`.
    pub fn transverse(&self) -> f64 {
        self.divergence[0] + self.divergence[1] + self.density_rate
    }
}

pub fn continuity_terms(beam: &Beam, d: EventCoordinates, stencil: &StencilSpec) -> Result<ContinuityTerms> {
    require_mass(&beam.params)?;
    let p = &beam.params;
    let c = p.units.c;
    let here = current_field_unchecked(beam, d, stencil);
    let mut divergence = [0.0; 4];
    for (axis, slot) in divergence.iter_mut().enumerate() {
        let dj = derivative(|h| current_field_unchecked(beam, d.shifted(axis, h), stencil).j, stencil.steps[axis], stencil);
        *slot = if axis == 3 { dj[3] / c } else { dj[axis] };
    }
    let drho = derivative(|h| beam.density(d.shifted(3, h)), stencil.steps[3], stencil);
    let density_rate = p.units.hbar * (p.k3 + p.k4) / (p.m0 * c) * drho;
    let jsum: f64 = here.j.components().iter().map(|v| v.abs()).sum();
    Ok(ContinuityTerms { divergence, density_rate, scale: jsum / p.length_scale() })
}

/// Residual of `d1 j1 + d2 j2 + d3 j3 + (1/c) dt j4 = 0` at one point.
pub fn continuity_residual(params: &BeamParameters, d: EventCoordinates, stencil: &StencilSpec) -> Result<f64> {
    stencil.validate(params)?;
    Ok(continuity_terms(&Beam::new(*params), d, stencil)?.full())
}

/// Which form of the continuity equation a report checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContinuityForm {
    Full,
    Transverse,
}

pub fn continuity_report(
    beam: &Beam,
    points: &[EventCoordinates],
    stencil: &StencilSpec,
    form: ContinuityForm,
) -> Result<ResidualReport> {
    require_mass(&beam.params)?;
    stencil.validate(&beam.params)?;
    let report = points
        .par_iter()
        .map(|&d| {
            if crate::diffops::below_amplitude_floor(beam, d) {
                return ResidualReport::skipped();
            }
            let t = continuity_terms(beam, d, stencil).expect("mass checked above");
            let r = match form {
                ContinuityForm::Full => t.full(),
                ContinuityForm::Transverse => t.transverse(),
            };
            ResidualReport::single(r.abs(), t.scale)
        })
        .reduce(ResidualReport::empty, ResidualReport::merge);
    Ok(report)
}
