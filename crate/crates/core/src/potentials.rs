//! Quantum 4-potential `U = j / |Psi|^2 - hbar k / m0`, the scalar potential `V^2`,
//! and the Bohm potential of the non-relativistic beam.

use crate::currents::{current_field, localization_terms};
use crate::diffops::{second_derivative, StencilSpec};
use crate::error::{domain, BeamError, Result};
use crate::lorentz::{contraction, FourVector};
use crate::params::{BeamParameters, UnitSystem};
use crate::wavefield::{beam_radius, schrodinger_form, Beam, EventCoordinates};

/// Potential fields at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSample {
    pub u: FourVector,
    pub v2: f64,
    pub q: f64,
}

fn require_hg(params: &BeamParameters, what: &'static str) -> Result<()> {
    if params.mode.is_hg() {
        Ok(())
    } else {
        Err(BeamError::UnsupportedMode { mode: "LG", what })
    }
}

fn require_mass(params: &BeamParameters) -> Result<()> {
    if params.m0 > 0.0 {
        Ok(())
    } else {
        domain("the quantum potential requires a positive rest mass")
    }
}

/// Closed-form `U_mu` of an HG mode (velocity units).
pub fn quantum_potential(params: &BeamParameters, d: EventCoordinates) -> Result<FourVector> {
    require_hg(params, "closed-form quantum potential")?;
    require_mass(params)?;
    let f = params.units.hbar / params.m0;
    let (tr, gouy, quad) = localization_terms(params, &d);
    let u3 = params.kappa - gouy - quad;
    Ok(FourVector::new(f * tr * d.xi1, f * tr * d.xi2, f * u3, -f * u3))
}

/// `U_mu = j_mu / |Psi|^2 - hbar k_mu / m0` from the finite-difference current; works for any mode.
pub fn quantum_potential_numeric(beam: &Beam, d: EventCoordinates, stencil: &StencilSpec) -> Result<FourVector> {
    let p = &beam.params;
    let v = current_field(beam, d, stencil)?.velocity();
    let f = p.units.hbar / p.m0;
    Ok(v - FourVector::axial(f * p.k3, f * p.k4))
}

/// `m0 (xi1 U2 - xi2 U1)`: the axial angular momentum carried by the potential.
pub fn oam_from_potential(beam: &Beam, d: EventCoordinates, stencil: &StencilSpec) -> Result<f64> {
    let u = quantum_potential_numeric(beam, d, stencil)?;
    Ok(beam.params.m0 * (d.xi1 * u.c2 - d.xi2 * u.c1))
}

/// `V^2 = 4 hbar^2 [N / w^2 - rho^2 / w^4]`.
pub fn scalar_potential(params: &BeamParameters, d: EventCoordinates) -> Result<f64> {
    require_hg(params, "scalar potential")?;
    let w = beam_radius(params, d.s(params.units.c));
    let w2 = w * w;
    let hbar = params.units.hbar;
    Ok(4.0 * hbar * hbar * (params.mode_constant / w2 - d.rho_sq() / (w2 * w2)))
}

/// `m0^2 |U|^2 + 2 hbar m0 k.U + hbar^2 K_T`, which equals [`scalar_potential`].
pub fn scalar_potential_expansion(params: &BeamParameters, d: EventCoordinates) -> Result<f64> {
    let u = quantum_potential(params, d)?;
    let hbar = params.units.hbar;
    let m0 = params.m0;
    let k = FourVector::axial(params.k3, params.k4);
    Ok(m0 * m0 * contraction(u, u) + 2.0 * hbar * m0 * contraction(k, u)
        + hbar * hbar * params.transverse_wavenumber_sq())
}

/// The expansion with the printed sign, `-m0^2 |U|^2 - 2 hbar k.m0 U - hbar^2 K_T`; equals `-V^2`.
pub fn scalar_potential_printed_expansion(params: &BeamParameters, d: EventCoordinates) -> Result<f64> {
    Ok(-scalar_potential_expansion(params, d)?)
}

/// `contraction(U, U)`.
pub fn u_norm_squared(params: &BeamParameters, d: EventCoordinates) -> Result<f64> {
    let u = quantum_potential(params, d)?;
    Ok(contraction(u, u))
}

/// `-(hbar / m0)^2 16 b^2 s^2 rho^2 / (w0^4 (s^2 + 4b^2)^2)`.
pub fn u_norm_squared_closed(params: &BeamParameters, d: EventCoordinates) -> Result<f64> {
    require_hg(params, "|U|^2")?;
    require_mass(params)?;
    let f = params.units.hbar / params.m0;
    let s = d.s(params.units.c);
    let b = params.b;
    let denom = params.w0.powi(2) * (s * s + 4.0 * b * b);
    Ok(-f * f * 16.0 * b * b * s * s * d.rho_sq() / (denom * denom))
}

/// `contraction((0, 0, k3, k4), U)`.
pub fn k_dot_u(params: &BeamParameters, d: EventCoordinates) -> Result<f64> {
    let u = quantum_potential(params, d)?;
    Ok(contraction(FourVector::axial(params.k3, params.k4), u))
}

/// `(hbar / m0) [-K_T / 2 + (k3 + k4)(2bN / (s^2 + 4b^2) + 2b rho^2 (s^2 - 4b^2) / (w0^2 (s^2 + 4b^2)^2))]`.
pub fn k_dot_u_closed(params: &BeamParameters, d: EventCoordinates) -> Result<f64> {
    require_hg(params, "k.U")?;
    require_mass(params)?;
    let f = params.units.hbar / params.m0;
    let s = d.s(params.units.c);
    let b = params.b;
    let denom = s * s + 4.0 * b * b;
    let gouy = 2.0 * b * params.mode_constant / denom;
    let quad = 2.0 * b * d.rho_sq() * (s * s - 4.0 * b * b) / (params.w0.powi(2) * denom * denom);
    Ok(f * (-params.transverse_wavenumber_sq() / 2.0 + (params.k3 + params.k4) * (gouy + quad)))
}

/// Bohm potential `(2 hbar^2 / m0) [N / w_S^2 - rho^2 / w_S^4]` of the non-relativistic HG beam.
pub fn bohm_potential(params: &BeamParameters, d: EventCoordinates) -> Result<f64> {
    let form = schrodinger_form(params, d)?;
    let ws2 = form.w_s * form.w_s;
    let hbar = params.units.hbar;
    Ok(2.0 * hbar * hbar / params.m0 * (params.mode_constant / ws2 - d.rho_sq() / (ws2 * ws2)))
}

/// `-(hbar^2 / 2m0) lap R / R` with the Laplacian taken by finite differences.
pub fn bohm_potential_numeric(params: &BeamParameters, d: EventCoordinates, stencil: &StencilSpec) -> Result<f64> {
    let r0 = schrodinger_form(params, d)?.r;
    let r = |axis: usize, h: f64| schrodinger_form(params, d.shifted(axis, h)).expect("checked above").r;
    let lap: f64 = (0..3).map(|axis| second_derivative(|h| r(axis, h), stencil.steps[axis], stencil)).sum();
    let hbar = params.units.hbar;
    Ok(-hbar * hbar / (2.0 * params.m0) * lap / r0)
}

pub fn potential_sample(params: &BeamParameters, d: EventCoordinates) -> Result<PotentialSample> {
    Ok(PotentialSample { u: quantum_potential(params, d)?, v2: scalar_potential(params, d)?, q: bohm_potential(params, d)? })
}

/// `|V^2 / 2m0 - Q| / |Q|` for each speed of light in `c_values`.
///
/// The transverse position and `tau` come from `d`; `xi3` is reset to `v3 tau`
/// with the `v3` of each unit system, so every evaluation sits on the constraint surface.
pub fn bohm_limit_error(params_base: &BeamParameters, d: EventCoordinates, c_values: &[f64]) -> Result<Vec<f64>> {
    c_values
        .iter()
        .map(|&c| {
            let p = params_base.with_units(UnitSystem::new(params_base.units.hbar, c)?)?;
            let point = EventCoordinates::on_slice(&p, d.xi1, d.xi2, d.tau);
            let v2 = scalar_potential(&p, point)?;
            let q = bohm_potential(&p, point)?;
            let diff = (v2 / (2.0 * p.m0) - q).abs();
            Ok(if q == 0.0 && diff == 0.0 { 0.0 } else { diff / q.abs() })
        })
        .collect()
}
