use kgbeam::currents::{axial_probability_density, continuity_report, ContinuityForm};
use kgbeam::diffops::{
    envelope_identities, hamilton_jacobi_residual, kg_residual, kinetic_momentum_check, oam_check, parabolic_residual,
    sample_points, ResidualReport, StencilSpec,
};
use kgbeam::expectation::{
    current_expectation, mode_energy, normalization_check, potential_expectation, tau_for_s,
    transverse_kinetic_expectation, QuadratureSpec,
};
use kgbeam::potentials::bohm_limit_error;
use kgbeam::wavefield::probability_density;
use kgbeam::{Beam, BeamMode, BeamParameters, EventCoordinates, FourVector, Perturbation};

use crate::boost::lorentz_check;
use crate::config::{CliResult, GridSpec};
use crate::report::VerificationReport;

pub const RESIDUAL_TOL: f64 = 1e-6;
pub const EIGEN_TOL: f64 = 1e-8;
pub const EXPECTATION_TOL: f64 = 1e-8;
pub const AXIAL_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-3;
pub const V2_TOL: f64 = 1e-6;
pub const BOOST_TOL: f64 = 1e-9;
pub const LIMIT_BAND: f64 = 0.2;
pub const SAMPLE_SEED: u64 = 2024;
pub const DEFAULT_POINTS: usize = 128;
const VERIFY_BETA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corruption {
    None,
    Gouy,
}

pub struct VerifySettings {
    pub points: usize,
    pub corruption: Corruption,
    pub grid: GridSpec,
}

fn residual(report: &mut VerificationReport, name: &str, r: &ResidualReport, tol: f64) {
    let pass = r.passes(tol);
    report.assert_with(name, r.max_abs, r.max_rel, tol, pass);
}

/// Slices at `s / 2b` in `{-1, 0, 1, 2}`.
pub fn test_slices(p: &BeamParameters) -> Vec<f64> {
    [-1.0, 0.0, 1.0, 2.0].iter().map(|x| tau_for_s(p, 2.0 * p.b * x)).collect()
}

pub fn run(p: &BeamParameters, settings: &VerifySettings) -> CliResult<VerificationReport> {
    let mut report = VerificationReport::new(format!(
        "verify {} m0={} w0={} k3={} hbar={} c={}",
        p.mode, p.m0, p.w0, p.k3, p.units.hbar, p.units.c
    ));
    let beam = match settings.corruption {
        Corruption::None => Beam::new(*p),
        Corruption::Gouy => Beam::new(*p).with_perturbation(Perturbation::wrong_gouy(p.mode)),
    };
    let exact = Beam::new(*p);
    let st = StencilSpec::for_params(p);
    let pts = sample_points(p, settings.points, SAMPLE_SEED);
    let massive = p.m0 > 0.0;
    let hbar = p.units.hbar;
    let spec = QuadratureSpec::default();
    let spec = spec.with_nodes(spec.nodes.max(QuadratureSpec::required_nodes(p.mode)));

    residual(&mut report, "kg_residual", &kg_residual(&beam, &pts, &st)?, RESIDUAL_TOL);
    residual(&mut report, "parabolic_residual", &parabolic_residual(&beam, &pts, &st)?, RESIDUAL_TOL);
    residual(&mut report, "envelope_identities", &envelope_identities(&beam, &pts, &st)?.worst(), RESIDUAL_TOL);
    residual(&mut report, "kinetic_momentum", &kinetic_momentum_check(&beam, &pts, &st)?, EIGEN_TOL);

    if matches!(p.mode, BeamMode::Lg { .. } | BeamMode::Hg { m: 0, n: 0 }) {
        let r = oam_check(&beam, &pts, &st)?;
        let rel = r.azimuthal.max_rel.max(r.cartesian.max_rel);
        let pass = r.azimuthal.passes(EIGEN_TOL) && r.cartesian.passes(EIGEN_TOL);
        report.assert_with("oam_eigenvalue", r.worst_eigenvalue / hbar, rel, EIGEN_TOL, pass);
    }

    if massive {
        let full = continuity_report(&beam, &pts, &st, ContinuityForm::Full)?;
        residual(&mut report, "continuity", &full, RESIDUAL_TOL);
        let tr = continuity_report(&beam, &pts, &st, ContinuityForm::Transverse)?;
        residual(&mut report, "continuity_transverse", &tr, RESIDUAL_TOL);
    }

    if massive && p.mode.is_hg() {
        let mut worst = 0.0f64;
        let mut checked = 0.0;
        for &d in &pts {
            let rho = probability_density(p, d);
            if rho > 0.0 {
                worst = worst.max((axial_probability_density(p, d)? - rho).abs() / rho);
                checked += 1.0;
            }
        }
        report.assert_below("probability_identity", checked, worst, AXIAL_TOL);
    }

    if p.k3 != 0.0 {
        let r = normalization_check(&exact, &spec.windowed())?;
        report.assert_below("normalization", r.value, (r.value - 1.0).abs(), NORM_TOL);
    }

    if massive {
        let target = FourVector::axial(hbar * p.k3, hbar * p.k4);
        let mut worst = 0.0f64;
        let mut worst_axial = target.c3;
        for tau in test_slices(p) {
            let r = current_expectation(&beam, tau, &spec)?;
            let dev = (r.value - target).max_abs() / (hbar * p.k4);
            if dev >= worst {
                worst = dev;
                worst_axial = r.value.c3;
            }
        }
        report.assert_below("current_expectation", worst_axial, worst, EXPECTATION_TOL);
    }

    if massive && p.mode.is_hg() {
        let scale = hbar * p.kappa / p.m0;
        let mut worst_u = 0.0f64;
        let mut worst_v2 = 0.0f64;
        let mut v2_at_worst = 0.0;
        for tau in test_slices(p) {
            let r = potential_expectation(p, tau, &spec)?;
            worst_u = worst_u.max(r.u.value.max_abs() / scale);
            let dev = (r.v2.value - r.v2_expected).abs() / r.v2_expected;
            if dev >= worst_v2 {
                worst_v2 = dev;
                v2_at_worst = r.v2.value;
            }
        }
        report.assert_below("potential_expectation", worst_u * scale, worst_u, EXPECTATION_TOL);
        report.report("v2_expectation", v2_at_worst, worst_v2, V2_TOL);
    }

    let expected_kin = 2.0 * hbar * hbar * p.mode_constant / (p.w0 * p.w0);
    let mut worst_kin = 0.0f64;
    let mut kin_value = expected_kin;
    for tau in [0.0, tau_for_s(p, 2.0 * p.b)] {
        let r = transverse_kinetic_expectation(p, tau, &spec)?;
        let dev = (r.value - expected_kin).abs() / expected_kin;
        if dev >= worst_kin {
            worst_kin = dev;
            kin_value = r.value;
        }
    }
    report.assert_below("transverse_kinetic", kin_value, worst_kin, EXPECTATION_TOL);

    let e = mode_energy(p);
    let c = p.units.c;
    let e_dev = ((e.e_mode - hbar * c * p.k4).abs() / e.e_mode)
        .max((e.e_mode * e.e_mode - e.e_free * e.e_free - e.transverse_term).abs() / (e.e_mode * e.e_mode));
    report.assert_below("energy_consistency", e.e_mode, e_dev, 1e-12);

    let lorentz = lorentz_check(p, VERIFY_BETA, &settings.grid)?;
    report.assert_below("lorentz_invariance", VERIFY_BETA, lorentz, BOOST_TOL);

    if massive && p.mode.is_hg() {
        let hj = hamilton_jacobi_residual(p, &pts, &st, true)?;
        residual(&mut report, "hamilton_jacobi", &hj, RESIDUAL_TOL);

        let probes = [EventCoordinates::new(0.4 * p.w0, 0.15 * p.w0, 0.0, 2.0), EventCoordinates::new(-0.55 * p.w0, 0.3 * p.w0, 0.0, -1.3)];
        let mut ratios = Vec::new();
        for d in probes {
            let err = bohm_limit_error(p, d, &[10.0 * c, 100.0 * c, 1000.0 * c])?;
            ratios.extend(err.windows(2).map(|w| w[0] / w[1]));
        }
        let dev = ratios.iter().map(|r| (r / 100.0 - 1.0).abs()).fold(0.0, f64::max);
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        report.assert_with("bohm_limit", mean, dev, LIMIT_BAND, dev.is_finite() && dev <= LIMIT_BAND);
    }

    Ok(report)
}
