use kgbeam::diffops::{kg_residual, sample_points, StencilSpec};
use kgbeam::{boost_event, boost_wavevector, derive_parameters, Beam, BeamParameters, Event};
use rayon::prelude::*;

use crate::config::{usage, CliResult, GridSpec};
use crate::report::VerificationReport;
use crate::verify::{BOOST_TOL, RESIDUAL_TOL, SAMPLE_SEED};

const AXIAL_SLICES: usize = 5;

/// Parameters of the same beam seen from a frame moving with velocity `beta c` along the axis.
pub fn boosted_params(p: &BeamParameters, beta: f64) -> CliResult<BeamParameters> {
    if !(beta.is_finite() && beta.abs() < 1.0) {
        return usage(format!("beta {beta}: need |beta| < 1"));
    }
    let (k3, _) = boost_wavevector(p.k3, p.k4, beta)?;
    Ok(derive_parameters(p.m0, p.w0, k3, p.mode, p.length, p.units)?)
}

/// Largest relative change of `|Psi|^2` between an event and its boosted image,
/// over a transverse grid times five axial positions spanning `|s| <= 2b`.
pub fn lorentz_check(p: &BeamParameters, beta: f64, grid: &GridSpec) -> CliResult<f64> {
    let pb = boosted_params(p, beta)?;
    let beam = Beam::new(*p);
    let boosted = Beam::new(pb);
    let c = p.units.c;
    let half = grid.extent * p.w0;
    let events: Vec<Event> = (0..AXIAL_SLICES)
        .flat_map(|k| {
            let s = (k as f64 - 2.0) * p.b;
            (0..grid.nx).flat_map(move |i| {
                (0..grid.ny).map(move |j| {
                    Event::new(GridSpec::coord(grid.nx, i, half), GridSpec::coord(grid.ny, j, half), 0.5 * s, 0.5 * s / c)
                })
            })
        })
        .collect();
    let worst = events
        .par_iter()
        .map(|&e| {
            let before = beam.psi_at(e).norm_sqr();
            let after = boosted.psi_at(boost_event(e, beta, p.units).expect("beta checked")).norm_sqr();
            if before == 0.0 && after == 0.0 {
                0.0
            } else {
                (after - before).abs() / before.max(after)
            }
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

pub fn run(p: &BeamParameters, beta: f64, grid: &GridSpec, points: usize) -> CliResult<VerificationReport> {
    let pb = boosted_params(p, beta)?;
    let mut report = VerificationReport::new(format!("boost {} beta={beta}", p.mode));
    let (k3b, k4b) = boost_wavevector(p.k3, p.k4, beta)?;
    report.report("boosted_k3", k3b, 0.0, 0.0);
    report.report("boosted_k4", k4b, 0.0, 0.0);
    report.assert_below("boosted_dispersion", pb.k4, (pb.k4 - k4b).abs() / k4b, 1e-12);
    let worst = lorentz_check(p, beta, grid)?;
    report.assert_below("density_invariance", beta, worst, BOOST_TOL);
    let st = StencilSpec::for_params(&pb);
    let r = kg_residual(&Beam::new(pb), &sample_points(&pb, points, SAMPLE_SEED), &st)?;
    report.assert_with("kg_residual", r.max_abs, r.max_rel, RESIDUAL_TOL, r.passes(RESIDUAL_TOL));
    Ok(report)
}
