use std::f64::consts::PI;
use std::io::Write;

use kgbeam::diffops::{below_amplitude_floor, canonical_momentum, StencilSpec};
use kgbeam::wavefield::beam_radius;
use kgbeam::{Beam, BeamMode, BeamParameters, EventCoordinates};
use serde::Serialize;

use crate::config::{usage, CliError, CliResult};
use crate::output::{num, Csv};

const CIRCULATION_NODES: usize = 256;

#[derive(Debug, Clone, Serialize)]
pub struct SeedSummary {
    pub seed: usize,
    pub xi1: f64,
    pub xi2: f64,
    /// Steps completed before truncation (or all of them).
    pub steps: usize,
    pub truncated: bool,
    /// Largest relative drift of `rho / w` along the trajectory.
    pub rho_over_w_drift: f64,
    /// `oint m0 v . dl / (2 pi hbar)` on the circle through the seed; LG modes only.
    pub circulation: Option<f64>,
}

/// Seeds spread over `rho <= 2 w0`: radii evenly spaced, angles by the golden angle.
pub fn default_seeds(p: &BeamParameters, count: usize) -> Vec<(f64, f64)> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let r = 2.0 * p.w0 * (i + 1) as f64 / (count + 1) as f64;
            let a = golden * i as f64;
            (r * a.cos(), r * a.sin())
        })
        .collect()
}

/// Transverse flow velocity `c grad(phase) / k4`, which moves with the beam envelope.
fn velocity(beam: &Beam, st: &StencilSpec, x: f64, y: f64, tau: f64) -> Option<[f64; 2]> {
    let p = &beam.params;
    let d = EventCoordinates::on_slice(p, x, y, tau);
    if !(x.is_finite() && y.is_finite()) || below_amplitude_floor(beam, d) {
        return None;
    }
    let mom = canonical_momentum(beam, d, st);
    let f = p.units.c / (p.units.hbar * p.k4);
    let v = [f * mom[0].re, f * mom[1].re];
    v.iter().all(|c| c.is_finite()).then_some(v)
}

/// `oint Re(p) . dl / (2 pi hbar)` around the circle of radius `r` on slice `tau`.
pub fn circulation(beam: &Beam, st: &StencilSpec, r: f64, tau: f64) -> f64 {
    let p = &beam.params;
    let dphi = 2.0 * PI / CIRCULATION_NODES as f64;
    let sum: f64 = (0..CIRCULATION_NODES)
        .map(|k| {
            let (s, c) = (k as f64 * dphi).sin_cos();
            let mom = canonical_momentum(beam, EventCoordinates::on_slice(p, r * c, r * s, tau), st);
            (-s * mom[0].re + c * mom[1].re) * r * dphi
        })
        .sum();
    sum / (2.0 * PI * p.units.hbar)
}

pub struct FlowSettings {
    pub seeds: Vec<(f64, f64)>,
    pub tau_start: f64,
    pub tau_end: f64,
    pub steps: usize,
}

pub fn write(out: impl Write, p: &BeamParameters, settings: &FlowSettings) -> CliResult<Vec<SeedSummary>> {
    if settings.steps == 0 {
        return usage("steps must be positive");
    }
    if !(settings.tau_start.is_finite() && settings.tau_end.is_finite()) {
        return usage("tau range must be finite");
    }
    if p.k4 == 0.0 {
        return usage("flow needs a nonzero k4");
    }
    for &(x, y) in &settings.seeds {
        let rho = x.hypot(y);
        if !(rho <= 2.0 * p.w0 * (1.0 + 1e-12)) {
            return usage(format!("seed ({x}, {y}) lies outside rho <= 2 w0"));
        }
    }
    let beam = Beam::new(*p);
    let st = StencilSpec::for_params(p);
    let c = p.units.c;
    let dt = (settings.tau_end - settings.tau_start) / settings.steps as f64;
    let header = ["seed", "step", "tau", "xi1", "xi2", "rho", "s", "rho_over_w", "s_over_2b", "status"];
    let io = |e: std::io::Error| CliError::Io { path: "<output>".into(), source: e };
    let mut csv = Csv::new(out, &header).map_err(io)?;
    let mut summaries = Vec::new();

    for (idx, &(x0, y0)) in settings.seeds.iter().enumerate() {
        let (mut x, mut y) = (x0, y0);
        let mut truncated = false;
        let mut done = 0;
        let mut ratio0 = None;
        let mut drift = 0.0f64;
        for step in 0..=settings.steps {
            let tau = settings.tau_start + step as f64 * dt;
            let s = EventCoordinates::on_slice(p, x, y, tau).s(c);
            let w = beam_radius(p, s);
            let rho = x.hypot(y);
            let r0 = *ratio0.get_or_insert(rho / w);
            if r0 > 0.0 {
                drift = drift.max((rho / w - r0).abs() / r0);
            }
            let next = if step < settings.steps { rk4(&beam, &st, x, y, tau, dt) } else { Some((x, y)) };
            let status = if next.is_some() { "ok" } else { "truncated" };
            csv.row(&[
                idx.to_string(),
                step.to_string(),
                num(tau),
                num(x),
                num(y),
                num(rho),
                num(s),
                num(rho / w),
                num(p.reduced_axial(s)),
                status.to_string(),
            ])
            .map_err(io)?;
            done = step;
            match next {
                Some((nx, ny)) => (x, y) = (nx, ny),
                None => {
                    truncated = true;
                    break;
                }
            }
        }
        let circ = matches!(p.mode, BeamMode::Lg { .. }).then(|| {
            let r = x0.hypot(y0);
            let r = if r > 0.0 { r } else { 0.5 * p.w0 };
            circulation(&beam, &st, r, settings.tau_start)
        });
        summaries.push(SeedSummary {
            seed: idx,
            xi1: x0,
            xi2: y0,
            steps: done,
            truncated,
            rho_over_w_drift: drift,
            circulation: circ,
        });
    }
    csv.finish().map_err(io)?;
    Ok(summaries)
}

fn rk4(beam: &Beam, st: &StencilSpec, x: f64, y: f64, tau: f64, dt: f64) -> Option<(f64, f64)> {
    let k1 = velocity(beam, st, x, y, tau)?;
    let k2 = velocity(beam, st, x + 0.5 * dt * k1[0], y + 0.5 * dt * k1[1], tau + 0.5 * dt)?;
    let k3 = velocity(beam, st, x + 0.5 * dt * k2[0], y + 0.5 * dt * k2[1], tau + 0.5 * dt)?;
    let k4 = velocity(beam, st, x + dt * k3[0], y + dt * k3[1], tau + dt)?;
    let nx = x + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    let ny = y + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    (nx.is_finite() && ny.is_finite()).then_some((nx, ny))
}
