use std::io::Write;
use std::str::FromStr;

use kgbeam::currents::current_field;
use kgbeam::diffops::StencilSpec;
use kgbeam::potentials::{bohm_potential, quantum_potential, quantum_potential_numeric, scalar_potential};
use kgbeam::wavefield::beam_radius;
use kgbeam::{Beam, BeamParameters, EventCoordinates};
use rayon::prelude::*;

use crate::config::{CliError, CliResult, GridSpec};
use crate::output::{num, Csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Psi,
    Density,
    Current,
    Potential,
    V2,
    BohmQ,
}

impl FromStr for Quantity {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "psi" => Ok(Self::Psi),
            "density" => Ok(Self::Density),
            "current" => Ok(Self::Current),
            "potential" => Ok(Self::Potential),
            "v2" => Ok(Self::V2),
            "bohm_q" => Ok(Self::BohmQ),
            other => Err(CliError::Usage(format!(
                "unknown quantity `{other}` (expected psi, density, current, potential, v2, bohm_q)"
            ))),
        }
    }
}

impl Quantity {
    fn columns(self) -> &'static [&'static str] {
        match self {
            Self::Psi => &["psi_re", "psi_im"],
            Self::Density => &["density"],
            Self::Current => &["j1", "j2", "j3", "j4"],
            Self::Potential => &["u1", "u2", "u3", "u4"],
            Self::V2 => &["v2"],
            Self::BohmQ => &["bohm_q"],
        }
    }

    fn eval(self, beam: &Beam, d: EventCoordinates, st: &StencilSpec) -> kgbeam::Result<Vec<f64>> {
        let p = &beam.params;
        Ok(match self {
            Self::Psi => {
                let z = beam.psi(d);
                vec![z.re, z.im]
            }
            Self::Density => vec![beam.density(d)],
            Self::Current => current_field(beam, d, st)?.j.components().to_vec(),
            Self::Potential if p.mode.is_hg() => quantum_potential(p, d)?.components().to_vec(),
            Self::Potential => quantum_potential_numeric(beam, d, st)?.components().to_vec(),
            Self::V2 => vec![scalar_potential(p, d)?],
            Self::BohmQ => vec![bohm_potential(p, d)?],
        })
    }
}

/// Slice `tau` (with `xi3 = v3 tau`) sampled on a grid of half-width `extent * w(s)`.
pub fn write(out: impl Write, p: &BeamParameters, grid: &GridSpec, tau: f64, q: Quantity) -> CliResult<()> {
    let beam = Beam::new(*p);
    let st = StencilSpec::for_params(p);
    let c = p.units.c;
    let centre = EventCoordinates::on_slice(p, 0.0, 0.0, tau);
    let s = centre.s(c);
    let w = beam_radius(p, s);
    // errors such as an LG closed form or zero mass surface here rather than per point
    q.eval(&beam, centre, &st)?;

    let half = grid.extent * w;
    let rows: Vec<Vec<String>> = (0..grid.nx * grid.ny)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / grid.ny, k % grid.ny);
            let d = EventCoordinates::on_slice(p, GridSpec::coord(grid.nx, i, half), GridSpec::coord(grid.ny, j, half), tau);
            let rho = d.rho_sq().sqrt();
            let values = q.eval(&beam, d, &st)?;
            let mut row =
                vec![num(tau), num(d.xi1), num(d.xi2), num(d.xi3), num(rho), num(s)];
            row.extend([d.xi1 / w, d.xi2 / w, rho / w, p.reduced_axial(s)].map(num));
            row.extend(values.into_iter().map(num));
            Ok(row)
        })
        .collect::<kgbeam::Result<_>>()?;

    let mut header = vec!["tau", "xi1", "xi2", "xi3", "rho", "s", "xi1_over_w", "xi2_over_w", "rho_over_w", "s_over_2b"];
    header.extend_from_slice(q.columns());
    let io = |e: std::io::Error| CliError::Io { path: "<output>".into(), source: e };
    let mut csv = Csv::new(out, &header).map_err(io)?;
    for row in &rows {
        csv.row(row).map_err(io)?;
    }
    csv.finish().map_err(io)
}
