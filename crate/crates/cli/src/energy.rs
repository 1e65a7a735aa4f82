use std::io::Write;

use kgbeam::expectation::mode_energy;
use kgbeam::{BeamMode, BeamParameters};

use crate::config::{usage, CliError, CliResult};
use crate::output::{num, Csv};

pub const MAX_INDEX: u32 = 64;

/// One row per mode of the configured family up to the given indices.
pub fn write(out: impl Write, p: &BeamParameters, max_a: u32, max_b: u32) -> CliResult<()> {
    if max_a > MAX_INDEX || max_b > MAX_INDEX {
        return usage(format!("mode range must stay within {MAX_INDEX}"));
    }
    let header: [&str; 7] = match p.mode {
        BeamMode::Hg { .. } => ["m", "n", "N", "k4", "E_mode", "E_free", "hbar2_KT"],
        BeamMode::Lg { .. } => ["l", "p", "N", "k4", "E_mode", "E_free", "hbar2_KT"],
    };
    let io = |e: std::io::Error| CliError::Io { path: "<output>".into(), source: e };
    let mut csv = Csv::new(out, &header).map_err(io)?;
    let c = p.units.c;
    for a in 0..=max_a {
        for b in 0..=max_b {
            let mode = match p.mode {
                BeamMode::Hg { .. } => BeamMode::Hg { m: a, n: b },
                BeamMode::Lg { .. } => BeamMode::Lg { l: a as i32, p: b },
            };
            let pm = p.with_mode(mode)?;
            let e = mode_energy(&pm);
            csv.row(&[
                a.to_string(),
                b.to_string(),
                format!("{}", pm.mode_constant as u64),
                num(pm.k4),
                num(e.e_mode),
                num(e.e_free),
                num(e.transverse_term / (c * c)),
            ])
            .map_err(io)?;
        }
    }
    csv.finish().map_err(io)
}
