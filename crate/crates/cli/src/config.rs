use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use kgbeam::{derive_parameters, BeamError, BeamMode, BeamParameters, UnitSystem};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid beam configuration: {0}")]
    Beam(#[from] BeamError),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Flags shared by every subcommand. All are optional so the config file and
/// built-in defaults can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Beam mode, `hg:M,N` or `lg:L,P`
    #[arg(long)]
    pub mode: Option<String>,
    /// Rest mass
    #[arg(long, allow_hyphen_values = true)]
    pub m0: Option<f64>,
    /// Waist radius
    #[arg(long, allow_hyphen_values = true)]
    pub w0: Option<f64>,
    /// Axial wavenumber
    #[arg(long, allow_hyphen_values = true)]
    pub k3: Option<f64>,
    /// Normalization length
    #[arg(long, allow_hyphen_values = true)]
    pub length: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hbar: Option<f64>,
    /// Speed of light
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Transverse grid resolution, `NxN`
    #[arg(long)]
    pub grid: Option<String>,
    /// Grid half-width in units of the beam radius
    #[arg(long, allow_hyphen_values = true)]
    pub extent: Option<f64>,
    /// Output path; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value file with defaults for any flag
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Machine-readable JSON report
    #[arg(long)]
    pub json: bool,
}

const KNOWN_KEYS: &[&str] = &[
    "mode", "m0", "w0", "k3", "length", "hbar", "c", "grid", "extent", "out", "json", "tau", "quantity", "beta",
    "max_m", "max_n", "seeds", "tau_range", "steps", "points", "corrupt",
];

/// Parsed `key=value` file. Blank lines and `#` comments are ignored.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
            let key = k.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key `{key}`", n + 1));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config key `{key}`: cannot parse `{v}`"))),
        }
    }
}

pub fn parse_mode(text: &str) -> CliResult<BeamMode> {
    let lower = text.trim().to_ascii_lowercase();
    let Some((family, idx)) = lower.split_once(':') else {
        return usage(format!("mode `{text}`: expected hg:M,N or lg:L,P"));
    };
    let Some((a, b)) = idx.split_once(',') else {
        return usage(format!("mode `{text}`: expected two comma-separated indices"));
    };
    let bad = || CliError::Usage(format!("mode `{text}`: bad index"));
    match family {
        "hg" => Ok(BeamMode::Hg { m: a.trim().parse().map_err(|_| bad())?, n: b.trim().parse().map_err(|_| bad())? }),
        "lg" => Ok(BeamMode::Lg { l: a.trim().parse().map_err(|_| bad())?, p: b.trim().parse().map_err(|_| bad())? }),
        _ => usage(format!("mode `{text}`: unknown family `{family}`")),
    }
}

pub fn parse_grid(text: &str) -> CliResult<(usize, usize)> {
    let lower = text.trim().to_ascii_lowercase();
    let (a, b) = lower.split_once('x').ok_or_else(|| CliError::Usage(format!("grid `{text}`: expected NxN")))?;
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("grid `{text}`: bad size")));
    Ok((parse(a)?, parse(b)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    /// Half-width in units of the local beam radius.
    pub extent: f64,
}

impl GridSpec {
    pub const MIN_RESOLUTION: usize = 8;

    pub fn new(nx: usize, ny: usize, extent: f64) -> CliResult<Self> {
        if nx < Self::MIN_RESOLUTION || ny < Self::MIN_RESOLUTION {
            return usage(format!("grid {nx}x{ny}: resolution must be at least {}", Self::MIN_RESOLUTION));
        }
        if !(extent.is_finite() && extent >= 1.0) {
            return usage(format!("extent {extent}: must be a finite number >= 1"));
        }
        Ok(Self { nx, ny, extent })
    }

    /// Coordinate of node `i` out of `n` across `[-half, half]`.
    pub fn coord(n: usize, i: usize, half: f64) -> f64 {
        half * (2.0 * i as f64 / (n - 1) as f64 - 1.0)
    }
}

/// Everything a subcommand needs after merging flags, file and defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: BeamParameters,
    pub grid: GridSpec,
    pub out: Option<PathBuf>,
    pub json: bool,
    pub file: ConfigFile,
}

impl RunConfig {
    pub fn resolve(common: &CommonArgs) -> CliResult<Self> {
        let file = match &common.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let mode = match common.mode.as_deref().or(file.raw("mode")) {
            Some(m) => parse_mode(m)?,
            None => BeamMode::Hg { m: 0, n: 0 },
        };
        let num = |flag: Option<f64>, key: &str, default: f64| -> CliResult<f64> {
            Ok(flag.or(file.parsed(key)?).unwrap_or(default))
        };
        let m0 = num(common.m0, "m0", 1.0)?;
        let w0 = num(common.w0, "w0", 2.0)?;
        let k3 = num(common.k3, "k3", 1.0)?;
        let length = num(common.length, "length", 1.0)?;
        let hbar = num(common.hbar, "hbar", 1.0)?;
        let c = num(common.c, "c", 1.0)?;
        if !w0.is_finite() {
            return usage("w0 must be finite");
        }
        if !(length.is_finite() && length > 0.0) {
            return usage(format!("length {length}: must be positive"));
        }
        let units = UnitSystem::new(hbar, c)?;
        let params = derive_parameters(m0, w0, k3, mode, length, units)?;

        let (nx, ny) = match common.grid.as_deref().or(file.raw("grid")) {
            Some(g) => parse_grid(g)?,
            None => (32, 32),
        };
        let extent = num(common.extent, "extent", 2.5)?;
        let grid = GridSpec::new(nx, ny, extent)?;
        let out = common.out.clone().or_else(|| file.raw("out").map(PathBuf::from));
        let json = common.json || file.parsed::<bool>("json")?.unwrap_or(false);
        Ok(Self { params, grid, out, json, file })
    }

    /// Flag value, then config file, then default.
    pub fn pick<T: std::str::FromStr>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.file.parsed(key)?.unwrap_or(default)),
        }
    }

    pub fn pick_str(&self, flag: Option<&str>, key: &str) -> Option<String> {
        flag.or(self.file.raw(key)).map(str::to_string)
    }
}
