//! Beam parameter bookkeeping and the dispersion relation.

use std::fmt;

use crate::error::{domain, Result};

/// Unit system for the reduced Planck constant and the speed of light.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub hbar: f64,
    pub c: f64,
}

impl UnitSystem {
    pub fn new(hbar: f64, c: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return domain(format!("hbar must be positive and finite, got {hbar}"));
        }
        if !(c.is_finite() && c > 0.0) {
            return domain(format!("c must be positive and finite, got {c}"));
        }
        Ok(Self { hbar, c })
    }

    pub fn natural() -> Self {
        Self { hbar: 1.0, c: 1.0 }
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::natural()
    }
}

/// Transverse mode of the beam.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BeamMode {
    /// Hermite-Gaussian mode with Cartesian indices `m`, `n`.
    Hg { m: u32, n: u32 },
    /// Laguerre-Gaussian mode with azimuthal index `l` and radial index `p`.
    Lg { l: i32, p: u32 },
}

impl BeamMode {
    /// Mode constant `N`: `1 + m + n` for HG, `1 + |l| + 2p` for LG.
    pub fn mode_constant(&self) -> f64 {
        match *self {
            BeamMode::Hg { m, n } => 1.0 + m as f64 + n as f64,
            BeamMode::Lg { l, p } => 1.0 + l.unsigned_abs() as f64 + 2.0 * p as f64,
        }
    }

    /// Multiplier of `arctan(s / 2b)` in the Gouy phase.
    pub fn gouy_multiplier(&self) -> f64 {
        self.mode_constant()
    }

    pub fn is_hg(&self) -> bool {
        matches!(self, BeamMode::Hg { .. })
    }

    pub fn family(&self) -> &'static str {
        match self {
            BeamMode::Hg { .. } => "HG",
            BeamMode::Lg { .. } => "LG",
        }
    }
}

impl fmt::Display for BeamMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BeamMode::Hg { m, n } => write!(f, "HG({m},{n})"),
            BeamMode::Lg { l, p } => write!(f, "LG({l},{p})"),
        }
    }
}

/// Temporal wavenumber from the dispersion relation.
///
/// The term `2 kappa (k3 + k4)` equals `2N / w0^2` independently of `k4`, so the
/// positive root is explicit: `k4 = sqrt(k3^2 + 2N/w0^2 + (m0 c / hbar)^2)`.
/// `w0 = +inf` is accepted and means the delocalized (plane-wave) limit.
pub fn solve_dispersion(m0: f64, w0: f64, k3: f64, mode_constant: f64, units: UnitSystem) -> Result<f64> {
    if !(m0.is_finite() && m0 >= 0.0) {
        return domain(format!("rest mass must be finite and non-negative, got {m0}"));
    }
    if w0.is_nan() || w0 <= 0.0 {
        return domain(format!("waist radius must be positive, got {w0}"));
    }
    if !k3.is_finite() {
        return domain(format!("axial wavenumber must be finite, got {k3}"));
    }
    if !(mode_constant.is_finite() && mode_constant >= 1.0) {
        return domain(format!("mode constant must be >= 1, got {mode_constant}"));
    }
    let transverse = if w0.is_infinite() { 0.0 } else { 2.0 * mode_constant / (w0 * w0) };
    let rest = m0 * units.c / units.hbar;
    Ok((k3 * k3 + transverse + rest * rest).sqrt())
}

/// Fully derived beam parameters.
///
/// Construct through [`derive_parameters`]; every derived field is kept
/// consistent with the inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParameters {
    pub units: UnitSystem,
    pub m0: f64,
    pub w0: f64,
    pub k3: f64,
    pub mode: BeamMode,
    /// Normalization length `L`.
    pub length: f64,
    /// Mode constant `N`.
    pub mode_constant: f64,
    pub k4: f64,
    /// Axial parameter `kappa = N / ((k3 + k4) w0^2)`.
    pub kappa: f64,
    /// Confinement parameter `b = w0^2 (k3 + k4) / 4`.
    pub b: f64,
    /// Axial velocity `v3 = c k3 / k4`.
    pub v3: f64,
}

pub fn derive_parameters(
    m0: f64,
    w0: f64,
    k3: f64,
    mode: BeamMode,
    length: f64,
    units: UnitSystem,
) -> Result<BeamParameters> {
    BeamParameters::with_mode_constant(m0, w0, k3, mode, length, units, mode.mode_constant())
}

impl BeamParameters {
    /// Like [`derive_parameters`] but with an explicit mode constant `N`.
    ///
    /// Only the expectation-value negative controls use an `N` different from
    /// [`BeamMode::mode_constant`].
    pub fn with_mode_constant(
        m0: f64,
        w0: f64,
        k3: f64,
        mode: BeamMode,
        length: f64,
        units: UnitSystem,
        mode_constant: f64,
    ) -> Result<BeamParameters> {
        if !w0.is_finite() {
            return domain("beam parameters need a finite waist radius");
        }
        if !(length.is_finite() && length > 0.0) {
            return domain(format!("normalization length must be positive, got {length}"));
        }
        let k4 = solve_dispersion(m0, w0, k3, mode_constant, units)?;
        let sum = k3 + k4;
        if !(sum > 0.0) {
            return domain("k3 + k4 must be positive");
        }
        Ok(BeamParameters {
            units,
            m0,
            w0,
            k3,
            mode,
            length,
            mode_constant,
            k4,
            kappa: mode_constant / (sum * w0 * w0),
            b: w0 * w0 * sum / 4.0,
            v3: units.c * k3 / k4,
        })
    }

    /// Same physical inputs with a different mode.
    pub fn with_mode(&self, mode: BeamMode) -> Result<BeamParameters> {
        derive_parameters(self.m0, self.w0, self.k3, mode, self.length, self.units)
    }

    /// Same inputs in a different unit system (used by the non-relativistic limit).
    pub fn with_units(&self, units: UnitSystem) -> Result<BeamParameters> {
        derive_parameters(self.m0, self.w0, self.k3, self.mode, self.length, units)
    }

    /// `K_T = 2 kappa (k3 + k4)`, identical to `2N / w0^2`.
    pub fn transverse_wavenumber_sq(&self) -> f64 {
        2.0 * self.kappa * (self.k3 + self.k4)
    }

    /// Residual of `k4^2 = k3^2 + 2 kappa (k3 + k4) + (m0 c / hbar)^2`.
    pub fn dispersion_residual(&self) -> f64 {
        let rest = self.m0 * self.units.c / self.units.hbar;
        self.k4 * self.k4 - self.k3 * self.k3 - self.transverse_wavenumber_sq() - rest * rest
    }

    /// `s / 2b`, the argument of the Gouy arctangent.
    pub fn reduced_axial(&self, s: f64) -> f64 {
        s / (2.0 * self.b)
    }

    /// Shortest length scale of the beam: `min(w0, 2b, 1/k4)`.
    pub fn length_scale(&self) -> f64 {
        self.w0.min(2.0 * self.b).min(1.0 / self.k4)
    }

    /// Reference parameter set: `m0 = 1, w0 = 2, k3 = 1, L = 1`, natural units.
    pub fn reference(mode: BeamMode) -> BeamParameters {
        derive_parameters(1.0, 2.0, 1.0, mode, 1.0, UnitSystem::natural())
            .expect("reference parameters are valid")
    }
}
