//! LA-phonon bath: super-Ohmic deformation-potential spectral density and
//! weak-coupling transition rates between the instantaneous dressed states.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::units::{thermal_energy, HBAR};

/// Phonon bath parameters.
///
/// `coupling` is the prefactor `A` of `J(ω) = A ω³ exp(-ω²/ω_c²)` in ps²
/// (ω in rad/ps, J in ps⁻¹); `cutoff` is `ħω_c` in meV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononEnvironment {
    pub temperature: f64,
    pub coupling: f64,
    pub cutoff: f64,
    pub enabled: bool,
}

impl Default for PhononEnvironment {
    /// InGaAs/GaAs deformation-potential values (A = 0.027 ps²,
    /// ħω_c = 2.2 meV) at 4.2 K.
    fn default() -> Self {
        Self {
            temperature: 4.2,
            coupling: 0.027,
            cutoff: 2.2,
            enabled: true,
        }
    }
}

impl PhononEnvironment {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::param("temperature_K", "must be >= 0"));
        }
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(Error::param("coupling_ps2", "must be >= 0"));
        }
        if !(self.cutoff.is_finite() && self.cutoff > 0.0) {
            return Err(Error::param("cutoff_meV", "must be positive"));
        }
        Ok(())
    }

    pub fn disabled() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }
}

/// `J(ω)` in ps⁻¹ for a phonon energy `energy` in meV.
pub fn spectral_density(energy: f64, env: &PhononEnvironment) -> f64 {
    let w = energy / HBAR;
    let wc = env.cutoff / HBAR;
    env.coupling * w * w * w * (-(w * w) / (wc * wc)).exp()
}

/// Energy (meV) at which `J` peaks: `ħω_c √(3/2)`.
pub fn spectral_density_peak(env: &PhononEnvironment) -> f64 {
    env.cutoff * 1.5f64.sqrt()
}

/// Bose-Einstein occupation of a mode of energy `energy` (meV).
pub fn bose_occupation(energy: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return 0.0;
    }
    1.0 / (energy / thermal_energy(temperature)).exp_m1()
}

/// Downhill (phonon emission) and uphill (phonon absorption) rates in ps⁻¹
/// between dressed states split by `splitting` meV, for unit mixing
/// (`sin 2θ = 1`). The dynamics scales both by `sin² 2θ`.
pub fn dressed_rates(splitting: f64, env: &PhononEnvironment) -> (f64, f64) {
    if splitting <= 0.0 {
        return (0.0, 0.0);
    }
    let j = FRAC_PI_2 * spectral_density(splitting, env);
    if j == 0.0 {
        return (0.0, 0.0);
    }
    let n = bose_occupation(splitting, env.temperature);
    (j * (n + 1.0), j * n)
}
