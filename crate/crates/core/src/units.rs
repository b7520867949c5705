//! Unit conventions.
//!
//! Energies and detunings are quoted in meV, times in ps, spectral phase
//! curvature in ps². Internally every frequency is an angular frequency in
//! rad/ps, obtained from an energy through `E / HBAR`.

/// Reduced Planck constant in meV·ps.
pub const HBAR: f64 = 0.658_211_9;

/// Boltzmann constant in meV/K.
pub const K_B: f64 = 0.086_173_33;

/// Converts an energy in meV to an angular frequency in rad/ps.
#[inline]
pub fn mev_to_rad_per_ps(energy: f64) -> f64 {
    energy / HBAR
}

/// Converts an angular frequency in rad/ps to an energy in meV.
#[inline]
pub fn rad_per_ps_to_mev(omega: f64) -> f64 {
    omega * HBAR
}

/// Thermal energy `k_B T` in meV.
#[inline]
pub fn thermal_energy(temperature: f64) -> f64 {
    K_B * temperature
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_are_inverse() {
        let e = 3.4;
        assert!((rad_per_ps_to_mev(mev_to_rad_per_ps(e)) - e).abs() < 1e-14);
    }

    #[test]
    fn thermal_energy_at_ten_kelvin() {
        assert!((thermal_energy(10.0) - 0.8617).abs() < 1e-4);
    }
}
