//! Physical constants in Hartree atomic units and converters to the SI
//! quantities that appear in configuration files.
//!
//! Values are CODATA 2018. Inside the crate everything is in atomic units;
//! the helpers here are only meant for I/O boundaries.

use std::f64::consts::PI;

/// Bohr radius (m).
pub const BOHR_RADIUS_M: f64 = 5.291_772_109_03e-11;
/// Hartree energy (J).
pub const HARTREE_J: f64 = 4.359_744_722_207_1e-18;
/// Atomic unit of time (s).
pub const AU_TIME_S: f64 = 2.418_884_326_585_7e-17;
/// Speed of light in atomic units (inverse fine-structure constant).
pub const C_AU: f64 = 137.035_999_084;
/// Boltzmann constant (J/K), exact in SI.
pub const BOLTZMANN_J_PER_K: f64 = 1.380_649e-23;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub charge_e: f64,
    pub mass_e: f64,
    pub eps0: f64,
    /// Hartree per kelvin.
    pub k_boltzmann: f64,
    pub c_light: f64,
}

impl PhysicalConstants {
    pub const fn atomic() -> Self {
        Self {
            hbar: 1.0,
            charge_e: 1.0,
            mass_e: 1.0,
            eps0: 1.0 / (4.0 * PI),
            k_boltzmann: BOLTZMANN_J_PER_K / HARTREE_J,
            c_light: C_AU,
        }
    }

    /// k_B T in Hartree.
    pub fn thermal_energy(&self, temperature_k: f64) -> f64 {
        self.k_boltzmann * temperature_k
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::atomic()
    }
}

pub mod units {
    use super::*;

    pub fn nm_to_au(nm: f64) -> f64 {
        nm * 1e-9 / BOHR_RADIUS_M
    }

    pub fn au_to_nm(x: f64) -> f64 {
        x * BOHR_RADIUS_M / 1e-9
    }

    pub fn um_to_au(um: f64) -> f64 {
        um * 1e-6 / BOHR_RADIUS_M
    }

    pub fn au_to_um(x: f64) -> f64 {
        x * BOHR_RADIUS_M / 1e-6
    }

    pub fn m_to_au(m: f64) -> f64 {
        m / BOHR_RADIUS_M
    }

    pub fn au_to_m(x: f64) -> f64 {
        x * BOHR_RADIUS_M
    }

    /// Vacuum wavelength (nm) to angular frequency (a.u.): ω = 2πc/λ.
    pub fn wavelength_nm_to_omega(lambda_nm: f64) -> f64 {
        2.0 * PI * C_AU / nm_to_au(lambda_nm)
    }

    pub fn omega_to_wavelength_nm(omega: f64) -> f64 {
        au_to_nm(2.0 * PI * C_AU / omega)
    }

    pub fn fs_to_au(fs: f64) -> f64 {
        fs * 1e-15 / AU_TIME_S
    }

    pub fn au_to_fs(t: f64) -> f64 {
        t * AU_TIME_S / 1e-15
    }

    pub fn joule_to_au(j: f64) -> f64 {
        j / HARTREE_J
    }

    pub fn au_to_joule(e: f64) -> f64 {
        e * HARTREE_J
    }

    pub fn uj_to_au(uj: f64) -> f64 {
        joule_to_au(uj * 1e-6)
    }

    pub fn au_to_uj(e: f64) -> f64 {
        au_to_joule(e) * 1e6
    }

    /// Temperature (K) to thermal energy k_B T (a.u.).
    pub fn kelvin_to_au_energy(t_k: f64) -> f64 {
        t_k * BOLTZMANN_J_PER_K / HARTREE_J
    }

    pub fn au_energy_to_kelvin(e: f64) -> f64 {
        e * HARTREE_J / BOLTZMANN_J_PER_K
    }
}
