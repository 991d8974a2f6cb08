//! Field modes and the couplings derived from them.

use crate::constants::PhysicalConstants;
use crate::error::{require_non_negative, require_positive, Error, Result};

/// One quantized field mode as seen by the electron (dipole approximation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub omega: f64,
    /// Vector-potential amplitude 𝒜.
    pub amp_a: f64,
    /// Electric amplitude ℰ = 𝒜ω.
    pub amp_e: f64,
    /// Coupling γ = e𝒜/(mħω), dimension 1/momentum.
    pub gamma: f64,
}

impl Mode {
    pub fn from_amplitude(omega: f64, amp_a: f64, constants: &PhysicalConstants) -> Result<Self> {
        let gamma = coupling_gamma(omega, amp_a, constants)?;
        Ok(Self {
            omega,
            amp_a,
            amp_e: amp_a * omega,
            gamma,
        })
    }

    /// Inverse of [`coupling_gamma`]: picks 𝒜 so that the mode has coupling `gamma`.
    pub fn from_gamma(omega: f64, gamma: f64, constants: &PhysicalConstants) -> Result<Self> {
        require_positive("omega", omega)?;
        require_non_negative("gamma", gamma)?;
        let amp_a = gamma * constants.mass_e * constants.hbar * omega / constants.charge_e;
        Self::from_amplitude(omega, amp_a, constants)
    }

    /// Optical period 2π/ω.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }
}

/// γ = e𝒜 / (m ħ ω).
pub fn coupling_gamma(omega: f64, amp_a: f64, constants: &PhysicalConstants) -> Result<f64> {
    require_positive("omega", omega)?;
    require_non_negative("amp_A", amp_a)?;
    Ok(constants.charge_e * amp_a / (constants.mass_e * constants.hbar * omega))
}

/// Interaction-shifted mass, 1/m(γ) = 1/m − 2Σ ħω_n γ_n².
pub fn effective_mass(modes: &[Mode], constants: &PhysicalConstants) -> Result<f64> {
    let inv_m = 1.0 / constants.mass_e;
    let shift = 2.0 * modes
        .iter()
        .fold(0.0, |acc, m| acc + constants.hbar * m.omega * m.gamma * m.gamma);
    if shift >= inv_m {
        return Err(Error::CouplingOutsideValidity {
            coupling_sum: shift,
            limit: inv_m,
        });
    }
    Ok(1.0 / (inv_m - shift))
}

/// Bose–Einstein occupation n̄ = 1/(exp(ħω/k_BT) − 1).
pub fn thermal_mean_photon(omega: f64, temperature: f64, constants: &PhysicalConstants) -> Result<f64> {
    require_positive("omega", omega)?;
    require_positive("temperature", temperature)?;
    let x = constants.hbar * omega / constants.thermal_energy(temperature);
    Ok(1.0 / x.exp_m1())
}

/// coth(ħω/2k_BT) written as 2n̄ + 1, finite for every valid input.
pub fn thermal_coth_factor(omega: f64, temperature: f64, constants: &PhysicalConstants) -> Result<f64> {
    Ok(2.0 * thermal_mean_photon(omega, temperature, constants)? + 1.0)
}
