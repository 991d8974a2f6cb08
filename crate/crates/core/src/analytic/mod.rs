//! Closed-form evolution of the coupled electron–field system.
//!
//! In the Heisenberg picture the position operator splits into an electron
//! part 𝔛(t) = X + P·(t/m(γ) + 2ħΣγ_n² sin ω_n t) and a field part
//! (e/m)Ā₀(t) = iħΣ(Γ_n* a_n† − Γ_n a_n). Since the initial state is a
//! product, the two parts are uncorrelated and every electron observable
//! below reduces to moments of the electron packet plus one-mode field
//! moments summed over modes (left to right in mode order).

mod classical;
mod window;

pub use classical::{classical_trajectory, ClassicalPoint, ClassicalWaveform, ModeSumWaveform, Monochromatic};
pub use window::{reduction_window, spectral_width_bound, ReductionWindow, SpectralWidthCheck};

use num_complex::Complex64 as C64;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::mode::{thermal_coth_factor, Mode};
use crate::state::{Electron, Field, FieldModeState};

/// 1 − e^{−iωt} without cancellation at small ωt.
fn one_minus_phase(omega: f64, t: f64) -> C64 {
    let h = 0.5 * omega * t;
    C64::new(2.0 * h.sin().powi(2), (omega * t).sin())
}

/// Γ(t) = γ(1 − e^{−iωt}).
pub fn gamma_factor(mode: &Mode, t: f64) -> C64 {
    one_minus_phase(mode.omega, t) * mode.gamma
}

/// S(t) = Σ γ_n² sin ω_n t, the state-independent kernel of the P-dependent terms.
pub fn sine_kernel(field: &Field, t: f64) -> f64 {
    field
        .modes()
        .iter()
        .fold(0.0, |acc, m| acc + m.gamma * m.gamma * (m.omega * t).sin())
}

/// Coherent and squeeze labels of one mode after time t, conditioned on electron momentum p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolvedModeLabel {
    pub alpha_t: C64,
    pub delta_t: f64,
    pub z_t: C64,
}

pub fn evolve_labels(state: &FieldModeState, mode: &Mode, p: f64, t: f64) -> Result<EvolvedModeLabel> {
    let (alpha, z0) = match *state {
        FieldModeState::Vacuum => (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
        FieldModeState::Coherent { alpha } => (alpha, C64::new(0.0, 0.0)),
        FieldModeState::SqueezedCoherent { alpha, r, theta } => (alpha, C64::from_polar(r, theta)),
        FieldModeState::Fock { .. } | FieldModeState::Thermal { .. } => {
            return Err(Error::UnsupportedState(state.name()))
        }
    };
    let pg = C64::new(p * mode.gamma, 0.0);
    let rot = C64::from_polar(1.0, -mode.omega * t);
    let alpha_t = pg + (alpha - pg) * rot;
    let delta_t = pg.re * (alpha - (alpha - pg) * rot).im;
    let z_t = z0 * C64::from_polar(1.0, -2.0 * mode.omega * t);
    Ok(EvolvedModeLabel { alpha_t, delta_t, z_t })
}

/// Mean and variance of P. Both are constants of motion because [H, P] = 0.
pub fn momentum_stats(electron: &Electron, constants: &PhysicalConstants) -> (f64, f64) {
    let m = electron.moments(constants);
    (m.mean_p, m.var_p)
}

/// ⟨Ā₀⟩(t), the expectation of the time-integrated free vector potential.
pub fn abar_mean(field: &Field, t: f64) -> f64 {
    field.iter().fold(0.0, |acc, (mode, state)| {
        let alpha = state.mean_amplitude();
        acc + 2.0 * mode.amp_a / mode.omega * (alpha * one_minus_phase(mode.omega, t)).im
    })
}

/// Noise multiplier of the state relative to the coherent value, minus one.
/// Written so that no cancellation happens for nearly-coherent states.
fn excess_factor(state: &FieldModeState, mode: &Mode, gf: C64, constants: &PhysicalConstants) -> f64 {
    let g2 = gf.norm_sqr();
    match *state {
        FieldModeState::Vacuum | FieldModeState::Coherent { .. } => 0.0,
        FieldModeState::SqueezedCoherent { r, theta, .. } => {
            let (s, c) = (r.sinh(), r.cosh());
            let rot = (C64::from_polar(1.0, theta) * gf * gf).re;
            2.0 * s * (s * g2 - c * rot)
        }
        FieldModeState::Fock { n } => 2.0 * n as f64 * g2,
        FieldModeState::Thermal { temperature } => {
            let coth = thermal_coth_factor(mode.omega, temperature, constants).unwrap_or(f64::NAN);
            (coth - 1.0) * g2
        }
    }
}

fn abar_unit(constants: &PhysicalConstants) -> f64 {
    let r = constants.hbar * constants.mass_e / constants.charge_e;
    r * r
}

/// Per-mode contribution to Δ²Ā₀(t).
///
/// Vacuum/coherent give (ħ²m²/e²)|Γ|², squeezed coherent
/// (ħ²m²/e²)|cosh r Γ* − sinh r e^{iθ}Γ|², Fock (2n+1) times the vacuum value
/// and a thermal mode coth(ħω/2k_BT) times it.
pub fn abar_variance_mode(state: &FieldModeState, mode: &Mode, t: f64, constants: &PhysicalConstants) -> f64 {
    let gf = gamma_factor(mode, t);
    let v = match *state {
        FieldModeState::SqueezedCoherent { r, theta, .. } => {
            (gf.conj() * r.cosh() - C64::from_polar(r.sinh(), theta) * gf).norm_sqr()
        }
        FieldModeState::Fock { n } => (2.0 * n as f64 + 1.0) * gf.norm_sqr(),
        FieldModeState::Thermal { temperature } => {
            thermal_coth_factor(mode.omega, temperature, constants).unwrap_or(f64::NAN) * gf.norm_sqr()
        }
        FieldModeState::Vacuum | FieldModeState::Coherent { .. } => gf.norm_sqr(),
    };
    abar_unit(constants) * v
}

/// Δ²Ā₀(state) − Δ²Ā₀(coherent) for one mode, evaluated without cancellation.
pub fn abar_variance_excess(state: &FieldModeState, mode: &Mode, t: f64, constants: &PhysicalConstants) -> f64 {
    abar_unit(constants) * excess_factor(state, mode, gamma_factor(mode, t), constants)
}

/// ⟨X⟩(t) = ⟨X⟩(0) + p₀t/m(γ) − (e/m)⟨Ā₀⟩(t) + 2ħp₀Σγ_n² sin ω_n t.
pub fn position_mean(electron: &Electron, field: &Field, t: f64, constants: &PhysicalConstants) -> f64 {
    let m = electron.moments(constants);
    let drift = m.mean_p * t / field.effective_mass();
    let field_part = constants.charge_e / constants.mass_e * abar_mean(field, t);
    let recoil = 2.0 * constants.hbar * m.mean_p * sine_kernel(field, t);
    m.mean_x + drift - field_part + recoil
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceBreakdown {
    /// Free spreading with m → m(γ).
    pub free_spread: f64,
    /// (e²/m²)Δ²Ā₀(t).
    pub field_term: f64,
    /// The state-independent γ²-dependent terms.
    pub cross_p_terms: f64,
    pub total: f64,
}

fn field_term(field: &Field, t: f64, constants: &PhysicalConstants) -> f64 {
    let q = constants.charge_e / constants.mass_e;
    q * q
        * field
            .iter()
            .fold(0.0, |acc, (mode, state)| acc + abar_variance_mode(state, mode, t, constants))
}

/// Δ²X(t) split into free spreading, field noise and the universal cross terms.
///
/// The cross terms use t/m(γ); this is what the exact expansion of
/// Var(X + P·c(t)) gives and differs from t/m only at O(γ⁴).
pub fn position_variance(
    electron: &Electron,
    field: &Field,
    t: f64,
    constants: &PhysicalConstants,
) -> VarianceBreakdown {
    let m = electron.moments(constants);
    let meff = field.effective_mass();
    let hbar = constants.hbar;
    let tau = t / meff;
    let free_spread = m.var_x + m.corr_xp * tau + m.var_p * tau * tau;
    let s = sine_kernel(field, t);
    let cross_p_terms =
        4.0 * hbar * m.var_p * tau * s + 4.0 * hbar * hbar * m.var_p * s * s + 2.0 * hbar * m.corr_xp * s;
    let field_term = field_term(field, t, constants);
    VarianceBreakdown {
        free_spread,
        field_term,
        cross_p_terms,
        total: free_spread + field_term + cross_p_terms,
    }
}

/// Δ²X(a) − Δ²X(b) for two fields on the same modes.
///
/// Only the field noise differs; it is summed per mode from the excess over
/// the coherent value so that small differences are not lost against the
/// free spreading.
pub fn variance_difference(a: &Field, b: &Field, t: f64, constants: &PhysicalConstants) -> Result<f64> {
    if a.modes() != b.modes() {
        return Err(Error::LengthMismatch {
            modes: a.len(),
            states: b.len(),
        });
    }
    let q = constants.charge_e / constants.mass_e;
    let diff = a.modes().iter().zip(a.states().iter().zip(b.states())).fold(
        0.0,
        |acc, (mode, (sa, sb))| {
            acc + abar_variance_excess(sa, mode, t, constants) - abar_variance_excess(sb, mode, t, constants)
        },
    );
    Ok(q * q * diff)
}

/// Δ²X(t) minus the spreading of the same packet with no field at all (bare mass).
pub fn deviation_from_free(electron: &Electron, field: &Field, t: f64, constants: &PhysicalConstants) -> f64 {
    let m = electron.moments(constants);
    let inv_shift = 1.0 / field.effective_mass() - 1.0 / constants.mass_e;
    let inv_sum = 1.0 / field.effective_mass() + 1.0 / constants.mass_e;
    let mass_shift = m.corr_xp * t * inv_shift + m.var_p * t * t * inv_shift * inv_sum;
    let b = position_variance(electron, field, t, constants);
    mass_shift + b.field_term + b.cross_p_terms
}

/// Mean and variance of the free-field electric field E₀(t) at the electron.
///
/// The mean is accumulated as a complex number and its imaginary part is
/// checked against 1e−10 of the amplitude scale.
pub fn field_waveform_stats(field: &Field, t: f64, constants: &PhysicalConstants) -> Result<(f64, f64)> {
    let mut mean = C64::new(0.0, 0.0);
    let mut scale = 0.0;
    let mut var = 0.0;
    for (mode, state) in field.iter() {
        let alpha = state.mean_amplitude();
        let rot = C64::from_polar(1.0, -mode.omega * t);
        mean += C64::new(0.0, mode.amp_e) * (alpha * rot - alpha.conj() * rot.conj());
        scale += 2.0 * mode.amp_e * alpha.norm();
        let v = match *state {
            FieldModeState::Vacuum | FieldModeState::Coherent { .. } => 1.0,
            FieldModeState::SqueezedCoherent { r, theta, .. } => {
                (rot * r.cosh() - C64::from_polar(r.sinh(), -theta) * rot.conj()).norm_sqr()
            }
            FieldModeState::Fock { n } => 2.0 * n as f64 + 1.0,
            FieldModeState::Thermal { temperature } => {
                thermal_coth_factor(mode.omega, temperature, constants)?
            }
        };
        var += mode.amp_e * mode.amp_e * v;
    }
    if mean.im.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::ComplexMeanField {
            imag: mean.im,
            scale,
        });
    }
    Ok((mean.re, var))
}

#[cfg(test)]
mod tests;
