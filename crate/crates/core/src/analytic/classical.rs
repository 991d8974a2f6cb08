use num_complex::Complex64 as C64;

use crate::constants::PhysicalConstants;
use crate::state::Field;

/// A classical linearly polarised drive seen in the velocity gauge.
pub trait ClassicalWaveform: Sync {
    /// E_cl(t).
    fn field(&self, t: f64) -> f64;
    /// A_cl(t), with E = −∂A/∂t.
    fn vector_potential(&self, t: f64) -> f64;
    /// Ā_cl(t) = ∫₀ᵗ A_cl.
    fn vector_potential_integral(&self, t: f64) -> f64;
}

/// A_cl(t) = A₀ cos(ωt + φ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monochromatic {
    pub a0: f64,
    pub omega: f64,
    pub phase: f64,
}

impl ClassicalWaveform for Monochromatic {
    fn field(&self, t: f64) -> f64 {
        self.a0 * self.omega * (self.omega * t + self.phase).sin()
    }

    fn vector_potential(&self, t: f64) -> f64 {
        self.a0 * (self.omega * t + self.phase).cos()
    }

    fn vector_potential_integral(&self, t: f64) -> f64 {
        self.a0 / self.omega * ((self.omega * t + self.phase).sin() - self.phase.sin())
    }
}

/// Classical waveform carried by the mean of a multimode coherent field:
/// E(t) = ⟨E₀⟩(t) and A(t) = ⟨A₀⟩(t), so that Ā(t) = ⟨Ā₀⟩(t).
///
/// Note A(0) = Σ 2𝒜_n Re α_n is generally non-zero; the canonical momentum
/// p₀ of the quantum packet is measured against this A.
#[derive(Debug, Clone)]
pub struct ModeSumWaveform {
    terms: Vec<(f64, f64, C64)>,
}

impl ModeSumWaveform {
    pub fn from_field(field: &Field) -> Self {
        Self {
            terms: field
                .iter()
                .map(|(m, s)| (m.omega, m.amp_a, s.mean_amplitude()))
                .collect(),
        }
    }
}

impl ClassicalWaveform for ModeSumWaveform {
    fn field(&self, t: f64) -> f64 {
        self.terms.iter().fold(0.0, |acc, &(w, a, alpha)| {
            acc - 2.0 * a * w * (alpha * C64::from_polar(1.0, -w * t)).im
        })
    }

    fn vector_potential(&self, t: f64) -> f64 {
        self.terms.iter().fold(0.0, |acc, &(w, a, alpha)| {
            acc + 2.0 * a * (alpha * C64::from_polar(1.0, -w * t)).re
        })
    }

    fn vector_potential_integral(&self, t: f64) -> f64 {
        self.terms.iter().fold(0.0, |acc, &(w, a, alpha)| {
            let h = 0.5 * w * t;
            let one_minus = C64::new(2.0 * h.sin().powi(2), (w * t).sin());
            acc + 2.0 * a / w * (alpha * one_minus).im
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalPoint {
    pub x: f64,
    /// Kinetic momentum p₀ − eA_cl(t); the canonical momentum stays p₀.
    pub p_kin: f64,
}

/// Velocity-gauge classical motion: x = x₀ + p₀t/m − eĀ_cl(t)/m.
pub fn classical_trajectory(
    x0: f64,
    p0: f64,
    waveform: &dyn ClassicalWaveform,
    t: f64,
    constants: &PhysicalConstants,
) -> ClassicalPoint {
    let e = constants.charge_e;
    let m = constants.mass_e;
    ClassicalPoint {
        x: x0 + p0 * t / m - e * waveform.vector_potential_integral(t) / m,
        p_kin: p0 - e * waveform.vector_potential(t),
    }
}
