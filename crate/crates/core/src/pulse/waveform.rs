use crate::analytic::ClassicalWaveform;
use crate::constants::{units, PhysicalConstants};
use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, integrate};

use super::{Envelope, PulseSpec};

const NODES: usize = 16;
const PANELS_PER_CYCLE: f64 = 4.0;

/// E(t) = E₀·env(t)·cos(ω₀(t − τ/2) + cep) on [0, τ], zero elsewhere, with E₀
/// fixed by the pulse energy ε₀·c·A_eff·∫E².
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesizedPulse {
    pub e0: f64,
    pub omega0: f64,
    pub tau: f64,
    pub cep: f64,
    pub envelope: Envelope,
    rule: (Vec<f64>, Vec<f64>),
}

impl SynthesizedPulse {
    pub fn new(spec: &PulseSpec, constants: &PhysicalConstants) -> Result<Self> {
        let mut p = Self {
            e0: 1.0,
            omega0: spec.omega0(),
            tau: spec.duration(),
            cep: spec.cep,
            envelope: spec.envelope,
            rule: gauss_legendre(NODES),
        };
        let w0 = units::m_to_au(spec.waist_m);
        let area = std::f64::consts::PI * w0 * w0 / 2.0;
        let unit_energy = constants.eps0 * constants.c_light * area * p.integral(|t| p.field_at(t).powi(2), p.tau);
        if !(unit_energy > 0.0) {
            return Err(Error::InvalidPulse("pulse carries no energy".into()));
        }
        p.e0 = (units::joule_to_au(spec.energy_j) / unit_energy).sqrt();
        Ok(p)
    }

    pub fn field_at(&self, t: f64) -> f64 {
        if !(0.0..=self.tau).contains(&t) {
            return 0.0;
        }
        self.e0 * self.envelope.value(t, self.tau) * (self.omega0 * (t - 0.5 * self.tau) + self.cep).cos()
    }

    /// Largest |E| over the support, sampled at 64 points per cycle.
    pub fn peak(&self) -> f64 {
        let n = (self.tau * self.omega0 / (2.0 * std::f64::consts::PI) * 64.0).ceil() as usize + 1;
        (0..=n).fold(0.0f64, |m, k| m.max(self.field_at(self.tau * k as f64 / n as f64).abs()))
    }

    fn integral<F: Fn(f64) -> f64>(&self, f: F, upper: f64) -> f64 {
        if upper <= 0.0 {
            return 0.0;
        }
        let cycles = upper * self.omega0 / (2.0 * std::f64::consts::PI);
        let panels = (cycles * PANELS_PER_CYCLE).ceil().max(1.0) as usize;
        integrate(f, 0.0, upper, panels, &self.rule)
    }
}

impl ClassicalWaveform for SynthesizedPulse {
    fn field(&self, t: f64) -> f64 {
        self.field_at(t)
    }

    /// A(t) = −∫₀ᵗE, so A(0) = 0.
    fn vector_potential(&self, t: f64) -> f64 {
        -self.integral(|s| self.field_at(s), t.min(self.tau))
    }

    /// Ā(t) = −∫₀ᵗ(t − s)E(s)ds.
    fn vector_potential_integral(&self, t: f64) -> f64 {
        let u = t.min(self.tau);
        -self.integral(|s| (t - s) * self.field_at(s), u)
    }
}
