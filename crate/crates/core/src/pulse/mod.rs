//! Discrete multimode quantization of a finite laser pulse.
//!
//! The pulse is defined by its electric field on [0, τ] inside a quantization
//! box [0, T_box]. Its Fourier series on the box gives one coherent label per
//! mode ω_n = nδω, δω = 2π/T_box, with amplitudes fixed by an effective volume
//! V = c·T_box·πw₀²/2.

mod waveform;

pub use waveform::SynthesizedPulse;

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::constants::{units, PhysicalConstants};
use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::mode::Mode;
use crate::state::{Field, FieldModeState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    /// sin²(πt/τ) applied to the field.
    Sin2,
    /// Gaussian in intensity with the given FWHM (a.u. of time), centred on
    /// the support and cut to it.
    Gaussian { fwhm: f64 },
    Flat,
}

impl Envelope {
    /// Field envelope at t ∈ [0, τ].
    pub fn value(&self, t: f64, tau: f64) -> f64 {
        match *self {
            Self::Sin2 => (PI * t / tau).sin().powi(2),
            Self::Gaussian { fwhm } => {
                let u = (t - 0.5 * tau) / fwhm;
                (-2.0 * 2f64.ln() * u * u).exp()
            }
            Self::Flat => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub lambda0_nm: f64,
    /// Support of the envelope in optical cycles.
    pub n_cycles: f64,
    pub envelope: Envelope,
    pub energy_j: f64,
    /// Carrier phase at the centre of the support.
    pub cep: f64,
    pub waist_m: f64,
    /// Quantization time in a.u.
    pub t_box: f64,
    pub n_modes: usize,
    /// Modes with |c_n| below this fraction of the largest are left in vacuum.
    pub spectral_floor: f64,
}

pub const DEFAULT_SPECTRAL_FLOOR: f64 = 1e-8;
pub const DEFAULT_BOX_FACTOR: f64 = 8.0;

impl PulseSpec {
    pub fn omega0(&self) -> f64 {
        units::wavelength_nm_to_omega(self.lambda0_nm)
    }

    /// Length τ of the temporal support, n_cycles·2π/ω₀.
    pub fn duration(&self) -> f64 {
        self.n_cycles * 2.0 * PI / self.omega0()
    }

    /// Sets t_box to `factor` times the pulse duration.
    pub fn with_box_factor(mut self, factor: f64) -> Self {
        self.t_box = factor * self.duration();
        self
    }

    pub fn delta_omega(&self) -> f64 {
        2.0 * PI / self.t_box
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("lambda0_nm", self.lambda0_nm)?;
        require_positive("n_cycles", self.n_cycles)?;
        require_positive("energy", self.energy_j)?;
        require_positive("waist", self.waist_m)?;
        require_positive("t_box", self.t_box)?;
        require_non_negative("spectral_floor", self.spectral_floor)?;
        if !self.cep.is_finite() {
            return Err(Error::InvalidPulse("cep must be finite".into()));
        }
        if let Envelope::Gaussian { fwhm } = self.envelope {
            require_positive("fwhm", fwhm)?;
        }
        if self.n_modes == 0 {
            return Err(Error::InvalidPulse("n_modes must be at least 1".into()));
        }
        if self.t_box <= self.duration() {
            return Err(Error::InvalidPulse(format!(
                "t_box = {} must exceed the pulse support {}",
                self.t_box,
                self.duration()
            )));
        }
        Ok(())
    }
}

/// V = c·t_box·πw₀²/2 in a.u.
pub fn effective_volume(spec: &PulseSpec, constants: &PhysicalConstants) -> f64 {
    let w0 = units::m_to_au(spec.waist_m);
    constants.c_light * spec.t_box * PI * w0 * w0 / 2.0
}

/// 𝒜 = sqrt(ħ/(2ε₀ωV)).
pub fn mode_amplitude(omega: f64, volume: f64, constants: &PhysicalConstants) -> f64 {
    (constants.hbar / (2.0 * constants.eps0 * omega * volume)).sqrt()
}

/// Quantized pulse: one mode per harmonic of the box, n = 1..=n_modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    pub modes: Vec<Mode>,
    pub delta_omega: f64,
    pub coherent_alphas: Vec<C64>,
    /// Per-mode (r, θ), absent for unsqueezed modes.
    pub squeeze: Vec<Option<(f64, f64)>>,
    /// Σħω|α|² before the common rescale, relative to the target energy.
    pub energy_ratio_before_scaling: f64,
    /// Highest harmonic whose coefficient clears the spectral floor.
    pub support_index: usize,
    pub pulse: SynthesizedPulse,
}

impl ModeGrid {
    pub fn states(&self) -> Vec<FieldModeState> {
        self.coherent_alphas
            .iter()
            .zip(&self.squeeze)
            .map(|(&alpha, sq)| match *sq {
                Some((r, theta)) => FieldModeState::SqueezedCoherent { alpha, r, theta },
                None => FieldModeState::Coherent { alpha },
            })
            .collect()
    }

    pub fn field(&self, constants: &PhysicalConstants) -> Result<Field> {
        Field::new(self.modes.clone(), self.states(), constants)
    }

    /// The same grid with every squeeze removed.
    pub fn coherent(&self) -> Self {
        Self {
            squeeze: vec![None; self.modes.len()],
            ..self.clone()
        }
    }

    /// Σ ħω_n|α_n|².
    pub fn photon_energy(&self, constants: &PhysicalConstants) -> f64 {
        self.modes
            .iter()
            .zip(&self.coherent_alphas)
            .fold(0.0, |acc, (m, a)| acc + constants.hbar * m.omega * a.norm_sqr())
    }
}

/// Largest n ≤ N/2 with |c_n| ≥ floor·max|c| and the coefficients c_1..c_{N/2}.
fn fourier_coefficients(pulse: &SynthesizedPulse, t_box: f64, samples: usize) -> Vec<C64> {
    let mut buf: Vec<C64> = (0..samples)
        .map(|k| C64::new(pulse.field_at(k as f64 * t_box / samples as f64), 0.0))
        .collect();
    FftPlanner::new().plan_fft_inverse(samples).process(&mut buf);
    buf.iter().take(samples / 2).map(|c| c / samples as f64).collect()
}

fn support_index(coeffs: &[C64], floor: f64) -> usize {
    let peak = coeffs.iter().skip(1).fold(0.0f64, |m, c| m.max(c.norm()));
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| c.norm() >= floor * peak)
        .map(|(n, _)| n)
        .max()
        .unwrap_or(0)
}

fn sample_count(n_modes: usize) -> usize {
    (32 * n_modes).next_power_of_two().max(1 << 16)
}

/// Quantizes the pulse: α_n = c_n/(iℰ_n), then one common real rescale so
/// that Σħω_n|α_n|² equals the configured energy.
pub fn build_mode_grid(spec: &PulseSpec, constants: &PhysicalConstants) -> Result<ModeGrid> {
    spec.validate()?;
    let pulse = SynthesizedPulse::new(spec, constants)?;
    let samples = sample_count(spec.n_modes);
    let coeffs = fourier_coefficients(&pulse, spec.t_box, samples);
    let support = support_index(&coeffs, spec.spectral_floor);
    if support > spec.n_modes || support >= samples / 4 {
        return Err(Error::InsufficientModes {
            required: support,
            available: spec.n_modes,
            floor: spec.spectral_floor,
        });
    }
    let peak = coeffs.iter().skip(1).fold(0.0f64, |m, c| m.max(c.norm()));
    let volume = effective_volume(spec, constants);
    let dw = spec.delta_omega();
    let mut modes = Vec::with_capacity(spec.n_modes);
    let mut alphas = Vec::with_capacity(spec.n_modes);
    for n in 1..=spec.n_modes {
        let omega = n as f64 * dw;
        let mode = Mode::from_amplitude(omega, mode_amplitude(omega, volume, constants), constants)?;
        let c = coeffs[n];
        let alpha = if c.norm() >= spec.spectral_floor * peak {
            c / C64::new(0.0, mode.amp_e)
        } else {
            C64::new(0.0, 0.0)
        };
        modes.push(mode);
        alphas.push(alpha);
    }
    let target = units::joule_to_au(spec.energy_j);
    let raw = modes
        .iter()
        .zip(&alphas)
        .fold(0.0, |acc, (m, a)| acc + constants.hbar * m.omega * a.norm_sqr());
    let scale = (target / raw).sqrt();
    for a in &mut alphas {
        *a *= scale;
    }
    Ok(ModeGrid {
        squeeze: vec![None; modes.len()],
        modes,
        delta_omega: dw,
        coherent_alphas: alphas,
        energy_ratio_before_scaling: raw / target,
        support_index: support,
        pulse,
    })
}

/// Squeezes every mode with ω inside `band` (all modes if None). r = 0 clears the squeeze.
pub fn apply_squeezing(grid: &ModeGrid, r: f64, theta: f64, band: Option<(f64, f64)>) -> Result<ModeGrid> {
    require_non_negative("r", r)?;
    let mut out = grid.clone();
    for (m, sq) in out.modes.iter().zip(out.squeeze.iter_mut()) {
        let inside = band.is_none_or(|(lo, hi)| m.omega >= lo && m.omega <= hi);
        if inside {
            *sq = if r > 0.0 { Some((r, theta)) } else { None };
        }
    }
    Ok(out)
}

/// Converts a wavelength band in nm into an angular-frequency band in a.u.
pub fn band_from_nm(lo_nm: f64, hi_nm: f64) -> (f64, f64) {
    let a = units::wavelength_nm_to_omega(lo_nm);
    let b = units::wavelength_nm_to_omega(hi_nm);
    (a.min(b), a.max(b))
}

/// Grid export, one row per mode.
pub fn write_grid_csv<W: Write>(grid: &ModeGrid, mut w: W) -> std::io::Result<()> {
    writeln!(w, "omega_au,A_amp_au,gamma_au,re_alpha,im_alpha,r,theta")?;
    for ((m, a), sq) in grid.modes.iter().zip(&grid.coherent_alphas).zip(&grid.squeeze) {
        let (r, theta) = sq.unwrap_or((0.0, 0.0));
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            m.omega, m.amp_a, m.gamma, a.re, a.im, r, theta
        )?;
    }
    Ok(())
}
