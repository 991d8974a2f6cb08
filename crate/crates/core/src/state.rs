//! Initial states of the electron and of the field modes.

use num_complex::Complex64 as C64;

use crate::constants::PhysicalConstants;
use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::mode::{effective_mass, Mode};

/// Initial state of a single field mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldModeState {
    Vacuum,
    Coherent { alpha: C64 },
    /// D(α)S(z)|0⟩ with z = r e^{iθ}.
    SqueezedCoherent { alpha: C64, r: f64, theta: f64 },
    Fock { n: u32 },
    /// Temperature in kelvin; n̄ is derived per mode.
    Thermal { temperature: f64 },
}

impl FieldModeState {
    pub fn coherent(re: f64, im: f64) -> Self {
        Self::Coherent {
            alpha: C64::new(re, im),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::SqueezedCoherent { r, theta, .. } => {
                require_non_negative("r", r)?;
                if !theta.is_finite() {
                    return Err(Error::Domain {
                        what: "theta",
                        requirement: "finite",
                        value: theta,
                    });
                }
                Ok(())
            }
            Self::Thermal { temperature } => require_positive("temperature", temperature),
            _ => Ok(()),
        }
    }

    /// ⟨a⟩ at t = 0.
    pub fn mean_amplitude(&self) -> C64 {
        match *self {
            Self::Coherent { alpha } | Self::SqueezedCoherent { alpha, .. } => alpha,
            _ => C64::new(0.0, 0.0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Vacuum => "vacuum",
            Self::Coherent { .. } => "coherent",
            Self::SqueezedCoherent { .. } => "squeezed-coherent",
            Self::Fock { .. } => "fock",
            Self::Thermal { .. } => "thermal",
        }
    }
}

/// Minimum-uncertainty Gaussian packet with centre x0 and mean momentum p0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectronGaussian {
    pub sigma_x: f64,
    pub p0: f64,
    pub x0: f64,
}

impl ElectronGaussian {
    pub fn new(sigma_x: f64, p0: f64, x0: f64) -> Result<Self> {
        require_positive("sigma_x", sigma_x)?;
        Ok(Self { sigma_x, p0, x0 })
    }

    pub fn sigma_p(&self, constants: &PhysicalConstants) -> f64 {
        constants.hbar / (2.0 * self.sigma_x)
    }

    pub fn moments(&self, constants: &PhysicalConstants) -> ElectronMoments {
        let sp = self.sigma_p(constants);
        ElectronMoments {
            mean_x: self.x0,
            mean_p: self.p0,
            var_x: self.sigma_x * self.sigma_x,
            var_p: sp * sp,
            // real envelope times a plane wave carries no x–p correlation
            corr_xp: 0.0,
        }
    }
}

/// Second-moment description of an arbitrary electron packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectronMoments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    /// ⟨PX + XP⟩ − 2⟨X⟩⟨P⟩.
    pub corr_xp: f64,
}

impl ElectronMoments {
    /// Checks positivity and the Schrödinger–Robertson bound.
    pub fn validate(&self, constants: &PhysicalConstants) -> Result<()> {
        require_positive("var_x", self.var_x)?;
        require_positive("var_p", self.var_p)?;
        let bound = (constants.hbar * constants.hbar + self.corr_xp * self.corr_xp) / 4.0;
        let prod = self.var_x * self.var_p;
        if prod < bound * (1.0 - 1e-12) {
            return Err(Error::Domain {
                what: "var_x·var_p",
                requirement: ">= (ħ² + corr_xp²)/4",
                value: prod,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Electron {
    Gaussian(ElectronGaussian),
    Moments(ElectronMoments),
}

impl Electron {
    pub fn moments(&self, constants: &PhysicalConstants) -> ElectronMoments {
        match self {
            Self::Gaussian(g) => g.moments(constants),
            Self::Moments(m) => *m,
        }
    }
}

impl From<ElectronGaussian> for Electron {
    fn from(g: ElectronGaussian) -> Self {
        Self::Gaussian(g)
    }
}

impl From<ElectronMoments> for Electron {
    fn from(m: ElectronMoments) -> Self {
        Self::Moments(m)
    }
}

/// Product state of a set of modes, each with its own initial state.
///
/// Construction checks that the lists match, that every state is valid and
/// that the summed coupling leaves a positive effective mass, which is cached.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    modes: Vec<Mode>,
    states: Vec<FieldModeState>,
    effective_mass: f64,
}

impl Field {
    pub fn new(modes: Vec<Mode>, states: Vec<FieldModeState>, constants: &PhysicalConstants) -> Result<Self> {
        if modes.len() != states.len() {
            return Err(Error::LengthMismatch {
                modes: modes.len(),
                states: states.len(),
            });
        }
        for s in &states {
            s.validate()?;
        }
        let effective_mass = effective_mass(&modes, constants)?;
        Ok(Self {
            modes,
            states,
            effective_mass,
        })
    }

    pub fn single(mode: Mode, state: FieldModeState, constants: &PhysicalConstants) -> Result<Self> {
        Self::new(vec![mode], vec![state], constants)
    }

    /// No modes at all: the free electron.
    pub fn empty(constants: &PhysicalConstants) -> Self {
        Self {
            modes: Vec::new(),
            states: Vec::new(),
            effective_mass: constants.mass_e,
        }
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn states(&self) -> &[FieldModeState] {
        &self.states
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mode, &FieldModeState)> {
        self.modes.iter().zip(self.states.iter())
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn effective_mass(&self) -> f64 {
        self.effective_mass
    }

    /// Same modes, different states.
    pub fn with_states(&self, states: Vec<FieldModeState>, constants: &PhysicalConstants) -> Result<Self> {
        Self::new(self.modes.clone(), states, constants)
    }
}
