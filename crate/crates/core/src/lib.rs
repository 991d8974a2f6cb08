//! Electron wave packets driven by quantized multimode light in the dipole
//! approximation: closed-form observables, pulse quantization and a
//! brute-force truncated-Fock reference propagator.

pub mod analytic;
pub mod constants;
pub mod error;
pub mod mode;
pub mod oracle;
pub mod pulse;
pub mod quad;
pub mod state;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
pub use mode::Mode;
pub use state::{Electron, ElectronGaussian, ElectronMoments, Field, FieldModeState};
