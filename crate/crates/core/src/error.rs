use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {what} must satisfy {requirement}, got {value}")]
    Domain {
        what: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error(
        "coupling outside nonrelativistic validity: 2Σħωγ² = {coupling_sum} must stay below 1/m = {limit}"
    )]
    CouplingOutsideValidity { coupling_sum: f64, limit: f64 },

    #[error("field state {0} has no coherent-label evolution (only vacuum, coherent, squeezed coherent)")]
    UnsupportedState(&'static str),

    #[error("{modes} modes but {states} field states")]
    LengthMismatch { modes: usize, states: usize },

    #[error("invalid pulse specification: {0}")]
    InvalidPulse(String),

    #[error("{available} modes do not cover the spectral support at the {floor:e} floor; need at least {required}")]
    InsufficientModes {
        required: usize,
        available: usize,
        floor: f64,
    },

    #[error("Fock truncation too small: population {tail:e} beyond index {cutoff} (dim {dim}); need dim >= {required}")]
    TruncationHeadroom {
        dim: usize,
        cutoff: usize,
        tail: f64,
        required: usize,
    },

    #[error("aliasing in position representation: boundary mass {boundary_mass:e}; enlarge the grid (more points or smaller momentum step)")]
    Aliasing { boundary_mass: f64 },

    #[error("momentum grid does not cover the packet: edge amplitude {edge:e}")]
    GridCoverage { edge: f64 },

    #[error("mean field has imaginary part {imag:e} at scale {scale:e}: sign convention broken")]
    ComplexMeanField { imag: f64, scale: f64 },

    #[error("oracle supports one or two modes, got {0}")]
    OracleModeCount(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive(what: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            requirement: "> 0",
            value,
        })
    }
}

pub(crate) fn require_non_negative(what: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            requirement: ">= 0",
            value,
        })
    }
}
