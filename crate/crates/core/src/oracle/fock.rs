//! Truncated number basis and initial field vectors.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::tridiag::{SymTridiag, TridiagEigen};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::mode::Mode;
use crate::state::FieldModeState;

/// Number states at or above `dim − HEADROOM` must be (numerically) empty.
pub const HEADROOM: usize = 8;
pub const TAIL_TOLERANCE: f64 = 1e-12;
const MAX_DIM: usize = 1 << 14;
/// Allowed relative mismatch of ⟨N⟩ before a truncated state is rejected.
const PHOTON_NUMBER_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockBasis {
    pub dim: usize,
}

impl FockBasis {
    pub fn new(dim: usize) -> Result<Self> {
        if dim <= HEADROOM {
            return Err(Error::Domain {
                what: "n_fock",
                requirement: "> 8",
                value: dim as f64,
            });
        }
        Ok(Self { dim })
    }

    pub fn annihilation(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| {
            if j == i + 1 {
                C64::new((j as f64).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn creation(&self) -> DMatrix<C64> {
        self.annihilation().adjoint()
    }

    pub fn number(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| C64::new(if i == j { i as f64 } else { 0.0 }, 0.0))
    }

    /// a + a†.
    pub fn quadrature_x(&self) -> DMatrix<C64> {
        self.annihilation() + self.creation()
    }

    /// i(a − a†).
    pub fn quadrature_y(&self) -> DMatrix<C64> {
        (self.annihilation() - self.creation()) * C64::new(0.0, 1.0)
    }

    pub fn vacuum(&self) -> Vec<C64> {
        self.number_state(0)
    }

    pub fn number_state(&self, n: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.dim];
        v[n] = C64::new(1.0, 0.0);
        v
    }

    /// Population in the top HEADROOM levels.
    pub fn tail(&self, v: &[C64]) -> f64 {
        v[self.dim - HEADROOM..].iter().map(|c| c.norm_sqr()).sum()
    }
}

/// exp(−iG) applied in place to the sub-chain start, start+stride, … where G is
/// Hermitian tridiagonal along the chain with G_{k+1,k} = |b_k| e^{iφ}.
fn apply_chain_exp(v: &mut [C64], start: usize, stride: usize, mags: impl Fn(usize) -> f64, phase: f64) {
    let idx: Vec<usize> = (start..v.len()).step_by(stride).collect();
    if idx.len() < 2 {
        return;
    }
    let off: Vec<f64> = (0..idx.len() - 1).map(|k| mags(idx[k])).collect();
    if off.iter().all(|&b| b == 0.0) {
        return;
    }
    let t = SymTridiag::new(vec![0.0; idx.len()], off);
    let eig = TridiagEigen::new(&t);
    // G = D T D† with D = diag(e^{ikφ})
    let u: Vec<C64> = idx
        .iter()
        .enumerate()
        .map(|(k, &i)| v[i] * C64::from_polar(1.0, -(k as f64) * phase))
        .collect();
    let w = eig.apply_exp(&u, 1.0);
    for (k, &i) in idx.iter().enumerate() {
        v[i] = w[k] * C64::from_polar(1.0, k as f64 * phase);
    }
}

/// D(α)v with D(α) = exp(αa† − α*a) = exp(−iG), G = i(αa† − α*a).
pub fn displace(v: &mut [C64], alpha: C64) {
    if alpha.norm() == 0.0 {
        return;
    }
    let mag = alpha.norm();
    apply_chain_exp(v, 0, 1, |n| mag * ((n + 1) as f64).sqrt(), alpha.arg() + std::f64::consts::FRAC_PI_2);
}

/// S(z)v with S(z) = exp(½(z a†² − z* a²)) = exp(−iG), G = (i/2)(z a†² − z* a²).
pub fn squeeze(v: &mut [C64], r: f64, theta: f64) {
    if r == 0.0 {
        return;
    }
    let mags = |n: usize| 0.5 * r * (((n + 1) * (n + 2)) as f64).sqrt();
    let phase = theta + std::f64::consts::FRAC_PI_2;
    apply_chain_exp(v, 0, 2, mags, phase);
    apply_chain_exp(v, 1, 2, mags, phase);
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialField {
    Pure(Vec<C64>),
    /// Boltzmann weights of number states; the weights sum to > 1 − 1e−12.
    Mixture(Vec<(f64, usize)>),
}

fn pure_vector(state: &FieldModeState, dim: usize) -> Vec<C64> {
    let basis = FockBasis { dim };
    let mut v = basis.vacuum();
    match *state {
        FieldModeState::Vacuum => {}
        FieldModeState::Coherent { alpha } => displace(&mut v, alpha),
        FieldModeState::SqueezedCoherent { alpha, r, theta } => {
            squeeze(&mut v, r, theta);
            displace(&mut v, alpha);
        }
        FieldModeState::Fock { .. } | FieldModeState::Thermal { .. } => unreachable!(),
    }
    v
}

fn boltzmann_weights(omega: f64, temperature: f64, constants: &PhysicalConstants) -> Vec<(f64, usize)> {
    let q = (-constants.hbar * omega / constants.thermal_energy(temperature)).exp();
    let mut out = Vec::new();
    let mut cumulative = 0.0;
    let mut w = -(-constants.hbar * omega / constants.thermal_energy(temperature)).exp_m1();
    let mut n = 0;
    while cumulative <= 1.0 - TAIL_TOLERANCE && w > 0.0 {
        out.push((w, n));
        cumulative += w;
        w *= q;
        n += 1;
    }
    out
}

/// Population beyond the cutoff, or the relative photon-number error when the
/// truncated generator has folded the state back into low indices (large |α|
/// in a small basis can leave a tiny tail on a wrong vector).
fn truncation_defect(state: &FieldModeState, v: &[C64], basis: &FockBasis) -> f64 {
    let expected = match *state {
        FieldModeState::Coherent { alpha } => alpha.norm_sqr(),
        FieldModeState::SqueezedCoherent { alpha, r, .. } => alpha.norm_sqr() + r.sinh().powi(2),
        _ => 0.0,
    };
    let n: f64 = v.iter().enumerate().map(|(k, c)| k as f64 * c.norm_sqr()).sum();
    let folded = (n - expected).abs() / (expected + 1.0);
    if folded > PHOTON_NUMBER_TOLERANCE {
        basis.tail(v).max(folded)
    } else {
        basis.tail(v)
    }
}

/// Number-basis representation of an initial mode state.
///
/// Errors if the state is not contained in the basis with the documented
/// headroom; the error names the smallest sufficient dimension found.
pub fn initial_field_vector(
    state: &FieldModeState,
    mode: &Mode,
    basis: &FockBasis,
    constants: &PhysicalConstants,
) -> Result<InitialField> {
    state.validate()?;
    let dim = basis.dim;
    let cutoff = dim - HEADROOM;
    match *state {
        FieldModeState::Fock { n } => {
            let n = n as usize;
            if n >= cutoff {
                return Err(Error::TruncationHeadroom {
                    dim,
                    cutoff,
                    tail: 1.0,
                    required: n + HEADROOM + 1,
                });
            }
            Ok(InitialField::Pure(basis.number_state(n)))
        }
        FieldModeState::Thermal { temperature } => {
            let w = boltzmann_weights(mode.omega, temperature, constants);
            let top = w.last().map_or(0, |&(_, n)| n);
            if top >= cutoff {
                let tail = w.iter().filter(|&&(_, n)| n >= cutoff).map(|&(p, _)| p).sum();
                return Err(Error::TruncationHeadroom {
                    dim,
                    cutoff,
                    tail,
                    required: top + HEADROOM + 1,
                });
            }
            Ok(InitialField::Mixture(w))
        }
        _ => {
            let v = pure_vector(state, dim);
            let defect = truncation_defect(state, &v, basis);
            if defect >= TAIL_TOLERANCE {
                let mut required = dim;
                loop {
                    required = (required * 3 / 2).max(required + 8);
                    let big = FockBasis { dim: required };
                    if required > MAX_DIM || truncation_defect(state, &pure_vector(state, required), &big) < TAIL_TOLERANCE {
                        break;
                    }
                }
                return Err(Error::TruncationHeadroom {
                    dim,
                    cutoff,
                    tail: defect,
                    required,
                });
            }
            Ok(InitialField::Pure(v))
        }
    }
}
