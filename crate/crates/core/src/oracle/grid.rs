//! Uniform momentum grid carrying the electron packet.

use num_complex::Complex64 as C64;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::state::{Electron, ElectronMoments};

pub const MIN_POINTS: usize = 513;
pub const HALF_WIDTH_SIGMAS: f64 = 16.0;

/// Points p_j = p₀ + (j − M)δp, j = 0..2M, with amplitudes w_j = φ̃(p_j)√δp.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    pub p: Vec<f64>,
    pub dp: f64,
    pub half: usize,
    pub w: Vec<C64>,
}

/// Chirped Gaussian φ̃(p) ∝ exp(−(p−p₀)²/4σ_p² − ib(p−p₀)² − ipx₀/ħ).
///
/// Its moments are ⟨X⟩ = x₀, Δ²X = ħ²/4σ_p² + 4b²ħ²σ_p², Δ²P = σ_p² and
/// ⟨XP+PX⟩ − 2⟨X⟩⟨P⟩ = 4bħσ_p².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub sigma_p: f64,
    pub p0: f64,
    pub x0: f64,
    pub chirp: f64,
}

impl GaussianPacket {
    /// The pure Gaussian with the given second moments; fails if the moments
    /// do not saturate the Schrödinger–Robertson bound.
    pub fn from_electron(electron: &Electron, constants: &PhysicalConstants) -> Result<Self> {
        let m: ElectronMoments = electron.moments(constants);
        m.validate(constants)?;
        let hbar = constants.hbar;
        let sigma_p = m.var_p.sqrt();
        let chirp = m.corr_xp / (4.0 * hbar * m.var_p);
        let pure_var_x = hbar * hbar / (4.0 * m.var_p) + 4.0 * chirp * chirp * hbar * hbar * m.var_p;
        if (pure_var_x - m.var_x).abs() > 1e-9 * m.var_x {
            return Err(Error::Domain {
                what: "electron moments",
                requirement: "a pure Gaussian (var_x·var_p = (ħ² + corr_xp²)/4)",
                value: m.var_x,
            });
        }
        Ok(Self {
            sigma_p,
            p0: m.mean_p,
            x0: m.mean_x,
            chirp,
        })
    }

    pub fn amplitude(&self, p: f64, constants: &PhysicalConstants) -> C64 {
        let u = p - self.p0;
        let norm = (2.0 * std::f64::consts::PI * self.sigma_p * self.sigma_p).powf(-0.25);
        let phase = -self.chirp * u * u - p * self.x0 / constants.hbar;
        C64::from_polar(norm * (-u * u / (4.0 * self.sigma_p * self.sigma_p)).exp(), phase)
    }

    pub fn sigma_x(&self, constants: &PhysicalConstants) -> f64 {
        let h = constants.hbar;
        (h * h / (4.0 * self.sigma_p * self.sigma_p) + 4.0 * self.chirp * self.chirp * h * h * self.sigma_p * self.sigma_p)
            .sqrt()
    }
}

impl MomentumGrid {
    pub fn new(packet: &GaussianPacket, points: usize, dp: f64, constants: &PhysicalConstants) -> Result<Self> {
        if points < 3 || points % 2 == 0 {
            return Err(Error::Domain {
                what: "m_grid",
                requirement: "odd and >= 3",
                value: points as f64,
            });
        }
        if !(dp > 0.0) {
            return Err(Error::Domain {
                what: "dp",
                requirement: "> 0",
                value: dp,
            });
        }
        let half = points / 2;
        let p: Vec<f64> = (0..points).map(|j| packet.p0 + (j as f64 - half as f64) * dp).collect();
        let w = p.iter().map(|&pj| packet.amplitude(pj, constants) * dp.sqrt()).collect();
        let g = Self { p, dp, half, w };
        let edge = g.w[0].norm().max(g.w[points - 1].norm()) / dp.sqrt();
        let peak = packet.amplitude(packet.p0, constants).norm();
        if edge > 1e-10 * peak {
            return Err(Error::GridCoverage { edge: edge / peak });
        }
        Ok(g)
    }

    /// Sizes the grid so that the packet spans ±16σ_p, the conjugate
    /// x-window πħ/δp reaches `x_extent` and there are at least `min_points`.
    pub fn auto(packet: &GaussianPacket, x_extent: f64, min_points: usize, constants: &PhysicalConstants) -> Result<Self> {
        let span = HALF_WIDTH_SIGMAS * packet.sigma_p;
        let dp_max = std::f64::consts::PI * constants.hbar / x_extent;
        let mut half = (span / dp_max).ceil() as usize;
        half = half.max(min_points / 2);
        let dp = span / half as f64;
        Self::new(packet, 2 * half + 1, dp, constants)
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Conjugate position spacing 2πħ/(Nδp).
    pub fn dx(&self, constants: &PhysicalConstants) -> f64 {
        2.0 * std::f64::consts::PI * constants.hbar / (self.len() as f64 * self.dp)
    }

    pub fn x(&self, k: usize, constants: &PhysicalConstants) -> f64 {
        (k as f64 - self.half as f64) * self.dx(constants)
    }

    pub fn norm(&self) -> f64 {
        self.w.iter().map(|c| c.norm_sqr()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::ElectronGaussian;

    const AU: PhysicalConstants = PhysicalConstants::atomic();

    fn packet() -> GaussianPacket {
        GaussianPacket::from_electron(&ElectronGaussian::new(10.0, 0.1, 0.0).unwrap().into(), &AU).unwrap()
    }

    #[test]
    fn grid_is_normalized_and_centred() {
        let g = MomentumGrid::auto(&packet(), 500.0, 513, &AU).unwrap();
        assert!(g.len() >= 513 && g.len() % 2 == 1);
        assert_eq!(g.p[g.half], 0.1);
        assert!((g.norm() - 1.0).abs() < 1e-10);
        assert!(std::f64::consts::PI / g.dp >= 500.0);
    }

    #[test]
    fn narrow_grid_is_rejected() {
        assert!(matches!(
            MomentumGrid::new(&packet(), 101, 0.002, &AU),
            Err(Error::GridCoverage { .. })
        ));
        assert!(MomentumGrid::new(&packet(), 100, 0.01, &AU).is_err());
    }

    #[test]
    fn chirp_from_moments() {
        let sp = 0.05;
        let b = 3.0;
        let m = ElectronMoments {
            mean_x: 1.0,
            mean_p: 0.2,
            var_x: 1.0 / (4.0 * sp * sp) + 4.0 * b * b * sp * sp,
            var_p: sp * sp,
            corr_xp: 4.0 * b * sp * sp,
        };
        let g = GaussianPacket::from_electron(&m.into(), &AU).unwrap();
        assert!((g.chirp - b).abs() < 1e-12);
        assert!((g.sigma_x(&AU).powi(2) - m.var_x).abs() < 1e-9);
        let mixed = ElectronMoments { var_x: 2.0 * m.var_x, ..m };
        assert!(GaussianPacket::from_electron(&mixed.into(), &AU).is_err());
    }
}
