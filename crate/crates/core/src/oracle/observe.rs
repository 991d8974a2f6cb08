//! Electron moments of a joint state, by Fourier transform to x and by
//! finite differences of the overlap F(p₁, p₂).

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::fock::FockBasis;
use super::grid::MomentumGrid;
use super::propagate::JointState;
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::mode::Mode;

/// Boundary band of the x-window checked for aliasing, as a fraction per side.
const EDGE_FRACTION: f64 = 0.05;
pub const ALIASING_TOLERANCE: f64 = 1e-8;

/// Unnormalized sums; mixtures are combined by weighted addition.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RawMoments {
    pub norm: f64,
    pub x: f64,
    pub x2: f64,
    pub p: f64,
    pub p2: f64,
}

impl RawMoments {
    pub fn scaled(self, w: f64) -> Self {
        Self {
            norm: w * self.norm,
            x: w * self.x,
            x2: w * self.x2,
            p: w * self.p,
            p2: w * self.p2,
        }
    }

    pub fn add(self, o: Self) -> Self {
        Self {
            norm: self.norm + o.norm,
            x: self.x + o.x,
            x2: self.x2 + o.x2,
            p: self.p + o.p,
            p2: self.p2 + o.p2,
        }
    }

    pub fn finish(self) -> Moments {
        let mean_x = self.x / self.norm;
        let mean_p = self.p / self.norm;
        Moments {
            mean_x,
            var_x: self.x2 / self.norm - mean_x * mean_x,
            mean_p,
            var_p: self.p2 / self.norm - mean_p * mean_p,
            norm: self.norm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean_x: f64,
    pub var_x: f64,
    pub mean_p: f64,
    pub var_p: f64,
    pub norm: f64,
}

fn momentum_sums(joint: &JointState, grid: &MomentumGrid) -> (f64, f64, f64) {
    joint.psi.iter().zip(&grid.p).fold((0.0, 0.0, 0.0), |(n, a, b), (v, &p)| {
        let w: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        (n + w, a + p * w, b + p * p * w)
    })
}

/// Position density ρ_k on the conjugate grid x_k = (k − M)δx, summed over
/// field components: |Ψ(x_k)|²δx = |Σ_j ψ_j e^{2πi(j−M)(k−M)/N}|²/N.
pub fn position_density(joint: &JointState, grid: &MomentumGrid) -> Vec<f64> {
    let n = grid.len();
    let m = grid.half as f64;
    let twist: Vec<C64> = (0..n)
        .map(|j| C64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j as f64) * m / n as f64))
        .collect();
    let fft = FftPlanner::new().plan_fft_inverse(n);
    let per_component: Vec<Vec<f64>> = (0..joint.field_len())
        .into_par_iter()
        .map(|c| {
            let mut buf: Vec<C64> = (0..n).map(|j| joint.psi[j][c] * twist[j]).collect();
            fft.process(&mut buf);
            buf.iter().map(|z| z.norm_sqr() / n as f64).collect()
        })
        .collect();
    let mut rho = vec![0.0; n];
    for comp in &per_component {
        for (r, v) in rho.iter_mut().zip(comp) {
            *r += v;
        }
    }
    rho
}

/// Moments with ⟨X⟩, ⟨X²⟩ taken from the position density.
pub fn observables(joint: &JointState, grid: &MomentumGrid, constants: &PhysicalConstants) -> Result<RawMoments> {
    let rho = position_density(joint, grid);
    let n = grid.len();
    let total: f64 = rho.iter().sum();
    let band = ((n as f64 * EDGE_FRACTION).ceil() as usize).max(1);
    let edge: f64 = rho[..band].iter().chain(&rho[n - band..]).sum();
    if edge > ALIASING_TOLERANCE * total {
        return Err(Error::Aliasing {
            boundary_mass: edge / total,
        });
    }
    let dx = grid.dx(constants);
    let (mut x, mut x2) = (0.0, 0.0);
    for (k, r) in rho.iter().enumerate() {
        let xk = (k as f64 - grid.half as f64) * dx;
        x += xk * r;
        x2 += xk * xk * r;
    }
    let (norm, p, p2) = momentum_sums(joint, grid);
    Ok(RawMoments { norm, x, x2, p, p2 })
}

/// F(p_{j1}, p_{j2}) = w_{j1}w*_{j2}⟨χ_{j2}|χ_{j1}⟩, i.e. Σ_n ψ_{j1,n} ψ*_{j2,n}.
pub fn overlap_f(joint: &JointState, j1: usize, j2: usize) -> C64 {
    joint.psi[j1]
        .iter()
        .zip(&joint.psi[j2])
        .fold(C64::new(0.0, 0.0), |acc, (a, b)| acc + a * b.conj())
}

/// Eighth-order central first-derivative weights for offsets 1..=4.
const STENCIL: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

fn stencil() -> Vec<(isize, f64)> {
    let mut s = Vec::with_capacity(8);
    for (k, &c) in STENCIL.iter().enumerate() {
        let o = k as isize + 1;
        s.push((o, c));
        s.push((-o, -c));
    }
    s
}

/// ⟨X⟩ = (iħ/2)Σ(∂₁ − ∂₂)F|_{p₁=p₂} and ⟨X²⟩ = ħ²Σ∂₁∂₂F|_{p₁=p₂}, with
/// derivatives by central differences on the grid (values beyond the grid
/// are zero).
pub fn observables_fd(joint: &JointState, grid: &MomentumGrid, constants: &PhysicalConstants) -> RawMoments {
    let n = grid.len() as isize;
    let st = stencil();
    let h = grid.dp;
    let hbar = constants.hbar;
    let inside = |j: isize| j >= 0 && j < n;
    let parts: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut d1 = C64::new(0.0, 0.0);
            let mut d12 = C64::new(0.0, 0.0);
            for &(o, c) in &st {
                if inside(j + o) {
                    d1 += overlap_f(joint, (j + o) as usize, j as usize) * c;
                }
                for &(o2, c2) in &st {
                    if inside(j + o) && inside(j + o2) {
                        d12 += overlap_f(joint, (j + o) as usize, (j + o2) as usize) * (c * c2);
                    }
                }
            }
            // ∂₂F at the diagonal is the conjugate of ∂₁F
            let x = (C64::new(0.0, 0.5 * hbar) * (d1 - d1.conj())).re / h;
            (x, hbar * hbar * d12.re / (h * h))
        })
        .collect();
    let (x, x2) = parts.iter().fold((0.0, 0.0), |(a, b), &(u, v)| (a + u, b + v));
    let (norm, p, p2) = momentum_sums(joint, grid);
    RawMoments { norm, x, x2, p, p2 }
}

/// Mean and variance of E = iℰ(a − a†) after free evolution of the mode for time t.
pub fn field_quadrature_stats(v: &[C64], mode: &Mode, t: f64, basis: &FockBasis) -> (f64, f64) {
    let psi = DVector::from_iterator(basis.dim, v.iter().enumerate().map(|(n, c)| c * C64::from_polar(1.0, -mode.omega * n as f64 * t)));
    let e_op = basis.quadrature_y() * C64::new(mode.amp_e, 0.0);
    let ev = &e_op * &psi;
    let mean = psi.dotc(&ev).re;
    let sq = ev.dotc(&ev).re;
    (mean, sq - mean * mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fock::squeeze;
    use crate::oracle::grid::GaussianPacket;
    use crate::state::{ElectronGaussian, ElectronMoments};

    const AU: PhysicalConstants = PhysicalConstants::atomic();

    fn free_packet(packet: &GaussianPacket, grid: &MomentumGrid, t: f64) -> JointState {
        let psi = grid
            .w
            .iter()
            .zip(&grid.p)
            .map(|(w, p)| vec![w * C64::from_polar(1.0, -p * p / 2.0 * t)])
            .collect();
        let _ = packet;
        JointState { dims: vec![1], psi }
    }

    #[test]
    fn free_gaussian_moments() {
        let pk = GaussianPacket::from_electron(&ElectronGaussian::new(10.0, 0.1, 3.0).unwrap().into(), &AU).unwrap();
        let grid = MomentumGrid::auto(&pk, 400.0, 1025, &AU).unwrap();
        for t in [0.0, 100.0, 300.0] {
            let m = observables(&free_packet(&pk, &grid, t), &grid, &AU).unwrap().finish();
            assert!((m.norm - 1.0).abs() < 1e-12);
            assert!((m.mean_x - (3.0 + 0.1 * t)).abs() < 1e-9);
            let expect = 100.0 + 2.5e-3 * t * t;
            assert!((m.var_x - expect).abs() < 1e-10 * expect, "{} vs {expect}", m.var_x);
            assert!((m.mean_p - 0.1).abs() < 1e-13);
            assert!((m.var_p - 2.5e-3).abs() < 1e-13);
            let fd = observables_fd(&free_packet(&pk, &grid, t), &grid, &AU).finish();
            assert!((fd.mean_x - m.mean_x).abs() < 1e-8 * m.mean_x.abs().max(10.0));
            assert!((fd.var_x - m.var_x).abs() < 1e-7 * m.var_x);
        }
    }

    #[test]
    fn chirped_packet_has_its_correlation() {
        let sp = 0.05;
        let b = 40.0;
        let mo = ElectronMoments {
            mean_x: 0.0,
            mean_p: 0.0,
            var_x: 1.0 / (4.0 * sp * sp) + 4.0 * b * b * sp * sp,
            var_p: sp * sp,
            corr_xp: 4.0 * b * sp * sp,
        };
        let pk = GaussianPacket::from_electron(&mo.into(), &AU).unwrap();
        let grid = MomentumGrid::auto(&pk, 600.0, 1025, &AU).unwrap();
        for t in [0.0, 50.0, 200.0] {
            let m = observables(&free_packet(&pk, &grid, t), &grid, &AU).unwrap().finish();
            let expect = mo.var_x + mo.corr_xp * t + mo.var_p * t * t;
            assert!((m.var_x - expect).abs() < 1e-10 * expect);
        }
    }

    #[test]
    fn aliasing_is_detected() {
        let pk = GaussianPacket::from_electron(&ElectronGaussian::new(10.0, 0.0, 0.0).unwrap().into(), &AU).unwrap();
        let grid = MomentumGrid::auto(&pk, 60.0, 3, &AU).unwrap();
        assert!(matches!(
            observables(&free_packet(&pk, &grid, 500.0), &grid, &AU),
            Err(Error::Aliasing { .. })
        ));
    }

    #[test]
    fn diagonal_overlap_is_the_momentum_density() {
        let pk = GaussianPacket::from_electron(&ElectronGaussian::new(10.0, 0.1, 0.0).unwrap().into(), &AU).unwrap();
        let grid = MomentumGrid::auto(&pk, 300.0, 513, &AU).unwrap();
        let s = free_packet(&pk, &grid, 77.0);
        for j in [100, 256, 400] {
            assert!((overlap_f(&s, j, j).re - grid.w[j].norm_sqr()).abs() < 1e-18);
        }
    }

    #[test]
    fn squeezed_field_variance() {
        let b = FockBasis::new(160).unwrap();
        let m = Mode::from_gamma(0.05, 0.002, &AU).unwrap();
        let (r, theta) = (1.2, 0.7);
        let mut v = b.vacuum();
        squeeze(&mut v, r, theta);
        for t in [0.0, 10.0, 33.0] {
            let (mean, var) = field_quadrature_stats(&v, &m, t, &b);
            let rot = C64::from_polar(1.0, -m.omega * t);
            let factor = (rot * r.cosh() - C64::from_polar(r.sinh(), -theta) * rot.conj()).norm_sqr();
            assert!(mean.abs() < 1e-14);
            assert!((var - m.amp_e * m.amp_e * factor).abs() < 1e-8 * var);
        }
    }
}
