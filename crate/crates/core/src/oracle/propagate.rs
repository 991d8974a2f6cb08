//! Exact propagation of p-resolved blocks.
//!
//! For a fixed electron momentum p the Hamiltonian is a sum of commuting
//! single-mode chains plus the scalar p²/2m, so exp(−iH(p)t/ħ) factorizes
//! into per-mode propagators obtained from eigendecompositions.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::fock::FockBasis;
use super::grid::MomentumGrid;
use super::tridiag::{SymTridiag, TridiagEigen};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::mode::Mode;

pub const MAX_ORACLE_MODES: usize = 2;

/// Field part of H(p): ħω(n + ½) on the diagonal and −(e/m)p𝒜√(n+1) beside it.
pub fn mode_chain(p: f64, mode: &Mode, dim: usize, constants: &PhysicalConstants) -> SymTridiag {
    let hw = constants.hbar * mode.omega;
    let g = -constants.charge_e / constants.mass_e * p * mode.amp_a;
    SymTridiag::new(
        (0..dim).map(|n| hw * (n as f64 + 0.5)).collect(),
        (0..dim.saturating_sub(1)).map(|n| g * ((n + 1) as f64).sqrt()).collect(),
    )
}

/// Dense single-mode block H(p) = p²/2m + ħω(N + ½) − (e/m)p𝒜(a + a†).
pub fn build_hamiltonian_block(p: f64, mode: &Mode, basis: &FockBasis, constants: &PhysicalConstants) -> DMatrix<C64> {
    let kinetic = p * p / (2.0 * constants.mass_e);
    let hw = constants.hbar * mode.omega;
    let coupling = constants.charge_e / constants.mass_e * p * mode.amp_a;
    let id = DMatrix::<C64>::identity(basis.dim, basis.dim);
    id * C64::new(kinetic + 0.5 * hw, 0.0) + basis.number() * C64::new(hw, 0.0)
        - basis.quadrature_x() * C64::new(coupling, 0.0)
}

/// Joint electron–field state: ψ_j = w_j χ_j for every grid point, with the
/// field vector flattened row-major over the mode dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub dims: Vec<usize>,
    pub psi: Vec<Vec<C64>>,
}

impl JointState {
    /// Product state w_j ⊗ v₁ ⊗ v₂.
    pub fn product(grid: &MomentumGrid, fields: &[&[C64]]) -> Self {
        let dims: Vec<usize> = fields.iter().map(|f| f.len()).collect();
        let mut joint = vec![C64::new(1.0, 0.0)];
        for f in fields {
            joint = joint.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect();
        }
        let psi = grid.w.iter().map(|w| joint.iter().map(|c| c * w).collect()).collect();
        Self { dims, psi }
    }

    pub fn norm(&self) -> f64 {
        self.psi.iter().map(|v| v.iter().map(|c| c.norm_sqr()).sum::<f64>()).sum()
    }

    pub fn field_len(&self) -> usize {
        self.dims.iter().product()
    }
}

/// Eigen-data of every p-block.
#[derive(Debug, Clone)]
pub struct Propagator {
    pub modes: Vec<Mode>,
    pub dims: Vec<usize>,
    kinetic: Vec<f64>,
    blocks: Vec<Vec<TridiagEigen>>,
    chains: Vec<Vec<SymTridiag>>,
    hbar: f64,
}

/// A joint state expanded in the eigenbasis of each block.
#[derive(Debug, Clone)]
pub struct Projected {
    coeffs: Vec<Vec<C64>>,
}

impl Propagator {
    pub fn new(grid: &MomentumGrid, modes: &[Mode], dims: &[usize], constants: &PhysicalConstants) -> Result<Self> {
        if modes.is_empty() || modes.len() > MAX_ORACLE_MODES || dims.len() != modes.len() {
            return Err(Error::OracleModeCount(modes.len()));
        }
        let (blocks, chains): (Vec<_>, Vec<_>) = grid
            .p
            .par_iter()
            .map(|&p| {
                let chains: Vec<SymTridiag> =
                    modes.iter().zip(dims).map(|(m, &d)| mode_chain(p, m, d, constants)).collect();
                (chains.iter().map(TridiagEigen::new).collect::<Vec<_>>(), chains)
            })
            .unzip();
        Ok(Self {
            modes: modes.to_vec(),
            dims: dims.to_vec(),
            kinetic: grid.p.iter().map(|p| p * p / (2.0 * constants.mass_e)).collect(),
            blocks,
            chains,
            hbar: constants.hbar,
        })
    }

    pub fn project(&self, joint: &JointState) -> Projected {
        let coeffs = self
            .blocks
            .par_iter()
            .zip(&joint.psi)
            .map(|(eig, psi)| match eig.len() {
                1 => eig[0].project(psi),
                _ => {
                    let (n1, n2) = (self.dims[0], self.dims[1]);
                    let mut y = vec![C64::new(0.0, 0.0); n1 * n2];
                    for c in 0..n2 {
                        let col: Vec<C64> = (0..n1).map(|r| psi[r * n2 + c]).collect();
                        for (r, v) in eig[0].project(&col).into_iter().enumerate() {
                            y[r * n2 + c] = v;
                        }
                    }
                    for r in 0..n1 {
                        let row = eig[1].project(&y[r * n2..(r + 1) * n2]);
                        y[r * n2..(r + 1) * n2].copy_from_slice(&row);
                    }
                    y
                }
            })
            .collect();
        Projected { coeffs }
    }

    /// The projected state after time t.
    pub fn synthesize(&self, projected: &Projected, t: f64) -> JointState {
        let s = t / self.hbar;
        let psi = self
            .blocks
            .par_iter()
            .zip(&projected.coeffs)
            .zip(&self.kinetic)
            .map(|((eig, c), &kin)| {
                let global = C64::from_polar(1.0, -kin * s);
                let mut out = match eig.len() {
                    1 => eig[0].synthesize(c, s),
                    _ => {
                        let (n1, n2) = (self.dims[0], self.dims[1]);
                        let mut y = vec![C64::new(0.0, 0.0); n1 * n2];
                        for r in 0..n1 {
                            let row = eig[1].synthesize(&c[r * n2..(r + 1) * n2], s);
                            y[r * n2..(r + 1) * n2].copy_from_slice(&row);
                        }
                        for col in 0..n2 {
                            let v: Vec<C64> = (0..n1).map(|r| y[r * n2 + col]).collect();
                            for (r, x) in eig[0].synthesize(&v, s).into_iter().enumerate() {
                                y[r * n2 + col] = x;
                            }
                        }
                        y
                    }
                };
                for x in &mut out {
                    *x *= global;
                }
                out
            })
            .collect();
        JointState {
            dims: self.dims.clone(),
            psi,
        }
    }

    pub fn propagate(&self, joint: &JointState, t: f64) -> JointState {
        self.synthesize(&self.project(joint), t)
    }

    /// ⟨H⟩ = Σ_j ψ_j†H(p_j)ψ_j.
    pub fn energy(&self, joint: &JointState) -> f64 {
        let parts: Vec<f64> = self
            .chains
            .par_iter()
            .zip(&joint.psi)
            .zip(&self.kinetic)
            .map(|((chains, psi), &kin)| {
                let mut e = kin * psi.iter().map(|c| c.norm_sqr()).sum::<f64>();
                match chains.len() {
                    1 => e += chain_expectation(&chains[0], psi),
                    _ => {
                        let (n1, n2) = (self.dims[0], self.dims[1]);
                        for c in 0..n2 {
                            let col: Vec<C64> = (0..n1).map(|r| psi[r * n2 + c]).collect();
                            e += chain_expectation(&chains[0], &col);
                        }
                        for r in 0..n1 {
                            e += chain_expectation(&chains[1], &psi[r * n2..(r + 1) * n2]);
                        }
                    }
                }
                e
            })
            .collect();
        parts.iter().sum()
    }
}

fn chain_expectation(t: &SymTridiag, v: &[C64]) -> f64 {
    let n = v.len();
    let mut e = 0.0;
    for i in 0..n {
        e += t.diag[i] * v[i].norm_sqr();
        if i + 1 < n {
            e += 2.0 * t.off[i] * (v[i].conj() * v[i + 1]).re;
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fock::{displace, squeeze};
    use crate::oracle::grid::GaussianPacket;
    use crate::state::ElectronGaussian;
    use nalgebra::DVector;

    const AU: PhysicalConstants = PhysicalConstants::atomic();

    fn small_grid() -> MomentumGrid {
        let pk = GaussianPacket::from_electron(&ElectronGaussian::new(10.0, 0.4, 0.0).unwrap().into(), &AU).unwrap();
        MomentumGrid::new(&pk, 41, 0.025, &AU).unwrap()
    }

    #[test]
    fn block_is_hermitian_and_tridiagonal() {
        let m = Mode::from_gamma(0.05, 0.3, &AU).unwrap();
        let b = FockBasis::new(12).unwrap();
        let h = build_hamiltonian_block(0.7, &m, &b, &AU);
        assert_eq!(h, h.adjoint());
        let chain = mode_chain(0.7, &m, 12, &AU);
        for i in 0..12 {
            assert!((h[(i, i)].re - 0.245 - chain.diag[i]).abs() < 1e-15);
            if i + 1 < 12 {
                assert!((h[(i, i + 1)].re - chain.off[i]).abs() < 1e-15);
            }
        }
        let h0 = build_hamiltonian_block(0.0, &m, &b, &AU);
        assert!(h0.iter().enumerate().all(|(k, c)| k % 13 == 0 || *c == C64::new(0.0, 0.0)));
    }

    #[test]
    fn ground_energy_with_renormalized_mass() {
        let m = Mode::from_gamma(0.05, 0.002, &AU).unwrap();
        let b = FockBasis::new(64).unwrap();
        let p = 0.3;
        let eig = TridiagEigen::new(&mode_chain(p, &m, 64, &AU));
        let meff = crate::mode::effective_mass(&[m], &AU).unwrap();
        let lowest = eig.values[0] + p * p / 2.0;
        let expect = p * p / (2.0 * meff) + 0.5 * m.omega;
        assert!((lowest - expect).abs() < 1e-8 * expect);
        let dense = nalgebra::SymmetricEigen::new(build_hamiltonian_block(p, &m, &b, &AU).map(|c| c.re));
        let min = dense.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        assert!((min - lowest).abs() < 1e-13);
    }

    #[test]
    fn zero_time_is_identity_and_zero_coupling_is_diagonal() {
        let grid = small_grid();
        let m = Mode::from_gamma(0.05, 0.0, &AU).unwrap();
        let mut v = FockBasis::new(20).unwrap().vacuum();
        displace(&mut v, C64::new(1.0, 0.5));
        let joint = JointState::product(&grid, &[&v]);
        let prop = Propagator::new(&grid, &[m], &[20], &AU).unwrap();
        let same = prop.propagate(&joint, 0.0);
        for (a, b) in same.psi.iter().flatten().zip(joint.psi.iter().flatten()) {
            assert!((a - b).norm() < 1e-15);
        }
        let t = 13.0;
        let later = prop.propagate(&joint, t);
        for (j, p) in grid.p.iter().enumerate() {
            for n in 0..20 {
                let phase = C64::from_polar(1.0, -(p * p / 2.0 + 0.05 * (n as f64 + 0.5)) * t);
                assert!((later.psi[j][n] - joint.psi[j][n] * phase).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn matches_dense_exponential() {
        let grid = small_grid();
        let m = Mode::from_gamma(0.07, 0.4, &AU).unwrap();
        let dim = 30;
        let mut v = FockBasis::new(dim).unwrap().vacuum();
        squeeze(&mut v, 0.3, 1.0);
        displace(&mut v, C64::new(0.8, -0.2));
        let joint = JointState::product(&grid, &[&v]);
        let prop = Propagator::new(&grid, &[m], &[dim], &AU).unwrap();
        let t = 37.0;
        let out = prop.propagate(&joint, t);
        let b = FockBasis::new(dim).unwrap();
        for j in [0, 13, 20, 33] {
            let h = build_hamiltonian_block(grid.p[j], &m, &b, &AU).map(|c| c.re);
            let eig = nalgebra::SymmetricEigen::new(h);
            let phases = DVector::from_iterator(dim, eig.eigenvalues.iter().map(|l| C64::from_polar(1.0, -l * t)));
            let q = eig.eigenvectors.map(|x| C64::new(x, 0.0));
            let x0 = DVector::from_vec(joint.psi[j].clone());
            let y = &q * (q.transpose() * x0).component_mul(&phases);
            for n in 0..dim {
                assert!((y[n] - out.psi[j][n]).norm() < 1e-12, "j = {j}, n = {n}");
            }
        }
    }

    #[test]
    fn two_modes_match_the_dense_tensor_product() {
        let grid = small_grid();
        let m1 = Mode::from_gamma(0.05, 0.3, &AU).unwrap();
        let m2 = Mode::from_gamma(0.08, 0.2, &AU).unwrap();
        let (d1, d2) = (8, 6);
        let mut v1 = vec![C64::new(0.0, 0.0); d1];
        v1[0] = C64::new(0.8, 0.0);
        v1[1] = C64::new(0.6, 0.0);
        let mut v2 = vec![C64::new(0.0, 0.0); d2];
        v2[0] = C64::new(0.0, 1.0);
        let joint = JointState::product(&grid, &[&v1, &v2]);
        let prop = Propagator::new(&grid, &[m1, m2], &[d1, d2], &AU).unwrap();
        let t = 21.0;
        let out = prop.propagate(&joint, t);
        for j in [3, 20, 30] {
            let p = grid.p[j];
            let n = d1 * d2;
            let c1 = mode_chain(p, &m1, d1, &AU);
            let c2 = mode_chain(p, &m2, d2, &AU);
            let h = DMatrix::from_fn(n, n, |a, b| {
                let (i1, i2) = (a / d2, a % d2);
                let (k1, k2) = (b / d2, b % d2);
                let mut v = 0.0;
                if i2 == k2 {
                    v += if i1 == k1 { c1.diag[i1] } else if i1 + 1 == k1 { c1.off[i1] } else if k1 + 1 == i1 { c1.off[k1] } else { 0.0 };
                }
                if i1 == k1 {
                    v += if i2 == k2 { c2.diag[i2] } else if i2 + 1 == k2 { c2.off[i2] } else if k2 + 1 == i2 { c2.off[k2] } else { 0.0 };
                }
                if a == b {
                    v += p * p / 2.0;
                }
                v
            });
            let eig = nalgebra::SymmetricEigen::new(h);
            let phases = DVector::from_iterator(n, eig.eigenvalues.iter().map(|l| C64::from_polar(1.0, -l * t)));
            let q = eig.eigenvectors.map(|x| C64::new(x, 0.0));
            let y = &q * (q.transpose() * DVector::from_vec(joint.psi[j].clone())).component_mul(&phases);
            for k in 0..n {
                assert!((y[k] - out.psi[j][k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn three_modes_are_refused() {
        let grid = small_grid();
        let m = Mode::from_gamma(0.05, 0.1, &AU).unwrap();
        assert!(matches!(
            Propagator::new(&grid, &[m, m, m], &[8, 8, 8], &AU),
            Err(Error::OracleModeCount(3))
        ));
    }

    #[test]
    fn coherent_field_returns_after_a_period() {
        let pk = GaussianPacket::from_electron(&ElectronGaussian::new(10.0, 0.1, 0.0).unwrap().into(), &AU).unwrap();
        let grid = MomentumGrid::auto(&pk, 300.0, 513, &AU).unwrap();
        let m = Mode::from_gamma(0.05, 0.002, &AU).unwrap();
        let mut v = FockBasis::new(64).unwrap().vacuum();
        displace(&mut v, C64::new(5.0, 0.0));
        let joint = JointState::product(&grid, &[&v]);
        let prop = Propagator::new(&grid, &[m], &[64], &AU).unwrap();
        let out = prop.propagate(&joint, m.period());
        for j in (0..grid.len()).step_by(16) {
            let a: C64 = joint.psi[j].iter().zip(&out.psi[j]).map(|(x, y)| x.conj() * y).sum();
            let n0: f64 = joint.psi[j].iter().map(|c| c.norm_sqr()).sum();
            if n0 > 1e-30 {
                assert!(a.norm() / n0 > 1.0 - 1e-8, "j = {j}");
            }
        }
    }
}
