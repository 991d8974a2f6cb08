//! Time series from the oracle.

use std::io::Write;

use num_complex::Complex64 as C64;

use super::fock::{initial_field_vector, FockBasis, InitialField};
use super::grid::{GaussianPacket, MomentumGrid, MIN_POINTS};
use super::observe::{observables, observables_fd, RawMoments};
use super::propagate::{JointState, Projected, Propagator};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::mode::Mode;
use crate::state::{Electron, FieldModeState};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSetup {
    pub electron: Electron,
    pub modes: Vec<Mode>,
    pub states: Vec<FieldModeState>,
    /// Number-basis dimension per mode.
    pub n_fock: Vec<usize>,
    /// Lower bound on the number of momentum points (odd count is enforced).
    pub min_points: usize,
    /// Explicit grid (points, δp) overriding the automatic choice.
    pub grid: Option<(usize, f64)>,
}

impl OracleSetup {
    pub fn single(electron: Electron, mode: Mode, state: FieldModeState, n_fock: usize) -> Self {
        Self {
            electron,
            modes: vec![mode],
            states: vec![state],
            n_fock: vec![n_fock],
            min_points: MIN_POINTS,
            grid: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSample {
    pub t: f64,
    pub mean_x: f64,
    pub var_x: f64,
    pub mean_p: f64,
    pub var_p: f64,
    pub norm: f64,
    pub energy: f64,
}

/// A prepared run: eigen-data of all blocks plus the projected initial
/// state of every mixture component.
pub struct Oracle {
    pub grid: MomentumGrid,
    pub propagator: Propagator,
    /// Weight and per-mode field vector of every mixture component.
    components: Vec<(f64, Vec<Vec<C64>>)>,
    /// Cached projection for a pure initial state.
    pure: Option<Projected>,
    constants: PhysicalConstants,
}

fn mean_photons(f: &InitialField) -> f64 {
    match f {
        InitialField::Pure(v) => v.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum(),
        InitialField::Mixture(w) => w.last().map_or(0.0, |&(_, n)| n as f64),
    }
}

fn components_of(f: &InitialField, dim: usize) -> Vec<(f64, Vec<C64>)> {
    match f {
        InitialField::Pure(v) => vec![(1.0, v.clone())],
        // weights stay unnormalized; moments are divided by the weighted norm
        InitialField::Mixture(w) => w.iter().map(|&(p, n)| (p, FockBasis { dim }.number_state(n))).collect(),
    }
}

impl Oracle {
    /// Prepares a run valid up to time `t_max` (used to size the x-window).
    pub fn new(setup: &OracleSetup, t_max: f64, constants: &PhysicalConstants) -> Result<Self> {
        let n = setup.modes.len();
        if n == 0 || n > 2 {
            return Err(Error::OracleModeCount(n));
        }
        if setup.states.len() != n || setup.n_fock.len() != n {
            return Err(Error::LengthMismatch {
                modes: n,
                states: setup.states.len().min(setup.n_fock.len()),
            });
        }
        let packet = GaussianPacket::from_electron(&setup.electron, constants)?;
        let mut fields = Vec::with_capacity(n);
        for ((m, s), &d) in setup.modes.iter().zip(&setup.states).zip(&setup.n_fock) {
            fields.push(initial_field_vector(s, m, &FockBasis::new(d)?, constants)?);
        }
        let grid = match setup.grid {
            Some((points, dp)) => MomentumGrid::new(&packet, points, dp, constants)?,
            None => {
                let hbar = constants.hbar;
                let v_spread = packet.sigma_p * t_max / constants.mass_e;
                let field: f64 = setup
                    .modes
                    .iter()
                    .zip(&fields)
                    .map(|(m, f)| 4.0 * hbar * m.gamma * (mean_photons(f).sqrt() + 1.0))
                    .sum();
                let extent = packet.x0.abs()
                    + packet.p0.abs() * t_max / constants.mass_e
                    + field
                    + 10.0 * (packet.sigma_x(constants) + v_spread + field);
                MomentumGrid::auto(&packet, extent, setup.min_points, constants)?
            }
        };
        let propagator = Propagator::new(&grid, &setup.modes, &setup.n_fock, constants)?;
        let per_mode: Vec<Vec<(f64, Vec<C64>)>> =
            fields.iter().zip(&setup.n_fock).map(|(f, &d)| components_of(f, d)).collect();
        let mut components: Vec<(f64, Vec<Vec<C64>>)> = vec![(1.0, Vec::new())];
        for comps in &per_mode {
            components = components
                .iter()
                .flat_map(|(w, vs)| {
                    comps.iter().map(move |(p, v)| {
                        let mut vs = vs.clone();
                        vs.push(v.clone());
                        (w * p, vs)
                    })
                })
                .collect();
        }
        let mut oracle = Self {
            grid,
            propagator,
            components,
            pure: None,
            constants: *constants,
        };
        if oracle.components.len() == 1 {
            oracle.pure = Some(oracle.propagator.project(&oracle.initial_state(0)));
        }
        Ok(oracle)
    }

    fn initial_state(&self, k: usize) -> JointState {
        let vs: Vec<&[C64]> = self.components[k].1.iter().map(|v| v.as_slice()).collect();
        JointState::product(&self.grid, &vs)
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Joint state of mixture component `k` at time t.
    pub fn state_at(&self, k: usize, t: f64) -> JointState {
        match &self.pure {
            Some(p) => self.propagator.synthesize(p, t),
            None => self.propagator.propagate(&self.initial_state(k), t),
        }
    }

    /// Total Boltzmann weight of the mixture components kept (1 for pure states).
    pub fn retained_weight(&self) -> f64 {
        self.components.iter().map(|c| c.0).sum()
    }

    fn combine<F>(&self, t: f64, mut f: F) -> Result<(RawMoments, f64)>
    where
        F: FnMut(&JointState) -> Result<RawMoments>,
    {
        let mut acc = RawMoments::default();
        let mut energy = 0.0;
        for (k, (w, _)) in self.components.iter().enumerate() {
            let s = self.state_at(k, t);
            acc = acc.add(f(&s)?.scaled(*w));
            energy += w * self.propagator.energy(&s);
        }
        Ok((acc, energy))
    }

    /// Moments at time t by the position-space route.
    pub fn sample(&self, t: f64) -> Result<OracleSample> {
        let (raw, energy) = self.combine(t, |s| observables(s, &self.grid, &self.constants))?;
        let m = raw.finish();
        Ok(OracleSample {
            t,
            mean_x: m.mean_x,
            var_x: m.var_x,
            mean_p: m.mean_p,
            var_p: m.var_p,
            norm: m.norm,
            energy: energy / m.norm,
        })
    }

    /// Moments at time t by finite differences of F(p₁, p₂).
    pub fn sample_fd(&self, t: f64) -> Result<OracleSample> {
        let (raw, energy) = self.combine(t, |s| Ok(observables_fd(s, &self.grid, &self.constants)))?;
        let m = raw.finish();
        Ok(OracleSample {
            t,
            mean_x: m.mean_x,
            var_x: m.var_x,
            mean_p: m.mean_p,
            var_p: m.var_p,
            norm: m.norm,
            energy: energy / m.norm,
        })
    }

    pub fn run(&self, times: &[f64]) -> Result<Vec<OracleSample>> {
        times.iter().map(|&t| self.sample(t)).collect()
    }

}

pub fn write_csv<W: Write>(samples: &[OracleSample], mut w: W) -> std::io::Result<()> {
    writeln!(w, "t,mean_x,var_x,mean_p,var_p,norm,energy")?;
    for s in samples {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.t, s.mean_x, s.var_x, s.mean_p, s.var_p, s.norm, s.energy
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::ElectronGaussian;

    const AU: PhysicalConstants = PhysicalConstants::atomic();

    fn electron() -> Electron {
        ElectronGaussian::new(10.0, 0.1, 0.0).unwrap().into()
    }

    #[test]
    fn csv_layout() {
        let s = OracleSample {
            t: 1.0,
            mean_x: 0.1,
            var_x: 100.0,
            mean_p: 0.1,
            var_p: 2.5e-3,
            norm: 1.0,
            energy: 0.03,
        };
        let mut buf = Vec::new();
        write_csv(&[s, s], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "t,mean_x,var_x,mean_p,var_p,norm,energy");
        assert_eq!(text.lines().count(), 3);
        let back: f64 = text.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn doubling_the_truncation_changes_nothing() {
        let m = Mode::from_gamma(0.05, 0.002, &AU).unwrap();
        let state = FieldModeState::coherent(3.0, 1.0);
        let t = 2.5 * m.period();
        let a = Oracle::new(&OracleSetup::single(electron(), m, state, 48), t, &AU).unwrap().sample(t).unwrap();
        let b = Oracle::new(&OracleSetup::single(electron(), m, state, 96), t, &AU).unwrap().sample(t).unwrap();
        assert!((a.mean_x - b.mean_x).abs() < 1e-8 * a.mean_x.abs());
        assert!((a.var_x - b.var_x).abs() < 1e-8 * a.var_x);
    }

    #[test]
    fn thermal_mixture_keeps_the_boltzmann_weight() {
        let omega = AU.thermal_energy(300.0) * 2f64.ln();
        let m = Mode::from_gamma(omega, 0.002, &AU).unwrap();
        let setup = OracleSetup::single(electron(), m, FieldModeState::Thermal { temperature: 300.0 }, 64);
        let o = Oracle::new(&setup, 100.0, &AU).unwrap();
        assert!(o.retained_weight() > 1.0 - 1e-12);
        assert!(o.component_count() >= 40);
        let s = o.sample(100.0).unwrap();
        assert!((s.norm - o.retained_weight()).abs() < 1e-12);
    }

    #[test]
    fn position_routes_agree() {
        let m = Mode::from_gamma(0.05, 0.2, &AU).unwrap();
        let setup = OracleSetup {
            min_points: 2049,
            ..OracleSetup::single(electron(), m, FieldModeState::coherent(2.0, 0.0), 48)
        };
        let t = m.period();
        let o = Oracle::new(&setup, t, &AU).unwrap();
        let a = o.sample(t).unwrap();
        let b = o.sample_fd(t).unwrap();
        assert!((a.mean_x - b.mean_x).abs() < 1e-6 * a.mean_x.abs());
        assert!((a.var_x - b.var_x).abs() < 1e-6 * a.var_x);
    }
}
