//! Scenario execution. Produces curves and checks; writing happens in `output`.

use num_complex::Complex64 as C64;
use qfield_core::analytic::{
    classical_trajectory, deviation_from_free, field_waveform_stats, position_mean, position_variance,
    reduction_window, spectral_width_bound, variance_difference, ClassicalWaveform, Monochromatic,
};
use qfield_core::constants::units;
use qfield_core::oracle::{initial_field_vector, FockBasis, Oracle, OracleSetup};
use qfield_core::pulse::{apply_squeezing, build_mode_grid, write_grid_csv, SynthesizedPulse};
use qfield_core::{Electron, ElectronGaussian, Error, Field, FieldModeState, Mode, PhysicalConstants};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ElectronSpec, Issue, Scenario, StateSpec, TimeGrid, WaveformSpec};

const AU: PhysicalConstants = PhysicalConstants::atomic();

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: String,
    /// First column is always t.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowInfo {
    pub label: String,
    pub r: f64,
    pub theta: f64,
    pub omega: f64,
    pub start: f64,
    pub end: f64,
    pub period: f64,
    pub outside_claim: bool,
    /// Window edges inside the time grid.
    pub boundaries: Vec<f64>,
}

#[derive(Debug, Default)]
pub struct Output {
    pub curves: Vec<Curve>,
    pub windows: Vec<WindowInfo>,
    pub checks: Vec<Check>,
    /// Additional files (name, contents) written verbatim after the metadata header.
    pub extra: Vec<(String, String)>,
}

#[derive(Debug)]
pub enum RunError {
    /// The scenario is valid in form but cannot be built (exit code 2).
    Config(Vec<Issue>),
    /// A numerical stage failed (exit code 3).
    Numerical(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Numerical(e.to_string())
    }
}

type RunResult<T> = Result<T, RunError>;

fn config_error(path: &str, message: String) -> RunError {
    RunError::Config(vec![Issue {
        path: path.into(),
        message,
    }])
}

fn electron(e: &ElectronSpec) -> RunResult<Electron> {
    Ok(ElectronGaussian::new(e.sigma_x, e.p0, e.x0)?.into())
}

fn label(prefix: &str, x: f64) -> String {
    format!("{prefix}{x}")
}

fn curve(name: String, columns: &[&str], ts: &[f64], f: impl Fn(f64) -> RunResult<Vec<f64>>) -> RunResult<Curve> {
    let rows = ts
        .iter()
        .map(|&t| {
            let mut row = vec![t];
            row.extend(f(t)?);
            Ok(row)
        })
        .collect::<RunResult<Vec<_>>>()?;
    Ok(Curve {
        name,
        columns: columns.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

fn window_info(label: String, r: f64, theta: f64, omega: f64, grid: &TimeGrid) -> RunResult<WindowInfo> {
    let w = reduction_window(r, theta, omega)?;
    Ok(WindowInfo {
        label,
        r,
        theta,
        omega,
        start: w.start,
        end: w.end,
        period: w.period,
        outside_claim: w.outside_claim,
        boundaries: w.boundaries_in(grid.start, grid.stop),
    })
}

/// Negative exactly inside the windows, ignoring samples at rounding level
/// (whole periods, where the difference has a double zero) and samples
/// sitting on a window edge.
fn window_sign_check(c: &Curve, r: f64, theta: f64, omega: f64) -> RunResult<Check> {
    let name = format!("{}_negative_inside_windows", c.name);
    let w = reduction_window(r, theta, omega)?;
    let peak = c.rows.iter().fold(0.0f64, |m, row| m.max(row[1].abs()));
    let edge = 1e-9 * w.period;
    let mut bad = Vec::new();
    for row in &c.rows {
        let (t, d) = (row[0], row[1]);
        if d.abs() <= 1e-12 * peak {
            continue;
        }
        let near_edge = w
            .boundaries_in(t - edge, t + edge)
            .iter()
            .any(|b| (b - t).abs() <= edge);
        if !near_edge && (d < 0.0) != w.contains(t) {
            bad.push(t);
        }
    }
    Ok(match bad.first() {
        None => Check::new(name, true, format!("{} samples checked", c.rows.len())),
        Some(t) => Check::new(name, false, format!("{} samples disagree, first at t = {t}", bad.len())),
    })
}

fn single_mode(
    omega: f64,
    gamma: f64,
    r_list: &[f64],
    theta: f64,
    alpha: [f64; 2],
    t_grid: &TimeGrid,
) -> RunResult<Output> {
    let mode = Mode::from_gamma(omega, gamma, &AU)?;
    let alpha = C64::new(alpha[0], alpha[1]);
    let coherent = Field::single(mode, FieldModeState::Coherent { alpha }, &AU)?;
    let ts = t_grid.times();
    let curves = r_list
        .par_iter()
        .map(|&r| {
            let sq = Field::single(mode, FieldModeState::SqueezedCoherent { alpha, r, theta }, &AU)?;
            curve(label("diff_r", r), &["t", "delta_var_x"], &ts, |t| {
                Ok(vec![variance_difference(&sq, &coherent, t, &AU)?])
            })
        })
        .collect::<RunResult<Vec<_>>>()?;
    let mut out = Output::default();
    for (c, &r) in curves.iter().zip(r_list) {
        if r == 0.0 {
            let zero = c.rows.iter().all(|row| row[1] == 0.0);
            out.checks.push(Check::new(format!("{}_identically_zero", c.name), zero, "r = 0"));
        } else {
            out.checks.push(window_sign_check(c, r, theta, omega)?);
        }
        out.windows.push(window_info(c.name.clone(), r, theta, omega, t_grid)?);
    }
    out.curves = curves;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn zero_mean(
    omega: f64,
    gamma: f64,
    bsv_r: f64,
    thetas: &[f64],
    fock: &[u32],
    thermal_t: f64,
    e: &ElectronSpec,
    t_grid: &TimeGrid,
) -> RunResult<Output> {
    let mode = Mode::from_gamma(omega, gamma, &AU)?;
    let el = electron(e)?;
    let ts = t_grid.times();
    let zero = C64::new(0.0, 0.0);
    let mut specs: Vec<(String, FieldModeState, bool)> = thetas
        .iter()
        .map(|&theta| {
            let s = FieldModeState::SqueezedCoherent {
                alpha: zero,
                r: bsv_r,
                theta,
            };
            (label("bsv_theta", theta), s, false)
        })
        .collect();
    specs.extend(fock.iter().map(|&n| (format!("fock_n{n}"), FieldModeState::Fock { n }, true)));
    specs.push((label("thermal_T", thermal_t), FieldModeState::Thermal { temperature: thermal_t }, true));
    let curves = specs
        .par_iter()
        .map(|(name, state, deviation)| {
            let field = Field::single(mode, *state, &AU)?;
            if *deviation {
                curve(name.clone(), &["t", "delta_var_x_vs_free"], &ts, |t| {
                    Ok(vec![deviation_from_free(&el, &field, t, &AU)])
                })
            } else {
                curve(name.clone(), &["t", "var_x"], &ts, |t| {
                    Ok(vec![position_variance(&el, &field, t, &AU).total])
                })
            }
        })
        .collect::<RunResult<Vec<_>>>()?;
    let mut out = Output::default();

    // more photons, more spreading; thermal sits above the vacuum
    let vacuum = Field::single(mode, FieldModeState::Vacuum, &AU)?;
    let vac: Vec<f64> = ts.iter().map(|&t| deviation_from_free(&el, &vacuum, t, &AU)).collect();
    let mut order: Vec<(u32, &Curve)> = fock
        .iter()
        .copied()
        .zip(curves.iter().skip(thetas.len()))
        .collect();
    order.sort_by_key(|p| p.0);
    let tol = |a: f64, b: f64| 1e-12 * (a.abs() + b.abs()) + 1e-300;
    let mut ordered = true;
    for pair in order.windows(2) {
        for (lo, hi) in pair[0].1.rows.iter().zip(&pair[1].1.rows) {
            ordered &= hi[1] >= lo[1] - tol(lo[1], hi[1]);
        }
    }
    out.checks.push(Check::new("fock_deviation_grows_with_n", ordered, format!("n = {fock:?}")));
    let thermal = curves.last().unwrap();
    let above = thermal
        .rows
        .iter()
        .zip(&vac)
        .all(|(row, v)| row[1] >= v - tol(row[1], *v));
    out.checks.push(Check::new("thermal_at_or_above_vacuum", above, format!("T = {thermal_t} K")));
    for &theta in thetas {
        out.windows.push(window_info(label("bsv_theta", theta), bsv_r, theta, omega, t_grid)?);
    }
    out.curves = curves;
    Ok(out)
}

fn multimode(
    pulse: &crate::config::PulseConfig,
    r_list: &[f64],
    theta: f64,
    band: Option<(f64, f64)>,
    t_grid: &TimeGrid,
) -> RunResult<Output> {
    let spec = pulse.to_spec();
    let grid = build_mode_grid(&spec, &AU).map_err(|e| match e {
        Error::InsufficientModes { required, .. } => config_error(
            "pulse.n_modes",
            format!("{e}; set n_modes >= {required}, raise spectral_floor or shorten t_box"),
        ),
        other => other.into(),
    })?;
    let coherent = grid.field(&AU)?;
    let ts = t_grid.times();
    let mut out = Output::default();

    let curves = r_list
        .par_iter()
        .map(|&r| {
            let sq = apply_squeezing(&grid, r, theta, band)?.field(&AU)?;
            curve(label("diff_r", r), &["t", "delta_var_x"], &ts, |t| {
                Ok(vec![variance_difference(&sq, &coherent, t, &AU)?])
            })
        })
        .collect::<RunResult<Vec<_>>>()?;

    let pulse_wave = &grid.pulse;
    let field_curve = curve("field".into(), &["t", "mean_e", "var_e", "e_classical"], &ts, |t| {
        let (m, v) = field_waveform_stats(&coherent, t, &AU)?;
        Ok(vec![m, v, pulse_wave.field_at(t)])
    })?;
    let peak = pulse_wave.peak();
    let worst = field_curve
        .rows
        .iter()
        .fold(0.0f64, |m, row| m.max((row[1] - row[3]).abs()));
    out.checks.push(Check::new(
        "waveform_reconstruction",
        worst < 1e-6 * peak,
        format!("max |<E> - E_cl| = {:.3e} of peak", worst / peak),
    ));
    let target = units::joule_to_au(spec.energy_j);
    let energy = (grid.photon_energy(&AU) - target).abs() / target;
    out.checks.push(Check::new(
        "photon_energy_matches_pulse",
        energy < 1e-10,
        format!("relative error {energy:.3e}"),
    ));

    let (lo, hi) = band.unwrap_or_else(|| {
        let lit: Vec<f64> = grid
            .modes
            .iter()
            .zip(&grid.coherent_alphas)
            .filter(|(_, a)| a.norm() > 0.0)
            .map(|(m, _)| m.omega)
            .collect();
        (lit.first().copied().unwrap_or(0.0), lit.last().copied().unwrap_or(0.0))
    });
    let centre = 0.5 * (lo + hi);
    for (c, &r) in curves.iter().zip(r_list) {
        let mut hits = 0;
        let mut ok = true;
        for row in &c.rows {
            if spectral_width_bound(r, theta, centre, hi - lo, row[0])?.satisfied {
                hits += 1;
                ok &= row[1] < 0.0;
            }
        }
        out.checks.push(Check::new(
            format!("{}_spectral_bound_implies_reduction", c.name),
            ok,
            format!("{hits} samples satisfy the bound"),
        ));
        out.windows.push(window_info(c.name.clone(), r, theta, centre, t_grid)?);
    }

    let mut modes = Vec::new();
    let squeezed = apply_squeezing(&grid, r_list[0], theta, band)?;
    write_grid_csv(&squeezed, &mut modes).map_err(|e| RunError::Numerical(e.to_string()))?;
    out.extra.push(("modes".into(), String::from_utf8(modes).unwrap()));
    out.curves = curves;
    out.curves.push(field_curve);
    Ok(out)
}

fn fock_dim(state: &FieldModeState, mode: &Mode) -> RunResult<usize> {
    let mut dim = 64;
    loop {
        match initial_field_vector(state, mode, &FockBasis::new(dim)?, &AU) {
            Err(Error::TruncationHeadroom { required, .. }) => dim = required,
            Err(e) => return Err(e.into()),
            Ok(_) => return Ok(dim),
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn oracle_compare(
    omega: f64,
    gamma: f64,
    state: &StateSpec,
    e: &ElectronSpec,
    t_grid: &TimeGrid,
    n_fock: Option<usize>,
    grid: &crate::config::GridSpec,
    tolerance: f64,
) -> RunResult<Output> {
    let mode = Mode::from_gamma(omega, gamma, &AU)?;
    let st = state.to_state();
    let el = electron(e)?;
    let dim = match n_fock {
        Some(d) => d,
        None => fock_dim(&st, &mode)?,
    };
    let setup = OracleSetup {
        min_points: grid.min_points,
        grid: grid.explicit,
        ..OracleSetup::single(el, mode, st, dim)
    };
    let oracle = Oracle::new(&setup, t_grid.stop, &AU).map_err(|err| match err {
        Error::TruncationHeadroom { required, .. } => {
            config_error("n_fock", format!("{err}; use n_fock >= {required} or \"auto\""))
        }
        other => other.into(),
    })?;
    let field = Field::single(mode, st, &AU)?;
    let ts = t_grid.times();
    let samples = ts
        .iter()
        .map(|&t| oracle.sample(t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Output::default();
    let oracle_curve = Curve {
        name: "oracle".into(),
        columns: ["t", "mean_x", "var_x", "mean_p", "var_p", "norm", "energy"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows: samples
            .iter()
            .map(|s| vec![s.t, s.mean_x, s.var_x, s.mean_p, s.var_p, s.norm, s.energy])
            .collect(),
    };
    let m = el.moments(&AU);
    let analytic = curve("analytic".into(), &["t", "mean_x", "var_x", "mean_p", "var_p"], &ts, |t| {
        Ok(vec![
            position_mean(&el, &field, t, &AU),
            position_variance(&el, &field, t, &AU).total,
            m.mean_p,
            m.var_p,
        ])
    })?;
    let deviation = Curve {
        name: "deviation".into(),
        columns: vec!["t".into(), "rel_mean_x".into(), "rel_var_x".into()],
        rows: samples
            .iter()
            .zip(&analytic.rows)
            .map(|(s, a)| {
                let scale = s.mean_x.abs().max(s.var_x.sqrt());
                vec![s.t, (a[1] - s.mean_x).abs() / scale, (a[2] - s.var_x).abs() / s.var_x]
            })
            .collect(),
    };
    let worst = deviation
        .rows
        .iter()
        .fold(0.0f64, |acc, r| acc.max(r[1]).max(r[2]));
    out.checks.push(Check::new(
        "oracle_matches_analytic",
        worst < tolerance,
        format!("max relative deviation {worst:.3e} (tolerance {tolerance:e}, N_F {dim}, {} grid points)", oracle.grid.len()),
    ));
    let first = samples[0];
    let drift = |f: fn(&qfield_core::oracle::OracleSample) -> f64| {
        samples.iter().fold(0.0f64, |acc, s| acc.max((f(s) - f(&first)).abs()))
    };
    let dn = drift(|s| s.norm);
    let de = drift(|s| s.energy) / first.energy.abs();
    let dp = drift(|s| s.mean_p) / first.mean_p.abs().max(first.var_p.sqrt());
    let dvp = drift(|s| s.var_p) / first.var_p;
    out.checks.push(Check::new("norm_conserved", dn < 1e-12, format!("drift {dn:.3e}")));
    out.checks.push(Check::new("energy_conserved", de < 1e-10, format!("relative drift {de:.3e}")));
    out.checks.push(Check::new(
        "momentum_conserved",
        dp < 1e-10 && dvp < 1e-10,
        format!("mean drift {dp:.3e}, variance drift {dvp:.3e}"),
    ));
    out.curves = vec![oracle_curve, analytic, deviation];
    Ok(out)
}

fn classical(w: &WaveformSpec, x0: f64, p0: f64, t_grid: &TimeGrid) -> RunResult<Output> {
    let wave: Box<dyn ClassicalWaveform> = match *w {
        WaveformSpec::Monochromatic { a0, omega, phase } => Box::new(Monochromatic { a0, omega, phase }),
        WaveformSpec::Pulse(p) => Box::new(SynthesizedPulse::new(&p.to_spec(), &AU)?),
    };
    let ts = t_grid.times();
    let c = curve("trajectory".into(), &["t", "x", "p_kin", "e_field", "a_field"], &ts, |t| {
        let pt = classical_trajectory(x0, p0, wave.as_ref(), t, &AU);
        Ok(vec![pt.x, pt.p_kin, wave.field(t), wave.vector_potential(t)])
    })?;
    let finite = c.rows.iter().flatten().all(|x| x.is_finite());
    Ok(Output {
        checks: vec![Check::new("finite", finite, "all samples finite")],
        curves: vec![c],
        ..Output::default()
    })
}

pub fn run(s: &Scenario) -> RunResult<Output> {
    match s {
        Scenario::SingleMode {
            omega,
            gamma,
            r_list,
            theta,
            alpha,
            t_grid,
            ..
        } => single_mode(*omega, *gamma, r_list, *theta, *alpha, t_grid),
        Scenario::ZeroMean {
            omega,
            gamma,
            bsv_r,
            bsv_theta_list,
            fock_n_list,
            thermal_t,
            electron,
            t_grid,
        } => zero_mean(*omega, *gamma, *bsv_r, bsv_theta_list, fock_n_list, *thermal_t, electron, t_grid),
        Scenario::Multimode {
            pulse,
            r_list,
            theta,
            band,
            t_grid,
            ..
        } => multimode(pulse, r_list, *theta, *band, t_grid),
        Scenario::OracleCompare {
            omega,
            gamma,
            state,
            electron,
            t_grid,
            n_fock,
            grid,
            tolerance,
        } => oracle_compare(*omega, *gamma, state, electron, t_grid, *n_fock, grid, *tolerance),
        Scenario::Classical { waveform, x0, p0, t_grid } => classical(waveform, *x0, *p0, t_grid),
    }
}
