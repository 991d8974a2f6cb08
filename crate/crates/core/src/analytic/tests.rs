use super::*;
use crate::state::{ElectronGaussian, ElectronMoments};
use proptest::prelude::*;
use std::f64::consts::PI;

const AU: PhysicalConstants = PhysicalConstants::atomic();

fn mode(omega: f64, gamma: f64) -> Mode {
    Mode::from_gamma(omega, gamma, &AU).unwrap()
}

fn electron() -> Electron {
    ElectronGaussian::new(10.0, 0.1, 0.0).unwrap().into()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn labels_at_zero_time() {
    let m = mode(0.05, 0.002);
    let s = FieldModeState::SqueezedCoherent {
        alpha: C64::new(2.0, -1.0),
        r: 0.7,
        theta: 0.3,
    };
    let l = evolve_labels(&s, &m, 0.4, 0.0).unwrap();
    assert_eq!(l.alpha_t, C64::new(2.0, -1.0));
    assert_eq!(l.delta_t, 0.0);
    assert!((l.z_t - C64::from_polar(0.7, 0.3)).norm() < 1e-15);
}

#[test]
fn labels_without_momentum_rotate_freely() {
    let m = mode(0.05, 0.002);
    let s = FieldModeState::coherent(3.0, 1.0);
    let t = 17.0;
    let l = evolve_labels(&s, &m, 0.0, t).unwrap();
    let expect = C64::new(3.0, 1.0) * C64::from_polar(1.0, -0.05 * t);
    assert!((l.alpha_t - expect).norm() < 1e-14);
    assert_eq!(l.delta_t, 0.0);
}

#[test]
fn labels_return_after_a_period() {
    let m = mode(0.05, 0.002);
    let s = FieldModeState::coherent(3.0, 1.0);
    let l = evolve_labels(&s, &m, 0.3, m.period()).unwrap();
    assert!((l.alpha_t - C64::new(3.0, 1.0)).norm() < 1e-12);
    assert!(l.delta_t.abs() < 1e-15);
}

#[test]
fn labels_reject_number_states() {
    let m = mode(0.05, 0.002);
    for s in [FieldModeState::Fock { n: 2 }, FieldModeState::Thermal { temperature: 300.0 }] {
        assert!(matches!(evolve_labels(&s, &m, 0.1, 1.0), Err(Error::UnsupportedState(_))));
    }
}

#[test]
fn gaussian_momentum_stats() {
    let (mean, var) = momentum_stats(&electron(), &AU);
    assert_eq!(mean, 0.1);
    assert!((var - 2.5e-3).abs() < 1e-18);
    let m = ElectronMoments {
        mean_x: 1.0,
        mean_p: -0.3,
        var_x: 4.0,
        var_p: 0.2,
        corr_xp: 0.5,
    };
    assert_eq!(momentum_stats(&m.into(), &AU), (-0.3, 0.2));
}

#[test]
fn abar_mean_vanishes_for_zero_mean_states() {
    let modes = vec![mode(0.05, 0.002), mode(0.07, 0.001), mode(0.09, 0.003)];
    let states = vec![
        FieldModeState::Vacuum,
        FieldModeState::Fock { n: 4 },
        FieldModeState::Thermal { temperature: 300.0 },
    ];
    let f = Field::new(modes, states, &AU).unwrap();
    for t in [0.0, 1.0, 50.0] {
        assert_eq!(abar_mean(&f, t), 0.0);
    }
    let c = Field::single(mode(0.05, 0.002), FieldModeState::coherent(3.0, 2.0), &AU).unwrap();
    assert_eq!(abar_mean(&c, 0.0), 0.0);
}

#[test]
fn fock_ratio_is_two_n_plus_one() {
    let m = mode(0.05, 0.002);
    let v0 = abar_variance_mode(&FieldModeState::Fock { n: 0 }, &m, 23.0, &AU);
    let vc = abar_variance_mode(&FieldModeState::coherent(4.0, -2.0), &m, 23.0, &AU);
    assert_eq!(v0, vc);
    for n in [1u32, 5, 100] {
        let v = abar_variance_mode(&FieldModeState::Fock { n }, &m, 23.0, &AU);
        assert!(rel(v / v0, 2.0 * n as f64 + 1.0) < 1e-15);
    }
}

#[test]
fn unsqueezed_equals_coherent() {
    let m = mode(0.05, 0.002);
    let alpha = C64::new(1.5, 0.5);
    let sq = FieldModeState::SqueezedCoherent { alpha, r: 0.0, theta: 1.2 };
    let co = FieldModeState::Coherent { alpha };
    for t in [0.0, 10.0, 31.0, 100.0] {
        assert_eq!(abar_variance_mode(&sq, &m, t, &AU), abar_variance_mode(&co, &m, t, &AU));
        assert_eq!(abar_variance_excess(&sq, &m, t, &AU), 0.0);
    }
}

#[test]
fn cold_thermal_is_vacuum() {
    let m = mode(0.05, 0.002);
    let cold = abar_variance_mode(&FieldModeState::Thermal { temperature: 1.0 }, &m, 40.0, &AU);
    let vac = abar_variance_mode(&FieldModeState::Vacuum, &m, 40.0, &AU);
    assert_eq!(cold, vac);
}

#[test]
fn thermal_with_unit_occupation_triples_the_vacuum_noise() {
    let omega = AU.thermal_energy(300.0) * 2f64.ln();
    let m = mode(omega, 0.002);
    let th = abar_variance_mode(&FieldModeState::Thermal { temperature: 300.0 }, &m, 1e4, &AU);
    let vac = abar_variance_mode(&FieldModeState::Vacuum, &m, 1e4, &AU);
    assert!(rel(th / vac, 3.0) < 1e-12);
}

#[test]
fn coherent_mean_position_example() {
    let f = Field::single(mode(0.05, 0.002), FieldModeState::coherent(10.0, 0.0), &AU).unwrap();
    let e: Electron = ElectronGaussian::new(10.0, 0.0, 0.0).unwrap().into();
    for t in [0.0, 5.0, 31.4, 90.0, 200.0] {
        let x = position_mean(&e, &f, t, &AU);
        assert!((x + 0.04 * (0.05 * t).sin()).abs() < 1e-15, "t = {t}");
    }
}

#[test]
fn vacuum_without_momentum_stays_put() {
    let f = Field::single(mode(0.05, 0.002), FieldModeState::Vacuum, &AU).unwrap();
    let e: Electron = ElectronGaussian::new(10.0, 0.0, 0.0).unwrap().into();
    for t in [0.0, 7.0, 300.0] {
        assert_eq!(position_mean(&e, &f, t, &AU), 0.0);
    }
}

#[test]
fn squeezing_leaves_the_mean_unchanged() {
    let m = mode(0.05, 0.002);
    let alpha = C64::new(5.0, 1.0);
    let co = Field::single(m, FieldModeState::Coherent { alpha }, &AU).unwrap();
    let sq = Field::single(m, FieldModeState::SqueezedCoherent { alpha, r: 2.0, theta: 0.5 }, &AU).unwrap();
    for t in [3.0, 60.0, 111.0] {
        assert_eq!(position_mean(&electron(), &co, t, &AU), position_mean(&electron(), &sq, t, &AU));
    }
}

#[test]
fn coherent_amplitude_does_not_enter_the_variance() {
    let m = mode(0.05, 0.002);
    let a = Field::single(m, FieldModeState::coherent(0.0, 0.0), &AU).unwrap();
    let b = Field::single(m, FieldModeState::coherent(20.0, 0.0), &AU).unwrap();
    let v = Field::single(m, FieldModeState::Vacuum, &AU).unwrap();
    for t in [1.0, 40.0, 377.0] {
        let ta = position_variance(&electron(), &a, t, &AU).total;
        assert_eq!(ta, position_variance(&electron(), &b, t, &AU).total);
        assert_eq!(ta, position_variance(&electron(), &v, t, &AU).total);
    }
}

#[test]
fn decoupled_field_gives_free_spreading() {
    let modes = vec![mode(0.05, 0.0), mode(0.08, 0.0)];
    let f = Field::new(modes, vec![FieldModeState::Fock { n: 3 }, FieldModeState::coherent(2.0, 0.0)], &AU).unwrap();
    let e = ElectronGaussian::new(10.0, 0.1, 2.0).unwrap();
    let sp = e.sigma_p(&AU);
    for t in [0.0, 50.0, 500.0] {
        let b = position_variance(&e.into(), &f, t, &AU);
        assert!(rel(b.total, 100.0 + sp * sp * t * t) < 1e-15);
        assert_eq!(b.field_term, 0.0);
        assert_eq!(b.cross_p_terms, 0.0);
        assert!((position_mean(&e.into(), &f, t, &AU) - (2.0 + 0.1 * t)).abs() < 1e-12);
    }
}

#[test]
fn empty_field_is_free() {
    let f = Field::empty(&AU);
    let b = position_variance(&electron(), &f, 100.0, &AU);
    assert!(rel(b.total, 100.0 + 2.5e-3 * 1e4) < 1e-15);
    assert_eq!(deviation_from_free(&electron(), &f, 100.0, &AU), 0.0);
}

#[test]
fn breakdown_adds_up() {
    let f = Field::single(mode(0.05, 0.3), FieldModeState::Fock { n: 2 }, &AU).unwrap();
    let m = ElectronMoments {
        mean_x: 0.0,
        mean_p: 0.1,
        var_x: 30.0,
        var_p: 0.05,
        corr_xp: 1.2,
    };
    for t in [3.0, 70.0] {
        let b = position_variance(&m.into(), &f, t, &AU);
        assert_eq!(b.total, b.free_spread + b.field_term + b.cross_p_terms);
        assert!(b.field_term >= 0.0 && b.total > 0.0);
    }
}

#[test]
fn chirped_moments_spread_through_the_correlation() {
    // Var(X + P τ) for a chirped packet; with γ = 0 the formula is pure kinematics.
    let m = ElectronMoments {
        mean_x: 0.0,
        mean_p: 0.0,
        var_x: 4.0,
        var_p: 0.5,
        corr_xp: -2.0,
    };
    let b = position_variance(&m.into(), &Field::empty(&AU), 2.0, &AU);
    assert!((b.total - (4.0 - 4.0 + 2.0)).abs() < 1e-15);
}

#[test]
fn squeezed_difference_sign_follows_the_window() {
    let m = mode(0.05, 0.002);
    let co = Field::single(m, FieldModeState::coherent(5.0, 0.0), &AU).unwrap();
    let (r, theta) = (2.0, 0.0);
    let sq = Field::single(m, FieldModeState::SqueezedCoherent { alpha: C64::new(5.0, 0.0), r, theta }, &AU).unwrap();
    let w = reduction_window(r, theta, m.omega).unwrap();
    for k in 1..600 {
        let t = k as f64 * 0.5;
        let d = variance_difference(&sq, &co, t, &AU).unwrap();
        let direct = position_variance(&electron(), &sq, t, &AU).total - position_variance(&electron(), &co, t, &AU).total;
        let boundary = w.boundaries_in(0.0, 1e9).iter().any(|b| (b - t).abs() < 1e-9);
        if !boundary {
            assert_eq!(d < 0.0, w.contains(t), "t = {t}");
        }
        assert!((d - direct).abs() < 1e-9 * position_variance(&electron(), &co, t, &AU).total);
    }
}

#[test]
fn variance_difference_needs_matching_modes() {
    let a = Field::single(mode(0.05, 0.002), FieldModeState::Vacuum, &AU).unwrap();
    let b = Field::single(mode(0.06, 0.002), FieldModeState::Vacuum, &AU).unwrap();
    assert!(variance_difference(&a, &b, 1.0, &AU).is_err());
}

#[test]
fn vacuum_field_statistics() {
    let modes = vec![mode(0.05, 0.002), mode(0.07, 0.001)];
    let f = Field::new(modes.clone(), vec![FieldModeState::Vacuum; 2], &AU).unwrap();
    let (mean, var) = field_waveform_stats(&f, 12.0, &AU).unwrap();
    assert_eq!(mean, 0.0);
    let expect: f64 = modes.iter().map(|m| m.amp_e * m.amp_e).sum();
    assert!(rel(var, expect) < 1e-15);
}

#[test]
fn coherent_mean_field_is_the_classical_wave() {
    let m = mode(0.05, 0.002);
    let f = Field::single(m, FieldModeState::coherent(3.0, 0.0), &AU).unwrap();
    for t in [0.0, 10.0, 20.0] {
        let (mean, _) = field_waveform_stats(&f, t, &AU).unwrap();
        let expect = 2.0 * m.amp_e * 3.0 * (m.omega * t).sin();
        assert!((mean - expect).abs() < 1e-15);
    }
}

#[test]
fn unsqueezed_field_variance_factor_is_one() {
    let m = mode(0.05, 0.002);
    let f = Field::single(m, FieldModeState::SqueezedCoherent { alpha: C64::new(1.0, 0.0), r: 0.0, theta: 2.0 }, &AU).unwrap();
    let (_, var) = field_waveform_stats(&f, 7.0, &AU).unwrap();
    assert!(rel(var, m.amp_e * m.amp_e) < 1e-15);
}

#[test]
fn classical_trajectory_tracks_the_quantum_mean() {
    let m = mode(0.05, 0.002);
    let f = Field::single(m, FieldModeState::coherent(5.0, 2.0), &AU).unwrap();
    let wave = ModeSumWaveform::from_field(&f);
    let p0 = 0.1;
    let e: Electron = ElectronGaussian::new(10.0, p0, 0.0).unwrap().into();
    for k in 0..200 {
        let t = k as f64 * 1.7;
        let cl = classical_trajectory(0.0, p0, &wave, t, &AU);
        let q = position_mean(&e, &f, t, &AU);
        let bound = (2.0 * p0 * sine_kernel(&f, t)).abs() + (p0 * t * (1.0 / f.effective_mass() - 1.0)).abs();
        assert!((cl.x - q).abs() <= bound * (1.0 + 1e-9) + 1e-13, "t = {t}");
    }
}

fn arb_state() -> impl Strategy<Value = FieldModeState> {
    prop_oneof![
        Just(FieldModeState::Vacuum),
        (-30.0..30.0f64, -30.0..30.0f64).prop_map(|(a, b)| FieldModeState::coherent(a, b)),
        (-30.0..30.0f64, -30.0..30.0f64, 0.0..3.0f64, -7.0..7.0f64).prop_map(|(a, b, r, theta)| {
            FieldModeState::SqueezedCoherent { alpha: C64::new(a, b), r, theta }
        }),
        (0u32..200).prop_map(|n| FieldModeState::Fock { n }),
        (1.0..1e4f64).prop_map(|temperature| FieldModeState::Thermal { temperature }),
    ]
}

proptest! {
    #[test]
    fn outputs_are_finite(
        state in arb_state(),
        omega in 1e-3..1.0f64,
        gamma in 0.0..0.5f64,
        t in 0.0..1e4f64,
        sigma_x in 0.5..100.0f64,
        p0 in -2.0..2.0f64,
    ) {
        let m = mode(omega, gamma);
        prop_assume!(2.0 * omega * gamma * gamma < 0.9);
        let f = Field::single(m, state, &AU).unwrap();
        let e: Electron = ElectronGaussian::new(sigma_x, p0, 0.0).unwrap().into();
        let b = position_variance(&e, &f, t, &AU);
        prop_assert!(b.total.is_finite() && b.total > 0.0);
        prop_assert!(b.field_term >= 0.0);
        prop_assert!(position_mean(&e, &f, t, &AU).is_finite());
        prop_assert!(abar_variance_excess(&state, &m, t, &AU).is_finite());
        let (mean, var) = field_waveform_stats(&f, t, &AU).unwrap();
        prop_assert!(mean.is_finite() && var.is_finite());
    }

    #[test]
    fn squeezed_difference_factorizes(
        a in -10.0..10.0f64, b in -10.0..10.0f64,
        r in 0.0..3.0f64, theta in -PI..PI,
        omega in 1e-2..1.0f64, gamma in 1e-4..0.1f64, t in 0.0..1e3f64,
    ) {
        let m = mode(omega, gamma);
        let alpha = C64::new(a, b);
        let sq = FieldModeState::SqueezedCoherent { alpha, r, theta };
        let excess = abar_variance_excess(&sq, &m, t, &AU);
        let closed = 4.0 * gamma * gamma * (0.5 * omega * t).sin().powi(2)
            * 2.0 * r.sinh() * r.cosh() * (r.tanh() + (omega * t - theta).cos());
        prop_assert!((excess - closed).abs() <= 1e-12 * closed.abs().max(1e-300) + 1e-13 * gamma * gamma * r.sinh() * r.cosh());
        let direct = abar_variance_mode(&sq, &m, t, &AU) - abar_variance_mode(&FieldModeState::Coherent { alpha }, &m, t, &AU);
        let scale = abar_variance_mode(&sq, &m, t, &AU).max(1e-300);
        prop_assert!((excess - direct).abs() <= 1e-12 * scale);
    }

    #[test]
    fn abar_mean_matches_gamma_form(
        alphas in proptest::collection::vec((-20.0..20.0f64, -20.0..20.0f64), 1..6),
        t in 0.0..500.0f64,
    ) {
        let modes: Vec<Mode> = (0..alphas.len()).map(|i| mode(0.03 + 0.01 * i as f64, 0.001 * (i + 1) as f64)).collect();
        let states = alphas.iter().map(|&(a, b)| FieldModeState::coherent(a, b)).collect();
        let f = Field::new(modes, states, &AU).unwrap();
        let lhs = -abar_mean(&f, t);
        let rhs = -2.0 * f.iter().fold(0.0, |acc, (m, s)| acc + (gamma_factor(m, t) * s.mean_amplitude()).im);
        let scale = f.iter().fold(0.0, |acc, (m, s)| acc + (gamma_factor(m, t) * s.mean_amplitude()).norm()) * 2.0;
        prop_assert!((lhs - rhs).abs() <= 1e-14 * scale.max(1e-300));
    }

    #[test]
    fn single_mode_field_terms_are_periodic(
        state in arb_state(), omega in 0.01..1.0f64, gamma in 0.0..0.05f64, t in 0.0..100.0f64,
    ) {
        let m = mode(omega, gamma);
        let f = Field::single(m, state, &AU).unwrap();
        let a = position_variance(&electron(), &f, t, &AU);
        let b = position_variance(&electron(), &f, t + m.period(), &AU);
        prop_assert!((a.field_term - b.field_term).abs() <= 1e-9 * a.field_term.abs().max(1e-12 * gamma * gamma));
        // the τS cross term carries a linear-in-t factor, the S-only pieces are periodic
        let s_a = sine_kernel(&f, t);
        let s_b = sine_kernel(&f, t + m.period());
        prop_assert!((s_a - s_b).abs() <= 1e-10 * gamma * gamma);
    }

    #[test]
    fn squeeze_label_keeps_its_modulus(r in 0.0..4.0f64, theta in -PI..PI, t in 0.0..1e4f64, p in -1.0..1.0f64) {
        let m = mode(0.05, 0.002);
        let s = FieldModeState::SqueezedCoherent { alpha: C64::new(1.0, 0.0), r, theta };
        let l = evolve_labels(&s, &m, p, t).unwrap();
        prop_assert!((l.z_t.norm() - r).abs() < 1e-14);
    }

    #[test]
    fn squeezed_difference_sign(r in 0.05..3.0f64, theta in -PI..PI, t in 0.1..500.0f64) {
        let m = mode(0.05, 0.002);
        let alpha = C64::new(2.0, 0.0);
        let co = Field::single(m, FieldModeState::Coherent { alpha }, &AU).unwrap();
        let sq = Field::single(m, FieldModeState::SqueezedCoherent { alpha, r, theta }, &AU).unwrap();
        let d = variance_difference(&sq, &co, t, &AU).unwrap();
        let s = r.tanh() + (m.omega * t - theta).cos();
        prop_assume!(s.abs() > 1e-9 && (0.5 * m.omega * t).sin().abs() > 1e-6);
        prop_assert_eq!(d < 0.0, s < 0.0);
    }
}
