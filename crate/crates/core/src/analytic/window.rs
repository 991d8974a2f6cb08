use std::f64::consts::PI;

use crate::error::{require_non_negative, require_positive, Result};

/// arccos(tanh r), evaluated as atan(1/sinh r) which stays accurate when tanh r → 1.
pub fn squeeze_half_width(r: f64) -> f64 {
    1f64.atan2(r.sinh())
}

/// Per-cycle interval in which a squeezed field lowers Δ²X below the coherent value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionWindow {
    pub start: f64,
    pub end: f64,
    pub period: f64,
    /// Set for r = 0: the interval is where tanh r + cos(ωt − θ) < 0, but the
    /// squeezed–coherent difference vanishes identically there.
    pub outside_claim: bool,
}

impl ReductionWindow {
    pub fn center(&self) -> f64 {
        0.5 * (self.start + self.end)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.end - self.start)
    }

    /// True if t lies in any periodic translate of the window.
    pub fn contains(&self, t: f64) -> bool {
        let k = ((t - self.start) / self.period).floor();
        let s = self.start + k * self.period;
        t > s && t < s + (self.end - self.start)
    }

    /// All translates overlapping [t0, t1], clipped to it.
    pub fn intervals_in(&self, t0: f64, t1: f64) -> Vec<(f64, f64)> {
        let mut k = ((t0 - self.end) / self.period).floor();
        let mut out = Vec::new();
        loop {
            let s = self.start + k * self.period;
            let e = self.end + k * self.period;
            if s >= t1 {
                break;
            }
            if e > t0 {
                out.push((s.max(t0), e.min(t1)));
            }
            k += 1.0;
        }
        out
    }

    /// Window boundaries (unclipped) that fall strictly inside (t0, t1).
    pub fn boundaries_in(&self, t0: f64, t1: f64) -> Vec<f64> {
        let mut b: Vec<f64> = Vec::new();
        let mut k = ((t0 - self.end) / self.period).floor();
        loop {
            let s = self.start + k * self.period;
            if s >= t1 {
                break;
            }
            for edge in [s, self.end + k * self.period] {
                if edge > t0 && edge < t1 {
                    b.push(edge);
                }
            }
            k += 1.0;
        }
        b
    }
}

/// ((θ+π−arccos(tanh r))/ω, (θ+π+arccos(tanh r))/ω) and its translates by 2π/ω.
pub fn reduction_window(r: f64, theta: f64, omega: f64) -> Result<ReductionWindow> {
    require_non_negative("r", r)?;
    require_positive("omega", omega)?;
    let half = squeeze_half_width(r);
    let center = theta + PI;
    Ok(ReductionWindow {
        start: (center - half) / omega,
        end: (center + half) / omega,
        period: 2.0 * PI / omega,
        outside_claim: r == 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralWidthCheck {
    /// |ωt − θ − π| + (Δω/2)t < arccos(tanh r).
    pub satisfied: bool,
    /// Largest Δω/ω admitted at the first window centre, 2 arccos(tanh r)/(θ + π).
    pub simplified_bound: f64,
}

/// Sufficient (not necessary) condition for every mode in
/// [ω − Δω/2, ω + Δω/2] to sit inside its own reduction window at time t.
///
/// θ is taken modulo 2π into (−π, π] so that θ + π is the first positive
/// window centre.
pub fn spectral_width_bound(r: f64, theta: f64, omega_center: f64, delta_omega: f64, t: f64) -> Result<SpectralWidthCheck> {
    require_non_negative("r", r)?;
    require_non_negative("delta_omega", delta_omega)?;
    require_positive("omega_center", omega_center)?;
    let mut th = theta.rem_euclid(2.0 * PI);
    if th > PI {
        th -= 2.0 * PI;
    }
    let half = squeeze_half_width(r);
    let satisfied = (omega_center * t - th - PI).abs() + 0.5 * delta_omega * t < half;
    Ok(SpectralWidthCheck {
        satisfied,
        simplified_bound: 2.0 * half / (th + PI),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_width_matches_direct_formula() {
        for r in [0.0, 0.1, 0.5, 1.0, 2.0, 5.0] {
            let direct = (r as f64).tanh().acos();
            assert!((squeeze_half_width(r) - direct).abs() < 1e-12, "r = {r}");
        }
        // arccos(tanh 2) = 0.269036...
        assert!((squeeze_half_width(2.0) - 0.269_036_0).abs() < 1e-7);
    }

    #[test]
    fn large_r_stays_accurate() {
        // tanh(20) rounds to 1 in double precision; the atan form keeps the width
        let w = squeeze_half_width(20.0);
        assert!(w > 0.0);
        assert!((w / (2.0 * (-20f64).exp()) - 1.0).abs() < 1e-12);
        assert!(squeeze_half_width(40.0) < 1e-16);
    }

    #[test]
    fn window_example() {
        let w = reduction_window(2.0, 0.0, 1.0).unwrap();
        assert!((w.center() - PI).abs() < 1e-15);
        assert!((w.half_width() - 0.269_036_0).abs() < 1e-7);
        assert!(w.contains(PI));
        assert!(w.contains(PI + 2.0 * PI * 3.0));
        assert!(!w.contains(0.0));
        assert!(!w.outside_claim);
    }

    #[test]
    fn window_does_not_depend_on_coupling_or_amplitude() {
        // the signature takes only (r, θ, ω); scaling ω rescales time only
        let a = reduction_window(1.0, 0.3, 1.0).unwrap();
        let b = reduction_window(1.0, 0.3, 2.0).unwrap();
        assert!((a.start / 2.0 - b.start).abs() < 1e-15);
        assert!((a.end / 2.0 - b.end).abs() < 1e-15);
    }

    #[test]
    fn zero_squeezing_is_flagged() {
        let w = reduction_window(0.0, 0.0, 1.0).unwrap();
        assert!(w.outside_claim);
        assert!((w.start - PI / 2.0).abs() < 1e-15);
        assert!((w.end - 1.5 * PI).abs() < 1e-15);
        assert!(reduction_window(-1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn intervals_and_boundaries() {
        let w = reduction_window(1.0, 0.0, 1.0).unwrap();
        let iv = w.intervals_in(0.0, 6.0 * PI);
        assert_eq!(iv.len(), 3);
        assert_eq!(w.boundaries_in(0.0, 6.0 * PI).len(), 6);
        for (s, e) in iv {
            assert!(w.contains(0.5 * (s + e)));
        }
    }

    #[test]
    fn spectral_bound_examples() {
        // single-mode limit at window centre
        for r in [0.1, 1.0, 3.0, 10.0] {
            let c = spectral_width_bound(r, 0.0, 1.0, 0.0, PI).unwrap();
            assert!(c.satisfied);
        }
        let c = spectral_width_bound(2.0, 0.0, 1.0, 0.0, PI).unwrap();
        assert!((c.simplified_bound - 0.171_27).abs() < 1e-4);
        // a bandwidth just under the bound passes at the centre, just over fails
        let b = c.simplified_bound;
        assert!(spectral_width_bound(2.0, 0.0, 1.0, 0.999 * b, PI).unwrap().satisfied);
        assert!(!spectral_width_bound(2.0, 0.0, 1.0, 1.001 * b, PI).unwrap().satisfied);
    }
}
