//! Real symmetric tridiagonal eigenproblems.
//!
//! Eigenvalues come from implicit QL; eigenvectors from inverse iteration on
//! a window around the diagonal entry nearest each eigenvalue, widened until
//! the residual on the full matrix is at rounding level. Vectors of weakly
//! coupled chains are therefore stored with only their significant support.

use num_complex::Complex64 as C64;

/// Entries below this magnitude are dropped from normalized eigenvectors.
const DROP: f64 = 1e-17;
const INITIAL_HALF_WINDOW: usize = 16;

/// Symmetric tridiagonal matrix; `off[i]` couples rows i and i+1.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal length");
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        let n = self.dim();
        (0..n).fold(0.0f64, |m, i| {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            m.max(self.diag[i].abs() + left + right)
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }
}

/// Ascending eigenvalues by the implicit QL method with Wilkinson-type shifts.
pub fn eigenvalues(t: &SymTridiag) -> Vec<f64> {
    let n = t.dim();
    let mut d = t.diag.clone();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&t.off);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 100, "QL iteration did not converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.total_cmp(b));
    d
}

/// Normalized real vector stored as a contiguous slice starting at `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVec {
    pub start: usize,
    pub values: Vec<f64>,
}

impl SparseVec {
    pub fn dot_c(&self, x: &[C64]) -> C64 {
        self.values
            .iter()
            .zip(&x[self.start..self.start + self.values.len()])
            .fold(C64::new(0.0, 0.0), |acc, (v, xi)| acc + xi * *v)
    }

    pub fn axpy_c(&self, a: C64, y: &mut [C64]) {
        for (v, yi) in self.values.iter().zip(&mut y[self.start..self.start + self.values.len()]) {
            *yi += a * *v;
        }
    }

    pub fn get(&self, i: usize) -> f64 {
        if i >= self.start && i < self.start + self.values.len() {
            self.values[i - self.start]
        } else {
            0.0
        }
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        out[self.start..self.start + self.values.len()].copy_from_slice(&self.values);
        out
    }
}

/// Full eigendecomposition T = V Λ Vᵀ.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagEigen {
    pub dim: usize,
    pub values: Vec<f64>,
    pub vectors: Vec<SparseVec>,
}

impl TridiagEigen {
    pub fn new(t: &SymTridiag) -> Self {
        let values = eigenvalues(t);
        let scale = t.norm_bound().max(f64::MIN_POSITIVE);
        let vectors = values.iter().map(|&lambda| eigenvector(t, lambda, scale)).collect();
        Self {
            dim: t.dim(),
            values,
            vectors,
        }
    }

    /// Coefficients c_k = v_kᵀx.
    pub fn project(&self, x: &[C64]) -> Vec<C64> {
        self.vectors.iter().map(|v| v.dot_c(x)).collect()
    }

    /// Σ_k c_k e^{−iλ_k s} v_k.
    pub fn synthesize(&self, coeffs: &[C64], s: f64) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for ((v, &c), &lambda) in self.vectors.iter().zip(coeffs).zip(&self.values) {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            v.axpy_c(c * C64::from_polar(1.0, -lambda * s), &mut out);
        }
        out
    }

    /// exp(−iTs)·x.
    pub fn apply_exp(&self, x: &[C64], s: f64) -> Vec<C64> {
        self.synthesize(&self.project(x), s)
    }

    pub fn stored_entries(&self) -> usize {
        self.vectors.iter().map(|v| v.values.len()).sum()
    }
}

/// Solves (T_w − λ)y = b on rows lo..hi with partial pivoting.
fn shifted_solve(t: &SymTridiag, lo: usize, hi: usize, lambda: f64, b: &[f64], tiny: f64) -> Vec<f64> {
    let n = hi - lo;
    // row i holds (sub, main, sup, sup2) after elimination
    let mut main: Vec<f64> = (lo..hi).map(|i| t.diag[i] - lambda).collect();
    let mut sup: Vec<f64> = (lo..hi).map(|i| if i + 1 < hi { t.off[i] } else { 0.0 }).collect();
    let mut sup2 = vec![0.0; n];
    let mut rhs = b.to_vec();
    for i in 0..n.saturating_sub(1) {
        let sub = t.off[lo + i];
        if sub.abs() > main[i].abs() {
            // swap rows i and i+1
            let (m1, s1, r1) = (main[i + 1], if i + 2 < n { sup[i + 1] } else { 0.0 }, rhs[i + 1]);
            let (m0, s0, r0) = (main[i], sup[i], rhs[i]);
            main[i] = sub;
            sup[i] = m1;
            sup2[i] = s1;
            rhs[i] = r1;
            let f = m0 / sub;
            main[i + 1] = s0 - f * m1;
            sup[i + 1] = -f * s1;
            rhs[i + 1] = r0 - f * r1;
        } else {
            if main[i] == 0.0 {
                main[i] = tiny;
            }
            let f = sub / main[i];
            main[i + 1] -= f * sup[i];
            rhs[i + 1] -= f * rhs[i];
        }
    }
    let mut y = vec![0.0; n];
    for i in (0..n).rev() {
        if main[i] == 0.0 {
            main[i] = tiny;
        }
        let mut s = rhs[i];
        if i + 1 < n {
            s -= sup[i] * y[i + 1];
        }
        if i + 2 < n {
            s -= sup2[i] * y[i + 2];
        }
        y[i] = s / main[i];
    }
    y
}

fn normalize(y: &mut [f64]) {
    let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in y.iter_mut() {
        *v /= n;
    }
}

/// ‖(T − λ)x‖ with x supported on lo..hi.
fn residual(t: &SymTridiag, lo: usize, hi: usize, lambda: f64, x: &[f64]) -> f64 {
    let n = t.dim();
    let r0 = lo.saturating_sub(1);
    let r1 = (hi + 1).min(n);
    let get = |i: usize| if i >= lo && i < hi { x[i - lo] } else { 0.0 };
    (r0..r1)
        .map(|i| {
            let mut s = (t.diag[i] - lambda) * get(i);
            if i > 0 {
                s += t.off[i - 1] * get(i - 1);
            }
            if i + 1 < n {
                s += t.off[i] * get(i + 1);
            }
            s * s
        })
        .sum::<f64>()
        .sqrt()
}

fn eigenvector(t: &SymTridiag, lambda: f64, scale: f64) -> SparseVec {
    let n = t.dim();
    let centre = (0..n)
        .min_by(|&a, &b| (t.diag[a] - lambda).abs().total_cmp(&(t.diag[b] - lambda).abs()))
        .unwrap_or(0);
    let tiny = f64::EPSILON * scale;
    let tol = 32.0 * f64::EPSILON * scale;
    let mut half = INITIAL_HALF_WINDOW;
    loop {
        let lo = centre.saturating_sub(half);
        let hi = (centre + half + 1).min(n);
        let width = hi - lo;
        // deterministic start vector that is unlikely to be orthogonal to the target
        let mut y: Vec<f64> = (0..width).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_034).fract()).collect();
        normalize(&mut y);
        for _ in 0..3 {
            y = shifted_solve(t, lo, hi, lambda, &y, tiny);
            normalize(&mut y);
        }
        let full = lo == 0 && hi == n;
        if full || residual(t, lo, hi, lambda, &y) <= tol {
            let first = y.iter().position(|v| v.abs() >= DROP).unwrap_or(0);
            let last = y.iter().rposition(|v| v.abs() >= DROP).unwrap_or(0);
            let mut values = y[first..=last].to_vec();
            // fix the sign so the largest entry is positive
            let big = values.iter().fold(0.0f64, |m, v| if v.abs() > m.abs() { *v } else { m });
            if big < 0.0 {
                for v in &mut values {
                    *v = -*v;
                }
            }
            return SparseVec {
                start: lo + first,
                values,
            };
        }
        half *= 2;
    }
}
