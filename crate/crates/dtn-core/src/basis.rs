//! Edge-weighted Chebyshev basis on a union of intervals and its fixed forms.
//!
//! On the interval with centre c and half-length h the functions are
//! `g_n(x) = √(1−t²)·U_n(t)`, `t = (x−c)/h`, with unitary Fourier transform
//! `ĝ_n(η) = √(π/2)·(−i)^n·(n+1)·e^{−icη}·J_{n+1}(hη)/η`.

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::special::bessel_j_seq;
use crate::window::Window1D;
use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};
use libm::{cos, fabs, log, sin, sqrt};
use nalgebra::DMatrix;

/// Robin coefficient as a polynomial `b(x) = Σ c_k x^k` in the physical coordinate.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Robin {
    pub coeffs: Vec<f64>,
}

impl Robin {
    pub fn neumann() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(b: f64) -> Self {
        Self { coeffs: alloc::vec![b] }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn at_origin(&self) -> f64 {
        self.coeffs.first().copied().unwrap_or(0.0)
    }

    pub fn slope_at_origin(&self) -> f64 {
        self.coeffs.get(1).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }
}

#[derive(Debug, Clone)]
pub struct IntervalBasis {
    window: Window1D,
    per: usize,
    comps: Vec<(f64, f64)>,
}

impl IntervalBasis {
    /// `per` functions on every component interval.
    pub fn new(window: Window1D, per: usize) -> Result<Self> {
        if per == 0 {
            return Err(Error::InvalidInput("basis degree must be at least 1".into()));
        }
        let comps = window.intervals().iter().map(|&(a, b)| (0.5 * (a + b), 0.5 * (b - a))).collect();
        Ok(Self { window, per, comps })
    }

    pub fn window(&self) -> &Window1D {
        &self.window
    }

    pub fn per_component(&self) -> usize {
        self.per
    }

    pub fn components(&self) -> &[(f64, f64)] {
        &self.comps
    }

    pub fn len(&self) -> usize {
        self.per * self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Component and degree of basis function `j`.
    pub fn split_index(&self, j: usize) -> (usize, usize) {
        (j / self.per, j % self.per)
    }

    pub fn eval(&self, j: usize, x: f64) -> f64 {
        let (i, n) = self.split_index(j);
        let (c, h) = self.comps[i];
        let t = (x - c) / h;
        if fabs(t) >= 1.0 {
            return 0.0;
        }
        sqrt(1.0 - t * t) * chebyshev_u(n, t)
    }

    /// Evaluates `Σ_j coef_j g_j(x)`.
    pub fn eval_combination(&self, coef: &[f64], x: f64) -> f64 {
        let mut s = 0.0;
        for (i, &(c, h)) in self.comps.iter().enumerate() {
            let t = (x - c) / h;
            if fabs(t) >= 1.0 {
                continue;
            }
            let w = sqrt(1.0 - t * t);
            let mut u0 = 1.0;
            let mut u1 = 2.0 * t;
            for n in 0..self.per {
                s += coef[i * self.per + n] * w * u0;
                let u2 = 2.0 * t * u1 - u0;
                u0 = u1;
                u1 = u2;
            }
        }
        s
    }

    /// Real and imaginary parts of `ĝ_j(η)` for all j, η ≥ 0.
    pub fn transforms(&self, eta: f64, re: &mut [f64], im: &mut [f64], buf: &mut Vec<f64>) {
        let n = self.per;
        buf.resize(n + 1, 0.0);
        let k = sqrt(PI / 2.0);
        for (i, &(c, h)) in self.comps.iter().enumerate() {
            let off = i * n;
            if eta == 0.0 {
                for m in 0..n {
                    re[off + m] = if m == 0 { k * h / 2.0 } else { 0.0 };
                    im[off + m] = 0.0;
                }
                continue;
            }
            bessel_j_seq(h * eta, buf);
            let (cs, sn) = (cos(c * eta), -sin(c * eta));
            for m in 0..n {
                let a = k * (m as f64 + 1.0) * buf[m + 1] / eta;
                // (−i)^m · (cs + i·sn)
                let (pr, pi) = match m % 4 {
                    0 => (cs, sn),
                    1 => (sn, -cs),
                    2 => (-cs, -sn),
                    _ => (-sn, cs),
                };
                re[off + m] = a * pr;
                im[off + m] = a * pi;
            }
        }
    }

    /// Widest oscillation frequency of `ĝ_a·conj(ĝ_b)` over all pairs.
    pub fn max_frequency(&self) -> f64 {
        let mut f: f64 = 0.0;
        for &(ca, ha) in &self.comps {
            for &(cb, hb) in &self.comps {
                f = f.max(ha + hb + fabs(ca - cb));
            }
        }
        f
    }

    /// `∫ g_j`.
    pub fn load_vector(&self) -> Vec<f64> {
        let mut f = alloc::vec![0.0; self.len()];
        for (i, &(_, h)) in self.comps.iter().enumerate() {
            f[i * self.per] = 0.5 * PI * h;
        }
        f
    }

    /// `∫ w(x) g_a g_b dx` on each component with a polynomial weight of degree ≤ `deg`.
    fn weighted_gram<F: Fn(f64) -> f64>(&self, deg: usize, w: F) -> DMatrix<f64> {
        let n = self.per;
        let gl = GaussLegendre::new(n + deg / 2 + 2);
        let mut out = DMatrix::zeros(self.len(), self.len());
        let mut u = alloc::vec![0.0; n];
        for (i, &(c, h)) in self.comps.iter().enumerate() {
            for (t, wt) in gl.nodes.iter().zip(&gl.weights) {
                fill_u(*t, &mut u);
                let s = wt * h * (1.0 - t * t) * w(c + h * t);
                for a in 0..n {
                    for b in 0..n {
                        out[(i * n + a, i * n + b)] += s * u[a] * u[b];
                    }
                }
            }
        }
        out
    }

    pub fn gram(&self) -> DMatrix<f64> {
        self.weighted_gram(0, |_| 1.0)
    }

    /// `∫ x g_a g_b dx`.
    pub fn mx(&self) -> DMatrix<f64> {
        self.weighted_gram(1, |x| x)
    }

    /// `∫ b(ℓx) g_a g_b dx`.
    pub fn robin(&self, b: &Robin, ell: f64) -> DMatrix<f64> {
        if b.is_zero() {
            return DMatrix::zeros(self.len(), self.len());
        }
        let deg = b.coeffs.len().saturating_sub(1);
        self.weighted_gram(deg, |x| b.eval(ell * x))
    }

    /// `(∫g_a)(∫g_b)/|Σ|`.
    pub fn pct(&self) -> DMatrix<f64> {
        let f = self.load_vector();
        let m = self.window.measure();
        DMatrix::from_fn(self.len(), self.len(), |a, b| f[a] * f[b] / m)
    }

    fn cross_rule(&self) -> (Vec<f64>, Vec<f64>) {
        // Gauss–Chebyshev of the second kind: ∫√(1−t²)F ≈ Σ w_k F(t_k)
        let m = 2 * self.per + 96;
        let mut t = Vec::with_capacity(m);
        let mut w = Vec::with_capacity(m);
        for k in 1..=m {
            let th = k as f64 * PI / (m as f64 + 1.0);
            t.push(cos(th));
            let s = sin(th);
            w.push(PI / (m as f64 + 1.0) * s * s);
        }
        (t, w)
    }

    /// Off-diagonal component blocks of `∫∫ K(x, y) g_a(x) g_b(y)` for a smooth kernel.
    fn cross_blocks<K: Fn(f64, f64) -> f64>(&self, kernel: K, out: &mut DMatrix<f64>) {
        let n = self.per;
        let (t, w) = self.cross_rule();
        let m = t.len();
        let mut ut = DMatrix::zeros(n, m);
        let mut u = alloc::vec![0.0; n];
        for k in 0..m {
            fill_u(t[k], &mut u);
            for a in 0..n {
                ut[(a, k)] = w[k] * u[a];
            }
        }
        for (i, &(ci, hi)) in self.comps.iter().enumerate() {
            for (j, &(cj, hj)) in self.comps.iter().enumerate() {
                if i == j {
                    continue;
                }
                let kmat = DMatrix::from_fn(m, m, |p, q| kernel(ci + hi * t[p], cj + hj * t[q]));
                let blk = &ut * kmat * ut.transpose() * (hi * hj);
                out.view_mut((i * n, j * n), (n, n)).copy_from(&blk);
            }
        }
    }

    /// `∫|η| ĝ_a conj(ĝ_b) dη`.
    pub fn q0(&self) -> DMatrix<f64> {
        let n = self.per;
        let mut out = DMatrix::zeros(self.len(), self.len());
        for i in 0..self.comps.len() {
            for a in 0..n {
                out[(i * n + a, i * n + a)] = 0.5 * PI * (a as f64 + 1.0);
            }
        }
        self.cross_blocks(|x, y| -1.0 / (PI * (x - y) * (x - y)), &mut out);
        out
    }

    /// `∫∫ ln|x−y| g_a(x) g_b(y)`.
    pub fn kln(&self) -> DMatrix<f64> {
        let n = self.per;
        let mut out = DMatrix::zeros(self.len(), self.len());
        let q = (PI / 4.0) * (PI / 4.0);
        for (i, &(_, h)) in self.comps.iter().enumerate() {
            let a0 = 0.5 * PI;
            for a in 0..n {
                for b in 0..n {
                    let mut v = 0.0;
                    if a == 0 && b == 0 {
                        v += (log(h) - LN_2) * a0 * a0;
                    }
                    // ln|t−s| = −ln2 − Σ (2/k) T_k(t) T_k(s); ∫√(1−t²)U_m T_k = (π/4)(δ_{k,m} − δ_{k,m+2})
                    let coef = |m: usize, k: usize| -> f64 {
                        (if k == m && m >= 1 { 1.0 } else { 0.0 }) - if k == m + 2 { 1.0 } else { 0.0 }
                    };
                    for k in [a, a + 2] {
                        if k == 0 {
                            continue;
                        }
                        let ca = coef(a, k);
                        let cb = coef(b, k);
                        if ca != 0.0 && cb != 0.0 {
                            v -= 2.0 / k as f64 * q * ca * cb;
                        }
                    }
                    out[(i * n + a, i * n + b)] = h * h * v;
                }
            }
        }
        self.cross_blocks(|x, y| log(fabs(x - y)), &mut out);
        out
    }
}

/// `U_0..U_{n−1}` at t.
fn fill_u(t: f64, u: &mut [f64]) {
    let mut u0 = 1.0;
    let mut u1 = 2.0 * t;
    for v in u.iter_mut() {
        *v = u0;
        let u2 = 2.0 * t * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
}

fn chebyshev_u(n: usize, t: f64) -> f64 {
    let mut u0 = 1.0;
    let mut u1 = 2.0 * t;
    for _ in 0..n {
        let u2 = 2.0 * t * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    u0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> IntervalBasis {
        IntervalBasis::new(Window1D::interval(-1.0, 1.0).unwrap(), 8).unwrap()
    }

    #[test]
    fn single_function() {
        let b = IntervalBasis::new(Window1D::interval(-1.0, 1.0).unwrap(), 1).unwrap();
        for x in [-0.9, 0.0, 0.3] {
            assert!((b.eval(0, x) - (1.0f64 - x * x).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn transform_matches_quadrature() {
        let b = IntervalBasis::new(Window1D::new(alloc::vec![(-0.3, 0.9), (1.4, 2.0)]).unwrap(), 5).unwrap();
        let mut re = alloc::vec![0.0; b.len()];
        let mut im = alloc::vec![0.0; b.len()];
        let mut buf = Vec::new();
        let gl = GaussLegendre::new(200);
        for eta in [0.0, 0.37, 2.5, 11.0] {
            b.transforms(eta, &mut re, &mut im, &mut buf);
            for j in 0..b.len() {
                let (i, _) = b.split_index(j);
                let (c, h) = b.components()[i];
                // substitute t = cos θ to remove the edge singularity
                let f = |th: f64| {
                    let x = c + h * th.cos();
                    b.eval(j, x) * th.sin() * h
                };
                let qr = gl.integrate(0.0, PI, |th| f(th) * (eta * (c + h * th.cos())).cos());
                let qi = gl.integrate(0.0, PI, |th| -f(th) * (eta * (c + h * th.cos())).sin());
                let s = 1.0 / (2.0 * PI).sqrt();
                assert!((re[j] - s * qr).abs() < 1e-12, "eta={eta} j={j}");
                assert!((im[j] - s * qi).abs() < 1e-12, "eta={eta} j={j}");
            }
        }
    }

    #[test]
    fn closed_form_functionals() {
        let b = unit();
        let f = b.load_vector();
        assert!((f[0] - PI / 2.0).abs() < 1e-15);
        let g = b.gram();
        assert!((g[(0, 0)] - 4.0 / 3.0).abs() < 1e-14);
        let k = b.kln();
        let target = PI * PI / 16.0 * (-1.0 - 16f64.ln());
        assert!((k[(0, 0)] - target).abs() < 1e-14);
        assert!(b.mx()[(0, 0)].abs() < 1e-15);
    }
}
