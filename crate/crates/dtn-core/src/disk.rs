//! Radial Jacobi basis on a disk, separated into angular harmonics, and the layer forms.
//!
//! Harmonic m, degree n: `g(ρ) = (1−t²)^{1/2} t^m P_n^{(1/2,m)}(2t²−1)`, `t = ρ/R`, times
//! cos(mθ). Its Hankel transform of order m is
//! `H(k) = (−1)^n R² c_n √(2/π) j_L(kR)/(kR)`, `L = m+2n+1`, `c_n = √2 Γ(n+3/2)/n!`.

use crate::assembly::{symmetrize, Samples, FAR_TERMS};
use crate::basis::Robin;
use crate::error::{Error, Result};
use crate::quad::{CompositeRule, GaussLegendre};
use crate::solver::{solve_in_u, EigenResult, Pencil, SolverOptions};
use crate::special::{catalan_quarter, rgamma, spherical_j_seq};
use crate::symbol::{regular_remainder, symbol_remainder, threshold, SymbolParams};
use crate::window::Window2D;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{exp, fabs, lgamma, log, log1p, pow, sqrt};
use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct DiskBasis {
    radius: f64,
    per: usize,
    harmonics: usize,
}

fn c_n(n: usize) -> f64 {
    core::f64::consts::SQRT_2 * exp(lgamma(n as f64 + 1.5) - lgamma(n as f64 + 1.0))
}

/// Angular measure ∫cos²(mθ)dθ.
pub fn angular_weight(m: usize) -> f64 {
    if m == 0 {
        2.0 * PI
    } else {
        PI
    }
}

/// `P_0..P_{n−1}` of Jacobi type (a, b) at x.
fn jacobi_seq(a: f64, b: f64, x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for n in 2..out.len() {
        let nf = n as f64;
        let s = 2.0 * nf + a + b;
        let c1 = 2.0 * nf * (nf + a + b) * (s - 2.0);
        let c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c3 = 2.0 * (nf + a - 1.0) * (nf + b - 1.0) * s;
        out[n] = (c2 * out[n - 1] - c3 * out[n - 2]) / c1;
    }
}

impl DiskBasis {
    pub fn new(window: Window2D, per: usize, harmonics: usize) -> Result<Self> {
        if per == 0 || harmonics == 0 {
            return Err(Error::InvalidInput("basis sizes must be at least 1".into()));
        }
        match window {
            Window2D::Disk { radius } => {
                window.validate()?;
                Ok(Self { radius, per, harmonics })
            }
            Window2D::Annulus { .. } => Err(Error::Geometry("the layer basis supports disk windows only".into())),
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn per_harmonic(&self) -> usize {
        self.per
    }

    pub fn harmonics(&self) -> usize {
        self.harmonics
    }

    pub fn eval(&self, m: usize, n: usize, rho: f64) -> f64 {
        let t = rho / self.radius;
        if t >= 1.0 {
            return 0.0;
        }
        let mut p = alloc::vec![0.0; n + 1];
        jacobi_seq(0.5, m as f64, 2.0 * t * t - 1.0, &mut p);
        sqrt(1.0 - t * t) * pow(t, m as f64) * p[n]
    }

    /// `H_{m,n}(k)` for n = 0..per.
    pub fn hankel(&self, m: usize, k: f64, out: &mut [f64], buf: &mut Vec<f64>) {
        let r = self.radius;
        let lmax = m + 2 * self.per;
        buf.resize(lmax + 1, 0.0);
        let x = k * r;
        let pref = r * r * sqrt(2.0 / PI);
        if x < 1e-6 {
            // j_L(x)/x ≈ x^{L−1}/(2L+1)!!
            for (n, v) in out.iter_mut().enumerate() {
                let l = m + 2 * n + 1;
                let mut dfact = 1.0;
                for j in (1..=2 * l + 1).step_by(2) {
                    dfact *= j as f64;
                }
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                *v = sign * pref * c_n(n) * pow(x, (l - 1) as f64) / dfact;
            }
            return;
        }
        spherical_j_seq(x, buf);
        for (n, v) in out.iter_mut().enumerate() {
            let l = m + 2 * n + 1;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            *v = sign * pref * c_n(n) * buf[l] / x;
        }
    }

    /// `∫_Σ g` for every function of harmonic m.
    pub fn load_vector(&self, m: usize) -> Vec<f64> {
        let mut f = alloc::vec![0.0; self.per];
        if m == 0 {
            f[0] = 2.0 * PI * self.radius * self.radius / 3.0;
        }
        f
    }

    fn radial_gram<W: Fn(f64) -> f64>(&self, m: usize, deg: usize, w: W) -> DMatrix<f64> {
        let n = self.per;
        let gl = GaussLegendre::new(n + m + deg + 2);
        let mut out = DMatrix::zeros(n, n);
        let mut p = alloc::vec![0.0; n];
        let r = self.radius;
        for (x, wt) in gl.nodes.iter().zip(&gl.weights) {
            jacobi_seq(0.5, m as f64, *x, &mut p);
            let t = sqrt(0.5 * (1.0 + x));
            let s = wt * 0.25 * r * r * 0.5 * (1.0 - x) * pow(0.5 * (1.0 + x), m as f64) * w(t * r);
            for a in 0..n {
                for b in 0..n {
                    out[(a, b)] += s * p[a] * p[b];
                }
            }
        }
        out * angular_weight(m)
    }

    pub fn gram(&self, m: usize) -> DMatrix<f64> {
        self.radial_gram(m, 0, |_| 1.0)
    }

    /// `∫_Σ b(ℓ|x|) g_a g_b`.
    pub fn robin(&self, m: usize, b: &Robin, ell: f64) -> DMatrix<f64> {
        if b.is_zero() {
            return DMatrix::zeros(self.per, self.per);
        }
        // polynomial of degree d in ρ needs about d/2 extra nodes in x = 2t² − 1
        let deg = b.coeffs.len();
        self.radial_gram(m, deg, |rho| b.eval(ell * rho))
    }

    pub fn q0(&self, m: usize) -> DMatrix<f64> {
        let r = self.radius;
        DMatrix::from_fn(self.per, self.per, |a, b| {
            if a == b {
                let l = (m + 2 * a + 1) as f64;
                angular_weight(m) * r * c_n(a) * c_n(a) / (2.0 * l + 1.0)
            } else {
                0.0
            }
        })
    }

    /// `∫∫ g_a(x) g_b(y)/|x−y|` within harmonic m.
    pub fn k_inv_r(&self, m: usize) -> DMatrix<f64> {
        let r = self.radius;
        DMatrix::from_fn(self.per, self.per, |a, b| {
            let mu = (m + 2 * a + 1) as f64 + 0.5;
            let nu = (m + 2 * b + 1) as f64 + 0.5;
            let lam = 3.0;
            let ws = 2.0 * rgamma(0.5 * (-mu + nu + lam + 1.0)) * rgamma(0.5 * (mu + nu + lam + 1.0))
                * rgamma(0.5 * (mu - nu + lam + 1.0))
                * libm::tgamma(0.5 * (mu + nu - lam + 1.0))
                / 8.0;
            let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
            4.0 * angular_weight(m) * r * r * r * c_n(a) * c_n(b) * sign * 0.5 * PI * ws
        })
    }

    fn width(&self) -> f64 {
        (PI / self.radius).min(1.0)
    }
}

/// Precomputed Hankel samples for the layer forms, one block per harmonic.
#[derive(Debug, Clone)]
pub struct LayerAssembly {
    basis: DiskBasis,
    near: Vec<Samples>,
    split: usize,
    k_f: f64,
    moments: Vec<Vec<DMatrix<f64>>>,
}

impl LayerAssembly {
    pub fn new(basis: DiskBasis) -> Result<Self> {
        let gl = GaussLegendre::new(16);
        let k_f = 40.0;
        let mut rule = CompositeRule::default();
        CompositeRule::dyadic_to_one(&gl, 1e-17, &mut rule);
        let split = rule.len();
        CompositeRule::uniform(&gl, 1.0, k_f, basis.width(), &mut rule);
        let mut near = Vec::new();
        let mut moments = Vec::new();
        let mut buf = Vec::new();
        for m in 0..basis.harmonics {
            near.push(Samples::build(rule.clone(), basis.per, |k, re, im| {
                basis.hankel(m, k, re, &mut buf);
                im.fill(0.0);
            }));
            moments.push(layer_moments(&basis, m, k_f));
        }
        Ok(Self { basis, near, split, k_f, moments })
    }

    pub fn basis(&self) -> &DiskBasis {
        &self.basis
    }

    /// `A_m ∫_0^∞ r(k/ℓ) H_a H_b k dk` at ω = π²/α² − e^{ln_d}.
    pub fn correction(&self, m: usize, alpha: f64, ln_d: f64, ell: f64) -> Result<DMatrix<f64>> {
        let d = exp(ln_d);
        let p = SymbolParams::below_threshold(alpha, d)?;
        let am = angular_weight(m);
        let s = &self.near[m];
        let nn = s.nodes.len();
        let half = 0.5 * am;
        let mut vals = alloc::vec![0.0; nn];
        for (k, v) in vals.iter_mut().enumerate() {
            let e = s.nodes[k];
            *v = s.weights[k] * e * regular_remainder(&p, e / ell)?;
        }
        let mut out = s.weighted(0..nn, |k| vals[k]) * half;

        if m == 0 {
            let k2 = threshold(alpha);
            let pref = -2.0 * k2 * ell * ell / alpha;
            let d2 = ell * ell * d;
            let ln_delta = log(ell) + 0.5 * ln_d;
            let lower = s.weighted(0..self.split, |k| {
                let e = s.nodes[k];
                s.weights[k] * e / (e * e + d2)
            });
            let lower_mass: f64 = (0..self.split).map(|k| s.weights[k] * s.nodes[k] / (s.nodes[k] * s.nodes[k] + d2)).sum();
            let upper = s.weighted(self.split..nn, |k| {
                let e = s.nodes[k];
                s.weights[k] * e / (e * e + d2)
            });
            let h0 = self.basis.radius * self.basis.radius / 3.0;
            let mut s0 = DMatrix::zeros(self.basis.per, self.basis.per);
            s0[(0, 0)] = 2.0 * h0 * h0;
            let exact = 0.5 * log1p(d2) - ln_delta;
            let peak = (lower - &s0 * lower_mass + upper) * half + s0 * (half * exact);
            out += peak * pref;
        }

        let om = p.omega;
        let k_e = (20.0 * ell / alpha).max(10.0 * ell * sqrt(fabs(om))).max(self.k_f);
        let fresh;
        let moments = if k_e > self.k_f {
            let gl = GaussLegendre::new(16);
            let mut rule = CompositeRule::default();
            CompositeRule::uniform(&gl, self.k_f, k_e, self.basis.width(), &mut rule);
            let mut buf = Vec::new();
            let ext = Samples::build(rule, self.basis.per, |k, re, im| {
                self.basis.hankel(m, k, re, &mut buf);
                im.fill(0.0);
            });
            let mut w = alloc::vec![0.0; ext.nodes.len()];
            for (k, v) in w.iter_mut().enumerate() {
                let e = ext.nodes[k];
                *v = ext.weights[k] * e * symbol_remainder(&p, e / ell)?;
            }
            out += ext.weighted(0..ext.nodes.len(), |k| w[k]) * half;
            fresh = layer_moments_from(&self.basis, m, k_e);
            &fresh
        } else {
            &self.moments[m]
        };
        let cat = catalan_quarter(FAR_TERMS);
        for (j, mm) in moments.iter().enumerate() {
            out += mm * (-0.5 * om * ell * cat[j] * pow(om * ell * ell, j as f64));
        }
        Ok(symmetrize(out))
    }

    pub fn qb(&self, m: usize, alpha: f64, ln_d: f64, ell: f64, b: &Robin) -> Result<DMatrix<f64>> {
        let mut q = self.correction(m, alpha, ln_d, ell)?;
        q += self.basis.q0(m) / ell;
        if !b.is_zero() {
            q += self.basis.robin(m, b, ell);
        }
        Ok(q)
    }
}

fn layer_moments(basis: &DiskBasis, m: usize, k_f: f64) -> Vec<DMatrix<f64>> {
    layer_moments_from(basis, m, k_f)
}

/// `A_m ∫_{k_f}^∞ k^{−2j} H_a H_b dk`, j = 0..FAR_TERMS.
fn layer_moments_from(basis: &DiskBasis, m: usize, k_f: f64) -> Vec<DMatrix<f64>> {
    let n = basis.per;
    let lambda = 4000.0f64.max(8.0 * k_f);
    let gl = GaussLegendre::new(16);
    let width = basis.width();
    let am = angular_weight(m);
    let mut out: Vec<DMatrix<f64>> = (0..FAR_TERMS).map(|_| DMatrix::zeros(n, n)).collect();
    let chunk = 256.0 * width;
    let mut lo = k_f;
    let mut buf = Vec::new();
    while lo < lambda {
        let hi = (lo + chunk).min(lambda);
        let mut rule = CompositeRule::default();
        CompositeRule::uniform(&gl, lo, hi, width, &mut rule);
        let s = Samples::build(rule, n, |k, re, im| {
            basis.hankel(m, k, re, &mut buf);
            im.fill(0.0);
        });
        for (j, mm) in out.iter_mut().enumerate() {
            *mm += s.weighted(0..s.nodes.len(), |k| s.weights[k] * pow(s.nodes[k], -2.0 * j as f64)) * (0.5 * am);
        }
        lo = hi;
    }
    // mean of H_a H_b for large k is c_a c_b/(π k⁴)
    for a in 0..n {
        for b in 0..n {
            let base = am * c_n(a) * c_n(b) / PI;
            for (j, mm) in out.iter_mut().enumerate() {
                let p = 2.0 * j as f64 + 3.0;
                mm[(a, b)] += base / (p * pow(lambda, p));
            }
        }
    }
    out.into_iter().map(symmetrize).collect()
}

/// Neumann or Robin disk window on the Dirichlet layer of width α.
#[derive(Debug, Clone)]
pub struct LayerProblem {
    pub alpha: f64,
    pub robin: Robin,
    pub assembly: LayerAssembly,
    pencils: Vec<Pencil>,
}

impl LayerProblem {
    pub fn new(alpha: f64, robin: Robin, assembly: LayerAssembly) -> Result<Self> {
        let mut pencils = Vec::new();
        for m in 0..assembly.basis.harmonics {
            pencils.push(Pencil::new(&assembly.basis.gram(m))?);
        }
        Ok(Self { alpha, robin, assembly, pencils })
    }

    pub fn threshold(&self) -> f64 {
        threshold(self.alpha)
    }

    pub fn block(&self, m: usize, ell: f64, ln_d: f64) -> Result<DMatrix<f64>> {
        self.assembly.qb(m, self.alpha, ln_d, ell, &self.robin)
    }

    /// Smallest `k` eigenvalues of harmonic block m.
    pub fn block_mu(&self, m: usize, ell: f64, ln_d: f64, k: usize) -> Result<Vec<f64>> {
        Ok(self.pencils[m].lowest(&self.block(m, ell, ln_d)?, k))
    }

    /// Smallest `k` eigenvalues over all harmonic blocks; harmonics m ≥ 1 count twice.
    pub fn mu_eigenvalues(&self, ell: f64, ln_d: f64, k: usize) -> Result<Vec<f64>> {
        let mut all = Vec::new();
        for m in 0..self.pencils.len() {
            let ev = self.block_mu(m, ell, ln_d, k)?;
            for v in ev {
                all.push(v);
                if m > 0 {
                    all.push(v);
                }
            }
        }
        all.sort_by(|a, b| a.total_cmp(b));
        all.truncate(k);
        Ok(all)
    }

    pub fn tau0(&self) -> f64 {
        let q = self.assembly.basis.q0(0);
        let f = self.assembly.basis.load_vector(0);
        f[0] * f[0] / q[(0, 0)]
    }

    /// Root in u = −1/ln(gap) on the radial block; μ₂ is taken over all blocks.
    pub fn solve(&self, ell: f64, opts: &SolverOptions) -> Result<EigenResult> {
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(Error::InvalidInput("scale must be positive".into()));
        }
        let a3 = self.alpha * self.alpha * self.alpha;
        let guess = -2.0 * a3 / (PI * self.tau0() * ell * ell * ell);
        let mut r = solve_in_u(&self.pencils[0], |ln_d| self.block(0, ell, ln_d), guess, self.threshold(), self.assembly.basis.per, opts)?;
        let ev = self.mu_eigenvalues(ell, r.ln_gap, 2)?;
        r.mu1 = ev[0];
        r.mu2 = ev[1];
        if !(r.mu2 > 0.0) {
            return Err(Error::Degenerate { mu2: r.mu2 });
        }
        Ok(r)
    }
}
