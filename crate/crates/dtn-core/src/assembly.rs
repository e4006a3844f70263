//! Galerkin matrices of `q_b(ℓ,ω)` on an interval basis.
//!
//! `q_b(ℓ,ω)[g,h] = Q₀/ℓ + ∫ r(η/ℓ) ĝ conj(ĥ) dη + ∫ b(ℓx) g h dx` with `r = m_ω − |ξ|`.
//! The integrand is folded onto η ≥ 0 as `S(η) = 2(XXᵀ + YYᵀ)`.

use crate::basis::{IntervalBasis, Robin};
use crate::error::Result;
use crate::quad::{CompositeRule, GaussLegendre};
use crate::special::catalan_quarter;
use crate::symbol::{regular_remainder, symbol_remainder, SymbolParams};
use alloc::vec::Vec;
use libm::{atan, fabs, pow, sqrt};
use nalgebra::DMatrix;

/// Odd powers p = 1, 3, …, 9 used by the far-field expansion of r.
pub(crate) const FAR_TERMS: usize = 5;

/// Transform samples of a basis on a fixed rule: columns are nodes.
#[derive(Debug, Clone)]
pub(crate) struct Samples {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
}

impl Samples {
    pub fn build<F: FnMut(f64, &mut [f64], &mut [f64])>(rule: CompositeRule, n: usize, mut f: F) -> Self {
        let k = rule.len();
        let mut re = DMatrix::zeros(n, k);
        let mut im = DMatrix::zeros(n, k);
        let mut cr = alloc::vec![0.0; n];
        let mut ci = alloc::vec![0.0; n];
        for (j, &eta) in rule.nodes.iter().enumerate() {
            f(eta, &mut cr, &mut ci);
            for a in 0..n {
                re[(a, j)] = cr[a];
                im[(a, j)] = ci[a];
            }
        }
        Self { nodes: rule.nodes, weights: rule.weights, re, im }
    }

    /// `Σ_k c_k S(η_k)` over the node subset `range`.
    pub fn weighted(&self, range: core::ops::Range<usize>, c: impl Fn(usize) -> f64) -> DMatrix<f64> {
        let n = self.re.nrows();
        let len = range.len();
        let mut a = DMatrix::zeros(n, len);
        let mut b = DMatrix::zeros(n, len);
        for (col, k) in range.clone().enumerate() {
            let w = c(k);
            for r in 0..n {
                a[(r, col)] = self.re[(r, k)] * w;
                b[(r, col)] = self.im[(r, k)] * w;
            }
        }
        let xr = self.re.columns(range.start, len);
        let xi = self.im.columns(range.start, len);
        let mut out = a * xr.transpose();
        out.gemm(1.0, &b, &xi.transpose(), 1.0);
        out * 2.0
    }
}

/// Precomputed transforms and fixed forms for one interval basis.
#[derive(Debug, Clone)]
pub struct LineAssembly {
    basis: IntervalBasis,
    near: Samples,
    /// number of near nodes with η ≤ 1
    split: usize,
    eta_f: f64,
    s0: DMatrix<f64>,
    moments: Vec<DMatrix<f64>>,
    q0: DMatrix<f64>,
    gram: DMatrix<f64>,
    load: Vec<f64>,
}

impl LineAssembly {
    pub fn new(basis: IntervalBasis) -> Result<Self> {
        let n = basis.len();
        let gl = GaussLegendre::new(16);
        let freq = basis.max_frequency();
        let width = (2.0 * core::f64::consts::PI / freq).min(1.0);
        let eta_f = 40.0;

        let mut rule = CompositeRule::default();
        CompositeRule::dyadic_to_one(&gl, 1e-17, &mut rule);
        let split = rule.len();
        CompositeRule::uniform(&gl, 1.0, eta_f, width, &mut rule);
        let mut buf = Vec::new();
        let near = Samples::build(rule, n, |e, r, i| basis.transforms(e, r, i, &mut buf));

        let load = basis.load_vector();
        let inv_pi = 1.0 / core::f64::consts::PI;
        let s0 = DMatrix::from_fn(n, n, |a, b| load[a] * load[b] * inv_pi);

        let moments = far_moments(&basis, eta_f, width);
        let q0 = basis.q0();
        let gram = basis.gram();
        Ok(Self { basis, near, split, eta_f, s0, moments, q0, gram, load })
    }

    pub fn basis(&self) -> &IntervalBasis {
        &self.basis
    }

    pub fn q0(&self) -> &DMatrix<f64> {
        &self.q0
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn load(&self) -> &[f64] {
        &self.load
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `∫_ℝ r(η/ℓ) ĝ_a conj(ĝ_b) dη`.
    pub fn correction(&self, p: &SymbolParams, ell: f64) -> Result<DMatrix<f64>> {
        p.require_below_threshold()?;
        let a = p.alpha;
        let k2 = p.threshold();
        let nn = self.near.nodes.len();

        // regular remainder on the near rule
        let mut vals = alloc::vec![0.0; nn];
        for (k, v) in vals.iter_mut().enumerate() {
            *v = self.near.weights[k] * regular_remainder(p, self.near.nodes[k] / ell)?;
        }
        let mut out = self.near.weighted(0..nn, |k| vals[k]);

        // Lorentzian peak −(2κ²ℓ²/α)/(η² + δ²), δ = ℓ√d
        let delta = ell * sqrt(p.detuning());
        let d2 = delta * delta;
        let pref = -2.0 * k2 * ell * ell / a;
        let lower = self.near.weighted(0..self.split, |k| {
            let e = self.near.nodes[k];
            self.near.weights[k] / (e * e + d2)
        });
        let upper = self.near.weighted(self.split..nn, |k| {
            let e = self.near.nodes[k];
            self.near.weights[k] / (e * e + d2)
        });
        let lower_mass: f64 = (0..self.split)
            .map(|k| {
                let e = self.near.nodes[k];
                self.near.weights[k] / (e * e + d2)
            })
            .sum();
        // ∫_0^1 dη/(η²+δ²) exactly, with the S(0) part subtracted from the numerical lower integral
        let exact = if delta > 0.0 { atan(1.0 / delta) / delta } else { f64::INFINITY };
        let peak = lower - &self.s0 * lower_mass + &self.s0 * exact + upper;
        out += peak * pref;

        // far field: r(ξ) ≈ −(ω/2ξ) Σ a_j (ω/ξ²)^j, ξ = η/ℓ, accurate once
        // ω ℓ²/η² ≤ 10⁻² and the coth correction is below e^{−40}
        let om = p.omega;
        let eta_e = (20.0 * ell / a).max(10.0 * ell * sqrt(fabs(om))).max(self.eta_f);
        let fresh;
        let moments = if eta_e > self.eta_f {
            let gl = GaussLegendre::new(16);
            let width = self.width();
            let mut rule = CompositeRule::default();
            CompositeRule::uniform(&gl, self.eta_f, eta_e, width, &mut rule);
            let mut buf = Vec::new();
            let ext = Samples::build(rule, self.len(), |e, r, i| self.basis.transforms(e, r, i, &mut buf));
            let mut w = alloc::vec![0.0; ext.nodes.len()];
            for (k, v) in w.iter_mut().enumerate() {
                *v = ext.weights[k] * symbol_remainder(p, ext.nodes[k] / ell)?;
            }
            out += ext.weighted(0..ext.nodes.len(), |k| w[k]);
            fresh = far_moments(&self.basis, eta_e, width);
            &fresh
        } else {
            &self.moments
        };
        let cat = catalan_quarter(FAR_TERMS);
        for (j, m) in moments.iter().enumerate() {
            let c = -0.5 * om * ell * cat[j] * pow(om * ell * ell, j as f64);
            out += m * c;
        }
        Ok(symmetrize(out))
    }

    fn width(&self) -> f64 {
        (2.0 * core::f64::consts::PI / self.basis.max_frequency()).min(1.0)
    }

    /// Matrix of `q_b(ℓ,ω)`.
    pub fn qb(&self, p: &SymbolParams, ell: f64, b: &Robin) -> Result<DMatrix<f64>> {
        let mut m = self.correction(p, ell)?;
        m += &self.q0 / ell;
        if !b.is_zero() {
            m += self.basis.robin(b, ell);
        }
        Ok(m)
    }
}

pub(crate) fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

/// `∫_{η_f}^∞ η^{−p} S(η) dη` for p = 1, 3, …, numerically to Λ plus the mean Bessel tail.
fn far_moments(basis: &IntervalBasis, eta_f: f64, width: f64) -> Vec<DMatrix<f64>> {
    let n = basis.len();
    let lambda = 4000.0f64.max(8.0 * eta_f);
    let gl = GaussLegendre::new(16);
    let mut out: Vec<DMatrix<f64>> = (0..FAR_TERMS).map(|_| DMatrix::zeros(n, n)).collect();
    // stream in chunks to bound memory
    let chunk = 256.0 * width;
    let mut lo = eta_f;
    let mut buf = Vec::new();
    while lo < lambda {
        let hi = (lo + chunk).min(lambda);
        let mut rule = CompositeRule::default();
        CompositeRule::uniform(&gl, lo, hi, width, &mut rule);
        let s = Samples::build(rule, n, |e, r, i| basis.transforms(e, r, i, &mut buf));
        for (j, m) in out.iter_mut().enumerate() {
            let p = (2 * j + 1) as i32;
            *m += s.weighted(0..s.nodes.len(), |k| s.weights[k] * pow(s.nodes[k], -(p as f64)));
        }
        lo = hi;
    }
    // non-oscillatory part of S on a single component: (m+1)(n+1)/(h η³) for m−n even
    let per = basis.per_component();
    for (i, &(_, h)) in basis.components().iter().enumerate() {
        for a in 0..per {
            for b in 0..per {
                if (a + b) % 2 == 1 {
                    continue;
                }
                let base = (a as f64 + 1.0) * (b as f64 + 1.0) / h;
                for (j, m) in out.iter_mut().enumerate() {
                    let p = (2 * j + 1) as f64;
                    m[(i * per + a, i * per + b)] += base / ((p + 2.0) * pow(lambda, p + 2.0));
                }
            }
        }
    }
    out.into_iter().map(symmetrize).collect()
}
