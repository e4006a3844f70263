//! The strip symbol `m_ω(ξ) = √(ξ²−ω)·coth(α√(ξ²−ω))`, its splits and the constants ρ.

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::special::{inv_minus_cot, sqrt_coth_series, EULER_GAMMA};
use core::f64::consts::PI;
use libm::{exp, fabs, log, sqrt, tan, tanh};
use num_complex::Complex64;

/// Bottom of the essential spectrum of the Dirichlet strip of width `alpha`.
pub fn threshold(alpha: f64) -> f64 {
    PI * PI / (alpha * alpha)
}

/// Strip width and spectral parameter. The distance to threshold is stored
/// separately so that ω extremely close to π²/α² keeps full relative precision.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymbolParams {
    pub alpha: f64,
    pub omega: f64,
    detuning: f64,
}

impl SymbolParams {
    pub fn new(alpha: f64, omega: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !omega.is_finite() {
            return Err(Error::InvalidInput("omega must be finite".into()));
        }
        Ok(Self { alpha, omega, detuning: threshold(alpha) - omega })
    }

    /// ω = π²/α² − `detuning`.
    pub fn below_threshold(alpha: f64, detuning: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(detuning >= 0.0) || !detuning.is_finite() {
            return Err(Error::InvalidInput("detuning must be finite and non-negative".into()));
        }
        Ok(Self { alpha, omega: threshold(alpha) - detuning, detuning })
    }

    pub fn at_threshold(alpha: f64) -> Result<Self> {
        Self::below_threshold(alpha, 0.0)
    }

    pub fn threshold(&self) -> f64 {
        threshold(self.alpha)
    }

    pub fn kappa(&self) -> f64 {
        PI / self.alpha
    }

    /// π²/α² − ω.
    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn require_below_threshold(&self) -> Result<()> {
        if self.detuning > 0.0 {
            Ok(())
        } else {
            Err(Error::AboveThreshold { omega: self.omega, threshold: self.threshold() })
        }
    }

    /// ξ² − ω without cancellation near threshold.
    fn shifted(&self, xi2: f64) -> f64 {
        let k2 = self.threshold();
        (xi2 - k2) + self.detuning
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput("alpha must be positive".into()))
    }
}

const POLE_TOL: f64 = 1e-12;

/// `m_ω(ξ)` for complex ξ; value is branch independent.
pub fn symbol_m(p: &SymbolParams, xi: Complex64) -> Result<Complex64> {
    let k2 = p.threshold();
    let w = (xi * xi - k2) + p.detuning;
    let a = p.alpha;
    let q = w * (a * a);
    if q.norm() < 0.5 {
        let c = crate::special::coth_series_coefficients();
        let mut acc = Complex64::new(0.0, 0.0);
        for ck in c.iter().rev() {
            acc = acc * q + ck;
        }
        return Ok((q * acc + 1.0) / a);
    }
    let z = w.sqrt();
    let e = (-2.0 * a * z).exp();
    let den = Complex64::new(1.0, 0.0) - e;
    if den.norm() < POLE_TOL {
        let dist = den.norm() * z.norm() / (2.0 * a * xi.norm().max(1e-300));
        return Err(Error::NearPole { re: xi.re, im: xi.im, distance: dist });
    }
    Ok(z * (e + 1.0) / den)
}

/// `m_ω(ξ)` for real ξ and real ω.
pub fn symbol_m_real(p: &SymbolParams, xi: f64) -> Result<f64> {
    let a = p.alpha;
    let w = p.shifted(xi * xi);
    let q = a * a * w;
    if fabs(q) < 0.5 {
        return Ok(sqrt_coth_series(q) / a);
    }
    if w > 0.0 {
        let z = sqrt(w);
        return Ok(z / tanh(a * z));
    }
    let t = sqrt(-w);
    let phi = a * t;
    if phi > 0.5 * PI && phi < 1.5 * PI {
        // π − αt = α(ξ² + d)/(κ + t)
        let theta = a * (xi * xi + p.detuning) / (p.kappa() + t);
        if fabs(theta) < POLE_TOL {
            return Err(Error::NearPole { re: xi, im: 0.0, distance: fabs(theta) / a });
        }
        return Ok(-t / tan(theta));
    }
    let s = libm::sin(phi);
    if fabs(s) < POLE_TOL {
        return Err(Error::NearPole { re: xi, im: 0.0, distance: fabs(s) / a });
    }
    Ok(t * libm::cos(phi) / s)
}

/// `r(ξ) = m_ω(ξ) − |ξ|` without cancellation for large |ξ|.
pub fn symbol_remainder(p: &SymbolParams, xi: f64) -> Result<f64> {
    let a = p.alpha;
    let x = fabs(xi);
    let w = p.shifted(x * x);
    if w > 0.0 && a * a * w >= 0.5 {
        let z = sqrt(w);
        let e = exp(-2.0 * a * z);
        return Ok(-p.omega / (z + x) + 2.0 * z * e / (1.0 - e));
    }
    Ok(symbol_m_real(p, x)? - x)
}

/// Lorentzian part `−(2π²/α³)/(ξ² + π²/α² − ω)` carrying the first pole.
pub fn peak_part(p: &SymbolParams, xi: f64) -> f64 {
    -2.0 * p.threshold() / p.alpha / (xi * xi + p.detuning)
}

/// `r(ξ) − peak_part(ξ)`, bounded uniformly as ω approaches threshold.
pub fn regular_remainder(p: &SymbolParams, xi: f64) -> Result<f64> {
    let a = p.alpha;
    let k = p.kappa();
    let x = fabs(xi);
    let eps = x * x + p.detuning;
    if eps < k * k {
        let t = sqrt(k * k - eps);
        let theta = a * eps / (k + t);
        if theta < 0.5 {
            return Ok((1.0 + k / (k + t)) / a + t * inv_minus_cot(theta) - x);
        }
    }
    Ok(symbol_remainder(p, x)? - peak_part(p, x))
}

/// Truncated partial-fraction series `1/α + Σ_{k≤K} 2α(ξ²−ω)/(α²(ξ²−ω)+k²π²)`,
/// summed with compensation.
pub fn symbol_series(p: &SymbolParams, xi: Complex64, terms: usize) -> Complex64 {
    let a = p.alpha;
    let w = (xi * xi - p.threshold()) + p.detuning;
    let mut re = Neumaier::new(1.0 / a);
    let mut im = Neumaier::new(0.0);
    for k in 1..=terms {
        let kk = k as f64 * PI;
        let t = 2.0 * a * w / (a * a * w + kk * kk);
        re.add(t.re);
        im.add(t.im);
    }
    Complex64::new(re.sum(), im.sum())
}

/// Compensated (Neumaier) accumulator.
#[derive(Debug, Clone, Copy)]
pub struct Neumaier {
    s: f64,
    c: f64,
}

impl Neumaier {
    pub fn new(init: f64) -> Self {
        Self { s: init, c: 0.0 }
    }

    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if fabs(self.s) >= fabs(x) {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    pub fn sum(&self) -> f64 {
        self.s + self.c
    }
}

/// First pole `i√(π²/α²−ω)` in the upper half plane and the residue there.
pub fn first_pole_and_residue(p: &SymbolParams) -> Result<(Complex64, Complex64)> {
    p.require_below_threshold()?;
    let s = sqrt(p.detuning);
    let loc = Complex64::new(0.0, s);
    let res = Complex64::new(0.0, p.threshold() / p.alpha / s);
    Ok((loc, res))
}

/// Radius separating `[−ξ_c, ξ_c]` from the tail of the split.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CutRadius {
    pub xi_c: f64,
}

impl CutRadius {
    pub fn new(xi_c: f64) -> Result<Self> {
        if xi_c > 0.0 && xi_c.is_finite() {
            Ok(Self { xi_c })
        } else {
            Err(Error::InvalidInput("cut radius must be positive".into()))
        }
    }

    /// ξ_c = 1 when π²/α² ≤ 1/2, otherwise √2·π/α so the binomial tail converges fast.
    pub fn for_alpha(alpha: f64) -> Self {
        let k = PI / alpha;
        Self { xi_c: (core::f64::consts::SQRT_2 * k).max(1.0) }
    }

    fn admits(&self, omega: f64) -> Result<()> {
        if self.xi_c * self.xi_c > omega {
            Ok(())
        } else {
            Err(Error::InvalidInput("cut radius must satisfy xi_c^2 > omega".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymbolSplit {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

/// Parts with `m = 𝟙_{|ξ|≤ξc}·m + |ξ| + m1 + m2 + m3`.
pub fn symbol_split(p: &SymbolParams, cut: CutRadius, xi: f64) -> Result<SymbolSplit> {
    cut.admits(p.omega)?;
    let x = fabs(xi);
    if x <= cut.xi_c {
        return Ok(SymbolSplit { m1: -x, m2: 0.0, m3: 0.0 });
    }
    let z = sqrt(p.shifted(x * x));
    let e = exp(-2.0 * p.alpha * z);
    Ok(SymbolSplit { m1: 0.0, m2: -p.omega / (z + x), m3: 2.0 * z * e / (1.0 - e) })
}

/// Rectangle path γ: −ξ_c → −ξ_c+iβ → ξ_c+iβ → ξ_c.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContourSpec {
    pub beta: f64,
    pub nodes: usize,
}

impl ContourSpec {
    /// β at the midpoint of (π/α, √3·π/α).
    pub fn for_alpha(alpha: f64) -> Self {
        let k = PI / alpha;
        Self { beta: 0.5 * (1.0 + libm::sqrt(3.0)) * k, nodes: 32 }
    }

    pub fn validate(&self, alpha: f64) -> Result<()> {
        let k = PI / alpha;
        if self.beta > 0.0 && self.beta < libm::sqrt(3.0) * k && self.nodes >= 2 {
            Ok(())
        } else {
            Err(Error::InvalidInput("contour height must lie in (0, sqrt(3)*pi/alpha)".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RhoConstants {
    pub alpha: f64,
    pub xi_c: f64,
    pub beta: f64,
    pub rho01: f64,
    pub rho02: f64,
    pub rho03: f64,
    /// Constant multiplying |Σ|/(2π)·P_ct in the ℓ-order term of the form expansion.
    pub rho0: f64,
    /// `ρ01 + ρ02 + ρ03 + 1 + γ₀π²/α²` (the printed combination, only defined for ξ_c = 1).
    pub rho0_printed: Option<f64>,
    pub rho01_self_consistency: f64,
    pub rho02_tail_bound: f64,
    pub rho03_self_consistency: f64,
}

/// ρ constants at ω = π²/α².
pub fn rho_constants(alpha: f64, contour: ContourSpec, cut: CutRadius) -> Result<RhoConstants> {
    contour.validate(alpha)?;
    let p = SymbolParams::at_threshold(alpha)?;
    let k2 = p.threshold();
    cut.admits(k2)?;
    let xc = cut.xi_c;

    let (rho01, c01) = contour_integral(&p, contour, xc)?;
    let (series, tail) = binomial_tail(k2, xc);
    let rho02 = 0.5 * series;
    let (rho03, c03) = exponential_tail(&p, xc)?;

    let rho0 = rho01 - xc * xc + series + rho03 + k2 * log(xc) + EULER_GAMMA * k2;
    let rho0_printed = if fabs(xc - 1.0) < 1e-15 {
        Some(rho01 + rho02 + rho03 + 1.0 + EULER_GAMMA * k2)
    } else {
        None
    };
    Ok(RhoConstants {
        alpha,
        xi_c: xc,
        beta: contour.beta,
        rho01,
        rho02,
        rho03,
        rho0,
        rho0_printed,
        rho01_self_consistency: c01,
        rho02_tail_bound: 0.5 * tail,
        rho03_self_consistency: c03,
    })
}

fn contour_integral(p: &SymbolParams, c: ContourSpec, xc: f64) -> Result<(f64, f64)> {
    let beta = c.beta;
    let eval = |n: usize| -> Result<Complex64> {
        let gl = GaussLegendre::new(n);
        let mut acc = Complex64::new(0.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        for (t, w) in gl.nodes.iter().zip(&gl.weights) {
            let y = 0.5 * beta * (t + 1.0);
            let wy = 0.5 * beta * w;
            let left = symbol_m(p, Complex64::new(-xc, y))?;
            let right = symbol_m(p, Complex64::new(xc, y))?;
            acc += (left - right) * i * wy;
            let x = xc * t;
            acc += symbol_m(p, Complex64::new(x, beta))? * (xc * w);
        }
        Ok(acc)
    };
    let mut n = c.nodes;
    let mut prev = eval(n)?;
    loop {
        n *= 2;
        let cur = eval(n)?;
        let diff = (cur - prev).norm();
        if diff < 1e-13 * fabs(cur.re).max(1.0) {
            return Ok((cur.re, diff));
        }
        if n > 8192 {
            if diff < 1e-10 * fabs(cur.re).max(1.0) {
                return Ok((cur.re, diff));
            }
            return Err(Error::Quadrature { achieved: diff, requested: 1e-10 });
        }
        prev = cur;
    }
}

/// ρ02 with the binomial series in (π²/α²)/ξ_c² and its tail bound.
pub fn rho02(alpha: f64, cut: CutRadius) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let k2 = threshold(alpha);
    cut.admits(k2)?;
    let (s, t) = binomial_tail(k2, cut.xi_c);
    Ok((0.5 * s, 0.5 * t))
}

/// `Σ_{k≥2} C(1/2,k)(−ω)^k ξ_c^{2−2k}/(k−1)` and a bound on the neglected tail.
fn binomial_tail(omega: f64, xc: f64) -> (f64, f64) {
    let x = omega / (xc * xc);
    let mut binom = 0.5; // C(1/2, 1)
    let mut pow = -x; // (−x)^1
    let mut acc = Neumaier::new(0.0);
    let mut k = 1usize;
    loop {
        binom *= (0.5 - k as f64) / (k as f64 + 1.0);
        pow *= -x;
        k += 1;
        let term = binom * pow / (k as f64 - 1.0);
        acc.add(term);
        let s = acc.sum();
        if fabs(term) < 1e-17 * fabs(s).max(1e-300) || k > 10_000 {
            let tail = fabs(term) * x / (1.0 - x);
            return (xc * xc * s, xc * xc * tail);
        }
    }
}

fn exponential_tail(p: &SymbolParams, xc: f64) -> Result<(f64, f64)> {
    let a = p.alpha;
    let integrand = |xi: f64| -> f64 {
        let z = sqrt(p.shifted(xi * xi));
        let e = exp(-2.0 * a * z);
        2.0 * z * e / (1.0 - e)
    };
    // integrand ~ exp(−2αξ); stop where it is below 1e−20 of its size at ξ_c
    let upper = xc + 25.0 / a;
    let eval = |panels: usize| -> f64 {
        let gl = GaussLegendre::new(20);
        let w = (upper - xc) / panels as f64;
        let mut s = 0.0;
        for i in 0..panels {
            let lo = xc + i as f64 * w;
            s += gl.integrate(lo, lo + w, integrand);
        }
        2.0 * s
    };
    let mut panels = 8;
    let mut prev = eval(panels);
    loop {
        panels *= 2;
        let cur = eval(panels);
        let diff = fabs(cur - prev);
        if diff < 1e-14 * fabs(cur).max(1e-3) {
            return Ok((cur, diff));
        }
        if panels > 4096 {
            return Err(Error::Quadrature { achieved: diff, requested: 1e-10 });
        }
        prev = cur;
    }
}
