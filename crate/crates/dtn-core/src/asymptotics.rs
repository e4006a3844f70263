//! Closed-form small-window predictions and the form-expansion residual.

use crate::assembly::LineAssembly;
use crate::basis::Robin;
use crate::error::{Error, Result};
use crate::symbol::{rho_constants, threshold, ContourSpec, CutRadius, RhoConstants, SymbolParams};
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{fabs, log, sqrt};
use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

/// Window functionals and strip constants entering the expansions.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AsymptoticConstants {
    /// ⟨Q₀⁻¹φ₀, φ₀⟩
    pub tau0: f64,
    /// ⟨Q₀⁻¹φ₀, Q₀⁻¹φ₀⟩
    pub tau1: f64,
    /// ⟨Q₀⁻²φ₀, Q₀⁻¹φ₀⟩
    pub rho1: f64,
    /// ⟨K_ln Q₀⁻¹φ₀, Q₀⁻¹φ₀⟩
    pub kln: f64,
    /// ⟨M_x Q₀⁻¹φ₀, Q₀⁻¹φ₀⟩
    pub mx: f64,
    pub measure: f64,
    pub rho: Option<RhoConstants>,
    pub b0: f64,
    pub b0_prime: f64,
}

impl AsymptoticConstants {
    pub fn rho0(&self) -> Result<f64> {
        self.rho.map(|r| r.rho0).ok_or_else(|| Error::InvalidInput("strip constants not computed".into()))
    }
}

/// Window functionals only.
pub fn window_constants(asm: &LineAssembly, b: &Robin) -> Result<AsymptoticConstants> {
    let q0 = asm.q0();
    let chol = Cholesky::new(q0.clone()).ok_or(Error::NotPositiveDefinite)?;
    let f = DVector::from_column_slice(asm.load());
    let c = chol.solve(&f);
    let gc = asm.gram() * &c;
    let v = chol.solve(&gc);
    let basis = asm.basis();
    let kln = basis.kln();
    let mx = basis.mx();
    Ok(AsymptoticConstants {
        tau0: f.dot(&c),
        tau1: c.dot(&gc),
        rho1: gc.dot(&v),
        kln: c.dot(&(&kln * &c)),
        mx: c.dot(&(&mx * &c)),
        measure: basis.window().measure(),
        rho: None,
        b0: b.at_origin(),
        b0_prime: b.slope_at_origin(),
    })
}

/// Window functionals plus ρ constants of the strip of width α.
pub fn compute_constants(asm: &LineAssembly, alpha: f64, b: &Robin) -> Result<AsymptoticConstants> {
    let mut c = window_constants(asm, b)?;
    c.rho = Some(rho_constants(alpha, ContourSpec::for_alpha(alpha), CutRadius::for_alpha(alpha))?);
    Ok(c)
}

/// Coefficients of `√gap ≈ c2 ℓ² + c3 ℓ³ + c4l ℓ⁴ ln ℓ + c4 ℓ⁴`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Prediction {
    pub c2: f64,
    pub c3: f64,
    pub c4_log: f64,
    pub c4: f64,
    /// power of the neglected remainder (up to logarithms)
    pub remainder_order: f64,
}

impl Prediction {
    pub fn sqrt_gap(&self, ell: f64) -> f64 {
        let l2 = ell * ell;
        l2 * (self.c2 + ell * self.c3 + l2 * (self.c4_log * log(ell) + self.c4))
    }

    pub fn gap(&self, ell: f64) -> f64 {
        let s = self.sqrt_gap(ell);
        s * s
    }
}

/// Two-term prediction for a general window: `(π²/α³)(τ₀ ℓ² − b(0) τ₁ ℓ³)`.
pub fn predict_2d(c: &AsymptoticConstants, alpha: f64) -> Prediction {
    let k = PI * PI / (alpha * alpha * alpha);
    Prediction { c2: k * c.tau0, c3: -k * c.b0 * c.tau1, c4_log: 0.0, c4: 0.0, remainder_order: 4.0 }
}

/// The same with the sign of the ℓ³ term as printed in the main theorem.
pub fn predict_2d_printed(c: &AsymptoticConstants, alpha: f64) -> Prediction {
    let mut p = predict_2d(c, alpha);
    p.c3 = -p.c3;
    p
}

/// Four-order prediction from the geometric-series expansion of `(Q₀+ℓR)⁻¹`.
pub fn predict_2d_full(c: &AsymptoticConstants, alpha: f64) -> Result<Prediction> {
    let rho0 = c.rho0()?;
    let a2 = alpha * alpha;
    let k = PI * PI / (a2 * alpha);
    let t2 = c.tau0 * c.tau0;
    Ok(Prediction {
        c2: k * c.tau0,
        c3: -k * c.b0 * c.tau1,
        c4_log: -k * PI * t2 / (2.0 * a2),
        c4: k * (-rho0 * t2 / (2.0 * PI) - PI / (2.0 * a2) * c.kln + c.b0 * c.b0 * c.rho1 - c.b0_prime * c.mx),
        remainder_order: 5.0,
    })
}

/// Four-order prediction for Σ = (−1, 1).
pub fn predict_2d_interval(c: &AsymptoticConstants, alpha: f64) -> Result<Prediction> {
    if fabs(c.measure - 2.0) > 1e-12 || fabs(c.tau0 - PI / 2.0) > 1e-6 {
        return Err(Error::Geometry("interval prediction needs the window (-1, 1)".into()));
    }
    predict_2d_full(c, alpha)
}

/// Printed interval formula: `+ℓ³ 4b π²/(3α³)`, `+ℓ⁴ ρ₀π³/(8α³)` and `−ℓ⁴ b² ρ₁π²/α³`,
/// with ρ₀ the printed combination `ρ01 + ρ02 + ρ03 + 1 + γ₀π²/α²`.
pub fn predict_2d_interval_printed(c: &AsymptoticConstants, alpha: f64) -> Result<Prediction> {
    let printed = rho_constants(alpha, ContourSpec::for_alpha(alpha), CutRadius::new(1.0)?)?
        .rho0_printed
        .ok_or_else(|| Error::InvalidInput("printed constant needs xi_c = 1".into()))?;
    let a3 = alpha * alpha * alpha;
    let a5 = a3 * alpha * alpha;
    let p5 = PI * PI * PI * PI * PI;
    Ok(Prediction {
        c2: PI * PI * PI / (2.0 * a3),
        c3: 4.0 * c.b0 * PI * PI / (3.0 * a3),
        c4_log: -p5 / (8.0 * a5),
        c4: printed * PI * PI * PI / (8.0 * a3) + p5 / (32.0 * a5) * (1.0 + log(16.0)) - c.b0 * c.b0 * c.rho1 * PI * PI / a3,
        remainder_order: 5.0,
    })
}

/// Leading term for coupled strips: `(π²/(2α₊³)) τ₀ ℓ²`.
pub fn predict_coupled(c: &AsymptoticConstants, alpha_plus: f64) -> Prediction {
    let k = PI * PI / (2.0 * alpha_plus * alpha_plus * alpha_plus);
    Prediction { c2: k * c.tau0, remainder_order: 3.0, ..Default::default() }
}

/// Law `ln(gap) ≈ −slope / (ℓ³ (τ₀ + τ₁ b(0) ℓ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LayerLaw {
    pub slope: f64,
    pub tau0: f64,
    pub tau1_b0: f64,
}

impl LayerLaw {
    pub fn ln_gap(&self, ell: f64) -> f64 {
        -self.slope / (ell * ell * ell * (self.tau0 + self.tau1_b0 * ell))
    }

    /// Limit of `−ℓ³ ln(gap)` as ℓ → 0.
    pub fn limit(&self) -> f64 {
        self.slope / self.tau0
    }
}

/// Slope `4α³` as printed.
pub fn predict_3d_printed(tau0: f64, tau1: f64, b0: f64, alpha: f64) -> LayerLaw {
    LayerLaw { slope: 4.0 * alpha * alpha * alpha, tau0, tau1_b0: tau1 * b0 }
}

/// Slope `2α³/π` obtained from the logarithmic peak `ℓ²(π/α³) ln(ℓ√gap) P`.
pub fn predict_3d(tau0: f64, tau1: f64, b0: f64, alpha: f64) -> LayerLaw {
    LayerLaw { slope: 2.0 * alpha * alpha * alpha / PI, tau0, tau1_b0: -tau1 * b0 }
}

/// Matrices of the expansion `Q₀/ℓ − ℓ(π²/α³)s⁻¹ ffᵀ + ℓ ln ℓ B₁ + ℓ B₀`.
#[derive(Debug, Clone)]
pub struct ExpansionTerms {
    pub ff: DMatrix<f64>,
    pub b1: DMatrix<f64>,
    pub b0: DMatrix<f64>,
}

pub fn expansion_terms(asm: &LineAssembly, alpha: f64, rho0: f64) -> ExpansionTerms {
    let f = DVector::from_column_slice(asm.load());
    let ff = &f * f.transpose();
    let k2 = threshold(alpha);
    let b1 = &ff * (k2 / (2.0 * PI));
    let b0 = &ff * (rho0 / (2.0 * PI)) + asm.basis().kln() * (k2 / (2.0 * PI));
    ExpansionTerms { ff, b1, b0 }
}

/// Spectral norm of `Qb(ℓ,ω) − expansion`, with or without the singular ffᵀ term.
pub fn expansion_residual(
    asm: &LineAssembly,
    terms: &ExpansionTerms,
    alpha: f64,
    ell: f64,
    detuning: f64,
    with_singular: bool,
) -> Result<f64> {
    let p = SymbolParams::below_threshold(alpha, detuning)?;
    let qb = asm.qb(&p, ell, &Robin::neumann())?;
    let mut e = qb - asm.q0() / ell - &terms.b1 * (ell * log(ell)) - &terms.b0 * ell;
    if with_singular {
        let a3 = alpha * alpha * alpha;
        e += &terms.ff * (ell * PI * PI / (a3 * sqrt(detuning)));
    }
    Ok(spectral_norm(&e))
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(fabs(*v)))
}

/// Least-squares slope and intercept of y against x.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Exponent p of `y ≈ C x^p` by least squares on logarithms.
pub fn power_fit(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| log(*v)).collect();
    let ly: Vec<f64> = y.iter().map(|v| log(fabs(*v))).collect();
    linear_fit(&lx, &ly).0
}
