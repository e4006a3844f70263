use approx::assert_abs_diff_eq;
use dtn_core::asymptotics::{expansion_residual, expansion_terms, power_fit, spectral_norm};
use dtn_core::assembly::LineAssembly;
use dtn_core::basis::{IntervalBasis, Robin};
use dtn_core::symbol::{rho_constants, ContourSpec, CutRadius, SymbolParams};
use dtn_core::window::Window1D;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn asm() -> &'static LineAssembly {
    static A: OnceLock<LineAssembly> = OnceLock::new();
    A.get_or_init(|| LineAssembly::new(IntervalBasis::new(Window1D::interval(-1.0, 1.0).unwrap(), 16).unwrap()).unwrap())
}

#[test]
fn qb_is_symmetric() {
    let p = SymbolParams::below_threshold(PI, 1e-3).unwrap();
    let q = asm().qb(&p, 0.1, &Robin::constant(1.0)).unwrap();
    assert!((&q - q.transpose()).amax() <= 1e-12 * q.amax());
}

#[test]
fn robin_term_is_additive() {
    let p = SymbolParams::below_threshold(PI, 0.3).unwrap();
    let a = asm().qb(&p, 0.2, &Robin::neumann()).unwrap();
    let b = asm().qb(&p, 0.2, &Robin::constant(3.0)).unwrap();
    assert_abs_diff_eq!((b - a - asm().gram() * 3.0).amax(), 0.0, epsilon = 1e-11);
}

#[test]
fn rejects_omega_above_threshold() {
    let p = SymbolParams::new(PI, 1.5).unwrap();
    assert!(asm().qb(&p, 0.1, &Robin::neumann()).is_err());
}

#[test]
fn deep_omega_approaches_scaled_gram() {
    // m_ω(ξ) → √|ω| uniformly on the window scale when ℓ√|ω| ≫ 1
    let om = -1e6;
    let p = SymbolParams::new(PI, om).unwrap();
    let ell = 1.0;
    let q = asm().qb(&p, ell, &Robin::neumann()).unwrap();
    let g = asm().gram() * (-om).sqrt();
    let rel = spectral_norm(&(&q - &g)) / spectral_norm(&g);
    assert!(rel < 0.05, "relative deviation {rel}");
}

#[test]
fn smaller_omega_raises_the_form() {
    let a = asm().qb(&SymbolParams::new(PI, -5.0).unwrap(), 0.1, &Robin::neumann()).unwrap();
    let b = asm().qb(&SymbolParams::new(PI, 0.5).unwrap(), 0.1, &Robin::neumann()).unwrap();
    let diff = a - b;
    let ev = nalgebra::SymmetricEigen::new(diff).eigenvalues;
    assert!(ev.iter().all(|v| *v > -1e-10));
}

#[test]
fn expansion_residual_has_cubic_order() {
    let rho0 = rho_constants(PI, ContourSpec::for_alpha(PI), CutRadius::for_alpha(PI)).unwrap().rho0;
    let t = expansion_terms(asm(), PI, rho0);
    let ells = [0.1, 0.05, 0.025, 0.0125];
    let r: Vec<f64> = ells.iter().map(|&l| expansion_residual(asm(), &t, PI, l, 1e-8, true).unwrap()).collect();
    let p = power_fit(&ells, &r);
    assert!(p >= 2.7, "fitted order {p}, residuals {r:?}");
    let with = expansion_residual(asm(), &t, PI, 0.05, 1e-6, true).unwrap();
    let without = expansion_residual(asm(), &t, PI, 0.05, 1e-6, false).unwrap();
    assert!(without >= 100.0 * with, "{without} vs {with}");
}
