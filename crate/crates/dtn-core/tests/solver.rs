use approx::assert_relative_eq;
use dtn_core::assembly::LineAssembly;
use dtn_core::basis::{IntervalBasis, Robin};
use dtn_core::solver::{CoupledProblem, SolverOptions, StripProblem};
use dtn_core::window::Window1D;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn asm() -> &'static LineAssembly {
    static A: OnceLock<LineAssembly> = OnceLock::new();
    A.get_or_init(|| LineAssembly::new(IntervalBasis::new(Window1D::interval(-1.0, 1.0).unwrap(), 16).unwrap()).unwrap())
}

fn strip(b: Robin) -> StripProblem {
    StripProblem::new(PI, b, asm().clone()).unwrap()
}

#[test]
fn single_negative_mu_above_the_eigenvalue() {
    let p = strip(Robin::neumann());
    let mu = p.mu_eigenvalues(0.1, 1e-6, 2).unwrap();
    assert!(mu[0] < 0.0 && mu[1] > 0.0, "{mu:?}");
}

#[test]
fn mu1_decreases_in_omega() {
    let p = strip(Robin::neumann());
    let mut last = f64::INFINITY;
    for d in [1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5] {
        let mu = p.mu_eigenvalues(0.1, d, 1).unwrap()[0];
        assert!(mu < last);
        last = mu;
    }
}

#[test]
fn root_satisfies_birman_schwinger() {
    let p = strip(Robin::neumann());
    let r = p.solve(0.1, &SolverOptions::default()).unwrap();
    assert!(r.mu1.abs() < 1e-8 && r.mu2 > 0.0);
    assert!(p.birman_schwinger_residual(0.1, r.gap).unwrap().abs() < 1e-9);
    assert_relative_eq!(r.omega_star, 1.0 - r.gap, epsilon = 1e-15);
    assert_relative_eq!((r.gap.sqrt() / 0.01), 0.5, max_relative = 0.01);
}

#[test]
fn positive_robin_shrinks_the_gap() {
    let n = strip(Robin::neumann()).solve(0.1, &SolverOptions::default()).unwrap();
    let r = strip(Robin::constant(1.0)).solve(0.1, &SolverOptions::default()).unwrap();
    let m = strip(Robin::constant(-1.0)).solve(0.1, &SolverOptions::default()).unwrap();
    assert!(r.gap < n.gap && n.gap < m.gap);
}

#[test]
fn rejects_bad_scale() {
    assert!(strip(Robin::neumann()).solve(0.0, &SolverOptions::default()).is_err());
    assert!(strip(Robin::neumann()).solve(f64::NAN, &SolverOptions::default()).is_err());
}

#[test]
fn coupled_is_symmetric_in_the_widths() {
    let a = CoupledProblem::new(PI, PI / 2.0, asm().clone()).unwrap().solve(0.1, &SolverOptions::default()).unwrap();
    let b = CoupledProblem::new(PI / 2.0, PI, asm().clone()).unwrap().solve(0.1, &SolverOptions::default()).unwrap();
    assert_eq!(a.omega_star, b.omega_star);
}

#[test]
fn equal_widths_reproduce_the_neumann_window() {
    let c = CoupledProblem::new(PI, PI, asm().clone()).unwrap().solve(0.1, &SolverOptions::default()).unwrap();
    let s = strip(Robin::neumann()).solve(0.1, &SolverOptions::default()).unwrap();
    assert!((c.omega_star - s.omega_star).abs() <= 1e-10, "{} {}", c.omega_star, s.omega_star);
}

#[test]
fn coupled_gap_is_smaller_than_single() {
    let c = CoupledProblem::new(PI, PI / 2.0, asm().clone()).unwrap().solve(0.1, &SolverOptions::default()).unwrap();
    let s = strip(Robin::neumann()).solve(0.1, &SolverOptions::default()).unwrap();
    assert!(c.gap < s.gap);
    assert_relative_eq!(c.gap.sqrt() / 0.01, 0.25, max_relative = 0.03);
}
