use dtn_core::asymptotics::{compute_constants, linear_fit, predict_2d, predict_2d_full, predict_2d_printed, predict_coupled};
use dtn_core::assembly::LineAssembly;
use dtn_core::basis::{IntervalBasis, Robin};
use dtn_core::solver::{CoupledProblem, SolverOptions, StripProblem};
use dtn_core::window::Window1D;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;
use std::sync::OnceLock;

const ELLS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

fn asm() -> &'static LineAssembly {
    static A: OnceLock<LineAssembly> = OnceLock::new();
    A.get_or_init(|| LineAssembly::new(IntervalBasis::new(Window1D::interval(-1.0, 1.0).unwrap(), 32).unwrap()).unwrap())
}

fn sqrt_gaps(b: Robin) -> Vec<f64> {
    let p = StripProblem::new(PI, b, asm().clone()).unwrap();
    ELLS.iter().map(|&l| p.solve(l, &SolverOptions::default()).unwrap().gap.sqrt()).collect()
}

#[test]
fn popov_coefficient() {
    let p = StripProblem::new(PI, Robin::neumann(), asm().clone()).unwrap();
    let mut last = f64::INFINITY;
    for l in [0.2, 0.1, 0.05, 0.025] {
        let v = p.solve(l, &SolverOptions::default()).unwrap().gap.sqrt() / (l * l);
        let dev = (v / 0.5 - 1.0).abs();
        assert!(dev <= 0.5 * l * l * l.ln().abs(), "ℓ={l}: deviation {dev}");
        assert!(v < last);
        last = v;
    }
}

#[test]
fn full_prediction_tracks_the_solver() {
    let c = compute_constants(asm(), PI, &Robin::neumann()).unwrap();
    let pr = predict_2d_full(&c, PI).unwrap();
    for (l, s) in ELLS.iter().zip(sqrt_gaps(Robin::neumann())) {
        let err = (s - pr.sqrt_gap(*l)).abs() / (l * l);
        assert!(err < 3.0 * l * l * l, "ℓ={l}: {err}");
    }
}

#[test]
fn robin_cubic_term_has_the_series_sign() {
    let b = Robin::constant(1.0);
    let c = compute_constants(asm(), PI, &b).unwrap();
    let lead = predict_2d(&c, PI).c2;
    let s = sqrt_gaps(b);
    // (√gap/ℓ² − c2)/ℓ = c3 + c4l ℓ ln ℓ + c4 ℓ
    let a = DMatrix::from_fn(4, 3, |i, j| [1.0, ELLS[i] * ELLS[i].ln(), ELLS[i]][j]);
    let y = DVector::from_fn(4, |i, _| (s[i] / (ELLS[i] * ELLS[i]) - lead) / ELLS[i]);
    let x = a.svd(true, true).solve(&y, 1e-14).unwrap();
    let target = 4.0 * PI * PI / (3.0 * PI.powi(3));
    assert!(x[0] < 0.0);
    assert!((x[0].abs() / target - 1.0).abs() < 0.1, "fitted {}", x[0]);
    assert!(predict_2d_printed(&c, PI).c3 > 0.0);
}

#[test]
fn log_quartic_term() {
    let s = sqrt_gaps(Robin::neumann());
    let x: Vec<f64> = ELLS.iter().map(|l| l.ln()).collect();
    let y: Vec<f64> = ELLS.iter().zip(&s).map(|(l, v)| (v / (l * l) - 0.5) / (l * l)).collect();
    let (slope, _) = linear_fit(&x, &y);
    let target = PI.powi(5) / (8.0 * PI.powi(5));
    assert!((slope.abs() / target - 1.0).abs() < 0.15, "fitted {slope}");
}

#[test]
fn coupled_coefficient() {
    let c = compute_constants(asm(), PI, &Robin::neumann()).unwrap();
    let pr = predict_coupled(&c, PI);
    let p = CoupledProblem::new(PI, PI / 2.0, asm().clone()).unwrap();
    let l = 0.05;
    let v = p.solve(l, &SolverOptions::default()).unwrap().gap.sqrt() / (l * l);
    assert!((v / pr.c2 - 1.0).abs() < 0.05, "{v}");
    assert!((pr.c2 - 0.25).abs() < 1e-9);
}
