use approx::assert_abs_diff_eq;
use dtn_core::asymptotics::window_constants;
use dtn_core::assembly::LineAssembly;
use dtn_core::basis::{IntervalBasis, Robin};
use dtn_core::window::Window1D;
use nalgebra::{Cholesky, DVector};
use proptest::prelude::*;
use std::f64::consts::PI;

fn unit(n: usize) -> IntervalBasis {
    IntervalBasis::new(Window1D::interval(-1.0, 1.0).unwrap(), n).unwrap()
}

#[test]
fn interval_constants_at_degree_64() {
    let asm = LineAssembly::new(unit(64)).unwrap();
    let c = window_constants(&asm, &Robin::neumann()).unwrap();
    assert_abs_diff_eq!(c.tau0, PI / 2.0, epsilon = 1e-8);
    assert_abs_diff_eq!(c.tau1, 4.0 / 3.0, epsilon = 1e-8);
    assert_abs_diff_eq!(c.tau0 * c.tau0 / c.measure, PI * PI / 8.0, epsilon = 1e-8);
    assert_abs_diff_eq!(c.kln, PI * PI / 16.0 * (-1.0 - 16f64.ln()), epsilon = 1e-8);
    assert_abs_diff_eq!(c.mx, 0.0, epsilon = 1e-8);
}

#[test]
fn pct_form_matches_load() {
    let b = unit(8);
    let q0 = b.q0();
    let f = DVector::from_vec(b.load_vector());
    let c = Cholesky::new(q0).unwrap().solve(&f);
    let v = c.dot(&(b.pct() * &c));
    assert_abs_diff_eq!(v, PI * PI / 8.0, epsilon = 1e-12);
}

#[test]
fn inverse_image_is_half_disk() {
    let b = unit(64);
    let f = DVector::from_vec(b.load_vector());
    let c = Cholesky::new(b.q0()).unwrap().solve(&f);
    let coef: Vec<f64> = c.iter().copied().collect();
    let mut worst = 0.0f64;
    for i in 0..101 {
        let x = -1.0 + 2.0 * i as f64 / 100.0;
        let u = b.eval_combination(&coef, x);
        worst = worst.max((u - (1.0 - x * x).max(0.0).sqrt()).abs());
    }
    assert!(worst <= 1e-8, "max error {worst}");
}

#[test]
fn fixed_forms_are_symmetric_and_positive() {
    let w = Window1D::new(vec![(-1.0, -0.3), (0.2, 1.0)]).unwrap();
    let b = IntervalBasis::new(w, 10).unwrap();
    for m in [b.q0(), b.gram()] {
        assert_abs_diff_eq!((&m - m.transpose()).amax(), 0.0, epsilon = 1e-12);
        assert!(Cholesky::new(m).is_some());
    }
    let k = b.kln();
    assert_abs_diff_eq!((&k - k.transpose()).amax(), 0.0, epsilon = 1e-10);
}

#[test]
fn constant_robin_is_scaled_gram() {
    let b = unit(12);
    let r = b.robin(&Robin::constant(2.5), 0.3);
    assert_abs_diff_eq!((r - b.gram() * 2.5).amax(), 0.0, epsilon = 1e-13);
}

#[test]
fn dilation_scales_tau_constants() {
    let s = 1.7;
    let base = LineAssembly::new(IntervalBasis::new(Window1D::interval(-0.4, 1.0).unwrap(), 24).unwrap()).unwrap();
    let wide = LineAssembly::new(IntervalBasis::new(Window1D::interval(-0.4 * s, s).unwrap(), 24).unwrap()).unwrap();
    let a = window_constants(&base, &Robin::neumann()).unwrap();
    let b = window_constants(&wide, &Robin::neumann()).unwrap();
    assert_abs_diff_eq!(b.tau0 / a.tau0, s * s, epsilon = 1e-10);
    assert_abs_diff_eq!(b.tau1 / a.tau1, s * s * s, epsilon = 1e-10);
}

#[test]
fn two_component_tau0_exceeds_each_part() {
    let w = Window1D::new(vec![(-1.0, -0.2), (0.2, 1.0)]).unwrap();
    let asm = LineAssembly::new(IntervalBasis::new(w, 16).unwrap()).unwrap();
    let c = window_constants(&asm, &Robin::neumann()).unwrap();
    // a single component of length 0.8 has τ₀ = π·0.4²/2
    let single = PI * 0.16 / 2.0;
    assert!(c.tau0 > 2.0 * single && c.tau0 < PI / 2.0, "{}", c.tau0);
}

proptest! {
    #[test]
    fn window_measure_is_homogeneous(a in -3.0f64..0.0, len in 0.1f64..2.0, gap in 0.05f64..1.0, len2 in 0.1f64..2.0, s in 0.01f64..10.0) {
        let w = Window1D::new(vec![(a, a + len), (a + len + gap, a + len + gap + len2)]).unwrap();
        let d = w.dilate(s);
        prop_assert!((d.measure() - s * w.measure()).abs() <= 1e-12 * s * w.measure());
        prop_assert!(d.contains(s * (a + 0.5 * len)));
        prop_assert!(!d.contains(s * (a + len + 0.5 * gap)));
    }
}
