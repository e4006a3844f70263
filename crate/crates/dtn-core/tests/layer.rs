use approx::assert_abs_diff_eq;
use dtn_core::asymptotics::predict_3d;
use dtn_core::basis::Robin;
use dtn_core::disk::{DiskBasis, LayerAssembly, LayerProblem};
use dtn_core::fd::{oracle_eigenvalue, OracleGeometry, OracleOptions};
use dtn_core::solver::SolverOptions;
use dtn_core::window::{Window1D, Window2D};
use std::f64::consts::PI;
use std::sync::OnceLock;

fn problem() -> &'static LayerProblem {
    static P: OnceLock<LayerProblem> = OnceLock::new();
    P.get_or_init(|| {
        let b = DiskBasis::new(Window2D::disk(1.0).unwrap(), 12, 3).unwrap();
        LayerProblem::new(PI, Robin::neumann(), LayerAssembly::new(b).unwrap()).unwrap()
    })
}

#[test]
fn disk_constants() {
    let b = DiskBasis::new(Window2D::disk(1.0).unwrap(), 8, 2).unwrap();
    assert_abs_diff_eq!(problem().tau0(), 4.0 / 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(b.k_inv_r(0)[(0, 0)], 4.0 * PI.powi(3) / 15.0, epsilon = 1e-10);
    let q = b.q0(1);
    assert_abs_diff_eq!((&q - nalgebra::DMatrix::from_diagonal(&q.diagonal())).amax(), 0.0);
    assert!(nalgebra::Cholesky::new(b.k_inv_r(0)).is_some());
}

#[test]
fn disk_tau0_scales_cubically() {
    let b = DiskBasis::new(Window2D::disk(2.0).unwrap(), 4, 1).unwrap();
    let f = b.load_vector(0);
    let t: f64 = f[0] * f[0] / b.q0(0)[(0, 0)];
    assert_abs_diff_eq!(t, 8.0 * 4.0 / 3.0, epsilon = 1e-10);
}

#[test]
fn annulus_is_rejected() {
    assert!(DiskBasis::new(Window2D::annulus(0.5, 1.0).unwrap(), 4, 1).is_err());
}

#[test]
fn only_the_radial_block_goes_negative() {
    let p = problem();
    let r = p.solve(0.5, &SolverOptions::default()).unwrap();
    let ln_d = r.ln_gap - 1.0;
    assert!(p.block_mu(0, 0.5, ln_d, 1).unwrap()[0] < 0.0);
    for m in 1..3 {
        assert!(p.block_mu(m, 0.5, ln_d, 1).unwrap()[0] > 0.0);
    }
    assert!(r.mu2 > 0.0);
}

#[test]
fn slope_approaches_the_log_law() {
    let p = problem();
    let law = predict_3d(p.tau0(), 0.0, 0.0, PI);
    let mut last = 0.0;
    for ell in [0.2, 0.15, 0.1] {
        let r = p.solve(ell, &SolverOptions::default()).unwrap();
        let v = -ell.powi(3) * r.ln_gap;
        assert!(v > last);
        last = v;
    }
    assert!((last / law.limit() - 1.0).abs() < 0.01, "{last} vs {}", law.limit());
}

#[test]
fn layer_matches_the_axisymmetric_oracle() {
    let ell = 1.5;
    let r = problem().solve(ell, &SolverOptions::default()).unwrap();
    let opts = OracleOptions { h: 1.0 / 32.0, refinements: 2, check_truncation: false, ..Default::default() };
    let w = Window1D::interval(-1.0, 1.0).unwrap();
    let o = oracle_eigenvalue(&OracleGeometry::Layer { alpha: PI, radius: 1.0 }, &w, ell, &Robin::neumann(), &opts).unwrap();
    assert!((o.gap.ln() - r.ln_gap).abs() < 5e-3, "{} vs {}", o.gap.ln(), r.ln_gap);
}
