use dtn_core::special::EULER_GAMMA;
use dtn_core::symbol::*;
use dtn_core::Error;
use num_complex::Complex64;
use std::f64::consts::PI;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn closed_form_values() {
    let p = SymbolParams::new(1.0, 0.0).unwrap();
    assert!((symbol_m(&p, c(0.0)).unwrap().re - 1.0).abs() < 1e-15);
    let p = SymbolParams::new(1.0, -1.0).unwrap();
    let coth1 = 1.0 / 1f64.tanh();
    assert!((symbol_m(&p, c(0.0)).unwrap().re - coth1).abs() < 1e-14);
    assert!((symbol_m_real(&p, 0.0).unwrap() - 1.313_035_285_499_331_3).abs() < 1e-14);
}

#[test]
fn series_with_tail_matches_closed_form() {
    let p = SymbolParams::new(2.0, 0.3).unwrap();
    let xi = 1.7;
    let k = 1_000_000;
    let w = xi * xi - 0.3;
    let s = symbol_series(&p, c(xi), k).re;
    // Σ_{j>K} 2αw/(j²π²) ≈ 2αw/(π²(K+1/2))
    let tail = 2.0 * 2.0 * w / (PI * PI * (k as f64 + 0.5));
    let m = symbol_m_real(&p, xi).unwrap();
    assert!((s + tail - m).abs() < 1e-10, "{} {}", s + tail, m);
}

#[test]
fn series_trivial_and_coarse() {
    let p = SymbolParams::new(1.0, 0.0).unwrap();
    assert_eq!(symbol_series(&p, c(0.0), 17).re, 1.0);
    let p = SymbolParams::new(1.0, -1.0).unwrap();
    let v = symbol_series(&p, c(0.0), 10_000).re;
    assert!((v - 1.0 / 1f64.tanh()).abs() < 1e-4);
}

#[test]
fn series_richardson_matches_to_1e10() {
    let p = SymbolParams::new(PI, 0.5).unwrap();
    for xi in [c(2.0), Complex64::new(0.3, 0.4)] {
        let k = 20_000;
        let s1 = symbol_series(&p, xi, k);
        let s2 = symbol_series(&p, xi, 2 * k);
        let s4 = symbol_series(&p, xi, 4 * k);
        // tail ~ a/K + b/K²
        let r1 = s2 * 2.0 - s1;
        let r2 = s4 * 2.0 - s2;
        let r = (r2 * 4.0 - r1) / 3.0;
        let m = symbol_m(&p, xi).unwrap();
        assert!((r - m).norm() < 1e-10, "{r} {m}");
    }
}

#[test]
fn residues_and_poles() {
    let p = SymbolParams::new(PI, 0.0).unwrap();
    let (loc, res) = first_pole_and_residue(&p).unwrap();
    assert!((loc - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    assert!((res - Complex64::new(0.0, 1.0 / PI)).norm() < 1e-15);

    let p = SymbolParams::new(1.0, PI * PI - 1.0).unwrap();
    let (loc, res) = first_pole_and_residue(&p).unwrap();
    assert!((loc - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    assert!((res - Complex64::new(0.0, PI * PI)).norm() < 1e-10);

    let p = SymbolParams::new(2.0, 1.0).unwrap();
    let (loc, res) = first_pole_and_residue(&p).unwrap();
    let r = 0.05;
    let n = 256;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let t = 2.0 * PI * j as f64 / n as f64;
        let e = Complex64::from_polar(1.0, t);
        acc += symbol_m(&p, loc + e * r).unwrap() * e * r;
    }
    acc *= Complex64::new(0.0, 2.0 * PI / n as f64);
    let numeric = acc / Complex64::new(0.0, 2.0 * PI);
    assert!((numeric - res).norm() < 1e-8, "{numeric} {res}");

    let above = SymbolParams::new(1.0, 20.0).unwrap();
    assert!(matches!(first_pole_and_residue(&above), Err(Error::AboveThreshold { .. })));
}

#[test]
fn evaluation_at_pole_is_an_error() {
    let p = SymbolParams::below_threshold(PI, 0.25).unwrap();
    let e = symbol_m(&p, Complex64::new(0.0, 0.5));
    assert!(matches!(e, Err(Error::NearPole { .. })), "{e:?}");
    // ω above threshold puts a pole on the real axis
    let p = SymbolParams::below_threshold(PI, 0.0).unwrap();
    assert!(matches!(symbol_m_real(&p, 0.0), Err(Error::NearPole { .. })));
}

#[test]
fn split_reconstruction() {
    let p = SymbolParams::new(PI, 0.9).unwrap();
    let cut = CutRadius::new(1.0).unwrap();
    for i in 0..=4000 {
        let xi = -50.0 + i as f64 * 0.025;
        let s = symbol_split(&p, cut, xi).unwrap();
        let m = symbol_m_real(&p, xi).unwrap();
        let inner = if xi.abs() <= 1.0 { m } else { 0.0 };
        let rebuilt = inner + xi.abs() + s.m1 + s.m2 + s.m3;
        assert!((rebuilt - m).abs() < 1e-12 * m.abs().max(1.0), "xi={xi}");
        if xi.abs() <= 1.0 {
            assert_eq!((s.m2, s.m3, s.m1), (0.0, 0.0, -xi.abs()));
        }
    }
    let s = symbol_split(&p, cut, 10.0).unwrap();
    assert!((s.m2 + 0.045).abs() < 2e-4);
    assert!(s.m3 < 1e-20);
}

#[test]
fn branch_monotonicity_evenness_asymptote() {
    let a = 1.7;
    let k2 = threshold(a);
    for i in 0..200 {
        let xi = i as f64 * 0.05;
        let lo = SymbolParams::new(a, 0.3 * k2).unwrap();
        let hi = SymbolParams::new(a, 0.9 * k2).unwrap();
        let ml = symbol_m(&lo, c(xi)).unwrap();
        let mh = symbol_m(&hi, c(xi)).unwrap();
        assert!(ml.im.abs() < 1e-13 && mh.im.abs() < 1e-13);
        assert!(ml.re > mh.re);
        if xi * xi > lo.omega {
            assert!(ml.re >= 1.0 / a - 1e-14);
        }
        assert_eq!(symbol_m_real(&lo, xi).unwrap(), symbol_m_real(&lo, -xi).unwrap());
    }
    let p = SymbolParams::new(a, 2.0).unwrap();
    for xi in [10.0f64, 20.0, 40.0, 80.0] {
        let r = symbol_remainder(&p, xi).unwrap() + p.omega / (2.0 * xi);
        assert!(r.abs() * xi.powi(3) < 1.0, "{xi} {r}");
    }
}

#[test]
fn rho_constant_certificates() {
    let a = 4.0;
    let cut = CutRadius::new(1.0).unwrap();
    let cs = ContourSpec::for_alpha(a);
    let r = rho_constants(a, cs, cut).unwrap();
    assert!(r.rho01_self_consistency < 1e-10);
    assert!(r.rho03_self_consistency < 1e-9);
    assert!(r.rho02_tail_bound < 1e-15);
    let k = PI / a;
    for beta in [1.1 * k, 1.3 * k, 1.7 * k] {
        let other = rho_constants(a, ContourSpec { beta, nodes: 32 }, cut).unwrap();
        assert!((other.rho01 - r.rho01).abs() < 1e-9);
    }
    // ρ02 vanishes as α → ∞
    let mut prev = f64::INFINITY;
    for a in [10.0, 100.0, 1e4] {
        let (v, _) = rho02(a, cut).unwrap();
        let k2 = threshold(a);
        assert!(v.abs() < prev && (v + k2 * k2 / 16.0).abs() < k2.powi(3));
        prev = v.abs();
    }
    assert!(prev < 1e-14);
    assert!(r.rho0_printed.is_some());
}

#[test]
fn rho0_independent_of_cut() {
    for a in [PI * 1.2, 4.0, 2.0] {
        let cs = ContourSpec::for_alpha(a);
        let base = rho_constants(a, cs, CutRadius::for_alpha(a)).unwrap();
        for xc in [1.6 * PI / a, 2.3 * PI / a, 3.0] {
            if xc * xc <= threshold(a) {
                continue;
            }
            let r = rho_constants(a, cs, CutRadius::new(xc).unwrap()).unwrap();
            assert!((r.rho0 - base.rho0).abs() < 1e-9, "a={a} xc={xc} {} {}", r.rho0, base.rho0);
        }
    }
}

/// ρ₀ − γ₀π²/α² is the limit of lim_X[∫_{−X}^{X}(m_ω − |ξ|)dξ + ω ln X] + 2π³/(α³s) as s → 0.
#[test]
fn rho0_matches_regularized_real_line_limit() {
    let gl = dtn_core::quad::GaussLegendre::new(20);
    for a in [PI, 4.0, 2.5] {
        let s = 1e-4;
        let p = SymbolParams::below_threshold(a, s * s).unwrap();
        let mut acc = 0.0;
        let mut lo: f64 = 0.0;
        let mut w: f64 = 1e-3;
        let top = 2e4;
        while lo < top {
            let mut hi = (lo + w).min(top);
            if lo < 1.0 && hi > 1.0 {
                hi = 1.0;
            }
            acc += gl.integrate(lo, hi, |x| {
                let r = regular_remainder(&p, x).unwrap();
                if x > 1.0 {
                    r + p.omega / (2.0 * x)
                } else {
                    r
                }
            });
            lo = hi;
            w = (w * 1.3).min(0.25 * lo.max(1e-3));
        }
        // beyond the cut-off r + ω/(2ξ) − peak ≈ 2π²/(α³ξ²) − ω²/(8ξ³)
        acc += 2.0 * threshold(a) / (a * top) - p.omega * p.omega / (16.0 * top * top);
        let limit = 2.0 * acc;
        let r = rho_constants(a, ContourSpec::for_alpha(a), CutRadius::for_alpha(a)).unwrap();
        let target = r.rho0 - EULER_GAMMA * threshold(a);
        assert!((limit - target).abs() < 1e-7, "a={a} {limit} {target}");
    }
}
