//! Gauss–Legendre rules and composite panel layouts on the half line.

use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{cos, fabs};

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if fabs(dx) < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Integrates `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }

    /// Appends mapped nodes/weights for [a, b] to the given buffers.
    pub fn push_panel(&self, a: f64, b: f64, xs: &mut Vec<f64>, ws: &mut Vec<f64>) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            xs.push(c + h * x);
            ws.push(w * h);
        }
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A flat composite rule: nodes and weights.
#[derive(Debug, Clone, Default)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Panels on [0, 1]: dyadic down to `tiny`, then one panel [0, tiny].
    pub fn dyadic_to_one(gl: &GaussLegendre, tiny: f64, rule: &mut Self) {
        let mut b = 1.0;
        while b > tiny {
            let a = 0.5 * b;
            gl.push_panel(a, b, &mut rule.nodes, &mut rule.weights);
            b = a;
        }
        gl.push_panel(0.0, b, &mut rule.nodes, &mut rule.weights);
    }

    /// Uniform panels of width at most `width` covering [a, b].
    pub fn uniform(gl: &GaussLegendre, a: f64, b: f64, width: f64, rule: &mut Self) {
        if b <= a {
            return;
        }
        let n = libm::ceil((b - a) / width).max(1.0) as usize;
        let w = (b - a) / n as f64;
        for i in 0..n {
            let lo = a + i as f64 * w;
            gl.push_panel(lo, lo + w, &mut rule.nodes, &mut rule.weights);
        }
    }

    /// Geometrically growing panels from `a` to `b` (ratio 2, first width `first`).
    pub fn graded(gl: &GaussLegendre, a: f64, b: f64, first: f64, max_width: f64, rule: &mut Self) {
        let mut lo = a;
        let mut w = first;
        while lo < b {
            let hi = (lo + w).min(b);
            gl.push_panel(lo, hi, &mut rule.nodes, &mut rule.weights);
            lo = hi;
            w = (2.0 * w).min(max_width);
        }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(*x);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_exactness() {
        for n in [1usize, 2, 5, 16, 40, 120] {
            let gl = GaussLegendre::new(n);
            let s: f64 = gl.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}");
            let deg = 2 * n - 1;
            let v = gl.integrate(-1.0, 1.0, |x| x.powi(deg as i32 - (deg as i32 % 2)));
            let k = (deg - deg % 2) as f64;
            assert!((v - 2.0 / (k + 1.0)).abs() < 1e-13, "n={n} {v}");
        }
    }

    #[test]
    fn dyadic_rule_integrates_log() {
        let gl = GaussLegendre::new(16);
        let mut r = CompositeRule::default();
        CompositeRule::dyadic_to_one(&gl, 1e-18, &mut r);
        let v = r.integrate(|x| x.ln());
        assert!((v + 1.0).abs() < 1e-13);
    }
}
