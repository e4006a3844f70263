//! Bessel sequences, reciprocal gamma and the Bernoulli-type series used by the symbol.

use libm::{cos, fabs, floor, sin, sqrt, tgamma};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `B_{2k}` for k = 1..=13 as (numerator, denominator).
const BERNOULLI_EVEN: [(f64, f64); 13] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
];

/// Coefficients `c_k = 2^{2k} B_{2k} / (2k)!`, so that `√q·coth√q = 1 + Σ c_k q^k`.
pub fn coth_series_coefficients() -> [f64; 13] {
    let mut out = [0.0; 13];
    let mut pow4 = 1.0;
    let mut fact = 1.0;
    for (k, (num, den)) in BERNOULLI_EVEN.iter().enumerate() {
        let kk = (k + 1) as f64;
        pow4 *= 4.0;
        fact *= (2.0 * kk - 1.0) * (2.0 * kk);
        out[k] = pow4 * num / den / fact;
    }
    out
}

/// `√q·coth(√q)` for |q| ≲ 1, valid on both sides of q = 0.
pub fn sqrt_coth_series(q: f64) -> f64 {
    let c = coth_series_coefficients();
    let mut acc = 0.0;
    for ck in c.iter().rev() {
        acc = acc * q + ck;
    }
    1.0 + q * acc
}

/// `1/θ − cot θ` for |θ| ≤ 1/2 by its odd power series.
pub fn inv_minus_cot(theta: f64) -> f64 {
    let c = coth_series_coefficients();
    let t2 = theta * theta;
    let mut acc = 0.0;
    for ck in c.iter().rev() {
        acc = acc * t2 + fabs(*ck);
    }
    theta * acc
}

/// `Cat_j / 4^j` for j = 0..n, the coefficients of `2/(1+√(1−u)) = Σ a_j u^j`.
pub fn catalan_quarter(n: usize) -> alloc::vec::Vec<f64> {
    let mut out = alloc::vec::Vec::with_capacity(n);
    let mut a = 1.0;
    for j in 0..n {
        out.push(a);
        let jj = j as f64;
        a *= 2.0 * (2.0 * jj + 1.0) / (jj + 2.0) / 4.0;
    }
    out
}

/// `1/Γ(x)`, exactly zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && floor(x) == x {
        return 0.0;
    }
    1.0 / tgamma(x)
}

/// Fills `out[k] = J_k(x)` for k = 0..out.len(), x ≥ 0.
pub fn bessel_j_seq(x: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    if x == 0.0 {
        out.fill(0.0);
        out[0] = 1.0;
        return;
    }
    let nmax = n - 1;
    if x >= nmax as f64 || nmax == 0 {
        out[0] = libm::j0(x);
        if n > 1 {
            out[1] = libm::j1(x);
        }
        for k in 1..nmax {
            out[k + 1] = 2.0 * k as f64 / x * out[k] - out[k - 1];
        }
        return;
    }
    // Miller backward recurrence normalized by J0 + 2ΣJ_{2k} = 1
    let top = nmax.max(x as usize);
    let mut m = top + 20 + sqrt(40.0 * top as f64) as usize;
    if m % 2 == 1 {
        m += 1;
    }
    out.fill(0.0);
    let mut jp1 = 0.0;
    let mut j = 1e-300;
    let mut sum = 0.0;
    for k in (1..=m).rev() {
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        if k - 1 <= nmax {
            out[k - 1] = j;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            sum += 2.0 * j;
        }
        if fabs(j) > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            sum *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    sum += j;
    for v in out.iter_mut() {
        *v /= sum;
    }
}

/// Fills `out[l] = j_l(x)` (spherical Bessel) for l = 0..out.len(), x ≥ 0.
pub fn spherical_j_seq(x: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    if x < 1e-8 {
        out.fill(0.0);
        out[0] = 1.0 - x * x / 6.0;
        if n > 1 {
            out[1] = x / 3.0;
        }
        return;
    }
    let j0 = sin(x) / x;
    let j1 = sin(x) / (x * x) - cos(x) / x;
    let lmax = n - 1;
    if x >= lmax as f64 {
        out[0] = j0;
        if n > 1 {
            out[1] = j1;
        }
        for l in 1..lmax {
            out[l + 1] = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
        }
        return;
    }
    let top = lmax.max(x as usize);
    let m = top + 20 + sqrt(40.0 * top as f64) as usize;
    out.fill(0.0);
    let mut jp1 = 0.0;
    let mut j = 1e-300;
    for l in (1..=m).rev() {
        let jm1 = (2 * l + 1) as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        if l - 1 <= lmax {
            out[l - 1] = j;
        }
        if fabs(j) > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    // normalize against whichever of j0, j1 is better conditioned
    let scale = if fabs(j0) >= fabs(j1) || n == 1 {
        j0 / out[0]
    } else {
        j1 / out[1]
    };
    for v in out.iter_mut() {
        *v *= scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_matches_libm() {
        let mut buf = [0.0; 70];
        for &x in &[1e-12, 1e-3, 0.5, 3.0, 17.3, 45.0, 69.5, 120.0, 5000.0] {
            bessel_j_seq(x, &mut buf);
            for (k, v) in buf.iter().enumerate() {
                let r = libm::jn(k as i32, x);
                assert!((v - r).abs() <= 1e-13 * (1.0 + r.abs()) + 1e-300, "k={k} x={x} {v} {r}");
            }
        }
    }

    #[test]
    fn spherical_bessel_closed_forms() {
        let mut buf = [0.0; 40];
        // j_7 from sqrt(pi/2x) J_{15/2}(x) in extended precision
        let j7 = [
            1.076_068_491_011_497_4e-10,
            5.609_655_703_348_948_7e-5,
            0.137_946_585_027_485_86,
            0.001_063_858_444_934_282_2,
            0.001_392_141_673_740_900_7,
        ];
        for (&x, &quad) in [0.3, 2.0, 9.0, 38.5, 250.0].iter().zip(&j7) {
            spherical_j_seq(x, &mut buf);
            let j2 = (3.0 / (x * x) - 1.0) * sin(x) / x - 3.0 * cos(x) / (x * x);
            assert!((buf[2] - j2).abs() < 1e-13);
            assert!((buf[7] - quad).abs() < 1e-13 * quad.abs().max(1e-3), "{} {}", buf[7], quad);
        }
    }

    #[test]
    fn coth_series_matches_closed_form() {
        for &q in &[-0.5, -0.1, 1e-9, 0.2, 0.5] {
            let direct = if q > 0.0 {
                let z = sqrt(q);
                z / libm::tanh(z)
            } else {
                let t = sqrt(-q);
                t / libm::tan(t)
            };
            assert!((sqrt_coth_series(q) - direct).abs() < 1e-15);
        }
        for &t in &[0.1, 0.3, 0.5] {
            assert!((inv_minus_cot(t) - (1.0 / t - 1.0 / libm::tan(t))).abs() < 1e-14);
        }
        assert!((inv_minus_cot(1e-6) - 1e-6 / 3.0).abs() < 1e-19);
    }

    #[test]
    fn catalan_expansion() {
        let a = catalan_quarter(16);
        let u: f64 = 0.03;
        let s: f64 = a.iter().enumerate().map(|(j, c)| c * u.powi(j as i32)).sum();
        assert!((s - 2.0 / (1.0 + (1.0 - u).sqrt())).abs() < 1e-15);
    }
}
