//! Threshold root-finding on the smallest eigenvalue of the Robin form pencil.

use crate::assembly::LineAssembly;
use crate::basis::Robin;
use crate::error::{Error, Result};
use crate::symbol::{threshold, SymbolParams};
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{fabs, sqrt};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

/// Lowest eigenvalues of `Q c = μ G c` with G positive definite.
#[derive(Debug, Clone)]
pub struct Pencil {
    chol: Cholesky<f64, Dyn>,
}

impl Pencil {
    pub fn new(gram: &DMatrix<f64>) -> Result<Self> {
        let chol = Cholesky::new(gram.clone()).ok_or(Error::NotPositiveDefinite)?;
        Ok(Self { chol })
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self, q: &DMatrix<f64>) -> Vec<f64> {
        let l = self.chol.l();
        let mut a = q.clone();
        l.solve_lower_triangular_mut(&mut a);
        let mut at = a.transpose();
        l.solve_lower_triangular_mut(&mut at);
        let sym = (&at + at.transpose()) * 0.5;
        let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        ev.sort_by(|x, y| x.total_cmp(y));
        ev
    }

    pub fn lowest(&self, q: &DMatrix<f64>, k: usize) -> Vec<f64> {
        let mut ev = self.eigenvalues(q);
        ev.truncate(k);
        ev
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverOptions {
    /// relative tolerance on the root variable
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-13, max_iter: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EigenResult {
    pub omega_star: f64,
    /// threshold − ω*
    pub gap: f64,
    /// ln(threshold − ω*), finite even when the gap underflows
    pub ln_gap: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub iterations: usize,
    /// (ω, μ₁) pairs visited; the layer solver stores ln(gap) in place of ω
    pub trace: Vec<(f64, f64)>,
    pub n_basis: usize,
}

/// Sign change bracket of an increasing function, expanding from `guess`.
fn bracket<F: FnMut(f64) -> Result<f64>>(
    f: &mut F,
    guess: f64,
    lo_min: f64,
    hi_max: f64,
    trace: &mut Vec<(f64, f64)>,
) -> Result<((f64, f64), (f64, f64))> {
    let mut lo = guess;
    let mut flo = f(lo)?;
    trace.push((lo, flo));
    let mut hi = guess;
    let mut fhi = flo;
    let mut halvings = 0;
    while flo >= 0.0 {
        hi = lo;
        fhi = flo;
        lo *= 0.5;
        halvings += 1;
        if lo < lo_min || halvings > 60 {
            return Err(Error::NoBoundState("root variable bracket collapsed without a sign change".into()));
        }
        flo = f(lo)?;
        trace.push((lo, flo));
    }
    if fhi <= 0.0 {
        hi = lo;
        loop {
            hi *= 2.0;
            if hi > hi_max {
                return Err(Error::NoBoundState("smallest eigenvalue stays negative across the window".into()));
            }
            fhi = f(hi)?;
            trace.push((hi, fhi));
            if fhi > 0.0 {
                break;
            }
            lo = hi;
            flo = fhi;
        }
    }
    Ok(((lo, flo), (hi, fhi)))
}

/// Brent's method on a bracketed sign change.
fn brent<F: FnMut(f64) -> Result<f64>>(
    f: &mut F,
    a0: (f64, f64),
    b0: (f64, f64),
    opts: &SolverOptions,
    trace: &mut Vec<(f64, f64)>,
) -> Result<(f64, usize)> {
    let (mut a, mut fa) = a0;
    let (mut b, mut fb) = b0;
    if fabs(fa) < fabs(fb) {
        core::mem::swap(&mut a, &mut b);
        core::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut mflag = true;
    for it in 0..opts.max_iter {
        if fb == 0.0 {
            return Ok((b, it));
        }
        let tol = opts.rel_tol * fabs(b) + 1e-300;
        if fabs(b - a) <= 2.0 * tol {
            return Ok((b, it));
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let q = (3.0 * a + b) / 4.0;
        let out_of_range = !((s > q.min(b)) && (s < q.max(b)));
        if out_of_range
            || (mflag && fabs(s - b) >= fabs(b - c) / 2.0)
            || (!mflag && fabs(s - b) >= fabs(c - d) / 2.0)
            || (mflag && fabs(b - c) < tol)
            || (!mflag && fabs(c - d) < tol)
        {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        let fs = f(s)?;
        trace.push((s, fs));
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fabs(fa) < fabs(fb) {
            core::mem::swap(&mut a, &mut b);
            core::mem::swap(&mut fa, &mut fb);
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, residual: fb })
}

/// `τ₀ = fᵀ Q₀⁻¹ f`.
pub fn tau0(q0: &DMatrix<f64>, load: &[f64]) -> Result<f64> {
    let chol = Cholesky::new(q0.clone()).ok_or(Error::NotPositiveDefinite)?;
    let f = DVector::from_column_slice(load);
    Ok(f.dot(&chol.solve(&f)))
}

/// Neumann or Robin window on a single strip of width α.
#[derive(Debug, Clone)]
pub struct StripProblem {
    pub alpha: f64,
    pub robin: Robin,
    pub assembly: LineAssembly,
    pencil: Pencil,
}

impl StripProblem {
    pub fn new(alpha: f64, robin: Robin, assembly: LineAssembly) -> Result<Self> {
        let pencil = Pencil::new(assembly.gram())?;
        Ok(Self { alpha, robin, assembly, pencil })
    }

    pub fn threshold(&self) -> f64 {
        threshold(self.alpha)
    }

    pub fn params(&self, detuning: f64) -> Result<SymbolParams> {
        SymbolParams::below_threshold(self.alpha, detuning)
    }

    pub fn qb(&self, ell: f64, detuning: f64) -> Result<DMatrix<f64>> {
        self.assembly.qb(&self.params(detuning)?, ell, &self.robin)
    }

    /// k smallest μ at ω = threshold − `detuning`.
    pub fn mu_eigenvalues(&self, ell: f64, detuning: f64, k: usize) -> Result<Vec<f64>> {
        Ok(self.pencil.lowest(&self.qb(ell, detuning)?, k))
    }

    /// Leading-order guess `√gap ≈ (π²/α³) τ₀ ℓ²`.
    pub fn leading_guess(&self, ell: f64) -> Result<f64> {
        let t = tau0(self.assembly.q0(), self.assembly.load())?;
        Ok(PI * PI / (self.alpha * self.alpha * self.alpha) * t * ell * ell)
    }

    pub fn solve(&self, ell: f64, opts: &SolverOptions) -> Result<EigenResult> {
        check_ell(ell)?;
        let guess = self.leading_guess(ell)?;
        let hi_max = 100.0 * (sqrt(self.threshold()) + 1.0);
        solve_in_s(self.pencil.clone(), |s| self.qb(ell, s * s), guess, hi_max, self.threshold(), self.assembly.len(), opts)
    }

    /// `ℓ²(π²/α³)/s · fᵀ(Q₀+ℓR)⁻¹f − 1` with `ℓR` read off the assembled matrix.
    pub fn birman_schwinger_residual(&self, ell: f64, detuning: f64) -> Result<f64> {
        let p = self.params(detuning)?;
        p.require_below_threshold()?;
        let s = sqrt(detuning);
        let a3 = self.alpha * self.alpha * self.alpha;
        let c = ell * ell * PI * PI / (a3 * s);
        let f = DVector::from_column_slice(self.assembly.load());
        let lq = self.qb(ell, detuning)? * ell;
        // ℓR = ℓQb − Q₀ + c·ffᵀ, so Q₀ + ℓR = ℓQb + c·ffᵀ
        let m = lq + &f * f.transpose() * c;
        let lu = m.lu();
        let x = lu.solve(&f).ok_or(Error::NotPositiveDefinite)?;
        Ok(c * f.dot(&x) - 1.0)
    }
}

fn check_ell(ell: f64) -> Result<()> {
    if ell > 0.0 && ell.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput("scale must be positive".into()))
    }
}

fn solve_in_s<Q: Fn(f64) -> Result<DMatrix<f64>>>(
    pencil: Pencil,
    qmat: Q,
    guess: f64,
    hi_max: f64,
    thr: f64,
    n: usize,
    opts: &SolverOptions,
) -> Result<EigenResult> {
    if !(guess > 1e-140) {
        return Err(Error::InvalidInput("scale too small: the gap is below double precision range".into()));
    }
    let mut trace = Vec::new();
    let mut f = |s: f64| -> Result<f64> { Ok(pencil.lowest(&qmat(s)?, 1)[0]) };
    let (lo, hi) = bracket(&mut f, guess, 1e-150, hi_max, &mut trace)?;
    let (s, iters) = brent(&mut f, lo, hi, opts, &mut trace)?;
    let ev = pencil.lowest(&qmat(s)?, 2);
    let (mu1, mu2) = (ev[0], *ev.get(1).unwrap_or(&f64::INFINITY));
    if !(mu2 > 0.0) {
        return Err(Error::Degenerate { mu2 });
    }
    let gap = s * s;
    Ok(EigenResult {
        omega_star: thr - gap,
        gap,
        ln_gap: 2.0 * libm::log(s),
        mu1,
        mu2,
        iterations: iters + trace.len(),
        trace: trace.iter().map(|&(s, m)| (thr - s * s, m)).collect(),
        n_basis: n,
    })
}

/// Two strips of widths α₊ ≥ α₋ exchanging through a window in the shared wall.
#[derive(Debug, Clone)]
pub struct CoupledProblem {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub assembly: LineAssembly,
    pencil: Pencil,
}

impl CoupledProblem {
    /// Widths are reordered so that the wider strip sets the threshold.
    pub fn new(a1: f64, a2: f64, assembly: LineAssembly) -> Result<Self> {
        if !(a1 > 0.0 && a2 > 0.0) {
            return Err(Error::InvalidInput("strip widths must be positive".into()));
        }
        let (ap, am) = if a1 >= a2 { (a1, a2) } else { (a2, a1) };
        let pencil = Pencil::new(assembly.gram())?;
        Ok(Self { alpha_plus: ap, alpha_minus: am, assembly, pencil })
    }

    pub fn threshold(&self) -> f64 {
        threshold(self.alpha_plus)
    }

    /// `Q⁺ + Q⁻` at ω = π²/α₊² − `detuning`.
    pub fn q(&self, ell: f64, detuning: f64) -> Result<DMatrix<f64>> {
        let pp = SymbolParams::below_threshold(self.alpha_plus, detuning)?;
        let dm = (threshold(self.alpha_minus) - self.threshold()) + detuning;
        let pm = SymbolParams::below_threshold(self.alpha_minus, dm)?;
        let none = Robin::neumann();
        Ok(self.assembly.qb(&pp, ell, &none)? + self.assembly.qb(&pm, ell, &none)?)
    }

    pub fn mu_eigenvalues(&self, ell: f64, detuning: f64, k: usize) -> Result<Vec<f64>> {
        Ok(self.pencil.lowest(&self.q(ell, detuning)?, k))
    }

    pub fn solve(&self, ell: f64, opts: &SolverOptions) -> Result<EigenResult> {
        check_ell(ell)?;
        let t = tau0(self.assembly.q0(), self.assembly.load())?;
        let a3 = self.alpha_plus * self.alpha_plus * self.alpha_plus;
        let guess = 0.5 * PI * PI / a3 * t * ell * ell;
        let hi_max = 100.0 * (sqrt(self.threshold()) + 1.0);
        solve_in_s(self.pencil.clone(), |s| self.q(ell, s * s), guess, hi_max, self.threshold(), self.assembly.len(), opts)
    }
}

/// Generic root in u = −1/ln(gap) for problems whose gap is exponentially small.
pub(crate) fn solve_in_u<Q: Fn(f64) -> Result<DMatrix<f64>>>(
    pencil: &Pencil,
    qmat_ln: Q,
    guess_ln: f64,
    thr: f64,
    n: usize,
    opts: &SolverOptions,
) -> Result<EigenResult> {
    let mut trace = Vec::new();
    let mut f = |u: f64| -> Result<f64> { Ok(pencil.lowest(&qmat_ln(-1.0 / u)?, 1)[0]) };
    let u0 = -1.0 / guess_ln.min(-1e-3);
    let (lo, hi) = bracket(&mut f, u0, 1e-12, 1e6, &mut trace)?;
    let (u, iters) = brent(&mut f, lo, hi, opts, &mut trace)?;
    let ln_gap = -1.0 / u;
    let ev = pencil.lowest(&qmat_ln(ln_gap)?, 2);
    let (mu1, mu2) = (ev[0], *ev.get(1).unwrap_or(&f64::INFINITY));
    if !(mu2 > 0.0) {
        return Err(Error::Degenerate { mu2 });
    }
    let gap = libm::exp(ln_gap);
    Ok(EigenResult {
        omega_star: thr - gap,
        gap,
        ln_gap,
        mu1,
        mu2,
        iterations: iters + trace.len(),
        trace: trace.iter().map(|&(u, m)| (-1.0 / u, m)).collect(),
        n_basis: n,
    })
}
