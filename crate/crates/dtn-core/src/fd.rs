//! Finite-volume oracle for the Laplacian on truncated strips with a window in the
//! bottom wall (or the shared wall of two strips), and its axisymmetric layer variant.
//!
//! All nodes off the window row belong to separable Dirichlet strips, so the pencil
//! `K(λ) = A − λM` is condensed onto the window nodes with the discrete sine modes in y
//! and one scalar chain per mode in x. λ₁ is the largest λ keeping the condensed matrix
//! positive definite.

use crate::basis::Robin;
use crate::error::{Error, Result};
use crate::window::Window1D;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{cos, fabs, round, sin, sqrt};
use nalgebra::{DMatrix, SymmetricEigen};

/// Transverse grid: nodes, cell measures and edge conductances (without the y factor).
#[derive(Debug, Clone)]
pub struct LineGrid {
    pub x: Vec<f64>,
    pub measure: Vec<f64>,
    /// conductance between node i and i+1
    pub cond: Vec<f64>,
    pub cond_left: f64,
    pub cond_right: f64,
    /// sorted indices of window nodes
    pub window: Vec<usize>,
}

/// Uniform spacing near the window, geometric grading to `max_h`, then uniform to the box wall.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    /// target spacing
    pub h: f64,
    /// half-length (or radius) of the box
    pub half_length: f64,
    /// width of the uniformly resolved margin around the window
    pub margin: f64,
    pub grading: f64,
    pub max_h: f64,
}

impl GridSpec {
    pub fn new(h: f64, half_length: f64, margin: f64) -> Self {
        Self { h, half_length, margin, grading: 1.08, max_h: (half_length / 400.0).max(h) }
    }

    /// Same mesh family at spacing h/f.
    pub fn refined(&self, f: f64) -> Self {
        Self {
            h: self.h / f,
            half_length: self.half_length,
            margin: self.margin,
            grading: libm::pow(self.grading, 1.0 / f),
            max_h: self.max_h / f,
        }
    }
}

/// Outward node positions starting at `start` with first spacing `h0`.
fn outward(start: f64, h0: f64, uniform_to: f64, wall: f64, spec: &GridSpec) -> Vec<f64> {
    let mut out = Vec::new();
    let mut x = start;
    let mut h = h0;
    loop {
        if x + h < uniform_to {
            x += h;
            out.push(x);
            continue;
        }
        h = (h * spec.grading).min(spec.max_h.max(h0));
        if x + 0.6 * h >= wall {
            break;
        }
        x += h;
        out.push(x);
    }
    out
}

impl LineGrid {
    /// Cartesian grid for a window on the line; the hull endpoints fall on cell edges.
    pub fn strip(window: &Window1D, spec: &GridSpec) -> Result<Self> {
        let (a, b) = window.hull();
        if spec.half_length <= b.max(-a) + spec.h {
            return Err(Error::Geometry("box must contain the window".into()));
        }
        let k = round((b - a) / spec.h).max(1.0);
        let hh = (b - a) / k;
        let mut x: Vec<f64> = (0..k as usize).map(|i| a + (i as f64 + 0.5) * hh).collect();
        let right = outward(x[x.len() - 1], hh, b + spec.margin, spec.half_length, spec);
        let left = outward(-x[0], hh, -a + spec.margin, spec.half_length, spec);
        let mut all: Vec<f64> = left.iter().rev().map(|v| -v).collect();
        all.append(&mut x);
        all.extend(right);
        let n = all.len();
        let wall_l = -spec.half_length;
        let wall_r = spec.half_length;
        let mut measure = Vec::with_capacity(n);
        for i in 0..n {
            let lo = if i == 0 { wall_l } else { 0.5 * (all[i - 1] + all[i]) };
            let hi = if i + 1 == n { wall_r } else { 0.5 * (all[i] + all[i + 1]) };
            measure.push(hi - lo);
        }
        let cond = (0..n - 1).map(|i| 1.0 / (all[i + 1] - all[i])).collect();
        let window_nodes = (0..n).filter(|&i| window.contains(all[i])).collect::<Vec<_>>();
        if window_nodes.is_empty() {
            return Err(Error::Geometry("mesh does not resolve the window".into()));
        }
        Ok(Self {
            cond_left: 1.0 / (all[0] - wall_l),
            cond_right: 1.0 / (wall_r - all[n - 1]),
            x: all,
            measure,
            cond,
            window: window_nodes,
        })
    }

    /// Radial grid for a disk of radius `radius` with cell measures ∫ r dr.
    pub fn radial(radius: f64, spec: &GridSpec) -> Result<Self> {
        if spec.half_length <= radius + spec.h {
            return Err(Error::Geometry("box must contain the window".into()));
        }
        let k = round(radius / spec.h).max(1.0);
        let hh = radius / k;
        let mut r: Vec<f64> = (0..k as usize).map(|i| (i as f64 + 0.5) * hh).collect();
        let right = outward(r[r.len() - 1], hh, radius + spec.margin, spec.half_length, spec);
        r.extend(right);
        let n = r.len();
        let wall = spec.half_length;
        let edge = |i: usize| -> f64 {
            if i == 0 {
                0.0
            } else if i == n {
                wall
            } else {
                0.5 * (r[i - 1] + r[i])
            }
        };
        let measure = (0..n).map(|i| 0.5 * (edge(i + 1) * edge(i + 1) - edge(i) * edge(i))).collect();
        let cond = (0..n - 1).map(|i| edge(i + 1) / (r[i + 1] - r[i])).collect();
        let window = (0..n).filter(|&i| r[i] < radius).collect();
        Ok(Self { cond_left: 0.0, cond_right: wall / (wall - r[n - 1]), x: r, measure, cond, window })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn left_cond(&self, i: usize) -> f64 {
        if i == 0 {
            self.cond_left
        } else {
            self.cond[i - 1]
        }
    }

    fn right_cond(&self, i: usize) -> f64 {
        if i + 1 == self.len() {
            self.cond_right
        } else {
            self.cond[i]
        }
    }
}

/// Dirichlet strip of width `alpha` with `cells` uniform cells across.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripMesh {
    pub alpha: f64,
    pub cells: usize,
}

impl StripMesh {
    pub fn new(alpha: f64, h: f64) -> Self {
        Self { alpha, cells: (round(alpha / h) as usize).max(2) }
    }

    pub fn hy(&self) -> f64 {
        self.alpha / self.cells as f64
    }

    /// Eigenvalue of the k-th discrete sine mode.
    pub fn nu(&self, k: usize) -> f64 {
        let hy = self.hy();
        2.0 / (hy * hy) * (1.0 - cos(k as f64 * PI / self.cells as f64))
    }

    /// Squared value of the W-normalized k-th mode on the first row off the wall.
    pub fn phi1_sq(&self, k: usize) -> f64 {
        let m = self.cells as f64;
        let s = sin(k as f64 * PI / m);
        2.0 / (m * self.hy()) * s * s
    }
}

/// Window nodes coupled to one or two Dirichlet strips.
#[derive(Debug, Clone)]
pub struct FdProblem {
    pub grid: LineGrid,
    pub strips: Vec<StripMesh>,
    /// Robin coefficient at each window node
    pub robin: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FdSolve {
    pub lambda: f64,
    pub threshold: f64,
    pub gap: f64,
    /// window-row eigenvector at λ (unnormalized)
    pub window_values: Vec<f64>,
    pub window_x: Vec<f64>,
    pub iterations: usize,
    pub unknowns: usize,
}

impl FdProblem {
    /// Robin coefficient evaluated at the physical node positions.
    pub fn new(grid: LineGrid, strips: Vec<StripMesh>, b: &Robin) -> Self {
        Self::with_robin_fn(grid, strips, |x| b.eval(x))
    }

    /// Robin values given directly at the physical node coordinates.
    pub fn with_robin_fn<F: Fn(f64) -> f64>(grid: LineGrid, strips: Vec<StripMesh>, b: F) -> Self {
        let robin = grid.window.iter().map(|&i| b(grid.x[i])).collect();
        Self { grid, strips, robin }
    }

    /// Discrete bottom of the essential spectrum.
    pub fn threshold(&self) -> f64 {
        self.strips.iter().map(|s| s.nu(1)).fold(f64::INFINITY, f64::min)
    }

    pub fn unknowns(&self) -> usize {
        self.window_len() + self.strips.iter().map(|s| (s.cells - 1) * self.grid.len()).sum::<usize>()
    }

    fn window_len(&self) -> usize {
        self.grid.window.len()
    }

    /// Condensed matrix on the window nodes.
    pub fn schur(&self, lambda: f64) -> DMatrix<f64> {
        let g = &self.grid;
        let w = &g.window;
        let nw = w.len();
        let lo = w[0];
        let hi = w[nw - 1];
        let span = hi - lo + 1;
        let mut s = DMatrix::zeros(nw, nw);
        let mut acc = DMatrix::zeros(span, span);
        for st in &self.strips {
            let hy = st.hy();
            let half = 0.5 * hy;
            for (p, &i) in w.iter().enumerate() {
                let mi = g.measure[i];
                let d = half * (g.left_cond(i) + g.right_cond(i)) + mi / hy - lambda * mi * half;
                s[(p, p)] += d;
                if p + 1 < nw && w[p + 1] == i + 1 {
                    s[(p, p + 1)] -= half * g.cond[i];
                    s[(p + 1, p)] -= half * g.cond[i];
                }
            }
            acc.fill(0.0);
            for k in 1..st.cells {
                let shift = st.nu(k) - lambda;
                add_restricted_inverse(g, lo, hi, shift, st.phi1_sq(k), &mut acc);
            }
            for (p, &i) in w.iter().enumerate() {
                for (q, &j) in w.iter().enumerate() {
                    let v = acc[(i.min(j) - lo, i.max(j) - lo)];
                    s[(p, q)] -= (g.measure[i] / hy) * (g.measure[j] / hy) * v;
                }
            }
        }
        for (p, &i) in w.iter().enumerate() {
            s[(p, p)] += self.robin[p] * g.measure[i];
        }
        s
    }

    fn min_eig(&self, lambda: f64) -> (f64, Vec<f64>) {
        let e = SymmetricEigen::new(self.schur(lambda));
        let mut k = 0;
        for i in 1..e.eigenvalues.len() {
            if e.eigenvalues[i] < e.eigenvalues[k] {
                k = i;
            }
        }
        (e.eigenvalues[k], e.eigenvectors.column(k).iter().copied().collect())
    }

    /// λ₁ below the discrete threshold; root in t = √(threshold − λ).
    pub fn solve(&self) -> Result<FdSolve> {
        let thr = self.threshold();
        let f = |t: f64| self.min_eig(thr - t * t).0;
        // μ_min is increasing in t
        let mut hi = sqrt(thr);
        let mut fhi = f(hi);
        let mut iters = 1;
        while fhi <= 0.0 {
            hi *= 2.0;
            fhi = f(hi);
            iters += 1;
            if iters > 80 {
                return Err(Error::NoConvergence { iterations: iters, residual: fhi });
            }
        }
        let mut lo = hi;
        let mut flo = fhi;
        while flo > 0.0 {
            hi = lo;
            lo *= 0.5;
            flo = f(lo);
            iters += 1;
            if lo < 1e-12 {
                return Err(Error::NoBoundState("no eigenvalue below the discrete threshold".into()));
            }
        }
        // Illinois false position on the bracket [lo, hi]
        let mut fa = flo;
        let mut fb = f(hi);
        let (mut a, mut b) = (lo, hi);
        let mut side = 0;
        for _ in 0..200 {
            let c = (a * fb - b * fa) / (fb - fa);
            let fc = f(c);
            iters += 1;
            if fc == 0.0 || fabs(b - a) < 1e-12 * b {
                a = c;
                b = c;
                break;
            }
            if fc < 0.0 {
                a = c;
                fa = fc;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            } else {
                b = c;
                fb = fc;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
            if fabs(b - a) < 1e-11 * b {
                break;
            }
        }
        let t = 0.5 * (a + b);
        let lambda = thr - t * t;
        let (_, v) = self.min_eig(lambda);
        Ok(FdSolve {
            lambda,
            threshold: thr,
            gap: t * t,
            window_x: self.grid.window.iter().map(|&i| self.grid.x[i]).collect(),
            window_values: v,
            iterations: iters,
            unknowns: self.unknowns(),
        })
    }
}

/// Adds `c` times the inverse of the x-chain `G + diag(measure)·shift`, restricted to
/// nodes lo..=hi, into the upper triangle of `acc`. The outer parts are eliminated by
/// scalar recurrences.
fn add_restricted_inverse(g: &LineGrid, lo: usize, hi: usize, shift: f64, c: f64, acc: &mut DMatrix<f64>) {
    let n = g.len();
    let d = |i: usize| g.left_cond(i) + g.right_cond(i) + g.measure[i] * shift;
    let m = hi - lo + 1;
    // forward pivots over 0..=hi and backward pivots over lo..n
    let mut fwd = alloc::vec![0.0; m];
    let mut s = d(0);
    for i in 0..=hi {
        if i > 0 {
            s = d(i) - g.cond[i - 1] * g.cond[i - 1] / s;
        }
        if i >= lo {
            fwd[i - lo] = s;
        }
    }
    let mut bwd = alloc::vec![0.0; m];
    let mut t = d(n - 1);
    for i in (lo..n).rev() {
        if i + 1 < n {
            t = d(i) - g.cond[i] * g.cond[i] / t;
        }
        if i <= hi {
            bwd[i - lo] = t;
        }
    }
    // (T⁻¹)_{jj} = 1/(fwd_j + bwd_j − d_j); (T⁻¹)_{ij} = (cond_i / fwd_i) (T⁻¹)_{i+1,j} for i < j
    for j in 0..m {
        let jj = lo + j;
        let mut x = 1.0 / (fwd[j] + bwd[j] - d(jj));
        acc[(j, j)] += c * x;
        for i in (0..j).rev() {
            x *= g.cond[lo + i] / fwd[i];
            if x == 0.0 {
                break;
            }
            acc[(i, j)] += c * x;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OracleResult {
    /// Richardson-extrapolated gap
    pub gap: f64,
    pub lambda: f64,
    /// (h, gap_h) per level
    pub levels: Vec<(f64, f64)>,
    pub observed_order: Option<f64>,
    pub mesh_error: f64,
    pub half_length: f64,
    /// |gap(L) − gap(2L)| on the coarsest level
    pub truncation_error: Option<f64>,
    /// L·√gap
    pub decay_margin: f64,
    pub asymmetry: f64,
    pub unknowns: usize,
}

/// Richardson extrapolation of a sequence at spacings h, h/2, h/4, ….
pub fn richardson(levels: &[(f64, f64)]) -> (f64, Option<f64>, f64) {
    let n = levels.len();
    if n == 1 {
        return (levels[0].1, None, f64::NAN);
    }
    let (h1, v1) = levels[n - 2];
    let (h2, v2) = levels[n - 1];
    let ratio = h1 / h2;
    let mut p = 2.0;
    let mut observed = None;
    if n >= 3 {
        let v0 = levels[n - 3].1;
        let q = (v1 - v0) / (v2 - v1);
        if q > 1.0 {
            let est = libm::log(q) / libm::log(ratio);
            observed = Some(est);
            if (0.5..=3.0).contains(&est) {
                p = est;
            }
        }
    }
    let f = libm::pow(ratio, p);
    let extrap = v2 + (v2 - v1) / (f - 1.0);
    (extrap, observed, fabs(extrap - v2))
}

/// Which wall carries the window.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleGeometry {
    /// strip of width α, window in the bottom wall
    Strip { alpha: f64 },
    /// two strips sharing the windowed wall
    Coupled { alpha_plus: f64, alpha_minus: f64 },
    /// layer of width α, disk window of radius R (scaled by ℓ)
    Layer { alpha: f64, radius: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOptions {
    pub h: f64,
    pub half_length: f64,
    /// number of halvings beyond the base spacing
    pub refinements: usize,
    pub decay_guard: f64,
    pub check_truncation: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { h: 1.0 / 64.0, half_length: 60.0, refinements: 2, decay_guard: 8.0, check_truncation: true }
    }
}

fn build(geom: &OracleGeometry, window: &Window1D, ell: f64, b: &Robin, spec: &GridSpec) -> Result<FdProblem> {
    let scaled = window.dilate(ell);
    match *geom {
        OracleGeometry::Strip { alpha } => {
            let grid = LineGrid::strip(&scaled, spec)?;
            Ok(FdProblem::with_robin_fn(grid, alloc::vec![StripMesh::new(alpha, spec.h)], |x| b.eval(x)))
        }
        OracleGeometry::Coupled { alpha_plus, alpha_minus } => {
            let grid = LineGrid::strip(&scaled, spec)?;
            let strips = alloc::vec![StripMesh::new(alpha_plus, spec.h), StripMesh::new(alpha_minus, spec.h)];
            Ok(FdProblem::with_robin_fn(grid, strips, |x| b.eval(x)))
        }
        OracleGeometry::Layer { alpha, radius } => {
            let grid = LineGrid::radial(radius * ell, spec)?;
            Ok(FdProblem::with_robin_fn(grid, alloc::vec![StripMesh::new(alpha, spec.h)], |x| b.eval(x)))
        }
    }
}

fn margin(geom: &OracleGeometry) -> f64 {
    match *geom {
        OracleGeometry::Strip { alpha } | OracleGeometry::Layer { alpha, .. } => alpha,
        OracleGeometry::Coupled { alpha_plus, .. } => alpha_plus,
    }
}

/// Eigenvalue below threshold with mesh (h, h/2, …) and truncation (L, 2L) indicators.
/// `window` is the unscaled window (for the layer geometry only its role as a flag matters).
pub fn oracle_eigenvalue(
    geom: &OracleGeometry,
    window: &Window1D,
    ell: f64,
    b: &Robin,
    opts: &OracleOptions,
) -> Result<OracleResult> {
    if !(ell > 0.0) {
        return Err(Error::InvalidInput("scale must be positive".into()));
    }
    let mut half = opts.half_length;
    let solve_at = |half: f64, f: f64| -> Result<FdSolve> {
        let spec = GridSpec::new(opts.h, half, margin(geom)).refined(f);
        build(geom, window, ell, b, &spec)?.solve()
    };
    // enlarge the box until the decay guard holds on the coarse level
    // a short box lifts the bound state above the discrete threshold
    let mut coarse = loop {
        match solve_at(half, 1.0) {
            Err(Error::NoBoundState(_)) if half < 1e4 => half *= 2.0,
            r => break r?,
        }
    };
    for _ in 0..8 {
        if half * sqrt(coarse.gap) >= opts.decay_guard {
            break;
        }
        half = 1.25 * opts.decay_guard / sqrt(coarse.gap);
        coarse = solve_at(half, 1.0)?;
    }
    let mut levels = alloc::vec![(opts.h, coarse.gap)];
    let mut last = coarse.clone();
    let mut f = 1.0;
    for _ in 0..opts.refinements {
        f *= 2.0;
        last = solve_at(half, f)?;
        levels.push((opts.h / f, last.gap));
    }
    let (gap, observed, mesh_error) = richardson(&levels);
    let truncation_error = if opts.check_truncation {
        Some(fabs(solve_at(2.0 * half, 1.0)?.gap - coarse.gap))
    } else {
        None
    };
    let v = &last.window_values;
    let nv = sqrt(v.iter().map(|a| a * a).sum::<f64>());
    let asym = if matches!(geom, OracleGeometry::Layer { .. }) {
        0.0
    } else {
        sqrt(v.iter().zip(v.iter().rev()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()) / nv
    };
    let thr = last.threshold;
    Ok(OracleResult {
        gap,
        lambda: thr - gap,
        levels,
        observed_order: observed,
        mesh_error,
        half_length: half,
        truncation_error,
        decay_margin: half * sqrt(gap),
        asymmetry: asym,
        unknowns: last.unknowns,
    })
}
