//! The ten acceptance criteria. Every criterion is a list of checks; informational
//! checks are reported but do not decide the status.

use crate::CliError;
use dtn_core::asymptotics::{
    compute_constants, expansion_residual, expansion_terms, linear_fit, power_fit, predict_3d, predict_3d_printed,
    predict_coupled, window_constants,
};
use dtn_core::assembly::LineAssembly;
use dtn_core::basis::{IntervalBasis, Robin};
use dtn_core::disk::{DiskBasis, LayerAssembly, LayerProblem};
use dtn_core::fd::{oracle_eigenvalue, OracleGeometry, OracleOptions};
use dtn_core::solver::{CoupledProblem, SolverOptions, StripProblem};
use dtn_core::symbol::{
    first_pole_and_residue, rho_constants, symbol_m, symbol_m_real, symbol_series, symbol_split, threshold,
    ContourSpec, CutRadius, SymbolParams,
};
use dtn_core::window::{Window1D, Window2D};
use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub bound: f64,
    pub kind: Bound,
    pub informational: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub status: Status,
    pub checks: Vec<Check>,
    pub note: String,
    pub seconds: f64,
}

impl Criterion {
    pub fn line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        };
        let gate: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                let op = if c.kind == Bound::AtMost { "<=" } else { ">=" };
                let info = if c.informational { " (info)" } else { "" };
                format!("{}={:.3e} {op} {:.1e}{info}", c.label, c.value, c.bound)
            })
            .collect();
        let mut s = format!("criterion {:>2} {:<7} {} [{:.1}s] {}", self.id, tag, self.name, self.seconds, gate.join("; "));
        if !self.note.is_empty() {
            s.push_str(" | ");
            s.push_str(&self.note);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcceptanceOptions {
    /// multiplies every error tolerance (divides lower bounds)
    pub tolerance_scale: f64,
    pub oracle: bool,
    pub oracle_options: OracleOptions,
}

impl Default for AcceptanceOptions {
    fn default() -> Self {
        Self { tolerance_scale: 1.0, oracle: true, oracle_options: OracleOptions::default() }
    }
}

struct Builder {
    checks: Vec<Check>,
    scale: f64,
}

impl Builder {
    fn new(scale: f64) -> Self {
        Self { checks: Vec::new(), scale }
    }

    fn at_most(&mut self, label: impl Into<String>, value: f64, bound: f64) {
        let b = bound * self.scale;
        self.checks.push(Check { label: label.into(), value, bound: b, kind: Bound::AtMost, informational: false, passed: value <= b });
    }

    fn at_least(&mut self, label: impl Into<String>, value: f64, bound: f64) {
        let b = bound / self.scale;
        self.checks.push(Check { label: label.into(), value, bound: b, kind: Bound::AtLeast, informational: false, passed: value >= b });
    }

    /// Structural requirement, not affected by the tolerance scale.
    fn require(&mut self, label: impl Into<String>, value: f64, bound: f64) {
        self.checks.push(Check { label: label.into(), value, bound, kind: Bound::AtLeast, informational: false, passed: value >= bound });
    }

    fn info(&mut self, label: impl Into<String>, value: f64, bound: f64, kind: Bound) {
        let passed = match kind {
            Bound::AtMost => value <= bound,
            Bound::AtLeast => value >= bound,
        };
        self.checks.push(Check { label: label.into(), value, bound, kind, informational: true, passed });
    }

    fn finish(self, id: usize, name: &'static str, note: String, start: Instant) -> Criterion {
        let ok = self.checks.iter().filter(|c| !c.informational).all(|c| c.passed);
        Criterion {
            id,
            name,
            status: if ok { Status::Pass } else { Status::Fail },
            checks: self.checks,
            note,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

fn failed(id: usize, name: &'static str, err: CliError, start: Instant) -> Criterion {
    Criterion { id, name, status: Status::Fail, checks: Vec::new(), note: format!("error: {err}"), seconds: start.elapsed().as_secs_f64() }
}

fn unit() -> Window1D {
    Window1D::interval(-1.0, 1.0).expect("unit interval")
}

fn assembly(n: usize) -> Result<LineAssembly, CliError> {
    Ok(LineAssembly::new(IntervalBasis::new(unit(), n)?)?)
}

type Run = fn(&mut Builder, &AcceptanceOptions, &mut String) -> Result<(), CliError>;

fn c1(b: &mut Builder, _: &AcceptanceOptions, _: &mut String) -> Result<(), CliError> {
    let asm = assembly(64)?;
    let c = window_constants(&asm, &Robin::neumann())?;
    b.at_most("tau0", (c.tau0 - PI / 2.0).abs(), 1e-8);
    b.at_most("tau1", (c.tau1 - 4.0 / 3.0).abs(), 1e-8);
    b.at_most("pct", (c.tau0 * c.tau0 / c.measure - PI * PI / 8.0).abs(), 1e-8);
    b.at_most("kln", (c.kln - PI * PI / 16.0 * (-1.0 - 16f64.ln())).abs(), 1e-8);
    b.at_most("mx", c.mx.abs(), 1e-8);
    Ok(())
}

fn c2(b: &mut Builder, _: &AcceptanceOptions, _: &mut String) -> Result<(), CliError> {
    let basis = IntervalBasis::new(unit(), 64)?;
    let f = DVector::from_vec(basis.load_vector());
    let c = Cholesky::new(basis.q0()).ok_or(dtn_core::Error::NotPositiveDefinite)?.solve(&f);
    let coef: Vec<f64> = c.iter().copied().collect();
    let err = (0..101)
        .map(|i| {
            let x = -1.0 + 0.02 * i as f64;
            (basis.eval_combination(&coef, x) - (1.0 - x * x).max(0.0).sqrt()).abs()
        })
        .fold(0.0, f64::max);
    b.at_most("max_error", err, 1e-8);
    Ok(())
}

fn c3(b: &mut Builder, _: &AcceptanceOptions, note: &mut String) -> Result<(), CliError> {
    let p = StripProblem::new(PI, Robin::neumann(), assembly(32)?)?;
    let target = PI.powi(3) / (2.0 * PI.powi(3));
    let mut vals = Vec::new();
    for l in [0.2, 0.1, 0.05, 0.025] {
        let v = p.solve(l, &SolverOptions::default())?.gap.sqrt() / (l * l);
        let dev = (v / target - 1.0).abs();
        b.at_most(format!("dev/(l2|ln l|)@{l}"), dev / (l * l * l.ln().abs()), 0.5);
        if l == 0.05 {
            b.at_most("dev@0.05", dev, 0.03);
        }
        vals.push(v);
    }
    let drops = vals.windows(2).filter(|w| w[1] < w[0]).count();
    b.require("monotone_steps", drops as f64, 3.0);
    *note = format!("sqrt(gap)/l^2 = {}", vals.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(", "));
    Ok(())
}

fn c4(b: &mut Builder, _: &AcceptanceOptions, note: &mut String) -> Result<(), CliError> {
    let asm = assembly(32)?;
    let c = window_constants(&asm, &Robin::neumann())?;
    let opts = SolverOptions::default();
    let p = CoupledProblem::new(PI, PI / 2.0, asm.clone())?;
    let pred = predict_coupled(&c, PI).c2;
    let l = 0.05;
    let v = p.solve(l, &opts)?.gap.sqrt() / (l * l);
    b.at_most("rel_dev@0.05", (v / pred - 1.0).abs(), 0.05);
    let eq = CoupledProblem::new(PI, PI, asm.clone())?.solve(0.1, &opts)?;
    let single = StripProblem::new(PI, Robin::neumann(), asm)?.solve(0.1, &opts)?;
    b.at_most("equal_widths_domega", (eq.omega_star - single.omega_star).abs(), 1e-10);
    *note = format!("sqrt(gap)/l^2 = {v:.6} vs {pred:.6}");
    Ok(())
}

fn c5(b: &mut Builder, _: &AcceptanceOptions, note: &mut String) -> Result<(), CliError> {
    let asm = assembly(16)?;
    let c = compute_constants(&asm, PI, &Robin::neumann())?;
    let t = expansion_terms(&asm, PI, c.rho0()?);
    let ells = [0.1, 0.05, 0.025, 0.0125];
    let r = ells
        .iter()
        .map(|&l| expansion_residual(&asm, &t, PI, l, 1e-8, true))
        .collect::<Result<Vec<_>, _>>()?;
    let p = power_fit(&ells, &r);
    b.at_least("fitted_order", p, 2.7);
    let with = expansion_residual(&asm, &t, PI, 0.05, 1e-6, true)?;
    let without = expansion_residual(&asm, &t, PI, 0.05, 1e-6, false)?;
    b.at_least("singular_reduction", without / with, 100.0);
    *note = format!("residuals {}", r.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>().join(", "));
    Ok(())
}

fn c6(b: &mut Builder, _: &AcceptanceOptions, note: &mut String) -> Result<(), CliError> {
    let ells = [0.1, 0.05, 0.025, 0.0125];
    let asm = assembly(32)?;
    let sweep = |robin: Robin| -> Result<Vec<f64>, CliError> {
        let p = StripProblem::new(PI, robin, asm.clone())?;
        ells.iter().map(|&l| Ok(p.solve(l, &SolverOptions::default())?.gap.sqrt())).collect()
    };
    let lead = PI.powi(3) / (2.0 * PI.powi(3));
    // b = 1: (√gap/ℓ² − c2)/ℓ = c3 + c4l ℓ ln ℓ + c4 ℓ
    let s = sweep(Robin::constant(1.0))?;
    let a = DMatrix::from_fn(4, 3, |i, j| [1.0, ells[i] * ells[i].ln(), ells[i]][j]);
    let y = DVector::from_fn(4, |i, _| (s[i] / (ells[i] * ells[i]) - lead) / ells[i]);
    let x = a.svd(true, true).solve(&y, 1e-14).map_err(|e| CliError::Config(e.to_string()))?;
    let c3 = x[0];
    let target3 = 4.0 * PI * PI / (3.0 * PI.powi(3));
    b.at_most("c3_magnitude_rel_dev", (c3.abs() / target3 - 1.0).abs(), 0.1);
    b.info("c3_signed", c3, 0.0, Bound::AtMost);
    // b = 0: (√gap/ℓ² − c2)/ℓ² = c4l ln ℓ + c4
    let s = sweep(Robin::neumann())?;
    let lx: Vec<f64> = ells.iter().map(|l| l.ln()).collect();
    let ly: Vec<f64> = ells.iter().zip(&s).map(|(l, v)| (v / (l * l) - lead) / (l * l)).collect();
    let (c4l, _) = linear_fit(&lx, &ly);
    let target4 = PI.powi(5) / (8.0 * PI.powi(5));
    b.at_most("c4log_magnitude_rel_dev", (c4l.abs() / target4 - 1.0).abs(), 0.15);
    b.info("c4log_signed", c4l, 0.0, Bound::AtMost);
    *note = format!(
        "fitted c3 = {c3:+.5} (series sign -, reference sign +), fitted c4log = {c4l:+.5} (target magnitude {target4:.5})"
    );
    Ok(())
}

fn c7(b: &mut Builder, opts: &AcceptanceOptions, note: &mut String) -> Result<(), CliError> {
    let p = StripProblem::new(PI, Robin::neumann(), assembly(32)?)?;
    let mut fd = Vec::new();
    let mut details = Vec::new();
    for l in [0.4, 0.2] {
        let s = p.solve(l, &SolverOptions::default())?;
        let o = oracle_eigenvalue(&OracleGeometry::Strip { alpha: PI }, &unit(), l, &Robin::neumann(), &opts.oracle_options)?;
        b.at_most(format!("rel_diff@{l}"), (o.gap / s.gap - 1.0).abs(), 0.03);
        details.push(format!(
            "l={l}: oracle {:.6e} (order {:.2}, L={:.0}) spectral {:.6e}",
            o.gap,
            o.observed_order.unwrap_or(f64::NAN),
            o.half_length,
            s.gap
        ));
        fd.push(o.gap);
    }
    b.at_most("ratio_vs_16", (fd[0] / fd[1] / 16.0 - 1.0).abs(), 0.15);
    *note = details.join("; ");
    Ok(())
}

fn c8(b: &mut Builder, _: &AcceptanceOptions, note: &mut String) -> Result<(), CliError> {
    let p = StripProblem::new(PI, Robin::neumann(), assembly(16)?)?;
    let ells = [0.2, 0.1, 0.05, 0.025, 0.0125];
    let dets = [1.0, 0.1, 1e-2, 1e-3, 1e-4];
    let mut worst_mu2 = f64::INFINITY;
    let mut rows_ok = 0;
    let mut col = Vec::new();
    for &l in &ells {
        let mut prev = f64::INFINITY;
        let mut ok = true;
        for (k, &d) in dets.iter().enumerate() {
            let mu = p.mu_eigenvalues(l, d, 2)?;
            ok &= mu[0] < prev;
            prev = mu[0];
            worst_mu2 = worst_mu2.min(mu[1]);
            if k == 0 {
                col.push(mu[0]);
            }
        }
        rows_ok += ok as usize;
    }
    b.require("decreasing_rows", rows_ok as f64, 5.0);
    b.require("min_mu2", worst_mu2, 0.0);
    let e = power_fit(&ells, &col);
    b.at_most("exponent_dev", (e + 1.0).abs(), 0.1);
    *note = format!("mu1 exponent {e:.4}");
    Ok(())
}

fn c9(b: &mut Builder, _: &AcceptanceOptions, note: &mut String) -> Result<(), CliError> {
    let basis = DiskBasis::new(Window2D::disk(1.0)?, 16, 3)?;
    let p = LayerProblem::new(PI, Robin::neumann(), LayerAssembly::new(basis)?)?;
    let tau0 = p.tau0();
    let printed = predict_3d_printed(tau0, 0.0, 0.0, PI).limit();
    let adopted = predict_3d(tau0, 0.0, 0.0, PI).limit();
    let mut vals = Vec::new();
    for l in [0.2, 0.15, 0.1] {
        vals.push(-l * l * l * p.solve(l, &SolverOptions::default())?.ln_gap);
    }
    let v = vals[2];
    b.at_most("rel_dev_printed_law@0.1", (v / printed - 1.0).abs(), 0.1);
    b.info("rel_dev_log_peak_law@0.1", (v / adopted - 1.0).abs(), 0.1, Bound::AtMost);
    *note = format!(
        "-l^3 ln gap = {} ; 4a^3/tau0 = {printed:.4}, 2a^3/(pi tau0) = {adopted:.4} (tau0 = {tau0:.6})",
        vals.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", ")
    );
    Ok(())
}

fn c10(b: &mut Builder, _: &AcceptanceOptions, _: &mut String) -> Result<(), CliError> {
    // split reconstruction
    let p = SymbolParams::new(PI, 0.9)?;
    let cut = CutRadius::new(1.0)?;
    let mut worst: f64 = 0.0;
    for i in 0..=4000 {
        let xi = -50.0 + i as f64 * 0.025;
        let s = symbol_split(&p, cut, xi)?;
        let m = symbol_m_real(&p, xi)?;
        let inner = if xi.abs() <= 1.0 { m } else { 0.0 };
        worst = worst.max((inner + xi.abs() + s.m1 + s.m2 + s.m3 - m).abs() / m.abs().max(1.0));
    }
    b.at_most("split", worst, 1e-12);
    // residue against a circle contour
    let p = SymbolParams::new(2.0, 1.0)?;
    let (loc, res) = first_pole_and_residue(&p)?;
    let n = 256;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let e = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
        acc += symbol_m(&p, loc + e * 0.05)? * e * 0.05;
    }
    let numeric = acc / n as f64;
    b.at_most("residue", (numeric - res).norm(), 1e-8);
    // Richardson-extrapolated partial fractions
    let p = SymbolParams::new(PI, 0.5)?;
    let mut worst: f64 = 0.0;
    for xi in [Complex64::new(2.0, 0.0), Complex64::new(0.3, 0.4)] {
        let k = 20_000;
        let s1 = symbol_series(&p, xi, k);
        let s2 = symbol_series(&p, xi, 2 * k);
        let s4 = symbol_series(&p, xi, 4 * k);
        let r1 = s2 * 2.0 - s1;
        let r2 = s4 * 2.0 - s2;
        let r = (r2 * 4.0 - r1) / 3.0;
        worst = worst.max((r - symbol_m(&p, xi)?).norm());
    }
    b.at_most("series", worst, 1e-10);
    // ρ₀ independent of the contour height and the cut radius
    let mut worst: f64 = 0.0;
    for a in [PI * 1.2, 4.0, 2.0] {
        let base = rho_constants(a, ContourSpec::for_alpha(a), CutRadius::for_alpha(a))?;
        let k = PI / a;
        for beta in [1.1 * k, 1.6 * k] {
            for xc in [1.6 * k, 3.0] {
                if xc * xc <= threshold(a) {
                    continue;
                }
                let r = rho_constants(a, ContourSpec { beta, nodes: 32 }, CutRadius::new(xc)?)?;
                worst = worst.max((r.rho0 - base.rho0).abs());
            }
        }
    }
    b.at_most("rho0_path", worst, 1e-9);
    Ok(())
}

pub const NAMES: [&str; 10] = [
    "closed-form window constants",
    "inverse image of the constant",
    "Popov law, symmetric strip",
    "coupled waveguides",
    "form expansion residual",
    "subleading coefficients and signs",
    "finite-difference cross-check",
    "monotonicity and uniqueness",
    "layer log law",
    "symbol properties",
];

pub fn run_one(id: usize, opts: &AcceptanceOptions) -> Criterion {
    let runs: [Run; 10] = [c1, c2, c3, c4, c5, c6, c7, c8, c9, c10];
    let name = NAMES[id - 1];
    let start = Instant::now();
    if id == 7 && !opts.oracle {
        return Criterion {
            id,
            name,
            status: Status::Skipped,
            checks: Vec::new(),
            note: "oracle disabled".into(),
            seconds: 0.0,
        };
    }
    let mut b = Builder::new(opts.tolerance_scale);
    let mut note = String::new();
    match runs[id - 1](&mut b, opts, &mut note) {
        Ok(()) => b.finish(id, name, note, start),
        Err(e) => failed(id, name, e, start),
    }
}

pub fn run_all(opts: &AcceptanceOptions) -> Vec<Criterion> {
    (1..=10).map(|i| run_one(i, opts)).collect()
}
