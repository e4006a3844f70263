//! Subcommand implementations. Each returns a table or a JSON value; IO happens in main.

use crate::config::{Geometry, RunConfig};
use crate::output::{Cell, Table};
use crate::CliError;
use dtn_core::asymptotics::{
    compute_constants, expansion_residual, expansion_terms, power_fit, predict_2d, predict_2d_full, predict_3d,
    predict_3d_printed, predict_coupled,
};
use dtn_core::assembly::LineAssembly;
use dtn_core::basis::IntervalBasis;
use dtn_core::disk::{DiskBasis, LayerAssembly, LayerProblem};
use dtn_core::fd::{oracle_eigenvalue, OracleGeometry};
use dtn_core::solver::{CoupledProblem, StripProblem};
use dtn_core::window::Window1D;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde_json::{json, Value};

pub fn line_assembly(cfg: &RunConfig) -> Result<LineAssembly, CliError> {
    Ok(LineAssembly::new(IntervalBasis::new(cfg.window_1d()?, cfg.basis_degree)?)?)
}

pub fn layer_problem(cfg: &RunConfig) -> Result<LayerProblem, CliError> {
    let basis = DiskBasis::new(cfg.window_2d()?, cfg.basis_degree, cfg.harmonics)?;
    Ok(LayerProblem::new(cfg.alpha, cfg.robin(), LayerAssembly::new(basis)?)?)
}

fn nan_row(n: usize, ell: f64, err: String) -> Vec<Cell> {
    let mut row = vec![Cell::Num(ell)];
    row.extend((1..n - 1).map(|_| Cell::Num(f64::NAN)));
    row.push(Cell::Text(err));
    row
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b) / b
}

/// Window and strip constants with their certificates.
pub fn constants(cfg: &RunConfig) -> Result<Value, CliError> {
    match cfg.geometry {
        Geometry::Layer => {
            let tau = |per: usize| -> Result<f64, CliError> {
                let b = DiskBasis::new(cfg.window_2d()?, per, 1)?;
                let f = b.load_vector(0);
                let q = b.q0(0);
                Ok(dtn_core::solver::tau0(&q, &f)?)
            };
            let t = tau(cfg.basis_degree)?;
            let t2 = tau(2 * cfg.basis_degree)?;
            Ok(json!({
                "geometry": "layer",
                "tau0": t,
                "tau0_self_convergence": (t - t2).abs(),
                "alpha": cfg.alpha,
            }))
        }
        _ => {
            let asm = line_assembly(cfg)?;
            let c = compute_constants(&asm, cfg.alpha, &cfg.robin())?;
            let fine = LineAssembly::new(IntervalBasis::new(cfg.window_1d()?, 2 * cfg.basis_degree)?)?;
            let cf = dtn_core::asymptotics::window_constants(&fine, &cfg.robin())?;
            Ok(json!({
                "geometry": "line",
                "alpha": cfg.alpha,
                "constants": c,
                "self_convergence": {
                    "tau0": (c.tau0 - cf.tau0).abs(),
                    "tau1": (c.tau1 - cf.tau1).abs(),
                    "rho1": (c.rho1 - cf.rho1).abs(),
                    "kln": (c.kln - cf.kln).abs(),
                },
            }))
        }
    }
}

/// Single strip sweep over `cfg.ells`; matrices at the root are returned when requested.
/// Root matrices keyed by scale.
pub type Matrices = Vec<(f64, DMatrix<f64>)>;

pub fn sweep(cfg: &RunConfig) -> Result<(Table, Matrices), CliError> {
    let header = vec![
        "ell", "omega_star", "gap", "sqrt_gap_over_ell2", "predicted_leading", "predicted_full",
        "rel_dev_leading", "rel_dev_full", "mu2", "iterations", "status",
    ];
    let mut table = Table::new(header.clone());
    if cfg.ells.is_empty() {
        return Ok((table, Vec::new()));
    }
    let asm = line_assembly(cfg)?;
    let c = compute_constants(&asm, cfg.alpha, &cfg.robin())?;
    let lead = predict_2d(&c, cfg.alpha);
    let full = predict_2d_full(&c, cfg.alpha)?;
    let problem = StripProblem::new(cfg.alpha, cfg.robin(), asm)?;
    let results: Vec<_> = cfg
        .ells
        .par_iter()
        .map(|&l| {
            let r = problem.solve(l, &cfg.solver);
            let m = match (&r, cfg.export_matrices) {
                (Ok(r), true) => problem.qb(l, r.gap).ok(),
                _ => None,
            };
            (l, r, m)
        })
        .collect();
    let mut mats = Vec::new();
    for (l, r, m) in results {
        match r {
            Ok(r) => {
                let v = r.gap.sqrt() / (l * l);
                let pl = lead.sqrt_gap(l) / (l * l);
                let pf = full.sqrt_gap(l) / (l * l);
                table.push(vec![
                    l.into(), r.omega_star.into(), r.gap.into(), v.into(), pl.into(), pf.into(),
                    rel(v, pl).into(), rel(v, pf).into(), r.mu2.into(), r.iterations.into(), "ok".into(),
                ]);
            }
            Err(e) => table.push(nan_row(header.len(), l, e.to_string())),
        }
        if let Some(m) = m {
            mats.push((l, m));
        }
    }
    Ok((table, mats))
}

pub fn coupled(cfg: &RunConfig) -> Result<Table, CliError> {
    let header = vec!["ell", "omega_star", "gap", "sqrt_gap_over_ell2", "predicted", "rel_dev", "mu2", "status"];
    let mut table = Table::new(header.clone());
    if cfg.ells.is_empty() {
        return Ok(table);
    }
    let (a1, a2) = cfg.coupled_widths();
    let asm = line_assembly(cfg)?;
    let c = dtn_core::asymptotics::window_constants(&asm, &cfg.robin())?;
    let problem = CoupledProblem::new(a1, a2, asm)?;
    let pred = predict_coupled(&c, problem.alpha_plus);
    let rows: Vec<_> = cfg.ells.par_iter().map(|&l| (l, problem.solve(l, &cfg.solver))).collect();
    for (l, r) in rows {
        match r {
            Ok(r) => {
                let v = r.gap.sqrt() / (l * l);
                table.push(vec![
                    l.into(), r.omega_star.into(), r.gap.into(), v.into(), pred.c2.into(), rel(v, pred.c2).into(),
                    r.mu2.into(), "ok".into(),
                ]);
            }
            Err(e) => table.push(nan_row(header.len(), l, e.to_string())),
        }
    }
    Ok(table)
}

pub fn solve3d(cfg: &RunConfig) -> Result<Table, CliError> {
    let header = vec![
        "ell", "omega_star", "ln_gap", "minus_ell3_ln_gap", "law_ln_gap", "law_limit", "printed_ln_gap",
        "printed_limit", "mu2", "status",
    ];
    let mut table = Table::new(header.clone());
    if cfg.ells.is_empty() {
        return Ok(table);
    }
    let problem = layer_problem(cfg)?;
    let b0 = cfg.robin().at_origin();
    let basis = DiskBasis::new(cfg.window_2d()?, cfg.basis_degree, 1)?;
    let f = basis.load_vector(0);
    let g = basis.gram(0);
    let q = basis.q0(0);
    let tau0 = problem.tau0();
    // τ₁ = ⟨Q₀⁻¹f, Q₀⁻¹f⟩ on the radial block
    let c = nalgebra::DVector::from_fn(f.len(), |i, _| f[i] / q[(i, i)]);
    let tau1 = c.dot(&(&g * &c));
    let law = predict_3d(tau0, tau1, b0, cfg.alpha);
    let printed = predict_3d_printed(tau0, tau1, b0, cfg.alpha);
    let rows: Vec<_> = cfg.ells.par_iter().map(|&l| (l, problem.solve(l, &cfg.solver))).collect();
    for (l, r) in rows {
        match r {
            Ok(r) => table.push(vec![
                l.into(), r.omega_star.into(), r.ln_gap.into(), (-l * l * l * r.ln_gap).into(), law.ln_gap(l).into(),
                law.limit().into(), printed.ln_gap(l).into(), printed.limit().into(), r.mu2.into(), "ok".into(),
            ]),
            Err(e) => table.push(nan_row(header.len(), l, e.to_string())),
        }
    }
    Ok(table)
}

fn oracle_geometry(cfg: &RunConfig) -> Result<(OracleGeometry, Window1D), CliError> {
    match cfg.geometry {
        Geometry::Strip => Ok((OracleGeometry::Strip { alpha: cfg.alpha }, cfg.window_1d()?)),
        Geometry::Coupled => {
            let (a, b) = cfg.coupled_widths();
            Ok((OracleGeometry::Coupled { alpha_plus: a.max(b), alpha_minus: a.min(b) }, cfg.window_1d()?))
        }
        Geometry::Layer => match cfg.window {
            crate::config::WindowSpec::Disk { radius } => {
                Ok((OracleGeometry::Layer { alpha: cfg.alpha, radius }, Window1D::interval(-radius, radius)?))
            }
            _ => Err(CliError::Config("the layer oracle needs a disk window".into())),
        },
    }
}

/// FD oracle next to the spectral solver.
pub fn oracle(cfg: &RunConfig) -> Result<Table, CliError> {
    let header = vec![
        "ell", "oracle_gap", "oracle_ln_gap", "coarse_gap", "fine_gap", "observed_order", "mesh_error",
        "half_length", "truncation_error", "decay_margin", "asymmetry", "unknowns", "spectral_ln_gap", "rel_diff",
        "status",
    ];
    let mut table = Table::new(header.clone());
    if !cfg.oracle.enabled {
        return Err(CliError::Config("oracle disabled in config".into()));
    }
    if cfg.ells.is_empty() {
        return Ok(table);
    }
    let (geom, window) = oracle_geometry(cfg)?;
    let spectral: Box<dyn Fn(f64) -> Result<f64, CliError> + Sync> = match cfg.geometry {
        Geometry::Strip => {
            let p = StripProblem::new(cfg.alpha, cfg.robin(), line_assembly(cfg)?)?;
            Box::new(move |l| Ok(p.solve(l, &cfg.solver)?.ln_gap))
        }
        Geometry::Coupled => {
            let (a, b) = cfg.coupled_widths();
            let p = CoupledProblem::new(a, b, line_assembly(cfg)?)?;
            Box::new(move |l| Ok(p.solve(l, &cfg.solver)?.ln_gap))
        }
        Geometry::Layer => {
            let p = layer_problem(cfg)?;
            Box::new(move |l| Ok(p.solve(l, &cfg.solver)?.ln_gap))
        }
    };
    let opts = cfg.oracle.options();
    let rows: Vec<_> = cfg
        .ells
        .par_iter()
        .map(|&l| (l, oracle_eigenvalue(&geom, &window, l, &cfg.robin(), &opts), spectral(l)))
        .collect();
    for (l, o, s) in rows {
        match (o, s) {
            (Ok(o), Ok(s)) => table.push(vec![
                l.into(), o.gap.into(), o.gap.ln().into(), o.levels[0].1.into(), o.levels[o.levels.len() - 1].1.into(),
                o.observed_order.unwrap_or(f64::NAN).into(), o.mesh_error.into(), o.half_length.into(),
                o.truncation_error.unwrap_or(f64::NAN).into(), o.decay_margin.into(), o.asymmetry.into(),
                o.unknowns.into(), s.into(), rel(o.gap, s.exp()).into(), "ok".into(),
            ]),
            (Err(e), _) => table.push(nan_row(header.len(), l, e.to_string())),
            (_, Err(e)) => table.push(nan_row(header.len(), l, e.to_string())),
        }
    }
    Ok(table)
}

/// Expansion-residual table and fitted order.
pub fn asymptote(cfg: &RunConfig) -> Result<(Table, Value), CliError> {
    let mut table = Table::new(vec!["ell", "residual", "residual_without_singular"]);
    let asm = line_assembly(cfg)?;
    let c = compute_constants(&asm, cfg.alpha, &cfg.robin())?;
    let terms = expansion_terms(&asm, cfg.alpha, c.rho0()?);
    let rows: Vec<_> = cfg
        .ells
        .par_iter()
        .map(|&l| -> Result<(f64, f64, f64), CliError> {
            Ok((
                l,
                expansion_residual(&asm, &terms, cfg.alpha, l, cfg.detuning, true)?,
                expansion_residual(&asm, &terms, cfg.alpha, l, cfg.detuning, false)?,
            ))
        })
        .collect::<Result<_, _>>()?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (l, a, b) in rows {
        table.push(vec![l.into(), a.into(), b.into()]);
        x.push(l);
        y.push(a);
    }
    let order = if x.len() >= 2 { power_fit(&x, &y) } else { f64::NAN };
    Ok((table, json!({ "detuning": cfg.detuning, "fitted_order": order })))
}
