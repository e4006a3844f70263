use clap::{Parser, Subcommand};
use dtn_cli::acceptance::{run_all, AcceptanceOptions, Status};
use dtn_cli::commands;
use dtn_cli::config::{Geometry, RunConfig};
use dtn_cli::output::{save_matrix, Table};
use dtn_cli::CliError;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dtn", version, about = "Waveguide window eigenvalues by Dirichlet-to-Neumann Galerkin solves")]
struct Cli {
    /// JSON run configuration; defaults are used when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// directory for CSV/JSON output; stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// worker threads for sweeps
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Window and strip constants with certificates
    Constants,
    /// Solve at the first configured scale (or --ell)
    Solve {
        #[arg(long)]
        ell: Option<f64>,
    },
    /// Solve over all configured scales
    Sweep,
    /// Coupled-strip sweep
    Coupled,
    /// Layer with a disk window
    Solve3d,
    /// Finite-difference oracle next to the spectral solver
    Oracle,
    /// Run the acceptance criteria
    Validate,
    /// Expansion residual table
    Asymptote,
}

fn emit_table(t: &Table, out: Option<&Path>, name: &str) -> Result<(), CliError> {
    match out {
        Some(dir) => t.save(&dir.join(format!("{name}.csv"))),
        None => t.write(std::io::stdout().lock()),
    }
}

fn emit_json(v: &serde_json::Value, out: Option<&Path>, name: &str) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v)?;
    match out {
        Some(dir) => Ok(std::fs::write(dir.join(format!("{name}.json")), text + "\n")?),
        None => {
            use std::io::Write;
            Ok(writeln!(std::io::stdout().lock(), "{text}")?)
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let out = cli.out.as_deref();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
    }
    if let Cmd::Solve { ell } = cli.cmd {
        cfg.ells = match ell {
            Some(l) => vec![l],
            None => cfg.ells.first().copied().into_iter().collect(),
        };
    }
    match cli.cmd {
        Cmd::Constants => emit_json(&commands::constants(&cfg)?, out, "constants")?,
        Cmd::Solve { .. } | Cmd::Sweep if cfg.geometry == Geometry::Coupled => {
            emit_table(&commands::coupled(&cfg)?, out, "coupled")?
        }
        Cmd::Solve { .. } | Cmd::Sweep if cfg.geometry == Geometry::Layer => {
            emit_table(&commands::solve3d(&cfg)?, out, "solve3d")?
        }
        Cmd::Solve { .. } => {
            let (t, mats) = commands::sweep(&cfg)?;
            emit_table(&t, out, "solve")?;
            export(&mats, out)?;
        }
        Cmd::Sweep => {
            let (t, mats) = commands::sweep(&cfg)?;
            emit_table(&t, out, "sweep")?;
            export(&mats, out)?;
        }
        Cmd::Coupled => emit_table(&commands::coupled(&cfg)?, out, "coupled")?,
        Cmd::Solve3d => emit_table(&commands::solve3d(&cfg)?, out, "solve3d")?,
        Cmd::Oracle => emit_table(&commands::oracle(&cfg)?, out, "oracle")?,
        Cmd::Asymptote => {
            let (t, summary) = commands::asymptote(&cfg)?;
            emit_table(&t, out, "asymptote")?;
            emit_json(&summary, out, "asymptote_fit")?;
        }
        Cmd::Validate => {
            let opts = AcceptanceOptions {
                tolerance_scale: cfg.tolerance_scale,
                oracle: cfg.oracle.enabled,
                oracle_options: cfg.oracle.options(),
            };
            let report = run_all(&opts);
            for c in &report {
                eprintln!("{}", c.line());
            }
            emit_json(&serde_json::to_value(&report)?, out, "validate")?;
            return Ok(report.iter().all(|c| c.status != Status::Fail));
        }
    }
    Ok(true)
}

fn export(mats: &[(f64, nalgebra::DMatrix<f64>)], out: Option<&Path>) -> Result<(), CliError> {
    if mats.is_empty() {
        return Ok(());
    }
    let dir = out.ok_or_else(|| CliError::Config("matrix export needs --out".into()))?;
    for (i, (_, m)) in mats.iter().enumerate() {
        save_matrix(m, &dir.join(format!("qb_{i}.csv")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(CliError::Csv(e)) if matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
