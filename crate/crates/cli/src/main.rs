mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use minsurf_core::Error;

use report::Report;

#[derive(Parser, Debug)]
#[command(name = "minsurf", version, about = "Gluing checks for minimal surfaces with catenoidal ends")]
struct Cli {
    /// Write the JSON report to PATH, or `-` for stdout.
    #[arg(long, global = true, value_name = "PATH|-")]
    json: Option<String>,
    /// `key = value` file; command line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Zero the timing field so reports are byte-identical across runs.
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Residuals and node identities at the central configuration.
    Central {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        /// Write the limit graphs as OBJ (plus a curvature CSV next to it).
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Finite-difference Jacobian and its block structure.
    Lemma1 {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Iterated growth vectors for a schedule of end counts.
    Tower {
        /// `minimal`, `geometric:B` or a list `m_2,m_3,...`.
        #[arg(long)]
        schedule: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
        /// CSV table of the rows.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Branching data of the two quartic coverings.
    Hurwitz {
        #[arg(long)]
        t: Option<f64>,
    },
    /// Illustrative OBJ of a catenoid with rescaled limit graphs.
    Figure {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure kinds mapped to exit codes.
enum Failure {
    Usage(anyhow::Error),
    Numeric(anyhow::Error),
}

fn classify(e: anyhow::Error) -> Failure {
    match e.downcast_ref::<Error>() {
        Some(inner) if inner.is_numeric() => Failure::Numeric(e),
        _ => Failure::Usage(e),
    }
}

type ConfigFile = std::collections::BTreeMap<String, String>;

fn run_command(cli: &Cli, file: &ConfigFile) -> Result<Report> {
    match &cli.command {
        Command::Central { m, tol, mesh, grid } => {
            let m = config::pick(*m, file, "m")?.unwrap_or(3);
            let tol = config::pick(*tol, file, "tol")?.unwrap_or(1e-9);
            let grid = config::pick(*grid, file, "grid")?.unwrap_or(32);
            let mesh = config::pick(mesh.clone(), file, "mesh")?;
            commands::central(m, tol, grid, mesh.as_deref())
        }
        Command::Lemma1 { m, step } => {
            let m = config::pick(*m, file, "m")?.unwrap_or(3);
            let step = config::pick(*step, file, "step")?.unwrap_or(1e-6);
            commands::lemma1(m, step)
        }
        Command::Tower { schedule, steps, out } => {
            let schedule = config::pick(schedule.clone(), file, "schedule")?.unwrap_or_else(|| "minimal".into());
            let steps = config::pick(*steps, file, "steps")?;
            let out = config::pick(out.clone(), file, "out")?;
            commands::tower(&schedule, steps, out.as_deref())
        }
        Command::Hurwitz { t } => {
            let t = config::pick(*t, file, "t")?.unwrap_or(0.1);
            commands::hurwitz(t)
        }
        Command::Figure { m, t, grid, out } => {
            let m = config::pick(*m, file, "m")?.unwrap_or(3);
            let t = config::pick(*t, file, "t")?.unwrap_or(0.05);
            let grid = config::pick(*grid, file, "grid")?.unwrap_or(32);
            let out = config::pick(out.clone(), file, "out")?.unwrap_or_else(|| PathBuf::from("figure.obj"));
            commands::figure(m, t, grid, &out)
        }
    }
}

fn emit(json: Option<&str>, r: &Report) -> Result<()> {
    match json {
        Some("-") => println!("{}", serde_json::to_string_pretty(&r.to_json())?),
        Some(path) => {
            std::fs::write(path, serde_json::to_string_pretty(&r.to_json())? + "\n")
                .with_context(|| format!("writing {path}"))?;
            print!("{}", r.to_text());
        }
        None => print!("{}", r.to_text()),
    }
    Ok(())
}

fn load_config(cli: &Cli) -> Result<ConfigFile> {
    match &cli.config {
        Some(p) => config::load(p),
        None => Ok(ConfigFile::new()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let start = Instant::now();
    let result = load_config(&cli).and_then(|file| {
        let mut r = run_command(&cli, &file)?;
        r.seconds = if cli.deterministic { 0.0 } else { start.elapsed().as_secs_f64() };
        for n in r.notes.iter().filter(|n| n.starts_with("warning")) {
            log::warn!("{n}");
        }
        let json = config::pick(cli.json.clone(), &file, "json")?;
        emit(json.as_deref(), &r)?;
        Ok(r)
    });
    match result.map_err(classify) {
        Ok(r) if r.verdict() => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("numeric failure: {e:#}");
            ExitCode::from(3)
        }
    }
}
