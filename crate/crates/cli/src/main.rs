//! `sfdyn`: simulate, certify, verify Klein-Gordon solutions and sample
//! closed-form orbits.
//!
//! Exit codes: 0 success, 1 a check failed, 2 configuration error,
//! 3 runtime singularity or domain error.

mod commands;
mod failure;
mod settings;
mod setup;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use failure::Failure;
use settings::{preset, Settings, PRESET_NAMES};

#[derive(Debug, Parser)]
#[command(name = "sfdyn", version, about = "Particle dynamics in scalar backgrounds")]
struct Cli {
    /// INI config file, applied after the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Built-in configuration: fig1, fig2, planewave, dilation, free, spacelike, conformal.
    #[arg(long, global = true)]
    preset: Option<String>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutFormat>,
    /// Integrator absolute tolerance.
    #[arg(long, global = true)]
    tol_abs: Option<f64>,
    /// Integrator relative tolerance.
    #[arg(long, global = true)]
    tol_rel: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// `section.key=value`, applied after the config file. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate trajectories and report drift of the monitored quantities.
    Simulate,
    /// Rank and involution test with a classification label.
    Certify,
    /// Convergence tables for a Klein-Gordon solution.
    Kg,
    /// Sample a closed-form orbit.
    Orbit,
}

fn settings(cli: &Cli) -> Result<Settings, Failure> {
    let mut s = Settings::default();
    if let Some(name) = &cli.preset {
        let text = preset(name).ok_or_else(|| {
            Failure::Config(format!("unknown preset {name:?} (known: {})", PRESET_NAMES.join(", ")))
        })?;
        s = Settings::from_ini_str(text)?;
    }
    if let Some(path) = &cli.config {
        s.merge(&Settings::from_file(path)?);
    }
    for kv in &cli.sets {
        s.set_assignment(kv)?;
    }
    if let Some(d) = &cli.out_dir {
        s.set("output.dir", &d.to_string_lossy())?;
    }
    if let Some(f) = cli.format {
        s.set("output.format", match f {
            OutFormat::Csv => "csv",
            OutFormat::Json => "json",
        })?;
    }
    if let Some(v) = cli.tol_abs {
        s.set("tolerance.abs", &v.to_string())?;
    }
    if let Some(v) = cli.tol_rel {
        s.set("tolerance.rel", &v.to_string())?;
    }
    if let Some(v) = cli.seed {
        s.set("run.seed", &v.to_string())?;
    }
    Ok(s)
}

fn run(cli: &Cli) -> Result<serde_json::Value, Failure> {
    let s = settings(cli)?;
    match cli.command {
        Command::Simulate => commands::simulate(&s),
        Command::Certify => commands::certify(&s),
        Command::Kg => commands::kg(&s),
        Command::Orbit => commands::orbit(&s),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("json values serialize"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("sfdyn: {e}");
            e.exit_code()
        }
    }
}
