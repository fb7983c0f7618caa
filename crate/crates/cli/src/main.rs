//! `ssh-lindblad`: data pipelines for the boundary-dissipated SSH chain.

mod commands;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use ssh_lindblad::config::RunConfig;
use ssh_lindblad::oracle::JUMP_FACTOR;

use manifest::{Command, RunManifest};
use output::Format;

#[derive(Parser, Debug)]
#[command(name = "ssh-lindblad", version, about = "Liouvillian spectra, dynamics and dark states of the open SSH chain")]
struct Cli {
    /// Run configuration (`key = value` lines).
    #[arg(long, global = true, env = "SSH_LINDBLAD_CONFIG")]
    config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".", env = "SSH_LINDBLAD_OUT")]
    out: PathBuf,

    #[arg(long, global = true, value_enum, env = "SSH_LINDBLAD_FORMAT")]
    format: Option<Format>,

    /// Worker threads for parameter scans (default: all cores).
    #[arg(long, global = true, env = "SSH_LINDBLAD_THREADS")]
    threads: Option<usize>,

    /// Tolerance for every oracle check (overrides the config `tol`).
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Rapidity table (Re E, Im E, bound flag).
    Rapidity,
    /// Liouvillian eigenvalues and stripe summary.
    Spectrum,
    /// Density trajectory from the fully occupied chain.
    Dynamics,
    /// Liouvillian gap against chain length, with exponential and power-law fits.
    GapScan,
    /// Analytic dark state against the smallest-|E| rapidity.
    DarkState,
    /// Compare against exact diagonalization (N <= 3); exits with status 1 on any breach.
    Validate {
        /// Jump coefficient used by the exact-diagonalization generator.
        #[arg(long, default_value_t = JUMP_FACTOR, hide = true)]
        jump_factor: f64,
    },
    /// Re-run a manifest (a config file with `command = …` and optional `format = …`).
    Run { manifest: PathBuf },
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_config(text: &str, tol: Option<f64>) -> Result<RunConfig> {
    let mut cfg = RunConfig::from_env_and_file(text)?;
    if tol.is_some() {
        cfg.tol = tol;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().context("configuring thread pool")?;
    }
    let (command, format, jump_factor, suite_tol, config_text) = match &cli.command {
        Sub::Run { manifest } => {
            let parsed = manifest::parse_manifest(&read(manifest)?)?;
            (parsed.command, cli.format.or(parsed.format), parsed.jump_factor, cli.tol.or(parsed.suite_tol), parsed.config_text)
        }
        sub => {
            let command = match sub {
                Sub::Rapidity => Command::Rapidity,
                Sub::Spectrum => Command::Spectrum,
                Sub::Dynamics => Command::Dynamics,
                Sub::GapScan => Command::GapScan,
                Sub::DarkState => Command::DarkState,
                Sub::Validate { .. } => Command::Validate,
                Sub::Run { .. } => unreachable!(),
            };
            let jump = if let Sub::Validate { jump_factor } = sub { *jump_factor } else { JUMP_FACTOR };
            let text = cli.config.as_ref().map(read).transpose()?;
            (command, cli.format, jump, cli.tol, text)
        }
    };
    let format = format.unwrap_or(Format::Tsv);
    let config = config_text.as_deref().map(|t| load_config(t, cli.tol)).transpose()?;
    if config.is_none() && command != Command::Validate {
        bail!("`{}` needs a configuration (--config <path>)", command.name());
    }
    if jump_factor != JUMP_FACTOR && command != Command::Validate {
        bail!("jump_factor only applies to `validate`");
    }

    let (out, ok) = match (command, &config) {
        (Command::Validate, Some(cfg)) => commands::validate(std::slice::from_ref(&cfg.model), cfg.tol, jump_factor, cfg.times.clone())?,
        (Command::Validate, None) => commands::validate(&commands::default_validation_suite(), suite_tol, jump_factor, None)?,
        (Command::Rapidity, Some(cfg)) => (commands::rapidity(cfg)?, true),
        (Command::Spectrum, Some(cfg)) => (commands::spectrum(cfg)?, true),
        (Command::Dynamics, Some(cfg)) => (commands::dynamics(cfg)?, true),
        (Command::GapScan, Some(cfg)) => (commands::gap_scan(cfg)?, true),
        (Command::DarkState, Some(cfg)) => (commands::dark_state(cfg)?, true),
        (_, None) => unreachable!(),
    };

    let manifest = RunManifest {
        version: manifest::VERSION.into(),
        command,
        format,
        outputs: output::output_names(command.name(), format, &out),
        jump_factor,
        suite_tol: if config.is_none() { suite_tol } else { None },
        config,
    };
    for path in output::write_outputs(&cli.out, &manifest, &out)? {
        println!("{}", path.display());
    }
    if !ok {
        eprintln!("validation failed: see {}", cli.out.display());
    }
    Ok(ok)
}
