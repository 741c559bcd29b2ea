//! `microcavity`: configs and measured traces in, CSV/JSON artifacts out.
//!
//! Exit status: 0 success, 1 analysis failure, 2 usage or I/O error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{ArgGroup, Args, Parser, Subcommand};

use commands::{ReportOverrides, StackOutput};
use config::ProjectConfig;
use output::{Format, Sink};

#[derive(Debug, Parser)]
#[command(
    name = "microcavity",
    version,
    about = "Open-microcavity optics, emitter and cavity-QED toolkit"
)]
struct Cli {
    /// JSON project config; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's output_dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mirror or membrane-on-mirror stack: spectrum, field profile or implantation overlap.
    #[command(group(ArgGroup::new("what").args(["spectrum", "field", "overlap"])))]
    Stack {
        /// R/T/A spectrum over the optics range (default).
        #[arg(long)]
        spectrum: bool,
        /// |E|² depth profile at the field wavelength.
        #[arg(long)]
        field: bool,
        /// Overlap of the implantation window with the field.
        #[arg(long)]
        overlap: bool,
    },
    /// Resonant air gap against wavelength, classified air-like or diamond-like.
    Dispersion {
        #[arg(long)]
        wavelength_start_nm: Option<f64>,
        #[arg(long)]
        wavelength_stop_nm: Option<f64>,
        /// Ignore the configured membrane.
        #[arg(long)]
        bare: bool,
    },
    /// Cavity-QED parameter table with the origin of every row.
    Report(ReportArgs),
    /// Fit measured traces.
    #[command(subcommand)]
    Analyze(Analyze),
    /// Forward models of the emitter ensemble.
    #[command(subcommand)]
    Emitters(Emitters),
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    finesse: Option<f64>,
    #[arg(long)]
    tau_free_ns: Option<f64>,
    #[arg(long)]
    tau_cavity_ns: Option<f64>,
    #[arg(long)]
    branching_ratio: Option<f64>,
    #[arg(long)]
    mode_number: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Analyze {
    /// Finesse from a length scan across two resonances.
    Scan {
        file: PathBuf,
        #[arg(long)]
        wavelength_nm: Option<f64>,
    },
    /// Exponential lifetime from a time-resolved decay.
    Lifetime {
        file: PathBuf,
        #[arg(long)]
        pulse_end_ns: Option<f64>,
        #[arg(long)]
        guard_samples: Option<usize>,
    },
    /// Inhomogeneous linewidth from cavity-filtered excitation scans.
    Ple {
        /// Scan files or directories of them; each needs `#meta excitation_nm`.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        window_fwhm: Option<f64>,
    },
    /// Four-line fine structure of a zero-phonon spectrum.
    Spectrum { file: PathBuf },
}

#[derive(Debug, Subcommand)]
enum Emitters {
    /// Ensemble zero-phonon spectrum for the configured strain states.
    Spectrum,
    /// Spectra along a strain map.
    Linescan {
        #[arg(long)]
        strain_map: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => ProjectConfig::load(path)?,
        None => ProjectConfig::default(),
    };
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(|d| cfg.resolve(d)))
        .unwrap_or_else(|| PathBuf::from("."));
    let fmt = cli.format;
    let written = match cli.command {
        Command::Stack { field, overlap, .. } => {
            let what = match (field, overlap) {
                (true, _) => StackOutput::Field,
                (_, true) => StackOutput::Overlap,
                _ => StackOutput::Spectrum,
            };
            commands::stack(&cfg, what, fmt, &Sink::new(out)?)?
        }
        Command::Dispersion {
            wavelength_start_nm,
            wavelength_stop_nm,
            bare,
        } => {
            if let Some(v) = wavelength_start_nm {
                cfg.dispersion.wavelength_start_nm = v;
            }
            if let Some(v) = wavelength_stop_nm {
                cfg.dispersion.wavelength_stop_nm = v;
            }
            if bare {
                cfg.membrane = None;
            }
            commands::dispersion(&cfg, fmt, &Sink::new(out)?)?
        }
        Command::Report(a) => {
            let over = ReportOverrides {
                finesse_experimental: a.finesse,
                tau_free_ns: a.tau_free_ns,
                tau_cavity_ns: a.tau_cavity_ns,
                branching_ratio: a.branching_ratio,
                mode_number: a.mode_number,
            };
            commands::report(&cfg, over, fmt, &Sink::new(out)?)?
        }
        Command::Analyze(a) => match a {
            Analyze::Scan { file, wavelength_nm } => {
                commands::analyze_scan(&cfg, &file, wavelength_nm, fmt, &Sink::new(out)?)?
            }
            Analyze::Lifetime {
                file,
                pulse_end_ns,
                guard_samples,
            } => commands::analyze_lifetime(&cfg, &file, pulse_end_ns, guard_samples, fmt, &Sink::new(out)?)?,
            Analyze::Ple { inputs, window_fwhm } => {
                commands::analyze_ple(&cfg, &inputs, window_fwhm, fmt, &Sink::new(out)?)?
            }
            Analyze::Spectrum { file } => commands::analyze_spectrum(&cfg, &file, fmt, &Sink::new(out)?)?,
        },
        Command::Emitters(e) => match e {
            Emitters::Spectrum => commands::emitter_spectrum(&cfg, fmt, &Sink::new(out)?)?,
            Emitters::Linescan { strain_map } => {
                commands::emitter_linescan(&cfg, strain_map.as_deref(), fmt, &Sink::new(out)?)?
            }
        },
    };
    println!("{}", written.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let analysis = err.chain().any(|e| {
                e.downcast_ref::<microcavity::Error>()
                    .is_some_and(|e| e.is_analysis_failure())
            });
            ExitCode::from(if analysis { 1 } else { 2 })
        }
    }
}
