//! `mlpwm`: synthesis, K sweeps, strategy comparison and resonance tables
//! for cascaded H-bridge PWM.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mlpwm::inverter::StrategyKind;

use crate::commands::Context;
use crate::config::{Format, Overrides, RunConfig};
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "mlpwm", version, about = "Multilevel PWM synthesis, spectra and motor resonance risk")]
struct Cli {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true, env = "MLPWM_CONFIG")]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Truncation level of the FM carrier.
    #[arg(long = "k", global = true, allow_negative_numbers = true)]
    k: Option<f64>,

    /// Average carrier cycles per fundamental period.
    #[arg(long, global = true)]
    m_bar: Option<u32>,

    /// Strategy list (repeat or comma-separate): SPWM_I, SPWM_II, SPWM_III, HIPWM_FMTCt.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_strategy)]
    strategy: Vec<StrategyKind>,

    /// Cells per phase.
    #[arg(long, global = true)]
    cells: Option<usize>,

    /// DC voltage per cell, volts.
    #[arg(long, global = true, allow_negative_numbers = true)]
    vdc: Option<f64>,

    /// Fundamental frequency, Hz.
    #[arg(long = "f", global = true, allow_negative_numbers = true)]
    f: Option<f64>,

    /// Modulation index; omit to calibrate to the target line RMS.
    #[arg(long = "ma", global = true, allow_negative_numbers = true)]
    amplitude: Option<f64>,

    /// Samples per fundamental period (power of two, >= 4096).
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Highest harmonic order in tables and THD.
    #[arg(long, global = true)]
    max_order: Option<usize>,

    /// Print the fully resolved configuration as JSON and exit.
    #[arg(long, global = true)]
    print_config: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize one strategy: waveform and harmonic table.
    Synth,
    /// Sweep the truncation level K of the FM carrier.
    SweepK,
    /// Compare strategies at identical topology and carrier order.
    Compare,
    /// Stator and housing resonance table, with optional risk report.
    Resonance {
        /// Harmonic table CSV (as written by `synth`) to score against the resonances.
        #[arg(long)]
        spectrum: Option<PathBuf>,
    },
    /// Sweep, comparison and resonance table with a text summary.
    ReproducePaper,
}

fn parse_strategy(s: &str) -> Result<StrategyKind, String> {
    s.parse().map_err(|e: mlpwm::Error| e.to_string())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    cfg.apply(&Overrides {
        out: cli.out,
        format: cli.format,
        k: cli.k,
        m_bar: cli.m_bar,
        strategies: cli.strategy,
        cells: cli.cells,
        vdc: cli.vdc,
        f: cli.f,
        samples: cli.samples,
        max_order: cli.max_order,
        amplitude: cli.amplitude,
    });
    cfg.validate()?;

    if cli.print_config {
        println!("{}", serde_json::to_string_pretty(&cfg)?);
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(CliError::Config(
            "no subcommand given (synth, sweep-k, compare, resonance, reproduce-paper)".into(),
        ));
    };

    let ctx = Context::new(cfg)?;
    match command {
        Command::Synth => commands::synth(&ctx),
        Command::SweepK => {
            let table = commands::sweep_k(&ctx)?;
            commands::write_table(&ctx, &table, "sweep_k").map(drop)
        }
        Command::Compare => {
            let table = commands::compare(&ctx)?;
            commands::write_table(&ctx, &table, "compare").map(drop)
        }
        Command::Resonance { spectrum } => commands::resonance(&ctx, spectrum.as_deref()),
        Command::ReproducePaper => commands::reproduce(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
