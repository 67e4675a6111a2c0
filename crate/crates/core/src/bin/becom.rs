use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use becom_core::config::{self, Format, Output, RunConfig, SweepVariable};
use becom_core::run::{self, RunOptions};

const EXIT_CONFIG: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "becom",
    version,
    about = "Cavity optomechanics of a ring-trapped condensate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Steady state (and any requested observables) at the configured point.
    Steady(Common),
    /// Evaluate the configured sweep.
    Sweep(Common),
    /// Displacement spectrum of the side mode.
    Spectrum(Common),
    /// Cavity detuning at which the effective detuning vanishes.
    Resonance(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Re-check every Lyapunov solution against its residual.
    #[arg(long)]
    verify: bool,
    /// Worker threads for sweeps.
    #[arg(long, env = "BECOM_JOBS")]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn main() -> ExitCode {
    // Usage errors are configuration errors; clap would otherwise exit with 2.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (preset, common) = match cli.command {
        Command::Steady(c) => (Preset::Steady, c),
        Command::Sweep(c) => (Preset::Sweep, c),
        Command::Spectrum(c) => (Preset::Spectrum, c),
        Command::Resonance(c) => (Preset::Resonance, c),
    };

    let config = match load_config(&common, preset) {
        Ok(c) => c,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let options = RunOptions {
        jobs: common
            .jobs
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        verify: common.verify,
    };
    let result = match run::run(&config, &options) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_SOLVER);
        }
    };

    if let Err(e) = write_output(&config, &result.table) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_IO);
    }
    if result.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for f in &result.failures {
            eprintln!("point {}: {} ({})", f.index, f.status, f.message);
        }
        ExitCode::from(EXIT_SOLVER)
    }
}

#[derive(Clone, Copy)]
enum Preset {
    Steady,
    Sweep,
    Spectrum,
    Resonance,
}

fn load_config(common: &Common, preset: Preset) -> Result<RunConfig, String> {
    let text = match &common.config {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => String::new(),
    };
    let mut config = config::parse_config(&text).map_err(|e| e.to_string())?;
    match preset {
        Preset::Steady => {
            config.sweep = None;
            config.outputs.remove(&Output::Spectrum);
            config.outputs.insert(Output::Steady);
        }
        Preset::Sweep => {
            if config.sweep.is_none() {
                return Err(
                    "the sweep command needs `sweep` and `range` in the configuration".into(),
                );
            }
        }
        Preset::Spectrum => {
            if config
                .sweep
                .is_some_and(|s| s.variable != SweepVariable::Omega)
            {
                return Err("the spectrum command only accepts sweep=omega".into());
            }
            config.outputs.retain(|o| *o == Output::Steady);
            config.outputs.insert(Output::Spectrum);
        }
        Preset::Resonance => {
            if config
                .sweep
                .is_some_and(|s| s.variable == SweepVariable::Omega)
            {
                return Err("the resonance command does not accept sweep=omega".into());
            }
            config.outputs.remove(&Output::Spectrum);
            config.outputs.insert(Output::Resonance);
        }
    }
    if let Some(out) = &common.out {
        config.output_path = Some(out.clone());
    }
    if let Some(format) = common.format {
        config.format = match format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn write_output(config: &RunConfig, table: &run::Table) -> io::Result<()> {
    match &config.output_path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            run::write_table(table, config.format, &mut w)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            run::write_table(table, config.format, &mut w)?;
            w.flush()
        }
    }
}
