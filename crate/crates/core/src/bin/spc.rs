use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::LevelFilter;

use spc_core::cli::{run, Command};

#[derive(Parser)]
#[command(name = "spc", version, about = "Bound-state diving in the radial Dirac equation")]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the configuration's "output").
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: all logical cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Critical coupling, threshold state and C0.
    Critical,
    /// Gap eigenvalue along a list of sigma values.
    Track,
    /// Outgoing resonance profiles.
    Resonance,
    /// Fit of the resonance constants.
    Fit,
    /// A single propagation run started from the threshold state.
    Evolve,
    /// Frozen-operator decay times against 4 eps/(k Delta).
    StaticDecay,
    /// Short-time leak probabilities.
    ShortTime,
    /// Decay-time scaling study over epsilon.
    Scaling,
    /// Static versus tent spectra against the resonance profile.
    SpectrumCompare,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Critical => Command::Critical,
            Cmd::Track => Command::Track,
            Cmd::Resonance => Command::Resonance,
            Cmd::Fit => Command::Fit,
            Cmd::Evolve => Command::Evolve,
            Cmd::StaticDecay => Command::StaticDecay,
            Cmd::ShortTime => Command::ShortTime,
            Cmd::Scaling => Command::Scaling,
            Cmd::SpectrumCompare => Command::SpectrumCompare,
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    env_logger::Builder::new()
        .filter_level(if args.verbose { LevelFilter::Debug } else { LevelFilter::Warn })
        .init();
    let Some(config) = args.config.as_deref() else {
        eprintln!("error: --config <path> is required");
        return ExitCode::from(2);
    };
    match run(args.command.into(), config, args.out.as_deref(), args.jobs) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
