//! `fracrate`: symbol sweeps, energy reports, flow studies and the
//! verification suite.
//!
//! Exit codes: 0 success, 1 a check failed, 2 numerical or I/O failure,
//! 3 configuration error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{Command, Format, Overrides};

#[derive(Debug)]
pub enum Failure {
    Check,
    Numerical(String),
    Config(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check => 1,
            Failure::Numerical(_) => 2,
            Failure::Config(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "fracrate", version, about = "Second-order fractional energies, operators and gradient flows")]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Fractional orders, comma separated.
    #[arg(long = "s", global = true, value_name = "LIST", allow_hyphen_values = true)]
    s: Option<String>,
    /// Space dimension N.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Box side length L.
    #[arg(long = "grid-L", global = true)]
    grid_l: Option<f64>,
    /// Points per axis M.
    #[arg(long = "grid-M", global = true)]
    grid_m: Option<usize>,
    /// Initial profile, e.g. `gaussian(1)` or `smooth_bump(0.5)`.
    #[arg(long, global = true)]
    profile: Option<String>,
    #[arg(long = "output-dir", global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Tabulate the multipliers and check the bounds on m.
    Symbols {
        /// Radii |ξ|, comma separated.
        #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
        xi: Option<String>,
    },
    /// Decompose the rate and limit energies of the profile.
    Energies {
        /// Also evaluate the real-space path (N = 1).
        #[arg(long)]
        realspace: bool,
    },
    /// Evolve the rate flows and the limit flow and compare them.
    Flow {
        #[arg(long)]
        horizon: Option<f64>,
        /// Sample times, comma separated, starting at 0.
        #[arg(long, value_name = "LIST")]
        times: Option<String>,
        /// Write field snapshots for every flow.
        #[arg(long)]
        export_trajectories: bool,
    },
    /// Run the acceptance checks and write a manifest.
    Verify {
        /// Check ids or names, comma separated.
        #[arg(long, value_name = "LIST")]
        only: Option<String>,
    },
}

fn parse_reals(what: &str, text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|_| Failure::Config(format!("{what}: '{p}' is not a number"))))
        .collect()
}

fn to_command(sub: Sub) -> Result<Command, Failure> {
    Ok(match sub {
        Sub::Symbols { xi } => Command::Symbols { xi: xi.map(|t| parse_reals("--xi", &t)).transpose()? },
        Sub::Energies { realspace } => Command::Energies { realspace },
        Sub::Flow { horizon, times, export_trajectories } => Command::Flow {
            horizon,
            sample_times: times.map(|t| parse_reals("--times", &t)).transpose()?,
            export_trajectories,
        },
        Sub::Verify { only } => Command::Verify {
            only: only.map(|t| t.split(',').map(str::trim).filter(|p| !p.is_empty()).map(String::from).collect()),
        },
    })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(text) = std::env::var("FRACRATE_THREADS") else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("FRACRATE_THREADS must be a positive integer (got '{text}')")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Config(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let file = match &cli.config {
        Some(path) => config::read_file(path)?,
        None => config::RunConfigFile::default(),
    };
    let flags = Overrides {
        s_values: cli.s.as_deref().map(|t| parse_reals("--s", t)).transpose()?,
        dim: cli.dim,
        grid_l: cli.grid_l,
        grid_m: cli.grid_m,
        profile: cli.profile,
        output_dir: cli.output_dir,
        format: cli.format.map(|f| match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }),
    };
    let resolved = config::resolve(to_command(cli.command)?, file, flags)?;
    log::info!("resolved configuration: {resolved:?}");
    let outcome = commands::run(&resolved)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    if outcome.passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let informational = matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion);
            let _ = e.print();
            return ExitCode::from(if informational { 0 } else { Failure::Config(String::new()).code() });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Check => eprintln!("error: one or more checks failed"),
                Failure::Numerical(m) => eprintln!("numerical failure: {m}"),
                Failure::Config(m) => eprintln!("configuration error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
