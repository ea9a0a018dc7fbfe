//! Run configuration: defaults, then the JSON file, then command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use fracrate_core::fields::{GridSpec, Profile};
use fracrate_core::quadrature::QuadratureConfig;
use fracrate_core::symbols::PRECISION_MARGIN;
use fracrate_core::verify::BOUND_RADII;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Subcommand and its own parameters. In a config file the `name` must
/// match the subcommand being run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Command {
    Symbols {
        /// Radii `|ξ|` to tabulate.
        #[serde(default)]
        xi: Option<Vec<f64>>,
    },
    Energies {
        /// Adds the real-space path (one dimension only).
        #[serde(default)]
        realspace: bool,
    },
    Flow {
        #[serde(default)]
        horizon: Option<f64>,
        #[serde(default)]
        sample_times: Option<Vec<f64>>,
        /// Write per-time field snapshots for every flow.
        #[serde(default)]
        export_trajectories: bool,
    },
    Verify {
        /// Check ids or names; all checks when absent.
        #[serde(default)]
        only: Option<Vec<String>>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Symbols { .. } => "symbols",
            Command::Energies { .. } => "energies",
            Command::Flow { .. } => "flow",
            Command::Verify { .. } => "verify",
        }
    }
}

/// The file format. Every section is optional; unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub command: Option<Command>,
    pub grid: Option<GridSpec>,
    pub profile: Option<Profile>,
    pub s_values: Option<Vec<f64>>,
    pub quadrature: Option<QuadratureConfig>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Fully resolved configuration, echoed into the output directory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub grid: GridSpec,
    pub profile: Profile,
    pub s_values: Vec<f64>,
    pub quadrature: QuadratureConfig,
    pub output_dir: PathBuf,
    pub format: Format,
}

/// Values given on the command line; `None` means "not given".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub s_values: Option<Vec<f64>>,
    pub dim: Option<usize>,
    pub grid_l: Option<f64>,
    pub grid_m: Option<usize>,
    pub profile: Option<String>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<Format>,
}

pub fn default_s_values(command: &Command) -> Vec<f64> {
    match command {
        Command::Symbols { .. } => vec![0.9],
        Command::Energies { .. } => vec![0.6, 0.75, 0.9, 0.99],
        Command::Flow { .. } | Command::Verify { .. } => vec![0.9, 0.99, 0.999],
    }
}

pub const DEFAULT_HORIZON: f64 = 1.0;
pub const DEFAULT_SAMPLE_TIMES: [f64; 4] = [0.0, 0.1, 0.5, 1.0];

pub fn default_xi() -> Vec<f64> {
    BOUND_RADII.to_vec()
}

pub fn read_file(path: &Path) -> Result<RunConfigFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

/// Layers `flags` over `file` over defaults. The subcommand always comes from
/// the command line; its parameters merge field by field with the file's.
pub fn resolve(cli_command: Command, file: RunConfigFile, flags: Overrides) -> Result<RunConfig, Failure> {
    let command = match file.command {
        None => cli_command,
        Some(from_file) if from_file.name() != cli_command.name() => {
            return Err(Failure::Config(format!(
                "config file describes command '{}' but '{}' was requested",
                from_file.name(),
                cli_command.name()
            )))
        }
        Some(from_file) => merge_command(cli_command, from_file),
    };

    let base_grid = file.grid;
    let dim = flags.dim.or(base_grid.map(|g| g.dim)).unwrap_or(1);
    let default_grid = GridSpec::default_for(dim).map_err(|e| Failure::Config(e.to_string()))?;
    let same_dim_file_grid = base_grid.filter(|g| g.dim == dim);
    let grid = GridSpec {
        dim,
        length: flags.grid_l.or(same_dim_file_grid.map(|g| g.length)).unwrap_or(default_grid.length),
        points: flags.grid_m.or(same_dim_file_grid.map(|g| g.points)).unwrap_or(default_grid.points),
    };
    grid.validate().map_err(|e| Failure::Config(e.to_string()))?;

    let profile = match flags.profile {
        Some(text) => Profile::parse(&text).map_err(|e| Failure::Config(e.to_string()))?,
        None => file.profile.unwrap_or(Profile::Gaussian { sigma: 1.0 }),
    };
    profile.validate().map_err(|e| Failure::Config(e.to_string()))?;

    let s_values = flags.s_values.or(file.s_values).unwrap_or_else(|| default_s_values(&command));
    let quadrature = file.quadrature.unwrap_or_default();
    quadrature.validate().map_err(|e| Failure::Config(e.to_string()))?;

    let config = RunConfig {
        command,
        grid,
        profile,
        s_values,
        quadrature,
        output_dir: flags.output_dir.or(file.output_dir).unwrap_or_else(|| PathBuf::from("fracrate-out")),
        format: flags.format.or(file.format).unwrap_or(Format::Csv),
    };
    validate(&config)?;
    Ok(config)
}

/// Command-line parameters win over the file's, field by field.
fn merge_command(cli: Command, file: Command) -> Command {
    match (cli, file) {
        (Command::Symbols { xi }, Command::Symbols { xi: f }) => Command::Symbols { xi: xi.or(f) },
        (Command::Energies { realspace }, Command::Energies { realspace: f }) => {
            Command::Energies { realspace: realspace || f }
        }
        (
            Command::Flow { horizon, sample_times, export_trajectories },
            Command::Flow { horizon: fh, sample_times: ft, export_trajectories: fe },
        ) => Command::Flow {
            horizon: horizon.or(fh),
            sample_times: sample_times.or(ft),
            export_trajectories: export_trajectories || fe,
        },
        (Command::Verify { only }, Command::Verify { only: f }) => Command::Verify { only: only.or(f) },
        (cli, _) => cli,
    }
}

fn validate(c: &RunConfig) -> Result<(), Failure> {
    let upper = 1.0 - PRECISION_MARGIN;
    if let Some(&s) = c.s_values.iter().find(|&&s| !(s > 0.0 && s < upper)) {
        return Err(Failure::Config(format!("s values must lie in (0, {upper}); got {s}")));
    }
    match &c.command {
        Command::Symbols { xi: Some(xi) } => {
            if xi.is_empty() {
                return Err(Failure::Config("xi grid is empty".into()));
            }
            if let Some(x) = xi.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                return Err(Failure::Config(format!("xi values must be finite and nonnegative; got {x}")));
            }
        }
        Command::Flow { horizon, sample_times, .. } => {
            if c.s_values.is_empty() {
                return Err(Failure::Config("flow needs at least one s value".into()));
            }
            if let Some(&s) = c.s_values.iter().find(|&&s| s <= 0.5) {
                return Err(Failure::Config(format!("flows need s > 1/2; got {s}")));
            }
            if c.s_values.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Failure::Config("flow s values must be strictly ascending".into()));
            }
            if let Some(t) = horizon {
                if !(*t > 0.0 && t.is_finite()) {
                    return Err(Failure::Config(format!("horizon must be positive; got {t}")));
                }
            }
            if matches!(sample_times, Some(v) if v.is_empty()) {
                return Err(Failure::Config("sample_times is empty".into()));
            }
        }
        Command::Verify { only: Some(only) } if only.is_empty() => {
            return Err(Failure::Config("--only needs at least one check".into()));
        }
        _ => {}
    }
    Ok(())
}
