use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use giant_atom_cli::config::resolve;
use giant_atom_cli::{parse_config, run, CliError, Command, GridOverride, OutputFormat, RawConfig, ScenarioKind};

#[derive(Parser)]
#[command(name = "giant-atom", version, about = "Relaxation rates, Lamb shifts and dynamics of giant atoms")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Rates and level shifts against ω₁₀.
    Spectrum(Common),
    /// Closed forms for a symmetric layout against φ/2π.
    Symmetric(Common),
    /// Open-waveguide and mirror rates and shifts against ω₁₀.
    Mirror(Common),
    /// Cascaded-network construction against the continuum formulas.
    SlhCheck(Common),
    /// Level populations against time.
    Simulate(Common),
    /// Stationary level populations.
    Steady(Common),
    /// Fit a layout to a target rate curve.
    Design(Common),
    /// Three-level application scenarios.
    Scenario {
        #[arg(value_enum)]
        kind: ScenarioKind,
        #[command(flatten)]
        common: Common,
    },
    /// Designed four-point layouts: fig3-a, fig3-b, fig3-c.
    Preset {
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// JSON configuration; built-in defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    grid_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    grid_max: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
}

fn execute(command: Command, common: Common) -> Result<(), CliError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            parse_config(&text)?
        }
        None => resolve(serde_json::from_str::<RawConfig>("{}").expect("empty config parses"))?,
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(path) = common.output {
        cfg.output = Some(path);
    }
    if let Some(format) = common.format {
        cfg.format = format;
    }
    let grid = GridOverride {
        min: common.grid_min,
        max: common.grid_max,
        points: common.grid_points,
    };
    let report = run(&command, &cfg, grid)?;
    let text = match cfg.format {
        OutputFormat::Csv => report.table.to_csv(),
        OutputFormat::Json => report.to_json(),
    };
    match &cfg.output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Sub::Spectrum(c) => (Command::Spectrum, c),
        Sub::Symmetric(c) => (Command::Symmetric, c),
        Sub::Mirror(c) => (Command::Mirror, c),
        Sub::SlhCheck(c) => (Command::SlhCheck, c),
        Sub::Simulate(c) => (Command::Simulate, c),
        Sub::Steady(c) => (Command::Steady, c),
        Sub::Design(c) => (Command::Design, c),
        Sub::Scenario { kind, common } => (Command::Scenario(kind), common),
        Sub::Preset { name, common } => (Command::Preset(name), common),
    };
    match execute(command, common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
