//! JSON run configuration: schema, defaults and validation.

use std::f64::consts::TAU;
use std::path::PathBuf;

use giant_atom::design::{DesignBounds, Fig3Preset, Normalization};
use giant_atom::dynamics::DriveSpec;
use giant_atom::quadrature::PvQuadratureConfig;
use giant_atom::spectral::ShiftMode;
use giant_atom::{AtomSpec, CouplingLayout, DensityOfStates, Environment, MirrorSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyUnit {
    #[default]
    Absolute,
    /// Multiples of `2πv/(x₂ - x₁)`.
    Natural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAtom {
    #[serde(default = "default_levels")]
    pub levels: usize,
    pub omega10: f64,
    #[serde(default)]
    pub anharmonicity: f64,
    #[serde(default)]
    pub unit: FrequencyUnit,
}

fn default_levels() -> usize {
    2
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLayout {
    pub positions: Vec<f64>,
    pub weights: Vec<f64>,
    #[serde(default = "one")]
    pub velocity: f64,
    #[serde(default = "one")]
    pub mode_coupling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEnvironment {
    #[serde(default = "default_dos")]
    pub dos: DensityOfStates,
    #[serde(default)]
    pub temperature: f64,
    /// Defaults to `20·ω₁₀`.
    #[serde(default)]
    pub cutoff: Option<f64>,
}

fn default_seed() -> u64 {
    42
}

fn default_dos() -> DensityOfStates {
    DensityOfStates::Constant(1.0)
}

impl Default for RawEnvironment {
    fn default() -> Self {
        RawEnvironment {
            dos: default_dos(),
            temperature: 0.0,
            cutoff: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RawMirror {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDrive {
    pub amplitude: f64,
    pub pair: (usize, usize),
    #[serde(default)]
    pub detuning: f64,
}

/// Sweep grid over `ω₁₀` (or `φ/2π` for the `symmetric` and `preset`
/// commands, which always read it in natural units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub unit: FrequencyUnit,
}

impl GridSpec {
    pub fn natural(min: f64, max: f64, points: usize) -> Self {
        GridSpec {
            min,
            max,
            points,
            unit: FrequencyUnit::Natural,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(CliError::config("grid", "bounds must be finite"));
        }
        if self.points == 0 {
            return Err(CliError::config("grid.points", "must be >= 1"));
        }
        if self.points > 1 && !(self.max > self.min) {
            return Err(CliError::config("grid.max", "must exceed grid.min"));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let n = self.points - 1;
        (0..=n)
            .map(|i| self.min + (self.max - self.min) * i as f64 / n as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    /// End time; defaults to `10/Γ₁₀`.
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default = "default_sim_points")]
    pub points: usize,
    /// Initial level; defaults to the first excited level.
    #[serde(default = "default_initial")]
    pub initial: usize,
}

fn default_sim_points() -> usize {
    101
}

fn default_initial() -> usize {
    1
}

impl Default for SimulationSpec {
    fn default() -> Self {
        SimulationSpec {
            t_max: None,
            points: default_sim_points(),
            initial: default_initial(),
        }
    }
}

/// Target curve for `design`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    /// Rate curve of one of the designed four-point layouts.
    Preset { name: String },
    /// Rate curve of an `n`-point symmetric layout with unit spacing.
    Symmetric { n: usize },
    /// Explicit `(ω, Γ)` samples (`ω` in the grid unit).
    Samples { omega: Vec<f64>, rate: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpec {
    #[serde(default = "default_design_points")]
    pub points: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_evaluations")]
    pub max_evaluations: usize,
    #[serde(default)]
    pub bounds: DesignBounds,
    #[serde(default = "default_target")]
    pub target: TargetSpec,
}

fn default_design_points() -> usize {
    4
}

fn default_restarts() -> usize {
    16
}

fn default_max_evaluations() -> usize {
    20_000
}

fn default_target() -> TargetSpec {
    TargetSpec::Preset {
        name: Fig3Preset::TwoMaxima.name().into(),
    }
}

impl Default for DesignSpec {
    fn default() -> Self {
        DesignSpec {
            points: default_design_points(),
            restarts: default_restarts(),
            max_evaluations: default_max_evaluations(),
            bounds: DesignBounds::default(),
            target: default_target(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    /// Number of connection points; defaults to the layout size when it has
    /// at least two points, otherwise 10.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default = "default_scenario_coupling")]
    pub mode_coupling: f64,
}

fn default_scenario_coupling() -> f64 {
    giant_atom::design::ScenarioSettings::default().mode_coupling
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            n: None,
            mode_coupling: default_scenario_coupling(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

/// Configuration document as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub atom: Option<RawAtom>,
    pub layout: Option<RawLayout>,
    #[serde(default)]
    pub environment: RawEnvironment,
    #[serde(default)]
    pub mirror: RawMirror,
    #[serde(default)]
    pub drive: Option<RawDrive>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub shift_mode: Option<ShiftMode>,
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default)]
    pub quadrature: PvQuadratureConfig,
    #[serde(default)]
    pub simulation: SimulationSpec,
    #[serde(default)]
    pub design: DesignSpec,
    #[serde(default)]
    pub scenario: ScenarioSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: RawOutput,
}

/// Validated configuration with defaults applied and every frequency in
/// absolute units.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub atom: AtomSpec,
    pub layout: CouplingLayout,
    pub environment: Environment,
    pub mirror: MirrorSpec,
    pub drive: Option<DriveSpec>,
    pub grid: Option<GridSpec>,
    pub shift_mode: ShiftMode,
    pub normalization: Normalization,
    pub quadrature: PvQuadratureConfig,
    pub simulation: SimulationSpec,
    pub design: DesignSpec,
    pub scenario: ScenarioSpec,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

fn natural_unit(layout: &CouplingLayout, field: &str) -> Result<f64, CliError> {
    layout.natural_frequency().ok_or_else(|| {
        CliError::config(
            field,
            "natural units need at least two connection points to define 2πv/(x₂ - x₁)",
        )
    })
}

fn physics(e: giant_atom::Error) -> CliError {
    match e {
        giant_atom::Error::Invalid { field, reason } => CliError::Config { field, reason },
        other => CliError::Core(other),
    }
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Schema {
            path: if path == "." { String::new() } else { path },
            reason: e.into_inner().to_string(),
        }
    })?;
    resolve(raw)
}

/// Apply defaults and validate.
pub fn resolve(raw: RawConfig) -> Result<RunConfig, CliError> {
    let layout = match raw.layout {
        Some(l) => CouplingLayout {
            positions: l.positions,
            weights: l.weights,
            mode_coupling: l.mode_coupling,
            velocity: l.velocity,
        },
        None => CouplingLayout {
            positions: vec![0.0],
            weights: vec![1.0],
            mode_coupling: 1.0,
            velocity: 1.0,
        },
    };
    layout.validate().map_err(physics)?;

    let raw_atom = raw.atom.unwrap_or(RawAtom {
        levels: 2,
        omega10: 1.0,
        anharmonicity: 0.0,
        unit: if layout.len() >= 2 {
            FrequencyUnit::Natural
        } else {
            FrequencyUnit::Absolute
        },
    });
    let scale = match raw_atom.unit {
        FrequencyUnit::Absolute => 1.0,
        FrequencyUnit::Natural => natural_unit(&layout, "atom.unit")?,
    };
    let atom = AtomSpec::new(
        raw_atom.levels,
        raw_atom.omega10 * scale,
        raw_atom.anharmonicity * scale,
    )
    .map_err(|e| match e {
        giant_atom::Error::Invalid { field, reason } => CliError::Config {
            field: if field.starts_with("atom") {
                field
            } else {
                format!("atom.{field}")
            },
            reason,
        },
        other => CliError::Core(other),
    })?;

    let cutoff = raw.environment.cutoff.unwrap_or(20.0 * atom.omega10);
    let environment = Environment::new(raw.environment.dos, raw.environment.temperature, cutoff).map_err(physics)?;
    environment.check_cutoff(&atom).map_err(physics)?;

    let mirror = if raw.mirror.enabled {
        MirrorSpec::new(raw.mirror.phase)
    } else {
        MirrorSpec {
            enabled: false,
            phase: raw.mirror.phase,
        }
    };
    if !raw.mirror.phase.is_finite() {
        return Err(CliError::config("mirror.phase", "must be finite"));
    }

    let drive = raw.drive.map(|d| DriveSpec {
        amplitude: d.amplitude,
        pair: d.pair,
        detuning: d.detuning,
    });
    if let Some(d) = &drive {
        let (a, b) = d.pair;
        if a == b || a.max(b) >= atom.levels {
            return Err(CliError::config(
                "drive.pair",
                format!("levels must differ and be below {}", atom.levels),
            ));
        }
        if !(d.amplitude >= 0.0) {
            return Err(CliError::config("drive.amplitude", "must be >= 0"));
        }
    }

    if let Some(g) = &raw.grid {
        g.validate()?;
        if g.unit == FrequencyUnit::Natural {
            natural_unit(&layout, "grid.unit")?;
        }
    }

    raw.quadrature.validate().map_err(physics)?;
    let shift_mode = raw.shift_mode.unwrap_or_else(|| ShiftMode::default_for(&environment.dos));
    if mirror.enabled && matches!(shift_mode, ShiftMode::Renormalized | ShiftMode::Full) {
        return Err(CliError::config(
            "shift_mode",
            "a mirror is only supported with the hilbert or none shift modes",
        ));
    }
    if raw.simulation.initial >= atom.levels {
        return Err(CliError::config(
            "simulation.initial",
            format!("level {} does not exist (levels = {})", raw.simulation.initial, atom.levels),
        ));
    }
    if let Some(t) = raw.simulation.t_max {
        if !(t > 0.0) {
            return Err(CliError::config("simulation.t_max", "must be > 0"));
        }
    }
    if raw.simulation.points == 0 {
        return Err(CliError::config("simulation.points", "must be >= 1"));
    }
    if raw.design.points == 0 {
        return Err(CliError::config("design.points", "must be >= 1"));
    }
    if let TargetSpec::Preset { name } = &raw.design.target {
        Fig3Preset::from_name(name).map_err(|_| CliError::config("design.target.name", format!("unknown preset '{name}'")))?;
    }

    Ok(RunConfig {
        atom,
        layout,
        environment,
        mirror,
        drive,
        grid: raw.grid,
        shift_mode,
        normalization: raw.normalization,
        quadrature: raw.quadrature,
        simulation: raw.simulation,
        design: raw.design,
        scenario: raw.scenario,
        seed: raw.seed,
        output: raw.output.path,
        format: raw.output.format,
    })
}

impl RunConfig {
    /// Document that parses back to `self`, with every frequency written in
    /// absolute units.
    pub fn to_raw(&self) -> RawConfig {
        RawConfig {
            atom: Some(RawAtom {
                levels: self.atom.levels,
                omega10: self.atom.omega10,
                anharmonicity: self.atom.anharmonicity,
                unit: FrequencyUnit::Absolute,
            }),
            layout: Some(RawLayout {
                positions: self.layout.positions.clone(),
                weights: self.layout.weights.clone(),
                velocity: self.layout.velocity,
                mode_coupling: self.layout.mode_coupling,
            }),
            environment: RawEnvironment {
                dos: self.environment.dos,
                temperature: self.environment.temperature,
                cutoff: Some(self.environment.cutoff),
            },
            mirror: RawMirror {
                enabled: self.mirror.enabled,
                phase: self.mirror.phase,
            },
            drive: self.drive.as_ref().map(|d| RawDrive {
                amplitude: d.amplitude,
                pair: d.pair,
                detuning: d.detuning,
            }),
            grid: self.grid.clone(),
            shift_mode: Some(self.shift_mode),
            normalization: self.normalization,
            quadrature: self.quadrature.clone(),
            simulation: self.simulation.clone(),
            design: self.design.clone(),
            scenario: self.scenario.clone(),
            seed: self.seed,
            output: RawOutput {
                path: self.output.clone(),
                format: self.format,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("config serializes")
    }

    /// `2πv/(x₂ - x₁)`, or `2πv` for a single point.
    pub fn natural_frequency(&self) -> f64 {
        self.layout
            .natural_frequency()
            .unwrap_or(TAU * self.layout.velocity)
    }

    /// Configured grid, or `default` when none is set.
    pub fn grid_or(&self, default: GridSpec) -> GridSpec {
        self.grid.clone().unwrap_or(default)
    }

    /// Values of `grid` in absolute frequency, natural grids scaled by
    /// `natural`.
    pub fn absolute(grid: &GridSpec, natural: f64) -> Vec<f64> {
        let scale = match grid.unit {
            FrequencyUnit::Absolute => 1.0,
            FrequencyUnit::Natural => natural,
        };
        grid.values().into_iter().map(|v| v * scale).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(r#"{"layout": {"positions": [0, 1], "weights": [1, 1]}, "atom": {"omega10": 2.0}}"#).unwrap();
        assert_eq!(cfg.atom.levels, 2);
        assert_eq!(cfg.environment.cutoff, 40.0);
        assert_eq!(cfg.environment.temperature, 0.0);
        assert_eq!(cfg.layout.velocity, 1.0);
        assert_eq!(cfg.shift_mode, ShiftMode::Hilbert);
        assert!(!cfg.mirror.enabled);
    }

    #[test]
    fn natural_units_scale_the_atom() {
        let cfg = parse_config(
            r#"{"layout": {"positions": [0, 0.5], "weights": [1, 1], "velocity": 2},
                "atom": {"omega10": 1.1, "anharmonicity": -0.1, "unit": "natural"}}"#,
        )
        .unwrap();
        let unit = TAU * 2.0 / 0.5;
        assert!((cfg.atom.omega10 - 1.1 * unit).abs() < 1e-12);
        assert!((cfg.atom.anharmonicity + 0.1 * unit).abs() < 1e-12);
    }

    #[test]
    fn negative_weight_names_field() {
        let err = parse_config(r#"{"layout": {"positions": [0, 1, 2], "weights": [1, -1, 1]}, "atom": {"omega10": 1}}"#)
            .unwrap_err();
        match err {
            CliError::Config { field, .. } => assert_eq!(field, "layout.weights[1]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn schema_errors_carry_path() {
        let err = parse_config(r#"{"layout": {"positions": [0, "x"], "weights": [1, 1]}}"#).unwrap_err();
        match err {
            CliError::Schema { path, .. } => assert_eq!(path, "layout.positions[1]"),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_config(r#"{"atom": {"omega10": 1, "colour": 3}}"#).unwrap_err();
        assert!(matches!(err, CliError::Schema { .. }));
    }

    #[test]
    fn unordered_positions_are_rejected() {
        let err = parse_config(r#"{"layout": {"positions": [0, 2, 1], "weights": [1, 1, 1]}, "atom": {"omega10": 1}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("strictly increasing"), "{err}");
    }

    #[test]
    fn natural_unit_needs_two_points() {
        let err = parse_config(r#"{"layout": {"positions": [0], "weights": [1]}, "atom": {"omega10": 1, "unit": "natural"}}"#)
            .unwrap_err();
        assert!(matches!(err, CliError::Config { ref field, .. } if field == "atom.unit"));
    }

    #[test]
    fn round_trip() {
        let cfg = parse_config(
            r#"{"layout": {"positions": [0, 1, 2.5], "weights": [1, 0.5, 2], "mode_coupling": 0.1},
                "atom": {"levels": 3, "omega10": 1.05, "anharmonicity": -0.1, "unit": "natural"},
                "environment": {"dos": {"type": "ohmic", "value": 0.3}, "temperature": 0.2},
                "mirror": {"enabled": true, "phase": 7.0},
                "shift_mode": "hilbert",
                "drive": {"amplitude": 0.01, "pair": [0, 2]},
                "grid": {"min": 0.8, "max": 1.2, "points": 11, "unit": "natural"},
                "seed": 9}"#,
        )
        .unwrap();
        assert_eq!(parse_config(&cfg.to_json()).unwrap(), cfg);
    }
}
