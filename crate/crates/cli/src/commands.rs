//! Subcommand implementations. Each returns a [`Report`]; writing it out is
//! left to the caller.

use std::f64::consts::TAU;

use giant_atom::design::{
    self, DesignTarget, Fig3Preset, FitOptions, ScenarioSettings,
};
use giant_atom::dynamics::{self, DensityMatrix, EvolveOptions};
use giant_atom::slh;
use giant_atom::spectral::{self, ShiftMode};
use giant_atom::{AtomSpec, CouplingLayout, DensityOfStates, Environment, MirrorSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{FrequencyUnit, GridSpec, RunConfig, TargetSpec};
use crate::output::{Cell, Report, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ScenarioKind {
    Inversion,
    Multiphoton,
    Anharmonicity,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Spectrum,
    Symmetric,
    Mirror,
    SlhCheck,
    Simulate,
    Steady,
    Design,
    Scenario(ScenarioKind),
    Preset(String),
}

/// Grid bounds given on the command line; unset parts fall back to the
/// configured or default grid.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GridOverride {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
}

impl GridOverride {
    fn apply(&self, mut grid: GridSpec) -> Result<GridSpec, CliError> {
        if let Some(v) = self.min {
            grid.min = v;
        }
        if let Some(v) = self.max {
            grid.max = v;
        }
        if let Some(v) = self.points {
            grid.points = v;
        }
        grid.validate()?;
        Ok(grid)
    }
}

pub fn run(command: &Command, cfg: &RunConfig, grid: GridOverride) -> Result<Report, CliError> {
    match command {
        Command::Spectrum => spectrum(cfg, grid),
        Command::Symmetric => symmetric(cfg, grid),
        Command::Mirror => mirror(cfg, grid),
        Command::SlhCheck => slh_check(cfg, SLH_CHECK_CASES),
        Command::Simulate => simulate(cfg),
        Command::Steady => steady(cfg),
        Command::Design => design_fit(cfg, grid),
        Command::Scenario(kind) => scenario(cfg, *kind, grid),
        Command::Preset(name) => preset(cfg, name, grid),
    }
}

fn sweep_grid(cfg: &RunConfig, over: GridOverride) -> Result<Vec<f64>, CliError> {
    let default = if cfg.layout.len() >= 2 {
        GridSpec::natural(0.5, 1.5, 201)
    } else {
        GridSpec {
            min: 0.5 * cfg.atom.omega10,
            max: 1.5 * cfg.atom.omega10,
            points: 201,
            unit: FrequencyUnit::Absolute,
        }
    };
    let grid = over.apply(cfg.grid_or(default))?;
    let values = RunConfig::absolute(&grid, cfg.natural_frequency());
    if values.iter().any(|w| !(*w > 0.0)) {
        return Err(CliError::config("grid.min", "frequencies must be > 0"));
    }
    Ok(values)
}

fn phase_grid(cfg: &RunConfig, over: GridOverride, default: GridSpec) -> Result<Vec<f64>, CliError> {
    Ok(over.apply(cfg.grid_or(default))?.values())
}

fn transition_label(m: usize) -> String {
    format!("{}{}", m + 1, m)
}

fn spectrum(cfg: &RunConfig, over: GridOverride) -> Result<Report, CliError> {
    let grid = sweep_grid(cfg, over)?;
    let mirror = cfg.mirror.enabled.then_some(&cfg.mirror);
    let resp = spectral::spectrum_sweep(
        &cfg.layout,
        &cfg.atom,
        &cfg.environment,
        mirror,
        &grid,
        cfg.shift_mode,
        &cfg.quadrature,
    )?;
    let t = cfg.atom.transitions();
    let mut columns = vec!["omega".to_string(), "phi_over_2pi".to_string()];
    columns.extend((0..t).map(|m| format!("gamma_{}", transition_label(m))));
    columns.extend((1..=t).map(|k| format!("delta_{k}")));
    let mut table = Table::new(columns);
    let unit = cfg.natural_frequency();
    for (i, &w) in grid.iter().enumerate() {
        let mut row: Vec<Cell> = vec![w.into(), (w / unit).into()];
        row.extend(resp.rates.iter().map(|c| Cell::from(c[i])));
        row.extend(resp.shifts.iter().map(|c| Cell::from(c[i])));
        table.push(row);
    }
    Ok(Report::new(table).with_meta(&resp.metadata))
}

/// Single-point rate `γ = 4π g_j² J(ω₁₀)` used by the symmetric forms.
fn point_gamma(cfg: &RunConfig) -> f64 {
    let g = cfg.layout.mode_coupling;
    4.0 * std::f64::consts::PI * g * g * cfg.environment.dos(cfg.atom.omega10)
}

#[derive(Serialize)]
struct SymmetricMeta {
    n: usize,
    gamma: f64,
}

fn symmetric(cfg: &RunConfig, over: GridOverride) -> Result<Report, CliError> {
    let n = cfg.layout.len();
    let gamma = point_gamma(cfg);
    let mut table = Table::new([
        "phi_over_2pi",
        "rate_closed",
        "rate_phasor",
        "lamb_closed",
        "lamb_sum",
        "mirror_rate",
        "mirror_lamb",
    ]);
    for nu in phase_grid(cfg, over, GridSpec::natural(0.0, 2.0, 401))? {
        let phi = TAU * nu;
        table.push(vec![
            nu.into(),
            spectral::symmetric_rate(gamma, n, phi).into(),
            (gamma * spectral::phasor_sum_sq(n, phi)).into(),
            spectral::symmetric_lamb_closed(gamma, n, phi).into(),
            spectral::symmetric_lamb(gamma, n, phi).into(),
            spectral::symmetric_mirror_rate(gamma, n, phi).into(),
            spectral::symmetric_mirror_lamb(gamma, n, phi).into(),
        ]);
    }
    Ok(Report::new(table).with_meta(&SymmetricMeta { n, gamma }))
}

fn mirror(cfg: &RunConfig, over: GridOverride) -> Result<Report, CliError> {
    let grid = sweep_grid(cfg, over)?;
    let base = MirrorSpec::new(cfg.mirror.phase);
    let unit = cfg.natural_frequency();
    let with_shifts = cfg.shift_mode != ShiftMode::None;
    let mut table = Table::new([
        "omega",
        "phi_over_2pi",
        "mirror_phase",
        "gamma_open",
        "gamma_mirror",
        "delta_open",
        "delta_mirror",
    ]);
    for &w in &grid {
        let m = base.scaled(w / cfg.atom.omega10);
        let open = spectral::relaxation_rate(w, 0, &cfg.layout, &cfg.environment)?;
        let closed = spectral::mirror_rate(w, &cfg.layout, &m, &cfg.environment)?;
        let (d_open, d_mirror) = if with_shifts {
            let h = spectral::lamb_shift_hilbert(w, &cfg.layout, &cfg.environment, &cfg.quadrature)?.value;
            (h, h + spectral::mirror_lamb_correction(w, &cfg.layout, &m, &cfg.environment)?)
        } else {
            (0.0, 0.0)
        };
        table.push(vec![
            w.into(),
            (w / unit).into(),
            m.phase.into(),
            open.into(),
            closed.into(),
            d_open.into(),
            d_mirror.into(),
        ]);
    }
    Ok(Report::new(table))
}

pub const SLH_CHECK_CASES: usize = 200;
pub const SLH_TOLERANCE: f64 = 1e-12;
pub const HILBERT_TOLERANCE: f64 = 1e-5;

/// Random layout with `N ≤ max_points`, per-point rates `γ_k ∈ [0, 1]` and
/// inter-point phases `φ_k ∈ (0, 2π]` at `ω = 1` (unit velocity, `g_j = 1`,
/// `J = 1`).
pub fn random_layout(rng: &mut ChaCha8Rng, max_points: usize) -> CouplingLayout {
    let n = rng.random_range(1..=max_points);
    let mut positions = Vec::with_capacity(n);
    let mut x = 0.0;
    for k in 0..n {
        if k > 0 {
            x += TAU * (1.0 - rng.random::<f64>());
        }
        positions.push(x);
    }
    let weights = (0..n)
        .map(|_| (rng.random::<f64>() / (4.0 * std::f64::consts::PI)).sqrt())
        .collect();
    CouplingLayout {
        positions,
        weights,
        mode_coupling: 1.0,
        velocity: 1.0,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SlhCheckSummary {
    pub seed: u64,
    pub cases: usize,
    pub max_rate_error: f64,
    pub max_shift_error: f64,
    pub max_hilbert_error: f64,
    pub max_direction_imbalance: f64,
    pub tolerance: f64,
    pub hilbert_tolerance: f64,
    pub pass: bool,
}

impl SlhCheckSummary {
    pub fn message(&self) -> String {
        format!(
            "max |Γ_slh − Γ_continuum| = {:.3e} {} {:.0e}; max |Δ_slh − B| = {:.3e}; \
             max relative |Δ_hilbert − B| = {:.3e}",
            self.max_rate_error,
            if self.max_rate_error < self.tolerance { "<" } else { ">=" },
            self.tolerance,
            self.max_shift_error,
            self.max_hilbert_error,
        )
    }
}

/// Compare the cascaded-network construction with the continuum formulas on
/// `cases` random layouts. Errors are relative to `(Σ_k √γ_k)²`, the largest
/// rate the layout can reach.
pub fn slh_check_summary(seed: u64, cases: usize, quad: &giant_atom::quadrature::PvQuadratureConfig) -> Result<(Table, SlhCheckSummary), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atom = AtomSpec::two_level(1.0)?;
    let env = Environment::new(DensityOfStates::Constant(1.0), 0.0, 20.0)?;
    let mut table = Table::new([
        "case",
        "points",
        "gamma_slh",
        "gamma_continuum",
        "delta_slh",
        "delta_sum",
        "delta_hilbert",
        "rate_error",
        "shift_error",
        "hilbert_error",
    ]);
    let mut s = SlhCheckSummary {
        seed,
        cases,
        max_rate_error: 0.0,
        max_shift_error: 0.0,
        max_hilbert_error: 0.0,
        max_direction_imbalance: 0.0,
        tolerance: SLH_TOLERANCE,
        hilbert_tolerance: HILBERT_TOLERANCE,
        pass: true,
    };
    for case in 0..cases {
        let layout = random_layout(&mut rng, 6);
        let scale: f64 = layout.point_rates(1.0).iter().map(|g| g.sqrt()).sum::<f64>().powi(2).max(f64::MIN_POSITIVE);
        let g = slh::build_giant_atom(&layout, &atom, &env, 0.0)?;
        let (rate, shift) = slh::rate_and_shift_from_triplet(&g, 0.0)?;
        let continuum = spectral::relaxation_rate(1.0, 0, &layout, &env)?;
        let b = spectral::lamb_shift_sum(1.0, &layout, &env);
        let hilbert = spectral::lamb_shift_hilbert(1.0, &layout, &env, quad)?.value;
        let imbalance = (g.l[0][(0, 1)].norm_sqr() - g.l[1][(0, 1)].norm_sqr()).abs() / scale;
        let rate_err = (rate - continuum).abs() / scale;
        let shift_err = (shift - b).abs() / scale;
        let hilbert_err = (hilbert - b).abs() / b.abs().max(scale);
        s.max_rate_error = s.max_rate_error.max(rate_err);
        s.max_shift_error = s.max_shift_error.max(shift_err);
        s.max_hilbert_error = s.max_hilbert_error.max(hilbert_err);
        s.max_direction_imbalance = s.max_direction_imbalance.max(imbalance);
        table.push(vec![
            case.into(),
            layout.len().into(),
            rate.into(),
            continuum.into(),
            shift.into(),
            b.into(),
            hilbert.into(),
            rate_err.into(),
            shift_err.into(),
            hilbert_err.into(),
        ]);
    }
    s.pass = s.max_rate_error < SLH_TOLERANCE
        && s.max_shift_error < SLH_TOLERANCE
        && s.max_direction_imbalance < SLH_TOLERANCE
        && s.max_hilbert_error < HILBERT_TOLERANCE;
    Ok((table, s))
}

fn slh_check(cfg: &RunConfig, cases: usize) -> Result<Report, CliError> {
    let (table, summary) = slh_check_summary(cfg.seed, cases, &cfg.quadrature)?;
    eprintln!("slh-check: {}", summary.message());
    if !summary.pass {
        return Err(CliError::Check(summary.message()));
    }
    Ok(Report::new(table).with_meta(&summary))
}

fn simulate(cfg: &RunConfig) -> Result<Report, CliError> {
    let mirror = cfg.mirror.enabled.then_some(&cfg.mirror);
    let gen = dynamics::build_generator(
        &cfg.atom,
        &cfg.layout,
        &cfg.environment,
        mirror,
        cfg.drive.as_ref(),
        cfg.shift_mode,
        &cfg.quadrature,
    )?;
    let t_max = match cfg.simulation.t_max {
        Some(t) => t,
        None => {
            let rates = spectral::transition_rates(&cfg.atom, &cfg.layout, &cfg.environment, mirror)?;
            if !(rates[0] > 0.0) {
                return Err(CliError::config(
                    "simulation.t_max",
                    "Γ₁₀ vanishes, so the default 10/Γ₁₀ is undefined; set t_max",
                ));
            }
            10.0 / rates[0]
        }
    };
    let points = cfg.simulation.points;
    let times: Vec<f64> = if points == 1 {
        vec![t_max]
    } else {
        (0..points).map(|i| t_max * i as f64 / (points - 1) as f64).collect()
    };
    let rho0 = DensityMatrix::pure(cfg.atom.levels, cfg.simulation.initial)?;
    let traj = dynamics::evolve(&gen, &rho0, &times, &EvolveOptions::default())?;
    let mut columns = vec!["t".to_string()];
    columns.extend((0..cfg.atom.levels).map(|m| format!("p{m}")));
    columns.push("trace".into());
    let mut table = Table::new(columns);
    for (t, rho) in times.iter().zip(&traj) {
        let mut row: Vec<Cell> = vec![(*t).into()];
        row.extend(rho.populations().into_iter().map(Cell::from));
        row.push(rho.trace().into());
        table.push(row);
    }
    Ok(Report::new(table))
}

fn steady(cfg: &RunConfig) -> Result<Report, CliError> {
    let mirror = cfg.mirror.enabled.then_some(&cfg.mirror);
    let gen = dynamics::build_generator(
        &cfg.atom,
        &cfg.layout,
        &cfg.environment,
        mirror,
        cfg.drive.as_ref(),
        cfg.shift_mode,
        &cfg.quadrature,
    )?;
    let rho = dynamics::steady_state(&gen)?;
    let mut table = Table::new(["level", "population"]);
    for (m, p) in rho.populations().into_iter().enumerate() {
        table.push(vec![m.into(), p.into()]);
    }
    Ok(Report::new(table))
}

fn design_fit(cfg: &RunConfig, over: GridOverride) -> Result<Report, CliError> {
    // Natural design units refer to unit spacing: 2πv.
    let unit = TAU * cfg.layout.velocity;
    let env = &cfg.environment;
    let (grid, targets) = match &cfg.design.target {
        TargetSpec::Samples { omega, rate } => {
            if omega.len() != rate.len() {
                return Err(CliError::config("design.target.rate", "needs one rate per omega"));
            }
            (omega.clone(), rate.clone())
        }
        spec => {
            let grid_spec = over.apply(cfg.grid_or(GridSpec::natural(0.25, 1.75, 151)))?;
            let grid = RunConfig::absolute(&grid_spec, unit);
            let layout = match spec {
                TargetSpec::Preset { name } => Fig3Preset::from_name(name)?.layout(),
                TargetSpec::Symmetric { n } => CouplingLayout::symmetric(*n, 1.0)?,
                TargetSpec::Samples { .. } => unreachable!(),
            }
            .with_mode_coupling(cfg.layout.mode_coupling)
            .with_velocity(cfg.layout.velocity);
            let targets = design::response(&layout, &grid, env)?;
            (grid, targets)
        }
    };
    let target = DesignTarget::new(grid.clone(), targets.clone(), env.clone())?.with_normalization(cfg.normalization);
    let opts = FitOptions {
        points: cfg.design.points,
        bounds: cfg.design.bounds.clone(),
        restarts: cfg.design.restarts,
        seed: cfg.seed,
        max_evaluations: cfg.design.max_evaluations,
        mode_coupling: cfg.layout.mode_coupling,
        velocity: cfg.layout.velocity,
        ..FitOptions::default()
    };
    let result = design::fit_layout(&target, &opts)?;
    eprintln!(
        "design: residual {:.6e} (target norm {:.6e}), restart {}, positions {:?}, weights {:?}",
        result.residual,
        target.norm_sq(),
        result.restart,
        result.layout.positions,
        result.layout.weights
    );
    let fitted = design::response(&result.layout, &grid, env)?;
    let mut table = Table::new(["omega", "target", "fitted"]);
    for ((w, t), f) in grid.iter().zip(&targets).zip(&fitted) {
        table.push(vec![(*w).into(), (*t).into(), (*f).into()]);
    }
    Ok(Report::new(table).with_meta(&result))
}

fn scenario_n(cfg: &RunConfig) -> usize {
    cfg.scenario
        .n
        .unwrap_or(if cfg.layout.len() >= 2 { cfg.layout.len() } else { 10 })
}

fn scenario(cfg: &RunConfig, kind: ScenarioKind, over: GridOverride) -> Result<Report, CliError> {
    let mut settings = ScenarioSettings {
        mode_coupling: cfg.scenario.mode_coupling,
        quadrature: cfg.quadrature.clone(),
        ..ScenarioSettings::default()
    };
    let n = scenario_n(cfg);
    match kind {
        ScenarioKind::Inversion => {
            let r = design::scenario_inversion(n, &settings)?;
            let mut table = Table::new(["amplitude", "p0", "p1", "p2", "method", "gamma_10", "gamma_21"]);
            for p in &r.drive {
                table.push(vec![
                    p.amplitude.into(),
                    p.populations[0].into(),
                    p.populations[1].into(),
                    p.populations[2].into(),
                    p.method.as_str().into(),
                    r.gamma_10.into(),
                    r.gamma_21.into(),
                ]);
            }
            Ok(Report::new(table).with_meta(&r))
        }
        ScenarioKind::Multiphoton => {
            let r = design::scenario_multiphoton(n, &settings)?;
            if let Some(note) = &r.note {
                eprintln!("multiphoton: {note}");
            }
            let mut table = Table::new([
                "n",
                "omega10",
                "anharmonicity",
                "gamma",
                "gamma_10",
                "gamma_21",
                "two_photon_frequency",
                "coupling_at_two_photon",
                "coupling_max",
                "at_global_maximum",
                "ideal",
            ]);
            table.push(vec![
                r.n.into(),
                r.omega10.into(),
                r.anharmonicity.into(),
                r.gamma.into(),
                r.gamma_10.into(),
                r.gamma_21.into(),
                r.two_photon_frequency.into(),
                r.coupling_at_two_photon.into(),
                r.coupling_max.into(),
                r.at_global_maximum.into(),
                r.ideal.into(),
            ]);
            Ok(Report::new(table).with_meta(&r))
        }
        ScenarioKind::Anharmonicity => {
            let default = GridSpec::natural(settings.sweep.0, settings.sweep.1, settings.sweep.2);
            let g = over.apply(cfg.grid_or(default))?;
            settings.sweep = (g.min, g.max, g.points);
            let r = design::scenario_anharmonicity(n, &settings)?;
            let mut table = Table::new(["omega10", "delta_10", "delta_21", "anharmonicity_change", "valid"]);
            for row in &r.rows {
                table.push(vec![
                    row.omega10.into(),
                    row.delta_10.into(),
                    row.delta_21.into(),
                    row.anharmonicity_change.into(),
                    row.valid.into(),
                ]);
            }
            Ok(Report::new(table).with_meta(&r))
        }
    }
}

fn preset(cfg: &RunConfig, name: &str, over: GridOverride) -> Result<Report, CliError> {
    let p = Fig3Preset::from_name(name)?;
    let layout = p.layout();
    let peak: f64 = layout.weights.iter().sum::<f64>().powi(2);
    let curve = design::natural_curve(&layout);
    let mut table = Table::new(["phi_over_2pi", "coupling_strength", "normalized"]);
    for nu in phase_grid(cfg, over, GridSpec::natural(0.0, 2.0, 401))? {
        let a = curve(nu);
        table.push(vec![nu.into(), a.into(), (a / peak).into()]);
    }
    let features = design::curve_features(&layout, (0.25, 1.75), 2001);
    #[derive(Serialize)]
    struct Meta<'a> {
        preset: &'a str,
        positions: &'a [f64],
        weights: &'a [f64],
        features: design::CurveFeatures,
    }
    Ok(Report::new(table).with_meta(&Meta {
        preset: p.name(),
        positions: &layout.positions,
        weights: &layout.weights,
        features,
    }))
}
