//! Inverse design of rate curves and the multi-level application scenarios.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{self, DensityMatrix, DriveSpec, EvolveOptions};
use crate::quadrature::PvQuadratureConfig;
use crate::spectral::{self, ShiftMode};
use crate::{AtomSpec, CouplingLayout, DensityOfStates, Environment, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    Absolute,
    /// Compare after rescaling the computed curve by its best-fit amplitude.
    ShapeOnly,
}

/// Target rate curve `Γ_{1,0}(ω)` sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignTarget {
    pub grid: Vec<f64>,
    pub targets: Vec<f64>,
    pub weights: Vec<f64>,
    #[serde(default)]
    pub normalization: Normalization,
    pub environment: Environment,
}

impl DesignTarget {
    /// Unit weights on every grid point.
    pub fn new(grid: Vec<f64>, targets: Vec<f64>, environment: Environment) -> Result<Self> {
        let weights = vec![1.0; grid.len()];
        let t = DesignTarget {
            grid,
            targets,
            weights,
            normalization: Normalization::Absolute,
            environment,
        };
        t.validate()?;
        Ok(t)
    }

    /// Target sampled from the response of `layout`.
    pub fn from_layout(layout: &CouplingLayout, grid: Vec<f64>, environment: Environment) -> Result<Self> {
        let targets = response(layout, &grid, &environment)?;
        Self::new(grid, targets, environment)
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::invalid("target.grid", "grid is empty"));
        }
        if self.targets.len() != self.grid.len() || self.weights.len() != self.grid.len() {
            return Err(Error::invalid(
                "target",
                "grid, targets and weights must have equal lengths",
            ));
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) || !(self.grid[0] > 0.0) {
            return Err(Error::invalid("target.grid", "must be positive and strictly increasing"));
        }
        if let Some(k) = self.targets.iter().position(|t| !(*t >= 0.0)) {
            return Err(Error::invalid(format!("target.targets[{k}]"), "must be >= 0"));
        }
        if let Some(k) = self.weights.iter().position(|w| !(*w >= 0.0)) {
            return Err(Error::invalid(format!("target.weights[{k}]"), "must be >= 0"));
        }
        self.environment.validate()
    }

    /// `Σ w_i t_i²`.
    pub fn norm_sq(&self) -> f64 {
        self.weights.iter().zip(&self.targets).map(|(w, t)| w * t * t).sum()
    }
}

/// `Γ_{1,0}` of `layout` on `grid`.
pub fn response(layout: &CouplingLayout, grid: &[f64], env: &Environment) -> Result<Vec<f64>> {
    grid.iter().map(|&w| spectral::relaxation_rate(w, 0, layout, env)).collect()
}

fn residual_of(rates: &[f64], target: &DesignTarget) -> f64 {
    let scale = match target.normalization {
        Normalization::Absolute => 1.0,
        Normalization::ShapeOnly => {
            let (mut num, mut den) = (0.0, 0.0);
            for ((r, t), w) in rates.iter().zip(&target.targets).zip(&target.weights) {
                num += w * r * t;
                den += w * r * r;
            }
            if den > 0.0 {
                num / den
            } else {
                0.0
            }
        }
    };
    rates
        .iter()
        .zip(&target.targets)
        .zip(&target.weights)
        .map(|((r, t), w)| {
            let d = scale * r - t;
            w * d * d
        })
        .sum()
}

/// Weighted least-squares distance between the response of `layout` and the
/// target.
pub fn evaluate_objective(layout: &CouplingLayout, target: &DesignTarget) -> Result<f64> {
    layout.validate()?;
    target.validate()?;
    Ok(residual_of(&response(layout, &target.grid, &target.environment)?, target))
}

/// Search box for [`fit_layout`]. The first point sits at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DesignBounds {
    pub min_gap: f64,
    pub max_gap: f64,
    pub max_weight: f64,
}

impl Default for DesignBounds {
    fn default() -> Self {
        DesignBounds {
            min_gap: 0.05,
            max_gap: 3.0,
            max_weight: 5.0,
        }
    }
}

impl DesignBounds {
    fn validate(&self) -> Result<()> {
        if !(self.min_gap > 0.0 && self.max_gap > self.min_gap) {
            return Err(Error::invalid("bounds", "need 0 < min_gap < max_gap"));
        }
        if !(self.max_weight > 0.0) {
            return Err(Error::invalid("bounds.max_weight", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    pub points: usize,
    pub bounds: DesignBounds,
    pub restarts: usize,
    pub seed: u64,
    pub max_evaluations: usize,
    /// Spacing and weight of the starting symmetric layout.
    pub initial_spacing: f64,
    pub initial_weight: f64,
    pub mode_coupling: f64,
    pub velocity: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            points: 4,
            bounds: DesignBounds::default(),
            restarts: 16,
            seed: 0,
            max_evaluations: 20_000,
            initial_spacing: 1.0,
            initial_weight: 1.0,
            mode_coupling: 1.0,
            velocity: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignResult {
    pub layout: CouplingLayout,
    pub residual: f64,
    pub iterations: usize,
    /// Index of the restart that produced `layout` (0 is the symmetric start).
    pub restart: usize,
    /// No restart improved on its starting point.
    pub stagnated: bool,
}

/// Maps unconstrained parameters to a layout: `N-1` gaps then `N` weights,
/// each squashed into its bounds with `tanh`.
struct Parameterization<'a> {
    n: usize,
    bounds: &'a DesignBounds,
    mode_coupling: f64,
    velocity: f64,
}

fn squash(u: f64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * 0.5 * (1.0 + u.tanh())
}

fn unsquash(x: f64, lo: f64, hi: f64) -> f64 {
    let y = (2.0 * (x - lo) / (hi - lo) - 1.0).clamp(-1.0 + 1e-12, 1.0 - 1e-12);
    y.atanh()
}

impl Parameterization<'_> {
    fn dim(&self) -> usize {
        2 * self.n - 1
    }

    fn layout(&self, u: &[f64]) -> CouplingLayout {
        let b = self.bounds;
        let mut positions = Vec::with_capacity(self.n);
        let mut x = 0.0;
        positions.push(x);
        for &ui in &u[..self.n - 1] {
            x += squash(ui, b.min_gap, b.max_gap);
            positions.push(x);
        }
        let weights = u[self.n - 1..]
            .iter()
            .map(|&ui| squash(ui, 0.0, b.max_weight))
            .collect();
        CouplingLayout {
            positions,
            weights,
            mode_coupling: self.mode_coupling,
            velocity: self.velocity,
        }
    }

    fn encode(&self, spacing: f64, weight: f64) -> Vec<f64> {
        let b = self.bounds;
        let mut u = vec![unsquash(spacing, b.min_gap, b.max_gap); self.n - 1];
        u.extend(std::iter::repeat_n(unsquash(weight, 0.0, b.max_weight), self.n));
        u
    }
}

struct Simplex {
    best: Vec<f64>,
    value: f64,
    evaluations: usize,
}

/// Nelder–Mead with standard coefficients, restarted from its own optimum
/// until a restart no longer improves.
fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, start: &[f64], step: f64, max_evals: usize) -> Simplex {
    let mut best = start.to_vec();
    let mut value = f(start);
    let mut evaluations = 1;
    for _ in 0..4 {
        let run = nelder_mead_once(f, &best, step, max_evals.saturating_sub(evaluations));
        evaluations += run.evaluations;
        let improved = run.value < value * (1.0 - 1e-12) && run.value < value;
        if run.value <= value {
            best = run.best;
            value = run.value;
        }
        if !improved || evaluations >= max_evals || value == 0.0 {
            break;
        }
    }
    Simplex {
        best,
        value,
        evaluations,
    }
}

fn nelder_mead_once<F: Fn(&[f64]) -> f64>(f: &F, start: &[f64], step: f64, max_evals: usize) -> Simplex {
    let n = start.len();
    let mut pts: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    let mut evals = n + 1;
    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
    };
    while evals < max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let spread = vals[n] - vals[0];
        let size = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= 1e-15 * vals[0].abs() + 1e-300 || size < 1e-10 {
            break;
        }
        let mut centroid = vec![0.0; n];
        for p in &pts[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / n as f64;
            }
        }
        let reflected = combine(&centroid, &pts[n], -1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < vals[0] {
            let expanded = combine(&centroid, &pts[n], -2.0);
            let fe = f(&expanded);
            evals += 1;
            if fe < fr {
                pts[n] = expanded;
                vals[n] = fe;
            } else {
                pts[n] = reflected;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = reflected;
            vals[n] = fr;
        } else {
            let (target, ft) = if fr < vals[n] { (reflected, fr) } else { (pts[n].clone(), vals[n]) };
            let contracted = combine(&centroid, &target, 0.5);
            let fc = f(&contracted);
            evals += 1;
            if fc < ft {
                pts[n] = contracted;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    pts[i] = combine(&pts[0], &pts[i], 0.5);
                    vals[i] = f(&pts[i]);
                }
                evals += n;
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    Simplex {
        best: pts[best].clone(),
        value: vals[best],
        evaluations: evals,
    }
}

/// Fit an `N`-point layout to the target with seeded multi-start simplex
/// search. Restart 0 starts at the symmetric layout; the others perturb it.
pub fn fit_layout(target: &DesignTarget, opts: &FitOptions) -> Result<DesignResult> {
    target.validate()?;
    opts.bounds.validate()?;
    if opts.points == 0 {
        return Err(Error::invalid("design.points", "need at least one point"));
    }
    let restarts = opts.restarts.max(1);
    let param = Parameterization {
        n: opts.points,
        bounds: &opts.bounds,
        mode_coupling: opts.mode_coupling,
        velocity: opts.velocity,
    };
    let base = param.encode(opts.initial_spacing, opts.initial_weight);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<Vec<f64>> = (0..restarts)
        .map(|r| {
            let jitter = if r == 0 { 0.0 } else { 1.0 };
            base.iter().map(|u| u + jitter * rng.random_range(-1.0..1.0)).collect()
        })
        .collect();
    let objective = |u: &[f64]| -> f64 {
        let layout = param.layout(u);
        match response(&layout, &target.grid, &target.environment) {
            Ok(r) => residual_of(&r, target),
            Err(_) => f64::INFINITY,
        }
    };
    let per_restart = opts.max_evaluations.max(param.dim() + 2);
    let run = |u: &Vec<f64>| {
        let initial = objective(u);
        let s = nelder_mead(&objective, u, 0.3, per_restart);
        (initial, s)
    };

    #[cfg(feature = "parallel")]
    let runs: Vec<(f64, Simplex)> = {
        use rayon::prelude::*;
        starts.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let runs: Vec<(f64, Simplex)> = starts.iter().map(run).collect();

    let stagnated = runs.iter().all(|(initial, s)| !(s.value < *initial));
    if stagnated {
        log::warn!("no restart improved on its starting layout");
    }
    let (restart, best) = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.value.total_cmp(&b.1 .1.value).then(a.0.cmp(&b.0)))
        .map(|(i, (_, s))| (i, s))
        .ok_or_else(|| Error::invalid("design.restarts", "no restarts ran"))?;
    let layout = param.layout(&best.best);
    layout.validate()?;
    Ok(DesignResult {
        layout,
        residual: best.value,
        iterations: best.evaluations,
        restart,
        stagnated,
    })
}

/// Four-point layouts with designed rate curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fig3Preset {
    TwoMaxima,
    FlatMaximum,
    ShallowMinima,
}

impl Fig3Preset {
    pub const ALL: [Fig3Preset; 3] = [Fig3Preset::TwoMaxima, Fig3Preset::FlatMaximum, Fig3Preset::ShallowMinima];

    /// Accepts `two-maxima`, `flat-maximum`, `shallow-minima` or the panel
    /// letters `a`, `b`, `c` (optionally prefixed with `fig3-`).
    pub fn from_name(name: &str) -> Result<Self> {
        let key = name.trim().to_ascii_lowercase();
        let key = key.strip_prefix("fig3-").unwrap_or(&key);
        match key {
            "two-maxima" | "a" => Ok(Fig3Preset::TwoMaxima),
            "flat-maximum" | "b" => Ok(Fig3Preset::FlatMaximum),
            "shallow-minima" | "c" => Ok(Fig3Preset::ShallowMinima),
            _ => Err(Error::UnknownPreset(name.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Fig3Preset::TwoMaxima => "two-maxima",
            Fig3Preset::FlatMaximum => "flat-maximum",
            Fig3Preset::ShallowMinima => "shallow-minima",
        }
    }

    /// Weights and positions in units of `x₂`.
    pub fn parameters(self) -> ([f64; 4], [f64; 4]) {
        match self {
            Fig3Preset::TwoMaxima => ([1.0, 1.0, 1.0, 1.0], [0.0, 1.0, 1.5, 3.0]),
            Fig3Preset::FlatMaximum => ([1.0, 3.0, 3.0, 1.0], [0.0, 1.0, 2.0, 3.5]),
            Fig3Preset::ShallowMinima => ([1.0, 4.0, 4.0, 1.0], [0.0, 1.0, 2.0, 3.0]),
        }
    }

    pub fn layout(self) -> CouplingLayout {
        let (g, x) = self.parameters();
        CouplingLayout {
            positions: x.to_vec(),
            weights: g.to_vec(),
            mode_coupling: 1.0,
            velocity: 1.0,
        }
    }
}

pub fn preset_fig3(name: &str) -> Result<CouplingLayout> {
    Ok(Fig3Preset::from_name(name)?.layout())
}

/// Local extremum of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Maximum,
    Minimum,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Golden-section search for the extremum of `f` in `[a, b]`.
fn golden<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, kind: ExtremumKind) -> f64 {
    let sign = if kind == ExtremumKind::Maximum { -1.0 } else { 1.0 };
    let g = |x: f64| sign * f(x);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = g(d);
        }
    }
    0.5 * (a + b)
}

/// Interior extrema of `f` on `[a, b]`: located on a uniform grid of
/// `samples` points and refined by golden-section search.
pub fn find_extrema<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, samples: usize, kind: ExtremumKind) -> Vec<Extremum> {
    let xs = linspace(a, b, samples.max(3));
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 1..xs.len() - 1 {
        let is = match kind {
            ExtremumKind::Maximum => ys[i] > ys[i - 1] && ys[i] >= ys[i + 1],
            ExtremumKind::Minimum => ys[i] < ys[i - 1] && ys[i] <= ys[i + 1],
        };
        if is {
            let x = golden(f, xs[i - 1], xs[i + 1], kind);
            out.push(Extremum { x, value: f(x) });
        }
    }
    out
}

/// Width of the connected interval around `center` where `f ≥ level`
/// (`above`) or `f ≤ level`, clipped to `[a, b]`. Crossings are bracketed
/// with `step` and bisected.
pub fn region_width<F: Fn(f64) -> f64>(f: &F, center: f64, level: f64, above: bool, a: f64, b: f64, step: f64) -> f64 {
    let inside = |x: f64| if above { f(x) >= level } else { f(x) <= level };
    let edge = |dir: f64| -> f64 {
        let limit = if dir > 0.0 { b } else { a };
        let mut x = center;
        loop {
            let next = x + dir * step;
            if (dir > 0.0 && next >= limit) || (dir < 0.0 && next <= limit) {
                if inside(limit) {
                    return limit;
                }
                return bisect(&inside, x, limit);
            }
            if !inside(next) {
                return bisect(&inside, x, next);
            }
            x = next;
        }
    };
    edge(1.0) - edge(-1.0)
}

fn bisect<P: Fn(f64) -> bool>(inside: &P, mut good: f64, mut bad: f64) -> f64 {
    for _ in 0..100 {
        let mid = 0.5 * (good + bad);
        if inside(mid) {
            good = mid;
        } else {
            bad = mid;
        }
        if (bad - good).abs() < 1e-14 {
            break;
        }
    }
    0.5 * (good + bad)
}

/// `|A|²` of `layout` against `ν = ω (x₂ - x₁) / (2πv)`.
pub fn natural_curve(layout: &CouplingLayout) -> impl Fn(f64) -> f64 + '_ {
    let unit = layout.natural_frequency().unwrap_or(TAU * layout.velocity);
    move |nu: f64| spectral::coupling_strength(nu * unit, layout)
}

/// Features of a designed curve on a window of `ν`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFeatures {
    pub window: (f64, f64),
    pub maximum: Extremum,
    pub maxima: Vec<Extremum>,
    pub minima: Vec<Extremum>,
}

pub fn curve_features(layout: &CouplingLayout, window: (f64, f64), samples: usize) -> CurveFeatures {
    let f = natural_curve(layout);
    let maxima = find_extrema(&f, window.0, window.1, samples, ExtremumKind::Maximum);
    let minima = find_extrema(&f, window.0, window.1, samples, ExtremumKind::Minimum);
    let mut maximum = Extremum {
        x: window.0,
        value: f(window.0),
    };
    for e in maxima
        .iter()
        .copied()
        .chain([Extremum { x: window.1, value: f(window.1) }])
    {
        if e.value > maximum.value {
            maximum = e;
        }
    }
    CurveFeatures {
        window,
        maximum,
        maxima,
        minima,
    }
}

/// Shared settings of the multi-level scenarios: a symmetric layout with
/// unit spacing, constant `J`, zero temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioSettings {
    /// `g_j`; small enough that rates stay well below the anharmonicity.
    pub mode_coupling: f64,
    pub dos: f64,
    /// Drive amplitudes for the inversion sweep, in units of `Γ_{2,1}`.
    pub drive_amplitudes: Vec<f64>,
    /// Sweep of `ω₁₀` in natural units for the anharmonicity scenario.
    pub sweep: (f64, f64, usize),
    pub quadrature: PvQuadratureConfig,
}

impl Default for ScenarioSettings {
    fn default() -> Self {
        ScenarioSettings {
            mode_coupling: 0.003,
            dos: 1.0,
            drive_amplitudes: vec![0.0, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0],
            sweep: (0.9, 1.2, 121),
            quadrature: PvQuadratureConfig::default(),
        }
    }
}

impl ScenarioSettings {
    fn layout(&self, n: usize) -> Result<CouplingLayout> {
        if n < 2 {
            return Err(Error::invalid("scenario.n", "need at least two connection points"));
        }
        Ok(CouplingLayout::symmetric(n, 1.0)?.with_mode_coupling(self.mode_coupling))
    }

    fn environment(&self, omega10: f64) -> Result<Environment> {
        Environment::new(DensityOfStates::Constant(self.dos), 0.0, 20.0 * omega10)
    }

    /// Single-point rate `γ = 4π g_j² J`.
    pub fn point_rate(&self) -> f64 {
        4.0 * std::f64::consts::PI * self.mode_coupling * self.mode_coupling * self.dos
    }
}

/// Rates below this fraction of `N²γ` count as interference zeros.
const ZERO_FRACTION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionPoint {
    pub amplitude: f64,
    pub populations: Vec<f64>,
    /// `steady_state`, or `evolved` when the stationary state is not unique
    /// and the state reached from the ground state is reported instead.
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionReport {
    pub n: usize,
    pub natural_frequency: f64,
    pub omega10: f64,
    pub anharmonicity: f64,
    pub gamma: f64,
    pub gamma_10: f64,
    pub gamma_21: f64,
    pub gamma_10_is_zero: bool,
    pub drive: Vec<InversionPoint>,
    pub inverted: bool,
}

/// Three-level atom with `α = -0.1` and `ω₁₀ = 1.1` (natural units), driven
/// resonantly on `0 ↔ 2`.
pub fn scenario_inversion(n: usize, settings: &ScenarioSettings) -> Result<InversionReport> {
    let layout = settings.layout(n)?;
    let unit = layout.natural_frequency().unwrap_or(TAU);
    let atom = AtomSpec::new(3, 1.1 * unit, -0.1 * unit)?;
    let env = settings.environment(atom.omega10)?;
    let rates = spectral::transition_rates(&atom, &layout, &env, None)?;
    let gamma = settings.point_rate();
    let scale = (n * n) as f64 * gamma;
    let mut drive = Vec::with_capacity(settings.drive_amplitudes.len());
    for &a in &settings.drive_amplitudes {
        let amplitude = a * rates[1];
        let spec = DriveSpec::resonant(amplitude, (0, 2));
        let gen = dynamics::build_generator(
            &atom,
            &layout,
            &env,
            None,
            Some(&spec),
            ShiftMode::None,
            &settings.quadrature,
        )?;
        let (rho, method) = match dynamics::steady_state(&gen) {
            Ok(rho) => (rho, "steady_state"),
            Err(Error::DegenerateKernel { .. }) => {
                let horizon = 100.0 / rates[1].max(f64::MIN_POSITIVE);
                let traj = dynamics::evolve(&gen, &DensityMatrix::pure(3, 0)?, &[horizon], &EvolveOptions::default())?;
                (traj.into_iter().next().ok_or_else(|| Error::Domain("empty trajectory".into()))?, "evolved")
            }
            Err(e) => return Err(e),
        };
        drive.push(InversionPoint {
            amplitude,
            populations: rho.populations(),
            method: method.to_string(),
        });
    }
    let inverted = drive.iter().any(|p| p.populations[1] > p.populations[0]);
    Ok(InversionReport {
        n,
        natural_frequency: unit,
        omega10: atom.omega10,
        anharmonicity: atom.anharmonicity,
        gamma,
        gamma_10: rates[0],
        gamma_21: rates[1],
        gamma_10_is_zero: rates[0] <= ZERO_FRACTION * scale,
        drive,
        inverted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiphotonReport {
    pub n: usize,
    pub natural_frequency: f64,
    pub omega10: f64,
    pub anharmonicity: f64,
    pub gamma: f64,
    pub gamma_10: f64,
    pub gamma_21: f64,
    /// `ω₂₀/2 = (ω₁₀ + ω₂₁)/2`.
    pub two_photon_frequency: f64,
    pub coupling_at_two_photon: f64,
    /// `|A|²` maximum of the layout, `(g_j Σ g_k)²`.
    pub coupling_max: f64,
    pub at_global_maximum: bool,
    /// Both single-photon transitions sit at interference zeros.
    pub ideal: bool,
    pub note: Option<String>,
}

/// Three-level atom with `α = -0.2` and `ω₁₀ = 1.1` (natural units).
pub fn scenario_multiphoton(n: usize, settings: &ScenarioSettings) -> Result<MultiphotonReport> {
    let layout = settings.layout(n)?;
    let unit = layout.natural_frequency().unwrap_or(TAU);
    let atom = AtomSpec::new(3, 1.1 * unit, -0.2 * unit)?;
    let env = settings.environment(atom.omega10)?;
    let rates = spectral::transition_rates(&atom, &layout, &env, None)?;
    let gamma = settings.point_rate();
    let scale = (n * n) as f64 * gamma;
    let w20 = 0.5 * (atom.omega10 + atom.transition_frequency(1)?);
    let at = spectral::coupling_strength(w20, &layout);
    let total: f64 = layout.weights.iter().sum::<f64>() * layout.mode_coupling;
    let coupling_max = total * total;
    let zero10 = rates[0] <= ZERO_FRACTION * scale;
    let zero21 = rates[1] <= ZERO_FRACTION * scale;
    let ideal = zero10 && zero21;
    let note = (!ideal).then(|| {
        format!(
            "N = {n}: interference zeros sit at multiples of 1/{n} in natural units; \
             {} not at a zero",
            match (zero10, zero21) {
                (false, false) => "neither transition is",
                (false, true) => "the 1-0 transition is",
                _ => "the 2-1 transition is",
            }
        )
    });
    Ok(MultiphotonReport {
        n,
        natural_frequency: unit,
        omega10: atom.omega10,
        anharmonicity: atom.anharmonicity,
        gamma,
        gamma_10: rates[0],
        gamma_21: rates[1],
        two_photon_frequency: w20,
        coupling_at_two_photon: at,
        coupling_max,
        at_global_maximum: at >= coupling_max * (1.0 - 1e-12),
        ideal,
        note,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnharmonicityRow {
    /// `ω₁₀` in natural units.
    pub omega10: f64,
    /// Shift of the 1-0 transition, `Δ₁ - Δ₀`.
    pub delta_10: f64,
    /// Shift of the 2-1 transition, `Δ₂ - Δ₁`.
    pub delta_21: f64,
    /// `delta_21 - delta_10`: change of the anharmonicity.
    pub anharmonicity_change: f64,
    /// The change stays below half the bare anharmonicity.
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnharmonicityReport {
    pub n: usize,
    pub natural_frequency: f64,
    pub anharmonicity: f64,
    pub gamma: f64,
    pub shift_mode: ShiftMode,
    pub rows: Vec<AnharmonicityRow>,
    /// `ω₁₀` (natural units) where the anharmonicity change changes sign,
    /// located by bisection between grid points.
    pub sign_changes: Vec<f64>,
}

/// Three-level atom with `α = -0.1` (natural units); `ω₁₀` swept across
/// the first resonance, shifts from the Hilbert term of each transition.
pub fn scenario_anharmonicity(n: usize, settings: &ScenarioSettings) -> Result<AnharmonicityReport> {
    let layout = settings.layout(n)?;
    let unit = layout.natural_frequency().unwrap_or(TAU);
    let alpha = -0.1 * unit;
    let (lo, hi, points) = settings.sweep;
    if !(lo > 0.0 && hi > lo && points >= 2) {
        return Err(Error::invalid("scenario.sweep", "need 0 < min < max and >= 2 points"));
    }
    let change_at = |nu: f64| -> Result<(f64, f64)> {
        let atom = AtomSpec::new(3, nu * unit, alpha)?;
        let env = settings.environment(atom.omega10)?;
        let s = spectral::level_shifts(&atom, &layout, &env, None, ShiftMode::Hilbert, &settings.quadrature)?;
        Ok((s[0], s[1] - s[0]))
    };
    let grid = linspace(lo, hi, points);

    #[cfg(feature = "parallel")]
    let shifts: Vec<Result<(f64, f64)>> = {
        use rayon::prelude::*;
        grid.par_iter().map(|&nu| change_at(nu)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let shifts: Vec<Result<(f64, f64)>> = grid.iter().map(|&nu| change_at(nu)).collect();

    let mut rows = Vec::with_capacity(points);
    for (&nu, s) in grid.iter().zip(shifts) {
        let (d10, d21) = s?;
        let change = d21 - d10;
        rows.push(AnharmonicityRow {
            omega10: nu,
            delta_10: d10,
            delta_21: d21,
            anharmonicity_change: change,
            valid: change.abs() < 0.5 * alpha.abs(),
        });
    }
    let mut sign_changes = Vec::new();
    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.anharmonicity_change == 0.0 {
            sign_changes.push(a.omega10);
        } else if a.anharmonicity_change * b.anharmonicity_change < 0.0 {
            let positive_left = a.anharmonicity_change > 0.0;
            let (mut l, mut r) = (a.omega10, b.omega10);
            for _ in 0..40 {
                let mid = 0.5 * (l + r);
                let (d10, d21) = change_at(mid)?;
                if ((d21 - d10) > 0.0) == positive_left {
                    l = mid;
                } else {
                    r = mid;
                }
            }
            sign_changes.push(0.5 * (l + r));
        }
    }
    Ok(AnharmonicityReport {
        n,
        natural_frequency: unit,
        anharmonicity: alpha,
        gamma: settings.point_rate(),
        shift_mode: ShiftMode::Hilbert,
        rows,
        sign_changes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env() -> Environment {
        Environment::new(DensityOfStates::Constant(1.0), 0.0, 1e3).unwrap()
    }

    #[test]
    fn self_target_has_zero_residual() {
        let layout = Fig3Preset::TwoMaxima.layout();
        let grid = linspace(0.5, 12.0, 200);
        let target = DesignTarget::from_layout(&layout, grid, env()).unwrap();
        assert_eq!(evaluate_objective(&layout, &target).unwrap(), 0.0);
    }

    #[test]
    fn zero_layout_residual_is_target_norm() {
        let layout = CouplingLayout::new(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        let mut target = DesignTarget::new(vec![1.0, 2.0, 3.0], vec![0.5, 1.0, 2.0], env()).unwrap();
        target.weights = vec![1.0, 2.0, 0.5];
        let r = evaluate_objective(&layout, &target).unwrap();
        assert!((r - (0.25 + 2.0 + 2.0)).abs() < 1e-15);
    }

    #[test]
    fn shape_only_ignores_scale() {
        let layout = Fig3Preset::FlatMaximum.layout();
        let grid = linspace(1.0, 10.0, 50);
        let mut target = DesignTarget::from_layout(&layout.scaled_weights(0.3), grid, env())
            .unwrap()
            .with_normalization(Normalization::ShapeOnly);
        assert!(evaluate_objective(&layout, &target).unwrap() < 1e-20 * target.norm_sq());
        target.normalization = Normalization::Absolute;
        assert!(evaluate_objective(&layout, &target).unwrap() > 0.1 * target.norm_sq());
    }

    #[test]
    fn target_validation() {
        assert!(DesignTarget::new(vec![2.0, 1.0], vec![0.0, 0.0], env()).is_err());
        assert!(DesignTarget::new(vec![1.0, 2.0], vec![0.0, -1.0], env()).is_err());
        assert!(DesignTarget::new(vec![], vec![], env()).is_err());
    }

    #[test]
    fn single_point_flat_target() {
        let grid = linspace(1.0, 5.0, 20);
        let gamma = 4.0 * std::f64::consts::PI * 0.49;
        let target = DesignTarget::new(grid.clone(), vec![gamma; 20], env()).unwrap();
        let opts = FitOptions {
            points: 1,
            restarts: 2,
            ..Default::default()
        };
        let fit = fit_layout(&target, &opts).unwrap();
        assert!(fit.residual < 1e-18 * target.norm_sq(), "{}", fit.residual);
        assert!((fit.layout.weights[0] - 0.7).abs() < 1e-8);
    }

    #[test]
    fn fit_is_deterministic() {
        let layout = CouplingLayout::symmetric(3, 1.2).unwrap();
        let target = DesignTarget::from_layout(&layout, linspace(1.0, 8.0, 40), env()).unwrap();
        let opts = FitOptions {
            points: 3,
            restarts: 3,
            seed: 7,
            max_evaluations: 2000,
            ..Default::default()
        };
        assert_eq!(fit_layout(&target, &opts).unwrap(), fit_layout(&target, &opts).unwrap());
    }

    #[test]
    fn presets() {
        assert_eq!(preset_fig3("two-maxima").unwrap().positions, vec![0.0, 1.0, 1.5, 3.0]);
        assert_eq!(preset_fig3("flat-maximum").unwrap().weights, vec![1.0, 3.0, 3.0, 1.0]);
        assert_eq!(preset_fig3("fig3-c").unwrap().weights, vec![1.0, 4.0, 4.0, 1.0]);
        assert!(matches!(preset_fig3("round"), Err(Error::UnknownPreset(_))));
        for p in Fig3Preset::ALL {
            p.layout().validate().unwrap();
            assert_eq!(Fig3Preset::from_name(p.name()).unwrap(), p);
        }
    }

    #[test]
    fn extrema_and_widths_of_cosine() {
        let f = |x: f64| (TAU * x).cos();
        let max = find_extrema(&f, 0.2, 1.8, 101, ExtremumKind::Maximum);
        assert_eq!(max.len(), 1);
        assert!((max[0].x - 1.0).abs() < 1e-7);
        let min = find_extrema(&f, 0.2, 1.8, 101, ExtremumKind::Minimum);
        assert_eq!(min.len(), 2);
        let w = region_width(&f, 1.0, 0.0, true, 0.0, 2.0, 0.01);
        assert!((w - 0.5).abs() < 1e-12);
        let clipped = region_width(&f, 0.5, 0.0, false, 0.4, 2.0, 0.01);
        assert!((clipped - 0.35).abs() < 1e-12);
    }

    #[test]
    fn inversion_operating_point() {
        let s = ScenarioSettings::default();
        let r = scenario_inversion(10, &s).unwrap();
        assert!(r.gamma_10_is_zero);
        assert!((r.gamma_21 - 200.0 * r.gamma).abs() < 1e-9 * r.gamma_21);
        assert_eq!(r.drive[0].amplitude, 0.0);
        assert!((r.drive[0].populations[0] - 1.0).abs() < 1e-9);
        assert!(r.inverted);
    }

    #[test]
    fn multiphoton_zeros() {
        let s = ScenarioSettings::default();
        let r = scenario_multiphoton(10, &s).unwrap();
        assert!(r.ideal && r.at_global_maximum && r.note.is_none());
        let five = scenario_multiphoton(5, &s).unwrap();
        assert!(!five.ideal);
        assert!(five.gamma_10 > 1e-3 * five.gamma);
        assert!(five.note.is_some());
    }

    #[test]
    fn scenarios_need_two_points() {
        let s = ScenarioSettings::default();
        assert!(scenario_inversion(1, &s).is_err());
    }
}
