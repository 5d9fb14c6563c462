//! Domain types shared by every other module: the atom ladder, the layout of
//! connection points, the bosonic environment and the optional mirror.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Rule producing the ladder matrix elements `g_m` of transition `m+1 -> m`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderModel {
    /// `g_m = sqrt(m + 1)`, the transmon / weakly anharmonic oscillator.
    #[default]
    Harmonic,
    /// `g_m = 1` for every transition.
    Uniform,
    /// Explicit table; transitions beyond the table are uncoupled.
    Custom(Vec<f64>),
}

impl LadderModel {
    pub fn coupling(&self, m: usize) -> f64 {
        match self {
            LadderModel::Harmonic => ladder_coupling(m),
            LadderModel::Uniform => 1.0,
            LadderModel::Custom(table) => table.get(m).copied().unwrap_or(0.0),
        }
    }
}

/// Harmonic ladder element `g_m = sqrt(m + 1)`.
pub fn ladder_coupling(m: usize) -> f64 {
    ((m + 1) as f64).sqrt()
}

/// Mean thermal occupation `1 / (exp(ω/T) - 1)`; exactly zero at `T = 0`.
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!(
            "thermal occupation needs omega > 0, got {omega}"
        )));
    }
    if !(temperature >= 0.0) {
        return Err(Error::Domain(format!(
            "temperature must be >= 0, got {temperature}"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// Truncated multi-level ladder with constant anharmonicity,
/// `ω_{m+1,m} = ω_{1,0} + m·α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub levels: usize,
    pub omega10: f64,
    pub anharmonicity: f64,
    #[serde(default)]
    pub ladder: LadderModel,
}

impl AtomSpec {
    pub fn new(levels: usize, omega10: f64, anharmonicity: f64) -> Result<Self> {
        let atom = AtomSpec {
            levels,
            omega10,
            anharmonicity,
            ladder: LadderModel::Harmonic,
        };
        atom.validate()?;
        Ok(atom)
    }

    pub fn two_level(omega10: f64) -> Result<Self> {
        Self::new(2, omega10, 0.0)
    }

    pub fn with_ladder(mut self, ladder: LadderModel) -> Self {
        self.ladder = ladder;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels < 2 {
            return Err(Error::invalid(
                "atom.levels",
                format!("need at least 2 levels, got {}", self.levels),
            ));
        }
        if !self.omega10.is_finite() || !self.anharmonicity.is_finite() {
            return Err(Error::invalid("atom", "frequencies must be finite"));
        }
        for m in 0..self.transitions() {
            let w = self.omega10 + m as f64 * self.anharmonicity;
            if !(w > 0.0) {
                return Err(Error::invalid(
                    "atom.anharmonicity",
                    format!("transition {m} has non-positive frequency {w}"),
                ));
            }
        }
        Ok(())
    }

    /// Number of transitions `M - 1`.
    pub fn transitions(&self) -> usize {
        self.levels - 1
    }

    pub fn transition_frequency(&self, m: usize) -> Result<f64> {
        if m + 1 >= self.levels {
            return Err(Error::Index {
                what: "transition",
                index: m,
                limit: self.levels - 1,
            });
        }
        Ok(self.omega10 + m as f64 * self.anharmonicity)
    }

    /// Bare level energy `ω_m`, with the ground state at zero.
    pub fn level_energy(&self, m: usize) -> Result<f64> {
        if m >= self.levels {
            return Err(Error::Index {
                what: "level",
                index: m,
                limit: self.levels,
            });
        }
        Ok((0..m)
            .map(|j| self.omega10 + j as f64 * self.anharmonicity)
            .sum())
    }

    pub fn ladder_coupling(&self, m: usize) -> f64 {
        self.ladder.coupling(m)
    }

    /// Same ladder shape with a different first transition frequency.
    pub fn with_omega10(&self, omega10: f64) -> Self {
        AtomSpec {
            omega10,
            ..self.clone()
        }
    }
}

/// Connection points of the giant atom along the waveguide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingLayout {
    pub positions: Vec<f64>,
    pub weights: Vec<f64>,
    /// Frequency-independent mode coupling `g_j`.
    pub mode_coupling: f64,
    pub velocity: f64,
}

impl CouplingLayout {
    pub fn new(positions: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let layout = CouplingLayout {
            positions,
            weights,
            mode_coupling: 1.0,
            velocity: 1.0,
        };
        layout.validate()?;
        Ok(layout)
    }

    /// `n` unit-weight points with constant spacing, starting at the origin.
    pub fn symmetric(n: usize, spacing: f64) -> Result<Self> {
        Self::new(
            (0..n).map(|k| k as f64 * spacing).collect(),
            vec![1.0; n],
        )
    }

    pub fn with_mode_coupling(mut self, g: f64) -> Self {
        self.mode_coupling = g;
        self
    }

    pub fn with_velocity(mut self, v: f64) -> Self {
        self.velocity = v;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.positions.is_empty() {
            return Err(Error::invalid("layout.positions", "need at least one point"));
        }
        if self.positions.len() != self.weights.len() {
            return Err(Error::invalid(
                "layout.weights",
                format!(
                    "{} weights for {} positions",
                    self.weights.len(),
                    self.positions.len()
                ),
            ));
        }
        for (k, x) in self.positions.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::invalid(format!("layout.positions[{k}]"), "not finite"));
            }
        }
        for (k, pair) in self.positions.windows(2).enumerate() {
            if !(pair[1] > pair[0]) {
                return Err(Error::invalid(
                    format!("layout.positions[{}]", k + 1),
                    format!(
                        "positions must be strictly increasing ({} after {})",
                        pair[1], pair[0]
                    ),
                ));
            }
        }
        for (k, g) in self.weights.iter().enumerate() {
            if !(*g >= 0.0) || !g.is_finite() {
                return Err(Error::invalid(
                    format!("layout.weights[{k}]"),
                    format!("weights must be finite and >= 0, got {g}"),
                ));
            }
        }
        if !(self.velocity > 0.0) || !self.velocity.is_finite() {
            return Err(Error::invalid("layout.velocity", "must be > 0"));
        }
        if !self.mode_coupling.is_finite() {
            return Err(Error::invalid("layout.mode_coupling", "must be finite"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn is_coupled(&self) -> bool {
        self.weights.iter().any(|&g| g > 0.0) && self.mode_coupling != 0.0
    }

    /// Inter-point phases `φ_k = ω (x_{k+1} - x_k) / v`, `N - 1` of them.
    pub fn phases(&self, omega: f64) -> Vec<f64> {
        self.positions
            .windows(2)
            .map(|p| omega * (p[1] - p[0]) / self.velocity)
            .collect()
    }

    /// Single-point rates `γ_k = 4π g_j² g_k² J`.
    pub fn point_rates(&self, dos_value: f64) -> Vec<f64> {
        self.weights
            .iter()
            .map(|g| 4.0 * PI * (self.mode_coupling * g).powi(2) * dos_value)
            .collect()
    }

    /// Natural frequency unit `2πv/(x₂ - x₁)`, where `φ/2π = 1` between the first two points.
    pub fn natural_frequency(&self) -> Option<f64> {
        match self.positions.as_slice() {
            [x1, x2, ..] => Some(TAU * self.velocity / (x2 - x1)),
            _ => None,
        }
    }

    /// Layout with every weight multiplied by `c`.
    pub fn scaled_weights(&self, c: f64) -> Self {
        CouplingLayout {
            weights: self.weights.iter().map(|g| g * c).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum DensityOfStates {
    Constant(f64),
    /// `J(ω) = c·ω`.
    Ohmic(f64),
}

impl DensityOfStates {
    pub fn eval(&self, omega: f64) -> f64 {
        match *self {
            DensityOfStates::Constant(j0) => j0,
            DensityOfStates::Ohmic(c) => c * omega,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, DensityOfStates::Constant(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub dos: DensityOfStates,
    pub temperature: f64,
    pub cutoff: f64,
}

impl Environment {
    pub fn new(dos: DensityOfStates, temperature: f64, cutoff: f64) -> Result<Self> {
        let env = Environment {
            dos,
            temperature,
            cutoff,
        };
        env.validate()?;
        Ok(env)
    }

    /// Zero-temperature constant density of states, cutoff at `20·omega10`.
    pub fn constant(j0: f64, omega10: f64) -> Result<Self> {
        Self::new(DensityOfStates::Constant(j0), 0.0, 20.0 * omega10)
    }

    pub fn validate(&self) -> Result<()> {
        let coeff = match self.dos {
            DensityOfStates::Constant(v) | DensityOfStates::Ohmic(v) => v,
        };
        if !(coeff >= 0.0) || !coeff.is_finite() {
            return Err(Error::invalid(
                "environment.dos.value",
                format!("J(ω) must be >= 0 for ω >= 0, got coefficient {coeff}"),
            ));
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(Error::invalid("environment.temperature", "must be >= 0"));
        }
        if !(self.cutoff > 0.0) {
            return Err(Error::invalid("environment.cutoff", "must be > 0"));
        }
        Ok(())
    }

    /// The cutoff must lie above every transition in use.
    pub fn check_cutoff(&self, atom: &AtomSpec) -> Result<()> {
        for m in 0..atom.transitions() {
            let w = atom.transition_frequency(m)?;
            if !(self.cutoff > w) {
                return Err(Error::invalid(
                    "environment.cutoff",
                    format!("cutoff {} not above transition {m} at {w}", self.cutoff),
                ));
            }
        }
        Ok(())
    }

    pub fn dos(&self, omega: f64) -> f64 {
        self.dos.eval(omega)
    }
}

/// Perfect mirror to the right of the last connection point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MirrorSpec {
    pub enabled: bool,
    /// Round-trip phase to the mirror and back, reduced to `[0, 2π)`.
    pub phase: f64,
}

impl MirrorSpec {
    pub fn new(phase: f64) -> Self {
        MirrorSpec {
            enabled: true,
            phase: reduce_phase(phase),
        }
    }

    pub fn disabled() -> Self {
        MirrorSpec {
            enabled: false,
            phase: 0.0,
        }
    }

    /// Phase at a frequency `factor` times the one `self.phase` refers to
    /// (fixed mirror distance).
    pub fn scaled(&self, factor: f64) -> Self {
        MirrorSpec {
            enabled: self.enabled,
            phase: reduce_phase(self.phase * factor),
        }
    }
}

pub(crate) fn reduce_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}
