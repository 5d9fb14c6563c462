//! Frequency-dependent relaxation rates and level shifts.
//!
//! Everything here is driven by the coupling factor
//! `A(ω) = g_j Σ_k g_k exp(iωx_k/v)`: rates follow `4π g_m² J(ω) |A(ω)|²`,
//! level shifts are principal-value integrals over `J(ω)|A(ω)|²`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::{ladder_coupling, thermal_occupation};
use crate::quadrature::{self, Estimate, PvQuadratureConfig};
use crate::{AtomSpec, CouplingLayout, DensityOfStates, Environment, Error, MirrorSpec, Result};

/// Phases closer than this to a multiple of 2π use the regular sum forms.
const NEAR_RESONANCE: f64 = 1e-6;

/// `A(ω) = g_j Σ_k g_k exp(iωx_k/v)`.
pub fn coupling_factor(omega: f64, layout: &CouplingLayout) -> Complex64 {
    let sum: Complex64 = layout
        .positions
        .iter()
        .zip(&layout.weights)
        .map(|(&x, &g)| Complex64::from_polar(g, omega * x / layout.velocity))
        .sum();
    sum * layout.mode_coupling
}

/// `|A(ω)|²`.
pub fn coupling_strength(omega: f64, layout: &CouplingLayout) -> f64 {
    coupling_factor(omega, layout).norm_sqr()
}

/// Largest travel time `(x_N - x_1)/v` across the atom.
fn max_delay(layout: &CouplingLayout) -> f64 {
    match (layout.positions.first(), layout.positions.last()) {
        (Some(a), Some(b)) => (b - a) / layout.velocity,
        _ => 0.0,
    }
}

/// Initial panel width resolving half a period of the fastest oscillation in
/// `|A(ω)|²`.
fn oscillation_panel(layout: &CouplingLayout) -> f64 {
    let tau = max_delay(layout);
    if tau > 0.0 {
        PI / tau
    } else {
        f64::INFINITY
    }
}

fn positive_frequency(omega: f64) -> Result<()> {
    if omega > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("frequency must be > 0, got {omega}")))
    }
}

/// `Γ_{m+1,m}(ω) = 4π g_m² J(ω) |A(ω)|²` with the harmonic ladder `g_m`.
pub fn relaxation_rate(
    omega: f64,
    m: usize,
    layout: &CouplingLayout,
    env: &Environment,
) -> Result<f64> {
    rate_with_ladder(omega, ladder_coupling(m), layout, env)
}

/// Rate for an explicit ladder element `g_m`.
pub fn rate_with_ladder(
    omega: f64,
    ladder: f64,
    layout: &CouplingLayout,
    env: &Environment,
) -> Result<f64> {
    positive_frequency(omega)?;
    Ok(4.0 * PI * ladder * ladder * env.dos(omega) * coupling_strength(omega, layout))
}

/// Decay rate of every transition of `atom`, mirror-aware. The mirror phase
/// refers to `atom.omega10` and scales linearly with frequency.
pub fn transition_rates(
    atom: &AtomSpec,
    layout: &CouplingLayout,
    env: &Environment,
    mirror: Option<&MirrorSpec>,
) -> Result<Vec<f64>> {
    (0..atom.transitions())
        .map(|m| {
            let w = atom.transition_frequency(m)?;
            let g = atom.ladder_coupling(m);
            match mirror.filter(|mr| mr.enabled) {
                Some(mr) => Ok(g * g * mirror_rate(w, layout, &mr.scaled(w / atom.omega10), env)?),
                None => rate_with_ladder(w, g, layout, env),
            }
        })
        .collect()
}

/// How level shifts are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftMode {
    /// Dominant near-resonant term: half the Hilbert transform of the rate,
    /// with `J` frozen at the transition frequency.
    Hilbert,
    /// Bethe-renormalized zero-temperature integral with `J(ω)/ω` weighting.
    Renormalized,
    /// Full Lamb + Stark integral with thermal occupation, up to the cutoff.
    Full,
    /// No level shifts.
    None,
}

impl ShiftMode {
    /// Hilbert mode for a constant density of states, renormalized otherwise.
    pub fn default_for(dos: &DensityOfStates) -> Self {
        if dos.is_constant() {
            ShiftMode::Hilbert
        } else {
            ShiftMode::Renormalized
        }
    }
}

/// Transition frequencies touching level `m`: `(ω_{m+1,m}, ω_{m,m-1})`.
fn adjacent_transitions(m: usize, atom: &AtomSpec) -> Result<(Option<f64>, Option<f64>)> {
    if m >= atom.levels {
        return Err(Error::Index {
            what: "level",
            index: m,
            limit: atom.levels,
        });
    }
    let up = if m + 1 < atom.levels {
        Some(atom.transition_frequency(m)?)
    } else {
        None
    };
    let down = if m >= 1 {
        Some(atom.transition_frequency(m - 1)?)
    } else {
        None
    };
    Ok((up, down))
}

/// Full shift `Δ_m` of level `m`: vacuum (Lamb) and thermal (Stark) parts,
/// integrated over `[0, ω_c]`.
pub fn lamb_stark_shift_full(
    m: usize,
    atom: &AtomSpec,
    layout: &CouplingLayout,
    env: &Environment,
    quad: &PvQuadratureConfig,
) -> Result<f64> {
    let (up, down) = adjacent_transitions(m, atom)?;
    if !layout.is_coupled() {
        return Ok(0.0);
    }
    env.check_cutoff(atom)?;
    let temperature = env.temperature;
    if temperature > 0.0 && env.dos.is_constant() && env.dos(0.0) > 0.0 {
        return Err(Error::Domain(
            "thermal shift diverges at ω → 0 for a constant density of states".into(),
        ));
    }
    let g_up = if up.is_some() { atom.ladder_coupling(m) } else { 0.0 };
    let g_dn = if down.is_some() { atom.ladder_coupling(m - 1) } else { 0.0 };
    // J(ω)|A(ω)|² and J(ω)|A(ω)|² n̄(ω)
    let weight = |w: f64| env.dos(w) * coupling_strength(w, layout);
    let thermal = |w: f64| {
        if temperature == 0.0 {
            0.0
        } else {
            weight(w) * thermal_occupation(w, temperature).unwrap_or(0.0)
        }
    };
    let panel = oscillation_panel(layout);
    let cutoff = env.cutoff;

    let regular = |w: f64| {
        let mut acc = 0.0;
        if let Some(wu) = up {
            acc -= g_up * g_up * (weight(w) + thermal(w)) / (w + wu);
        }
        if let Some(wd) = down {
            acc += g_dn * g_dn * thermal(w) / (w + wd);
        }
        acc
    };
    let mut total = quadrature::integrate_pieces(regular, &quadrature::breakpoints(0.0, cutoff, panel), quad)?;
    if let (Some(wu), true) = (up, temperature > 0.0) {
        total = total
            + quadrature::principal_value(|w| g_up * g_up * thermal(w), wu, 0.0, cutoff, panel, quad)?;
    }
    if let Some(wd) = down {
        total = total
            + quadrature::principal_value(
                |w| -g_dn * g_dn * (weight(w) + thermal(w)),
                wd,
                0.0,
                cutoff,
                panel,
                quad,
            )?;
    }
    Ok(2.0 * total.value)
}

/// Bethe-renormalized zero-temperature shift of level `m`, integrated over
/// `[0, ω_c]` with `J(ω)/ω` weighting.
pub fn lamb_shift_renormalized(
    m: usize,
    atom: &AtomSpec,
    layout: &CouplingLayout,
    env: &Environment,
    quad: &PvQuadratureConfig,
) -> Result<f64> {
    let (up, down) = adjacent_transitions(m, atom)?;
    if !layout.is_coupled() {
        return Ok(0.0);
    }
    env.check_cutoff(atom)?;
    let dos_over_omega: Box<dyn Fn(f64) -> f64> = match env.dos {
        DensityOfStates::Ohmic(c) => Box::new(move |_| c),
        DensityOfStates::Constant(0.0) => Box::new(|_| 0.0),
        DensityOfStates::Constant(_) => {
            return Err(Error::Domain(
                "renormalized shift diverges at ω → 0 for a constant density of states".into(),
            ))
        }
    };
    let weight = |w: f64| dos_over_omega(w) * coupling_strength(w, layout);
    let panel = oscillation_panel(layout);
    let cutoff = env.cutoff;
    let mut total = Estimate::default();
    if let Some(wu) = up {
        let g2 = atom.ladder_coupling(m).powi(2);
        total = total
            + quadrature::integrate_pieces(
                |w| g2 * wu * weight(w) / (w + wu),
                &quadrature::breakpoints(0.0, cutoff, panel),
                quad,
            )?;
    }
    if let Some(wd) = down {
        let g2 = atom.ladder_coupling(m - 1).powi(2);
        total = total
            + quadrature::principal_value(|w| -g2 * wd * weight(w), wd, 0.0, cutoff, panel, quad)?;
    }
    Ok(2.0 * total.value)
}

/// Result of the infinite-range Hilbert-transform shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HilbertShift {
    /// `-2 PV ∫ J(ω₀)|A(ω)|²/(ω-ω₀) dω` over the whole real line.
    pub value: f64,
    /// Analytic contribution of `|ω-ω₀| > W·ω₀` already included in `value`.
    pub tail: f64,
    /// Quadrature error estimate of the truncated part.
    pub error: f64,
}

/// Near-resonant shift of a two-level transition at `omega10`: half the
/// Hilbert transform of the rate, with `J` frozen at `J(ω₀)`.
pub fn lamb_shift_hilbert(
    omega10: f64,
    layout: &CouplingLayout,
    env: &Environment,
    quad: &PvQuadratureConfig,
) -> Result<HilbertShift> {
    positive_frequency(omega10)?;
    let j0 = env.dos(omega10);
    if layout.len() < 2 || j0 == 0.0 || !layout.is_coupled() {
        // |A|² is constant (or zero) and the odd kernel integrates to zero.
        return Ok(HilbertShift {
            value: 0.0,
            tail: 0.0,
            error: 0.0,
        });
    }
    let half_width = quad.hilbert_half_width * omega10;
    let f = |w: f64| j0 * coupling_strength(w, layout);
    let folded =
        quadrature::principal_value_symmetric(f, omega10, half_width, oscillation_panel(layout), quad)?;

    // Beyond the truncation, f(ω₀+u) - f(ω₀-u) = -2 J g_j² Σ g_k g_l sin(ω₀τ) sin(uτ)
    // and ∫_L^∞ sin(uτ)/u du = π/2 - Si(Lτ) for τ > 0.
    let gj2 = layout.mode_coupling * layout.mode_coupling;
    let mut tail = 0.0;
    let n = layout.len();
    for k in 0..n {
        for l in (k + 1)..n {
            let tau = (layout.positions[l] - layout.positions[k]) / layout.velocity;
            let gg = layout.weights[k] * layout.weights[l];
            tail += gg
                * (omega10 * tau).sin()
                * (std::f64::consts::FRAC_PI_2 - quadrature::sine_integral(half_width * tau));
        }
    }
    let tail = -4.0 * j0 * gj2 * tail;
    Ok(HilbertShift {
        value: -2.0 * (folded.value + tail),
        tail: -2.0 * tail,
        error: 2.0 * folded.error,
    })
}

/// Closed-form shift `B = Σ_{k<l} √(γ_k γ_l) sin(ω(x_l-x_k)/v)` with
/// `γ_k = 4π g_j² g_k² J(ω)`.
pub fn lamb_shift_sum(omega: f64, layout: &CouplingLayout, env: &Environment) -> f64 {
    let rates = layout.point_rates(env.dos(omega));
    let n = layout.len();
    let mut b = 0.0;
    for k in 0..n {
        for l in (k + 1)..n {
            let phase = omega * (layout.positions[l] - layout.positions[k]) / layout.velocity;
            b += (rates[k] * rates[l]).sqrt() * phase.sin();
        }
    }
    b
}

/// Left- and right-moving amplitudes `A_L`, `A_R` and the total phase `φ_Σ`
/// across the atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalAmplitudes {
    pub left: Complex64,
    pub right: Complex64,
    pub phase_sum: f64,
}

pub fn directional_amplitudes(
    omega: f64,
    layout: &CouplingLayout,
    env: &Environment,
) -> DirectionalAmplitudes {
    let rates = layout.point_rates(env.dos(omega));
    let first = layout.positions[0];
    let last = *layout.positions.last().unwrap_or(&first);
    let v = layout.velocity;
    let mut left = Complex64::new(0.0, 0.0);
    let mut right = Complex64::new(0.0, 0.0);
    for (x, g) in layout.positions.iter().zip(&rates) {
        let amp = (g / 2.0).sqrt();
        left += Complex64::from_polar(amp, omega * (x - first) / v);
        right += Complex64::from_polar(amp, omega * (last - x) / v);
    }
    DirectionalAmplitudes {
        left,
        right,
        phase_sum: omega * (last - first) / v,
    }
}

/// `Γ^mirror = |A_L + e^{i(φ_Σ+φ_M)} A_R|²`, with `φ_M` taken from `mirror`
/// as the phase at `omega`. A disabled mirror gives the open-waveguide rate.
pub fn mirror_rate(
    omega: f64,
    layout: &CouplingLayout,
    mirror: &MirrorSpec,
    env: &Environment,
) -> Result<f64> {
    positive_frequency(omega)?;
    let amps = directional_amplitudes(omega, layout, env);
    if !mirror.enabled {
        return Ok(amps.left.norm_sqr() + amps.right.norm_sqr());
    }
    let loop_phase = Complex64::from_polar(1.0, amps.phase_sum + mirror.phase);
    Ok((amps.left + loop_phase * amps.right).norm_sqr())
}

/// Mirror addition `Im(A_R² e^{iφ_M})` to the transition shift.
pub fn mirror_lamb_correction(
    omega: f64,
    layout: &CouplingLayout,
    mirror: &MirrorSpec,
    env: &Environment,
) -> Result<f64> {
    positive_frequency(omega)?;
    if !mirror.enabled {
        return Ok(0.0);
    }
    let amps = directional_amplitudes(omega, layout, env);
    Ok((amps.right * amps.right * Complex64::from_polar(1.0, mirror.phase)).im)
}

fn near_resonance(phi: f64) -> bool {
    let r = phi.rem_euclid(TAU);
    r.min(TAU - r) < NEAR_RESONANCE
}

/// `|Σ_{k=0}^{N-1} e^{ikφ}|²`.
pub fn phasor_sum_sq(n: usize, phi: f64) -> f64 {
    (0..n)
        .map(|k| Complex64::from_polar(1.0, k as f64 * phi))
        .sum::<Complex64>()
        .norm_sqr()
}

/// `φ` folded into `[-π, π]`. The closed forms are 2π-periodic, and
/// multiplying an unreduced phase by `N` loses digits that the ratio forms
/// then amplify.
fn fold_phase(phi: f64) -> f64 {
    phi - TAU * (phi / TAU).round()
}

/// Symmetric layout rate `γ sin²(Nφ/2)/sin²(φ/2)`.
pub fn symmetric_rate(gamma: f64, n: usize, phi: f64) -> f64 {
    if near_resonance(phi) {
        return gamma * phasor_sum_sq(n, phi);
    }
    let phi = fold_phase(phi);
    let ratio = (0.5 * n as f64 * phi).sin() / (0.5 * phi).sin();
    gamma * ratio * ratio
}

/// Symmetric layout shift `γ Σ_{k=1}^{N} (N-k) sin(kφ)`.
pub fn symmetric_lamb(gamma: f64, n: usize, phi: f64) -> f64 {
    gamma
        * (1..=n)
            .map(|k| (n - k) as f64 * (k as f64 * phi).sin())
            .sum::<f64>()
}

/// Ratio form `γ (N sin φ - sin Nφ) / (2(1 - cos φ))` of [`symmetric_lamb`].
pub fn symmetric_lamb_closed(gamma: f64, n: usize, phi: f64) -> f64 {
    if near_resonance(phi) {
        return symmetric_lamb(gamma, n, phi);
    }
    let phi = fold_phase(phi);
    let nf = n as f64;
    let half = (0.5 * phi).sin();
    gamma * (nf * phi.sin() - (nf * phi).sin()) / (4.0 * half * half)
}

/// Symmetric layout before a mirror with `φ_M = φ`:
/// `γ sin²(Nφ) / (2 sin²(φ/2))`.
pub fn symmetric_mirror_rate(gamma: f64, n: usize, phi: f64) -> f64 {
    if near_resonance(phi) {
        let fold = Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, n as f64 * phi);
        return 0.5 * fold.norm_sqr() * gamma * phasor_sum_sq(n, phi);
    }
    let phi = fold_phase(phi);
    let s = (n as f64 * phi).sin() / (0.5 * phi).sin();
    0.5 * gamma * s * s
}

/// Symmetric layout before a mirror with `φ_M = φ`:
/// `γ (2N sin φ - sin 2Nφ) / (4(1 - cos φ))`.
pub fn symmetric_mirror_lamb(gamma: f64, n: usize, phi: f64) -> f64 {
    if near_resonance(phi) {
        return symmetric_lamb(gamma, n, phi)
            + 0.5 * (n as f64 * phi).sin() * gamma * phasor_sum_sq(n, phi);
    }
    let phi = fold_phase(phi);
    let nf = n as f64;
    let half = (0.5 * phi).sin();
    gamma * (2.0 * nf * phi.sin() - (2.0 * nf * phi).sin()) / (8.0 * half * half)
}

/// Shift of each excited level relative to the ground state,
/// `Δ_k - Δ_0` for `k = 1..M-1`.
///
/// In Hilbert mode each level is attributed the near-resonant term of its
/// lower transition, `Δ_k = g_{k-1}² (B(ω_{k,k-1}) + mirror)`, and
/// `Δ_0 = 0`.
pub fn level_shifts(
    atom: &AtomSpec,
    layout: &CouplingLayout,
    env: &Environment,
    mirror: Option<&MirrorSpec>,
    mode: ShiftMode,
    quad: &PvQuadratureConfig,
) -> Result<Vec<f64>> {
    let mirror = mirror.filter(|m| m.enabled);
    if mirror.is_some() && !matches!(mode, ShiftMode::Hilbert | ShiftMode::None) {
        return Err(Error::Unsupported(
            "mirror shifts are only available in hilbert mode".into(),
        ));
    }
    let levels = atom.levels;
    match mode {
        ShiftMode::None => Ok(vec![0.0; levels - 1]),
        ShiftMode::Hilbert => (1..levels)
            .map(|k| {
                let w = atom.transition_frequency(k - 1)?;
                let g2 = atom.ladder_coupling(k - 1).powi(2);
                let mut shift = lamb_shift_hilbert(w, layout, env, quad)?.value;
                if let Some(mr) = mirror {
                    shift += mirror_lamb_correction(w, layout, &mr.scaled(w / atom.omega10), env)?;
                }
                Ok(g2 * shift)
            })
            .collect(),
        ShiftMode::Renormalized | ShiftMode::Full => {
            let level = |m: usize| match mode {
                ShiftMode::Full => lamb_stark_shift_full(m, atom, layout, env, quad),
                _ => lamb_shift_renormalized(m, atom, layout, env, quad),
            };
            let ground = level(0)?;
            (1..levels).map(|k| Ok(level(k)? - ground)).collect()
        }
    }
}

/// Descriptive data attached to a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub shift_mode: ShiftMode,
    pub points: usize,
    pub positions: Vec<f64>,
    pub weights: Vec<f64>,
    pub dos: DensityOfStates,
    pub temperature: f64,
    pub cutoff: f64,
    pub mirror_phase: Option<f64>,
    /// Largest analytic tail added to a Hilbert shift (zero otherwise).
    pub hilbert_tail_max: f64,
}

/// Rates and shifts tabulated against the first transition frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResponse {
    /// `ω_{1,0}` values.
    pub grid: Vec<f64>,
    /// `rates[m][i]` is `Γ_{m+1,m}` at grid point `i`.
    pub rates: Vec<Vec<f64>>,
    /// `shifts[k-1][i]` is `Δ_k - Δ_0` at grid point `i`.
    pub shifts: Vec<Vec<f64>>,
    pub metadata: SweepMetadata,
}

struct PointResult {
    rates: Vec<f64>,
    shifts: Vec<f64>,
    tail: f64,
}

/// Sweep the first transition frequency of `atom` over `grid`, keeping the
/// anharmonicity fixed. The mirror phase refers to `atom.omega10`.
pub fn spectrum_sweep(
    layout: &CouplingLayout,
    atom: &AtomSpec,
    env: &Environment,
    mirror: Option<&MirrorSpec>,
    grid: &[f64],
    mode: ShiftMode,
    quad: &PvQuadratureConfig,
) -> Result<SpectralResponse> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("grid", "grid must be strictly increasing"));
    }
    layout.validate()?;
    let mirror = mirror.filter(|m| m.enabled);

    let point = |index: usize, omega: f64| -> Result<PointResult> {
        let wrap = |e: Error| Error::AtGridPoint {
            index,
            omega,
            source: Box::new(e),
        };
        let local = atom.with_omega10(omega);
        local.validate().map_err(wrap)?;
        let local_mirror = mirror.map(|m| m.scaled(omega / atom.omega10));
        let rates = transition_rates(&local, layout, env, local_mirror.as_ref()).map_err(wrap)?;
        let shifts =
            level_shifts(&local, layout, env, local_mirror.as_ref(), mode, quad).map_err(wrap)?;
        let mut tail = 0.0f64;
        if mode == ShiftMode::Hilbert {
            for m in 0..local.transitions() {
                let w = local.transition_frequency(m).map_err(wrap)?;
                tail = tail.max(lamb_shift_hilbert(w, layout, env, quad).map_err(wrap)?.tail.abs());
            }
        }
        Ok(PointResult { rates, shifts, tail })
    };

    #[cfg(feature = "parallel")]
    let results: Vec<Result<PointResult>> = {
        use rayon::prelude::*;
        grid.par_iter().enumerate().map(|(i, &w)| point(i, w)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<PointResult>> =
        grid.iter().enumerate().map(|(i, &w)| point(i, w)).collect();

    let transitions = atom.transitions();
    let mut rates = vec![Vec::with_capacity(grid.len()); transitions];
    let mut shifts = vec![Vec::with_capacity(grid.len()); transitions];
    let mut tail_max = 0.0f64;
    for result in results {
        let p = result?;
        for (col, v) in rates.iter_mut().zip(p.rates) {
            col.push(v);
        }
        for (col, v) in shifts.iter_mut().zip(p.shifts) {
            col.push(v);
        }
        tail_max = tail_max.max(p.tail);
    }
    Ok(SpectralResponse {
        grid: grid.to_vec(),
        rates,
        shifts,
        metadata: SweepMetadata {
            shift_mode: mode,
            points: layout.len(),
            positions: layout.positions.clone(),
            weights: layout.weights.clone(),
            dos: env.dos,
            temperature: env.temperature,
            cutoff: env.cutoff,
            mirror_phase: mirror.map(|m| m.phase),
            hilbert_tail_max: tail_max,
        },
    })
}
