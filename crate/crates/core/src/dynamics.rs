//! Multi-level Lindblad master equation: construction, time evolution and
//! stationary states.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::thermal_occupation;
use crate::ops::{self, Operator};
use crate::quadrature::PvQuadratureConfig;
use crate::spectral::{self, ShiftMode};
use crate::{AtomSpec, CouplingLayout, Environment, Error, MirrorSpec, Result};

/// One dissipative channel `rate · D[op]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub rate: f64,
    pub op: Operator,
}

/// `ρ̇ = -i[H, ρ] + Σ rate·D[op]ρ`, with `D[X]ρ = XρX† - ½{X†X, ρ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladGenerator {
    pub hamiltonian: Operator,
    pub channels: Vec<Channel>,
}

impl LindbladGenerator {
    pub fn new(hamiltonian: Operator, channels: Vec<Channel>) -> Result<Self> {
        let gen = LindbladGenerator {
            hamiltonian,
            channels,
        };
        gen.validate()?;
        Ok(gen)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if !self.hamiltonian.is_square() {
            return Err(Error::Dimension("hamiltonian is not square".into()));
        }
        let herm = ops::hermiticity_defect(&self.hamiltonian);
        if herm > 1e-12 * ops::max_abs(&self.hamiltonian).max(1.0) {
            return Err(Error::invalid(
                "generator.hamiltonian",
                format!("not Hermitian (defect {herm:e})"),
            ));
        }
        for (i, ch) in self.channels.iter().enumerate() {
            if ch.op.shape() != (d, d) {
                return Err(Error::Dimension(format!(
                    "channel {i} operator is {:?}, expected ({d}, {d})",
                    ch.op.shape()
                )));
            }
            if !(ch.rate >= 0.0) {
                return Err(Error::invalid(
                    format!("generator.channels[{i}].rate"),
                    format!("rates must be >= 0, got {}", ch.rate),
                ));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    /// `ρ̇` for the given `ρ`.
    pub fn apply(&self, rho: &Operator) -> Operator {
        let i = Complex64::new(0.0, 1.0);
        let mut out = (&self.hamiltonian * rho - rho * &self.hamiltonian) * (-i);
        for ch in &self.channels {
            if ch.rate == 0.0 {
                continue;
            }
            let l = &ch.op;
            let ld = l.adjoint();
            let ldl = &ld * l;
            let term = l * rho * &ld - (&ldl * rho + rho * &ldl) * HALF;
            out += term * Complex64::new(ch.rate, 0.0);
        }
        out
    }

    /// Superoperator on column-stacked `vec(ρ)`, using
    /// `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.
    pub fn liouvillian(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        let id = ops::identity(d);
        let i = Complex64::new(0.0, 1.0);
        let h = &self.hamiltonian;
        let mut sup = (id.kronecker(h) - h.transpose().kronecker(&id)) * (-i);
        for ch in &self.channels {
            if ch.rate == 0.0 {
                continue;
            }
            let l = &ch.op;
            let ldl = l.adjoint() * l;
            let term = l.conjugate().kronecker(l)
                - id.kronecker(&ldl) * HALF
                - ldl.transpose().kronecker(&id) * HALF;
            sup += term * Complex64::new(ch.rate, 0.0);
        }
        sup
    }
}

/// Density matrix on the truncated atom space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positivity to `1e-10`.
    pub fn new(matrix: Operator) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::Dimension("density matrix must be square and non-empty".into()));
        }
        let herm = ops::hermiticity_defect(&matrix);
        if herm > 1e-10 {
            return Err(Error::invalid("rho", format!("not Hermitian (defect {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::invalid("rho", format!("trace {tr} != 1")));
        }
        let rho = DensityMatrix(matrix);
        let min_eig = rho.min_eigenvalue();
        if min_eig < -1e-10 {
            return Err(Error::invalid("rho", format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(rho)
    }

    /// `|level⟩⟨level|`.
    pub fn pure(dim: usize, level: usize) -> Result<Self> {
        if level >= dim {
            return Err(Error::Index {
                what: "level",
                index: level,
                limit: dim,
            });
        }
        Ok(DensityMatrix(ops::projector(dim, level)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(ops::identity(dim) / Complex64::new(dim as f64, 0.0))
    }

    /// Hermitian part of `matrix`, renormalized to unit trace.
    fn from_numeric(matrix: Operator) -> Self {
        let herm = (&matrix + matrix.adjoint()) * HALF;
        let tr = herm.trace().re;
        DensityMatrix(if tr != 0.0 { herm / Complex64::new(tr, 0.0) } else { herm })
    }

    pub fn matrix(&self) -> &Operator {
        &self.0
    }

    pub fn into_matrix(self) -> Operator {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.0 + self.0.adjoint()) * HALF;
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn populations(&self) -> Vec<f64> {
        populations(self)
    }
}

/// Diagonal of `ρ`.
pub fn populations(rho: &DensityMatrix) -> Vec<f64> {
    (0..rho.dim()).map(|i| rho.0[(i, i)].re).collect()
}

/// Coherent drive between two levels, written in the frame rotating with
/// the drive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    /// Rabi amplitude `Ω_d`.
    pub amplitude: f64,
    pub pair: (usize, usize),
    /// Drive frequency minus the shifted transition frequency.
    #[serde(default)]
    pub detuning: f64,
}

impl DriveSpec {
    pub fn resonant(amplitude: f64, pair: (usize, usize)) -> Self {
        DriveSpec {
            amplitude,
            pair,
            detuning: 0.0,
        }
    }

    fn validate(&self, levels: usize) -> Result<()> {
        let (a, b) = self.pair;
        if a == b {
            return Err(Error::invalid("drive.pair", "levels must differ"));
        }
        if a.max(b) >= levels {
            return Err(Error::Index {
                what: "drive level",
                index: a.max(b),
                limit: levels,
            });
        }
        if !(self.amplitude >= 0.0) {
            return Err(Error::invalid("drive.amplitude", "must be >= 0"));
        }
        Ok(())
    }
}

/// Master equation of the giant atom.
///
/// Per transition `m`: `Γ(1+n̄)` on `σ₋^m`, plus `Γ n̄` on `σ₊^m` when
/// `T > 0`. Without drive the Hamiltonian is `Σ (ω_m + Δ_m)|m⟩⟨m|`; with a
/// drive on `(a, b)` it is written in the frame rotating at the drive
/// frequency, `-δ|b⟩⟨b| + (Ω/2)(|a⟩⟨b| + |b⟩⟨a|)`.
pub fn build_generator(
    atom: &AtomSpec,
    layout: &CouplingLayout,
    env: &Environment,
    mirror: Option<&MirrorSpec>,
    drive: Option<&DriveSpec>,
    shift_mode: ShiftMode,
    quad: &PvQuadratureConfig,
) -> Result<LindbladGenerator> {
    atom.validate()?;
    layout.validate()?;
    env.validate()?;
    let dim = atom.levels;
    if let Some(d) = drive {
        d.validate(dim)?;
    }
    let rates = spectral::transition_rates(atom, layout, env, mirror)?;
    if dim > 2 {
        let alpha = atom.anharmonicity.abs();
        if let Some((m, g)) = rates.iter().enumerate().find(|(_, &g)| g >= alpha) {
            log::warn!(
                "rate {g} of transition {m} is not small against |anharmonicity| = {alpha}; \
                 the secular approximation behind the generator is questionable"
            );
        }
    }
    let shifts = spectral::level_shifts(atom, layout, env, mirror, shift_mode, quad)?;

    let mut channels = Vec::with_capacity(2 * atom.transitions());
    for (m, &gamma) in rates.iter().enumerate() {
        let w = atom.transition_frequency(m)?;
        let nbar = thermal_occupation(w, env.temperature)?;
        channels.push(Channel {
            rate: gamma * (1.0 + nbar),
            op: ops::lowering(dim, m),
        });
        if env.temperature > 0.0 {
            channels.push(Channel {
                rate: gamma * nbar,
                op: ops::raising(dim, m),
            });
        }
    }

    let mut hamiltonian = ops::zeros(dim);
    match drive {
        None => {
            for m in 0..dim {
                let shift = if m == 0 { 0.0 } else { shifts[m - 1] };
                hamiltonian[(m, m)] = Complex64::new(atom.level_energy(m)? + shift, 0.0);
            }
        }
        Some(d) => {
            let (a, b) = d.pair;
            hamiltonian[(b, b)] = Complex64::new(-d.detuning, 0.0);
            let half = Complex64::new(0.5 * d.amplitude, 0.0);
            hamiltonian[(a, b)] = half;
            hamiltonian[(b, a)] = half;
        }
    }
    LindbladGenerator::new(hamiltonian, channels)
}

/// Step-size control for [`evolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub initial_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            initial_step: None,
            max_steps: 10_000_000,
        }
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const HALF: Complex64 = Complex64::new(0.5, 0.0);

type State = DVector<Complex64>;

fn vectorize(op: &Operator) -> State {
    DVector::from_column_slice(op.as_slice())
}

fn unvectorize(v: &State, d: usize) -> Operator {
    Operator::from_column_slice(d, d, v.as_slice())
}

/// Integrate `ρ̇ = ℒρ` from `t = 0` with an embedded Dormand–Prince 5(4)
/// scheme, returning the state at each requested time (cubic Hermite dense
/// output between accepted steps).
pub fn evolve(
    gen: &LindbladGenerator,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<Vec<DensityMatrix>> {
    let d = gen.dim();
    if rho0.dim() != d {
        return Err(Error::Dimension(format!(
            "state has dimension {}, generator {d}",
            rho0.dim()
        )));
    }
    if times.iter().any(|t| !(*t >= 0.0)) || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("times", "must be >= 0 and strictly increasing"));
    }
    let sup = gen.liouvillian();
    let rhs = |y: &State| &sup * y;
    let scale = sup.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);

    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0;
    let mut y = vectorize(rho0.matrix());
    let mut f = rhs(&y);
    let mut next = 0;
    while next < times.len() && times[next] == 0.0 {
        out.push(DensityMatrix::from_numeric(unvectorize(&y, d)));
        next += 1;
    }
    let Some(&t_end) = times.last() else {
        return Ok(out);
    };
    let mut h = opts.initial_step.unwrap_or(0.01 / scale).min(t_end.max(f64::MIN_POSITIVE));
    let mut steps = 0usize;
    while next < times.len() {
        if steps >= opts.max_steps {
            return Err(Error::StepUnderflow { t, h });
        }
        steps += 1;
        h = h.min(t_end - t);
        if h <= 1e-14 * t.abs().max(1.0) / scale.max(1.0) || h <= 0.0 {
            return Err(Error::StepUnderflow { t, h });
        }
        let mut k: Vec<State> = Vec::with_capacity(7);
        k.push(f.clone());
        for s in 1..7 {
            let mut acc = y.clone();
            for (j, kj) in k.iter().enumerate() {
                if A[s][j] != 0.0 {
                    acc.axpy(Complex64::new(h * A[s][j], 0.0), kj, Complex64::new(1.0, 0.0));
                }
            }
            let _ = C[s];
            k.push(rhs(&acc));
        }
        let mut y5 = y.clone();
        let mut err = State::zeros(y.len());
        for j in 0..7 {
            if B5[j] != 0.0 {
                y5.axpy(Complex64::new(h * B5[j], 0.0), &k[j], Complex64::new(1.0, 0.0));
            }
            let e = B5[j] - B4[j];
            if e != 0.0 {
                err.axpy(Complex64::new(h * e, 0.0), &k[j], Complex64::new(1.0, 0.0));
            }
        }
        let err_norm = err
            .iter()
            .zip(y.iter().zip(y5.iter()))
            .map(|(e, (a, b))| e.norm() / (opts.abs_tol + opts.rel_tol * a.norm().max(b.norm())))
            .fold(0.0, f64::max);
        if err_norm <= 1.0 {
            let t_new = t + h;
            let f_new = k[6].clone();
            while next < times.len() && times[next] <= t_new {
                let theta = (times[next] - t) / h;
                let state = hermite(&y, &f, &y5, &f_new, h, theta);
                out.push(DensityMatrix::from_numeric(unvectorize(&state, d)));
                next += 1;
            }
            t = t_new;
            y = y5;
            f = f_new;
        }
        let factor = if err_norm == 0.0 {
            5.0
        } else {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok(out)
}

fn hermite(y0: &State, f0: &State, y1: &State, f1: &State, h: f64, theta: f64) -> State {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + theta;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let c = |x: f64| Complex64::new(x, 0.0);
    y0 * c(h00) + f0 * c(h * h10) + y1 * c(h01) + f1 * c(h * h11)
}

/// Unique stationary state, from the vectorized generator with the trace
/// condition replacing the `ρ₀₀` row.
pub fn steady_state(gen: &LindbladGenerator) -> Result<DensityMatrix> {
    let d = gen.dim();
    let sup = gen.liouvillian();
    let svd = sup.clone().svd(false, false);
    let largest = svd.singular_values.max();
    let nullity = svd
        .singular_values
        .iter()
        .filter(|&&s| s <= 1e-12 * largest.max(f64::MIN_POSITIVE))
        .count();
    if nullity != 1 {
        return Err(Error::DegenerateKernel { nullity });
    }
    let mut system = sup.clone();
    let mut rhs = DVector::<Complex64>::zeros(d * d);
    for j in 0..d * d {
        system[(0, j)] = Complex64::new(0.0, 0.0);
    }
    for i in 0..d {
        system[(0, i * d + i)] = Complex64::new(1.0, 0.0);
    }
    rhs[0] = Complex64::new(1.0, 0.0);
    let solution = system
        .lu()
        .solve(&rhs)
        .ok_or(Error::DegenerateKernel { nullity: 2 })?;
    let rho = DensityMatrix::from_numeric(unvectorize(&solution, d));
    let residual = (&sup * vectorize(rho.matrix()))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if residual > 1e-10 * largest.max(1.0) {
        return Err(Error::Domain(format!(
            "stationary solve left residual {residual:e}"
        )));
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DensityOfStates;
    use std::f64::consts::PI;

    fn small_atom() -> (CouplingLayout, Environment) {
        let layout = CouplingLayout::new(vec![0.0], vec![1.0]).unwrap().with_mode_coupling(0.05);
        let env = Environment::new(DensityOfStates::Constant(1.0), 0.0, 20.0).unwrap();
        (layout, env)
    }

    #[test]
    fn two_level_zero_temperature_has_single_decay_channel() {
        let (layout, env) = small_atom();
        let atom = AtomSpec::two_level(1.0).unwrap();
        let gen = build_generator(&atom, &layout, &env, None, None, ShiftMode::Hilbert, &Default::default())
            .unwrap();
        assert_eq!(gen.channels.len(), 1);
        let gamma = 4.0 * PI * 0.0025;
        assert!((gen.channels[0].rate - gamma).abs() < 1e-15);
        assert_eq!(gen.channels[0].op, ops::lowering(2, 0));
    }

    #[test]
    fn thermal_environment_adds_absorption() {
        let (layout, _) = small_atom();
        let env = Environment::new(DensityOfStates::Constant(1.0), 0.5, 20.0).unwrap();
        let atom = AtomSpec::two_level(1.0).unwrap();
        let gen = build_generator(&atom, &layout, &env, None, None, ShiftMode::None, &Default::default())
            .unwrap();
        assert_eq!(gen.channels.len(), 2);
        let gamma = 4.0 * PI * 0.0025;
        let nbar = 1.0 / (2f64).exp_m1();
        assert!((gen.channels[0].rate - gamma * (1.0 + nbar)).abs() < 1e-15);
        assert!((gen.channels[1].rate - gamma * nbar).abs() < 1e-15);
        assert_eq!(gen.channels[1].op, ops::raising(2, 0));
    }

    #[test]
    fn drive_enters_as_off_diagonal_block() {
        let (layout, env) = small_atom();
        let atom = AtomSpec::new(3, 1.0, -0.1).unwrap();
        let drive = DriveSpec::resonant(0.4, (0, 2));
        let gen = build_generator(&atom, &layout, &env, None, Some(&drive), ShiftMode::None, &Default::default())
            .unwrap();
        let h = &gen.hamiltonian;
        assert_eq!(h[(0, 2)], Complex64::new(0.2, 0.0));
        assert_eq!(h[(2, 0)], Complex64::new(0.2, 0.0));
        assert_eq!(h[(0, 1)], Complex64::new(0.0, 0.0));
        assert_eq!(h[(1, 2)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn drive_validation() {
        let (layout, env) = small_atom();
        let atom = AtomSpec::new(3, 1.0, -0.1).unwrap();
        for bad in [DriveSpec::resonant(1.0, (1, 1)), DriveSpec::resonant(1.0, (0, 3)), DriveSpec::resonant(-1.0, (0, 2))] {
            assert!(build_generator(&atom, &layout, &env, None, Some(&bad), ShiftMode::None, &Default::default())
                .is_err());
        }
    }

    #[test]
    fn liouvillian_matches_direct_application() {
        let h = Operator::from_fn(3, 3, |i, j| Complex64::new((i + j) as f64, i as f64 - j as f64));
        let gen = LindbladGenerator::new(
            h,
            vec![
                Channel { rate: 0.3, op: ops::lowering(3, 0) },
                Channel { rate: 1.7, op: ops::lowering(3, 1) },
                Channel { rate: 0.2, op: ops::raising(3, 0) },
            ],
        )
        .unwrap();
        let rho = Operator::from_fn(3, 3, |i, j| Complex64::new(0.1 * (i * 3 + j) as f64, 0.05 * i as f64));
        let direct = gen.apply(&rho);
        let via = unvectorize(&(gen.liouvillian() * vectorize(&rho)), 3);
        assert!(ops::max_abs(&(direct - via)) < 1e-13);
    }

    #[test]
    fn frozen_dynamics_is_constant() {
        let mut h = ops::zeros(3);
        h[(1, 1)] = Complex64::new(0.7, 0.0);
        h[(2, 2)] = Complex64::new(1.9, 0.0);
        let gen = LindbladGenerator::new(h, vec![]).unwrap();
        let rho0 = DensityMatrix::new(Operator::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.3, 0.0),
            Complex64::new(0.2, 0.0),
        ])))
        .unwrap();
        let traj = evolve(&gen, &rho0, &[0.0, 1.0, 5.0, 20.0], &EvolveOptions::default()).unwrap();
        for rho in traj {
            assert!(ops::max_abs(&(rho.matrix() - rho0.matrix())) < 1e-12);
        }
    }

    #[test]
    fn exponential_decay() {
        let gen = LindbladGenerator::new(
            ops::zeros(2),
            vec![Channel { rate: 1.3, op: ops::lowering(2, 0) }],
        )
        .unwrap();
        let times: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let traj = evolve(&gen, &DensityMatrix::pure(2, 1).unwrap(), &times, &EvolveOptions::default()).unwrap();
        for (t, rho) in times.iter().zip(&traj) {
            let p = rho.populations();
            assert!((p[1] - (-1.3 * t).exp()).abs() < 1e-6);
            assert!((rho.trace() - 1.0).abs() < 1e-9);
        }
        let at_lifetime = evolve(&gen, &DensityMatrix::pure(2, 1).unwrap(), &[1.0 / 1.3], &EvolveOptions::default())
            .unwrap();
        let p = at_lifetime[0].populations();
        assert!((p[0] - (1.0 - (-1f64).exp())).abs() < 1e-6);
        assert!((p[1] - (-1f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn populations_examples() {
        assert_eq!(DensityMatrix::pure(3, 0).unwrap().populations(), vec![1.0, 0.0, 0.0]);
        assert_eq!(DensityMatrix::maximally_mixed(2).populations(), vec![0.5, 0.5]);
    }

    #[test]
    fn density_matrix_validation() {
        let mut m = ops::projector(2, 0);
        m[(0, 1)] = Complex64::new(0.3, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        assert!(DensityMatrix::new(ops::identity(2)).is_err());
        let neg = Operator::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(1.5, 0.0),
            Complex64::new(-0.5, 0.0),
        ]));
        assert!(DensityMatrix::new(neg).is_err());
    }

    #[test]
    fn steady_state_of_decay_is_ground() {
        let gen = LindbladGenerator::new(
            ops::zeros(2),
            vec![Channel { rate: 0.8, op: ops::lowering(2, 0) }],
        )
        .unwrap();
        let ss = steady_state(&gen).unwrap();
        let p = ss.populations();
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1].abs() < 1e-12);
    }

    #[test]
    fn steady_state_detailed_balance_two_level() {
        let (layout, _) = small_atom();
        let env = Environment::new(DensityOfStates::Constant(1.0), 0.7, 20.0).unwrap();
        let atom = AtomSpec::two_level(1.0).unwrap();
        let gen = build_generator(&atom, &layout, &env, None, None, ShiftMode::None, &Default::default())
            .unwrap();
        let p = steady_state(&gen).unwrap().populations();
        assert!((p[1] / p[0] - (-1.0 / 0.7f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn steady_state_rejects_degenerate_kernel() {
        let gen = LindbladGenerator::new(ops::zeros(2), vec![]).unwrap();
        assert!(matches!(steady_state(&gen), Err(Error::DegenerateKernel { .. })));
    }

    #[test]
    fn evolve_rejects_bad_time_grid() {
        let gen = LindbladGenerator::new(ops::zeros(2), vec![]).unwrap();
        let rho = DensityMatrix::pure(2, 0).unwrap();
        assert!(evolve(&gen, &rho, &[1.0, 0.5], &EvolveOptions::default()).is_err());
        assert!(evolve(&gen, &rho, &[-1.0], &EvolveOptions::default()).is_err());
    }
}
