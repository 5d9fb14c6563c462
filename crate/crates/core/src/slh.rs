//! (S, L, H) triplets for cascaded quantum networks and the giant-atom
//! construction built from them.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::{Channel, LindbladGenerator};
use crate::ops::{self, Operator};
use crate::{AtomSpec, CouplingLayout, Environment, Error, Result};

const UNITARY_TOL: f64 = 1e-12;
const SINGULAR_LOOP_TOL: f64 = 1e-12;

/// Scattering matrix `S`, coupling vector `L` and Hamiltonian `H` of an
/// open system with `n` input/output channels.
#[derive(Debug, Clone, PartialEq)]
pub struct SlhTriplet {
    pub s: DMatrix<Complex64>,
    pub l: Vec<Operator>,
    pub h: Operator,
}

fn i_half() -> Complex64 {
    // 1 / (2i)
    Complex64::new(0.0, -0.5)
}

impl SlhTriplet {
    /// Checks shapes, unitarity of `S` and Hermiticity of `H`.
    pub fn new(s: DMatrix<Complex64>, l: Vec<Operator>, h: Operator) -> Result<Self> {
        let g = SlhTriplet { s, l, h };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.channels();
        if self.s.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "S is {:?} but there are {n} coupling operators",
                self.s.shape()
            )));
        }
        let d = self.dim();
        if !self.h.is_square() {
            return Err(Error::Dimension("H is not square".into()));
        }
        if let Some((i, op)) = self.l.iter().enumerate().find(|(_, op)| op.shape() != (d, d)) {
            return Err(Error::Dimension(format!(
                "L[{i}] is {:?}, expected ({d}, {d})",
                op.shape()
            )));
        }
        let defect = ops::max_abs(&(self.s.adjoint() * &self.s - DMatrix::identity(n, n)));
        if defect > UNITARY_TOL {
            return Err(Error::invalid("S", format!("not unitary (defect {defect:e})")));
        }
        let herm = ops::hermiticity_defect(&self.h);
        if herm > UNITARY_TOL * ops::max_abs(&self.h).max(1.0) {
            return Err(Error::invalid("H", format!("not Hermitian (defect {herm:e})")));
        }
        Ok(())
    }

    /// `n` pass-through channels with no coupling.
    pub fn identity(channels: usize, dim: usize) -> Self {
        SlhTriplet {
            s: DMatrix::identity(channels, channels),
            l: vec![ops::zeros(dim); channels],
            h: ops::zeros(dim),
        }
    }

    /// Single channel picking up the phase `e^{iφ}`.
    pub fn phase(phi: f64, dim: usize) -> Self {
        SlhTriplet {
            s: DMatrix::from_element(1, 1, Complex64::from_polar(1.0, phi)),
            l: vec![ops::zeros(dim)],
            h: ops::zeros(dim),
        }
    }

    /// Single channel `(1, L, H)`.
    pub fn component(l: Operator, h: Operator) -> Result<Self> {
        SlhTriplet::new(DMatrix::identity(1, 1), vec![l], h)
    }

    pub fn channels(&self) -> usize {
        self.l.len()
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }
}

/// `(e^{iφ}, 0, 0)` on a `dim`-level system.
pub fn phase_triplet(phi: f64, dim: usize) -> SlhTriplet {
    SlhTriplet::phase(phi, dim)
}

fn check_same_space(a: &SlhTriplet, b: &SlhTriplet) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "operator spaces differ ({} vs {})",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// Series product `G2 ◁ G1`: the outputs of `g1` drive the inputs of `g2`.
pub fn series(g2: &SlhTriplet, g1: &SlhTriplet) -> Result<SlhTriplet> {
    check_same_space(g2, g1)?;
    if g2.channels() != g1.channels() {
        return Err(Error::Dimension(format!(
            "series product needs equal channel counts ({} vs {})",
            g2.channels(),
            g1.channels()
        )));
    }
    let n = g1.channels();
    let d = g1.dim();
    let s = &g2.s * &g1.s;
    let mut l = Vec::with_capacity(n);
    for i in 0..n {
        let mut li = g2.l[i].clone();
        for j in 0..n {
            li += &g1.l[j] * g2.s[(i, j)];
        }
        l.push(li);
    }
    // L2† S2 L1 = Σ_{i,j} L2_i† S2_ij L1_j
    let mut cross = ops::zeros(d);
    for i in 0..n {
        let l2d = g2.l[i].adjoint();
        for j in 0..n {
            let sij = g2.s[(i, j)];
            if sij != Complex64::new(0.0, 0.0) {
                cross += &l2d * &g1.l[j] * sij;
            }
        }
    }
    let h = &g1.h + &g2.h + (&cross - cross.adjoint()) * i_half();
    Ok(SlhTriplet { s, l, h })
}

/// Concatenation `G2 ⊞ G1`: channels of `g2` first, then those of `g1`.
pub fn concat(g2: &SlhTriplet, g1: &SlhTriplet) -> Result<SlhTriplet> {
    check_same_space(g2, g1)?;
    let (n2, n1) = (g2.channels(), g1.channels());
    let mut s = DMatrix::zeros(n2 + n1, n2 + n1);
    s.view_mut((0, 0), (n2, n2)).copy_from(&g2.s);
    s.view_mut((n2, n2), (n1, n1)).copy_from(&g1.s);
    let l = g2.l.iter().chain(&g1.l).cloned().collect();
    Ok(SlhTriplet {
        s,
        l,
        h: &g2.h + &g1.h,
    })
}

/// Feed output `k` back into input `l` (both 0-based), removing one channel.
pub fn feedback(g: &SlhTriplet, k: usize, l: usize) -> Result<SlhTriplet> {
    let n = g.channels();
    for (what, idx) in [("feedback output", k), ("feedback input", l)] {
        if idx >= n {
            return Err(Error::Index {
                what,
                index: idx,
                limit: n,
            });
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let denom = one - g.s[(k, l)];
    if denom.norm() < SINGULAR_LOOP_TOL {
        return Err(Error::SingularLoop {
            output: k,
            input: l,
            magnitude: denom.norm(),
        });
    }
    let inv = one / denom;
    let rows: Vec<usize> = (0..n).filter(|&i| i != k).collect();
    let cols: Vec<usize> = (0..n).filter(|&j| j != l).collect();
    let s = DMatrix::from_fn(n - 1, n - 1, |a, b| {
        let (i, j) = (rows[a], cols[b]);
        g.s[(i, j)] + g.s[(i, l)] * inv * g.s[(k, j)]
    });
    let lk = &g.l[k] * inv;
    let lv = rows.iter().map(|&i| &g.l[i] + &lk * g.s[(i, l)]).collect();
    let mut acc = ops::zeros(g.dim());
    for j in 0..n {
        acc += g.l[j].adjoint() * g.s[(j, l)];
    }
    let corr = &acc * &lk;
    let h = &g.h + (&corr - corr.adjoint()) * i_half();
    Ok(SlhTriplet { s, l: lv, h })
}

/// Giant atom with connection points from `layout`, built point by point:
/// a right-moving chain `[(G_φ ◁ G_R) ⊞ G_{R,k}]_{1→2}`, a left-moving chain
/// assembled from the far end, and their concatenation (channel 0 right,
/// channel 1 left).
///
/// Per-point rates are `γ_k = 4π g_j² g_k² J(ω10)` and inter-point phases
/// `ω10 (x_{k+1} − x_k)/v`. For two levels the bare Hamiltonian is
/// `(Δ/2)σ_z`; with more levels the coupling operator is
/// `Σ_m g_m |m⟩⟨m+1|` and the bare Hamiltonian
/// `Σ_m (E_m − mω10 + mΔ)|m⟩⟨m|`, in the frame rotating at `ω10 − Δ`.
pub fn build_giant_atom(
    layout: &CouplingLayout,
    atom: &AtomSpec,
    env: &Environment,
    detuning: f64,
) -> Result<SlhTriplet> {
    layout.validate()?;
    atom.validate()?;
    env.validate()?;
    let dim = atom.levels;
    let omega = atom.omega10;
    let mut x = ops::zeros(dim);
    for m in 0..atom.transitions() {
        x[(m, m + 1)] = Complex64::new(atom.ladder_coupling(m), 0.0);
    }
    let mut bare = ops::zeros(dim);
    if dim == 2 {
        bare[(0, 0)] = Complex64::new(-detuning / 2.0, 0.0);
        bare[(1, 1)] = Complex64::new(detuning / 2.0, 0.0);
    } else {
        for m in 0..dim {
            let e = atom.level_energy(m)? - m as f64 * omega + m as f64 * detuning;
            bare[(m, m)] = Complex64::new(e, 0.0);
        }
    }
    let amps: Vec<f64> = layout
        .point_rates(env.dos(omega))
        .into_iter()
        .map(|g| (g / 2.0).sqrt())
        .collect();
    let phases: Vec<f64> = layout
        .positions
        .windows(2)
        .map(|w| omega * (w[1] - w[0]) / layout.velocity)
        .collect();
    let point = |k: usize, h: Operator| SlhTriplet::component(&x * Complex64::new(amps[k], 0.0), h);
    let link = |g: &SlhTriplet, phi: f64, next: SlhTriplet| -> Result<SlhTriplet> {
        let delayed = series(&phase_triplet(phi, dim), g)?;
        feedback(&concat(&delayed, &next)?, 0, 1)
    };

    let n = layout.len();
    let mut right = point(0, bare)?;
    for k in 1..n {
        right = link(&right, phases[k - 1], point(k, ops::zeros(dim))?)?;
    }
    let mut left = point(n - 1, ops::zeros(dim))?;
    for k in (0..n - 1).rev() {
        left = link(&left, phases[k], point(k, ops::zeros(dim))?)?;
    }
    concat(&right, &left)
}

/// Close the right-moving output onto the left-moving input through a
/// mirror phase: `[(G_{φ_M} ⊞ I₁) ◁ G]_{1→2}`.
pub fn attach_mirror(g: &SlhTriplet, phi_m: f64) -> Result<SlhTriplet> {
    if g.channels() != 2 {
        return Err(Error::Dimension(format!(
            "mirror needs a two-channel triplet, got {} channels",
            g.channels()
        )));
    }
    let d = g.dim();
    let front = concat(&phase_triplet(phi_m, d), &SlhTriplet::identity(1, d))?;
    feedback(&series(&front, g)?, 0, 1)
}

/// `ρ̇ = -i[H, ρ] + Σ_i D[L_i]ρ`.
pub fn to_master_equation(g: &SlhTriplet) -> Result<LindbladGenerator> {
    let channels = g
        .l
        .iter()
        .map(|op| Channel {
            rate: 1.0,
            op: op.clone(),
        })
        .collect();
    LindbladGenerator::new(g.h.clone(), channels)
}

/// Relaxation rate `Σ_i |c_i|²` and shift `(H₁₁ − H₀₀) − Δ` of a two-level
/// triplet whose couplings are `L_i = c_i σ₋`.
pub fn rate_and_shift_from_triplet(g: &SlhTriplet, detuning: f64) -> Result<(f64, f64)> {
    if g.dim() != 2 {
        return Err(Error::Shape(format!(
            "rate/shift extraction needs a two-level triplet, got dimension {}",
            g.dim()
        )));
    }
    let mut rate = 0.0;
    for (i, op) in g.l.iter().enumerate() {
        let c = op[(0, 1)];
        let rest = op[(0, 0)].norm().max(op[(1, 0)].norm()).max(op[(1, 1)].norm());
        if rest > 1e-12 * c.norm().max(1.0) {
            return Err(Error::Shape(format!("L[{i}] is not proportional to sigma_minus")));
        }
        rate += c.norm_sqr();
    }
    let off = g.h[(0, 1)].norm().max(g.h[(1, 0)].norm());
    if off > 1e-12 * ops::max_abs(&g.h).max(1.0) {
        return Err(Error::Shape("H is not diagonal".into()));
    }
    Ok((rate, (g.h[(1, 1)] - g.h[(0, 0)]).re - detuning))
}
