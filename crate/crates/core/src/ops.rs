//! Dense operators on the truncated atom space.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type Operator = DMatrix<Complex64>;

pub fn zeros(dim: usize) -> Operator {
    Operator::zeros(dim, dim)
}

pub fn identity(dim: usize) -> Operator {
    Operator::identity(dim, dim)
}

/// `|row⟩⟨col|`.
pub fn ket_bra(dim: usize, row: usize, col: usize) -> Operator {
    let mut op = zeros(dim);
    op[(row, col)] = Complex64::new(1.0, 0.0);
    op
}

/// `σ₋^m = |m⟩⟨m+1|`.
pub fn lowering(dim: usize, m: usize) -> Operator {
    ket_bra(dim, m, m + 1)
}

/// `σ₊^m = |m+1⟩⟨m|`.
pub fn raising(dim: usize, m: usize) -> Operator {
    ket_bra(dim, m + 1, m)
}

pub fn projector(dim: usize, m: usize) -> Operator {
    ket_bra(dim, m, m)
}

/// `|m+1⟩⟨m+1| - |m⟩⟨m|`, the two-level `σ_z` of transition `m`.
pub fn sigma_z(dim: usize, m: usize) -> Operator {
    projector(dim, m + 1) - projector(dim, m)
}

pub fn dagger(op: &Operator) -> Operator {
    op.adjoint()
}

pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    a * b - b * a
}

/// Largest entry of `op - op†`.
pub fn hermiticity_defect(op: &Operator) -> f64 {
    (op - op.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs(op: &Operator) -> f64 {
    op.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn scale(op: &Operator, c: Complex64) -> Operator {
    op.map(|z| z * c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_operators_compose_to_projectors() {
        let sm = lowering(3, 1);
        let sp = raising(3, 1);
        assert_eq!(&sp * &sm, projector(3, 2));
        assert_eq!(&sm * &sp, projector(3, 1));
        assert_eq!(dagger(&sm), sp);
    }

    #[test]
    fn sigma_z_commutator() {
        let sm = lowering(2, 0);
        let sz = sigma_z(2, 0);
        // [σ_z, σ₋] = -2σ₋
        let c = commutator(&sz, &sm);
        assert_eq!(c, sm.map(|z| z * -2.0));
    }
}
