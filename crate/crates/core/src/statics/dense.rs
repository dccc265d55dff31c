use crate::error::{Result, SpcError};
use crate::operator::DiscreteOperator;

/// Largest radial grid accepted by the dense oracle.
pub const DENSE_MAX_POINTS: usize = 2000;

/// All eigenvalues of the assembled matrix by dense Hermitian
/// diagonalization, ascending. Verification oracle for the shooting solver.
pub fn dense_spectrum_oracle(op: &DiscreteOperator) -> Result<Vec<f64>> {
    if op.grid.n > DENSE_MAX_POINTS {
        return Err(SpcError::Config(format!(
            "dense oracle limited to n ≤ {DENSE_MAX_POINTS}, got {}",
            op.grid.n
        )));
    }
    let mut v: Vec<f64> = op.to_dense().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    Ok(v)
}

/// Eigenvalues inside the open interval `(lo, hi)`.
pub fn gap_eigenvalues(spectrum: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    spectrum.iter().copied().filter(|&e| e > lo && e < hi).collect()
}
