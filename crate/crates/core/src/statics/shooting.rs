//! Bound states of the lattice operator by shooting on its three-term
//! recurrence.
//!
//! The interleaved operator is a symmetric tridiagonal (Jacobi) matrix, so
//! the lattice eigenvalue problem is a three-term recurrence. A regular
//! solution is propagated outward from the origin, a wall solution inward
//! from r_max, and the two are matched through their Casoratian at the node
//! nearest the well edge. The Casoratian vanishes exactly at the eigenvalues
//! of the assembled matrix; Sturm counts confirm how many lie in a bracket.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpcError};
use crate::numerics::{brent, linear_fit};
use crate::operator::DiscreteOperator;
use crate::spinor::RadialSpinor;

const RESCALE_AT: f64 = 1e120;

/// Number of eigenvalues strictly below `e` (Sturm sequence of the LDLᵀ
/// factorization).
pub fn eigenvalues_below(op: &DiscreteOperator, e: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..op.dim() {
        let coupling = if i > 0 { op.off[i - 1] * op.off[i - 1] / q } else { 0.0 };
        q = op.diag[i] - e - coupling;
        if q == 0.0 {
            q = -f64::EPSILON * (op.diag[i].abs() + e.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Number of eigenvalues in the open interval `(lo, hi)`.
pub fn eigenvalues_between(op: &DiscreteOperator, lo: f64, hi: f64) -> usize {
    eigenvalues_below(op, hi) - eigenvalues_below(op, lo)
}

/// Regular solution at energy `e` from the origin, components `0..=last`.
/// The first entry is 1; large excursions are rescaled by positive factors.
pub fn outward_solution(op: &DiscreteOperator, e: f64, last: usize) -> Vec<f64> {
    let last = last.min(op.dim() - 1);
    let mut x = Vec::with_capacity(last + 1);
    x.push(1.0);
    for j in 0..last {
        let prev = if j > 0 { op.off[j - 1] * x[j - 1] } else { 0.0 };
        let next = ((e - op.diag[j]) * x[j] - prev) / op.off[j];
        x.push(next);
        if next.abs() > RESCALE_AT {
            let s = 1.0 / next.abs();
            x.iter_mut().for_each(|v| *v *= s);
        }
    }
    x
}

/// Solution vanishing beyond the wall, components `first..dim` (returned
/// indexed from `first`).
fn inward_solution(op: &DiscreteOperator, e: f64, first: usize) -> Vec<f64> {
    let d = op.dim();
    let mut y = vec![0.0; d + 1];
    y[d - 1] = 1.0;
    let mut j = d - 1;
    while j > first {
        let next = if j + 1 < d { op.off[j] * y[j + 1] } else { 0.0 };
        y[j - 1] = ((e - op.diag[j]) * y[j] - next) / op.off[j - 1];
        if y[j - 1].abs() > RESCALE_AT {
            let s = 1.0 / y[j - 1].abs();
            y[j - 1..d].iter_mut().for_each(|v| *v *= s);
        }
        j -= 1;
    }
    y.truncate(d);
    y.split_off(first)
}

/// Interleaved index used for matching: the node nearest the well edge, or
/// the middle of the box for profiles without compact support.
pub fn match_index(op: &DiscreteOperator) -> usize {
    let r = op.model.shape.support().unwrap_or(0.5 * op.grid.r_max);
    op.node_index(r).min(op.dim() - 3)
}

/// Casoratian of the origin and wall solutions at the match index. Its sign
/// changes exactly at the lattice eigenvalues.
pub fn matching_function(op: &DiscreteOperator, e: f64) -> f64 {
    let m = match_index(op);
    let x = outward_solution(op, e, m + 1);
    let y = inward_solution(op, e, m);
    let (xm, xn) = (x[m], x[m + 1]);
    let (ym, yn) = (y[0], y[1]);
    let nx = xm.hypot(xn);
    let ny = ym.hypot(yn);
    op.off[m] * (xm * yn - xn * ym) / (nx * ny)
}

#[derive(Debug, Clone)]
pub struct BoundState {
    pub energy: f64,
    pub wavefunction: RadialSpinor,
    pub sigma: f64,
    /// Decay constant κ with E = ±√(1 − κ²).
    pub decay_kappa: f64,
}

impl BoundState {
    /// Exponential decay rate of the tail on `(r_lo, r_hi)`.
    ///
    /// The node component carries angular momentum 1, whose free decaying
    /// solution is `(1 + 1/(κr))·e^{−κr}`; the algebraic factor is divided out
    /// before fitting `log|u|` against r.
    pub fn tail_exponent(&self, r_lo: f64, r_hi: f64) -> Result<f64> {
        let wf = &self.wavefunction;
        let node = if wf.kappa > 0 { &wf.u1 } else { &wf.u2 };
        let kb = self.decay_kappa;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (j, z) in node.iter().enumerate() {
            let r = wf.grid.node(j);
            if r > r_lo && r < r_hi && z.norm() > 0.0 {
                xs.push(r);
                ys.push(z.norm().ln() - (1.0 + 1.0 / (kb * r)).ln());
            }
        }
        Ok(-linear_fit(&xs, &ys)?.slope)
    }
}

/// Eigenvector for a lattice eigenvalue, normalized to unit norm with the
/// first lattice entry positive.
pub fn eigenvector(op: &DiscreteOperator, e: f64) -> Result<RadialSpinor> {
    let m = match_index(op);
    let x = outward_solution(op, e, m + 1);
    let y = inward_solution(op, e, m);
    let f = (x[m] * y[0] + x[m + 1] * y[1]) / (y[0] * y[0] + y[1] * y[1]);
    let mut v = x[..=m].to_vec();
    v.extend(y[1..].iter().map(|t| t * f));
    RadialSpinor::from_interleaved(op.grid, op.model.kappa, &v).normalized()
}

/// Bound state of `op` in `bracket`, located to machine precision.
pub fn solve_bound_state(op: &DiscreteOperator, bracket: (f64, f64)) -> Result<BoundState> {
    let (lo, hi) = bracket;
    if !(lo < hi && lo >= -1.0 && hi <= 1.0) {
        return Err(SpcError::Usage(format!("bracket ({lo}, {hi}) must be ordered inside [-1, 1]")));
    }
    match eigenvalues_between(op, lo, hi) {
        0 => return Err(SpcError::NoBoundState { lo, hi }),
        1 => {}
        count => return Err(SpcError::MultipleBoundStates { count, lo, hi }),
    }
    let energy = brent(|e| matching_function(op, e), lo, hi, 1e-15, 300)?;
    let wavefunction = eigenvector(op, energy)?;
    Ok(BoundState {
        energy,
        wavefunction,
        sigma: op.sigma,
        decay_kappa: (1.0 - energy * energy).max(0.0).sqrt(),
    })
}

/// Summary used by the CLI and tests.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub sigma: f64,
    pub energy: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;
    use crate::operator::assemble_operator;
    use crate::potential::PotentialModel;

    #[test]
    fn free_operator_has_no_gap_state() {
        let g = RadialGrid::new(20.0, 400).unwrap();
        let op = assemble_operator(&g, &PotentialModel::free(), 0.0).unwrap();
        assert!(matches!(
            solve_bound_state(&op, (-0.99, 0.99)),
            Err(SpcError::NoBoundState { .. })
        ));
    }

    #[test]
    fn eigenvector_satisfies_the_lattice_equation() {
        let g = RadialGrid::new(20.0, 800).unwrap();
        let m = PotentialModel::well(0.5, 7.0, 1.0);
        let op = assemble_operator(&g, &m, 0.0).unwrap();
        let b = solve_bound_state(&op, (-0.999, 0.999)).unwrap();
        let v = b.wavefunction.to_interleaved();
        let r = op.apply_shifted(&v, b.energy);
        let res = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(res < 1e-8, "residual {res}");
        assert!((b.wavefunction.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_gap_states_fail_loudly() {
        // R = 1 near criticality carries a second state close to E = −1.
        let g = RadialGrid::new(20.0, 2000).unwrap();
        let m = PotentialModel::well(1.0, 4.29, 1.0);
        let op = assemble_operator(&g, &m, 0.0).unwrap();
        assert!(matches!(
            solve_bound_state(&op, (-0.9999, 0.9999)),
            Err(SpcError::MultipleBoundStates { count: 2, .. })
        ));
    }
}
