//! Lattice form of the radial Dirac operator `D_σ = D⁰ + A_σ`.
//!
//! In channel κ the radial system is
//!
//! ```text
//!   E u1 = (V + 1) u1 + (−d/dr + κ/r) u2
//!   E u2 = (d/dr + κ/r) u1 + (V − 1) u2
//! ```
//!
//! For κ = +1 the off-diagonal block `B = d/dr + 1/r = r⁻¹ (d/dr) r` is
//! discretized in product form from the integer nodes (u1) to the half nodes
//! (u2); its adjoint fills the other block. For κ = −1 the roles of the two
//! components swap and the block changes sign. Interleaving the unknowns as
//! `[half_0, node_0, half_1, node_1, …]` turns the operator into a real
//! symmetric tridiagonal matrix. Boundary conditions: u(0) = 0 for the node
//! component, and the lattice ends with a hard wall just outside r_max.
//!
//! The product form annihilates `1/r` exactly, so the threshold tail
//! `u1 = A/r, u2 = 0` of a κ = +1 state at E = 1 is an exact lattice solution
//! outside the well.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, SpcError};
use crate::grid::RadialGrid;
use crate::potential::PotentialModel;

/// Box radius must be at least this many well radii.
pub const MIN_BOX_RADII: f64 = 8.0;

#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub grid: RadialGrid,
    pub model: PotentialModel,
    pub sigma: f64,
    /// Diagonal of the interleaved matrix (length 2n).
    pub diag: Vec<f64>,
    /// Off-diagonal of the interleaved matrix (length 2n − 1).
    pub off: Vec<f64>,
}

pub fn assemble_operator(grid: &RadialGrid, model: &PotentialModel, sigma: f64) -> Result<DiscreteOperator> {
    model.validate()?;
    if let Some(radius) = model.shape.support() {
        if grid.r_max < MIN_BOX_RADII * radius - 1e-12 {
            return Err(SpcError::Config(format!(
                "box radius {} is smaller than {MIN_BOX_RADII}·R = {}",
                grid.r_max,
                MIN_BOX_RADII * radius
            )));
        }
    }
    let n = grid.n;
    let h = grid.spacing;
    let s = model.kappa as f64;
    let mut diag = vec![0.0; 2 * n];
    let mut off = vec![0.0; 2 * n - 1];
    for j in 0..n {
        let v_half = model.sampled(sigma, grid.half_node(j), h);
        let v_node = model.sampled(sigma, grid.node(j), h);
        if model.kappa > 0 {
            diag[2 * j] = v_half - 1.0;
            diag[2 * j + 1] = v_node + 1.0;
        } else {
            diag[2 * j] = v_half + 1.0;
            diag[2 * j + 1] = v_node - 1.0;
        }
        let jf = j as f64;
        off[2 * j] = s * (jf + 1.0) / ((jf + 0.5) * h);
        if j > 0 {
            off[2 * j - 1] = -s * jf / ((jf + 0.5) * h);
        }
    }
    Ok(DiscreteOperator {
        grid: *grid,
        model: *model,
        sigma,
        diag,
        off,
    })
}

impl DiscreteOperator {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Interleaved index of the node nearest to `r`.
    pub fn node_index(&self, r: f64) -> usize {
        2 * self.grid.nearest_node(r) + 1
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = self.diag[i];
        }
        for i in 0..d - 1 {
            m[(i, i + 1)] = self.off[i];
            m[(i + 1, i)] = self.off[i];
        }
        m
    }

    /// `max|M − Mᵀ| / max|M|` of the assembled dense matrix.
    pub fn hermiticity_residual(&self) -> f64 {
        let m = self.to_dense();
        let scale = m.amax();
        let asym = (&m - m.transpose()).amax();
        asym / scale
    }

    /// `y = (D − shift)·x`.
    pub fn apply_shifted(&self, x: &[Complex64], shift: f64) -> Vec<Complex64> {
        let d = self.dim();
        assert_eq!(x.len(), d);
        (0..d)
            .map(|i| {
                let mut y = x[i] * (self.diag[i] - shift);
                if i > 0 {
                    y += x[i - 1] * self.off[i - 1];
                }
                if i + 1 < d {
                    y += x[i + 1] * self.off[i];
                }
                y
            })
            .collect()
    }

    /// Gershgorin bound on the spectral radius of `D − shift`.
    pub fn spectral_radius_bound(&self, shift: f64) -> f64 {
        let d = self.dim();
        (0..d)
            .map(|i| {
                let mut r = (self.diag[i] - shift).abs();
                if i > 0 {
                    r += self.off[i - 1].abs();
                }
                if i + 1 < d {
                    r += self.off[i].abs();
                }
                r
            })
            .fold(0.0, f64::max)
    }
}
