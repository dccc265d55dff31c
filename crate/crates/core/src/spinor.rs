use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpcError};
use crate::grid::RadialGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Unit,
    DeltaInK,
    Unnormalized,
}

/// Two-component radial wave function `(u1, u2)` in channel `kappa`.
///
/// Layout on the staggered lattice: the component with upper angular momentum
/// l = 1 lives on the integer nodes, the l = 0 component on the half nodes.
/// For κ = +1 that is u1 on nodes and u2 on half nodes; κ = −1 swaps them.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSpinor {
    pub u1: Vec<Complex64>,
    pub u2: Vec<Complex64>,
    pub kappa: i32,
    pub norm_kind: NormKind,
    pub grid: RadialGrid,
}

impl RadialSpinor {
    pub fn zeros(grid: RadialGrid, kappa: i32) -> Self {
        Self {
            u1: vec![Complex64::new(0.0, 0.0); grid.n],
            u2: vec![Complex64::new(0.0, 0.0); grid.n],
            kappa,
            norm_kind: NormKind::Unnormalized,
            grid,
        }
    }

    /// Build from the interleaved lattice vector used by the operator
    /// (`[half_0, node_0, half_1, node_1, …]`).
    pub fn from_interleaved<T: Copy + Into<Complex64>>(grid: RadialGrid, kappa: i32, v: &[T]) -> Self {
        assert_eq!(v.len(), 2 * grid.n, "interleaved vector length");
        let half: Vec<Complex64> = v.iter().step_by(2).map(|&x| x.into()).collect();
        let node: Vec<Complex64> = v.iter().skip(1).step_by(2).map(|&x| x.into()).collect();
        let (u1, u2) = if kappa > 0 { (node, half) } else { (half, node) };
        Self {
            u1,
            u2,
            kappa,
            norm_kind: NormKind::Unnormalized,
            grid,
        }
    }

    pub fn to_interleaved(&self) -> Vec<Complex64> {
        let (half, node) = if self.kappa > 0 {
            (&self.u2, &self.u1)
        } else {
            (&self.u1, &self.u2)
        };
        half.iter().zip(node).flat_map(|(&h, &n)| [h, n]).collect()
    }

    /// Radius at which `u1[j]` is sampled.
    pub fn u1_radius(&self, j: usize) -> f64 {
        if self.kappa > 0 {
            self.grid.node(j)
        } else {
            self.grid.half_node(j)
        }
    }

    /// Radius at which `u2[j]` is sampled.
    pub fn u2_radius(&self, j: usize) -> f64 {
        if self.kappa > 0 {
            self.grid.half_node(j)
        } else {
            self.grid.node(j)
        }
    }

    pub fn norm_sq(&self) -> f64 {
        let s: f64 = self
            .u1
            .iter()
            .chain(self.u2.iter())
            .map(|z| z.norm_sqr())
            .sum();
        s * self.grid.spacing
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        for z in self.u1.iter_mut().chain(self.u2.iter_mut()) {
            *z *= factor;
        }
        self
    }

    pub fn normalized(self) -> Result<Self> {
        let n = self.norm_sq().sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(SpcError::Numerical("cannot normalize a null spinor".into()));
        }
        let mut s = self.scaled(Complex64::new(1.0 / n, 0.0));
        s.norm_kind = NormKind::Unit;
        Ok(s)
    }

    /// Remove the component along `unit` (projection with its lattice norm,
    /// so states normalized on a larger domain are handled too).
    pub fn orthogonalized_against(&self, unit: &RadialSpinor) -> Result<Self> {
        let c = inner_product(unit, self)? / unit.norm_sq();
        let mut out = self.clone();
        for (z, w) in out.u1.iter_mut().zip(&unit.u1) {
            *z -= c * w;
        }
        for (z, w) in out.u2.iter_mut().zip(&unit.u2) {
            *z -= c * w;
        }
        out.norm_kind = NormKind::Unnormalized;
        Ok(out)
    }

    fn check_compatible(&self, other: &RadialSpinor) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(SpcError::Usage(format!(
                "grid mismatch: n={} h={} vs n={} h={}",
                self.grid.n, self.grid.spacing, other.grid.n, other.grid.spacing
            )));
        }
        if self.kappa != other.kappa {
            return Err(SpcError::Usage(format!(
                "channel mismatch: kappa {} vs {}",
                self.kappa, other.kappa
            )));
        }
        Ok(())
    }
}

/// `⟨a, b⟩ = Σ (ā₁ b₁ + ā₂ b₂)·h`.
pub fn inner_product(a: &RadialSpinor, b: &RadialSpinor) -> Result<Complex64> {
    a.check_compatible(b)?;
    let s: Complex64 = a
        .u1
        .iter()
        .zip(&b.u1)
        .chain(a.u2.iter().zip(&b.u2))
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(s * a.grid.spacing)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: RadialGrid, kappa: i32, centre: f64) -> RadialSpinor {
        let mut s = RadialSpinor::zeros(grid, kappa);
        for j in 0..grid.n {
            let r1 = s.u1_radius(j);
            let r2 = s.u2_radius(j);
            s.u1[j] = Complex64::new((-(r1 - centre).powi(2)).exp(), 0.1 * r1);
            s.u2[j] = Complex64::new(0.0, (-(r2 - centre).powi(2)).exp() * 0.3);
        }
        s
    }

    #[test]
    fn unit_norm_and_orthogonality() {
        let g = RadialGrid::new(20.0, 400).unwrap();
        let a = gaussian(g, 1, 5.0).normalized().unwrap();
        let b = gaussian(g, 1, 6.0);
        assert!((inner_product(&a, &a).unwrap().re - 1.0).abs() < 1e-12);
        let c = b.orthogonalized_against(&a).unwrap();
        assert!(inner_product(&a, &c).unwrap().norm() < 1e-12);
    }

    #[test]
    fn interleaving_round_trips_both_channels() {
        let g = RadialGrid::new(5.0, 32).unwrap();
        for kappa in [1, -1] {
            let a = gaussian(g, kappa, 2.0);
            let b = RadialSpinor::from_interleaved(g, kappa, &a.to_interleaved());
            assert_eq!(a.u1, b.u1);
            assert_eq!(a.u2, b.u2);
        }
    }

    #[test]
    fn mismatched_grid_is_usage_error() {
        let a = gaussian(RadialGrid::new(5.0, 32).unwrap(), 1, 2.0);
        let b = gaussian(RadialGrid::new(5.0, 64).unwrap(), 1, 2.0);
        assert!(matches!(inner_product(&a, &b), Err(SpcError::Usage(_))));
    }
}
