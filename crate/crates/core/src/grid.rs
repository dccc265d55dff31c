use serde::{Deserialize, Serialize};

use crate::error::{Result, SpcError};

/// Uniform radial grid `r_i = i·h`, `i = 1..=n`, with `h = r_max / n`.
///
/// The staggered discretization also uses the half points `(i − ½)·h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_max: f64,
    pub n: usize,
    pub spacing: f64,
}

pub const MIN_POINTS: usize = 16;

impl RadialGrid {
    pub fn new(r_max: f64, n: usize) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(SpcError::Config(format!("grid r_max must be positive, got {r_max}")));
        }
        if n < MIN_POINTS {
            return Err(SpcError::Config(format!(
                "grid needs at least {MIN_POINTS} points, got {n}"
            )));
        }
        Ok(Self {
            r_max,
            n,
            spacing: r_max / n as f64,
        })
    }

    /// Integer point `r_{j+1}` for zero-based `j`.
    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        (j as f64 + 1.0) * self.spacing
    }

    /// Half point `r_{j+½}` for zero-based `j`.
    #[inline]
    pub fn half_node(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.spacing
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.node(j))
    }

    /// Zero-based index of the integer node closest to `r`.
    pub fn nearest_node(&self, r: f64) -> usize {
        let j = (r / self.spacing).round() as isize - 1;
        j.clamp(0, self.n as isize - 1) as usize
    }

    /// Same spacing, box grown to at least `r_max`.
    pub fn extended(&self, r_max: f64) -> Self {
        let n = (r_max / self.spacing).ceil() as usize;
        Self {
            r_max: n as f64 * self.spacing,
            n,
            spacing: self.spacing,
        }
    }

    /// Same box, spacing divided by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            r_max: self.r_max,
            n: self.n * factor,
            spacing: self.spacing / factor as f64,
        }
    }

    pub fn same_as(&self, other: &RadialGrid) -> bool {
        self.n == other.n && (self.spacing - other.spacing).abs() <= 1e-14 * self.spacing
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_endpoints() {
        let g = RadialGrid::new(10.0, 1000).unwrap();
        assert!((g.spacing - 0.01).abs() < 1e-15);
        assert!((g.node(0) - 0.01).abs() < 1e-15);
        assert!((g.node(999) - 10.0).abs() < 1e-12);

        let g = RadialGrid::new(40.0, 4000).unwrap();
        assert_eq!(g.nodes().count(), 4000);
        assert!((g.spacing - 0.01).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(RadialGrid::new(0.0, 100), Err(SpcError::Config(_))));
        assert!(matches!(RadialGrid::new(-1.0, 100), Err(SpcError::Config(_))));
        assert!(matches!(RadialGrid::new(10.0, 8), Err(SpcError::Config(_))));
    }

    #[test]
    fn nearest_node_clamps() {
        let g = RadialGrid::new(10.0, 100).unwrap();
        assert_eq!(g.nearest_node(0.5), 4);
        assert_eq!(g.nearest_node(-3.0), 0);
        assert_eq!(g.nearest_node(50.0), 99);
    }
}
