use serde::{Deserialize, Serialize};

use crate::error::{Result, SpcError};

/// Radial profile of the scalar potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Piecewise-constant well of unit depth: 1 for r < radius, 0 otherwise.
    Well { radius: f64 },
    /// shape ≡ 1 everywhere. Not compactly supported; only meant for checks
    /// that need a trivially known overlap.
    Uniform,
}

impl Shape {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            Shape::Well { radius } => {
                if r < radius {
                    1.0
                } else {
                    0.0
                }
            }
            Shape::Uniform => 1.0,
        }
    }

    /// Value used on a lattice node: a node sitting exactly on the well edge
    /// gets the mean of the one-sided limits, which keeps the scheme second
    /// order for the discontinuous profile.
    pub fn sampled(&self, r: f64, spacing: f64) -> f64 {
        match *self {
            Shape::Well { radius } => {
                if (r - radius).abs() <= 1e-9 * spacing {
                    0.5
                } else {
                    self.value(r)
                }
            }
            Shape::Uniform => 1.0,
        }
    }

    /// Support radius, `None` for profiles without compact support.
    pub fn support(&self) -> Option<f64> {
        match *self {
            Shape::Well { radius } => Some(radius),
            Shape::Uniform => None,
        }
    }
}

/// Orientation of the diving bound state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    /// Repulsive potential; the state rises from the lower continuum and
    /// dives into the upper one at E = +1.
    #[serde(rename = "+1")]
    Plus,
    /// Mirror image: the state dives into the lower continuum at E = −1.
    #[serde(rename = "-1")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Family of potentials `A_σ(r) = sign·(λ_c + σ·λ')·shape(r)` in the radial
/// channel `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialModel {
    pub shape: Shape,
    pub lambda_c: f64,
    pub lambda_slope: f64,
    pub sign: Sign,
    /// Dirac angular quantum number of the radial channel, ±1.
    pub kappa: i32,
}

/// Well radius of the baseline model.
pub const BASELINE_RADIUS: f64 = 0.5;

impl PotentialModel {
    pub fn well(radius: f64, lambda_c: f64, lambda_slope: f64) -> Self {
        Self {
            shape: Shape::Well { radius },
            lambda_c,
            lambda_slope,
            sign: Sign::Plus,
            kappa: 1,
        }
    }

    /// V ≡ 0 in the baseline channel.
    pub fn free() -> Self {
        Self::well(BASELINE_RADIUS, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kappa != 1 && self.kappa != -1 {
            return Err(SpcError::Config(format!(
                "channel kappa must be +1 or -1, got {}",
                self.kappa
            )));
        }
        if let Shape::Well { radius } = self.shape {
            if !(radius.is_finite() && radius > 0.0) {
                return Err(SpcError::Config(format!("well radius must be positive, got {radius}")));
            }
        }
        if !self.lambda_c.is_finite() || !self.lambda_slope.is_finite() {
            return Err(SpcError::Config("coupling parameters must be finite".into()));
        }
        Ok(())
    }

    /// Coupling strength λ(σ).
    pub fn coupling(&self, sigma: f64) -> f64 {
        self.lambda_c + sigma * self.lambda_slope
    }

    /// Energy of the continuum edge the bound state dives into.
    pub fn edge(&self) -> f64 {
        self.sign.value()
    }

    pub fn with_lambda_c(mut self, lambda_c: f64) -> Self {
        self.lambda_c = lambda_c;
        self
    }

    pub fn with_shape(mut self, shape: Shape) -> Self {
        self.shape = shape;
        self
    }

    /// Charge-conjugate model: opposite potential in the channel −κ.
    pub fn mirrored(mut self) -> Self {
        self.sign = self.sign.flipped();
        self.kappa = -self.kappa;
        self
    }

    /// Lattice value of the potential at `r` (see [`Shape::sampled`]).
    pub fn sampled(&self, sigma: f64, r: f64, spacing: f64) -> f64 {
        self.sign.value() * self.coupling(sigma) * self.shape.sampled(r, spacing)
    }
}

/// Potential energy `A_σ(r)` in units of mc².
pub fn potential_at(model: &PotentialModel, sigma: f64, r: f64) -> f64 {
    model.sign.value() * model.coupling(sigma) * model.shape.value(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn compact_support() {
        let m = PotentialModel::well(1.0, 4.0, 1.0);
        assert_eq!(potential_at(&m, 0.3, 2.0), 0.0);
        assert_eq!(potential_at(&m, 0.0, 0.5), 4.0);
        assert!((potential_at(&m, 0.1, 0.5) - 4.1).abs() < 1e-15);
        let mm = m.mirrored();
        assert_eq!(potential_at(&mm, 0.0, 0.5), -4.0);
        assert_eq!(mm.kappa, -1);
    }

    #[test]
    fn edge_node_uses_mean() {
        let s = Shape::Well { radius: 0.5 };
        assert_eq!(s.sampled(0.5, 0.05), 0.5);
        assert_eq!(s.sampled(0.45, 0.05), 1.0);
        assert_eq!(s.sampled(0.55, 0.05), 0.0);
    }

    proptest! {
        #[test]
        fn monotone_in_sigma_inside_well(s1 in -0.5f64..0.5, ds in 0.0f64..0.5, r in 0.0f64..0.999) {
            let m = PotentialModel::well(1.0, 4.3, 1.0);
            let a = potential_at(&m, s1, r);
            let b = potential_at(&m, s1 + ds, r);
            prop_assert!(b.abs() >= a.abs());
            prop_assert!(b >= a);
        }
    }
}
