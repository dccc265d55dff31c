use serde::{Deserialize, Serialize};

use crate::error::{Result, SpcError};

/// Time dependence σ(s) of the overcriticality parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SigmaProfile {
    /// `σ(s) = offset + rate·s`; the baseline crossing is `rate = 1, offset = 0`.
    Linear {
        rate: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `σ(s) = sigma_max − slope·|s|`: switch on, then off again.
    Tent { sigma_max: f64, slope: f64 },
    /// Frozen operator.
    Constant { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub profile: SigmaProfile,
    pub s_start: f64,
    pub s_end: f64,
    pub epsilon: f64,
}

impl SigmaProfile {
    pub fn sigma(&self, s: f64) -> f64 {
        match *self {
            SigmaProfile::Linear { rate, offset } => offset + rate * s,
            SigmaProfile::Tent { sigma_max, slope } => sigma_max - slope * s.abs(),
            SigmaProfile::Constant { sigma } => sigma,
        }
    }
}

impl Schedule {
    /// Baseline linear crossing σ(s) = s on `[s_start, s_end]`.
    pub fn crossing(s_start: f64, s_end: f64, epsilon: f64) -> Self {
        Self {
            profile: SigmaProfile::Linear { rate: 1.0, offset: 0.0 },
            s_start,
            s_end,
            epsilon,
        }
    }

    /// Frozen operator at `sigma` for `s ∈ [0, s_end]`.
    pub fn frozen(sigma: f64, s_end: f64, epsilon: f64) -> Self {
        Self {
            profile: SigmaProfile::Constant { sigma },
            s_start: 0.0,
            s_end,
            epsilon,
        }
    }

    pub fn sigma(&self, s: f64) -> f64 {
        self.profile.sigma(s)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.profile, SigmaProfile::Constant { .. })
    }

    /// Values of σ that bound the schedule on its interval (the profiles are
    /// piecewise linear, so endpoints and kinks suffice).
    pub fn sigma_extremes(&self) -> Vec<f64> {
        let mut v = vec![self.sigma(self.s_start), self.sigma(self.s_end)];
        if self.s_start < 0.0 && self.s_end > 0.0 {
            v.push(self.sigma(0.0));
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(SpcError::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.s_end > self.s_start) || !self.s_start.is_finite() || !self.s_end.is_finite() {
            return Err(SpcError::Config(format!(
                "schedule interval [{}, {}] must be finite and non-empty",
                self.s_start, self.s_end
            )));
        }
        let ok = match self.profile {
            SigmaProfile::Linear { rate, offset } => rate.is_finite() && offset.is_finite(),
            SigmaProfile::Tent { sigma_max, slope } => sigma_max.is_finite() && slope.is_finite() && slope >= 0.0,
            SigmaProfile::Constant { sigma } => sigma.is_finite(),
        };
        if !ok {
            return Err(SpcError::Config("schedule parameters must be finite (tent slope ≥ 0)".into()));
        }
        Ok(())
    }
}
