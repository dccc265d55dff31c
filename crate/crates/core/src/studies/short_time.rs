use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpcError};
use crate::evolution::{short_time_probability, PropagationOptions, ShortTimeConfig, ShortTimeResult};
use crate::statics::CriticalData;

use super::scaling::{loglog_fit, ScalingFit};

/// Runs with a leak probability at or above this bound are left out of the fits.
pub const SHORT_TIME_P_MAX: f64 = 0.05;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShortTimeStudyConfig {
    pub epsilon: f64,
    /// Coupling increments swept at fixed `duration_fixed`.
    pub a_values: Vec<f64>,
    /// Durations swept at fixed `a_fixed`.
    pub durations: Vec<f64>,
    pub a_fixed: f64,
    pub duration_fixed: f64,
}

#[derive(Debug, Clone)]
pub struct ShortTimeStudy {
    /// ln p against ln a at fixed S.
    pub a_fit: ScalingFit,
    /// ln p against ln S at fixed a.
    pub duration_fit: ScalingFit,
    /// The a = 0 control run.
    pub control: ShortTimeResult,
    pub runs: Vec<ShortTimeResult>,
    pub excluded_runs: usize,
}

impl ShortTimeStudy {
    /// Largest `p_measured/p_estimate − 1` in absolute value over the fitted runs.
    pub fn estimate_deviation(&self) -> f64 {
        self.runs
            .iter()
            .filter(|r| r.p_measured < SHORT_TIME_P_MAX)
            .map(|r| (r.p_measured / r.p_estimate - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

pub fn short_time_study(
    critical: &CriticalData,
    cfg: &ShortTimeStudyConfig,
    options: &PropagationOptions,
) -> Result<ShortTimeStudy> {
    if cfg.a_values.len() < 3 || cfg.durations.len() < 3 {
        return Err(SpcError::Config("short-time study needs at least 3 values of a and of S".into()));
    }
    let mut configs: Vec<ShortTimeConfig> = cfg
        .a_values
        .iter()
        .map(|&a| ShortTimeConfig { a, duration: cfg.duration_fixed, epsilon: cfg.epsilon })
        .collect();
    configs.extend(
        cfg.durations
            .iter()
            .map(|&duration| ShortTimeConfig { a: cfg.a_fixed, duration, epsilon: cfg.epsilon }),
    );
    configs.push(ShortTimeConfig { a: 0.0, duration: cfg.duration_fixed, epsilon: cfg.epsilon });
    let mut runs: Vec<ShortTimeResult> = configs
        .par_iter()
        .map(|c| short_time_probability(critical, c, options))
        .collect::<Result<_>>()?;
    let control = runs.pop().expect("control run");
    let (a_runs, s_runs) = runs.split_at(cfg.a_values.len());

    let keep = |r: &&ShortTimeResult| {
        let ok = r.p_measured < SHORT_TIME_P_MAX && r.p_measured > 0.0;
        if !ok {
            warn!("excluded short-time run a = {}, S = {}: p = {:.3e}", r.a, r.duration, r.p_measured);
        }
        ok
    };
    let a_points: Vec<(f64, f64)> = a_runs.iter().filter(keep).map(|r| (r.a, r.p_measured)).collect();
    let s_points: Vec<(f64, f64)> = s_runs.iter().filter(keep).map(|r| (r.duration, r.p_measured)).collect();
    let excluded_runs = runs.len() - a_points.len() - s_points.len();
    Ok(ShortTimeStudy {
        a_fit: loglog_fit(&a_points)?,
        duration_fit: loglog_fit(&s_points)?,
        control,
        runs,
        excluded_runs,
    })
}
