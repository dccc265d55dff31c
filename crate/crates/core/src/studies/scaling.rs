use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpcError};
use crate::evolution::{
    box_normalized_phi, decay_time, propagate, static_decay_with_profile, EvolutionResult, PropagationOptions,
    Schedule,
};
use crate::numerics::{brent, interp, linear_fit};
use crate::scattering::{resonance_k_grid, scan_resonance, ResonanceConstants};
use crate::statics::CriticalData;

/// Relative change of s_d allowed between a run and its half-step replicate.
pub const STEP_REFINEMENT_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r_squared: f64,
    /// The fitted (x, y) pairs in linear units.
    pub points: Vec<(f64, f64)>,
}

/// Study-level summary written as JSON.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StudySummary {
    pub slope: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub excluded_runs: usize,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn loglog_fit(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(SpcError::Study(format!("fewer than 3 valid points: got {}", points.len())));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(SpcError::Study("log-log fit needs positive data".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let f = linear_fit(&xs, &ys)?;
    Ok(ScalingFit {
        slope: f.slope,
        intercept: f.intercept,
        stderr: f.slope_stderr,
        r_squared: f.r_squared,
        points: points.to_vec(),
    })
}

/// Self-consistent static decay time: the solution of `s_d = 4ε/(k(σ)Δ(σ))`
/// at `σ = s_d`, using the peak and width laws of the fitted profile,
/// `k(σ)Δ(σ) = (C₀/|C₂|)^{3/2}·(|C₃|/(2|C₂|))·σ^{3/2}`.
pub fn fixed_point_sd(constants: &ResonanceConstants, epsilon: f64) -> f64 {
    let c0 = constants.c0;
    let c2 = constants.abs_c2;
    let c3 = constants.abs_c3;
    (4.0 * epsilon * (2.0 * c2 / c3) * (c2 / c0).powf(1.5)).powf(0.4)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub epsilon: f64,
    /// σ at which the operator was frozen (static studies only).
    pub sigma: Option<f64>,
    pub s_d: Option<f64>,
    pub norm_drift: f64,
    pub excluded: Option<String>,
    #[serde(skip)]
    pub times: Vec<f64>,
    #[serde(skip)]
    pub survival: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct StudyOutcome {
    pub fit: ScalingFit,
    pub runs: Vec<RunRecord>,
}

impl StudyOutcome {
    pub fn summary(&self) -> StudySummary {
        StudySummary {
            slope: self.fit.slope,
            stderr: self.fit.stderr,
            r_squared: self.fit.r_squared,
            excluded_runs: self.runs.iter().filter(|r| r.excluded.is_some()).count(),
        }
    }
}

fn finish(runs: Vec<RunRecord>) -> Result<StudyOutcome> {
    for r in runs.iter().filter(|r| r.excluded.is_some()) {
        warn!("excluded run at epsilon = {}: {}", r.epsilon, r.excluded.as_deref().unwrap_or(""));
    }
    let points: Vec<(f64, f64)> = runs
        .iter()
        .filter(|r| r.excluded.is_none())
        .filter_map(|r| r.s_d.map(|s| (r.epsilon, s)))
        .collect();
    let fit = loglog_fit(&points)?;
    Ok(StudyOutcome { fit, runs })
}

fn check_sweep(epsilons: &[f64]) -> Result<()> {
    if epsilons.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(SpcError::Config("epsilon values must be positive".into()));
    }
    if epsilons.len() < 3 {
        return Err(SpcError::Study(format!(
            "fewer than 3 valid points: {} epsilon values given",
            epsilons.len()
        )));
    }
    let lo = epsilons.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = epsilons.iter().copied().fold(0.0, f64::max);
    if (hi / lo).log10() < 1.5 {
        warn!("epsilon sweep spans only {:.2} decades", (hi / lo).log10());
    }
    Ok(())
}

fn crossing_run(critical: &CriticalData, epsilon: f64, s_max: f64, options: &PropagationOptions) -> Result<EvolutionResult> {
    let phi = box_normalized_phi(critical)?;
    let schedule = Schedule::crossing(0.0, s_max, epsilon);
    let mut opts = *options;
    opts.stop_below = Some(0.45);
    propagate(&critical.model, &critical.phi.grid, &schedule, &phi, &phi, &opts)
}

/// Decay times of the full time-dependent crossing σ(s) = s for each ε,
/// with a half-step replicate per run; runs without a crossing or failing
/// the refinement check are excluded.
pub fn scaling_study(
    critical: &CriticalData,
    epsilons: &[f64],
    s_max: f64,
    options: &PropagationOptions,
) -> Result<StudyOutcome> {
    check_sweep(epsilons)?;
    let mut sorted = epsilons.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let runs: Vec<RunRecord> = sorted
        .par_iter()
        .map(|&epsilon| {
            let mut record = RunRecord {
                epsilon,
                sigma: None,
                s_d: None,
                norm_drift: 0.0,
                excluded: None,
                times: Vec::new(),
                survival: Vec::new(),
            };
            let run = match crossing_run(critical, epsilon, s_max, options) {
                Ok(r) => r,
                Err(e) => {
                    record.excluded = Some(e.to_string());
                    return Ok(record);
                }
            };
            record.norm_drift = run.norm_drift;
            match decay_time(&run) {
                Ok(sd) => {
                    record.s_d = Some(sd);
                    let mut half = *options;
                    half.step_factor *= 0.5;
                    half.sample_stride *= 2;
                    let refined = crossing_run(critical, epsilon, s_max, &half).and_then(|r| {
                        record.norm_drift = record.norm_drift.max(r.norm_drift);
                        decay_time(&r)
                    });
                    match refined {
                        Ok(s2) if (s2 / sd - 1.0).abs() <= STEP_REFINEMENT_TOLERANCE => {}
                        Ok(s2) => record.excluded = Some(format!("step refinement moved s_d from {sd} to {s2}")),
                        Err(e) => record.excluded = Some(format!("step refinement failed: {e}")),
                    }
                }
                Err(e) => record.excluded = Some(e.to_string()),
            }
            record.times = run.times;
            record.survival = run.survival;
            Ok::<_, SpcError>(record)
        })
        .collect::<Result<_>>()?;
    finish(runs)
}

/// Microscopic half-life `τ_½(σ) = s_d/ε` of Φ under the frozen operator.
pub fn static_half_life(critical: &CriticalData, sigma: f64, options: &PropagationOptions) -> Result<(f64, f64)> {
    let profile = scan_resonance(critical, sigma, &resonance_k_grid(sigma))?;
    let (d, _) = static_decay_with_profile(critical, &profile, 1.0, options)?;
    Ok((d.s_d_measured, d.norm_drift))
}

/// Static-operator study: for each ε the operator is frozen at the σ that
/// solves `σ = s_d(σ, ε)`, where `s_d(σ, ε) = ε·τ_½(σ)` is the measured
/// static decay time. τ_½ is measured on `sigma_table`, the self-consistent
/// σ is found by log-log interpolation, and s_d is then measured directly
/// at that σ.
pub fn static_scaling_study(
    critical: &CriticalData,
    epsilons: &[f64],
    sigma_table: &[f64],
    options: &PropagationOptions,
) -> Result<StudyOutcome> {
    check_sweep(epsilons)?;
    if sigma_table.len() < 3 {
        return Err(SpcError::Config("sigma table needs at least 3 values".into()));
    }
    let mut table = sigma_table.to_vec();
    table.sort_by(|a, b| a.total_cmp(b));
    let half_lives: Vec<(f64, f64)> = table
        .par_iter()
        .map(|&s| static_half_life(critical, s, options))
        .collect::<Result<_>>()?;
    let ln_s: Vec<f64> = table.iter().map(|s| s.ln()).collect();
    let ln_tau: Vec<f64> = half_lives.iter().map(|t| t.0.ln()).collect();
    let table_drift = half_lives.iter().map(|t| t.1).fold(0.0, f64::max);
    let (lo, hi) = (ln_s[0], ln_s[ln_s.len() - 1]);

    let mut sorted = epsilons.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let runs: Vec<RunRecord> = sorted
        .par_iter()
        .map(|&epsilon| {
            let mut record = RunRecord {
                epsilon,
                sigma: None,
                s_d: None,
                norm_drift: table_drift,
                excluded: None,
                times: Vec::new(),
                survival: Vec::new(),
            };
            let g = |x: f64| epsilon.ln() + interp(&ln_s, &ln_tau, x) - x;
            if g(lo) * g(hi) > 0.0 {
                record.excluded = Some("self-consistent sigma outside the sigma table".into());
                return record;
            }
            let sigma = match brent(g, lo, hi, 1e-12, 200) {
                Ok(x) => x.exp(),
                Err(e) => {
                    record.excluded = Some(e.to_string());
                    return record;
                }
            };
            record.sigma = Some(sigma);
            let direct = scan_resonance(critical, sigma, &resonance_k_grid(sigma))
                .and_then(|p| static_decay_with_profile(critical, &p, epsilon, options));
            match direct {
                Ok((d, run)) => {
                    record.s_d = Some(d.s_d_measured);
                    record.norm_drift = record.norm_drift.max(d.norm_drift);
                    record.times = run.times;
                    record.survival = run.survival;
                }
                Err(e) => record.excluded = Some(e.to_string()),
            }
            record
        })
        .collect();
    finish(runs)
}
