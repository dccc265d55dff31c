use serde::{Deserialize, Serialize};

use crate::error::{Result, SpcError};
use crate::evolution::{
    box_normalized_phi, outgoing_spectrum, propagate, EvolutionResult, PropagationOptions, Schedule, SigmaProfile,
    Spectrum,
};
use crate::numerics::{interp, linspace, trapezoid};
use crate::scattering::{resonance_k_grid, scan_resonance, ResonanceProfile};
use crate::statics::CriticalData;

/// L¹ distance below which a spectrum counts as resonance-like.
pub const RESONANCE_LIKE_DISTANCE: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumClass {
    ResonanceLike,
    WashedOut,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumComparison {
    /// `½∫|p − q| dk` between the normalized spectrum and the normalized
    /// resonance profile (as a density in k).
    pub l1_distance: f64,
    /// Spectrum peak minus profile peak.
    pub peak_offset: f64,
    pub class: SpectrumClass,
}

/// Compares a measured momentum spectrum with the static resonance profile
/// on the spectrum's k grid.
pub fn spectrum_comparison(spectrum: &Spectrum, profile: &ResonanceProfile) -> Result<SpectrumComparison> {
    if spectrum.samples.len() < 3 {
        return Err(SpcError::Usage("spectrum needs at least 3 samples".into()));
    }
    let ks: Vec<f64> = spectrum.samples.iter().map(|s| s.k).collect();
    let p: Vec<f64> = spectrum.samples.iter().map(|s| s.weight).collect();
    let pk: Vec<f64> = profile.samples.iter().map(|s| s.k).collect();
    let pd: Vec<f64> = profile
        .samples
        .iter()
        .map(|s| 4.0 * std::f64::consts::PI * s.k * s.k * s.phi_out_sq)
        .collect();
    let (lo, hi) = (pk[0], pk[pk.len() - 1]);
    let q: Vec<f64> = ks
        .iter()
        .map(|&k| if k < lo || k > hi { 0.0 } else { interp(&pk, &pd, k) })
        .collect();
    let (np, nq) = (trapezoid(&ks, &p), trapezoid(&ks, &q));
    if !(np > 0.0 && nq > 0.0) {
        return Err(SpcError::UndefinedInput("spectrum or profile has no weight on the k grid".into()));
    }
    let diff: Vec<f64> = p.iter().zip(&q).map(|(a, b)| (a / np - b / nq).abs()).collect();
    let l1_distance = 0.5 * trapezoid(&ks, &diff);
    Ok(SpectrumComparison {
        l1_distance,
        peak_offset: spectrum.peak() - profile.k_peak,
        class: if l1_distance < RESONANCE_LIKE_DISTANCE {
            SpectrumClass::ResonanceLike
        } else {
            SpectrumClass::WashedOut
        },
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DichotomyConfig {
    /// Frozen σ of the long static run and peak σ of the tent.
    pub sigma: f64,
    /// Length of the static run in microscopic time.
    pub static_tau: f64,
    /// ε of the static run (only sets the s scale).
    pub static_epsilon: f64,
    pub tent_slope: f64,
    pub tent_epsilon: f64,
    /// σ at the end of the tent (below zero, back in the bound regime).
    pub tent_sigma_end: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub k_points: usize,
}

impl Default for DichotomyConfig {
    fn default() -> Self {
        Self {
            sigma: 0.2,
            static_tau: 250.0,
            static_epsilon: 0.01,
            tent_slope: 4.0,
            tent_epsilon: 0.01,
            tent_sigma_end: -0.05,
            k_min: 0.11,
            k_max: 1.2,
            k_points: 300,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DichotomyRun {
    pub label: &'static str,
    pub evolution: EvolutionResult,
    pub spectrum: Spectrum,
    pub comparison: SpectrumComparison,
}

/// The long static run and the fast tent run, both started from Φ, each
/// compared with the static resonance profile at `cfg.sigma`.
pub fn spectrum_dichotomy(
    critical: &CriticalData,
    cfg: &DichotomyConfig,
    options: &PropagationOptions,
) -> Result<(ResonanceProfile, Vec<DichotomyRun>)> {
    if !(cfg.sigma > 0.0 && cfg.tent_slope > 0.0 && cfg.tent_sigma_end < 0.0 && cfg.k_points >= 3) {
        return Err(SpcError::Config("dichotomy needs sigma > 0, tent_slope > 0, tent_sigma_end < 0, k_points >= 3".into()));
    }
    let profile = scan_resonance(critical, cfg.sigma, &resonance_k_grid(cfg.sigma))?;
    let ks = linspace(cfg.k_min, cfg.k_max, cfg.k_points);
    let phi = box_normalized_phi(critical)?;
    let schedules = [
        ("static", Schedule::frozen(cfg.sigma, cfg.static_tau * cfg.static_epsilon, cfg.static_epsilon)),
        (
            "tent",
            Schedule {
                profile: SigmaProfile::Tent { sigma_max: cfg.sigma, slope: cfg.tent_slope },
                s_start: -cfg.sigma / cfg.tent_slope,
                s_end: (cfg.sigma - cfg.tent_sigma_end) / cfg.tent_slope,
                epsilon: cfg.tent_epsilon,
            },
        ),
    ];
    let grid = critical.phi.grid;
    let runs = schedules
        .iter()
        .map(|(label, schedule)| {
            let evolution = propagate(&critical.model, &grid, schedule, &phi, &phi, options)?;
            let spectrum = outgoing_spectrum(&evolution, critical, &ks)?;
            let comparison = spectrum_comparison(&spectrum, &profile)?;
            Ok(DichotomyRun { label, evolution, spectrum, comparison })
        })
        .collect::<Result<_>>()?;
    Ok((profile, runs))
}
