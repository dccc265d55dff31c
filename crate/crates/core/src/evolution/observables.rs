use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpcError};
use crate::numerics::trapezoid;
use crate::operator::assemble_operator;
use crate::scattering::{continuum_wave, resonance_k_grid, scan_resonance, ResonanceProfile};
use crate::spinor::{inner_product, RadialSpinor};
use crate::statics::{solve_bound_state, CriticalData};

use super::propagate::{propagate, EvolutionResult, PropagationOptions};
use super::schedule::Schedule;

/// First downward crossing of 1/2 after s = 0, linearly interpolated.
pub fn crossing_time(times: &[f64], survival: &[f64]) -> Result<f64> {
    for i in 1..times.len().min(survival.len()) {
        if times[i] > 0.0 && survival[i - 1] >= 0.5 && survival[i] < 0.5 {
            let (t0, t1, y0, y1) = (times[i - 1], times[i], survival[i - 1], survival[i]);
            return Ok(t0 + (0.5 - y0) * (t1 - t0) / (y1 - y0));
        }
    }
    Err(SpcError::NoCrossing)
}

/// Decay time s_d: `|⟨U(s_d, 0)Φ, Φ⟩| = 1/2`.
pub fn decay_time(result: &EvolutionResult) -> Result<f64> {
    crossing_time(&result.times, &result.survival)
}

/// Threshold state normalized on the box, the initial and reference state of
/// every run.
pub fn box_normalized_phi(critical: &CriticalData) -> Result<RadialSpinor> {
    critical.phi.clone().normalized()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StaticDecay {
    pub sigma: f64,
    pub epsilon: f64,
    pub s_d_measured: f64,
    /// `4ε/(k(σ)Δ(σ))`.
    pub s_d_formula: f64,
    pub k_peak: f64,
    pub delta_width: f64,
    pub norm_drift: f64,
}

impl StaticDecay {
    pub fn ratio(&self) -> f64 {
        self.s_d_measured / self.s_d_formula
    }
}

/// Decay of Φ under the frozen operator D_σ, compared with `4ε/(kΔ)` from the
/// resonance scan at the same σ.
pub fn static_decay_check(
    critical: &CriticalData,
    sigma: f64,
    epsilon: f64,
    options: &PropagationOptions,
) -> Result<(StaticDecay, EvolutionResult)> {
    let profile = scan_resonance(critical, sigma, &resonance_k_grid(sigma))?;
    static_decay_with_profile(critical, &profile, epsilon, options)
}

/// [`static_decay_check`] with a precomputed profile.
pub fn static_decay_with_profile(
    critical: &CriticalData,
    profile: &ResonanceProfile,
    epsilon: f64,
    options: &PropagationOptions,
) -> Result<(StaticDecay, EvolutionResult)> {
    let sigma = profile.sigma;
    let formula = 4.0 * epsilon / (profile.k_peak * profile.delta_width);
    let phi = box_normalized_phi(critical)?;
    let schedule = Schedule::frozen(sigma, 2.0 * formula, epsilon);
    let mut opts = *options;
    opts.stop_below = Some(opts.stop_below.unwrap_or(0.45).min(0.45));
    let grid = critical.phi.grid;
    let run = propagate(&critical.model, &grid, &schedule, &phi, &phi, &opts)?;
    let measured = decay_time(&run)?;
    Ok((
        StaticDecay {
            sigma,
            epsilon,
            s_d_measured: measured,
            s_d_formula: formula,
            k_peak: profile.k_peak,
            delta_width: profile.delta_width,
            norm_drift: run.norm_drift,
        },
        run,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShortTimeConfig {
    /// Coupling increment held during the overcritical interval.
    pub a: f64,
    /// Duration S of the interval in macroscopic time.
    #[serde(rename = "S")]
    pub duration: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShortTimeResult {
    pub a: f64,
    #[serde(rename = "S")]
    pub duration: f64,
    pub epsilon: f64,
    pub p_measured: f64,
    pub p_estimate: f64,
    /// False when `p_measured > 0.1` (outside the perturbative regime).
    pub perturbative: bool,
    pub norm_drift: f64,
}

/// Probability `‖P⊥U(S, 0)Φ‖²` of leaving Φ during a short step of the
/// coupling, with the first-order estimate `(S/ε)²·a²·‖P⊥ shape·Φ‖²`.
pub fn short_time_probability(
    critical: &CriticalData,
    cfg: &ShortTimeConfig,
    options: &PropagationOptions,
) -> Result<ShortTimeResult> {
    if !(cfg.a >= 0.0 && cfg.duration > 0.0 && cfg.epsilon > 0.0) {
        return Err(SpcError::Config("short-time run needs a ≥ 0, S > 0, ε > 0".into()));
    }
    let model = critical.model;
    let grid = critical.phi.grid;
    let phi = box_normalized_phi(critical)?;
    let sigma = cfg.a / model.lambda_slope;
    let schedule = Schedule::frozen(sigma, cfg.duration, cfg.epsilon);
    let run = propagate(&model, &grid, &schedule, &phi, &phi, options)?;
    let psi = &run.final_state;
    let p_measured = perp_norm_sq(psi, &phi)?;

    let h = grid.spacing;
    let mut chi = phi.clone();
    for j in 0..grid.n {
        chi.u1[j] *= model.shape.sampled(phi.u1_radius(j), h);
        chi.u2[j] *= model.shape.sampled(phi.u2_radius(j), h);
    }
    let leak = perp_norm_sq(&chi, &phi)?;
    let p_estimate = (cfg.duration / cfg.epsilon * cfg.a).powi(2) * leak;
    Ok(ShortTimeResult {
        a: cfg.a,
        duration: cfg.duration,
        epsilon: cfg.epsilon,
        p_measured,
        p_estimate,
        perturbative: p_measured <= 0.1,
        norm_drift: run.norm_drift,
    })
}

/// `‖ψ − Φ⟨Φ, ψ⟩‖²` for a unit Φ.
fn perp_norm_sq(psi: &RadialSpinor, phi: &RadialSpinor) -> Result<f64> {
    let c = inner_product(phi, psi)?;
    Ok((psi.norm_sq() - c.norm_sqr()).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub k: f64,
    /// `|⟨φ_k, ψ⟩|²` per unit k.
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum {
    pub sigma: f64,
    pub samples: Vec<SpectrumSample>,
    /// `∫ weight dk` over the sampled window.
    pub continuum_weight: f64,
    /// Weight on the gap eigenstate at σ(s_end), zero if there is none.
    pub bound_weight: f64,
    /// `1 − continuum − bound`: unresolved box states and the k range
    /// outside the window.
    pub remainder: f64,
}

impl Spectrum {
    pub fn peak(&self) -> f64 {
        self.samples
            .iter()
            .max_by(|a, b| a.weight.total_cmp(&b.weight))
            .map_or(f64::NAN, |s| s.k)
    }
}

/// Momentum distribution of the final state in the continuum basis of the
/// operator at the end of the run.
pub fn outgoing_spectrum(result: &EvolutionResult, critical: &CriticalData, k_grid: &[f64]) -> Result<Spectrum> {
    let sigma = result.schedule.sigma(result.final_s);
    let psi = &result.final_state;
    let grid = psi.grid;
    let model = critical.model;
    let samples: Vec<SpectrumSample> = k_grid
        .par_iter()
        .map(|&k| {
            let w = continuum_wave(&model, &grid, sigma, k)?;
            Ok(SpectrumSample {
                k,
                weight: inner_product(&w.wave, psi)?.norm_sqr(),
            })
        })
        .collect::<Result<_>>()?;
    let ks: Vec<f64> = samples.iter().map(|s| s.k).collect();
    let ws: Vec<f64> = samples.iter().map(|s| s.weight).collect();
    let continuum_weight = trapezoid(&ks, &ws);
    let op = assemble_operator(&grid, &model, sigma)?;
    let bound_weight = match solve_bound_state(&op, (-1.0, 1.0)) {
        Ok(b) => inner_product(&b.wavefunction, psi)?.norm_sqr(),
        Err(SpcError::NoBoundState { .. }) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(Spectrum {
        sigma,
        samples,
        continuum_weight,
        bound_weight,
        remainder: 1.0 - continuum_weight - bound_weight,
    })
}
