//! Implicit-midpoint propagation of `i∂_sψ = ε⁻¹(D_σ(s) − edge)ψ`.
//!
//! Each step solves `(1 + iθH)ψ' = (1 − iθH)ψ` with `θ = Δs/(2ε)` and H the
//! shifted lattice operator at the step midpoint. H is real symmetric
//! tridiagonal, so the Cayley transform is unitary and each step is a
//! complex tridiagonal solve. Removing the edge energy only changes the
//! global phase and keeps the resonant dynamics slow.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpcError};
use crate::grid::RadialGrid;
use crate::operator::{assemble_operator, DiscreteOperator};
use crate::potential::PotentialModel;
use crate::spinor::{inner_product, RadialSpinor};

use super::schedule::Schedule;

/// Default ratio `(Δs/ε)·ρ` between step and the spectral radius bound.
pub const DEFAULT_STEP_FACTOR: f64 = 0.1;
/// Largest accepted step ratio.
pub const MAX_STEP_FACTOR: f64 = 0.5;
/// Norm drift above which a run is a numerical failure.
pub const NORM_FAILURE: f64 = 1e-8;
/// Norm drift target reported by every run.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationOptions {
    /// `(Δs/ε)·ρ` with ρ the Gershgorin bound of the shifted operator.
    pub step_factor: f64,
    /// Survival is recorded every this many steps (and at the end).
    pub sample_stride: usize,
    /// Stop once the survival falls below this value.
    pub stop_below: Option<f64>,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            step_factor: DEFAULT_STEP_FACTOR,
            sample_stride: 1,
            stop_below: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub schedule: Schedule,
    pub times: Vec<f64>,
    /// `|⟨ψ(s), Φ⟩|` against the fixed reference state.
    pub survival: Vec<f64>,
    /// Largest `|‖ψ‖² − 1|` over the recorded samples.
    pub norm_drift: f64,
    pub final_state: RadialSpinor,
    pub final_s: f64,
    pub step: f64,
    pub steps: usize,
}

/// Tridiagonal Cayley stepper for a fixed operator.
struct CayleyStep {
    theta: f64,
    diag: Vec<f64>,
    off: Vec<f64>,
    // forward-elimination factors for (1 + iθH)
    cprime: Vec<Complex64>,
    inv_denom: Vec<Complex64>,
}

impl CayleyStep {
    fn new(op: &DiscreteOperator, shift: f64, theta: f64) -> Self {
        let d = op.dim();
        let diag: Vec<f64> = op.diag.iter().map(|v| v - shift).collect();
        let off = op.off.clone();
        let i = Complex64::i();
        let mut cprime = vec![Complex64::new(0.0, 0.0); d];
        let mut inv_denom = vec![Complex64::new(0.0, 0.0); d];
        let mut prev_c = Complex64::new(0.0, 0.0);
        for k in 0..d {
            let a = Complex64::new(1.0, 0.0) + i * theta * diag[k];
            let lower = if k > 0 { i * theta * off[k - 1] } else { Complex64::new(0.0, 0.0) };
            let denom = a - lower * prev_c;
            let inv = 1.0 / denom;
            inv_denom[k] = inv;
            if k + 1 < d {
                prev_c = i * theta * off[k] * inv;
                cprime[k] = prev_c;
            }
        }
        Self {
            theta,
            diag,
            off,
            cprime,
            inv_denom,
        }
    }

    fn apply(&self, psi: &mut [Complex64], rhs: &mut [Complex64]) {
        let d = psi.len();
        let i = Complex64::i();
        let t = self.theta;
        for k in 0..d {
            let mut h = psi[k] * self.diag[k];
            if k > 0 {
                h += psi[k - 1] * self.off[k - 1];
            }
            if k + 1 < d {
                h += psi[k + 1] * self.off[k];
            }
            rhs[k] = psi[k] - i * t * h;
        }
        // forward sweep, then back substitution into psi
        let mut prev = Complex64::new(0.0, 0.0);
        for k in 0..d {
            let lower = if k > 0 { i * t * self.off[k - 1] } else { Complex64::new(0.0, 0.0) };
            prev = (rhs[k] - lower * prev) * self.inv_denom[k];
            rhs[k] = prev;
        }
        psi[d - 1] = rhs[d - 1];
        for k in (0..d - 1).rev() {
            psi[k] = rhs[k] - self.cprime[k] * psi[k + 1];
        }
    }
}

fn norm_sq(v: &[Complex64], h: f64) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>() * h
}

/// Step length for `schedule` on `grid` with the given step factor.
pub fn step_length(model: &PotentialModel, grid: &RadialGrid, schedule: &Schedule, step_factor: f64) -> Result<(f64, usize)> {
    if !(step_factor > 0.0 && step_factor <= MAX_STEP_FACTOR) {
        return Err(SpcError::Config(format!(
            "step factor (Δs/ε)·ρ = {step_factor} must lie in (0, {MAX_STEP_FACTOR}]"
        )));
    }
    let mut rho: f64 = 0.0;
    for sigma in schedule.sigma_extremes() {
        let op = assemble_operator(grid, model, sigma)?;
        rho = rho.max(op.spectral_radius_bound(model.edge()));
    }
    let max_step = step_factor * schedule.epsilon / rho;
    let span = schedule.s_end - schedule.s_start;
    let steps = (span / max_step).ceil().max(1.0) as usize;
    Ok((span / steps as f64, steps))
}

/// Propagate `psi0` over the schedule, recording the survival against
/// `reference`.
pub fn propagate(
    model: &PotentialModel,
    grid: &RadialGrid,
    schedule: &Schedule,
    psi0: &RadialSpinor,
    reference: &RadialSpinor,
    options: &PropagationOptions,
) -> Result<EvolutionResult> {
    schedule.validate()?;
    model.validate()?;
    if options.sample_stride == 0 {
        return Err(SpcError::Config("sample stride must be at least 1".into()));
    }
    if !psi0.grid.same_as(grid) || psi0.kappa != model.kappa {
        return Err(SpcError::Usage("initial state does not match the model grid or channel".into()));
    }
    let n0 = psi0.norm_sq();
    if (n0 - 1.0).abs() > 1e-9 {
        return Err(SpcError::Usage(format!("initial state must have unit norm, got {n0}")));
    }
    let (ds, steps) = step_length(model, grid, schedule, options.step_factor)?;
    let theta = ds / (2.0 * schedule.epsilon);
    let shift = model.edge();
    let h = grid.spacing;

    let mut psi = psi0.to_interleaved();
    let mut rhs = vec![Complex64::new(0.0, 0.0); psi.len()];
    let fixed = if schedule.is_constant() {
        Some(CayleyStep::new(&assemble_operator(grid, model, schedule.sigma(0.0))?, shift, theta))
    } else {
        None
    };
    let survival_of = |psi: &[Complex64]| -> Result<f64> {
        let s = RadialSpinor::from_interleaved(*grid, model.kappa, psi);
        Ok(inner_product(reference, &s)?.norm())
    };
    let mut times = vec![schedule.s_start];
    let mut survival = vec![survival_of(&psi)?];
    let mut drift: f64 = 0.0;
    let mut s = schedule.s_start;
    let mut taken = 0;
    for step in 1..=steps {
        let mid = schedule.s_start + (step as f64 - 0.5) * ds;
        match &fixed {
            Some(stepper) => stepper.apply(&mut psi, &mut rhs),
            None => {
                let op = assemble_operator(grid, model, schedule.sigma(mid))?;
                CayleyStep::new(&op, shift, theta).apply(&mut psi, &mut rhs);
            }
        }
        s = schedule.s_start + step as f64 * ds;
        taken = step;
        if step % options.sample_stride == 0 || step == steps {
            let sv = survival_of(&psi)?;
            drift = drift.max((norm_sq(&psi, h) - 1.0).abs());
            times.push(s);
            survival.push(sv);
            if drift > NORM_FAILURE {
                return Err(SpcError::Numerical(format!("norm drift {drift:e} at s = {s}")));
            }
            if options.stop_below.is_some_and(|t| sv < t) {
                break;
            }
        }
    }
    drift = drift.max((norm_sq(&psi, h) - 1.0).abs());
    Ok(EvolutionResult {
        schedule: *schedule,
        times,
        survival,
        norm_drift: drift,
        final_state: RadialSpinor::from_interleaved(*grid, model.kappa, &psi),
        final_s: s,
        step: ds,
        steps: taken,
    })
}
