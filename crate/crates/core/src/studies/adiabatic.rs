use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::evolution::{propagate, PropagationOptions, Schedule, SigmaProfile};
use crate::grid::RadialGrid;
use crate::operator::assemble_operator;
use crate::potential::PotentialModel;
use crate::statics::solve_bound_state;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AdiabaticControl {
    pub epsilon: f64,
    pub sigma_start: f64,
    pub sigma_end: f64,
    /// `1 − |⟨ψ(s_end), b(s_end)⟩|²` with b the instantaneous bound state.
    pub leak: f64,
    pub norm_drift: f64,
}

/// Follows the bound state along σ(s) = s from `sigma_start` to `sigma_end`,
/// both undercritical, and measures what leaves the instantaneous bound state.
pub fn adiabatic_control(
    model: &PotentialModel,
    grid: &RadialGrid,
    sigma_start: f64,
    sigma_end: f64,
    epsilon: f64,
    options: &PropagationOptions,
) -> Result<AdiabaticControl> {
    let schedule = Schedule {
        profile: SigmaProfile::Linear { rate: 1.0, offset: 0.0 },
        s_start: sigma_start,
        s_end: sigma_end,
        epsilon,
    };
    schedule.validate()?;
    let bound = |sigma: f64| {
        let op = assemble_operator(grid, model, sigma)?;
        solve_bound_state(&op, (-1.0, 1.0)).and_then(|b| b.wavefunction.normalized())
    };
    let start = bound(sigma_start)?;
    let end = bound(sigma_end)?;
    let run = propagate(model, grid, &schedule, &start, &end, options)?;
    let overlap = run.survival.last().copied().unwrap_or(0.0);
    Ok(AdiabaticControl {
        epsilon,
        sigma_start,
        sigma_end,
        leak: (1.0 - overlap * overlap).max(0.0),
        norm_drift: run.norm_drift,
    })
}
