use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpcError};
use crate::grid::RadialGrid;
use crate::numerics::{linear_fit, LinearFit};
use crate::operator::assemble_operator;
use crate::potential::PotentialModel;

use super::critical::identity_residual;
use super::shooting::solve_bound_state;

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct TrackSample {
    pub sigma: f64,
    pub energy: f64,
    pub kappa: f64,
    pub identity_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundStateTrack {
    pub samples: Vec<TrackSample>,
    /// σ at which the fitted κ² reaches zero.
    pub sigma_c: f64,
    /// Finite-difference dE/dσ at the last sample.
    pub de_dsigma: f64,
    /// Linear fit of κ² against |σ|.
    pub kappa_sq_fit: Option<LinearFit>,
    /// Set when the bound state was lost before the end of the list.
    pub diagnostic: Option<String>,
}

/// Gap eigenvalue along `sigma_list` (evaluated in parallel, merged in input
/// order). A failed solve truncates the track and records a diagnostic.
pub fn track_eigenvalue(model: &PotentialModel, grid: &RadialGrid, sigma_list: &[f64]) -> Result<BoundStateTrack> {
    if sigma_list.is_empty() {
        return Err(SpcError::Usage("sigma list is empty".into()));
    }
    model.validate()?;
    let results: Vec<Result<TrackSample>> = sigma_list
        .par_iter()
        .map(|&sigma| {
            let op = assemble_operator(grid, model, sigma)?;
            let b = solve_bound_state(&op, (-1.0, 1.0))?;
            Ok(TrackSample {
                sigma,
                energy: b.energy,
                kappa: b.decay_kappa,
                identity_residual: identity_residual(&b.wavefunction, model, sigma)?,
            })
        })
        .collect();
    let mut samples = Vec::new();
    let mut diagnostic = None;
    for (sigma, r) in sigma_list.iter().zip(results) {
        match r {
            Ok(s) => samples.push(s),
            Err(e) => {
                diagnostic = Some(format!("bound state lost at sigma = {sigma}: {e}"));
                break;
            }
        }
    }
    if samples.is_empty() {
        return Err(SpcError::Model(diagnostic.unwrap_or_default()));
    }
    let de_dsigma = match samples.len() {
        1 => f64::NAN,
        n => (samples[n - 1].energy - samples[n - 2].energy) / (samples[n - 1].sigma - samples[n - 2].sigma),
    };
    let xs: Vec<f64> = samples.iter().map(|s| s.sigma.abs()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.kappa * s.kappa).collect();
    let kappa_sq_fit = linear_fit(&xs, &ys).ok();
    let sigma_c = kappa_sq_fit.map_or(f64::NAN, |f| f.intercept / f.slope);
    Ok(BoundStateTrack {
        samples,
        sigma_c,
        de_dsigma,
        kappa_sq_fit,
        diagnostic,
    })
}
