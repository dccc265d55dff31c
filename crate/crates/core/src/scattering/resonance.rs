use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpcError};
use crate::grid::RadialGrid;
use crate::numerics::{geomspace, linspace};
use crate::statics::CriticalData;

use super::continuum::{near_field_amplitude, MIN_K_RMAX};

/// Points of the coarse logarithmic k grid.
pub const COARSE_POINTS: usize = 200;
/// Points of each dense refinement window.
pub const DENSE_POINTS: usize = 241;
/// Half-width of the dense window in units of the estimated Δ.
pub const DENSE_HALF_WIDTHS: f64 = 8.0;

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ProfileSample {
    pub k: f64,
    /// `|Φ̂_out(σ, k)|²` per unit d³k.
    pub phi_out_sq: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResonanceProfile {
    pub sigma: f64,
    /// Samples sorted by k.
    pub samples: Vec<ProfileSample>,
    pub k_peak: f64,
    pub peak_value: f64,
    /// Half width at half maximum of `|Φ̂_out|²`.
    pub delta_width: f64,
}

/// Coarse scan window `[0.2·√σ, 5·√σ]`, log spaced.
pub fn resonance_k_grid(sigma: f64) -> Vec<f64> {
    let s = sigma.sqrt();
    geomspace(0.2 * s, 5.0 * s, COARSE_POINTS)
}

/// Grid with the spacing of `base`, extended if needed so that the smallest
/// momentum of a scan satisfies the continuum resolution condition.
pub fn grid_for_momentum(base: &RadialGrid, k_min: f64) -> RadialGrid {
    let needed = 1.02 * MIN_K_RMAX / k_min;
    if needed > base.r_max {
        base.extended(needed)
    } else {
        *base
    }
}

/// `|⟨φ_k, Φ⟩|² / (4πk²)`: the outgoing density per unit d³k.
pub fn outgoing_density(critical: &CriticalData, sigma: f64, k: f64) -> Result<f64> {
    let amp = near_field_amplitude(critical, sigma, k)?;
    Ok(amp * amp / (4.0 * std::f64::consts::PI * k * k))
}

fn densities(critical: &CriticalData, sigma: f64, ks: &[f64]) -> Result<Vec<ProfileSample>> {
    ks.par_iter()
        .map(|&k| {
            Ok(ProfileSample {
                k,
                phi_out_sq: outgoing_density(critical, sigma, k)?,
            })
        })
        .collect()
}

/// Linear-interpolated half-maximum crossings on each side of `peak`.
fn half_max_crossings(samples: &[ProfileSample], peak: usize, half: f64) -> Option<(f64, f64)> {
    let cross = |i: usize, j: usize| {
        let (a, b) = (&samples[i], &samples[j]);
        a.k + (half - a.phi_out_sq) * (b.k - a.k) / (b.phi_out_sq - a.phi_out_sq)
    };
    let lo = (1..=peak).rev().find(|&i| samples[i - 1].phi_out_sq < half).map(|i| cross(i - 1, i))?;
    let hi = (peak..samples.len() - 1).find(|&i| samples[i + 1].phi_out_sq < half).map(|i| cross(i, i + 1))?;
    Some((lo, hi))
}

fn argmax(samples: &[ProfileSample]) -> usize {
    samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.phi_out_sq.total_cmp(&b.1.phi_out_sq))
        .map_or(0, |(i, _)| i)
}

impl ResonanceProfile {
    /// Peak and half width of sampled data. The peak is refined by a parabola
    /// through the largest sample and its neighbours; Δ is half the distance
    /// between the interpolated half-maximum crossings.
    pub fn from_samples(sigma: f64, mut samples: Vec<ProfileSample>) -> Result<Self> {
        samples.sort_by(|a, b| a.k.total_cmp(&b.k));
        samples.dedup_by(|a, b| a.k == b.k);
        if samples.len() < 3 {
            return Err(SpcError::Window("need at least three samples".into()));
        }
        if let Some(bad) = samples.iter().find(|s| !(s.phi_out_sq > 0.0)) {
            return Err(SpcError::Numerical(format!("non-positive profile value at k = {}", bad.k)));
        }
        let i = argmax(&samples);
        if i == 0 || i == samples.len() - 1 {
            return Err(SpcError::Window(format!(
                "profile maximum at the edge of the k window (k = {}) for sigma = {sigma}",
                samples[i].k
            )));
        }
        let (k0, k1, k2) = (samples[i - 1].k, samples[i].k, samples[i + 1].k);
        let (y0, y1, y2) = (samples[i - 1].phi_out_sq, samples[i].phi_out_sq, samples[i + 1].phi_out_sq);
        // vertex of the parabola through the three points
        let d0 = (y1 - y0) / (k1 - k0);
        let d1 = (y2 - y1) / (k2 - k1);
        let curv = (d1 - d0) / (k2 - k0);
        let (k_peak, peak_value) = if curv < 0.0 {
            let kp = 0.5 * (k0 + k1) - d0 / (2.0 * curv);
            let kp = kp.clamp(k0, k2);
            (kp, y1 + d0 * (kp - k1) + curv * (kp - k0) * (kp - k1))
        } else {
            (k1, y1)
        };
        let (lo, hi) = half_max_crossings(&samples, i, 0.5 * peak_value).ok_or_else(|| {
            SpcError::Window(format!("half maximum not reached inside the k window for sigma = {sigma}"))
        })?;
        Ok(Self {
            sigma,
            samples,
            k_peak,
            peak_value,
            delta_width: 0.5 * (hi - lo),
        })
    }

    /// Samples within `k_peak ± n·Δ`.
    pub fn near_peak(&self, n: f64) -> impl Iterator<Item = &ProfileSample> {
        let (lo, hi) = (self.k_peak - n * self.delta_width, self.k_peak + n * self.delta_width);
        self.samples.iter().filter(move |s| s.k >= lo && s.k <= hi)
    }
}

/// Outgoing density on `k_grid` followed by dense refinement windows around
/// the peak until the half-maximum crossings are resolved.
pub fn scan_resonance(critical: &CriticalData, sigma: f64, k_grid: &[f64]) -> Result<ResonanceProfile> {
    if !(sigma > 0.0) {
        return Err(SpcError::Usage(format!("resonance scans need sigma > 0, got {sigma}")));
    }
    let mut samples = densities(critical, sigma, k_grid)?;
    let mut profile = ResonanceProfile::from_samples(sigma, samples.clone())?;
    let k_floor = k_grid.iter().copied().fold(f64::INFINITY, f64::min);
    for _ in 0..4 {
        let dk = 2.0 * DENSE_HALF_WIDTHS * profile.delta_width / (DENSE_POINTS - 1) as f64;
        let lo = (profile.k_peak - DENSE_HALF_WIDTHS * profile.delta_width).max(k_floor);
        let dense = linspace(lo, lo + dk * (DENSE_POINTS - 1) as f64, DENSE_POINTS);
        let previous = profile.delta_width;
        samples.extend(densities(critical, sigma, &dense)?);
        profile = ResonanceProfile::from_samples(sigma, samples.clone())?;
        if (profile.delta_width / previous - 1.0).abs() < 0.05 {
            return Ok(profile);
        }
    }
    Ok(profile)
}
