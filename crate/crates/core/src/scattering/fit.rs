//! Fit of the near-critical profile
//! `|Φ̂_out|² ≈ C·k² / ((C₀σ − |C₂|k²)² + |C₃|²k⁶)`.
//!
//! The model is invariant under `(C, C₀, C₂, C₃) → (l²C, lC₀, lC₂, lC₃)`, so one
//! constant has to be fixed. Pinning C (computed independently from the
//! numerator limit) leaves the fitted C₀ as a check against the statics.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpcError};
use crate::numerics::{levenberg_marquardt, linear_fit};
use crate::potential::Sign;
use crate::spinor::RadialSpinor;
use crate::statics::CriticalData;

use super::resonance::ResonanceProfile;

/// Fits above this relative RMS residual are rejected.
pub const MAX_FIT_RESIDUAL: f64 = 0.25;
/// Samples within `k_peak ± FIT_HALF_WIDTHS·Δ` enter the fit.
pub const FIT_HALF_WIDTHS: f64 = 3.0;

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ResonanceConstants {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C0")]
    pub c0: f64,
    #[serde(rename = "absC2")]
    pub abs_c2: f64,
    #[serde(rename = "absC3")]
    pub abs_c3: f64,
    /// Relative RMS residual (normalized by each profile's peak height).
    pub fit_residual: f64,
    /// Slope of k_peak² against σ.
    pub kpeak_slope: f64,
    /// Mean of Δ/k_peak².
    pub width_ratio: f64,
}

impl ResonanceConstants {
    pub fn density(&self, sigma: f64, k: f64) -> f64 {
        profile_model([self.c, self.c0, self.abs_c2, self.abs_c3], sigma, k)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub enum ConstantPin {
    C(f64),
    C0(f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub kpeak_r_squared: f64,
    /// `(max − min)/mean` of Δ/k_peak² over the profiles.
    pub width_ratio_spread: f64,
    /// Relative RMS residual of each profile near its peak.
    pub profile_residuals: Vec<f64>,
    pub points: usize,
}

pub fn profile_model(p: [f64; 4], sigma: f64, k: f64) -> f64 {
    let [c, c0, c2, c3] = p;
    let k2 = k * k;
    let d = c0 * sigma - c2 * k2;
    c * k2 / (d * d + c3 * c3 * k2 * k2 * k2)
}

/// `C = lim_{k→0} ⟨φ_k, A₀Φ⟩² / (4πk⁴)` with the free delta-normalized wave
/// of the channel. For small k, `G/k² → √(2/π)·r²/3` and `F/k² → √(2/π)·r/2`.
pub fn numerator_constant(critical: &CriticalData) -> Result<f64> {
    let model = match critical.model.sign {
        Sign::Plus => critical.model,
        Sign::Minus => critical.model.mirrored(),
    };
    if model.kappa < 0 {
        return Err(SpcError::Model(
            "the numerator constant is defined for the channel with a bound threshold state".into(),
        ));
    }
    let phi = RadialSpinor::from_interleaved(critical.phi.grid, model.kappa, &critical.phi.to_interleaved());
    let g = &phi.grid;
    let h = g.spacing;
    let mut s = 0.0;
    for j in 0..g.n {
        let (rg, rf) = (phi.u1_radius(j), phi.u2_radius(j));
        s += model.sampled(0.0, rg, h) * phi.u1[j].re * rg * rg / 3.0;
        s += model.sampled(0.0, rf, h) * phi.u2[j].re * rf / 2.0;
    }
    let overlap = (2.0 / std::f64::consts::PI).sqrt() * s * h;
    Ok(overlap * overlap / (4.0 * std::f64::consts::PI))
}

/// Least-squares fit of the profile model to the samples near each peak.
pub fn fit_constants(profiles: &[ResonanceProfile], pin: ConstantPin) -> Result<(ResonanceConstants, FitDiagnostics)> {
    let mut sigmas: Vec<f64> = profiles.iter().map(|p| p.sigma).collect();
    sigmas.sort_by(|a, b| a.total_cmp(b));
    sigmas.dedup();
    if sigmas.len() < 4 || sigmas[sigmas.len() - 1] < 10.0 * sigmas[0] * (1.0 - 1e-9) {
        return Err(SpcError::Usage(
            "fit needs at least four distinct sigma values spanning a decade".into(),
        ));
    }
    let kp2: Vec<f64> = profiles.iter().map(|p| p.k_peak * p.k_peak).collect();
    let peak_fit = linear_fit(&profiles.iter().map(|p| p.sigma).collect::<Vec<_>>(), &kp2)?;
    let ratios: Vec<f64> = profiles.iter().map(|p| p.delta_width / (p.k_peak * p.k_peak)).collect();
    let width_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = (ratios.iter().copied().fold(f64::MIN, f64::max) - ratios.iter().copied().fold(f64::MAX, f64::min))
        / width_ratio;

    // points: (sigma, k, value, peak height, profile index)
    let mut pts = Vec::new();
    for (idx, p) in profiles.iter().enumerate() {
        for s in p.near_peak(FIT_HALF_WIDTHS) {
            pts.push((p.sigma, s.k, s.phi_out_sq, p.peak_value, idx));
        }
    }
    if pts.len() < 4 {
        return Err(SpcError::Usage("too few samples near the peaks".into()));
    }

    // initial guess from the peak and width laws and the mean peak height
    let slope = peak_fit.slope.max(1e-12);
    let mut guess = [0.0; 4];
    let c_height: f64 = profiles
        .iter()
        .map(|p| p.peak_value * p.k_peak.powi(4))
        .sum::<f64>()
        / profiles.len() as f64;
    // with C fixed: |C₃|² = C/(H·k⁴), |C₂| = |C₃|/(2w), C₀ = slope·|C₂|
    let scale_from_c = |c: f64| {
        let c3 = (c / c_height).sqrt();
        let c2 = c3 / (2.0 * width_ratio);
        [c, slope * c2, c2, c3]
    };
    match pin {
        ConstantPin::C(c) => guess = scale_from_c(c),
        ConstantPin::C0(c0) => {
            let unit = scale_from_c(1.0);
            let l = c0 / unit[1];
            guess[0] = l * l;
            guess[1] = c0;
            guess[2] = l * unit[2];
            guess[3] = l * unit[3];
        }
    }
    let free: [usize; 3] = match pin {
        ConstantPin::C(_) => [1, 2, 3],
        ConstantPin::C0(_) => [0, 2, 3],
    };
    let unpack = |q: &[f64]| {
        let mut p = guess;
        for (slot, v) in free.iter().zip(q) {
            p[*slot] = v.exp();
        }
        p
    };
    let residual = |q: &[f64]| -> Vec<f64> {
        let p = unpack(q);
        pts.iter().map(|&(s, k, y, h, _)| (profile_model(p, s, k) - y) / h).collect()
    };
    let q0: Vec<f64> = free.iter().map(|&i| guess[i].ln()).collect();
    let (q, cost) = levenberg_marquardt(residual, &q0, 500)?;
    let p = unpack(&q);
    let fit_residual = (cost / pts.len() as f64).sqrt();

    let mut profile_residuals = Vec::new();
    for idx in 0..profiles.len() {
        let own: Vec<f64> = pts
            .iter()
            .filter(|t| t.4 == idx)
            .map(|&(s, k, y, h, _)| ((profile_model(p, s, k) - y) / h).powi(2))
            .collect();
        profile_residuals.push((own.iter().sum::<f64>() / own.len().max(1) as f64).sqrt());
    }
    let constants = ResonanceConstants {
        c: p[0],
        c0: p[1],
        abs_c2: p[2],
        abs_c3: p[3],
        fit_residual,
        kpeak_slope: peak_fit.slope,
        width_ratio,
    };
    let diagnostics = FitDiagnostics {
        kpeak_r_squared: peak_fit.r_squared,
        width_ratio_spread: spread,
        profile_residuals,
        points: pts.len(),
    };
    if fit_residual > MAX_FIT_RESIDUAL {
        return Err(SpcError::FitQuality {
            residual: fit_residual,
            limit: MAX_FIT_RESIDUAL,
            diagnostics: format!("{diagnostics:?}"),
        });
    }
    Ok((constants, diagnostics))
}
