//! Continuum waves, the outgoing transform of the threshold state and the
//! near-critical resonance profile.

pub mod continuum;
pub mod fit;
pub mod resonance;

pub use continuum::{continuum_wave, near_field_amplitude, outgoing_amplitude, outgoing_transform, ContinuumSolution};
pub use fit::{fit_constants, numerator_constant, profile_model, ConstantPin, FitDiagnostics, ResonanceConstants};
pub use resonance::{grid_for_momentum, resonance_k_grid, scan_resonance, ProfileSample, ResonanceProfile};

use crate::error::Result;
use crate::potential::{PotentialModel, Sign};
use crate::spinor::RadialSpinor;
use crate::statics::{identity_residual, CriticalData};

/// Normalized k-linear coefficient S₁ of `⟨T_σ^k Φ, A₀Φ⟩` at k = 0.
///
/// The k-derivative of the outgoing free Green's function at k = 0 is the
/// constant kernel `i(1+β)/(4π)`, so S₁ is proportional to
/// `|∫(1+β)A₀Φ d³x|²`. Only an s-wave upper component survives the angular
/// integral: in the channel κ = −1 the result is the square of the
/// normalized moment `∫V u₁ r dr / ∫|V u₁| r dr`; in the channel κ = +1 the
/// upper component is a p-wave and S₁ vanishes identically.
pub fn s1_vanishing_check(critical: &CriticalData, model: &PotentialModel) -> Result<f64> {
    s1_of(&critical.phi, model, 0.0)
}

/// [`s1_vanishing_check`] for an arbitrary state in the potential at `sigma`.
pub fn s1_of(phi: &RadialSpinor, model: &PotentialModel, sigma: f64) -> Result<f64> {
    let upper = match model.sign {
        Sign::Plus => *model,
        Sign::Minus => model.mirrored(),
    };
    if upper.kappa > 0 {
        // validates the input the same way as the κ = −1 branch
        identity_residual(phi, model, sigma)?;
        Ok(0.0)
    } else {
        Ok(identity_residual(phi, model, sigma)?.powi(2))
    }
}
