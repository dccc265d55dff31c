//! Natural units of the laboratory.
//!
//! Energies are measured in units of the rest energy mc², lengths in units of
//! the reduced Compton wavelength ħ/(mc). The microscopic time is
//! τ = (mc²/ħ)·t and the macroscopic (adiabatic) time is s = ε·τ, so the
//! evolution equation reads i∂_s ψ = ε⁻¹ D_s ψ.

/// Upper edge of the free gap. The free continua are (−∞, −1] and [1, ∞).
pub const CONTINUUM_EDGE: f64 = 1.0;

/// Convert macroscopic time `s` to microscopic time τ.
pub fn micro_time(s: f64, epsilon: f64) -> f64 {
    s / epsilon
}

/// Convert microscopic time τ to macroscopic time `s`.
pub fn macro_time(tau: f64, epsilon: f64) -> f64 {
    tau * epsilon
}

/// Relativistic energy of a continuum wave with momentum `k`.
pub fn continuum_energy(k: f64) -> f64 {
    (k * k + 1.0).sqrt()
}
