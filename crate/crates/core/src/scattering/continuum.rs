//! Continuum generalized eigenfunctions at E = ±√(k² + 1).
//!
//! The regular lattice solution is propagated from the origin and fitted on
//! `(r_max/2, r_max)` to the free spherical solutions of the channel. The fit
//! gives the asymptotic amplitude, used for delta-in-k normalization, and the
//! phase relative to the free lattice solution at the same energy.

use num_complex::Complex64;

use crate::error::{Result, SpcError};
use crate::grid::RadialGrid;
use crate::operator::assemble_operator;
use crate::potential::{PotentialModel, Sign};
use crate::spinor::{inner_product, NormKind, RadialSpinor};
use crate::statics::shooting::outward_solution;
use crate::statics::CriticalData;
use crate::units::continuum_energy;

#[derive(Debug, Clone)]
pub struct ContinuumSolution {
    pub k: f64,
    pub sigma: f64,
    /// Signed energy: +E_k for models diving into the upper edge, −E_k for
    /// their mirror images.
    pub energy: f64,
    pub wave: RadialSpinor,
    /// Phase shift in [0, π).
    pub phase_shift: f64,
    /// Coefficients (a, b) of the normalized exterior solution
    /// `a·j − b·y` in the mirrored-to-upper channel.
    pub exterior: (f64, f64),
    kappa_upper: i32,
}

pub(crate) fn sph_j0(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

pub(crate) fn sph_j1(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        x / 3.0 * (1.0 - x * x / 10.0)
    } else {
        (x.sin() / x - x.cos()) / x
    }
}

pub(crate) fn sph_y0(x: f64) -> f64 {
    -x.cos() / x
}

pub(crate) fn sph_y1(x: f64) -> f64 {
    (-x.cos() / x - x.sin()) / x
}

/// Free solutions of the channel at momentum k: `(G, F)` of the regular
/// (`j`) and irregular (`y`) kind at radii `rg` (upper) and `rf` (lower).
fn free_pair(kappa: i32, k: f64, e: f64, rg: f64, rf: f64) -> [(f64, f64); 2] {
    let (xg, xf) = (k * rg, k * rf);
    let c = k / (e + 1.0);
    if kappa > 0 {
        [
            (rg * sph_j1(xg), c * rf * sph_j0(xf)),
            (rg * sph_y1(xg), c * rf * sph_y0(xf)),
        ]
    } else {
        [
            (rg * sph_j0(xg), -c * rf * sph_j1(xf)),
            (rg * sph_y0(xg), -c * rf * sph_y1(xf)),
        ]
    }
}

/// Least-squares `(a, b)` with `u ≈ a·regular − b·irregular` over the nodes
/// `js`, reading the interleaved lattice vector `x` of channel `kappa`.
fn fit_exterior(x: &[f64], grid: &RadialGrid, kappa: i32, k: f64, e: f64, js: std::ops::Range<usize>) -> Result<(f64, f64)> {
    let (mut m11, mut m12, mut m22, mut v1, mut v2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for j in js {
        let (node, half) = (grid.node(j), grid.half_node(j));
        let (rg, rf, g_obs, f_obs) = if kappa > 0 {
            (node, half, x[2 * j + 1], x[2 * j])
        } else {
            (half, node, x[2 * j], x[2 * j + 1])
        };
        let [(gj, fj), (gy, fy)] = free_pair(kappa, k, e, rg, rf);
        for (p, q, obs) in [(gj, -gy, g_obs), (fj, -fy, f_obs)] {
            m11 += p * p;
            m12 += p * q;
            m22 += q * q;
            v1 += p * obs;
            v2 += q * obs;
        }
    }
    let det = m11 * m22 - m12 * m12;
    if !(det.abs() > 1e-300 * m11 * m22) || !det.is_finite() {
        return Err(SpcError::Numerical("singular exterior fit".into()));
    }
    Ok(((m22 * v1 - m12 * v2) / det, (m11 * v2 - m12 * v1) / det))
}

/// Factor bringing a solution with exterior coefficients (a, b) to
/// delta-in-k normalization: `(a² + b²)·(1/k² + 1/(E+1)²) = 2/π`.
fn delta_scale(a: f64, b: f64, k: f64, e: f64) -> f64 {
    (2.0 / std::f64::consts::PI / ((a * a + b * b) * (1.0 / (k * k) + 1.0 / ((e + 1.0) * (e + 1.0))))).sqrt()
}

fn upper_model(model: &PotentialModel) -> PotentialModel {
    match model.sign {
        Sign::Plus => *model,
        Sign::Minus => model.mirrored(),
    }
}

/// Smallest `k·r_max` accepted by [`continuum_wave`].
pub const MIN_K_RMAX: f64 = 4.0 * std::f64::consts::PI;

/// Delta-in-k normalized regular continuum solution at momentum `k`.
pub fn continuum_wave(model: &PotentialModel, grid: &RadialGrid, sigma: f64, k: f64) -> Result<ContinuumSolution> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(SpcError::Usage(format!("momentum must be positive, got {k}")));
    }
    if k * grid.r_max < MIN_K_RMAX {
        return Err(SpcError::Resolution(format!(
            "k·r_max = {:.3} < 4π; use r_max ≥ {:.1} for k = {k}",
            k * grid.r_max,
            MIN_K_RMAX / k
        )));
    }
    let upper = upper_model(model);
    let e = continuum_energy(k);
    let solve = |m: &PotentialModel, s: f64| -> Result<(Vec<f64>, (f64, f64))> {
        let op = assemble_operator(grid, m, s)?;
        let x = outward_solution(&op, e, op.dim() - 1);
        let ab = fit_exterior(&x, grid, upper.kappa, k, e, grid.n / 2..grid.n)?;
        Ok((x, ab))
    };
    let (x, (a, b)) = solve(&upper, sigma)?;
    let (_, (a0, b0)) = solve(&free_model(&upper), 0.0)?;
    let scale = delta_scale(a, b, k, e);
    let phase_shift = (b.atan2(a) - b0.atan2(a0)).rem_euclid(std::f64::consts::PI);
    let mut wave = RadialSpinor::from_interleaved(*grid, model.kappa, &x).scaled(scale.into());
    wave.norm_kind = NormKind::DeltaInK;
    Ok(ContinuumSolution {
        k,
        sigma,
        energy: model.edge() * e,
        wave,
        phase_shift,
        exterior: (a * scale, b * scale),
        kappa_upper: upper.kappa,
    })
}

fn free_model(model: &PotentialModel) -> PotentialModel {
    let mut m = *model;
    m.lambda_c = 0.0;
    m.lambda_slope = 0.0;
    m
}

impl ContinuumSolution {
    /// Largest relative deviation of the envelope `k²G² + (E+1)²F²` from the
    /// normalized free-wave value, over the outer half of the box. The
    /// envelope oscillates at order 1/(kr) around its limit, so the exact
    /// free-solution envelope with the fitted coefficients is the reference.
    pub fn envelope_deviation(&self) -> f64 {
        let w = RadialSpinor::from_interleaved(self.wave.grid, self.kappa_upper, &self.wave.to_interleaved());
        let (k, e) = (self.k, self.energy.abs());
        let (a, b) = self.exterior;
        let mut worst: f64 = 0.0;
        let g = &w.grid;
        for j in g.n / 2..g.n {
            let [(gj, fj), (gy, fy)] = free_pair(w.kappa, k, e, w.u1_radius(j), w.u2_radius(j));
            let (gm, fm) = (a * gj - b * gy, a * fj - b * fy);
            let model_env = k * k * gm * gm + (e + 1.0).powi(2) * fm * fm;
            let env = k * k * w.u1[j].re.powi(2) + (e + 1.0).powi(2) * w.u2[j].re.powi(2);
            let asymptotic = a * a + b * b;
            worst = worst.max((env - model_env).abs() / asymptotic);
        }
        worst
    }

    /// `∫_{r₀}^∞ G(r)/r dr` of the upper exterior solution, in closed form.
    fn tail_moment(&self, r0: f64) -> f64 {
        let (a, b) = self.exterior;
        let x = self.k * r0;
        if self.kappa_upper > 0 {
            (a * sph_j0(x) - b * sph_y0(x)) / self.k
        } else {
            0.0
        }
    }
}

/// Radial-channel overlap `⟨wave, Φ⟩` on the lattice of the box.
pub fn outgoing_transform(phi: &RadialSpinor, wave: &ContinuumSolution) -> Result<Complex64> {
    inner_product(&wave.wave, phi)
}

/// `⟨wave, Φ⟩` on [0, ∞): the lattice overlap plus the closed-form exterior
/// integral of the threshold tail `A/r` against the free exterior wave.
pub fn outgoing_amplitude(critical: &CriticalData, wave: &ContinuumSolution) -> Result<Complex64> {
    let inside = outgoing_transform(&critical.phi, wave)?;
    let g = &critical.phi.grid;
    let outside = critical.tail_amplitude * wave.tail_moment(g.r_max + 0.5 * g.spacing);
    Ok(inside + outside)
}

/// `⟨φ_k, Φ⟩` on [0, ∞) from the near field only.
///
/// Beyond twice the well radius the threshold state is exactly `A/r` and the
/// continuum wave is a free solution, so the regular lattice solution is only
/// propagated to four well radii, its exterior coefficients are fitted on
/// `[2R, 4R]`, and the overlap beyond `2R` is taken in closed form. This
/// agrees with [`outgoing_amplitude`] up to the lattice error of the free
/// exterior solution and needs no box condition on k.
pub fn near_field_amplitude(critical: &CriticalData, sigma: f64, k: f64) -> Result<f64> {
    let upper = upper_model(&critical.model);
    let radius = match (upper.kappa > 0, upper.shape.support()) {
        (true, Some(r)) => r,
        _ => {
            let wave = continuum_wave(&critical.model, &critical.phi.grid, sigma, k)?;
            return Ok(outgoing_amplitude(critical, &wave)?.re);
        }
    };
    let grid = &critical.phi.grid;
    let e = continuum_energy(k);
    let cut = grid.nearest_node(2.0 * radius);
    let outer = grid.nearest_node(4.0 * radius).min(grid.n - 1);
    let op = assemble_operator(grid, &upper, sigma)?;
    let x = outward_solution(&op, e, 2 * outer + 1);
    let (a, b) = fit_exterior(&x, grid, upper.kappa, k, e, cut..outer + 1)?;
    let scale = delta_scale(a, b, k, e);
    let phi = critical.phi.to_interleaved();
    let inside: f64 = x[..=2 * cut + 1].iter().zip(&phi).map(|(w, p)| w * p.re).sum::<f64>() * grid.spacing;
    let xr = k * (grid.node(cut) + 0.5 * grid.spacing);
    let outside = critical.tail_amplitude * (a * sph_j0(xr) - b * sph_y0(xr)) / k;
    Ok(scale * (inside + outside))
}
