//! Critical coupling, the threshold state Φ and the quantities derived from it.
//!
//! Models diving into the lower edge are handled through the charge-conjugate
//! mirror (V → −V, κ → −κ), which negates the lattice operator exactly. All
//! searches therefore run on a model whose state dives into E = +1.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpcError};
use crate::grid::RadialGrid;
use crate::numerics::brent;
use crate::operator::{assemble_operator, DiscreteOperator};
use crate::potential::{PotentialModel, Shape, Sign};
use crate::spinor::{NormKind, RadialSpinor};

use super::shooting::{eigenvalues_below, matching_function, outward_solution};

/// Distances from the edge at which λ is solved before extrapolation.
pub const EDGE_OFFSETS: [f64; 3] = [1e-3, 5e-4, 2.5e-4];

#[derive(Debug, Clone)]
pub struct CriticalData {
    /// Template with `lambda_c` set to the extrapolated critical coupling.
    pub model: PotentialModel,
    pub lambda_c: f64,
    pub uncertainty: f64,
    /// Couplings at which the gap state sits at `edge·(1 − δ)`, one per
    /// entry of [`EDGE_OFFSETS`].
    pub lambda_at_offsets: Vec<f64>,
    /// Threshold state at σ = 0, E = edge. Unit norm on [0, ∞): the box part
    /// plus the analytic tail beyond r_max.
    pub phi: RadialSpinor,
    /// Amplitude A of the exterior tail u₁ = A/r of the threshold state
    /// (zero when the tail is not square integrable).
    pub tail_amplitude: f64,
    pub identity_residual: f64,
    pub c0: f64,
}

/// The JSON form written by the CLI.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct CriticalSummary {
    pub lambda_c: f64,
    #[serde(rename = "C0")]
    pub c0: f64,
    pub identity_residual: f64,
}

impl CriticalData {
    pub fn summary(&self) -> CriticalSummary {
        CriticalSummary {
            lambda_c: self.lambda_c,
            c0: self.c0,
            identity_residual: self.identity_residual,
        }
    }
}

fn canonical(model: &PotentialModel) -> PotentialModel {
    match model.sign {
        Sign::Plus => *model,
        Sign::Minus => model.mirrored(),
    }
}

fn operator_at(grid: &RadialGrid, model: &PotentialModel, lambda: f64) -> Result<DiscreteOperator> {
    assemble_operator(grid, &model.with_lambda_c(lambda), 0.0)
}

/// Coupling at which a gap eigenvalue of the (canonical, upward diving)
/// model sits exactly at `energy`. The crossing with the smallest coupling in
/// `search` is returned.
pub fn coupling_for_energy(
    grid: &RadialGrid,
    model: &PotentialModel,
    energy: f64,
    search: (f64, f64),
) -> Result<f64> {
    let model = canonical(model);
    let (mut a, mut b) = search;
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(SpcError::Usage(format!("λ search range ({a}, {b}) must be ordered and finite")));
    }
    let count = |lambda: f64| -> Result<usize> { Ok(eigenvalues_below(&operator_at(grid, &model, lambda)?, energy)) };
    let n_lo = count(a)?;
    if count(b)? >= n_lo {
        return Err(SpcError::Model(format!(
            "no bound state reaches E = {energy} for λ in [{a}, {b}]"
        )));
    }
    let tol = 1e-9 * b.abs().max(1.0);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if count(mid)? < n_lo {
            b = mid;
        } else {
            a = mid;
        }
        if b - a < 1e-3 * (search.1 - search.0) && count(b)? == n_lo - 1 {
            break;
        }
    }
    let f = |lambda: f64| match operator_at(grid, &model, lambda) {
        Ok(op) => matching_function(&op, energy),
        Err(_) => f64::NAN,
    };
    brent(f, a, b, 1e-14 * b.abs().max(1.0), 300)
}

/// Critical coupling by Richardson extrapolation of λ(δ) to the edge, with
/// the threshold state and its derived constants.
pub fn find_critical_coupling(template: &PotentialModel, grid: &RadialGrid, search: (f64, f64)) -> Result<CriticalData> {
    template.validate()?;
    let lambdas = EDGE_OFFSETS
        .iter()
        .map(|d| coupling_for_energy(grid, template, 1.0 - d, search))
        .collect::<Result<Vec<_>>>()?;
    let (l1, l2, l4) = (lambdas[0], lambdas[1], lambdas[2]);
    let lambda_c = (l1 - 6.0 * l2 + 8.0 * l4) / 3.0;
    let uncertainty = (lambda_c - (2.0 * l4 - l2)).abs();
    let model = template.with_lambda_c(lambda_c);
    let (phi, tail_amplitude) = threshold_state(grid, &model)?;
    let identity_residual = critical_identity_residual_of(&phi, &model)?;
    let c0 = c0_of(&phi, tail_amplitude, &model)?;
    Ok(CriticalData {
        model,
        lambda_c,
        uncertainty,
        lambda_at_offsets: lambdas,
        phi,
        tail_amplitude,
        identity_residual,
        c0,
    })
}

/// Threshold data for a model whose `lambda_c` is taken as given. A state
/// must reach the edge within a relative 10⁻³ of it.
pub fn critical_at(model: &PotentialModel, grid: &RadialGrid) -> Result<CriticalData> {
    model.validate()?;
    let canon = canonical(model);
    let tol = 1e-3 * model.lambda_c.abs().max(1.0);
    let below = eigenvalues_below(&operator_at(grid, &canon, model.lambda_c - tol)?, 1.0);
    let above = eigenvalues_below(&operator_at(grid, &canon, model.lambda_c + tol)?, 1.0);
    if below == above {
        return Err(SpcError::Model(format!(
            "lambda_c = {} is not critical on this grid: no state reaches the edge within ±{tol}",
            model.lambda_c
        )));
    }
    let (phi, tail_amplitude) = threshold_state(grid, model)?;
    Ok(CriticalData {
        model: *model,
        lambda_c: model.lambda_c,
        uncertainty: 0.0,
        lambda_at_offsets: Vec::new(),
        identity_residual: critical_identity_residual_of(&phi, model)?,
        c0: c0_of(&phi, tail_amplitude, model)?,
        phi,
        tail_amplitude,
    })
}

/// Regular solution at the diving edge for σ = 0 with its tail amplitude.
///
/// In the channel κ = +1 (after mirroring) the exterior threshold solution is
/// `u₁ = A/r, u₂ = 0`, which is square integrable. Beyond twice the well
/// radius the lattice solution is replaced by this form, which removes the
/// small growing component left by the finite accuracy of λ_c, and the state
/// is normalized on [0, ∞) by adding `A²/r_max` for the part beyond the box.
/// In the channel κ = −1 the tail is not integrable and the state is
/// normalized on the box.
pub fn threshold_state(grid: &RadialGrid, model: &PotentialModel) -> Result<(RadialSpinor, f64)> {
    let canon = canonical(model);
    let op = assemble_operator(grid, &canon, 0.0)?;
    let mut x = outward_solution(&op, 1.0, op.dim() - 1);
    if x[1] < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    let mut tail = 0.0;
    if canon.kappa > 0 {
        if let Some(radius) = canon.shape.support() {
            let cut = grid.nearest_node(2.0 * radius);
            tail = x[2 * cut + 1] * grid.node(cut);
            for j in cut + 1..grid.n {
                x[2 * j] = 0.0;
                x[2 * j + 1] = tail / grid.node(j);
            }
        }
    }
    let raw = RadialSpinor::from_interleaved(*grid, model.kappa, &x);
    let norm = (raw.norm_sq() + tail * tail / grid.r_max).sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(SpcError::Numerical("threshold state cannot be normalized".into()));
    }
    let mut phi = raw.scaled((1.0 / norm).into());
    phi.norm_kind = NormKind::Unit;
    Ok((phi, tail / norm))
}

/// Integral of `g·shape` over `[0, r_max]` where `g` is piecewise linear through
/// `(0, 0)` and the samples `(r_j, g_j)`; the shape is treated as piecewise
/// constant, split exactly at the edge of a well.
fn linear_times_shape(shape: &Shape, rs: &[f64], gs: &[f64], absolute: bool) -> f64 {
    let edge = shape.support();
    let mut total = 0.0;
    let (mut r0, mut g0) = (0.0, 0.0);
    for (&r1, &g1) in rs.iter().zip(gs) {
        let mut piece = |a: f64, ga: f64, b: f64, gb: f64| {
            let s = shape.value(0.5 * (a + b));
            if s != 0.0 {
                let val = if absolute && ga * gb < 0.0 {
                    // the linear interpolant changes sign inside the cell
                    0.5 * (ga * ga + gb * gb) / (ga.abs() + gb.abs()) * (b - a)
                } else {
                    0.5 * (ga + gb) * (b - a)
                };
                total += s * if absolute { val.abs() } else { val };
            }
        };
        match edge {
            Some(e) if r0 < e && e < r1 => {
                let ge = g0 + (g1 - g0) * (e - r0) / (r1 - r0);
                piece(r0, g0, e, ge);
                piece(e, ge, r1, g1);
            }
            _ => piece(r0, g0, r1, g1),
        }
        r0 = r1;
        g0 = g1;
    }
    total
}

/// Normalized residual of the crucial identity for `spinor` in the potential
/// of `model` at `sigma`.
///
/// In the channel κ = +1 the diving state is selected by the upper component
/// u₁ and the lower component obeys `(u₂/r)' = (V + 1 − E)·u₁/r`. At E = 1 the
/// identity says that the far-field value of `u₂/r` vanishes, i.e.
/// `u₂/r|₀ + ∫ V u₁/r dr = 0`. The residual is that sum divided by
/// `|u₂/r|₀| + ∫ |V u₁|/r dr`, with the integrals evaluated by continuum
/// quadrature of the lattice data. In the channel κ = −1 it is the moment
/// `|∫ V u₁ r dr| / ∫ |V u₁| r dr`.
pub fn identity_residual(spinor: &RadialSpinor, model: &PotentialModel, sigma: f64) -> Result<f64> {
    if spinor.kappa != model.kappa {
        return Err(SpcError::Usage("spinor and model belong to different channels".into()));
    }
    let canon = canonical(model);
    let mut phi = spinor.clone();
    if canon.kappa != model.kappa {
        // the mirror relabels components on the same lattice vector
        phi = RadialSpinor::from_interleaved(spinor.grid, canon.kappa, &spinor.to_interleaved());
    }
    let lambda = canon.coupling(sigma);
    let g = &phi.grid;
    let n = g.n;
    let (num, den, potential_weight) = if canon.kappa > 0 {
        let rs: Vec<f64> = (0..n).map(|j| g.node(j)).collect();
        let gs: Vec<f64> = (0..n).map(|j| phi.u1[j].re / g.node(j)).collect();
        let w0 = phi.u2[0].re / g.half_node(0);
        let w1 = phi.u2[1].re / g.half_node(1);
        let b = (9.0 * w0 - w1) / 8.0;
        let moment = lambda * linear_times_shape(&canon.shape, &rs, &gs, false);
        let abs_moment = lambda.abs() * linear_times_shape(&canon.shape, &rs, &gs, true);
        ((b + moment).abs(), b.abs() + abs_moment, abs_moment)
    } else {
        let rs: Vec<f64> = (0..n).map(|j| g.half_node(j)).collect();
        let gs: Vec<f64> = (0..n).map(|j| phi.u1[j].re * g.half_node(j)).collect();
        let moment = lambda * linear_times_shape(&canon.shape, &rs, &gs, false);
        let abs_moment = lambda.abs() * linear_times_shape(&canon.shape, &rs, &gs, true);
        (moment.abs(), abs_moment, abs_moment)
    };
    if !(num.is_finite() && den.is_finite() && den > 0.0 && potential_weight > 0.0) {
        return Err(SpcError::UndefinedInput(
            "identity residual is 0/0 (vanishing potential or spinor)".into(),
        ));
    }
    Ok(num / den)
}

fn critical_identity_residual_of(phi: &RadialSpinor, model: &PotentialModel) -> Result<f64> {
    identity_residual(phi, model, 0.0)
}

/// Identity residual of the stored threshold state under `model` at σ = 0.
pub fn critical_identity_residual(critical: &CriticalData, model: &PotentialModel) -> Result<f64> {
    identity_residual(&critical.phi, model, 0.0)
}

fn c0_of(phi: &RadialSpinor, tail: f64, model: &PotentialModel) -> Result<f64> {
    let h = phi.grid.spacing;
    let mut s = model.shape.value(phi.grid.r_max) * tail * tail / phi.grid.r_max / h;
    for j in 0..phi.grid.n {
        s += model.shape.sampled(phi.u1_radius(j), h) * phi.u1[j].norm_sqr();
        s += model.shape.sampled(phi.u2_radius(j), h) * phi.u2[j].norm_sqr();
    }
    let c0 = model.lambda_slope * s * h;
    if !(c0 > 0.0) {
        return Err(SpcError::Model(format!(
            "C0 = {c0} is not positive; check lambda_slope and sign"
        )));
    }
    Ok(c0)
}

/// `C₀ = λ'·∫ shape·|Φ|² dr`, the σ-derivative of `‖√(A_σ − A₀)Φ‖²`.
pub fn c0_from_derivative(critical: &CriticalData, model: &PotentialModel) -> Result<f64> {
    c0_of(&critical.phi, critical.tail_amplitude, model)
}
