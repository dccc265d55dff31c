use spc_core::evolution::{PropagationOptions, Spectrum, SpectrumSample};
use spc_core::numerics::{geomspace, linspace};
use spc_core::scattering::{profile_model, ProfileSample, ResonanceConstants, ResonanceProfile};
use spc_core::statics::find_critical_coupling;
use spc_core::studies::*;
use spc_core::{PotentialModel, RadialGrid, SpcError};

fn constants() -> ResonanceConstants {
    ResonanceConstants {
        c: 0.003,
        c0: 0.54,
        abs_c2: 0.49,
        abs_c3: 0.116,
        fit_residual: 0.0,
        kpeak_slope: 0.0,
        width_ratio: 0.0,
    }
}

/// Peak and half width of the model profile by dense sampling.
fn peak_and_width(c: &ResonanceConstants, sigma: f64) -> (f64, f64) {
    let p = [c.c, c.c0, c.abs_c2, c.abs_c3];
    let ks = linspace(0.05 * sigma.sqrt(), 4.0 * sigma.sqrt(), 400_001);
    let ys: Vec<f64> = ks.iter().map(|&k| profile_model(p, sigma, k)).collect();
    let i = (0..ys.len()).max_by(|&a, &b| ys[a].total_cmp(&ys[b])).unwrap();
    let half = ys[i] / 2.0;
    let lo = (0..i).rev().find(|&j| ys[j] < half).unwrap();
    let hi = (i..ys.len()).find(|&j| ys[j] < half).unwrap();
    (ks[i], 0.5 * (ks[hi] - ks[lo]))
}

/// s solving s = 4ε/(k(s)Δ(s)), by bisection on the log.
fn fixed_point_oracle(c: &ResonanceConstants, eps: f64) -> f64 {
    let g = |s: f64| {
        let (k, d) = peak_and_width(c, s);
        s.ln() - (4.0 * eps / (k * d)).ln()
    };
    let (mut a, mut b): (f64, f64) = (1e-4, 1.0);
    for _ in 0..60 {
        let m = (a * b).sqrt();
        if g(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    (a * b).sqrt()
}

#[test]
fn fixed_point_matches_the_profile_oracle() {
    let c = constants();
    for eps in [1e-4, 1e-3] {
        let s = fixed_point_sd(&c, eps);
        let o = fixed_point_oracle(&c, eps);
        assert!((s / o - 1.0).abs() < 0.02, "{s} {o}");
    }
}

#[test]
fn fixed_point_scales_with_two_fifths() {
    let c = constants();
    for eps in [1e-5, 3e-4, 1e-2] {
        let r = fixed_point_sd(&c, 32.0 * eps) / fixed_point_sd(&c, eps);
        assert!((r - 4.0).abs() < 1e-12, "{r}");
    }
}

#[test]
fn loglog_fit_recovers_a_power_law() {
    let pts: Vec<(f64, f64)> = geomspace(1e-3, 1e-1, 6).into_iter().map(|x| (x, 2.5 * x.powf(0.4))).collect();
    let f = loglog_fit(&pts).unwrap();
    assert!((f.slope - 0.4).abs() < 1e-12);
    assert!((f.intercept - 2.5f64.ln()).abs() < 1e-12);
    assert!(f.r_squared > 1.0 - 1e-12);
}

#[test]
fn loglog_fit_rejects_small_or_nonpositive_data() {
    assert!(matches!(loglog_fit(&[(1.0, 1.0), (2.0, 2.0)]), Err(SpcError::Study(_))));
    assert!(matches!(loglog_fit(&[(1.0, 1.0), (2.0, -2.0), (3.0, 1.0)]), Err(SpcError::Study(_))));
}

fn lorentz_profile(sigma: f64, k0: f64, w: f64) -> ResonanceProfile {
    let samples = linspace(0.05, 2.0, 800)
        .into_iter()
        .map(|k| ProfileSample { k, phi_out_sq: 1.0 / ((k - k0).powi(2) + w * w) / (4.0 * std::f64::consts::PI * k * k) })
        .collect();
    ResonanceProfile::from_samples(sigma, samples).unwrap()
}

fn spectrum(ks: &[f64], f: impl Fn(f64) -> f64) -> Spectrum {
    Spectrum {
        sigma: 0.2,
        samples: ks.iter().map(|&k| SpectrumSample { k, weight: f(k) }).collect(),
        continuum_weight: 1.0,
        bound_weight: 0.0,
        remainder: 0.0,
    }
}

#[test]
fn matching_spectrum_is_resonance_like() {
    let p = lorentz_profile(0.2, 0.5, 0.03);
    let ks = linspace(0.1, 1.2, 400);
    let s = spectrum(&ks, |k| 7.0 / ((k - 0.5).powi(2) + 0.03 * 0.03));
    let c = spectrum_comparison(&s, &p).unwrap();
    assert!(c.l1_distance < 0.01, "{c:?}");
    assert_eq!(c.class, SpectrumClass::ResonanceLike);
}

#[test]
fn low_momentum_spectrum_is_washed_out() {
    let p = lorentz_profile(0.2, 0.5, 0.03);
    let ks = linspace(0.1, 1.2, 400);
    let s = spectrum(&ks, |k| (-k / 0.1).exp());
    let c = spectrum_comparison(&s, &p).unwrap();
    assert_eq!(c.class, SpectrumClass::WashedOut);
    assert!(c.peak_offset < 0.0);
}

#[test]
fn job_count_bounds_the_pool() {
    assert_eq!(with_jobs(Some(2), rayon::current_num_threads).unwrap(), 2);
    assert!(matches!(with_jobs(Some(0), || ()), Err(SpcError::Config(_))));
}

#[test]
fn scaling_needs_three_values() {
    let grid = RadialGrid::new(30.0, 600).unwrap();
    let c = find_critical_coupling(&PotentialModel::well(0.5, 7.0, 1.0), &grid, (5.0, 9.0)).unwrap();
    let r = scaling_study(&c, &[0.01, 0.02], 1.0, &PropagationOptions::default());
    assert!(matches!(r, Err(SpcError::Study(_))));
}

#[test]
fn short_time_study_has_quadratic_slopes() {
    let grid = RadialGrid::new(30.0, 600).unwrap();
    let c = find_critical_coupling(&PotentialModel::well(0.5, 7.0, 1.0), &grid, (5.0, 9.0)).unwrap();
    let cfg = ShortTimeStudyConfig {
        epsilon: 0.1,
        a_values: vec![0.1, 0.2, 0.4],
        durations: vec![1e-4, 2e-4, 4e-4],
        a_fixed: 0.4,
        duration_fixed: 2e-4,
    };
    let s = short_time_study(&c, &cfg, &PropagationOptions::default()).unwrap();
    assert!((s.a_fit.slope - 2.0).abs() < 0.1);
    assert!((s.duration_fit.slope - 2.0).abs() < 0.1);
    assert!(s.control.p_measured < 1e-10);
    assert!(s.estimate_deviation() < 0.01);
}
