//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

/// Spherical Bessel functions of order 0 and 1.
pub fn sph_j0(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

pub fn sph_j1(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        x / 3.0 - x * x * x / 30.0
    } else {
        x.sin() / (x * x) - x.cos() / x
    }
}

pub fn sph_y0(x: f64) -> f64 {
    -x.cos() / x
}

pub fn sph_y1(x: f64) -> f64 {
    -x.cos() / (x * x) - x.sin() / x
}

/// Matching determinant for the κ = +1 channel of a square well of depth
/// `lambda` and radius `radius`, at gap energy `e`. Interior: free solution of
/// momentum q in the shifted energy W = E − λ (|W| > 1 assumed); exterior:
/// decaying solution with κ_b = √(1 − E²).
pub fn well_matching(e: f64, lambda: f64, radius: f64) -> f64 {
    let w = e - lambda;
    let q = (w * w - 1.0).sqrt();
    let kb = (1.0 - e * e).sqrt();
    let x = q * radius;
    kb * (w + 1.0) * sph_j1(x) + q * (e + 1.0) * (1.0 + 1.0 / (kb * radius)) * sph_j0(x)
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Gap eigenvalue of the square well from the analytic matching condition.
/// Scans for the single sign change of the determinant in (−1, 1).
pub fn well_gap_energy(lambda: f64, radius: f64) -> Option<f64> {
    let n = 4000;
    let es: Vec<f64> = (1..n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect();
    let mut roots = Vec::new();
    for pair in es.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (fa, fb) = (well_matching(a, lambda, radius), well_matching(b, lambda, radius));
        if fa.is_finite() && fb.is_finite() && fa * fb < 0.0 {
            // poles of 1/(κ_b R) or of j-ratios also change sign: keep true roots only
            let r = bisect(|e| well_matching(e, lambda, radius), a, b);
            if well_matching(r, lambda, radius).abs() < 1e-6 * (fa.abs() + fb.abs()) {
                roots.push(r);
            }
        }
    }
    roots.last().copied()
}

/// Threshold coupling of the square well: the E = 1 state exists when
/// j₀(qR) = 0 with q² = (1 − λ)² − 1.
pub fn well_critical_coupling(radius: f64) -> f64 {
    1.0 + (1.0 + (std::f64::consts::PI / radius).powi(2)).sqrt()
}
