//! Small numerical helpers shared by the solvers.

use crate::error::{Result, SpcError};

/// Brent's method on a bracket with `f(a)·f(b) ≤ 0`.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64, max_iter: usize) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(SpcError::Numerical(format!(
            "root not bracketed on [{a}, {b}] (f = {fa:e}, {fb:e})"
        )));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(SpcError::Numerical(format!("Brent did not converge on [{a}, {b}]")))
}

/// Ordinary least squares `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return Err(SpcError::Usage(format!("linear fit needs ≥ 2 paired points, got {n}")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(SpcError::Usage("linear fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let slope_stderr = if n > 2 {
        (sse / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr,
        r_squared,
    })
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Trapezoid rule on sorted, possibly non-uniform abscissae.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Piecewise-linear interpolation on sorted abscissae; flat extrapolation.
pub fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + t * (ys[i + 1] - ys[i])
}

/// Levenberg-Marquardt minimization of `Σ residual(p)²` with a forward
/// difference Jacobian. Returns the parameters and the final sum of squares.
pub fn levenberg_marquardt<F: Fn(&[f64]) -> Vec<f64>>(residual: F, p0: &[f64], max_iter: usize) -> Result<(Vec<f64>, f64)> {
    use nalgebra::{DMatrix, DVector};
    let np = p0.len();
    let mut p = p0.to_vec();
    let mut r = DVector::from_vec(residual(&p));
    let mut cost = r.norm_squared();
    if !cost.is_finite() {
        return Err(SpcError::Numerical("non-finite residual at the initial guess".into()));
    }
    let mut mu = 1e-3;
    for _ in 0..max_iter {
        let mut jac = DMatrix::zeros(r.len(), np);
        for j in 0..np {
            let step = 1e-7 * p[j].abs().max(1.0);
            let mut q = p.clone();
            q[j] += step;
            let rq = residual(&q);
            for i in 0..r.len() {
                jac[(i, j)] = (rq[i] - r[i]) / step;
            }
        }
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for j in 0..np {
                a[(j, j)] += mu * jtj[(j, j)].max(1e-12);
            }
            let Some(dp) = a.lu().solve(&(-&g)) else {
                mu *= 10.0;
                continue;
            };
            let q: Vec<f64> = p.iter().zip(dp.iter()).map(|(x, d)| x + d).collect();
            let rq = DVector::from_vec(residual(&q));
            let cq = rq.norm_squared();
            if cq.is_finite() && cq < cost {
                let gain = (cost - cq) / cost.max(f64::MIN_POSITIVE);
                p = q;
                r = rq;
                cost = cq;
                mu = (mu / 3.0).max(1e-12);
                improved = gain > 1e-14;
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    Ok((p, cost))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-13);
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 50).is_err());
    }

    #[test]
    fn exact_line_has_unit_r_squared() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.4 * x - 1.0).collect();
        let f = linear_fit(&xs, &ys).unwrap();
        assert!((f.slope - 0.4).abs() < 1e-14);
        assert!((f.intercept + 1.0).abs() < 1e-14);
        assert!((f.r_squared - 1.0).abs() < 1e-14);
        assert!(f.slope_stderr < 1e-14);
    }

    #[test]
    fn interp_and_trapezoid() {
        let xs = linspace(0.0, 1.0, 101);
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert!((trapezoid(&xs, &ys) - 1.0 / 3.0).abs() < 2e-5);
        assert!((interp(&xs, &ys, 0.505) - 0.255025).abs() < 1e-4);
    }

    #[test]
    fn levenberg_marquardt_fits_an_exponential() {
        let xs = linspace(0.0, 2.0, 30);
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * (-1.3 * x).exp()).collect();
        let (p, cost) = levenberg_marquardt(
            |p| xs.iter().zip(&ys).map(|(x, y)| p[0] * (p[1] * x).exp() - y).collect(),
            &[1.0, -0.5],
            200,
        )
        .unwrap();
        assert!(cost < 1e-20);
        assert!((p[0] - 2.5).abs() < 1e-8 && (p[1] + 1.3).abs() < 1e-8);
    }
}
