//! Shared numerical kernels: binomial coefficients, unit-sphere areas,
//! fourth-order stencils on a uniform polar grid, and composite Simpson
//! quadrature.
//!
//! All grid routines assume a uniform grid over [0, pi] and rely on even
//! reflection across both poles: an axisymmetric profile f(theta) extends
//! smoothly with f(-theta) = f(theta) and f(pi + s) = f(pi - s).

use crate::error::{Error, Result};

/// Binomial coefficient C(n, k) as f64; 0 outside the triangle.
///
/// Exact integer arithmetic in u128 keeps every value for n <= 64 exact
/// before the final rounding to f64.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

/// Area of the unit sphere S^d embedded in R^{d+1}.
///
/// omega_d = 2 pi^{(d+1)/2} / Gamma((d+1)/2), evaluated through the
/// Gamma recursion omega_d = 2 pi omega_{d-2} / (d - 1) from the exact
/// seeds omega_0 = 2 and omega_1 = 2 pi.
pub fn unit_sphere_area(d: usize) -> f64 {
    let mut even = 2.0; // omega_0
    let mut odd = 2.0 * std::f64::consts::PI; // omega_1
    if d == 0 {
        return even;
    }
    if d == 1 {
        return odd;
    }
    let mut dim = if d % 2 == 0 { 0 } else { 1 };
    let mut value = if d % 2 == 0 { even } else { odd };
    while dim < d {
        dim += 2;
        value = 2.0 * std::f64::consts::PI * value / (dim - 1) as f64;
        if dim % 2 == 0 {
            even = value;
        } else {
            odd = value;
        }
    }
    let _ = (even, odd);
    value
}

/// Uniform grid of n + 1 nodes spanning [0, pi]; endpoints exact.
pub fn polar_grid(n: usize) -> Vec<f64> {
    let mut theta: Vec<f64> = (0..=n)
        .map(|i| std::f64::consts::PI * i as f64 / n as f64)
        .collect();
    theta[n] = std::f64::consts::PI;
    theta
}

/// Validates that `nodes` describes a usable polar grid for the stencils
/// and quadrature in this crate: uniform over [0, pi], even interval
/// count, at least 32 intervals.
pub fn validate_polar_grid(theta: &[f64]) -> Result<usize> {
    if theta.len() < 33 {
        return Err(Error::Domain(format!(
            "grid needs at least 33 nodes (32 intervals), got {}",
            theta.len()
        )));
    }
    let n = theta.len() - 1;
    if n % 2 != 0 {
        return Err(Error::Domain(format!(
            "grid interval count must be even for composite Simpson, got {n}"
        )));
    }
    let step = std::f64::consts::PI / n as f64;
    for (i, &t) in theta.iter().enumerate() {
        let expect = std::f64::consts::PI * i as f64 / n as f64;
        if (t - expect).abs() > 1e-9 * std::f64::consts::PI {
            return Err(Error::Domain(format!(
                "grid node {i} = {t} is not uniform (expected {expect})"
            )));
        }
    }
    let _ = step;
    Ok(n)
}

#[inline]
fn reflect(i: isize, n: isize) -> usize {
    // Even reflection across theta = 0 and theta = pi.
    let mut i = i;
    if i < 0 {
        i = -i;
    }
    if i > n {
        i = 2 * n - i;
    }
    i as usize
}

/// First derivative of an even-extendable profile, fourth-order centered
/// stencil with even reflection at the poles.
pub fn derivative_even(f: &[f64], out: &mut Vec<f64>) {
    let n = (f.len() - 1) as isize;
    let step = std::f64::consts::PI / n as f64;
    out.clear();
    out.reserve(f.len());
    for i in 0..=n {
        let fm2 = f[reflect(i - 2, n)];
        let fm1 = f[reflect(i - 1, n)];
        let fp1 = f[reflect(i + 1, n)];
        let fp2 = f[reflect(i + 2, n)];
        // Grouped as differences so a constant profile yields exactly zero.
        out.push(((fm2 - fp2) + 8.0 * (fp1 - fm1)) / (12.0 * step));
    }
}

/// Second derivative companion of [`derivative_even`].
pub fn second_derivative_even(f: &[f64], out: &mut Vec<f64>) {
    let n = (f.len() - 1) as isize;
    let step = std::f64::consts::PI / n as f64;
    let step2 = step * step;
    out.clear();
    out.reserve(f.len());
    for i in 0..=n {
        let fm2 = f[reflect(i - 2, n)];
        let fm1 = f[reflect(i - 1, n)];
        let f0 = f[i as usize];
        let fp1 = f[reflect(i + 1, n)];
        let fp2 = f[reflect(i + 2, n)];
        // Differences from the center value: exact zero on constants.
        let num =
            16.0 * ((fm1 - f0) + (fp1 - f0)) - ((fm2 - f0) + (fp2 - f0));
        out.push(num / (12.0 * step2));
    }
}

/// Composite Simpson rule over the uniform grid carrying `f`.
///
/// The interval count is even by construction (`validate_polar_grid`).
pub fn simpson(f: &[f64]) -> f64 {
    let n = f.len() - 1;
    debug_assert!(n % 2 == 0);
    let step = std::f64::consts::PI / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, &v) in f.iter().enumerate().take(n).skip(1) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    (step / 3.0) * (f[0] + f[n] + 4.0 * odd + 2.0 * even)
}

/// Ordinary least squares fit y ~ a + b x; returns (a, b).
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Domain(
            "linear fit needs two equal-length samples or more".into(),
        ));
    }
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return Err(Error::Numeric("degenerate abscissae in linear fit".into()));
    }
    let b = (n * sxy - sx * sy) / det;
    let a = (sy - b * sx) / n;
    Ok((a, b))
}

/// Derivative at the middle of three (t, y) samples with arbitrary spacing.
pub fn three_point_derivative(t: [f64; 3], y: [f64; 3]) -> f64 {
    let [t0, t1, t2] = t;
    let [y0, y1, y2] = y;
    y0 * (t1 - t2) / ((t0 - t1) * (t0 - t2))
        + y1 * (2.0 * t1 - t0 - t2) / ((t1 - t0) * (t1 - t2))
        + y2 * (t1 - t0) / ((t2 - t0) * (t2 - t1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(5, 0), 1.0);
        assert_eq!(binomial(5, 5), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(64, 32), 1832624140942590534u128 as f64);
    }

    #[test]
    fn sphere_areas_match_gamma_closed_form() {
        // omega_1 = 2 pi, omega_2 = 4 pi, omega_3 = 2 pi^2, omega_4 = 8 pi^2 / 3,
        // omega_5 = pi^3.
        assert!((unit_sphere_area(1) - 2.0 * PI).abs() < 1e-15);
        assert!((unit_sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_sphere_area(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
        assert!((unit_sphere_area(5) - PI.powi(3)).abs() < 1e-13);
    }

    #[test]
    fn stencils_are_fourth_order() {
        // f(theta) = cos(2 theta) is even-extendable at both poles.
        let err = |n: usize| {
            let theta = polar_grid(n);
            let f: Vec<f64> = theta.iter().map(|t| (2.0 * t).cos()).collect();
            let mut d1 = Vec::new();
            let mut d2 = Vec::new();
            derivative_even(&f, &mut d1);
            second_derivative_even(&f, &mut d2);
            let mut worst: f64 = 0.0;
            for (i, &t) in theta.iter().enumerate() {
                let e1 = (d1[i] + 2.0 * (2.0 * t).sin()).abs();
                let e2 = (d2[i] + 4.0 * (2.0 * t).cos()).abs();
                worst = worst.max(e1).max(e2);
            }
            worst
        };
        let e64 = err(64);
        let e128 = err(128);
        assert!(e64 < 1e-4);
        let order = (e64 / e128).log2();
        assert!(order > 3.5, "observed stencil order {order}");
    }

    #[test]
    fn simpson_integrates_sin_powers() {
        let theta = polar_grid(400);
        let f: Vec<f64> = theta.iter().map(|t| t.sin().powi(4)).collect();
        // int_0^pi sin^4 = 3 pi / 8
        assert!((simpson(&f) - 3.0 * PI / 8.0).abs() < 1e-10);
    }

    #[test]
    fn grid_validation_rejects_nonuniform() {
        let mut theta = polar_grid(64);
        theta[5] += 1e-4;
        assert!(validate_polar_grid(&theta).is_err());
        assert!(validate_polar_grid(&polar_grid(64)).is_ok());
        assert!(validate_polar_grid(&polar_grid(65)).is_err());
        assert!(validate_polar_grid(&polar_grid(16)).is_err());
    }

    #[test]
    fn three_point_derivative_quadratic_exact() {
        // y = 3 t^2 - t: derivative at t = 0.7 is 4.2 - 1 = 3.2.
        let t = [0.5, 0.7, 1.1];
        let y = t.map(|v| 3.0 * v * v - v);
        assert!((three_point_derivative(t, y) - 3.2).abs() < 1e-12);
    }
}
