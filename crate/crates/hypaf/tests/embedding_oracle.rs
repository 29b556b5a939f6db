//! Brute-force validation of the graph curvature formula against the
//! explicit embedding into the hyperboloid model.
//!
//! A point of the hypersurface is X = (cosh r, sinh r u) in Minkowski
//! space R^{n,1}, u = (cos theta, sin theta w), w on the unit (n-2)-sphere
//! in standard angle coordinates. First and second fundamental forms are
//! computed by Richardson-extrapolated central differences of X, the
//! normal by a singular-value nullspace, and the principal curvatures as
//! generalized eigenvalues. No code is shared with the implementation
//! path being checked.

use hypaf::hypersurface::AxisymmetricHypersurface;
use nalgebra::{DMatrix, DVector};

const N: usize = 6; // ambient dimension; surface dimension N - 1 = 5

fn minkowski_dot(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let mut s = -a[0] * b[0];
    for i in 1..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// w(psi) on S^{n-2} in standard spherical angles.
fn sphere_point(psi: &[f64]) -> Vec<f64> {
    let d = psi.len() + 1;
    let mut w = vec![0.0; d];
    let mut sin_prod = 1.0;
    for (i, &p) in psi.iter().enumerate() {
        w[i] = sin_prod * p.cos();
        sin_prod *= p.sin();
    }
    w[d - 1] = sin_prod;
    w
}

/// Embedding X(theta, psi) for the profile r(theta).
fn embed(r_fn: &impl Fn(f64) -> f64, params: &[f64]) -> DVector<f64> {
    let theta = params[0];
    let psi = &params[1..];
    let r = r_fn(theta);
    let w = sphere_point(psi);
    let mut x = DVector::zeros(N + 1);
    x[0] = r.cosh();
    x[1] = r.sinh() * theta.cos();
    for i in 0..w.len() {
        x[2 + i] = r.sinh() * theta.sin() * w[i];
    }
    x
}

fn shifted(base: &[f64], a: usize, da: f64, b: usize, db: f64) -> Vec<f64> {
    let mut p = base.to_vec();
    p[a] += da;
    p[b] += db;
    p
}

/// Central first derivative with one Richardson sweep.
fn d1(r_fn: &impl Fn(f64) -> f64, base: &[f64], a: usize, h: f64) -> DVector<f64> {
    let at = |h: f64| {
        (embed(r_fn, &shifted(base, a, h, a, 0.0)) - embed(r_fn, &shifted(base, a, -h, a, 0.0)))
            / (2.0 * h)
    };
    (at(h / 2.0) * 4.0 - at(h)) / 3.0
}

/// Central second derivative (a = b allowed) with one Richardson sweep.
fn d2(r_fn: &impl Fn(f64) -> f64, base: &[f64], a: usize, b: usize, h: f64) -> DVector<f64> {
    if a == b {
        let at = |h: f64| {
            (embed(r_fn, &shifted(base, a, h, a, 0.0))
                - embed(r_fn, base).scale(2.0)
                + embed(r_fn, &shifted(base, a, -h, a, 0.0)))
                / (h * h)
        };
        (at(h / 2.0) * 4.0 - at(h)) / 3.0
    } else {
        let at = |h: f64| {
            (embed(r_fn, &shifted(base, a, h, b, h))
                - embed(r_fn, &shifted(base, a, h, b, -h))
                - embed(r_fn, &shifted(base, a, -h, b, h))
                + embed(r_fn, &shifted(base, a, -h, b, -h)))
                / (4.0 * h * h)
        };
        (at(h / 2.0) * 4.0 - at(h)) / 3.0
    }
}

/// Principal curvatures at (theta, psi) by finite differences.
fn oracle_curvatures(r_fn: &impl Fn(f64) -> f64, theta: f64) -> Vec<f64> {
    let dim = N - 1;
    let base: Vec<f64> = std::iter::once(theta)
        .chain([0.7, 1.1, 0.9, 1.3])
        .collect();
    let h = 1e-3;

    let x = embed(r_fn, &base);
    let tangents: Vec<DVector<f64>> = (0..dim).map(|a| d1(r_fn, &base, a, h)).collect();

    // normal: Minkowski-orthogonal to X and all tangents, unit, outward.
    // The constraint matrix is padded with a zero row so the full right
    // singular basis (including the kernel direction) is available.
    let mut constraints = DMatrix::zeros(N + 1, N + 1);
    for (row, vec) in std::iter::once(&x).chain(tangents.iter()).enumerate() {
        for col in 0..=N {
            let eta = if col == 0 { -1.0 } else { 1.0 };
            constraints[(row, col)] = eta * vec[col];
        }
    }
    let svd = constraints.svd(false, true);
    let v_t = svd.v_t.unwrap();
    let kernel_row = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.total_cmp(b))
        .map(|(i, _)| i)
        .unwrap();
    let nu_raw: DVector<f64> = v_t.row(kernel_row).transpose();
    let norm2 = minkowski_dot(&nu_raw, &nu_raw);
    assert!(norm2 > 0.0, "normal must be spacelike");
    let mut nu = nu_raw / norm2.sqrt();
    // orient outward: positive pairing with the radial direction
    let r = r_fn(theta);
    let mut radial = x.clone();
    radial[0] = r.sinh();
    for i in 1..=N {
        radial[i] = x[i] * r.cosh() / r.sinh();
    }
    if minkowski_dot(&nu, &radial) < 0.0 {
        nu = -nu;
    }

    let mut g = DMatrix::zeros(dim, dim);
    let mut hh = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in a..dim {
            g[(a, b)] = minkowski_dot(&tangents[a], &tangents[b]);
            g[(b, a)] = g[(a, b)];
            let second = d2(r_fn, &base, a, b, h);
            hh[(a, b)] = -minkowski_dot(&nu, &second);
            hh[(b, a)] = hh[(a, b)];
        }
    }

    // generalized symmetric eigenvalues of (h, g) via Cholesky whitening
    let chol = g.cholesky().expect("metric must be positive definite");
    let l_inv = chol.l().try_inverse().expect("triangular inverse");
    let sym = &l_inv * hh * l_inv.transpose();
    let mut eig: Vec<f64> = sym.symmetric_eigenvalues().iter().cloned().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

#[test]
fn graph_curvature_matches_embedding_oracle() {
    let r_fn = |t: f64| 2.0 + 0.1 * (2.0 * t).cos();
    let surface = AxisymmetricHypersurface::cos_perturbed(N, 2.0, 0.1, 2, 400).unwrap();
    let curvature = surface.curvature().unwrap();
    for &i in &[40usize, 100, 200, 260, 377] {
        let theta = surface.theta()[i];
        let oracle = oracle_curvatures(&r_fn, theta);
        let mut ours = vec![curvature.kappa_sph[i]; N - 2];
        ours.push(curvature.kappa_rad[i]);
        ours.sort_by(f64::total_cmp);
        for (got, want) in ours.iter().zip(&oracle) {
            assert!(
                (got - want).abs() < 1e-6,
                "node {i} (theta = {theta:.4}): {got} vs oracle {want}"
            );
        }
    }
}

#[test]
fn oracle_agrees_on_geodesic_sphere() {
    let radius = 1.3_f64;
    let r_fn = move |_t: f64| radius;
    let expect = radius.cosh() / radius.sinh();
    for theta in [0.7, 1.4, 2.2] {
        for kappa in oracle_curvatures(&r_fn, theta) {
            assert!(
                (kappa - expect).abs() < 1e-8,
                "sphere oracle: {kappa} vs {expect}"
            );
        }
    }
}
