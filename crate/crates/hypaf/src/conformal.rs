//! Conformal metrics w^2 g on the round sphere S^m: Schouten eigenvalues
//! in the axisymmetric frame, sigma_k curvature functionals, the
//! generalized Sobolev gap, the Gamma_1 regularization, and the
//! asymptotic identification of a flow limit with its conformal factor.
//!
//! For an axisymmetric factor w(theta) the Schouten tensor of w^2 g,
//! measured in w^2 g, has one meridian eigenvalue and one spherical
//! eigenvalue of multiplicity m - 1:
//!
//! ```text
//! mu_rad = (-w_tt / w + (3/2) (w_t / w)^2 + 1/2) / w^2
//! mu_sph = (-cot(theta) w_t / w - (1/2) (w_t / w)^2 + 1/2) / w^2
//! ```
//!
//! with the pole limit replacing cot(theta) w_t by w_tt, exactly as in
//! the hypersurface module.

use crate::error::{Error, Result};
use crate::hypersurface::AxisymmetricHypersurface;
use crate::numerics::{
    binomial, derivative_even, polar_grid, second_derivative_even, simpson, unit_sphere_area,
    validate_polar_grid,
};
use crate::symfunc::sigma_all_into;
use serde::Serialize;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

/// Axisymmetric positive conformal factor w(theta) on S^m.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalFactor {
    m: usize,
    theta: Vec<f64>,
    w: Vec<f64>,
}

/// Schouten eigenvalues of w^2 g measured in w^2 g, per node.
#[derive(Debug, Clone)]
pub struct SchoutenField {
    pub m: usize,
    /// Meridian eigenvalue, multiplicity one.
    pub mu_rad: Vec<f64>,
    /// Spherical eigenvalue, multiplicity m - 1.
    pub mu_sph: Vec<f64>,
}

/// Outcome of one Sobolev-gap evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct SobolevReport {
    pub k: usize,
    /// F_k(w^2 g) = vol^{-(m-2k)/m} integral of sigma_k.
    pub value: f64,
    /// Round-sphere reference C(m,k)/2^k omega_m^{2k/m}.
    pub reference: f64,
    pub gap: f64,
    /// Largest j such that sigma_1..sigma_j of the Schouten eigenvalues
    /// are positive at every node (0 if even sigma_1 fails somewhere).
    pub positive_up_to: usize,
    /// Set when the positivity hypothesis for this k is not verified;
    /// then the bound is advisory only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub advisory: Option<String>,
}

/// Ratios comparing a hypersurface with the conformal metric of its
/// radial profile: both tend to one along an expanding horoconvex flow.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatioRecord {
    /// integral of l2, against ((n-3)(n-4)/3) integral of sigma_2(w^2 g).
    pub r1: f64,
    /// hypersurface area against vol(w^2 g).
    pub r2: f64,
    pub int_l2: f64,
    pub sigma2_integral: f64,
    pub area: f64,
    pub vol: f64,
}

impl ConformalFactor {
    pub fn new(m: usize, theta: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        if m < 3 {
            return Err(Error::Domain(format!(
                "sphere dimension must be >= 3 for the Schouten tensor, got {m}"
            )));
        }
        if theta.len() != w.len() {
            return Err(Error::Domain(format!(
                "theta and w lengths differ: {} vs {}",
                theta.len(),
                w.len()
            )));
        }
        let nodes = validate_polar_grid(&theta)?;
        for (i, &wi) in w.iter().enumerate() {
            if !wi.is_finite() || wi <= 0.0 {
                return Err(Error::Domain(format!(
                    "conformal factor at node {i} must be positive, got {wi}"
                )));
            }
        }
        Ok(Self {
            m,
            theta: polar_grid(nodes),
            w,
        })
    }

    /// Samples w(theta) from a closure on `nodes` intervals.
    pub fn from_fn(m: usize, nodes: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let theta = polar_grid(nodes);
        let w = theta.iter().map(|&t| f(t)).collect();
        Self::new(m, theta, w)
    }

    pub fn round(m: usize, nodes: usize) -> Result<Self> {
        Self::from_fn(m, nodes, |_| 1.0)
    }

    /// w = sinh r from a hypersurface profile, on S^{n-1}.
    pub fn from_surface_profile(surface: &AxisymmetricHypersurface) -> Result<Self> {
        let w = surface.r().iter().map(|&r| r.sinh()).collect();
        Self::new(surface.n() - 1, surface.theta().to_vec(), w)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// Pointwise power w^{1 - exp(-t/m)}; the identity map as t tends to
    /// infinity, the round factor at t = 0.
    pub fn gamma1_regularize(&self, t: f64) -> Result<ConformalFactor> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("regularization time must be >= 0, got {t}")));
        }
        let expo = 1.0 - (-t / self.m as f64).exp();
        let w = self.w.iter().map(|&w| w.powf(expo)).collect();
        ConformalFactor::new(self.m, self.theta.clone(), w)
    }
}

/// Schouten eigenvalues of w^2 g in the axisymmetric frame.
pub fn schouten(cf: &ConformalFactor) -> Result<SchoutenField> {
    let last = cf.theta.len() - 1;
    let mut w_t = Vec::new();
    let mut w_tt = Vec::new();
    derivative_even(&cf.w, &mut w_t);
    second_derivative_even(&cf.w, &mut w_tt);
    let mut mu_rad = Vec::with_capacity(cf.w.len());
    let mut mu_sph = Vec::with_capacity(cf.w.len());
    for i in 0..=last {
        let w = cf.w[i];
        let g = w_t[i] / w;
        let cot_term = if i == 0 || i == last {
            w_tt[i] / w
        } else {
            g * cf.theta[i].cos() / cf.theta[i].sin()
        };
        let raw_rad = -w_tt[i] / w + 1.5 * g * g + 0.5;
        let raw_sph = -cot_term - 0.5 * g * g + 0.5;
        mu_rad.push(raw_rad / (w * w));
        mu_sph.push(raw_sph / (w * w));
    }
    Ok(SchoutenField {
        m: cf.m,
        mu_rad,
        mu_sph,
    })
}

impl SchoutenField {
    /// sigma_k of the eigenvalue multiset {mu_rad, mu_sph x (m-1)} at a
    /// node.
    pub fn sigma_at(&self, i: usize, k: usize) -> f64 {
        crate::hypersurface::sigma_multiset(self.mu_rad[i], self.mu_sph[i], self.m - 1, k)
    }

    /// Largest j <= bound such that sigma_1..sigma_j are positive at
    /// every node.
    pub fn positive_up_to(&self, bound: usize) -> usize {
        let mut best = bound.min(self.m);
        for i in 0..self.mu_rad.len() {
            let mut values = vec![self.mu_sph[i]; self.m - 1];
            values.push(self.mu_rad[i]);
            values.sort_by(f64::total_cmp);
            let mut sig = Vec::new();
            sigma_all_into(&values, &mut sig);
            let mut j = 0;
            while j < best && sig[j + 1] > 0.0 {
                j += 1;
            }
            best = best.min(j);
            if best == 0 {
                return 0;
            }
        }
        best
    }
}

/// Per-node sigma_k of the Schouten eigenvalues of w^2 g.
pub fn sigma_k_metric(cf: &ConformalFactor, k: usize) -> Result<Vec<f64>> {
    if k > cf.m {
        return Err(Error::Domain(format!(
            "sigma index {k} out of range for m = {}",
            cf.m
        )));
    }
    let field = schouten(cf)?;
    Ok((0..cf.w.len()).map(|i| field.sigma_at(i, k)).collect())
}

/// Volume of (S^m, w^2 g) in the axisymmetric reduction.
pub fn volume(cf: &ConformalFactor) -> f64 {
    integrate_against_volume(cf, |_| 1.0)
}

/// Integral of a per-node scalar against dvol = w^m dvol_round.
fn integrate_against_volume(cf: &ConformalFactor, f: impl Fn(usize) -> f64) -> f64 {
    let m = cf.m as i32;
    let values: Vec<f64> = (0..cf.w.len())
        .map(|i| f(i) * cf.w[i].powi(m) * cf.theta[i].sin().powi(m - 1))
        .collect();
    unit_sphere_area(cf.m - 1) * simpson(&values)
}

/// F_k(w^2 g) = vol^{-(m-2k)/m} integral of sigma_k(w^2 g) dvol.
pub fn functional_f(cf: &ConformalFactor, k: usize) -> Result<f64> {
    let sigma = sigma_k_metric(cf, k)?;
    let integral = integrate_against_volume(cf, |i| sigma[i]);
    let vol = volume(cf);
    if !(vol > 0.0) {
        return Err(Error::Numeric(format!("volume must be positive, got {vol}")));
    }
    let expo = -((cf.m as f64 - 2.0 * k as f64) / cf.m as f64);
    Ok(vol.powf(expo) * integral)
}

/// Round-sphere reference value of F_k.
pub fn functional_f_round(m: usize, k: usize) -> f64 {
    binomial(m, k) / 2f64.powi(k as i32) * unit_sphere_area(m).powf(2.0 * k as f64 / m as f64)
}

/// F_k gap against the round reference, with the positivity class of the
/// hypothesis verified pointwise.
///
/// The bound needs k-positivity for 0 < k < m/2; for k = 2 and m > 4,
/// 1-positivity already suffices. Reports outside the verified class are
/// advisory.
pub fn sobolev_gap(cf: &ConformalFactor, k: usize) -> Result<SobolevReport> {
    if k == 0 || k > cf.m {
        return Err(Error::Domain(format!(
            "F_k index must satisfy 1 <= k <= m, got {k}"
        )));
    }
    let field = schouten(cf)?;
    let positive_up_to = field.positive_up_to(cf.m);
    let value = functional_f(cf, k)?;
    let reference = functional_f_round(cf.m, k);
    let hypothesis_ok = if k == 2 && cf.m > 4 {
        positive_up_to >= 1
    } else {
        2 * k < cf.m && positive_up_to >= k
    };
    let advisory = (!hypothesis_ok).then(|| {
        format!(
            "positivity class verified only up to sigma_{positive_up_to}; \
             the k = {k} bound is advisory"
        )
    });
    Ok(SobolevReport {
        k,
        value,
        reference,
        gap: value - reference,
        positive_up_to,
        advisory,
    })
}

/// Compares a hypersurface with the conformal metric (sinh r)^2 g of its
/// radial profile. Both ratios tend to one along an expanding horoconvex
/// flow; nothing is asserted here, the record is for monitoring.
pub fn asymptotic_compare(surface: &AxisymmetricHypersurface) -> Result<RatioRecord> {
    let n = surface.n() as f64;
    let geometry = surface.geometry()?;
    let area = geometry.area();
    let int_l2 = geometry.integrate_l2();
    let cf = ConformalFactor::from_surface_profile(surface)?;
    let sigma = sigma_k_metric(&cf, 2)?;
    let sigma2_integral = integrate_against_volume(&cf, |i| sigma[i]);
    let vol = volume(&cf);
    Ok(RatioRecord {
        r1: int_l2 / ((n - 3.0) * (n - 4.0) / 3.0 * sigma2_integral),
        r2: area / vol,
        int_l2,
        sigma2_integral,
        area,
        vol,
    })
}

/// Conformal factor files mirror the surface format: header `m N`, then
/// N + 1 lines `theta w` at 17 significant digits.
pub fn write_factor_to(cf: &ConformalFactor, w: &mut impl Write) -> Result<()> {
    writeln!(w, "{} {}", cf.m, cf.theta.len() - 1)?;
    for (t, v) in cf.theta.iter().zip(&cf.w) {
        writeln!(w, "{t:.16e} {v:.16e}")?;
    }
    Ok(())
}

pub fn write_factor(cf: &ConformalFactor, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_factor_to(cf, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn read_factor_from(r: impl Read) -> Result<ConformalFactor> {
    let reader = BufReader::new(r);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty factor file".into()))??;
    let mut parts = header.split_whitespace();
    let m: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format("header must start with the sphere dimension".into()))?;
    let nodes: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format("header must carry the interval count".into()))?;
    let mut theta = Vec::with_capacity(nodes + 1);
    let mut w = Vec::with_capacity(nodes + 1);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let t: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format("bad theta value".into()))?;
        let v: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format("bad factor value".into()))?;
        theta.push(t);
        w.push(v);
    }
    if theta.len() != nodes + 1 {
        return Err(Error::Format(format!(
            "expected {} nodes, found {}",
            nodes + 1,
            theta.len()
        )));
    }
    ConformalFactor::new(m, theta, w)
}

pub fn read_factor(path: impl AsRef<Path>) -> Result<ConformalFactor> {
    read_factor_from(std::fs::File::open(path)?)
}
