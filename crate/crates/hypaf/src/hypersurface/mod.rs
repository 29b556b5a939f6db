//! Discrete axisymmetric star-shaped hypersurfaces in hyperbolic space,
//! represented as graphs r(theta) over the polar angle of the round
//! sphere.
//!
//! With lambda = sinh r, lambda' = cosh r, phi the radial substitution
//! with phi'(r) = 1/lambda and v = sqrt(1 + phi_theta^2), the shape
//! operator of the graph splits into a meridian curvature of multiplicity
//! one and a spherical curvature of multiplicity n - 2:
//!
//! ```text
//! kappa_rad = (lambda'/(v lambda)) (1 - phi_tt / (v^2 lambda'))
//! kappa_sph = (lambda'/(v lambda)) (1 - cot(theta) phi_t / lambda')
//! ```
//!
//! At the poles cot(theta) phi_t is replaced by its limit phi_tt. The
//! module also stores the umbilicity deficits kappa - 1 through a
//! cancellation-free route (the large sinh/cosh parts subtract exactly
//! as exp(-r)), which keeps late-time flow monitors meaningful when the
//! curvatures are within 1e-8 of one.

mod checks;
mod io;

pub use checks::{
    all_checks, check_af2_sigma2, check_af4, check_gallego_solanes, check_weighted_minkowski,
    geodesic_sphere, horoconvexity_margin, GeodesicSphere, InequalityReport,
};
pub use io::{read_surface, read_surface_from, write_surface, write_surface_to};

use crate::error::{Error, Result};
use crate::numerics::{
    binomial, derivative_even, polar_grid, second_derivative_even, simpson, unit_sphere_area,
    validate_polar_grid,
};

/// Radii above this would push cosh r toward f64 overflow in the squared
/// quantities the integrals need.
const RADIUS_CAP: f64 = 300.0;

/// Graph r(theta) of a closed axisymmetric hypersurface, theta on a
/// uniform grid over [0, pi] with an even number of intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisymmetricHypersurface {
    n: usize,
    theta: Vec<f64>,
    r: Vec<f64>,
}

/// Pointwise graph quantities entering the curvature formula.
#[derive(Debug, Clone)]
pub struct SupportFields {
    pub lambda: Vec<f64>,
    pub lambda_prime: Vec<f64>,
    /// exp(-r) = cosh r - sinh r, formed without cancellation.
    pub exp_neg_r: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_theta: Vec<f64>,
    pub phi_theta_theta: Vec<f64>,
    pub v: Vec<f64>,
}

/// Principal curvatures per node, plus their deficits from one.
#[derive(Debug, Clone)]
pub struct CurvatureField {
    pub n: usize,
    pub kappa_rad: Vec<f64>,
    pub kappa_sph: Vec<f64>,
    /// kappa_rad - 1 by the cancellation-free route.
    pub delta_rad: Vec<f64>,
    /// kappa_sph - 1 by the cancellation-free route.
    pub delta_sph: Vec<f64>,
}

impl AxisymmetricHypersurface {
    pub fn new(n: usize, theta: Vec<f64>, r: Vec<f64>) -> Result<Self> {
        if n < 5 {
            return Err(Error::Domain(format!("ambient dimension must be >= 5, got {n}")));
        }
        if theta.len() != r.len() {
            return Err(Error::Domain(format!(
                "theta and r lengths differ: {} vs {}",
                theta.len(),
                r.len()
            )));
        }
        let nodes = validate_polar_grid(&theta)?;
        for (i, &ri) in r.iter().enumerate() {
            if !ri.is_finite() || ri <= 0.0 {
                return Err(Error::Domain(format!(
                    "radius at node {i} must be positive, got {ri}"
                )));
            }
            if ri > RADIUS_CAP {
                return Err(Error::Domain(format!(
                    "radius at node {i} exceeds the {RADIUS_CAP} working cap"
                )));
            }
        }
        // Snap to the canonical uniform grid so identical surfaces compare
        // bit-exactly regardless of how the node list was produced.
        Ok(Self {
            n,
            theta: polar_grid(nodes),
            r,
        })
    }

    /// Constant-radius sphere on `nodes` intervals.
    pub fn sphere(n: usize, radius: f64, nodes: usize) -> Result<Self> {
        Self::new(n, polar_grid(nodes), vec![radius; nodes + 1])
    }

    /// r(theta) = r0 + eps cos(wave * theta); the integer wave number keeps
    /// the polar derivative zero at both poles.
    pub fn cos_perturbed(n: usize, r0: f64, eps: f64, wave: u32, nodes: usize) -> Result<Self> {
        let theta = polar_grid(nodes);
        let r = theta
            .iter()
            .map(|&t| r0 + eps * (wave as f64 * t).cos())
            .collect();
        Self::new(n, theta, r)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of grid intervals N (the grid has N + 1 nodes).
    pub fn intervals(&self) -> usize {
        self.theta.len() - 1
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    /// Replaces the radial profile, revalidating.
    pub fn with_r(&self, r: Vec<f64>) -> Result<Self> {
        Self::new(self.n, self.theta.clone(), r)
    }

    pub fn support_fields(&self) -> Result<SupportFields> {
        let mut lambda = Vec::with_capacity(self.r.len());
        let mut lambda_prime = Vec::with_capacity(self.r.len());
        let mut exp_neg_r = Vec::with_capacity(self.r.len());
        let mut phi = Vec::with_capacity(self.r.len());
        for &r in &self.r {
            lambda.push(r.sinh());
            lambda_prime.push(r.cosh());
            exp_neg_r.push((-r).exp());
            // phi = log tanh(r/2), the antiderivative of 1/sinh.
            phi.push((r / 2.0).tanh().ln());
        }
        let mut phi_theta = Vec::new();
        let mut phi_theta_theta = Vec::new();
        derivative_even(&phi, &mut phi_theta);
        second_derivative_even(&phi, &mut phi_theta_theta);
        let v = phi_theta.iter().map(|&d| (1.0 + d * d).sqrt()).collect();
        Ok(SupportFields {
            lambda,
            lambda_prime,
            exp_neg_r,
            phi,
            phi_theta,
            phi_theta_theta,
            v,
        })
    }

    pub fn curvature(&self) -> Result<CurvatureField> {
        self.curvature_with(&self.support_fields()?)
    }

    pub fn curvature_with(&self, sf: &SupportFields) -> Result<CurvatureField> {
        let last = self.theta.len() - 1;
        let mut kappa_rad = Vec::with_capacity(self.theta.len());
        let mut kappa_sph = Vec::with_capacity(self.theta.len());
        let mut delta_rad = Vec::with_capacity(self.theta.len());
        let mut delta_sph = Vec::with_capacity(self.theta.len());
        for i in 0..=last {
            let v = sf.v[i];
            let lam = sf.lambda[i];
            let pt = sf.phi_theta[i];
            let ptt = sf.phi_theta_theta[i];
            // cot(theta) phi_theta, continued by its pole limit phi_tt.
            let cot_term = if i == 0 || i == last {
                ptt
            } else {
                pt * self.theta[i].cos() / self.theta[i].sin()
            };
            // lambda' - v lambda = exp(-r) - (v - 1) lambda, with
            // v - 1 = phi_theta^2 / (1 + v).
            let head = sf.exp_neg_r[i] - lam * pt * pt / (1.0 + v);
            let d_sph = (head - cot_term) / (v * lam);
            let d_rad = (head - ptt / (v * v)) / (v * lam);
            let k_sph = 1.0 + d_sph;
            let k_rad = 1.0 + d_rad;
            if !k_sph.is_finite() || !k_rad.is_finite() {
                return Err(Error::Numeric(format!(
                    "curvature blow-up at node {i} (theta = {})",
                    self.theta[i]
                )));
            }
            kappa_rad.push(k_rad);
            kappa_sph.push(k_sph);
            delta_rad.push(d_rad);
            delta_sph.push(d_sph);
        }
        Ok(CurvatureField {
            n: self.n,
            kappa_rad,
            kappa_sph,
            delta_rad,
            delta_sph,
        })
    }

    /// Fully evaluated geometry: supports, curvature, area density.
    pub fn geometry(&self) -> Result<Geometry> {
        let support = self.support_fields()?;
        let curvature = self.curvature_with(&support)?;
        // Area element of the graph: meridian length lambda v times the
        // (n-2)-fold sphere factor lambda sin(theta).
        let density: Vec<f64> = (0..self.theta.len())
            .map(|i| {
                support.lambda[i].powi(self.n as i32 - 1)
                    * support.v[i]
                    * self.theta[i].sin().powi(self.n as i32 - 2)
            })
            .collect();
        Ok(Geometry {
            n: self.n,
            omega_slice: unit_sphere_area(self.n - 2),
            theta: self.theta.clone(),
            support,
            curvature,
            density,
        })
    }

    /// Convenience single-shot integrals; see [`Geometry`] for the
    /// recompute-free variants.
    pub fn integrate_sigma(&self, k: usize) -> Result<f64> {
        self.geometry()?.integrate_sigma(k)
    }

    pub fn area(&self) -> Result<f64> {
        self.geometry().map(|g| g.area())
    }

    pub fn integrate_l2(&self) -> Result<f64> {
        self.geometry().map(|g| g.integrate_l2())
    }

    pub fn functional_q(&self) -> Result<f64> {
        self.geometry()?.functional_q()
    }
}

impl CurvatureField {
    /// Number of principal curvatures m = n - 1.
    pub fn m(&self) -> usize {
        self.n - 1
    }

    /// sigma_k of the multiset {kappa_rad, kappa_sph x (n-2)} at a node;
    /// zero above m.
    pub fn sigma_at(&self, i: usize, k: usize) -> f64 {
        sigma_multiset(self.kappa_rad[i], self.kappa_sph[i], self.n - 2, k)
    }

    /// Gauss-Bonnet combination l2 at a node, expanded around the
    /// umbilic point: l2 = a2 e2(delta) + a3 e3(delta) + e4(delta) with
    /// e_j the elementary symmetric functions of the deficits. The
    /// expansion has no constant or linear part, so it stays accurate
    /// when the deficits are near round-off.
    pub fn l2_at(&self, i: usize) -> f64 {
        let n = self.n as f64;
        let a2 = binomial(self.n - 3, 2) - (n - 3.0) * (n - 4.0) / 6.0;
        let a3 = n - 4.0;
        let q = self.n - 2;
        let e2 = sigma_multiset(self.delta_rad[i], self.delta_sph[i], q, 2);
        let e3 = sigma_multiset(self.delta_rad[i], self.delta_sph[i], q, 3);
        let e4 = sigma_multiset(self.delta_rad[i], self.delta_sph[i], q, 4);
        a2 * e2 + a3 * e3 + e4
    }

    /// sup over nodes and directions of |kappa - 1|.
    pub fn umbilicity_deficit(&self) -> f64 {
        self.delta_rad
            .iter()
            .chain(&self.delta_sph)
            .fold(0.0_f64, |acc, &d| acc.max(d.abs()))
    }

    /// min over nodes of min(kappa_rad, kappa_sph) - 1.
    pub fn horoconvexity_margin(&self) -> f64 {
        self.delta_rad
            .iter()
            .chain(&self.delta_sph)
            .fold(f64::INFINITY, |acc, &d| acc.min(d))
    }
}

/// One-stop geometry bundle for a fixed surface.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub n: usize,
    omega_slice: f64,
    theta: Vec<f64>,
    pub support: SupportFields,
    pub curvature: CurvatureField,
    density: Vec<f64>,
}

impl Geometry {
    /// Integral over the hypersurface of a per-node scalar.
    pub fn integrate(&self, node_values: impl Fn(usize) -> f64) -> f64 {
        let f: Vec<f64> = (0..self.theta.len())
            .map(|i| node_values(i) * self.density[i])
            .collect();
        self.omega_slice * simpson(&f)
    }

    pub fn integrate_sigma(&self, k: usize) -> Result<f64> {
        if k > self.n - 1 {
            return Err(Error::Domain(format!(
                "sigma index {k} out of range for n = {}",
                self.n
            )));
        }
        Ok(self.integrate(|i| self.curvature.sigma_at(i, k)))
    }

    pub fn area(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    pub fn integrate_l2(&self) -> f64 {
        self.integrate(|i| self.curvature.l2_at(i))
    }

    /// Q = area^{-(n-5)/(n-1)} * integral of l2.
    pub fn functional_q(&self) -> Result<f64> {
        let area = self.area();
        if !(area > 0.0) {
            return Err(Error::Domain(format!("area must be positive, got {area}")));
        }
        let expo = -((self.n as f64 - 5.0) / (self.n as f64 - 1.0));
        Ok(area.powf(expo) * self.integrate_l2())
    }
}

/// sigma_k of {a} union {b repeated q times}; zero above q + 1.
#[inline]
pub(crate) fn sigma_multiset(a: f64, b: f64, q: usize, k: usize) -> f64 {
    if k > q + 1 {
        return 0.0;
    }
    if k == 0 {
        return 1.0;
    }
    binomial(q, k) * b.powi(k as i32) + binomial(q, k - 1) * a * b.powi(k as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_multiset_matches_prefix_recurrence() {
        let (a, b, q) = (2.0, 0.5, 4usize);
        let mut values = vec![b; q];
        values.push(a);
        values.sort_by(f64::total_cmp);
        let mut sig = Vec::new();
        crate::symfunc::sigma_all_into(&values, &mut sig);
        for k in 0..=q + 1 {
            assert!((sigma_multiset(a, b, q, k) - sig[k]).abs() < 1e-14 * sig[k].abs().max(1.0));
        }
        assert_eq!(sigma_multiset(a, b, q, q + 2), 0.0);
    }

    #[test]
    fn constant_profile_is_umbilic() {
        let s = AxisymmetricHypersurface::sphere(6, 1.0, 400).unwrap();
        let sf = s.support_fields().unwrap();
        // phi constant => derivative exactly zero, v exactly one
        assert!(sf.phi_theta.iter().all(|&d| d == 0.0));
        assert!(sf.v.iter().all(|&v| v == 1.0));
        // hyperbolic identity
        for i in 0..sf.lambda.len() {
            let id = sf.lambda_prime[i] * sf.lambda_prime[i] - sf.lambda[i] * sf.lambda[i];
            assert!((id - 1.0).abs() < 1e-12);
        }
        let c = s.curvature().unwrap();
        let coth1 = 1.0 / 1.0_f64.tanh();
        for i in 0..=400 {
            assert!((c.kappa_rad[i] - coth1).abs() < 1e-13);
            assert!((c.kappa_sph[i] - coth1).abs() < 1e-13);
            assert!((c.kappa_rad[i] - c.kappa_sph[i]).abs() < 1e-15);
        }
        assert!((c.horoconvexity_margin() - (coth1 - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn sphere_area_matches_closed_form() {
        let s = AxisymmetricHypersurface::sphere(6, 1.0, 400).unwrap();
        let area = s.area().unwrap();
        let exact = unit_sphere_area(5) * 1.0_f64.sinh().powi(5);
        assert!(
            ((area - exact) / exact).abs() < 1e-10,
            "area {area} vs {exact}"
        );
        assert!((exact - 69.5038).abs() < 1e-3 * 69.5);
    }

    #[test]
    fn sphere_sigma_integrals_match_closed_form() {
        let s = AxisymmetricHypersurface::sphere(6, 1.0, 400).unwrap();
        let g = s.geometry().unwrap();
        let area = g.area();
        let coth1 = 1.0 / 1.0_f64.tanh();
        for k in 0..=5usize {
            let exact = binomial(5, k) * coth1.powi(k as i32) * area;
            let got = g.integrate_sigma(k).unwrap();
            assert!(
                ((got - exact) / exact).abs() < 1e-12,
                "k = {k}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn l2_decomposition_identity() {
        // integral of l2 equals the sigma combination under the same
        // quadrature
        let s = AxisymmetricHypersurface::cos_perturbed(6, 2.0, 0.1, 2, 128).unwrap();
        let g = s.geometry().unwrap();
        let n = 6.0_f64;
        let direct = g.integrate_l2();
        let combo = g.integrate_sigma(4).unwrap()
            - (n - 3.0) * (n - 4.0) / 6.0 * g.integrate_sigma(2).unwrap()
            + (n - 1.0) * (n - 2.0) * (n - 3.0) * (n - 4.0) / 24.0 * g.area();
        assert!(
            ((direct - combo) / combo.abs().max(1e-300)).abs() < 1e-13,
            "{direct} vs {combo}"
        );
    }

    #[test]
    fn q_is_radius_invariant_on_spheres() {
        let q1 = AxisymmetricHypersurface::sphere(6, 1.0, 400)
            .unwrap()
            .functional_q()
            .unwrap();
        let q2 = AxisymmetricHypersurface::sphere(6, 2.0, 400)
            .unwrap()
            .functional_q()
            .unwrap();
        assert!(((q1 - q2) / q1).abs() < 1e-8);
        let expected = 5.0 * unit_sphere_area(5).powf(0.8);
        assert!(((q1 - expected) / expected).abs() < 1e-8);
        assert!((expected - 78.00630).abs() < 1e-4);
    }

    #[test]
    fn n5_sphere_l2_integral_is_topological() {
        let s = AxisymmetricHypersurface::sphere(5, 2.0, 400).unwrap();
        let got = s.integrate_l2().unwrap();
        let exact = 8.0 * std::f64::consts::PI * std::f64::consts::PI / 3.0;
        assert!(((got - exact) / exact).abs() < 1e-8, "{got} vs {exact}");
    }

    #[test]
    fn pole_values_match_interior_limit() {
        let s = AxisymmetricHypersurface::cos_perturbed(6, 2.0, 0.1, 2, 400).unwrap();
        let c = s.curvature().unwrap();
        // on-axis umbilicity to discretization order
        assert!((c.kappa_rad[0] - c.kappa_sph[0]).abs() < 1e-6);
        assert!((c.kappa_rad[400] - c.kappa_sph[400]).abs() < 1e-6);
        for i in [0usize, 1, 200, 399, 400] {
            assert!(c.kappa_rad[i].is_finite() && c.kappa_sph[i].is_finite());
        }
    }

    #[test]
    fn support_derivative_matches_chain_rule() {
        // phi_theta = r_theta / lambda for r = 2 + 0.1 cos(2 theta)
        let s = AxisymmetricHypersurface::cos_perturbed(6, 2.0, 0.1, 2, 400).unwrap();
        let sf = s.support_fields().unwrap();
        let i = 100; // theta = pi/4
        let t = s.theta()[i];
        let r_t = -0.2 * (2.0 * t).sin();
        let expect = r_t / s.r()[i].sinh();
        assert!((sf.phi_theta[i] - expect).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(AxisymmetricHypersurface::sphere(4, 1.0, 64).is_err());
        assert!(AxisymmetricHypersurface::sphere(6, -1.0, 64).is_err());
        assert!(AxisymmetricHypersurface::sphere(6, 1.0, 65).is_err());
        assert!(AxisymmetricHypersurface::sphere(6, 1.0, 16).is_err());
        // perturbation driving r negative
        assert!(AxisymmetricHypersurface::cos_perturbed(6, 0.1, 0.2, 2, 64).is_err());
    }
}
