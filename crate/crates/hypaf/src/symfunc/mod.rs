//! Elementary symmetric functions of principal-curvature vectors and the
//! pointwise inequality gaps built from them: classical Newton-MacLaurin
//! bounds, their refined quartic/quintic combinations, equality-pattern
//! classification, and the root-interlacing reduction that drops the
//! number of entries by one while preserving the normalized means.

mod cyclic;
mod scan;

pub use cyclic::{cyclic_identity_residual, cyclic_identity_sides, CyclicIdentity};
pub use scan::{
    scan_cone, scan_cone_seq, ConeKind, ConeSpec, ScanConfig, ScanSummary, DEFAULT_EXTENT,
};

use crate::error::{Error, Result};
use crate::numerics::binomial;
use serde::{Deserialize, Serialize};

/// Default relative tolerance for equality-pattern classification.
pub const DEFAULT_EQUALITY_TOL: f64 = 1e-9;

/// Largest supported number of entries.
pub const MAX_ENTRIES: usize = 64;

/// A point kappa in R^m of principal curvatures.
///
/// Every operation is symmetric in the entries; evaluation happens in a
/// canonical sorted order so permuted inputs give bit-identical results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaVector {
    values: Vec<f64>,
}

/// Equality-pattern classification of a curvature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EqualityClass {
    /// All entries coincide.
    EqualityCaseI,
    /// Exactly one entry sits above a bed of ones.
    EqualityCaseII,
    /// Neither pattern.
    Interior,
}

/// Sign classification attached to a [`GapReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapClass {
    StrictNegative,
    EqualityCaseI,
    EqualityCaseII,
    Positive,
}

/// Outcome of a gap evaluation: the value, its sign class, and the witness.
#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub operation: &'static str,
    pub gap: f64,
    /// Same quantity evaluated through the unnormalized sigma route.
    pub sigma_form_gap: f64,
    pub classification: GapClass,
    pub witness: KappaVector,
}

/// Result of the interlacing reduction.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub kappa: KappaVector,
    /// Largest |F'(-kappa_i)/m| over the returned roots.
    pub max_residual: f64,
}

impl KappaVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("kappa vector needs at least one entry".into()));
        }
        if values.len() > MAX_ENTRIES {
            return Err(Error::Domain(format!(
                "kappa vector limited to {MAX_ENTRIES} entries, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite entry {bad}")));
        }
        Ok(Self { values })
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// sigma_k, with sigma_0 = 1 and sigma_{-1} = 0 by convention.
    pub fn sigma(&self, k: i64) -> Result<f64> {
        if k == -1 {
            return Ok(0.0);
        }
        if k < 0 || k as usize > self.m() {
            return Err(Error::Domain(format!(
                "sigma index {k} out of range for m = {}",
                self.m()
            )));
        }
        Ok(self.sigma_all()[k as usize])
    }

    /// All sigma_0 .. sigma_m at once via the prefix recurrence.
    pub fn sigma_all(&self) -> Vec<f64> {
        let mut out = Vec::new();
        sigma_all_into(&self.sorted(), &mut out);
        out
    }

    /// p_k = sigma_k / C(m, k).
    pub fn p_mean(&self, k: i64) -> Result<f64> {
        if k < 0 || k as usize > self.m() {
            return Err(Error::Domain(format!(
                "p index {k} out of range for m = {}",
                self.m()
            )));
        }
        Ok(self.sigma(k)? / binomial(self.m(), k as usize))
    }

    /// All normalized means p_0 .. p_m.
    pub fn p_all(&self) -> Vec<f64> {
        let mut sig = self.sigma_all();
        for (k, s) in sig.iter_mut().enumerate() {
            *s /= binomial(self.m(), k);
        }
        sig
    }

    /// Garding cone membership: sigma_j > 0 for every j <= k.
    pub fn in_gamma_k(&self, k: usize) -> Result<bool> {
        if k == 0 || k > self.m() {
            return Err(Error::Domain(format!(
                "Garding index {k} out of range for m = {}",
                self.m()
            )));
        }
        let sig = self.sigma_all();
        Ok(sig[1..=k].iter().all(|&s| s > 0.0))
    }

    /// Upper Newton-MacLaurin gap:
    /// k(m-k)/((k+1)(m-k+1)) - sigma_{k-1} sigma_{k+1} / sigma_k^2.
    ///
    /// Nonnegative on the Garding cone Gamma_k^+, zero exactly on
    /// multiples of (1, ..., 1).
    pub fn nm_gap_upper(&self, k: usize) -> Result<f64> {
        let m = self.m();
        if k < 1 || k > m - 1 {
            return Err(Error::Domain(format!(
                "nm_gap_upper needs 1 <= k <= m-1, got k = {k}, m = {m}"
            )));
        }
        if !self.in_gamma_k(k)? {
            return Err(Error::Precondition(format!(
                "kappa not in Gamma_{k}^+"
            )));
        }
        let sig = self.sigma_all();
        let bound =
            (k as f64 * (m - k) as f64) / ((k + 1) as f64 * (m - k + 1) as f64);
        Ok(bound - sig[k - 1] * sig[k + 1] / (sig[k] * sig[k]))
    }

    /// Lower Newton-MacLaurin gap: sigma_1 sigma_{k-1} / sigma_k - k m / (m - k + 1).
    pub fn nm_gap_lower(&self, k: usize) -> Result<f64> {
        let m = self.m();
        if k < 1 || k > m {
            return Err(Error::Domain(format!(
                "nm_gap_lower needs 1 <= k <= m, got k = {k}, m = {m}"
            )));
        }
        if !self.in_gamma_k(k)? {
            return Err(Error::Precondition(format!(
                "kappa not in Gamma_{k}^+"
            )));
        }
        let sig = self.sigma_all();
        let bound = (k as f64 * m as f64) / (m - k + 1) as f64;
        Ok(sig[1] * sig[k - 1] / sig[k] - bound)
    }

    /// Quartic refined gap 3(p2 p4 - p3^2) + (p1 p3 - p4).
    ///
    /// Nonpositive whenever all pairwise products kappa_i kappa_j (i != j)
    /// are at least one; nonnegative on the unit box.
    pub fn quartic_gap(&self) -> Result<f64> {
        if self.m() < 4 {
            return Err(Error::Domain(format!(
                "quartic gap needs m >= 4, got {}",
                self.m()
            )));
        }
        let p = self.p_all();
        Ok(3.0 * (p[2] * p[4] - p[3] * p[3]) + (p[1] * p[3] - p[4]))
    }

    /// Quintic refined gap 3(p5 p3 - p4^2) + (p1 p3 - p4).
    pub fn quintic_gap(&self) -> Result<f64> {
        if self.m() < 5 {
            return Err(Error::Domain(format!(
                "quintic gap needs m >= 5, got {}",
                self.m()
            )));
        }
        let p = self.p_all();
        Ok(3.0 * (p[5] * p[3] - p[4] * p[4]) + (p[1] * p[3] - p[4]))
    }

    /// Normalized refined gap
    /// (p5 p3 / p4 - p4) + 2 (p2 - p3^2 / p4) + (p1 p3 / p4 - 1).
    ///
    /// Nonpositive on the horoconvex cone, with equality exactly at the
    /// all-equal pattern and the single-spike-over-ones pattern.
    pub fn refined_gap(&self) -> Result<GapReport> {
        self.refined_gap_with_tol(DEFAULT_EQUALITY_TOL)
    }

    pub fn refined_gap_with_tol(&self, tol: f64) -> Result<GapReport> {
        if self.m() < 5 {
            return Err(Error::Domain(format!(
                "refined gap needs m >= 5, got {}",
                self.m()
            )));
        }
        let p = self.p_all();
        if p[4] == 0.0 {
            return Err(Error::Domain("sigma_4 = 0: refined gap undefined".into()));
        }
        let gap = refined_gap_from_p(&p);
        let (sigma_form, term_scale) = refined_sigma_terms(&self.sigma_all(), self.m());
        // The sigma route is (m - 4) C(m, 3) times the normalized route;
        // a disagreement beyond the round-off left by the cancelling terms
        // flags a numerical fault.
        let scale = (self.m() as f64 - 4.0) * binomial(self.m(), 3);
        if (sigma_form - scale * gap).abs() > 1e-10 * term_scale.max(1.0) {
            return Err(Error::Numeric(format!(
                "sigma-form and normalized refined gaps disagree: {sigma_form} vs {}",
                scale * gap
            )));
        }
        let classification = if gap < -tol {
            GapClass::StrictNegative
        } else if gap > tol {
            GapClass::Positive
        } else {
            match self.classify_equality(tol) {
                EqualityClass::EqualityCaseI => GapClass::EqualityCaseI,
                EqualityClass::EqualityCaseII => GapClass::EqualityCaseII,
                EqualityClass::Interior => {
                    if gap <= 0.0 {
                        GapClass::StrictNegative
                    } else {
                        GapClass::Positive
                    }
                }
            }
        };
        Ok(GapReport {
            operation: "refined_gap",
            gap,
            sigma_form_gap: sigma_form,
            classification,
            witness: self.clone(),
        })
    }

    /// Unnormalized sigma-route of the refined gap, with ambient index
    /// n = m + 1:
    /// (5 s5 s3/s4 - 4(n-5)/(n-4) s4)
    ///   + (n-4)(n-5)/6 (4(n-3)/(n-4) s2 - 3 s3^2/s4)
    ///   + (n-2)(n-3)(n-4)(n-5)/24 (s1 s3/s4 - 4(n-1)/(n-4)).
    pub fn refined_gap_sigma_form(&self) -> Result<f64> {
        let m = self.m();
        if m < 5 {
            return Err(Error::Domain(format!(
                "refined sigma form needs m >= 5, got {m}"
            )));
        }
        let sig = self.sigma_all();
        if sig[4] == 0.0 {
            return Err(Error::Domain("sigma_4 = 0: refined gap undefined".into()));
        }
        Ok(refined_sigma_terms(&sig, m).0)
    }

    /// Pattern classification with relative tolerance `tol`.
    pub fn classify_equality(&self, tol: f64) -> EqualityClass {
        let scale = self
            .values
            .iter()
            .fold(1.0_f64, |acc, v| acc.max(v.abs()));
        let tau = tol * scale;
        let max = self.values.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.values.iter().cloned().fold(f64::MAX, f64::min);
        if max - min <= tau {
            return EqualityClass::EqualityCaseI;
        }
        let above: Vec<&f64> = self.values.iter().filter(|&&v| v > 1.0 + tau).collect();
        if above.len() == 1
            && self
                .values
                .iter()
                .filter(|&&v| v <= 1.0 + tau)
                .all(|&v| (v - 1.0).abs() <= tau)
        {
            return EqualityClass::EqualityCaseII;
        }
        EqualityClass::Interior
    }

    /// Drops one entry by interlacing: the returned vector collects the
    /// negated roots of F'(x)/m where F(x) = prod (x + kappa_i).
    ///
    /// Contract: p_i is preserved for i <= m-1, and min of the result is
    /// at least min kappa (so the horoconvex cone is preserved).
    ///
    /// Entries of multiplicity q >= 2 are exact roots of F' with
    /// multiplicity q - 1 and pass through unchanged; the remaining
    /// simple roots are bracketed between consecutive distinct entries
    /// and polished by a safeguarded Newton iteration on the product form
    /// W(t) = sum_j q_j prod_{l != j} (v_l - t), which never expands the
    /// bracket.
    pub fn derivative_reduce(&self) -> Result<Reduction> {
        let m = self.m();
        if m < 2 {
            return Err(Error::Domain("reduction needs m >= 2".into()));
        }
        let sorted = self.sorted();

        // Group exactly-equal entries.
        let mut distinct: Vec<f64> = Vec::new();
        let mut mult: Vec<usize> = Vec::new();
        for &v in &sorted {
            if distinct.last() == Some(&v) {
                *mult.last_mut().unwrap() += 1;
            } else {
                distinct.push(v);
                mult.push(1);
            }
        }

        let mut roots: Vec<f64> = Vec::with_capacity(m - 1);
        for (v, q) in distinct.iter().zip(&mult) {
            for _ in 1..*q {
                roots.push(*v);
            }
        }
        for gap in 0..distinct.len().saturating_sub(1) {
            roots.push(gap_root(&distinct, &mult, gap)?);
        }
        roots.sort_by(f64::total_cmp);

        let max_residual = roots
            .iter()
            .map(|&t| f_prime_over_m(&sorted, t).abs())
            .fold(0.0_f64, f64::max);
        Ok(Reduction {
            kappa: KappaVector::new(roots)?,
            max_residual,
        })
    }
}

/// Prefix recurrence for all elementary symmetric functions of `values`.
///
/// out[k] = sigma_k; O(m^2) and free of the cancellation that plagues
/// Newton-identity routes on mixed-sign input.
pub(crate) fn sigma_all_into(values: &[f64], out: &mut Vec<f64>) {
    let m = values.len();
    out.clear();
    out.resize(m + 1, 0.0);
    out[0] = 1.0;
    for (i, &x) in values.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            out[j] += x * out[j - 1];
        }
    }
}

/// Normalized refined gap from a slice of p-means (needs p[1..=5]).
pub(crate) fn refined_gap_from_p(p: &[f64]) -> f64 {
    (p[5] * p[3] / p[4] - p[4]) + 2.0 * (p[2] - p[3] * p[3] / p[4]) + (p[1] * p[3] / p[4] - 1.0)
}

/// Sigma-route refined gap together with the magnitude of its three
/// (cancelling) terms, for round-off-aware comparisons.
fn refined_sigma_terms(sig: &[f64], m: usize) -> (f64, f64) {
    let n = (m + 1) as f64;
    let c2 = (n - 4.0) * (n - 5.0) / 6.0;
    let c3 = (n - 2.0) * (n - 3.0) * (n - 4.0) * (n - 5.0) / 24.0;
    let pieces = [
        5.0 * sig[5] * sig[3] / sig[4],
        -4.0 * (n - 5.0) / (n - 4.0) * sig[4],
        c2 * 4.0 * (n - 3.0) / (n - 4.0) * sig[2],
        -c2 * 3.0 * sig[3] * sig[3] / sig[4],
        c3 * sig[1] * sig[3] / sig[4],
        -c3 * 4.0 * (n - 1.0) / (n - 4.0),
    ];
    (
        pieces.iter().sum(),
        pieces.iter().map(|p| p.abs()).sum(),
    )
}

/// W(t) = sum_j q_j prod_{l != j} (v_l - t): the deflated derivative
/// prod_j (v_j - t)^{q_j - 1} W(t) = F'(-t) up to sign.
fn deflated_derivative(distinct: &[f64], mult: &[usize], t: f64) -> (f64, f64) {
    // Returns (W(t), W'(t)).
    let d = distinct.len();
    let mut w = 0.0;
    let mut dw = 0.0;
    for j in 0..d {
        let mut prod = mult[j] as f64;
        // derivative of prod_{l != j} (v_l - t) = -sum_k prod_{l != j,k}
        let mut dsum = 0.0;
        for l in 0..d {
            if l == j {
                continue;
            }
            let mut inner = 1.0;
            for q in 0..d {
                if q == j || q == l {
                    continue;
                }
                inner *= distinct[q] - t;
            }
            dsum += inner;
            prod *= distinct[l] - t;
        }
        w += prod;
        dw -= mult[j] as f64 * dsum;
    }
    (w, dw)
}

/// |F'(-t)/m| for F(x) = prod (x + kappa_i), evaluated in product form.
fn f_prime_over_m(kappa: &[f64], t: f64) -> f64 {
    let m = kappa.len() as f64;
    // F'(-t) = sum_j prod_{l != j} (kappa_l - t)
    let mut total = 0.0;
    for j in 0..kappa.len() {
        let mut prod = 1.0;
        for (l, &v) in kappa.iter().enumerate() {
            if l != j {
                prod *= v - t;
            }
        }
        total += prod;
    }
    total / m
}

/// Simple root of W in the open gap (distinct[g], distinct[g+1]).
fn gap_root(distinct: &[f64], mult: &[usize], g: usize) -> Result<f64> {
    let mut lo = distinct[g];
    let mut hi = distinct[g + 1];
    let (mut wlo, _) = deflated_derivative(distinct, mult, lo);
    let (whi, _) = deflated_derivative(distinct, mult, hi);
    if wlo == 0.0 {
        return Ok(lo);
    }
    if whi == 0.0 {
        return Ok(hi);
    }
    if wlo.signum() == whi.signum() {
        return Err(Error::Numeric(format!(
            "no sign change across gap [{lo}, {hi}] in interlacing reduction"
        )));
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (w, dw) = deflated_derivative(distinct, mult, t);
        if w == 0.0 {
            return Ok(t);
        }
        if w.signum() == wlo.signum() {
            lo = t;
            wlo = w;
        } else {
            hi = t;
        }
        let newton = t - w / dw;
        let next = if dw != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - t).abs() <= 2.0 * f64::EPSILON * t.abs().max(1.0) {
            return Ok(next);
        }
        t = next;
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(t)
}
