//! Seeded Monte Carlo scans of the refined gap over curvature cones.
//!
//! The sample index range is partitioned into fixed-size chunks; chunk c
//! draws from an independent ChaCha stream keyed by (seed, c), so the
//! result is identical for any parallel schedule, thread count, or the
//! sequential fallback. Extremal witnesses carry their global sample
//! index and ties resolve toward the lower index, which makes the reduce
//! step order-free.

use super::{refined_gap_from_p, sigma_all_into, EqualityClass, KappaVector};
use crate::error::{Error, Result};
use crate::numerics::binomial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const CHUNK: u64 = 4096;

/// Default radial extent K: horoconvex entries are drawn from [1, 1 + K].
///
/// The refined gap at a planted all-equal pattern of radius c carries
/// round-off of order c^4 eps; K = 3 keeps that floor near 5e-13, safely
/// below the 1e-12 violation threshold. Larger extents are accepted but
/// push equality-case noise above the absolute threshold.
pub const DEFAULT_EXTENT: f64 = 3.0;

/// Which curvature cone to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeKind {
    /// Every entry at least one.
    Horoconvex,
    /// Every pairwise product at least one.
    #[serde(rename = "pairwise")]
    PairwiseProduct,
    /// Garding cone Gamma_k^+.
    #[serde(rename = "gardingk")]
    Garding(usize),
    /// Entries in [0, 1].
    #[serde(rename = "unitbox")]
    UnitBox,
}

/// A cone plus its radial sampling extent K.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConeSpec {
    pub kind: ConeKind,
    pub extent: f64,
}

impl ConeSpec {
    pub fn new(kind: ConeKind, extent: f64) -> Result<Self> {
        if !(extent > 0.0) {
            return Err(Error::Domain(format!("extent must be positive, got {extent}")));
        }
        Ok(Self { kind, extent })
    }

    /// Deterministic membership predicate.
    pub fn contains(&self, values: &[f64]) -> bool {
        match self.kind {
            ConeKind::Horoconvex => values.iter().all(|&v| v >= 1.0),
            ConeKind::PairwiseProduct => {
                // All pairwise products >= 1 iff the product of the two
                // smallest entries is >= 1 and at most one entry is < 1
                // in absolute terms; sorting keeps it O(m log m).
                let mut s = values.to_vec();
                s.sort_by(f64::total_cmp);
                if s.len() < 2 {
                    return s[0] >= 1.0;
                }
                s[0] * s[1] >= 1.0 && s[0] > 0.0
            }
            ConeKind::Garding(k) => {
                let mut sig = Vec::new();
                let mut sorted = values.to_vec();
                sorted.sort_by(f64::total_cmp);
                sigma_all_into(&sorted, &mut sig);
                k >= 1 && k <= values.len() && sig[1..=k].iter().all(|&s| s > 0.0)
            }
            ConeKind::UnitBox => values.iter().all(|&v| (0.0..=1.0).contains(&v)),
        }
    }
}

/// Scan parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScanConfig {
    pub cone: ConeSpec,
    pub m: usize,
    pub count: u64,
    pub seed: u64,
    /// Pattern tolerance handed to the equality classifier.
    pub equality_tol: f64,
    /// A gap above this counts as a violation of the nonpositive bound.
    pub violation_tol: f64,
}

impl ScanConfig {
    pub fn new(cone: ConeSpec, m: usize, count: u64, seed: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::Domain("scan needs count >= 1".into()));
        }
        if m < 5 {
            return Err(Error::Domain(format!(
                "refined-gap scan needs m >= 5, got {m}"
            )));
        }
        if m > super::MAX_ENTRIES {
            return Err(Error::Domain(format!("m = {m} exceeds {}", super::MAX_ENTRIES)));
        }
        Ok(Self {
            cone,
            m,
            count,
            seed,
            equality_tol: super::DEFAULT_EQUALITY_TOL,
            violation_tol: 1e-12,
        })
    }
}

/// Aggregated scan outcome.
#[derive(Debug, Clone, Serialize)]
pub struct ScanSummary {
    pub m: usize,
    pub count: u64,
    /// Samples with gap above the violation tolerance.
    pub violations: u64,
    pub max_gap: f64,
    pub max_witness: Option<KappaVector>,
    pub min_gap: f64,
    pub min_witness: Option<KappaVector>,
    /// Classifier counts over all samples.
    pub case_i: u64,
    pub case_ii: u64,
    pub interior: u64,
    /// Samples planted exactly on an equality pattern, and how many of
    /// those the classifier flagged.
    pub planted_case_i: u64,
    pub planted_case_ii: u64,
    pub flagged_planted_case_i: u64,
    pub flagged_planted_case_ii: u64,
    /// Interior samples with |gap| <= 1e-9 that are not within 1e-2 of an
    /// equality pattern. Zero is the healthy value: where the two
    /// equality families merge (a bed of ones with two small spikes of
    /// sizes a, b) the gap is cubic, ~ a^2 b + a b^2, so only points
    /// closer than ~1e-2 to the pattern set can sit within 1e-9 of zero.
    pub suspicious_near_zero: u64,
    /// Samples skipped because sigma_4 vanished to working precision.
    pub skipped: u64,
    max_index: u64,
    min_index: u64,
}

impl ScanSummary {
    fn empty(m: usize) -> Self {
        Self {
            m,
            count: 0,
            violations: 0,
            max_gap: f64::NEG_INFINITY,
            max_witness: None,
            min_gap: f64::INFINITY,
            min_witness: None,
            case_i: 0,
            case_ii: 0,
            interior: 0,
            planted_case_i: 0,
            planted_case_ii: 0,
            flagged_planted_case_i: 0,
            flagged_planted_case_ii: 0,
            suspicious_near_zero: 0,
            skipped: 0,
            max_index: u64::MAX,
            min_index: u64::MAX,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.count += other.count;
        self.violations += other.violations;
        self.case_i += other.case_i;
        self.case_ii += other.case_ii;
        self.interior += other.interior;
        self.planted_case_i += other.planted_case_i;
        self.planted_case_ii += other.planted_case_ii;
        self.flagged_planted_case_i += other.flagged_planted_case_i;
        self.flagged_planted_case_ii += other.flagged_planted_case_ii;
        self.suspicious_near_zero += other.suspicious_near_zero;
        self.skipped += other.skipped;
        if other.max_gap > self.max_gap
            || (other.max_gap == self.max_gap && other.max_index < self.max_index)
        {
            self.max_gap = other.max_gap;
            self.max_witness = other.max_witness;
            self.max_index = other.max_index;
        }
        if other.min_gap < self.min_gap
            || (other.min_gap == self.min_gap && other.min_index < self.min_index)
        {
            self.min_gap = other.min_gap;
            self.min_witness = other.min_witness;
            self.min_index = other.min_index;
        }
        self
    }

    /// True when both a strictly positive and a strictly negative gap
    /// showed up (beyond the violation tolerance).
    pub fn sign_change_found(&self, tol: f64) -> bool {
        self.max_gap > tol && self.min_gap < -tol
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Law {
    Uniform,
    LogUniform,
    ExactCaseI,
    ExactCaseII,
    Perturbed,
}

/// Draws one sample of the configured cone into `buf`; reports which law
/// produced it.
fn sample_into(cfg: &ScanConfig, rng: &mut ChaCha8Rng, buf: &mut Vec<f64>) -> Law {
    let m = cfg.m;
    let k_ext = cfg.cone.extent;
    buf.clear();
    match cfg.cone.kind {
        ConeKind::Horoconvex => {
            let u: f64 = rng.gen();
            if u < 0.35 {
                for _ in 0..m {
                    buf.push(1.0 + k_ext * rng.gen::<f64>());
                }
                Law::Uniform
            } else if u < 0.70 {
                // log-uniform distance-to-boundary in [1e-6, K]
                for _ in 0..m {
                    let e: f64 = rng.gen();
                    buf.push(1.0 + (1e-6f64.ln() + e * (k_ext.ln() - 1e-6f64.ln())).exp());
                }
                Law::LogUniform
            } else if u < 0.85 {
                plant_pattern(m, k_ext, rng, buf);
                if buf.iter().all(|&v| v == buf[0]) {
                    Law::ExactCaseI
                } else {
                    Law::ExactCaseII
                }
            } else {
                plant_pattern(m, k_ext, rng, buf);
                for v in buf.iter_mut() {
                    *v += 1e-4 * rng.gen::<f64>();
                }
                Law::Perturbed
            }
        }
        ConeKind::PairwiseProduct => {
            let u: f64 = rng.gen();
            let ln_l = (1.0 + k_ext).ln() / 2.0;
            if u < 0.4 {
                // one entry below one, the rest at least its reciprocal
                let t = (-(rng.gen::<f64>() * ln_l)).exp();
                buf.push(t);
                for _ in 1..m {
                    buf.push(1.0 / t * (1.0 + k_ext * rng.gen::<f64>()));
                }
                Law::Uniform
            } else if u < 0.7 {
                // near the product-one boundary: (t, 1/t, 1/t, ...)
                let t = (-(rng.gen::<f64>() * ln_l)).exp();
                buf.push(t);
                for _ in 1..m {
                    buf.push(1.0 / t * (1.0 + 1e-4 * rng.gen::<f64>()));
                }
                Law::Perturbed
            } else {
                for _ in 0..m {
                    buf.push(1.0 + k_ext * rng.gen::<f64>());
                }
                Law::Uniform
            }
        }
        ConeKind::Garding(k) => {
            // Rejection from a positively skewed box; the cone has
            // substantial mass there for the k used in practice.
            let _ = k;
            for _ in 0..64 {
                buf.clear();
                for _ in 0..m {
                    buf.push(-0.25 * k_ext + 1.25 * k_ext * rng.gen::<f64>());
                }
                if cfg.cone.contains(buf) {
                    return Law::Uniform;
                }
            }
            // Fall back to an all-positive sample, inside every Gamma_k.
            buf.clear();
            for _ in 0..m {
                buf.push(1.0 + k_ext * rng.gen::<f64>());
            }
            Law::Uniform
        }
        ConeKind::UnitBox => {
            let u: f64 = rng.gen();
            if u < 0.7 {
                for _ in 0..m {
                    buf.push(rng.gen::<f64>());
                }
                Law::Uniform
            } else {
                // near-one corner, where the gap degenerates to zero
                for _ in 0..m {
                    let e: f64 = rng.gen();
                    buf.push(1.0 - (1e-6f64.ln() * (1.0 - e)).exp());
                }
                Law::LogUniform
            }
        }
    }
}

fn plant_pattern(m: usize, k_ext: f64, rng: &mut ChaCha8Rng, buf: &mut Vec<f64>) {
    if rng.gen::<f64>() < 0.5 {
        let c = (rng.gen::<f64>() * (1.0 + k_ext).ln()).exp();
        for _ in 0..m {
            buf.push(c);
        }
    } else {
        let c = 1.0 + k_ext * rng.gen::<f64>().max(1e-3);
        let pos = rng.gen_range(0..m);
        for i in 0..m {
            buf.push(if i == pos { c } else { 1.0 });
        }
    }
}

/// Distance from the nearest equality pattern, in the max norm.
fn pattern_distance(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    let case_i = (max - min) / 2.0;
    // Case II: the largest entry is free, the rest must sit at one.
    let mut case_ii = 0.0_f64;
    let mut seen_max = false;
    for &v in values {
        if v == max && !seen_max {
            seen_max = true;
            continue;
        }
        case_ii = case_ii.max((v - 1.0).abs());
    }
    case_i.min(case_ii)
}

fn scan_chunk(cfg: &ScanConfig, chunk_index: u64) -> ScanSummary {
    let start = chunk_index * CHUNK;
    let stop = (start + CHUNK).min(cfg.count);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(chunk_index + 1);

    let mut out = ScanSummary::empty(cfg.m);
    let mut values = Vec::with_capacity(cfg.m);
    let mut sorted = Vec::with_capacity(cfg.m);
    let mut sig = Vec::with_capacity(cfg.m + 1);
    let binom: Vec<f64> = (0..=cfg.m).map(|k| binomial(cfg.m, k)).collect();

    for index in start..stop {
        let law = sample_into(cfg, &mut rng, &mut values);
        out.count += 1;

        sorted.clone_from(&values);
        sorted.sort_by(f64::total_cmp);
        sigma_all_into(&sorted, &mut sig);
        let p: Vec<f64> = sig.iter().zip(&binom).map(|(s, b)| s / b).collect();
        if p[4] == 0.0 {
            out.skipped += 1;
            continue;
        }
        let gap = refined_gap_from_p(&p);
        if !gap.is_finite() {
            out.skipped += 1;
            continue;
        }

        if gap > cfg.violation_tol {
            out.violations += 1;
        }
        if gap > out.max_gap {
            out.max_gap = gap;
            out.max_witness = Some(KappaVector::new(values.clone()).unwrap());
            out.max_index = index;
        }
        if gap < out.min_gap {
            out.min_gap = gap;
            out.min_witness = Some(KappaVector::new(values.clone()).unwrap());
            out.min_index = index;
        }

        let class = KappaVector::new(values.clone())
            .unwrap()
            .classify_equality(cfg.equality_tol);
        match class {
            EqualityClass::EqualityCaseI => out.case_i += 1,
            EqualityClass::EqualityCaseII => out.case_ii += 1,
            EqualityClass::Interior => {
                out.interior += 1;
                if gap.abs() <= 1e-9 && pattern_distance(&values) > 1e-2 {
                    out.suspicious_near_zero += 1;
                }
            }
        }
        match law {
            Law::ExactCaseI => {
                out.planted_case_i += 1;
                if class == EqualityClass::EqualityCaseI {
                    out.flagged_planted_case_i += 1;
                }
            }
            Law::ExactCaseII => {
                out.planted_case_ii += 1;
                if class == EqualityClass::EqualityCaseII {
                    out.flagged_planted_case_ii += 1;
                }
            }
            _ => {}
        }
    }
    out
}

fn chunk_count(count: u64) -> u64 {
    count.div_ceil(CHUNK)
}

/// Sequential scan; the reference implementation for determinism checks.
pub fn scan_cone_seq(cfg: &ScanConfig) -> ScanSummary {
    (0..chunk_count(cfg.count))
        .map(|c| scan_chunk(cfg, c))
        .fold(ScanSummary::empty(cfg.m), ScanSummary::merge)
}

/// Scan over deterministic substreams; data-parallel when the `parallel`
/// feature is enabled, otherwise identical to [`scan_cone_seq`].
pub fn scan_cone(cfg: &ScanConfig) -> ScanSummary {
    #[cfg(feature = "parallel")]
    {
        (0..chunk_count(cfg.count))
            .into_par_iter()
            .map(|c| scan_chunk(cfg, c))
            .reduce(|| ScanSummary::empty(cfg.m), ScanSummary::merge)
    }
    #[cfg(not(feature = "parallel"))]
    {
        scan_cone_seq(cfg)
    }
}
