//! Polynomial identities expressing the quartic/quintic refined gaps as
//! cyclic sums of squared differences. Both sides are evaluated by
//! independent routes: the left through normalized means, the right by
//! explicit enumeration of the cyclic terms. The identities hold for
//! arbitrary real entries, not only inside a curvature cone.

use super::KappaVector;
use crate::error::{Error, Result};

/// Identity selector. `Quartic*` variants need m = 4, `Quintic*` m = 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CyclicIdentity {
    /// p1 p3 - p4 = (1/16) sum kappa_a kappa_b (kappa_c - kappa_d)^2
    QuarticPairs,
    /// 3 (p2 p4 - p3^2) = -(1/16) sum (kappa_a kappa_b)^2 (kappa_c - kappa_d)^2
    QuarticSquares,
    /// Sum of the two quartic identities in factored form.
    QuarticCombined,
    /// p1 p3 - p4 = (1/100) sum kappa_a kappa_b (kappa_c - kappa_d)^2
    QuinticPairs,
    /// 3 (p5 p3 - p4^2) = -(3/100) sum (kappa_a kappa_b kappa_c)^2 (kappa_d - kappa_e)^2
    QuinticTriples,
    /// Sum of the two quintic identities in factored form.
    QuinticCombined,
}

impl CyclicIdentity {
    pub const ALL: [CyclicIdentity; 6] = [
        CyclicIdentity::QuarticPairs,
        CyclicIdentity::QuarticSquares,
        CyclicIdentity::QuarticCombined,
        CyclicIdentity::QuinticPairs,
        CyclicIdentity::QuinticTriples,
        CyclicIdentity::QuinticCombined,
    ];

    /// Required number of entries.
    pub fn arity(self) -> usize {
        match self {
            CyclicIdentity::QuarticPairs
            | CyclicIdentity::QuarticSquares
            | CyclicIdentity::QuarticCombined => 4,
            _ => 5,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            CyclicIdentity::QuarticPairs => "m4-pairs",
            CyclicIdentity::QuarticSquares => "m4-squares",
            CyclicIdentity::QuarticCombined => "m4-combined",
            CyclicIdentity::QuinticPairs => "m5-pairs",
            CyclicIdentity::QuinticTriples => "m5-triples",
            CyclicIdentity::QuinticCombined => "m5-combined",
        }
    }
}

/// Evaluates (left side, right side) of the tagged identity.
pub fn cyclic_identity_sides(id: CyclicIdentity, kappa: &KappaVector) -> Result<(f64, f64)> {
    if kappa.m() != id.arity() {
        return Err(Error::Domain(format!(
            "identity {} needs m = {}, got {}",
            id.tag(),
            id.arity(),
            kappa.m()
        )));
    }
    let v = kappa.values();
    let p = kappa.p_all();
    let (lhs, rhs) = match id {
        CyclicIdentity::QuarticPairs => (p[1] * p[3] - p[4], quartic_sum(v, |ab| ab) / 16.0),
        CyclicIdentity::QuarticSquares => (
            3.0 * (p[2] * p[4] - p[3] * p[3]),
            -quartic_sum(v, |ab| ab * ab) / 16.0,
        ),
        CyclicIdentity::QuarticCombined => (
            3.0 * (p[2] * p[4] - p[3] * p[3]) + p[1] * p[3] - p[4],
            quartic_sum(v, |ab| ab * (1.0 - ab)) / 16.0,
        ),
        CyclicIdentity::QuinticPairs => (p[1] * p[3] - p[4], quintic_pair_sum(v) / 100.0),
        CyclicIdentity::QuinticTriples => (
            3.0 * (p[5] * p[3] - p[4] * p[4]),
            -3.0 * quintic_triple_sum(v, |_, sq| sq) / 100.0,
        ),
        CyclicIdentity::QuinticCombined => (
            3.0 * (p[5] * p[3] - p[4] * p[4]) + p[1] * p[3] - p[4],
            quintic_triple_sum(v, |pairs, sq| pairs - 3.0 * sq) / 100.0,
        ),
    };
    Ok((lhs, rhs))
}

/// |LHS - RHS| of the tagged identity.
pub fn cyclic_identity_residual(id: CyclicIdentity, kappa: &KappaVector) -> Result<f64> {
    let (lhs, rhs) = cyclic_identity_sides(id, kappa)?;
    Ok((lhs - rhs).abs())
}

/// Sum over all splittings {a,b} | {c,d} of four indices of
/// f(kappa_a kappa_b) * (kappa_c - kappa_d)^2. Six distinct terms.
fn quartic_sum(v: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let mut total = 0.0;
    for c in 0..4 {
        for d in (c + 1)..4 {
            let (a, b) = complement2(c, d);
            let diff = v[c] - v[d];
            total += f(v[a] * v[b]) * diff * diff;
        }
    }
    total
}

/// Sum over pairs {c,d} and pairs {a,b} drawn from the remaining three
/// indices of kappa_a kappa_b (kappa_c - kappa_d)^2. Thirty terms.
fn quintic_pair_sum(v: &[f64]) -> f64 {
    let mut total = 0.0;
    for c in 0..5 {
        for d in (c + 1)..5 {
            let diff = v[c] - v[d];
            let rest: Vec<usize> = (0..5).filter(|&i| i != c && i != d).collect();
            for x in 0..3 {
                for y in (x + 1)..3 {
                    total += v[rest[x]] * v[rest[y]] * diff * diff;
                }
            }
        }
    }
    total
}

/// Sum over pairs {d,e} of f(pair-sum of complement, squared triple
/// product of complement) * (kappa_d - kappa_e)^2. Ten terms.
fn quintic_triple_sum(v: &[f64], f: impl Fn(f64, f64) -> f64) -> f64 {
    let mut total = 0.0;
    for d in 0..5 {
        for e in (d + 1)..5 {
            let diff = v[d] - v[e];
            let rest: Vec<usize> = (0..5).filter(|&i| i != d && i != e).collect();
            let (a, b, c) = (v[rest[0]], v[rest[1]], v[rest[2]]);
            let pairs = a * b + b * c + a * c;
            let triple = a * b * c;
            total += f(pairs, triple * triple) * diff * diff;
        }
    }
    total
}

fn complement2(c: usize, d: usize) -> (usize, usize) {
    let mut it = (0..4).filter(|&i| i != c && i != d);
    (it.next().unwrap(), it.next().unwrap())
}
