//! Dilation certificates that lift subsets of Z/pZ to Z while preserving
//! additive structure.
//!
//! Every certificate is a common dilation `x -> t x` followed by a cyclic cut
//! of Z/pZ: `f(x) = base + ((t x - start) mod p)`. Absence of a certificate
//! says nothing about rectifiability in general.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ops::{restricted_sumset, sumset};
use crate::relation::Relation;
use crate::sets::{least_abs_residue, reduce, AdditiveSet, IntegerSet, ResidueSet};

/// `x -> base + ((t x - start) mod p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CutMap {
    pub start: i64,
    pub base: i64,
}

impl CutMap {
    /// The least-absolute-residue view, landing in `(-p/2, p/2]`.
    pub fn least_abs(p: u64) -> CutMap {
        let p = p as i64;
        CutMap {
            start: (p + 1) / 2,
            base: -(p - 1) / 2,
        }
    }

    pub fn apply(self, p: u64, t: i64, x: i64) -> i64 {
        let tx = (x as i128 * t as i128).rem_euclid(p as i128) as i64;
        self.base + reduce(tx - self.start, p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "order", rename_all = "snake_case")]
pub enum CertificateKind {
    SingleSet,
    Pair,
    OrderK(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RectifyCertificate {
    pub p: u64,
    pub t: i64,
    pub kind: CertificateKind,
    pub map_a: CutMap,
    pub map_b: CutMap,
    pub image_a: IntegerSet,
    pub image_b: IntegerSet,
}

impl RectifyCertificate {
    pub fn f(&self, x: i64) -> i64 {
        self.map_a.apply(self.p, self.t, x)
    }

    pub fn g(&self, x: i64) -> i64 {
        self.map_b.apply(self.p, self.t, x)
    }
}

fn order_k_fits(p: u64, t: i64, x: &ResidueSet, k: usize) -> bool {
    x.iter().all(|e| {
        let v = least_abs_residue((e as i128 * t as i128).rem_euclid(p as i128) as i64, p);
        2 * k as i128 * (v.abs() as i128) <= p as i128
    })
}

/// Smallest unit `t` with every least absolute residue of `t X` inside
/// `[-p/(2k), p/(2k)]`, so that k-fold sums cannot wrap around.
pub fn find_rectifying_dilation_of_order(x: &ResidueSet, k: usize) -> Result<Option<RectifyCertificate>> {
    if x.is_empty() {
        return Err(Error::EmptySet("X"));
    }
    if k < 2 {
        return Err(Error::InvalidParameter("order must be at least 2".into()));
    }
    let p = x.p();
    let found = (1..p as i64)
        .into_par_iter()
        .find_first(|&t| order_k_fits(p, t, x, k));
    Ok(found.map(|t| {
        let map = CutMap::least_abs(p);
        let image = IntegerSet::new(x.iter().map(|e| map.apply(p, t, e)));
        RectifyCertificate {
            p,
            t,
            kind: if k == 2 {
                CertificateKind::SingleSet
            } else {
                CertificateKind::OrderK(k)
            },
            map_a: map,
            map_b: map,
            image_a: image.clone(),
            image_b: image,
        }
    }))
}

/// Smallest unit `t` with `t X` inside `[-p/4, p/4]` in least absolute residues.
/// Guaranteed to exist when `p > 4^|X|`.
pub fn find_rectifying_dilation(x: &ResidueSet) -> Result<Option<RectifyCertificate>> {
    find_rectifying_dilation_of_order(x, 2)
}

/// Shortest cyclic arc containing `x`: `(start, diameter)`.
fn shortest_arc(x: &ResidueSet) -> (i64, i64) {
    let e = x.elements();
    let p = x.p() as i64;
    let mut best = (e[0], 0i64);
    let mut max_gap = -1;
    for (i, &cur) in e.iter().enumerate() {
        let next = e[(i + 1) % e.len()];
        let gap = (next - cur).rem_euclid(p);
        let gap = if e.len() == 1 { p } else { gap };
        if gap > max_gap {
            max_gap = gap;
            best = (next, p - gap);
        }
    }
    best
}

/// Smallest dilation `t` after which `t A` and `t B` sit in cyclic arcs whose
/// diameters sum to less than `p`; cutting each arc at its start then gives
/// carry-free sums.
pub fn certify_rectifiable_pair(a: &ResidueSet, b: &ResidueSet) -> Result<Option<RectifyCertificate>> {
    a.check_compatible(b)?;
    if a.is_empty() {
        return Err(Error::EmptySet("A"));
    }
    if b.is_empty() {
        return Err(Error::EmptySet("B"));
    }
    let p = a.p();
    let arcs = |t: i64| -> Option<((i64, i64), (i64, i64))> {
        let da = crate::ops::dilate(a, t).ok()?;
        let db = crate::ops::dilate(b, t).ok()?;
        let (sa, la) = shortest_arc(&da);
        let (sb, lb) = shortest_arc(&db);
        (la + lb < p as i64).then_some(((sa, la), (sb, lb)))
    };
    let found = (1..p as i64)
        .into_par_iter()
        .find_first(|&t| arcs(t).is_some());
    Ok(found.map(|t| {
        let ((sa, _), (sb, _)) = arcs(t).expect("found");
        let map_a = CutMap { start: sa, base: 0 };
        let map_b = CutMap { start: sb, base: 0 };
        RectifyCertificate {
            p,
            t,
            kind: CertificateKind::Pair,
            map_a,
            map_b,
            image_a: IntegerSet::new(a.iter().map(|x| map_a.apply(p, t, x))),
            image_b: IntegerSet::new(b.iter().map(|x| map_b.apply(p, t, x))),
        }
    }))
}

/// `sum_s r(s)^2`, where `r(s)` counts tuples `(x, y_2, .., y_k)` with `x` from
/// `xs` and the rest from `ys` summing to `s` (reduced by `modulus` when given).
fn k_fold_energy(xs: &[i64], ys: &[i64], k: usize, modulus: Option<u64>) -> u128 {
    let norm = |v: i64| modulus.map_or(v, |p| reduce(v, p));
    let mut counts: HashMap<i64, u128> = xs.iter().map(|&x| (norm(x), 1)).collect();
    for _ in 1..k {
        let mut next: HashMap<i64, u128> = HashMap::new();
        for (&s, &c) in &counts {
            for &y in ys {
                *next.entry(norm(s + y)).or_insert(0) += c;
            }
        }
        counts = next;
    }
    counts.values().map(|c| c * c).sum()
}

/// Checks that the certificate maps `A` and `B` injectively onto its images and
/// preserves all sum equalities. Images sums can only merge residues that
/// already coincide mod p, so equal additive energies imply equal equality
/// patterns.
pub fn verify_certificate(a: &ResidueSet, b: &ResidueSet, cert: &RectifyCertificate) -> bool {
    if a.p() != cert.p || b.p() != cert.p {
        return false;
    }
    let fa: Vec<i64> = a.iter().map(|x| cert.f(x)).collect();
    let gb: Vec<i64> = b.iter().map(|x| cert.g(x)).collect();
    if IntegerSet::new(fa.clone()).len() != fa.len() || IntegerSet::new(gb.clone()).len() != gb.len() {
        return false;
    }
    let k = match cert.kind {
        CertificateKind::OrderK(k) => k,
        _ => 2,
    };
    if k > 2 && a != b {
        return false;
    }
    let ea = a.elements();
    let eb = b.elements();
    k_fold_energy(&ea, &eb, k, Some(cert.p)) == k_fold_energy(&fa, &gb, k, None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GreenRuzsaVerdict {
    #[serde(serialize_with = "crate::rational::ser_ratio")]
    pub doubling: Ratio<i64>,
    #[serde(serialize_with = "crate::rational::ser_ratio")]
    pub density: Ratio<i64>,
    /// `log(alpha) - log((16kK)^(-12K^2))`; non-positive when satisfied.
    pub log_margin: f64,
    pub exact: bool,
    pub satisfied: bool,
}

/// Exponent budget below which the comparison is done with exact big integers.
const EXACT_EXPONENT_LIMIT: u64 = 20_000;

/// Evaluates the hypothesis `alpha <= (16 k K)^(-12 K^2)` with `K = |A+A|/|A|`
/// and `alpha = |A|/p`. With `n = |A|`, `s = |A+A|` it is the integer inequality
/// `n^(n^2) (16 k s)^(12 s^2) <= p^(n^2) n^(12 s^2)`.
pub fn green_ruzsa_check(a: &ResidueSet, k: usize) -> Result<GreenRuzsaVerdict> {
    if k < 2 {
        return Err(Error::InvalidParameter("order k must be at least 2".into()));
    }
    let n = a.len() as u64;
    if n == 0 {
        return Err(Error::EmptySet("A"));
    }
    let s = sumset(a, a)?.len() as u64;
    let p = a.p();
    let big = 16 * k as u64 * s;
    let (e1, e2) = (n * n, 12 * s * s);
    let (nf, sf, pf, bigf) = (n as f64, s as f64, p as f64, big as f64);
    let log_margin = (nf.ln() - pf.ln()) + 12.0 * (sf / nf).powi(2) * (bigf.ln() - nf.ln());
    let exact = e1 + e2 <= EXACT_EXPONENT_LIMIT;
    let satisfied = if exact {
        let lhs = BigUint::from(n).pow(e1 as u32) * BigUint::from(big).pow(e2 as u32);
        let rhs = BigUint::from(p).pow(e1 as u32) * BigUint::from(n).pow(e2 as u32);
        lhs <= rhs
    } else {
        log_margin <= 0.0
    };
    Ok(GreenRuzsaVerdict {
        doubling: Ratio::new(s as i64, n as i64),
        density: Ratio::new(n as i64, p as i64),
        log_margin,
        exact,
        satisfied,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LiftedInstance {
    pub a: IntegerSet,
    pub b: IntegerSet,
    pub relation: Relation,
    pub restricted_size: usize,
}

/// Transports `(A, B, R)` to Z through the certificate and checks that the
/// restricted sumset keeps its size.
pub fn lift_instance(
    a: &ResidueSet,
    b: &ResidueSet,
    r: &Relation,
    cert: &RectifyCertificate,
) -> Result<LiftedInstance> {
    if !verify_certificate(a, b, cert) {
        return Err(Error::CertificateMismatch);
    }
    let r = r.canonicalized(a);
    r.check_within(a, b)?;
    let la = IntegerSet::new(a.iter().map(|x| cert.f(x)));
    let lb = IntegerSet::new(b.iter().map(|x| cert.g(x)));
    let lr = r.map(|x| cert.f(x), |y| cert.g(y));
    let before = restricted_sumset(a, b, &r)?.len();
    let after = restricted_sumset(&la, &lb, &lr)?.len();
    if before != after {
        return Err(Error::CertificateMismatch);
    }
    Ok(LiftedInstance {
        a: la,
        b: lb,
        relation: lr,
        restricted_size: after,
    })
}
