//! Counting identities for avoiding sets, the size threshold above which
//! `p - k + 1` sums survive, Sidon tests, and the constructive witness for the
//! lower bound over Z.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::relation::{Relation, RelationConstraint};
use crate::search::min_restricted_sumset;
use crate::sets::{reduce, AdditiveSet, IntegerSet, ResidueSet};

/// `r[i]` counts translates `x` with `|(F + x) n A| = i`, for `i = 0..=|F|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RProfile {
    pub k: usize,
    pub p: u64,
    pub r: Vec<usize>,
}

impl RProfile {
    /// `sum r_i = p`.
    pub fn total_holds(&self) -> bool {
        self.r.iter().sum::<usize>() as u64 == self.p
    }

    /// `sum i r_i = k |A|`.
    pub fn weighted_holds(&self, size_a: usize) -> bool {
        self.r.iter().enumerate().map(|(i, &c)| i * c).sum::<usize>() == self.k * size_a
    }

    /// `r_0 + .. + r_d`.
    pub fn at_most(&self, d: usize) -> usize {
        self.r.iter().take(d + 1).sum()
    }
}

pub fn r_profile(a: &ResidueSet, f: &ResidueSet) -> Result<RProfile> {
    a.check_compatible(f)?;
    if f.is_empty() {
        return Err(Error::EmptySet("F"));
    }
    let p = a.p();
    let k = f.len();
    let mut r = vec![0usize; k + 1];
    for x in 0..p as i64 {
        r[f.rotated(x).intersection_len(a)] += 1;
    }
    let profile = RProfile { k, p, r };
    assert!(profile.total_holds(), "translate counts must sum to p");
    assert!(profile.weighted_holds(a.len()), "weighted translate counts must equal k|A|");
    Ok(profile)
}

/// `{b : |(F - b) n A| <= d}`. Since `F - b = F + x` with `x = -b`, its size is
/// `r_0 + .. + r_d` of `r_profile(A, F)`.
pub fn candidate_b_set(a: &ResidueSet, f: &ResidueSet, d: usize) -> Result<ResidueSet> {
    a.check_compatible(f)?;
    let p = a.p() as i64;
    Ok(ResidueSet::new(
        a.modulus(),
        (0..p).filter(|&b| f.rotated(-b).intersection_len(a) <= d),
    ))
}

/// Sidon test on canonical residues: distinct elements have distinct differences.
pub fn is_sidon_elements(f: &[i64], p: u64) -> bool {
    let mut seen = vec![false; p as usize];
    for (i, &x) in f.iter().enumerate() {
        for &y in &f[i + 1..] {
            for d in [reduce(x - y, p), reduce(y - x, p)] {
                if seen[d as usize] {
                    return false;
                }
                seen[d as usize] = true;
            }
        }
    }
    true
}

pub fn is_sidon(f: &ResidueSet) -> bool {
    is_sidon_elements(&f.elements(), f.p())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceStep {
    pub claim: String,
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
}

fn step(claim: &str, lhs: i64, rhs: i64) -> TraceStep {
    TraceStep {
        claim: claim.to_string(),
        lhs,
        rhs,
        holds: lhs <= rhs,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SumBoundVerdict {
    pub k: u64,
    /// `floor(2kp / (2k - 1)) + 1`.
    pub threshold: u64,
    pub hypothesis_holds: bool,
    /// `|B| <= |A|`, which the counting argument uses but the statement omits.
    pub size_order_holds: bool,
    pub bound: i64,
    pub min_value: Option<usize>,
    pub optimal: bool,
    pub passes: bool,
    /// The counting chain evaluated on a `k`-subset of the optimal avoiding set,
    /// when one of size `>= k` exists (i.e. the bound fails).
    pub trace: Vec<TraceStep>,
}

/// If `|A| + |B| >= floor(2kp/(2k-1)) + 1`, checks `min |A +_R B| >= p - k + 1`
/// over functions `R: B -> A`. When the search finds a counterexample the trace
/// shows which inequality of the counting argument breaks.
pub fn sum_bound_check(a: &ResidueSet, b: &ResidueSet, k: u64, budget: u64) -> Result<SumBoundVerdict> {
    a.check_compatible(b)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let p = a.p();
    let threshold = 2 * k * p / (2 * k - 1) + 1;
    let (na, nb) = (a.len() as u64, b.len() as u64);
    let bound = p as i64 - k as i64 + 1;
    let hypothesis_holds = na + nb >= threshold;
    let mut verdict = SumBoundVerdict {
        k,
        threshold,
        hypothesis_holds,
        size_order_holds: nb <= na,
        bound,
        min_value: None,
        optimal: true,
        passes: true,
        trace: Vec::new(),
    };
    if !hypothesis_holds {
        return Ok(verdict);
    }
    let res = min_restricted_sumset(a, b, RelationConstraint::FunctionBtoA, budget)?;
    verdict.min_value = Some(res.min_value);
    verdict.optimal = res.optimal;
    verdict.passes = res.min_value as i64 >= bound;
    // avoided residues = complement of the restricted sumset
    let avoided: Vec<i64> = {
        let restricted = crate::ops::restricted_sumset(a, b, &res.witness_r)?;
        restricted.complement().elements()
    };
    if avoided.len() as u64 >= k {
        let f = ResidueSet::new(a.modulus(), avoided.into_iter().take(k as usize));
        let prof = r_profile(a, &f)?;
        let (k_i, p_i, na_i, nb_i) = (k as i64, p as i64, na as i64, nb as i64);
        let r01 = (prof.r[0] + prof.r.get(1).copied().unwrap_or(0)) as i64;
        let weighted: i64 = prof.r.iter().enumerate().map(|(i, &c)| (i * c) as i64).sum();
        verdict.trace = vec![
            step("k|A| = r_1 + 2r_2 + .. + kr_k", k_i * na_i, weighted),
            step("r_1 + .. + kr_k <= kp - (k-1)(r_0 + r_1)", weighted, k_i * p_i - (k_i - 1) * r01),
            step("|B| <= r_0 + r_1", nb_i, r01),
            // Needed to bound |B|/(2k-1) by |A|/(2k-1); the hypothesis does not provide it.
            step("|B| <= |A|", nb_i, na_i),
            step(
                "(2k-1)(|A| + |B|) <= 2kp",
                (2 * k_i - 1) * (na_i + nb_i),
                2 * k_i * p_i,
            ),
        ];
    }
    Ok(verdict)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum StaircaseCase {
    /// `d(a_1) <= D`: along `a_1 + B`, then `A + b_n`.
    LPath,
    /// `d(a_1) > D`: down `A + b_1` to the pivot `a_i`, along `a_i + B`, then `A + b_n`.
    Staircase { pivot_index: usize, pivot: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StaircaseWitness {
    pub d: usize,
    pub case: StaircaseCase,
    /// The `|A| + |B| - 1` pairs of the path, with strictly increasing sums.
    pub path: Vec<(i64, i64)>,
    /// Sums of path pairs not in `R`; all lie in `A +_R B`.
    pub elements: Vec<i64>,
    /// `|A| + |B| - 1 - 2D` on the L-path, `|A| + |B| - 3D` on the staircase.
    pub guaranteed: i64,
}

/// The monotone path argument behind `|A +_R B| >= |A| + |B| - 3D` over Z.
/// `d` defaults to the largest degree of `R` on B.
pub fn staircase_witness(a: &IntegerSet, b: &IntegerSet, r: &Relation, d: Option<usize>) -> Result<StaircaseWitness> {
    if a.is_empty() {
        return Err(Error::EmptySet("A"));
    }
    if b.is_empty() {
        return Err(Error::EmptySet("B"));
    }
    if b.len() > a.len() {
        return Err(Error::InvalidParameter("staircase needs |B| <= |A|".into()));
    }
    r.check_within(a, b)?;
    let max_b = r.degree_profile().1;
    let d = match d {
        Some(d) => {
            if let Some((element, degree)) = r.degrees_b().into_iter().find(|&(_, g)| g > d) {
                return Err(Error::DegreeViolation { element, degree, bound: d });
            }
            d
        }
        None => max_b,
    };
    let (ea, eb) = (a.as_slice(), b.as_slice());
    let (m, n) = (ea.len(), eb.len());
    let deg_a = r.degrees_a();
    let dega = |x: i64| deg_a.get(&x).copied().unwrap_or(0);
    let mut path = Vec::with_capacity(m + n - 1);
    let (case, guaranteed) = if dega(ea[0]) <= d {
        path.extend(eb.iter().map(|&y| (ea[0], y)));
        path.extend(ea[1..].iter().map(|&x| (x, eb[n - 1])));
        (StaircaseCase::LPath, (m + n) as i64 - 1 - 2 * d as i64)
    } else {
        let i = ea
            .iter()
            .position(|&x| dega(x) < d)
            .ok_or_else(|| Error::InvalidParameter("no element of A has degree below D".into()))?;
        path.extend(ea[..=i].iter().map(|&x| (x, eb[0])));
        path.extend(eb[1..].iter().map(|&y| (ea[i], y)));
        path.extend(ea[i + 1..].iter().map(|&x| (x, eb[n - 1])));
        (
            StaircaseCase::Staircase {
                pivot_index: i,
                pivot: ea[i],
            },
            (m + n) as i64 - 3 * d as i64,
        )
    };
    let elements = path
        .iter()
        .filter(|&&(x, y)| !r.contains(x, y))
        .map(|&(x, y)| x + y)
        .collect();
    Ok(StaircaseWitness {
        d,
        case,
        path,
        elements,
        guaranteed,
    })
}
