//! Exact minimisation of `|A +_R B|` over degree-constrained relations.
//!
//! Write `F(R)` for the sums all of whose representations are forbidden, so
//! `A +_R B = (A + B) \ F(R)`. Every pair with sum in `F(R)` lies in `R`, hence
//! `forced_pairs(F(R))` obeys the same degree caps as `R`. Conversely
//! `R = forced_pairs(F)` removes exactly `F`. So the minimum over relations is
//! `|A + B|` minus the largest `F` whose forced pairs respect the caps, and
//! that family of `F` is closed under taking subsets.

mod scan;

pub use scan::*;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ops::sumset;
use crate::relation::{Relation, RelationConstraint};
use crate::sets::AdditiveSet;

/// Default node budget for a single instance.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// `{(a, b) in A x B : a + b in F}`.
pub fn forced_pairs<S: AdditiveSet>(a: &S, b: &S, f: &S) -> Result<Relation> {
    let full = sumset(a, b)?;
    if let Some(x) = f.elements().into_iter().find(|&x| !full.contains(x)) {
        return Err(Error::NotSubset(format!("{x} is not in A + B")));
    }
    let eb = b.elements();
    Ok(a.elements()
        .into_iter()
        .flat_map(|x| eb.iter().map(move |&y| (x, y)))
        .filter(|&(x, y)| f.contains(a.add(x, y)))
        .collect())
}

/// Whether the forced pairs of `F` respect the constraint's degree caps.
pub fn feasible<S: AdditiveSet>(a: &S, b: &S, f: &S, c: RelationConstraint) -> Result<bool> {
    Ok(c.admits(&forced_pairs(a, b, f)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AvoidingSet {
    pub f: Vec<i64>,
    pub forced: Relation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchResult {
    pub min_value: usize,
    pub sumset_size: usize,
    pub avoiding: Vec<i64>,
    #[serde(rename = "witnessR")]
    pub witness_r: Relation,
    /// Whether `witness_r` is a total map on B (only relevant for function/matching).
    pub total: bool,
    pub optimal: bool,
    pub nodes_explored: u64,
    pub budget_exhausted: bool,
}

/// Index form of an instance: sums sorted by representation count, each with
/// the `(a, b)` index pairs representing it.
struct Problem {
    sums: Vec<i64>,
    reps: Vec<Vec<(u32, u32)>>,
    /// `weight_prefix[i]` = total representations of the first `i` sums.
    weight_prefix: Vec<usize>,
    n_a: usize,
    n_b: usize,
    cap_a: Option<usize>,
    cap_b: usize,
}

impl Problem {
    fn new<S: AdditiveSet>(a: &S, b: &S, c: RelationConstraint) -> Problem {
        let ea = a.elements();
        let eb = b.elements();
        let mut by_sum: std::collections::BTreeMap<i64, Vec<(u32, u32)>> = Default::default();
        for (i, &x) in ea.iter().enumerate() {
            for (j, &y) in eb.iter().enumerate() {
                by_sum.entry(a.add(x, y)).or_default().push((i as u32, j as u32));
            }
        }
        let mut entries: Vec<(i64, Vec<(u32, u32)>)> = by_sum.into_iter().collect();
        entries.sort_by_key(|(s, r)| (r.len(), *s));
        let mut weight_prefix = vec![0];
        for (_, r) in &entries {
            weight_prefix.push(weight_prefix.last().unwrap() + r.len());
        }
        let (sums, reps) = entries.into_iter().unzip();
        Problem {
            sums,
            reps,
            weight_prefix,
            n_a: ea.len(),
            n_b: eb.len(),
            cap_a: c.cap_a(),
            cap_b: c.cap_b(),
        }
    }

    /// Most sums from `from..` that fit in `capacity` representations.
    fn fit(&self, from: usize, capacity: usize) -> usize {
        let base = self.weight_prefix[from];
        // weights ascend, so the cheapest `q` sums are the first `q`
        let tail = &self.weight_prefix[from..];
        tail.partition_point(|&w| w - base <= capacity) - 1
    }
}

struct Dfs<'a> {
    pr: &'a Problem,
    deg_a: Vec<usize>,
    deg_b: Vec<usize>,
    used_b: usize,
    used_a: usize,
    cur: Vec<usize>,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Dfs<'_> {
    fn addable(&self, i: usize) -> bool {
        self.pr.reps[i].iter().all(|&(x, y)| {
            self.deg_b[y as usize] < self.pr.cap_b
                && self.pr.cap_a.is_none_or(|cap| self.deg_a[x as usize] < cap)
        })
    }

    fn apply(&mut self, i: usize, delta: isize) {
        for &(x, y) in &self.pr.reps[i] {
            self.deg_a[x as usize] = (self.deg_a[x as usize] as isize + delta) as usize;
            self.deg_b[y as usize] = (self.deg_b[y as usize] as isize + delta) as usize;
        }
        let w = self.pr.reps[i].len();
        if delta > 0 {
            self.used_a += w;
            self.used_b += w;
        } else {
            self.used_a -= w;
            self.used_b -= w;
        }
    }

    fn bound(&self, from: usize) -> usize {
        let cap_b = self.pr.cap_b * self.pr.n_b - self.used_b;
        let mut q = self.pr.fit(from, cap_b);
        if let Some(cap) = self.pr.cap_a {
            q = q.min(self.pr.fit(from, cap * self.pr.n_a - self.used_a));
        }
        q
    }

    fn run(&mut self, start: usize) {
        self.nodes += 1;
        if self.cur.len() > self.best.len() {
            self.best = self.cur.clone();
        }
        let s = self.pr.sums.len();
        for i in start..s {
            if self.nodes >= self.budget {
                self.exhausted = true;
                return;
            }
            if self.cur.len() + (s - i) <= self.best.len()
                || self.cur.len() + self.bound(i) <= self.best.len()
            {
                return;
            }
            if self.addable(i) {
                self.apply(i, 1);
                self.cur.push(i);
                self.run(i + 1);
                self.cur.pop();
                self.apply(i, -1);
                if self.exhausted {
                    return;
                }
            }
        }
    }
}

/// Largest `F` whose forced pairs respect `c`, by depth-first branch and bound
/// over sums ordered by representation count. `optimal` is false when the node
/// budget ran out, in which case `F` is the best found.
pub fn max_avoiding_set<S: AdditiveSet>(
    a: &S,
    b: &S,
    c: RelationConstraint,
    budget: u64,
) -> Result<(AvoidingSet, bool, u64)> {
    sumset(a, b)?;
    let pr = Problem::new(a, b, c);
    let mut dfs = Dfs {
        pr: &pr,
        deg_a: vec![0; pr.n_a],
        deg_b: vec![0; pr.n_b],
        used_a: 0,
        used_b: 0,
        cur: Vec::new(),
        best: Vec::new(),
        nodes: 0,
        budget: budget.max(1),
        exhausted: false,
    };
    dfs.run(0);
    let mut f: Vec<i64> = dfs.best.iter().map(|&i| pr.sums[i]).collect();
    f.sort_unstable();
    let fs = a.with_elements(f.iter().copied());
    let forced = forced_pairs(a, b, &fs)?;
    Ok((AvoidingSet { f, forced }, !dfs.exhausted, dfs.nodes))
}

/// Extends a partial function (or matching) from B to A to a total one where
/// possible: each uncovered `b` takes the smallest admissible `a`.
fn extend_to_total<S: AdditiveSet>(a: &S, b: &S, r: &Relation, c: RelationConstraint) -> (Relation, bool) {
    let mut r = r.clone();
    let covered = r.degrees_b();
    let mut used_a = r.degrees_a();
    let ea = a.elements();
    let mut total = true;
    for y in b.elements() {
        if covered.contains_key(&y) {
            continue;
        }
        let pick = ea.iter().copied().find(|x| match c {
            RelationConstraint::MatchingBtoA => !used_a.contains_key(x),
            _ => true,
        });
        match pick {
            Some(x) => {
                r.insert(x, y);
                *used_a.entry(x).or_insert(0) += 1;
            }
            None => total = false,
        }
    }
    (r, total)
}

/// `min |A +_R B|` over relations obeying `c`, with a witness relation.
pub fn min_restricted_sumset<S: AdditiveSet>(
    a: &S,
    b: &S,
    c: RelationConstraint,
    budget: u64,
) -> Result<SearchResult> {
    let full = sumset(a, b)?.len();
    let (best, optimal, nodes) = max_avoiding_set(a, b, c, budget)?;
    let (witness_r, total) = if c.requires_total() {
        extend_to_total(a, b, &best.forced, c)
    } else {
        (best.forced.clone(), false)
    };
    debug_assert!(c.admits(&witness_r));
    Ok(SearchResult {
        min_value: full - best.f.len(),
        sumset_size: full,
        avoiding: best.f,
        witness_r,
        total,
        optimal,
        nodes_explored: nodes,
        budget_exhausted: !optimal,
    })
}

/// Accepts plain integers and scientific shorthand such as `1e7`.
pub fn parse_budget(text: &str) -> Result<u64> {
    let t = text.trim();
    let bad = || Error::Parse(format!("bad budget {t:?}"));
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    let (mant, exp) = t.split_once(['e', 'E']).ok_or_else(bad)?;
    let mant: u64 = mant.parse().map_err(|_| bad())?;
    let exp: u32 = exp.parse().map_err(|_| bad())?;
    10u64
        .checked_pow(exp)
        .and_then(|e| e.checked_mul(mant))
        .ok_or_else(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{construct_fp_function, construct_fp_matching, construct_z_gap, Instance};
    use crate::ops::restricted_sumset;
    use crate::sets::{IntegerSet, Prime, ResidueSet};

    fn zp(p: u64, e: &[i64]) -> ResidueSet {
        ResidueSet::from_elements(p, e.iter().copied()).unwrap()
    }

    #[test]
    fn forced_pair_examples() {
        let a = zp(7, &[0, 2, 4, 5, 6]);
        let b = zp(7, &[0, 4, 5, 6]);
        assert!(forced_pairs(&a, &b, &zp(7, &[])).unwrap().is_empty());
        let r = forced_pairs(&a, &b, &zp(7, &[0, 1])).unwrap();
        assert_eq!(r, Relation::new([(0, 0), (4, 4), (2, 5), (2, 6)]));
        assert_eq!(r.degree_profile().1, 1);
        let full = crate::ops::sumset(&a, &b).unwrap();
        assert_eq!(forced_pairs(&a, &b, &full).unwrap().len(), 20);
        assert!(forced_pairs(&IntegerSet::new([0]), &IntegerSet::new([0]), &IntegerSet::new([1])).is_err());
    }

    #[test]
    fn feasibility_examples() {
        let out = construct_fp_matching(23).unwrap();
        let Instance::Residue { a, .. } = out.instance else { panic!() };
        let c = RelationConstraint::MatchingBtoA;
        assert!(feasible(&a, &a, &zp(23, &[]), c).unwrap());
        let f = zp(23, &[2, 21, 22]);
        assert!(feasible(&a, &a, &f, c).unwrap());
        assert_eq!(forced_pairs(&a, &a, &f).unwrap(), out.relation);
        assert!(!feasible(&a, &a, &zp(23, &[2, 21, 22, 4]), c).unwrap());
    }

    #[test]
    fn max_avoiding_examples() {
        let a = IntegerSet::new([0, 1, 2]);
        let b = IntegerSet::new([0]);
        let (f, opt, _) = max_avoiding_set(&a, &b, RelationConstraint::FunctionBtoA, DEFAULT_BUDGET).unwrap();
        assert!(opt);
        assert_eq!(f.f.len(), 1);

        let a = zp(7, &[0, 2, 4, 5, 6]);
        let b = zp(7, &[0, 4, 5, 6]);
        let (f, opt, _) = max_avoiding_set(&a, &b, RelationConstraint::FunctionBtoA, DEFAULT_BUDGET).unwrap();
        assert!(opt);
        assert_eq!(f.f.len(), 2);

        let a = IntegerSet::new([0, 1, 3, 7]);
        let b = IntegerSet::new([0, 2, 5]);
        let (f, _, _) = max_avoiding_set(&a, &b, RelationConstraint::DegreeOnB(4), DEFAULT_BUDGET).unwrap();
        assert_eq!(f.f, crate::ops::sumset(&a, &b).unwrap().elements());
    }

    #[test]
    fn z_gap_instance_minimum() {
        let out = construct_z_gap(10, 2).unwrap();
        let Instance::Integer { a, b } = out.instance else { panic!() };
        let res = min_restricted_sumset(&a, &b, RelationConstraint::DegreeOnB(2), DEFAULT_BUDGET).unwrap();
        assert!(res.optimal);
        assert_eq!(res.min_value, 15);
        assert_eq!(restricted_sumset(&a, &b, &res.witness_r).unwrap().len(), 15);
        let res = min_restricted_sumset(&a, &b, RelationConstraint::DegreeOnB(3), DEFAULT_BUDGET).unwrap();
        assert!(res.min_value <= 14);
    }

    #[test]
    fn full_group_matching_regression() {
        let f7 = ResidueSet::full(Prime::new(7).unwrap());
        let res = min_restricted_sumset(&f7, &f7, RelationConstraint::MatchingBtoA, DEFAULT_BUDGET).unwrap();
        assert!(res.optimal && res.total);
        assert_eq!(res.min_value, 6);
        assert_eq!(res.witness_r.len(), 7);
        assert_eq!(restricted_sumset(&f7, &f7, &res.witness_r).unwrap().len(), 6);
    }

    #[test]
    fn fp_function_is_optimal_at_seven() {
        let out = construct_fp_function(7, 2, 1).unwrap();
        let Instance::Residue { a, b } = out.instance else { panic!() };
        let res = min_restricted_sumset(&a, &b, RelationConstraint::FunctionBtoA, DEFAULT_BUDGET).unwrap();
        assert_eq!(res.min_value, 5);
        assert!(res.total);
        assert_eq!(res.witness_r.len(), b.len());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let a = ResidueSet::new(Prime::new(31).unwrap(), 0..15);
        let res = min_restricted_sumset(&a, &a, RelationConstraint::DegreeOnB(2), 3).unwrap();
        assert!(!res.optimal && res.budget_exhausted);
        assert_eq!(parse_budget("1e7").unwrap(), 10_000_000);
        assert_eq!(parse_budget("250").unwrap(), 250);
        assert!(parse_budget("lots").is_err());
    }
}
