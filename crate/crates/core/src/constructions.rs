//! Generators for the explicit extremal constructions.
//!
//! Each generator returns the sets, the forbidden relation, the value the
//! construction is claimed to attain, the auxiliary objects used to build it
//! (removed sum blocks, target sets, witnesses), and an audit that evaluates
//! the restricted sumset and checks the degree regime.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ops::restricted_sumset;
use crate::rational::Rational;
use crate::relation::{Relation, RelationConstraint};
use crate::sets::{AdditiveSet, IntegerSet, Prime, ResidueSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Corner,
    ZGap,
    FpFunction,
    FpMatching,
    FpUnbalanced,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Corner => "corner",
            Family::ZGap => "zgap",
            Family::FpFunction => "fpfun",
            Family::FpMatching => "fpmatch",
            Family::FpUnbalanced => "fpunb",
        }
    }
}

/// The pair of sets of a construction, in whichever universe it lives.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "universe", rename_all = "snake_case")]
pub enum Instance {
    Integer {
        #[serde(rename = "A")]
        a: IntegerSet,
        #[serde(rename = "B")]
        b: IntegerSet,
    },
    Residue {
        #[serde(rename = "A")]
        a: ResidueSet,
        #[serde(rename = "B")]
        b: ResidueSet,
    },
}

impl Instance {
    pub fn sizes(&self) -> (usize, usize) {
        match self {
            Instance::Integer { a, b } => (a.len(), b.len()),
            Instance::Residue { a, b } => (a.len(), b.len()),
        }
    }

    pub fn restricted_elements(&self, r: &Relation) -> Result<Vec<i64>> {
        Ok(match self {
            Instance::Integer { a, b } => restricted_sumset(a, b, r)?.elements(),
            Instance::Residue { a, b } => restricted_sumset(a, b, r)?.elements(),
        })
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            Instance::Integer { .. } => None,
            Instance::Residue { a, .. } => Some(a.p()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DegreeExcess {
    pub element: i64,
    pub degree: usize,
}

/// Evaluation of a generated construction against its claims.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AuditReport {
    pub constraint: RelationConstraint,
    pub max_degree_a: usize,
    pub max_degree_b: usize,
    pub degree_ok: bool,
    /// Elements whose degree exceeds the bound (B side first, then A side).
    pub violations: Vec<DegreeExcess>,
    pub evaluated_value: usize,
    pub predicted_value: usize,
    pub value_matches: bool,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstructionOutput {
    pub family: Family,
    pub params: BTreeMap<String, String>,
    #[serde(flatten)]
    pub instance: Instance,
    #[serde(rename = "R")]
    pub relation: Relation,
    pub predicted_value: usize,
    pub auxiliary: BTreeMap<String, Vec<i64>>,
    pub audit_report: AuditReport,
}

impl ConstructionOutput {
    pub fn evaluated_value(&self) -> usize {
        self.audit_report.evaluated_value
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

#[allow(clippy::too_many_arguments)]
fn build(
    family: Family,
    params: Vec<(&str, String)>,
    instance: Instance,
    relation: Relation,
    constraint: RelationConstraint,
    predicted_value: usize,
    auxiliary: Vec<(&str, Vec<i64>)>,
    mut checks: Vec<Check>,
) -> Result<ConstructionOutput> {
    let (max_degree_a, max_degree_b) = relation.degree_profile();
    let mut violations: Vec<DegreeExcess> = relation
        .degrees_b()
        .into_iter()
        .filter(|&(_, d)| d > constraint.cap_b())
        .map(|(element, degree)| DegreeExcess { element, degree })
        .collect();
    if let Some(cap) = constraint.cap_a() {
        violations.extend(
            relation
                .degrees_a()
                .into_iter()
                .filter(|&(_, d)| d > cap)
                .map(|(element, degree)| DegreeExcess { element, degree }),
        );
    }
    let restricted = instance.restricted_elements(&relation)?;
    let evaluated_value = restricted.len();
    if let Some(p) = instance.modulus() {
        if matches!(family, Family::FpMatching | Family::FpUnbalanced) {
            let target = ResidueSet::new(Prime::new(p)?, [-2, -1, 2]).complement();
            checks.push(Check {
                name: "restricted sumset equals F_p minus {-2,-1,2}".into(),
                holds: restricted == target.elements(),
            });
        }
    }
    let degree_ok = violations.is_empty();
    let value_matches = evaluated_value == predicted_value;
    let passed = degree_ok && value_matches && checks.iter().all(|c| c.holds);
    Ok(ConstructionOutput {
        family,
        params: params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        instance,
        relation,
        predicted_value,
        auxiliary: auxiliary
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        audit_report: AuditReport {
            constraint,
            max_degree_a,
            max_degree_b,
            degree_ok,
            violations,
            evaluated_value,
            predicted_value,
            value_matches,
            checks,
            passed,
        },
    })
}

/// Forbid every pair whose sum lands in `blocked`.
fn pairs_with_sum_in<S: AdditiveSet>(a: &S, b: &S, blocked: impl Fn(i64) -> bool) -> Relation {
    let eb = b.elements();
    a.elements()
        .into_iter()
        .flat_map(|x| eb.iter().map(move |&y| (x, y)))
        .filter(|&(x, y)| blocked(a.add(x, y)))
        .collect()
}

/// `A = B = {1..n}` with the `D x D` corners at both ends forbidden.
/// Attains `2n - 1 - 2D` with degree `D` on both sides.
pub fn construct_interval_corner(n: i64, d: i64) -> Result<ConstructionOutput> {
    if d < 1 || n < 2 * d {
        return Err(invalid(format!("corner needs n >= 2D >= 2, got n={n}, D={d}")));
    }
    let a = IntegerSet::range(1, n);
    let low = 1..=d;
    let high = n - d + 1..=n;
    let relation: Relation = low
        .clone()
        .flat_map(|x| low.clone().map(move |y| (x, y)))
        .chain(high.clone().flat_map(|x| high.clone().map(move |y| (x, y))))
        .collect();
    build(
        Family::Corner,
        vec![("n", n.to_string()), ("d", d.to_string())],
        Instance::Integer { a: a.clone(), b: a },
        relation,
        RelationConstraint::DegreeBoth(d as usize),
        (2 * n - 1 - 2 * d) as usize,
        vec![("expectedSumset", (d + 2..=2 * n - d).collect())],
        vec![],
    )
}

/// Interval `B = {1..n}` against `A` with a gap of width `floor(D/2)` cut
/// below its top `D` elements; the sum blocks `C` (from the gap) and `D`
/// (both ends of `A + B`) are removed.
///
/// The degree bound on B is audited rather than assumed: for small `n`
/// (e.g. `n = 4, D = 2`) a translate `A + b` meets `C u D` in more than `D`
/// points.
pub fn construct_z_gap(n: i64, d: i64) -> Result<ConstructionOutput> {
    if d < 1 || n < 2 * d {
        return Err(invalid(format!("zgap needs n >= 2D >= 2, got n={n}, D={d}")));
    }
    let r = d / 2;
    let a = IntegerSet::new((1..=n - d).chain(n - d + r + 1..=n + r));
    let b = IntegerSet::range(1, n);
    let c_block: Vec<i64> = (n - d + 2..=n - d + r + 1)
        .chain(2 * n - d + 1..=2 * n - d + r)
        .collect();
    let d_block: Vec<i64> = (2..=d + 1).chain(2 * n + r - d + 1..=2 * n + r).collect();
    let removed = IntegerSet::new(c_block.iter().chain(&d_block).copied());
    let relation = pairs_with_sum_in(&a, &b, |s| removed.contains(s));
    let disjoint = c_block.iter().all(|x| !d_block.contains(x));
    build(
        Family::ZGap,
        vec![("n", n.to_string()), ("d", d.to_string()), ("r", r.to_string())],
        Instance::Integer { a, b },
        relation,
        RelationConstraint::DegreeOnB(d as usize),
        (2 * n - 1 - (5 * d) / 2) as usize,
        vec![("C", c_block), ("Dblock", d_block)],
        vec![Check {
            name: "C and D blocks are disjoint".into(),
            holds: disjoint,
        }],
    )
}

/// Largest admissible `ell` for [`construct_fp_function`].
pub fn fp_function_max_ell(p: u64, k: i64) -> i64 {
    let top = p as i64 - k - 1;
    if top < 0 {
        return 0;
    }
    top / (2 * k - 1)
}

/// A function `B -> A` hitting every translate `A + b` in the block
/// `C = {0..k-1}`, so that `C` is avoided and `|A +_R B| = p - k`.
pub fn construct_fp_function(p: u64, k: i64, ell: i64) -> Result<ConstructionOutput> {
    let prime = Prime::new(p)?;
    if k < 1 {
        return Err(invalid("fpfun needs k >= 1"));
    }
    let max_ell = fp_function_max_ell(p, k);
    if ell < 1 || ell > max_ell {
        return Err(invalid(format!(
            "fpfun needs 1 <= ell <= {max_ell} for p={p}, k={k}, got {ell}"
        )));
    }
    let pi = p as i64;
    let a = ResidueSet::new(prime, (0..=ell).map(|i| i * k).chain((ell + 1) * k..pi));
    let b = ResidueSet::new(prime, (0..=ell * k + 1).map(|i| -i));
    let in_block = |s: i64| s < k;
    let relation = pairs_with_sum_in(&a, &b, in_block);
    let singleton = b.iter().all(|y| {
        a.iter().filter(|&x| in_block(a.add(x, y))).count() == 1
    });
    let size_a = pi - (k - 1) * ell - k + 1;
    let size_b = k * ell + 2;
    let sizes_ok = a.len() as i64 == size_a && b.len() as i64 == size_b;
    build(
        Family::FpFunction,
        vec![("p", p.to_string()), ("k", k.to_string()), ("ell", ell.to_string())],
        Instance::Residue { a, b },
        relation,
        RelationConstraint::FunctionBtoA,
        (pi - k) as usize,
        vec![("C", (0..k).collect())],
        vec![
            Check {
                name: "every translate A+b meets C exactly once".into(),
                holds: singleton,
            },
            Check {
                name: format!("|A| = {size_a} and |B| = {size_b}"),
                holds: sizes_ok,
            },
        ],
    )
}

const PATTERN: [i64; 6] = [0, 1, 2, 3, 5, 6];

/// The period-11 block set in Z: `{0,1,2,3,5,6} + 11*{shifts}` plus `extra`.
fn block_set(shifts: impl Iterator<Item = i64>, extra: [i64; 3]) -> Vec<i64> {
    let mut v: Vec<i64> = shifts.flat_map(|s| PATTERN.map(|c| c + 11 * s)).collect();
    v.extend(extra);
    v
}

/// The two families of matched pairs that kill the sums `-2, -1, 2`.
fn block_relation(first: std::ops::RangeInclusive<i64>, second: std::ops::RangeInclusive<i64>) -> Vec<(i64, i64)> {
    let mut r = Vec::new();
    for i in first {
        r.extend([
            (11 * i, -11 * i + 2),
            (11 * i + 1, -11 * i + 1),
            (11 * i + 2, -11 * i),
        ]);
    }
    for i in second {
        r.extend([
            (11 * i + 3, -11 * (i + 1) + 6),
            (11 * i + 5, -11 * (i + 1) + 5),
            (11 * i + 6, -11 * (i + 1) + 3),
        ]);
    }
    r
}

/// The even-parity block set with parameter `t` and its relation, in Z.
fn even_blocks(t: i64) -> (Vec<i64>, Vec<(i64, i64)>) {
    (
        block_set(-(t - 1)..=t - 1, [-11 * t + 3, -11 * t + 5, -11 * t + 6]),
        block_relation(-t + 1..=t - 1, -t..=t - 1),
    )
}

/// A symmetric matching on `A` with `|A| = 6 floor(p/11) - 3` and
/// `A +_R A = F_p \ {-2, -1, 2}`.
pub fn construct_fp_matching(p: u64) -> Result<ConstructionOutput> {
    let prime = Prime::new(p)?;
    if p < 23 {
        return Err(invalid(format!("fpmatch needs p >= 23, got {p}")));
    }
    let q = (p / 11) as i64;
    let (set, pairs) = if q % 2 == 0 {
        even_blocks(q / 2)
    } else {
        let t = q / 2;
        (
            block_set(-t..=t - 1, [11 * t, 11 * t + 1, 11 * t + 2]),
            block_relation(-t..=t, -t..=t - 1),
        )
    };
    let a = ResidueSet::new(prime, set);
    let relation = Relation::new(pairs).canonicalized(&a);
    let expected_size = 6 * q - 3;
    let checks = vec![
        Check {
            name: format!("|A| = 6*floor(p/11) - 3 = {expected_size}"),
            holds: a.len() as i64 == expected_size,
        },
        Check {
            name: "relation is symmetric".into(),
            holds: relation.is_symmetric(),
        },
    ];
    build(
        Family::FpMatching,
        vec![("p", p.to_string()), ("parity", if q % 2 == 0 { "even" } else { "odd" }.into())],
        Instance::Residue { a: a.clone(), b: a },
        relation,
        RelationConstraint::MatchingBtoA,
        (p - 3) as usize,
        vec![("avoided", ResidueSet::new(prime, [-2, -1, 2]).elements())],
        checks,
    )
}

/// Slack constant `c` for the size bound `|A| + |B| > (1 + eps/6) p - c`.
pub const UNBALANCED_SLACK: i64 = 8;

/// Small `B` (the even block set with `t = floor(eps p / 12)`) against
/// `A = B u [11t, p - 11t - 1]`, matched so that `A +_R B = F_p \ {-2,-1,2}`.
pub fn construct_fp_unbalanced(p: u64, eps: Rational) -> Result<ConstructionOutput> {
    let prime = Prime::new(p)?;
    let zero = Rational::from_integer(0);
    if eps <= zero || eps > Rational::new(6, 11) {
        return Err(invalid(format!("fpunb needs 0 < eps <= 6/11, got {eps}")));
    }
    let pi = p as i64;
    let t = (*eps.numer() * pi) / (12 * *eps.denom());
    if t < 1 {
        return Err(invalid(format!("fpunb needs floor(eps*p/12) >= 1, got t=0 for p={p}")));
    }
    let (bset, pairs) = even_blocks(t);
    let b = ResidueSet::new(prime, bset);
    let a = b.union(&ResidueSet::new(prime, 11 * t..pi - 11 * t));
    let relation = Relation::new(pairs).canonicalized(&a);
    let (na, nb) = (a.len() as i64, b.len() as i64);
    let p_rat = Rational::from_integer(pi);
    let deficit = (Rational::from_integer(1) + eps / 6) * p_rat - Rational::from_integer(na + nb);
    let checks = vec![
        Check {
            name: "|B| <= eps*p".into(),
            holds: Rational::from_integer(nb) <= eps * p_rat,
        },
        Check {
            name: format!("|A|+|B| > (1+eps/6)p - {UNBALANCED_SLACK}"),
            holds: deficit < Rational::from_integer(UNBALANCED_SLACK),
        },
    ];
    build(
        Family::FpUnbalanced,
        vec![
            ("p", p.to_string()),
            ("eps", eps.to_string()),
            ("t", t.to_string()),
            ("sizeDeficit", deficit.to_string()),
            ("slack", UNBALANCED_SLACK.to_string()),
        ],
        Instance::Residue { a, b },
        relation,
        RelationConstraint::MatchingBtoA,
        (p - 3) as usize,
        vec![("avoided", ResidueSet::new(prime, [-2, -1, 2]).elements())],
        checks,
    )
}

/// Translate offsets `x` with `({0,1,4} + x) n P = {c}` for each residue class `c`.
const PATTERN_WITNESS: [(i64, i64); 6] = [(0, -4), (1, -3), (2, -2), (3, 3), (5, 4), (6, 6)];

/// Membership in the periodic set `{0,1,2,3,5,6} + 11Z`.
pub fn in_periodic_pattern(x: i64) -> bool {
    PATTERN.contains(&x.rem_euclid(11))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternWindow {
    pub set: IntegerSet,
    /// member -> translate `x` isolating it.
    pub witnesses: BTreeMap<i64, i64>,
}

impl PatternWindow {
    /// Each witness translate of `{0,1,4}` meets the periodic set in exactly its member.
    pub fn validate(&self) -> bool {
        self.witnesses.iter().all(|(&a, &x)| {
            let hits: Vec<i64> = [0, 1, 4].map(|c| c + x).into_iter().filter(|&y| in_periodic_pattern(y)).collect();
            hits == vec![a]
        })
    }
}

/// `({0,1,2,3,5,6} + 11Z) n [0, L)` with isolating translates of `{0,1,4}`.
pub fn pattern_window(len: i64) -> Result<PatternWindow> {
    if len < 11 {
        return Err(invalid(format!("pattern window needs L >= 11, got {len}")));
    }
    let set = IntegerSet::new((0..len).filter(|&x| in_periodic_pattern(x)));
    let witnesses = set
        .as_slice()
        .iter()
        .map(|&a| {
            let class = a.rem_euclid(11);
            let offset = PATTERN_WITNESS.iter().find(|(c, _)| *c == class).expect("member").1;
            (a, a - class + offset)
        })
        .collect();
    Ok(PatternWindow { set, witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_examples() {
        let out = construct_interval_corner(4, 1).unwrap();
        assert_eq!(out.evaluated_value(), 5);
        let Instance::Integer { a, b } = &out.instance else { panic!() };
        assert_eq!(
            crate::ops::restricted_sumset(a, b, &out.relation).unwrap(),
            IntegerSet::range(3, 7)
        );
        assert_eq!(construct_interval_corner(2, 1).unwrap().evaluated_value(), 1);
        let out = construct_interval_corner(10, 3).unwrap();
        assert_eq!(out.evaluated_value(), 13);
        assert!(out.audit_report.passed);
        assert!(construct_interval_corner(3, 2).is_err());
    }

    #[test]
    fn z_gap_examples() {
        let out = construct_z_gap(10, 2).unwrap();
        let Instance::Integer { a, b } = &out.instance else { panic!() };
        assert_eq!(a, &IntegerSet::new([1, 2, 3, 4, 5, 6, 7, 8, 10, 11]));
        assert_eq!(b, &IntegerSet::range(1, 10));
        assert_eq!(out.evaluated_value(), 14);
        assert!(out.audit_report.value_matches);
        // b = 9 meets both C-blocks and the top D-block: 1+9, 10+9, 11+9
        assert_eq!(out.audit_report.violations, vec![DegreeExcess { element: 9, degree: 3 }]);

        for n in [7, 10, 20] {
            assert!(construct_z_gap(n, 3).unwrap().audit_report.passed, "n={n}");
        }

        for n in 2..12 {
            let out = construct_z_gap(n, 1).unwrap();
            assert!(out.auxiliary["C"].is_empty());
            assert_eq!(out.predicted_value, (2 * n - 3) as usize);
            assert!(out.audit_report.passed, "n={n}");
        }
    }

    #[test]
    fn z_gap_audit_flags_small_n() {
        let out = construct_z_gap(4, 2).unwrap();
        let audit = &out.audit_report;
        assert!(!audit.degree_ok);
        assert!(!audit.passed);
        assert_eq!(audit.violations[0], DegreeExcess { element: 2, degree: 3 });
    }

    #[test]
    fn fp_function_examples() {
        let out = construct_fp_function(7, 2, 1).unwrap();
        let Instance::Residue { a, b } = &out.instance else { panic!() };
        assert_eq!(a.elements(), vec![0, 2, 4, 5, 6]);
        assert_eq!(b.elements(), vec![0, 4, 5, 6]);
        assert_eq!(out.evaluated_value(), 5);
        assert!(out.audit_report.passed);

        let out = construct_fp_function(13, 1, 3).unwrap();
        assert_eq!(out.auxiliary["C"], vec![0]);
        assert_eq!(out.predicted_value, 12);
        assert_eq!(out.evaluated_value(), 12);

        let out = construct_fp_function(13, 2, 3).unwrap();
        assert_eq!(out.instance.sizes(), (13 - 3 - 2 + 1, 2 * 3 + 2));
        assert_eq!(out.evaluated_value(), 11);
        assert!(construct_fp_function(13, 2, 4).is_err());
        assert!(construct_fp_function(12, 2, 1).is_err());
    }

    #[test]
    fn fp_matching_examples() {
        let out = construct_fp_matching(23).unwrap();
        let Instance::Residue { a, .. } = &out.instance else { panic!() };
        assert_eq!(a.elements(), vec![0, 1, 2, 3, 5, 6, 15, 17, 18]);
        assert_eq!(out.relation.len(), 9);
        assert_eq!(out.relation.degree_profile(), (1, 1));
        assert!(out.relation.is_symmetric());
        // 14 = -9 has no representation in A + A at all, so p - 3 is out of reach
        assert!(!crate::ops::sumset(a, a).unwrap().contains(14));
        let restricted = out.instance.restricted_elements(&out.relation).unwrap();
        assert!([2, 21, 22].iter().all(|x| !restricted.contains(x)));
        assert_eq!(out.evaluated_value(), 19);
        assert!(!out.audit_report.passed);

        let out = construct_fp_matching(37).unwrap();
        assert_eq!(out.params["parity"], "odd");
        assert_eq!(out.instance.sizes().0, 15);
        assert_eq!(out.evaluated_value(), 34);
        assert!(out.audit_report.passed);
        assert!(construct_fp_matching(19).is_err());
    }

    #[test]
    fn fp_unbalanced_examples() {
        let out = construct_fp_unbalanced(1009, Rational::new(1, 2)).unwrap();
        assert_eq!(out.params["t"], "42");
        assert_eq!(out.evaluated_value(), 1006);
        assert!(out.audit_report.passed, "{:?}", out.audit_report);
        let out = construct_fp_unbalanced(1013, Rational::new(6, 11)).unwrap();
        assert!(out.audit_report.checks[0].holds);
        assert!(out.audit_report.passed);
        assert!(construct_fp_unbalanced(1013, Rational::new(7, 11)).is_err());
        assert!(construct_fp_unbalanced(23, Rational::new(1, 4)).is_err());
    }

    #[test]
    fn pattern_window_examples() {
        let w = pattern_window(11).unwrap();
        assert_eq!(w.set, IntegerSet::new([0, 1, 2, 3, 5, 6]));
        assert_eq!(w.witnesses[&0], -4);
        let w = pattern_window(22).unwrap();
        assert_eq!(w.set.len(), 12);
        assert!(w.validate());
        assert!(pattern_window(200).unwrap().validate());
        assert!(pattern_window(10).is_err());
    }
}
