//! Forbidden-pair relations and the degree regimes they are held to.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::AdditiveSet;

/// A set of forbidden pairs `(a, b)` with `a` drawn from A and `b` from B.
///
/// Degrees are recomputed from the pair set, so they can never drift out of
/// sync with it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<(i64, i64)>", into = "Vec<(i64, i64)>")]
pub struct Relation {
    pairs: BTreeSet<(i64, i64)>,
}

impl Relation {
    pub fn new<I: IntoIterator<Item = (i64, i64)>>(pairs: I) -> Self {
        Relation {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, a: i64, b: i64) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn insert(&mut self, a: i64, b: i64) -> bool {
        self.pairs.insert((a, b))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn pairs(&self) -> Vec<(i64, i64)> {
        self.iter().collect()
    }

    pub fn degrees_a(&self) -> BTreeMap<i64, usize> {
        let mut deg = BTreeMap::new();
        for &(a, _) in &self.pairs {
            *deg.entry(a).or_insert(0) += 1;
        }
        deg
    }

    pub fn degrees_b(&self) -> BTreeMap<i64, usize> {
        let mut deg = BTreeMap::new();
        for &(_, b) in &self.pairs {
            *deg.entry(b).or_insert(0) += 1;
        }
        deg
    }

    pub fn degree_of_a(&self, a: i64) -> usize {
        self.pairs.iter().filter(|&&(x, _)| x == a).count()
    }

    pub fn degree_of_b(&self, b: i64) -> usize {
        self.pairs.iter().filter(|&&(_, y)| y == b).count()
    }

    /// `(max degree on A, max degree on B)`, `(0, 0)` when empty.
    pub fn degree_profile(&self) -> (usize, usize) {
        let max = |m: BTreeMap<i64, usize>| m.into_values().max().unwrap_or(0);
        (max(self.degrees_a()), max(self.degrees_b()))
    }

    /// The transposed relation `{(b, a)}`.
    pub fn transpose(&self) -> Relation {
        Relation::new(self.pairs.iter().map(|&(a, b)| (b, a)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs.iter().all(|&(a, b)| self.contains(b, a))
    }

    /// Maps both coordinates through the given functions.
    pub fn map<F: Fn(i64) -> i64, G: Fn(i64) -> i64>(&self, f: F, g: G) -> Relation {
        Relation::new(self.pairs.iter().map(|&(a, b)| (f(a), g(b))))
    }

    /// Checks every pair lies in `A x B`, after canonicalising into the sets' universe.
    pub fn check_within<S: AdditiveSet>(&self, a: &S, b: &S) -> Result<()> {
        for &(x, y) in &self.pairs {
            if !a.contains(x) || !b.contains(y) {
                return Err(Error::RelationOutOfRange(x, y));
            }
        }
        Ok(())
    }

    /// Re-expresses the pairs in the canonical form of the sets' universe
    /// (e.g. `-2` becomes `p-2`).
    pub fn canonicalized<S: AdditiveSet>(&self, universe: &S) -> Relation {
        self.map(|x| universe.canonical(x), |y| universe.canonical(y))
    }

    /// Parses the `a:b;a:b` literal.
    pub fn parse(text: &str) -> Result<Relation> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Relation::empty());
        }
        let mut pairs = BTreeSet::new();
        for item in text.split(';') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (l, r) = item
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("bad relation pair {item:?}")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad relation pair {item:?}")))
            };
            pairs.insert((parse(l)?, parse(r)?));
        }
        Ok(Relation { pairs })
    }

    pub fn to_literal(&self) -> String {
        self.pairs
            .iter()
            .map(|(a, b)| format!("{a}:{b}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl From<Vec<(i64, i64)>> for Relation {
    fn from(v: Vec<(i64, i64)>) -> Self {
        Relation::new(v)
    }
}

impl From<Relation> for Vec<(i64, i64)> {
    fn from(r: Relation) -> Self {
        r.pairs.into_iter().collect()
    }
}

impl FromIterator<(i64, i64)> for Relation {
    fn from_iter<I: IntoIterator<Item = (i64, i64)>>(iter: I) -> Self {
        Relation::new(iter)
    }
}

/// Degree regime a relation must respect.
///
/// `FunctionBtoA` and `MatchingBtoA` are feasibility-equivalent to
/// `DegreeOnB(1)` and `DegreeBoth(1)`; they differ only in that a witness is
/// extended to a total map on B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "d")]
pub enum RelationConstraint {
    DegreeOnB(usize),
    DegreeBoth(usize),
    #[serde(rename = "function_b_to_a")]
    FunctionBtoA,
    #[serde(rename = "matching_b_to_a")]
    MatchingBtoA,
}

impl RelationConstraint {
    /// Maximum degree allowed on the B side.
    pub fn cap_b(self) -> usize {
        match self {
            RelationConstraint::DegreeOnB(d) | RelationConstraint::DegreeBoth(d) => d,
            RelationConstraint::FunctionBtoA | RelationConstraint::MatchingBtoA => 1,
        }
    }

    /// Maximum degree allowed on the A side, if any.
    pub fn cap_a(self) -> Option<usize> {
        match self {
            RelationConstraint::DegreeBoth(d) => Some(d),
            RelationConstraint::MatchingBtoA => Some(1),
            _ => None,
        }
    }

    pub fn requires_total(self) -> bool {
        matches!(
            self,
            RelationConstraint::FunctionBtoA | RelationConstraint::MatchingBtoA
        )
    }

    /// Whether `r` satisfies the degree bounds (totality is not checked).
    pub fn admits(self, r: &Relation) -> bool {
        let (da, db) = r.degree_profile();
        db <= self.cap_b() && self.cap_a().is_none_or(|cap| da <= cap)
    }

    /// Reports the first offending element, if any.
    pub fn audit(self, r: &Relation) -> Result<()> {
        if let Some(cap) = self.cap_a() {
            if let Some((&a, &d)) = r.degrees_a().iter().find(|(_, &d)| d > cap) {
                return Err(Error::DegreeViolation {
                    element: a,
                    degree: d,
                    bound: cap,
                });
            }
        }
        let cap = self.cap_b();
        if let Some((&b, &d)) = r.degrees_b().iter().find(|(_, &d)| d > cap) {
            return Err(Error::DegreeViolation {
                element: b,
                degree: d,
                bound: cap,
            });
        }
        Ok(())
    }
}

impl fmt::Display for RelationConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationConstraint::DegreeOnB(d) => write!(f, "degree-b:{d}"),
            RelationConstraint::DegreeBoth(d) => write!(f, "degree-both:{d}"),
            RelationConstraint::FunctionBtoA => write!(f, "function-b"),
            RelationConstraint::MatchingBtoA => write!(f, "matching"),
        }
    }
}

impl FromStr for RelationConstraint {
    type Err = Error;

    /// Accepts `function-b`, `matching`, `degree-b:D`, `degree-both:D`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let degree = |rest: &str| -> Result<usize> {
            let d: usize = rest
                .parse()
                .map_err(|_| Error::Parse(format!("bad degree in constraint {s:?}")))?;
            if d == 0 {
                return Err(Error::InvalidParameter("degree bound must be positive".into()));
            }
            Ok(d)
        };
        match s {
            "function-b" | "function" => Ok(RelationConstraint::FunctionBtoA),
            "matching" | "matching-b" => Ok(RelationConstraint::MatchingBtoA),
            _ => {
                if let Some(rest) = s.strip_prefix("degree-both:") {
                    Ok(RelationConstraint::DegreeBoth(degree(rest)?))
                } else if let Some(rest) = s.strip_prefix("degree-b:") {
                    Ok(RelationConstraint::DegreeOnB(degree(rest)?))
                } else {
                    Err(Error::Parse(format!("unknown constraint {s:?}")))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::IntegerSet;

    #[test]
    fn degree_profiles() {
        assert_eq!(Relation::empty().degree_profile(), (0, 0));
        assert_eq!(Relation::new([(0, 0), (0, 1)]).degree_profile(), (2, 1));
    }

    #[test]
    fn literal_roundtrip() {
        let r = Relation::parse("0:2;1:1;2:0").unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.to_literal(), "0:2;1:1;2:0");
        assert!(r.is_symmetric());
        assert!(Relation::parse("0-2").is_err());
        assert!(Relation::parse("").unwrap().is_empty());
    }

    #[test]
    fn out_of_range_pairs_are_rejected() {
        let a = IntegerSet::new([0, 1]);
        let r = Relation::new([(0, 5)]);
        assert_eq!(r.check_within(&a, &a), Err(Error::RelationOutOfRange(0, 5)));
    }

    #[test]
    fn constraint_parsing_and_caps() {
        let c: RelationConstraint = "degree-both:3".parse().unwrap();
        assert_eq!(c, RelationConstraint::DegreeBoth(3));
        assert_eq!(c.to_string().parse::<RelationConstraint>().unwrap(), c);
        assert_eq!(RelationConstraint::FunctionBtoA.cap_b(), 1);
        assert_eq!(RelationConstraint::FunctionBtoA.cap_a(), None);
        assert_eq!(RelationConstraint::MatchingBtoA.cap_a(), Some(1));
        assert!("degree-b:0".parse::<RelationConstraint>().is_err());
        let r = Relation::new([(0, 0), (1, 0)]);
        assert!(!RelationConstraint::FunctionBtoA.admits(&r));
        assert!(RelationConstraint::DegreeOnB(2).admits(&r));
        assert!(RelationConstraint::DegreeOnB(1).audit(&r).is_err());
    }
}
