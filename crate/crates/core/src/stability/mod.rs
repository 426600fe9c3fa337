//! Evaluators for the interval partition and the two averaging claims of the
//! stability argument, plus the explicit constant ledger.
//!
//! Notation: `I_inf` is the complement of `I`, and `A_S` is the union of
//! `A n I_x` over `x` in `S`.

mod constants;

pub use constants::{constant_ledger, det_log10, ConstantLedger, LogValue};

use num_rational::Ratio;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constructions::Check;
use crate::error::{Error, Result};
use crate::rational::{ser_ratio, Rational};
use crate::sets::{reduce, AdditiveSet, Prime, ResidueSet};

/// Cyclic interval `start, start+1, ..., start+len-1` of F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub start: i64,
    pub len: usize,
}

impl Interval {
    pub fn new(start: i64, len: usize) -> Self {
        Interval { start, len }
    }

    /// Canonical last residue; `None` for the empty interval.
    pub fn end(&self, p: u64) -> Option<i64> {
        (self.len > 0).then(|| reduce(self.start + self.len as i64 - 1, p))
    }

    pub fn to_set(&self, p: Prime) -> ResidueSet {
        ResidueSet::interval(p, self.start, self.len)
    }

    fn offset(&self, off: usize, len: usize, p: u64) -> Interval {
        Interval::new(reduce(self.start + off as i64, p), len)
    }
}

/// Five consecutive parts `I_{-2}, I_{-1}, I_0, I_1, I_2` of `I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IntervalPartition {
    pub p: u64,
    #[serde(rename = "I")]
    pub interval: Interval,
    #[serde(rename = "J")]
    pub j: Interval,
    /// Parts in the order `-2, -1, 0, 1, 2`.
    pub parts: [Interval; 5],
    /// `|A n I_x|` for `x = -2, -1, 0, 1, 2, inf`.
    pub class_sizes: [usize; 6],
}

impl IntervalPartition {
    pub fn part(&self, x: i32) -> Interval {
        self.parts[(x + 2) as usize]
    }

    /// `|A_{-1,0,1}|`.
    pub fn middle_size(&self) -> usize {
        self.class_sizes[1] + self.class_sizes[2] + self.class_sizes[3]
    }

    /// The density condition `16 |A n I_0| <= |A_{-1,0,1}|`.
    pub fn density_holds(&self) -> bool {
        16 * self.class_sizes[2] <= self.middle_size()
    }

    /// Integer checks of the three structural invariants.
    pub fn invariants_hold(&self) -> bool {
        let p = self.p;
        let mut pos = self.interval.start;
        for part in &self.parts {
            if reduce(pos, p) != reduce(part.start, p) {
                return false;
            }
            pos += part.len as i64;
        }
        let total: usize = self.parts.iter().map(|q| q.len).sum();
        let j = self.j.len;
        total == self.interval.len
            && self.parts[0].len == j
            && self.parts[2].len == j
            && self.parts[4].len == j
            && j > 0
            && self.density_holds()
    }

    /// `A_S` for a list of class labels; `None` stands for `inf`.
    pub fn class_union(&self, a: &ResidueSet, labels: &[Option<i32>]) -> ResidueSet {
        let prime = a.modulus();
        let mut out = ResidueSet::empty(prime);
        for label in labels {
            let region = match label {
                Some(x) => self.part(*x).to_set(prime),
                None => self.interval.to_set(prime).complement(),
            };
            out = out.union(&a.intersection(&region));
        }
        out
    }
}

/// Result of the deterministic window search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "camelCase")]
pub enum PartitionOutcome {
    Found(IntervalPartition),
    /// No window met the density condition; `best` minimizes `|I_0 n A|`.
    ConditionFailed { best: IntervalPartition },
}

impl PartitionOutcome {
    pub fn partition(&self) -> &IntervalPartition {
        match self {
            PartitionOutcome::Found(part) => part,
            PartitionOutcome::ConditionFailed { best } => best,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, PartitionOutcome::Found(_))
    }
}

/// Places `I_{-2}`, `I_2` at the ends of `I` and slides `I_0` (length `|J|`)
/// through the rest, keeping the leftmost window with fewest points of `A`.
pub fn partition_interval(a: &ResidueSet, i: Interval, j: Interval) -> Result<PartitionOutcome> {
    let p = a.p();
    if j.len == 0 {
        return Err(Error::InvalidParameter("J must be non-empty".into()));
    }
    if i.len as u64 > p || j.len as u64 > p {
        return Err(Error::InvalidParameter("interval longer than the group".into()));
    }
    if i.len < 3 * j.len {
        return Err(Error::InvalidParameter(format!(
            "|I| = {} is smaller than 3|J| = {}",
            i.len,
            3 * j.len
        )));
    }
    let w = j.len;
    let inner = i.len - 2 * w;
    let hits: Vec<usize> = (0..inner)
        .map(|k| a.contains(reduce(i.start + (w + k) as i64, p)) as usize)
        .collect();
    let mut count: usize = hits[..w].iter().sum();
    let (mut best_off, mut best_count) = (0, count);
    for off in 1..=inner - w {
        count = count + hits[off + w - 1] - hits[off - 1];
        if count < best_count {
            best_off = off;
            best_count = count;
        }
    }
    let parts = [
        i.offset(0, w, p),
        i.offset(w, best_off, p),
        i.offset(w + best_off, w, p),
        i.offset(2 * w + best_off, inner - w - best_off, p),
        i.offset(i.len - w, w, p),
    ];
    let prime = a.modulus();
    let mut class_sizes = [0; 6];
    for (k, part) in parts.iter().enumerate() {
        class_sizes[k] = a.intersection_len(&part.to_set(prime));
    }
    class_sizes[5] = a.len() - class_sizes[..5].iter().sum::<usize>();
    let part = IntervalPartition {
        p,
        interval: Interval::new(reduce(i.start, p), i.len),
        j: Interval::new(reduce(j.start, p), j.len),
        parts,
        class_sizes,
    };
    Ok(if part.density_holds() {
        PartitionOutcome::Found(part)
    } else {
        PartitionOutcome::ConditionFailed { best: part }
    })
}

/// One claim inequality `lhs >= rhs`, evaluated exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimCheck {
    pub name: String,
    /// Whether the case split selects this inequality.
    pub applicable: bool,
    #[serde(serialize_with = "ser_ratio")]
    pub lhs: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub rhs: Rational,
    pub holds: bool,
}

fn claim(name: &str, applicable: bool, lhs: Rational, rhs: Rational) -> ClaimCheck {
    ClaimCheck {
        name: name.into(),
        applicable,
        lhs,
        rhs,
        holds: lhs >= rhs,
    }
}

/// Exact averages entering the two claims.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClaimAverages {
    /// `E_b |A_{-2,inf,2} + {q_l, q_r, b}|`.
    #[serde(serialize_with = "ser_ratio")]
    pub outer_single: Rational,
    /// `E_{b2,b3} |A_{-2,inf,2} + {q_l, b2, b3}|`.
    #[serde(serialize_with = "ser_ratio")]
    pub outer_pair: Rational,
    /// Novel elements of `A_{-1,0,1} + X` outside `A_{-2,inf,2} + X`, single form.
    #[serde(serialize_with = "ser_ratio")]
    pub novel_single: Rational,
    /// Same count for `X = {q_l, b2, b3}`.
    #[serde(serialize_with = "ser_ratio")]
    pub novel_pair: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClaimReport {
    pub r: usize,
    pub outer_size: usize,
    pub middle_size: usize,
    pub hypotheses: Vec<Check>,
    pub hypotheses_hold: bool,
    pub structure: Vec<Check>,
    pub averages: ClaimAverages,
    pub claims: Vec<ClaimCheck>,
    /// Every applicable inequality holds (the either-or case counts once).
    pub all_hold: bool,
    /// `"ok"`, or `"hypothesis-violated"` when the audit fails.
    pub flag: String,
}

fn sum_with(base: &ResidueSet, shifts: &[i64]) -> ResidueSet {
    let mut out = ResidueSet::empty(base.modulus());
    for &s in shifts {
        out = out.union(&base.rotated(s));
    }
    out
}

/// Evaluates both claims on one instance. The parameter `r` only enters the
/// hypothesis audit. Pair averages run over ordered pairs `(b2, b3)` drawn
/// independently from `B \ {q_r}`.
pub fn claim_expectations(
    a: &ResidueSet,
    partition: &IntervalPartition,
    b: &ResidueSet,
    q_l: i64,
    q_r: i64,
    r: usize,
) -> Result<ClaimReport> {
    a.check_compatible(b)?;
    if a.p() != partition.p {
        return Err(Error::ModulusMismatch(a.p(), partition.p));
    }
    let p = a.p();
    let (q_l, q_r) = (reduce(q_l, p), reduce(q_r, p));
    if !b.contains(q_l) || !b.contains(q_r) {
        return Err(Error::InvalidParameter("q_l and q_r must lie in B".into()));
    }
    let prime = a.modulus();
    let outer = partition.class_union(a, &[Some(-2), None, Some(2)]);
    let middle = partition.class_union(a, &[Some(-1), Some(0), Some(1)]);
    let rest: Vec<i64> = b.iter().filter(|&x| x != q_r).collect();

    let mut singles = Vec::new();
    let mut pairs = Vec::new();
    for &x in &rest {
        singles.push([q_l, q_r, x]);
    }
    for &x in &rest {
        for &y in &rest {
            pairs.push([q_l, x, y]);
        }
    }
    let average = |shifts: &[[i64; 3]], novel: bool| -> Rational {
        if shifts.is_empty() {
            return Ratio::from_integer(0);
        }
        let total: usize = shifts
            .iter()
            .map(|x| {
                let o = sum_with(&outer, x);
                if novel {
                    sum_with(&middle, x).difference(&o).len()
                } else {
                    o.len()
                }
            })
            .sum();
        Ratio::new(total as i64, shifts.len() as i64)
    };
    let averages = ClaimAverages {
        outer_single: average(&singles, false),
        outer_pair: average(&pairs, false),
        novel_single: average(&singles, true),
        novel_pair: average(&pairs, true),
    };

    let nb = b.len() as i64;
    let na_outer = outer.len() as i64;
    let na_mid = middle.len() as i64;
    let int = Ratio::from_integer;
    let eighth = Ratio::new(1, 8);
    let mut claims = Vec::new();
    let large = na_outer >= nb - 1;
    claims.push(claim(
        "A.large",
        large,
        averages.outer_single,
        int(na_outer + nb - 1),
    ));
    let small_first = claim(
        "A.small.single",
        !large,
        averages.outer_single,
        int(2 * na_outer) + eighth * int(nb - 1 - na_outer),
    );
    let small_second = claim(
        "A.small.pair",
        !large,
        averages.outer_pair,
        Ratio::new(5, 2) * int(na_outer),
    );
    let small_ok = small_first.holds || small_second.holds;
    claims.push(small_first);
    claims.push(small_second);
    let target = (int(2) - eighth) * int(na_mid);
    claims.push(claim("B.single", true, averages.novel_single, target));
    claims.push(claim("B.pair", true, averages.novel_pair, target));
    let all_hold = (if large { claims[0].holds } else { small_ok }) && claims[3].holds && claims[4].holds;

    let ni = partition.interval.len as i64;
    let nj = partition.j.len as i64;
    let a_in_i = (a.len() - partition.class_sizes[5]) as i64;
    let j_set = partition.j.to_set(prime);
    let na = a.len() as i64;
    let ri = r as i64;
    let hypotheses = vec![
        check("|A| >= 8r", na >= 8 * ri),
        check("|B| >= 2", nb >= 2),
        check("|B| <= |A| - 2r", nb <= na - 2 * ri),
        check("2^11 |B| <= p", 2048 * nb as u64 <= p),
        check("|I| = (2^10 + 2r)|B|", ni == (1024 + 2 * ri) * nb),
        check("2^10 |J| <= (2^10 + 1)|B|", 1024 * nj <= 1025 * nb),
        check("2^10 |A n I| <= |B|", 1024 * a_in_i <= nb),
        check("q_l, q_r in B", true),
        check("B subset of J", b.is_subset(&j_set)),
    ];
    let hypotheses_hold = hypotheses.iter().all(|c| c.holds);
    let structure = structural_checks(a, partition, b, q_l, q_r);
    Ok(ClaimReport {
        r,
        outer_size: outer.len(),
        middle_size: middle.len(),
        flag: if hypotheses_hold { "ok" } else { "hypothesis-violated" }.into(),
        hypotheses,
        hypotheses_hold,
        structure,
        averages,
        claims,
        all_hold,
    })
}

fn check(name: &str, holds: bool) -> Check {
    Check {
        name: name.into(),
        holds,
    }
}

/// The disjointness facts the claims rely on, checked on the instance.
fn structural_checks(
    a: &ResidueSet,
    part: &IntervalPartition,
    b: &ResidueSet,
    q_l: i64,
    q_r: i64,
) -> Vec<Check> {
    let outer = part.class_union(a, &[Some(-2), None, Some(2)]);
    let middle = part.class_union(a, &[Some(-1), Some(0), Some(1)]);
    let infinity = part.class_union(a, &[None]);
    let left = part.class_union(a, &[Some(-1)]).rotated(q_r);
    let right = part.class_union(a, &[Some(1)]).rotated(q_l);
    let mut three_way = left.intersection_len(&right) == 0;
    let mut split = true;
    for y in b.iter() {
        let shifted = outer.rotated(y);
        three_way &= shifted.intersection_len(&left) == 0 && shifted.intersection_len(&right) == 0;
        for x in b.iter() {
            split &= middle.rotated(x).intersection_len(&infinity.rotated(y)) == 0;
        }
    }
    vec![
        check("partition invariants", part.invariants_hold()),
        check("A_-1 + q_r, A_1 + q_l, A_outer + y disjoint", three_way),
        check("A_middle + x, A_inf + y disjoint", split),
    ]
}

/// A synthetic instance meeting every hypothesis of the claims.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SyntheticInstance {
    pub p: u64,
    pub r: usize,
    pub seed: u64,
    #[serde(rename = "A")]
    pub a: ResidueSet,
    #[serde(rename = "B")]
    pub b: ResidueSet,
    #[serde(rename = "I")]
    pub i: Interval,
    #[serde(rename = "J")]
    pub j: Interval,
    pub q_l: i64,
    pub q_r: i64,
}

/// `B = J = {0, .., b_size-1}`, `I` of length `(2^10 + 2r)|B|` starting at
/// `2|B|`, and `A` a seeded random subset of the complement of `I` of size
/// `max(8r, |B| + 2r, 16)`.
pub fn synthesize(p: u64, b_size: usize, r: usize, seed: u64) -> Result<SyntheticInstance> {
    let prime = Prime::new(p)?;
    if b_size < 2 {
        return Err(Error::InvalidParameter("|B| must be at least 2".into()));
    }
    let i_len = (1024 + 2 * r) * b_size;
    let a_size = (8 * r).max(b_size + 2 * r).max(16);
    let outside = p as usize - i_len - 2 * b_size;
    if i_len + 2 * b_size > p as usize || a_size > outside {
        return Err(Error::InvalidParameter(format!(
            "p = {p} is too small for |B| = {b_size}, r = {r}"
        )));
    }
    let j = Interval::new(0, b_size);
    let i = Interval::new(2 * b_size as i64, i_len);
    let free: Vec<i64> = (0..p as i64)
        .filter(|&x| x < i.start || x >= i.start + i_len as i64)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = sample(&mut rng, free.len(), a_size);
    let a = ResidueSet::new(prime, picks.iter().map(|k| free[k]));
    Ok(SyntheticInstance {
        p,
        r,
        seed,
        a,
        b: j.to_set(prime),
        i,
        j,
        q_l: 0,
        q_r: b_size as i64 - 1,
    })
}

impl SyntheticInstance {
    pub fn evaluate(&self) -> Result<(PartitionOutcome, ClaimReport)> {
        let outcome = partition_interval(&self.a, self.i, self.j)?;
        let report = claim_expectations(&self.a, outcome.partition(), &self.b, self.q_l, self.q_r, self.r)?;
        Ok((outcome, report))
    }
}
