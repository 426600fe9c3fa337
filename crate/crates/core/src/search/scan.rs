//! Exhaustive and sampled scans of the conjectured lower bounds.
//!
//! Instances are enumerated up to symmetry. Over Z/pZ, A and B may be
//! translated independently and dilated by a common unit; over Z they may be
//! translated independently and reflected together. None of these change the
//! minimum, so each orbit is evaluated once and counts are orbit counts. The
//! representative of an orbit is its lexicographically least pair of bitmasks.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::min_restricted_sumset;
use crate::error::{Error, Result};
use crate::relation::{Relation, RelationConstraint};
use crate::sets::{is_prime, IntegerSet, Prime, ResidueSet};
use crate::verify::is_sidon_elements;

/// Largest modulus (or window) whose bitmask tables the scanner will build.
pub const MAX_SCAN_UNIVERSE: u64 = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScanKind {
    #[serde(rename = "lev")]
    Lev,
    #[serde(rename = "lev_cases")]
    LevCases,
    #[serde(rename = "a_plus_2b")]
    APlus2B,
    #[serde(rename = "z_fiveDhalf")]
    ZFiveDHalf,
    #[serde(rename = "sum_bound")]
    SumBound,
}

impl ScanKind {
    pub fn name(self) -> &'static str {
        match self {
            ScanKind::Lev => "lev",
            ScanKind::LevCases => "lev_cases",
            ScanKind::APlus2B => "a_plus_2b",
            ScanKind::ZFiveDHalf => "z_fiveDhalf",
            ScanKind::SumBound => "sum_bound",
        }
    }

    pub fn is_integer(self) -> bool {
        self == ScanKind::ZFiveDHalf
    }
}

impl fmt::Display for ScanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScanKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lev" => ScanKind::Lev,
            "lev_cases" => ScanKind::LevCases,
            "a_plus_2b" => ScanKind::APlus2B,
            "z_fiveDhalf" | "z_fivedhalf" => ScanKind::ZFiveDHalf,
            "sum_bound" => ScanKind::SumBound,
            _ => return Err(Error::Parse(format!("unknown scan kind {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanParams {
    pub kind: ScanKind,
    /// Modulus for the F_p kinds; window length `n` (sets inside `[1, n]`) for Z.
    pub universe: u64,
    /// Degree bound for `z_fiveDhalf`.
    pub d: usize,
    /// `k` for `sum_bound`.
    pub k: u64,
    pub sample: Option<Sample>,
    pub budget: u64,
}

impl ScanParams {
    pub fn new(kind: ScanKind, universe: u64) -> ScanParams {
        ScanParams {
            kind,
            universe,
            d: 1,
            k: 2,
            sample: None,
            budget: super::DEFAULT_BUDGET,
        }
    }

    pub fn constraint(&self) -> RelationConstraint {
        match self.kind {
            ScanKind::Lev | ScanKind::LevCases => RelationConstraint::MatchingBtoA,
            ScanKind::APlus2B | ScanKind::SumBound => RelationConstraint::FunctionBtoA,
            ScanKind::ZFiveDHalf => RelationConstraint::DegreeOnB(self.d),
        }
    }

    /// Conjectured lower bound for sizes `(|A|, |B|)`, or `None` if the pair is
    /// outside the scanned regime.
    pub fn bound(&self, na: u64, nb: u64) -> Option<i64> {
        let p = self.universe;
        let (na_i, nb_i) = (na as i64, nb as i64);
        match self.kind {
            ScanKind::Lev => (nb <= na && na + nb <= p).then_some(na_i + nb_i - 3),
            ScanKind::LevCases => (nb <= na && na + nb > p)
                .then_some(if na + nb == p + 1 { p as i64 - 3 } else { p as i64 - 2 }),
            ScanKind::APlus2B => (nb <= na && na + 2 * nb <= p).then_some(na_i + nb_i - 3),
            ScanKind::SumBound => {
                let k = self.k;
                (na + nb > 2 * k * p / (2 * k - 1)).then_some(p as i64 - k as i64 + 1)
            }
            ScanKind::ZFiveDHalf => {
                (nb <= na).then_some(na_i + nb_i - 1 - (5 * self.d as i64) / 2)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if self.kind.is_integer() {
            if self.universe < 1 || self.universe > MAX_SCAN_UNIVERSE {
                return Err(Error::InvalidParameter(format!(
                    "window must be in 1..={MAX_SCAN_UNIVERSE}"
                )));
            }
            if self.d == 0 {
                return Err(Error::InvalidParameter("degree bound must be positive".into()));
            }
        } else {
            if !is_prime(self.universe) {
                return Err(Error::NotPrime(self.universe));
            }
            if self.universe > MAX_SCAN_UNIVERSE {
                return Err(Error::InvalidParameter(format!(
                    "scans need p <= {MAX_SCAN_UNIVERSE}"
                )));
            }
        }
        if self.kind == ScanKind::SumBound && self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if let Some(s) = self.sample {
            if s.count == 0 {
                return Err(Error::InvalidParameter("sample count must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanInstance {
    #[serde(rename = "A")]
    pub a: Vec<i64>,
    #[serde(rename = "B")]
    pub b: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanRow {
    pub instance: ScanInstance,
    pub constraint: RelationConstraint,
    pub min_value: usize,
    pub optimal: bool,
    #[serde(rename = "witnessR")]
    pub witness_r: Relation,
    pub avoiding: Vec<i64>,
    pub tight: bool,
    pub bound: i64,
    pub violation: bool,
    /// Sidon test of the avoiding set, for F_p scans with `|A|+|B| > p` and `|F| >= 2`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sidon: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanReport {
    pub params: ScanParams,
    pub constraint: RelationConstraint,
    pub orbits: usize,
    pub violations: usize,
    pub tight: usize,
    pub incomplete: bool,
    pub largest_avoiding: usize,
    pub sidon_checked: usize,
    pub sidon_failures: usize,
    pub rows: Vec<ScanRow>,
}

impl ScanReport {
    /// The report without its per-instance rows.
    pub fn summary(&self) -> ScanReport {
        ScanReport {
            rows: Vec::new(),
            ..self.clone()
        }
    }
}

/// Bitmask symmetry tables for one universe.
struct Orbits {
    width: u32,
    cyclic: bool,
    /// Translation-canonical form of every mask.
    canon: Vec<u32>,
    /// For cyclic universes, bit permutations of the non-trivial unit dilations.
    dilations: Vec<Vec<u32>>,
}

impl Orbits {
    fn new(width: u32, cyclic: bool) -> Orbits {
        let size = 1usize << width;
        let full = (size - 1) as u32;
        let canon = (0..size as u32)
            .map(|m| {
                if m == 0 {
                    return 0;
                }
                if cyclic {
                    let mut best = m;
                    let mut r = m;
                    for _ in 1..width {
                        r = ((r << 1) | (r >> (width - 1))) & full;
                        best = best.min(r);
                    }
                    best
                } else {
                    m >> m.trailing_zeros()
                }
            })
            .collect();
        let dilations = if cyclic {
            (2..width as u64)
                .map(|t| (0..width as u64).map(|i| ((t * i) % width as u64) as u32).collect())
                .collect()
        } else {
            Vec::new()
        };
        Orbits {
            width,
            cyclic,
            canon,
            dilations,
        }
    }

    fn permute(&self, m: u32, perm: &[u32]) -> u32 {
        let mut out = 0;
        let mut x = m;
        while x != 0 {
            let i = x.trailing_zeros();
            out |= 1 << perm[i as usize];
            x &= x - 1;
        }
        out
    }

    fn reflect(&self, m: u32) -> u32 {
        let hi = 31 - m.leading_zeros();
        m.reverse_bits() >> (31 - hi)
    }

    /// Images of a translation-canonical mask under the non-identity symmetries
    /// acting on one side, already translation-canonicalised.
    fn images(&self, m: u32) -> Vec<u32> {
        if self.cyclic {
            self.dilations
                .iter()
                .map(|perm| self.canon[self.permute(m, perm) as usize])
                .collect()
        } else {
            vec![self.canon[self.reflect(m) as usize]]
        }
    }

    fn representative(&self, a: u32, b: u32) -> (u32, u32) {
        let (a, b) = (self.canon[a as usize], self.canon[b as usize]);
        self.images(a)
            .into_iter()
            .zip(self.images(b))
            .fold((a, b), |best, cand| best.min(cand))
    }

    fn elements(&self, m: u32) -> Vec<i64> {
        let offset = if self.cyclic { 0 } else { 1 };
        (0..self.width as i64).filter(|&i| m >> i & 1 == 1).map(|i| i + offset).collect()
    }
}

fn in_regime(params: &ScanParams, a: u32, b: u32) -> bool {
    params
        .bound(a.count_ones() as u64, b.count_ones() as u64)
        .is_some()
}

fn exhaustive_pairs(orbits: &Orbits, params: &ScanParams) -> Vec<(u32, u32)> {
    let reps: Vec<u32> = (1..orbits.canon.len() as u32)
        .filter(|&m| orbits.canon[m as usize] == m)
        .collect();
    let images: Vec<Vec<u32>> = reps.iter().map(|&m| orbits.images(m)).collect();
    (0..reps.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let (a, ia) = (reps[i], &images[i]);
            reps.iter()
                .zip(&images)
                .filter(move |(&b, ib)| {
                    in_regime(params, a, b) && ia.iter().zip(ib.iter()).all(|(&x, &y)| (a, b) <= (x, y))
                })
                .map(move |(&b, _)| (a, b))
                .collect::<Vec<_>>()
        })
        .collect()
}

fn sampled_pairs(orbits: &Orbits, params: &ScanParams, sample: Sample) -> Vec<(u32, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(sample.seed);
    let top = orbits.canon.len() as u32;
    let mut found = BTreeSet::new();
    let max_attempts = sample.count.saturating_mul(10_000);
    let mut accepted = 0;
    for _ in 0..max_attempts {
        if accepted == sample.count {
            break;
        }
        let a = rng.random_range(1..top);
        let b = rng.random_range(1..top);
        if !in_regime(params, a, b) {
            continue;
        }
        accepted += 1;
        found.insert(orbits.representative(a, b));
    }
    found.into_iter().collect()
}

fn evaluate(orbits: &Orbits, params: &ScanParams, a: u32, b: u32) -> Result<ScanRow> {
    let c = params.constraint();
    let (ea, eb) = (orbits.elements(a), orbits.elements(b));
    let (na, nb) = (ea.len() as u64, eb.len() as u64);
    let bound = params.bound(na, nb).expect("pair in regime");
    let res = if orbits.cyclic {
        let prime = Prime::new(params.universe)?;
        min_restricted_sumset(
            &ResidueSet::new(prime, ea.iter().copied()),
            &ResidueSet::new(prime, eb.iter().copied()),
            c,
            params.budget,
        )?
    } else {
        min_restricted_sumset(
            &IntegerSet::new(ea.iter().copied()),
            &IntegerSet::new(eb.iter().copied()),
            c,
            params.budget,
        )?
    };
    let sidon = (orbits.cyclic
        && na + nb > params.universe
        && res.optimal
        && res.avoiding.len() >= 2)
        .then(|| is_sidon_elements(&res.avoiding, params.universe));
    let value = res.min_value as i64;
    Ok(ScanRow {
        instance: ScanInstance { a: ea, b: eb },
        constraint: c,
        min_value: res.min_value,
        optimal: res.optimal,
        witness_r: res.witness_r,
        avoiding: res.avoiding,
        tight: value == bound,
        bound,
        violation: value < bound,
        sidon,
    })
}

/// Evaluates the exact minimum on every orbit (or a seeded sample of orbits) in
/// the kind's regime and compares it with the conjectured bound. Rows come
/// back in canonical order regardless of thread count.
pub fn scan_conjectures(params: &ScanParams) -> Result<ScanReport> {
    params.validate()?;
    let orbits = Orbits::new(params.universe as u32, !params.kind.is_integer());
    let mut pairs = match params.sample {
        None => exhaustive_pairs(&orbits, params),
        Some(s) => sampled_pairs(&orbits, params, s),
    };
    pairs.sort_unstable();
    let rows: Vec<ScanRow> = pairs
        .par_iter()
        .map(|&(a, b)| evaluate(&orbits, params, a, b))
        .collect::<Result<_>>()?;
    let sidon: Vec<bool> = rows.iter().filter_map(|r| r.sidon).collect();
    Ok(ScanReport {
        params: params.clone(),
        constraint: params.constraint(),
        orbits: rows.len(),
        violations: rows.iter().filter(|r| r.violation).count(),
        tight: rows.iter().filter(|r| r.tight).count(),
        incomplete: rows.iter().any(|r| !r.optimal),
        largest_avoiding: rows.iter().map(|r| r.avoiding.len()).max().unwrap_or(0),
        sidon_checked: sidon.len(),
        sidon_failures: sidon.iter().filter(|&&s| !s).count(),
        rows,
    })
}
