//! Finite sets of integers and of residues modulo a prime.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deterministic trial division; fine for the moduli used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime_above(n: u64) -> u64 {
    let mut q = n + 1;
    while !is_prime(q) {
        q += 1;
    }
    q
}

/// Canonical representative in `0..p`.
pub fn reduce(x: i64, p: u64) -> i64 {
    x.rem_euclid(p as i64)
}

/// Least absolute residue: the representative of `x` in `(-p/2, p/2]`.
pub fn least_abs_residue(x: i64, p: u64) -> i64 {
    let r = reduce(x, p);
    if 2 * r > p as i64 {
        r - p as i64
    } else {
        r
    }
}

/// Multiplicative inverse modulo a prime.
pub fn inverse_mod(t: i64, p: u64) -> Option<i64> {
    let t = reduce(t, p);
    if t == 0 {
        return None;
    }
    let (mut r0, mut r1) = (p as i128, t as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    Some(reduce(s0 as i64, p))
}

/// A prime modulus, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Operations shared by both universes. Elements are exchanged as `i64`;
/// residues always travel in canonical form `0..p`.
pub trait AdditiveSet: Clone + fmt::Debug + PartialEq + Sized {
    /// Members in ascending canonical order.
    fn elements(&self) -> Vec<i64>;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn contains(&self, x: i64) -> bool;
    /// Group addition of two members (reduced for residues).
    fn add(&self, a: i64, b: i64) -> i64;
    /// Fails when the two sets live in different groups.
    fn check_compatible(&self, other: &Self) -> Result<()>;
    /// A set in the same universe built from arbitrary elements.
    fn with_elements<I: IntoIterator<Item = i64>>(&self, elems: I) -> Self;
    /// Canonical form of an arbitrary integer in this universe.
    fn canonical(&self, x: i64) -> i64;
    fn negate(&self) -> Self {
        self.with_elements(self.elements().into_iter().map(|x| -x))
    }
    fn translate(&self, x: i64) -> Self {
        self.with_elements(self.elements().into_iter().map(|a| a + x))
    }
    /// `A + B` without validation.
    fn sumset_raw(&self, other: &Self) -> Self {
        let b = other.elements();
        let mut out = Vec::with_capacity(self.len() * b.len());
        for a in self.elements() {
            out.extend(b.iter().map(|&y| self.add(a, y)));
        }
        self.with_elements(out)
    }
}

/// A finite subset of the integers, kept sorted and duplicate free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(from = "Vec<i64>", into = "Vec<i64>")]
pub struct IntegerSet {
    members: Vec<i64>,
}

impl IntegerSet {
    pub fn new<I: IntoIterator<Item = i64>>(elems: I) -> Self {
        let mut members: Vec<i64> = elems.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        IntegerSet { members }
    }

    pub fn range(lo: i64, hi_inclusive: i64) -> Self {
        IntegerSet {
            members: (lo..=hi_inclusive).collect(),
        }
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.members
    }

    pub fn min(&self) -> Option<i64> {
        self.members.first().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.members.last().copied()
    }

    pub fn is_subset(&self, other: &IntegerSet) -> bool {
        self.members.iter().all(|x| other.contains(*x))
    }

    pub fn union(&self, other: &IntegerSet) -> IntegerSet {
        IntegerSet::new(self.members.iter().chain(&other.members).copied())
    }

    pub fn difference(&self, other: &IntegerSet) -> IntegerSet {
        IntegerSet::new(self.members.iter().copied().filter(|x| !other.contains(*x)))
    }
}

impl From<Vec<i64>> for IntegerSet {
    fn from(v: Vec<i64>) -> Self {
        IntegerSet::new(v)
    }
}

impl From<IntegerSet> for Vec<i64> {
    fn from(s: IntegerSet) -> Vec<i64> {
        s.members
    }
}

impl AdditiveSet for IntegerSet {
    fn elements(&self) -> Vec<i64> {
        self.members.clone()
    }
    fn len(&self) -> usize {
        self.members.len()
    }
    fn contains(&self, x: i64) -> bool {
        self.members.binary_search(&x).is_ok()
    }
    fn add(&self, a: i64, b: i64) -> i64 {
        a + b
    }
    fn check_compatible(&self, _other: &Self) -> Result<()> {
        Ok(())
    }
    fn with_elements<I: IntoIterator<Item = i64>>(&self, elems: I) -> Self {
        IntegerSet::new(elems)
    }
    fn canonical(&self, x: i64) -> i64 {
        x
    }
}

const WORD: usize = 64;

/// A subset of Z/pZ stored as a dense bit-vector of length p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    modulus: Prime,
    bits: Vec<u64>,
}

impl fmt::Debug for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ResidueSet(mod {}, {:?})", self.modulus, self.elements())
    }
}

fn words_for(p: usize) -> usize {
    p.div_ceil(WORD)
}

impl ResidueSet {
    pub fn empty(modulus: Prime) -> Self {
        ResidueSet {
            modulus,
            bits: vec![0; words_for(modulus.get() as usize)],
        }
    }

    pub fn full(modulus: Prime) -> Self {
        let mut s = Self::empty(modulus);
        for x in 0..modulus.get() as usize {
            s.set(x);
        }
        s
    }

    /// Builds the set of residues of `elems` (any integers; reduced mod p).
    pub fn new<I: IntoIterator<Item = i64>>(modulus: Prime, elems: I) -> Self {
        let mut s = Self::empty(modulus);
        let p = modulus.get();
        for x in elems {
            s.set(reduce(x, p) as usize);
        }
        s
    }

    /// Convenience constructor that validates the modulus.
    pub fn from_elements<I: IntoIterator<Item = i64>>(p: u64, elems: I) -> Result<Self> {
        Ok(Self::new(Prime::new(p)?, elems))
    }

    /// Residues `lo, lo+1, ..., lo+len-1`.
    pub fn interval(modulus: Prime, lo: i64, len: usize) -> Self {
        Self::new(modulus, (0..len as i64).map(|i| lo + i))
    }

    pub fn modulus(&self) -> Prime {
        self.modulus
    }

    pub fn p(&self) -> u64 {
        self.modulus.get()
    }

    fn set(&mut self, x: usize) {
        self.bits[x / WORD] |= 1u64 << (x % WORD);
    }

    fn get(&self, x: usize) -> bool {
        self.bits[x / WORD] >> (x % WORD) & 1 == 1
    }

    pub fn insert(&mut self, x: i64) {
        let r = reduce(x, self.p()) as usize;
        self.set(r);
    }

    pub fn remove(&mut self, x: i64) {
        let r = reduce(x, self.p()) as usize;
        self.bits[r / WORD] &= !(1u64 << (r % WORD));
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some((w * WORD + tz) as i64)
            })
        })
    }

    pub fn complement(&self) -> ResidueSet {
        let mut out = ResidueSet::full(self.modulus);
        for (o, w) in out.bits.iter_mut().zip(&self.bits) {
            *o &= !w;
        }
        out
    }

    pub fn intersection(&self, other: &ResidueSet) -> ResidueSet {
        let mut out = self.clone();
        for (o, w) in out.bits.iter_mut().zip(&other.bits) {
            *o &= w;
        }
        out
    }

    pub fn union(&self, other: &ResidueSet) -> ResidueSet {
        let mut out = self.clone();
        for (o, w) in out.bits.iter_mut().zip(&other.bits) {
            *o |= w;
        }
        out
    }

    pub fn difference(&self, other: &ResidueSet) -> ResidueSet {
        let mut out = self.clone();
        for (o, w) in out.bits.iter_mut().zip(&other.bits) {
            *o &= !w;
        }
        out
    }

    pub fn intersection_len(&self, other: &ResidueSet) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &ResidueSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// The set translated by `x`, computed as a word-level rotation.
    pub fn rotated(&self, x: i64) -> ResidueSet {
        let mut out = ResidueSet::empty(self.modulus);
        or_rotated(&mut out.bits, &self.bits, reduce(x, self.p()) as usize, self.p() as usize);
        out
    }
}

fn or_shl(dst: &mut [u64], src: &[u64], s: usize) {
    let (ws, bs) = (s / WORD, s % WORD);
    for i in (ws..dst.len()).rev() {
        let j = i - ws;
        let mut v = src[j] << bs;
        if bs > 0 && j > 0 {
            v |= src[j - 1] >> (WORD - bs);
        }
        dst[i] |= v;
    }
}

#[allow(clippy::needless_range_loop)]
fn or_shr(dst: &mut [u64], src: &[u64], s: usize) {
    let (ws, bs) = (s / WORD, s % WORD);
    for i in 0..dst.len() {
        let j = i + ws;
        if j >= src.len() {
            break;
        }
        let mut v = src[j] >> bs;
        if bs > 0 && j + 1 < src.len() {
            v |= src[j + 1] << (WORD - bs);
        }
        dst[i] |= v;
    }
}

/// dst |= rotate(src, s) on a ring of `n` bits; bits at or above `n` stay clear.
fn or_rotated(dst: &mut [u64], src: &[u64], s: usize, n: usize) {
    if s == 0 {
        for (d, w) in dst.iter_mut().zip(src) {
            *d |= w;
        }
        return;
    }
    or_shl(dst, src, s);
    or_shr(dst, src, n - s);
    let tail = n % WORD;
    if tail != 0 {
        let last = dst.len() - 1;
        dst[last] &= (1u64 << tail) - 1;
    }
}

impl AdditiveSet for ResidueSet {
    fn elements(&self) -> Vec<i64> {
        self.iter().collect()
    }
    fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn contains(&self, x: i64) -> bool {
        self.get(reduce(x, self.p()) as usize)
    }
    fn add(&self, a: i64, b: i64) -> i64 {
        reduce(a + b, self.p())
    }
    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.modulus == other.modulus {
            Ok(())
        } else {
            Err(Error::ModulusMismatch(self.p(), other.p()))
        }
    }
    fn with_elements<I: IntoIterator<Item = i64>>(&self, elems: I) -> Self {
        ResidueSet::new(self.modulus, elems)
    }
    fn canonical(&self, x: i64) -> i64 {
        reduce(x, self.p())
    }
    fn translate(&self, x: i64) -> Self {
        self.rotated(x)
    }
    fn sumset_raw(&self, other: &Self) -> Self {
        let mut out = ResidueSet::empty(self.modulus);
        let n = self.p() as usize;
        // Rotate the smaller operand's partner fewer times.
        let (shifts, base) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        for a in shifts.iter() {
            or_rotated(&mut out.bits, &base.bits, a as usize, n);
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct ResidueSetRepr {
    modulus: u64,
    members: Vec<i64>,
}

impl Serialize for ResidueSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ResidueSetRepr {
            modulus: self.p(),
            members: self.elements(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ResidueSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ResidueSetRepr::deserialize(d)?;
        ResidueSet::from_elements(repr.modulus, repr.members).map_err(serde::de::Error::custom)
    }
}

/// Parses the comma-separated set literal, e.g. `"0,1,4"`. Whitespace is ignored.
pub fn parse_elements(text: &str) -> Result<Vec<i64>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad set element {tok:?}")))
        })
        .collect()
}

/// Formats elements in the set literal format.
pub fn format_elements(elems: &[i64]) -> String {
    elems
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
