//! Sumsets, restricted sumsets and related set arithmetic.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::relation::Relation;
use crate::sets::{reduce, AdditiveSet, ResidueSet};

fn nonempty<S: AdditiveSet>(s: &S, name: &'static str) -> Result<()> {
    if s.is_empty() {
        Err(Error::EmptySet(name))
    } else {
        Ok(())
    }
}

/// `A + B`.
pub fn sumset<S: AdditiveSet>(a: &S, b: &S) -> Result<S> {
    a.check_compatible(b)?;
    nonempty(a, "A")?;
    nonempty(b, "B")?;
    Ok(a.sumset_raw(b))
}

/// Number of representations `s = a + b` with `a in A`, `b in B`.
pub fn representation_count<S: AdditiveSet>(a: &S, b: &S, s: i64) -> usize {
    b.elements()
        .into_iter()
        .filter(|&y| a.contains(s - y))
        .count()
}

/// `{a + b : (a, b) not in R}`.
///
/// A sum disappears exactly when every one of its representations is a
/// forbidden pair, so only sums touched by `R` need a representation count.
pub fn restricted_sumset<S: AdditiveSet>(a: &S, b: &S, r: &Relation) -> Result<S> {
    let full = sumset(a, b)?;
    let r = r.canonicalized(a);
    r.check_within(a, b)?;
    if r.is_empty() {
        return Ok(full);
    }
    let mut forbidden: BTreeMap<i64, usize> = BTreeMap::new();
    for (x, y) in r.iter() {
        *forbidden.entry(a.add(x, y)).or_insert(0) += 1;
    }
    let killed: Vec<i64> = forbidden
        .into_iter()
        .filter(|&(s, k)| representation_count(a, b, s) == k)
        .map(|(s, _)| s)
        .collect();
    let kept = full.elements().into_iter().filter(|s| killed.binary_search(s).is_err());
    Ok(full.with_elements(kept))
}

/// `mB - nB`: m-fold sums minus n-fold sums.
pub fn iterated_span<S: AdditiveSet>(b: &S, m: usize, n: usize) -> Result<S> {
    nonempty(b, "B")?;
    if m + n == 0 {
        return Err(Error::InvalidParameter("m + n must be at least 1".into()));
    }
    let neg = b.negate();
    let mut acc: Option<S> = None;
    for (count, base) in [(m, b), (n, &neg)] {
        for _ in 0..count {
            acc = Some(match acc {
                None => base.clone(),
                Some(s) => s.sumset_raw(base),
            });
        }
    }
    Ok(acc.expect("m + n >= 1"))
}

/// `{t x mod p}` for a unit `t`.
pub fn dilate(x: &ResidueSet, t: i64) -> Result<ResidueSet> {
    let p = x.p();
    let t = reduce(t, p);
    if t == 0 {
        return Err(Error::InvalidParameter("dilation factor must be a unit".into()));
    }
    Ok(ResidueSet::new(
        x.modulus(),
        x.iter().map(|e| ((e as i128 * t as i128) % p as i128) as i64),
    ))
}
