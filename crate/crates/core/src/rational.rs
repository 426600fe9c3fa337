use num_rational::{BigRational, Ratio};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Parses `"3"`, `"-1/2"` or a finite decimal such as `"0.25"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("bad rational {t:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10i64.pow(frac.len() as u32);
        let f: i64 = frac.parse().map_err(|_| bad())?;
        let mag = int.abs() * den + f;
        return Ok(Ratio::new(if negative { -mag } else { mag }, den));
    }
    t.parse::<i64>().map(Ratio::from_integer).map_err(|_| bad())
}

/// Serializes a ratio as its `"n/d"` display string.
pub fn ser_ratio<T: std::fmt::Display + Clone + num_integer::Integer, S: serde::Serializer>(
    r: &Ratio<T>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

pub fn to_big(r: Rational) -> BigRational {
    BigRational::new((*r.numer()).into(), (*r.denom()).into())
}
