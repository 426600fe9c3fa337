//! Explicit constants of the main theorems, evaluated without floating
//! underflow. Tiny positive numbers are kept as an exact rational mantissa in
//! `[1, 10)` times a power of ten. Quantities too large even for that form are
//! reported through `log10(-log10 x)`.
//!
//! Every float here comes from IEEE basic operations only (`+ - * /` and
//! integer conversions), so results are bit-identical across platforms.

use std::f64::consts::{LN_10, LN_2, SQRT_2};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{ser_ratio, to_big, Rational};

/// `log10(x)` for finite `x > 0` using only basic IEEE operations.
/// Returns NaN otherwise.
pub fn det_log10(x: f64) -> f64 {
    if !(x.is_finite() && x > 0.0) {
        return f64::NAN;
    }
    let mut bits = x.to_bits();
    let mut k: i64 = 0;
    if (bits >> 52) & 0x7ff == 0 {
        // Subnormal: scale into the normal range first.
        bits = (x * 18_014_398_509_481_984.0).to_bits(); // 2^54
        k -= 54;
    }
    k += ((bits >> 52) & 0x7ff) as i64 - 1023;
    let mut m = f64::from_bits((bits & ((1u64 << 52) - 1)) | (1023u64 << 52));
    if m > SQRT_2 {
        m /= 2.0;
        k += 1;
    }
    // ln m = 2 atanh(z), |z| <= 0.172.
    let z = (m - 1.0) / (m + 1.0);
    let z2 = z * z;
    let mut term = z;
    let mut sum = 0.0;
    for n in 0..24 {
        sum += term / (2 * n + 1) as f64;
        term *= z2;
    }
    (k as f64 * LN_2 + 2.0 * sum) / LN_10
}

/// A positive number `mantissa * 10^exp10` with `1 <= mantissa < 10` exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogValue {
    pub mantissa: BigRational,
    pub exp10: i64,
}

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

impl LogValue {
    /// Normalizes a positive rational.
    pub fn from_big(x: BigRational) -> Result<Self> {
        if !x.is_positive() {
            return Err(Error::InvalidParameter("log value must be positive".into()));
        }
        let digits = |n: &BigInt| n.to_string().trim_start_matches('-').len() as i64;
        let mut e = digits(x.numer()) - digits(x.denom());
        loop {
            let m = scale(&x, -e);
            if m < BigRational::one() {
                e -= 1;
            } else if m >= BigRational::from_integer(10.into()) {
                e += 1;
            } else {
                return Ok(LogValue { mantissa: m, exp10: e });
            }
        }
    }

    pub fn from_rational(x: Rational) -> Result<Self> {
        Self::from_big(to_big(x))
    }

    /// `mantissa * 10^exp10` with a rational mantissa of any size.
    pub fn new(mantissa: BigRational, exp10: i64) -> Result<Self> {
        let v = Self::from_big(mantissa)?;
        Ok(LogValue {
            mantissa: v.mantissa,
            exp10: v.exp10 + exp10,
        })
    }

    pub fn mul(&self, other: &LogValue) -> LogValue {
        let v = Self::from_big(&self.mantissa * &other.mantissa).expect("positive");
        LogValue {
            mantissa: v.mantissa,
            exp10: v.exp10 + self.exp10 + other.exp10,
        }
    }

    pub fn div(&self, other: &LogValue) -> LogValue {
        let v = Self::from_big(&self.mantissa / &other.mantissa).expect("positive");
        LogValue {
            mantissa: v.mantissa,
            exp10: v.exp10 + self.exp10 - other.exp10,
        }
    }

    pub fn scale_rational(&self, r: &BigRational) -> Result<LogValue> {
        Ok(self.mul(&Self::from_big(r.clone())?))
    }

    pub fn min(self, other: LogValue) -> LogValue {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Exact value when the exponent is small enough to expand.
    pub fn to_exact(&self) -> Option<BigRational> {
        (self.exp10.abs() <= 4000).then(|| scale(&self.mantissa, self.exp10))
    }

    /// Mantissa rounded toward zero to 60 fractional bits.
    fn mantissa_f64(&self) -> f64 {
        let scaled = (self.mantissa.numer() << 60usize) / self.mantissa.denom();
        let top = scaled.to_u64().expect("mantissa below 10");
        // Split so each conversion is exact before the single rounding step.
        let hi = (top >> 11) as f64 * 2048.0;
        let lo = (top & 2047) as f64;
        (hi + lo) / 1_152_921_504_606_846_976.0 // 2^60
    }

    pub fn log10(&self) -> f64 {
        self.exp10 as f64 + det_log10(self.mantissa_f64())
    }

    /// Scientific notation with `digits` significant digits, truncated.
    pub fn to_scientific(&self, digits: u32) -> String {
        let scaled = (self.mantissa.numer() * pow10(digits - 1)) / self.mantissa.denom();
        let s = scaled.to_string();
        let (head, tail) = s.split_at(1);
        let tail = tail.trim_end_matches('0');
        if tail.is_empty() {
            format!("{head}e{}", self.exp10)
        } else {
            format!("{head}.{tail}e{}", self.exp10)
        }
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogValue {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.exp10
            .cmp(&other.exp10)
            .then_with(|| self.mantissa.cmp(&other.mantissa))
    }
}

impl Serialize for LogValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LogValue", 4)?;
        st.serialize_field("mantissa", &self.mantissa.to_string())?;
        st.serialize_field("exp10", &self.exp10)?;
        st.serialize_field("log10", &self.log10())?;
        st.serialize_field("approx", &self.to_scientific(12))?;
        st.end()
    }
}

fn scale(x: &BigRational, e: i64) -> BigRational {
    let f = pow10(e.unsigned_abs() as u32);
    if e >= 0 {
        x * BigRational::from_integer(f)
    } else {
        x / BigRational::from_integer(f)
    }
}

fn big(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// A number `0 < x < 1` so small that only `log10(-log10 x)` is stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DoubleLog {
    pub log10_neg_log10: f64,
}

/// Symbolic form of the strong theorem's constants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BetaForm {
    pub beta: String,
    pub p_0: String,
    /// The `alpha` that enters `beta`; `c` and `delta` come from the cited
    /// stability theorem and have no explicit value.
    pub alpha: LogValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstantLedger {
    #[serde(serialize_with = "ser_ratio")]
    pub eps: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub gamma: Rational,
    pub t: u64,
    #[serde(rename = "D")]
    pub d: u32,
    /// `min(2^-13 * 3.1 * 10^-1549, gamma / 8)`.
    pub delta: LogValue,
    /// `"constant"` or `"gamma"`, whichever term attains `delta`.
    pub delta_branch: String,
    /// `eps * min(delta / 32, gamma / (32 t^2))`.
    pub alpha: LogValue,
    /// `2^-18 * 3.1 * 10^-1549 * eps`, the `alpha` inside `c_eps`.
    pub alpha_main: LogValue,
    /// `(1 + 1/a)^-1 (8(2D + 3 + 1/a))^(-24 (2D + 3 + 1/a)^4)` with `a = alpha_main`.
    pub c_eps: DoubleLog,
    /// `(eps / 10^1600)^(10^6400 / eps^4)`.
    pub c_eps_simplified: DoubleLog,
    /// The simplified constant is no larger than `c_eps`.
    pub simplified_below: bool,
    #[serde(serialize_with = "ser_display")]
    pub p_0: BigUint,
    pub beta: BetaForm,
}

fn ser_display<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Evaluates every explicit constant. Requires `0 < eps < 1`, `gamma > 0`,
/// `t >= 2^10` and `D >= 1`.
pub fn constant_ledger(eps: Rational, gamma: Rational, t: u64, d: u32) -> Result<ConstantLedger> {
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);
    if !(eps > zero && eps < one) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must lie in (0, 1)")));
    }
    if gamma <= zero {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must be positive")));
    }
    if t < 1024 {
        return Err(Error::InvalidParameter(format!("t = {t} must be at least 2^10")));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("D must be at least 1".into()));
    }
    let eps_b = to_big(eps);
    let gamma_b = to_big(gamma);
    // 2^-13 * 3.1 * 10^-1549 = (31 / 81920) * 10^-1549.
    let fixed = LogValue::new(big(31, 81920), -1549)?;
    let from_gamma = LogValue::from_big(&gamma_b / big(8, 1))?;
    let delta_branch = if fixed <= from_gamma { "constant" } else { "gamma" };
    let delta = fixed.min(from_gamma);
    let t_sq = BigRational::from_integer(BigInt::from(t) * BigInt::from(t));
    let alpha = delta
        .scale_rational(&big(1, 32))?
        .min(LogValue::from_big(&gamma_b / (t_sq * big(32, 1)))?)
        .scale_rational(&eps_b)?;
    // 2^-18 * 3.1 = 31 / 2621440.
    let alpha_main = LogValue::new(big(31, 2_621_440), -1549)?.scale_rational(&eps_b)?;

    // With a = alpha_main < 10^-1550, X = 2D + 3 + 1/a agrees with 1/a to
    // far below f64 resolution in log space, and the (1 + 1/a) factor shifts
    // log10(-log10 c) by less than 10^-6000.
    let log_x = -alpha_main.log10();
    let log_8x = det_log10(8.0) + log_x;
    let c_eps = DoubleLog {
        log10_neg_log10: det_log10(24.0) + 4.0 * log_x + det_log10(log_8x),
    };
    // log10 c = (10^6400 / eps^4)(log10 eps - 1600).
    let log_eps = LogValue::from_rational(eps)?.log10();
    let c_eps_simplified = DoubleLog {
        log10_neg_log10: 6400.0 - 4.0 * log_eps + det_log10(1600.0 - log_eps),
    };
    let simplified_below = c_eps_simplified.log10_neg_log10 >= c_eps.log10_neg_log10;

    let p_0 = num_traits::pow(BigUint::from(4u32), 10 * d as usize);
    Ok(ConstantLedger {
        eps,
        gamma,
        t,
        d,
        delta,
        delta_branch: delta_branch.into(),
        alpha,
        alpha_main: alpha_main.clone(),
        c_eps,
        c_eps_simplified,
        simplified_below,
        p_0,
        beta: BetaForm {
            beta: "c / (delta * alpha)".into(),
            p_0: format!("4^(2 * beta * {d})"),
            alpha: alpha_main,
        },
    })
}
