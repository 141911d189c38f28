//! Exact rational parameters.
//!
//! `x` is always handled exactly so that `k(n, x)` carries no rounding. Input
//! comes from decimal (`"0.1"`, `"-1.25"`) or fraction (`"1/3"`) strings; the
//! value is never routed through a binary float.

use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedDiv, Signed, Zero};

use crate::error::Error;

/// A reduced fraction with a positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<i128>);

impl Rational {
    /// Panics on a zero denominator.
    pub fn new(numerator: i128, denominator: i128) -> Self {
        Rational(Ratio::new(numerator, denominator))
    }

    pub fn from_integer(v: i128) -> Self {
        Rational(Ratio::from_integer(v))
    }

    pub fn numerator(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denominator(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Nearest-ish binary value; only for reporting and plain-precision formulas.
    pub fn to_f64(&self) -> f64 {
        let (n, d) = (self.numerator(), self.denominator());
        let g = n.gcd(&d).max(1);
        (n / g) as f64 / (d / g) as f64
    }

    pub(crate) fn ratio(&self) -> &Ratio<i128> {
        &self.0
    }

    pub(crate) fn from_ratio(r: Ratio<i128>) -> Self {
        Rational(r)
    }

    /// `self` is strictly inside `(lo, hi)`.
    pub fn is_between(&self, lo: i128, hi: i128) -> bool {
        self.0 > Ratio::from_integer(lo) && self.0 < Ratio::from_integer(hi)
    }
}

impl fmt::Display for Rational {
    /// Always `num/den`, also for integers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator(), self.denominator())
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_integer(v as i128)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| Error::Parse {
            input: s.to_string(),
            reason,
        };
        let t = s.trim();
        if t.is_empty() {
            return Err(err("empty input"));
        }
        if let Some((num, den)) = t.split_once('/') {
            let num = parse_decimal(num.trim()).ok_or_else(|| err("bad numerator"))?;
            let den = parse_decimal(den.trim()).ok_or_else(|| err("bad denominator"))?;
            if den.is_zero() {
                return Err(err("zero denominator"));
            }
            return num
                .checked_div(&den)
                .map(Rational)
                .ok_or_else(|| err("value does not fit in 128 bits"));
        }
        parse_decimal(t)
            .map(Rational)
            .ok_or_else(|| err("expected a decimal like 0.1 or a fraction like 1/3"))
    }
}

fn parse_decimal(s: &str) -> Option<Ratio<i128>> {
    let (negative, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits_ok = |d: &str| d.bytes().all(|b| b.is_ascii_digit());
    if !digits_ok(int_part) || !digits_ok(frac_part) {
        return None;
    }
    let mut numerator: i128 = 0;
    for b in int_part.bytes().chain(frac_part.bytes()) {
        numerator = numerator
            .checked_mul(10)?
            .checked_add((b - b'0') as i128)?;
    }
    let denominator = 10i128.checked_pow(frac_part.len() as u32)?;
    if negative {
        numerator = -numerator;
    }
    Some(Ratio::new(numerator, denominator))
}

/// Exact decimal rendering with at most `max_digits` fractional digits,
/// falling back to `num/den` when the expansion does not terminate.
pub fn to_decimal_string(r: &Rational, max_digits: usize) -> String {
    use core::fmt::Write;
    let (mut n, d) = (r.numerator(), r.denominator());
    let mut out = String::new();
    if n < 0 {
        out.push('-');
        n = -n;
    }
    let _ = write!(out, "{}", n / d);
    let mut rem = n % d;
    if rem == 0 {
        return out;
    }
    out.push('.');
    for _ in 0..max_digits {
        rem *= 10;
        out.push((b'0' + (rem / d) as u8) as char);
        rem %= d;
        if rem == 0 {
            return out;
        }
    }
    r.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_exactly() {
        assert_eq!(q("0.1"), Rational::new(1, 10));
        assert_eq!(q("1/3"), Rational::new(1, 3));
        assert_eq!(q("-1.25"), Rational::new(-5, 4));
        assert_eq!(q("2"), Rational::from_integer(2));
        assert_eq!(q(".5"), Rational::new(1, 2));
        assert_eq!(q("6/4"), Rational::new(3, 2));
        assert_eq!(q("0.5/0.25"), Rational::from_integer(2));
        assert_eq!(
            q("1.71076602333336944680"),
            Rational::new(171_076_602_333_336_944_680, 100_000_000_000_000_000_000)
        );
    }

    #[test]
    fn rejects_non_decimal_forms() {
        for bad in ["", "abc", "1e-3", "0x10", "1/0", "1.2.3", "-", ".", "nan", "inf"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn display_and_decimal() {
        assert_eq!(q("0.1").to_string(), "1/10");
        assert_eq!(q("3").to_string(), "3/1");
        assert_eq!(to_decimal_string(&q("0.125"), 10), "0.125");
        assert_eq!(to_decimal_string(&q("-1/4"), 10), "-0.25");
        assert_eq!(to_decimal_string(&q("1/3"), 10), "1/3");
    }

    #[test]
    fn between() {
        assert!(q("1.99").is_between(-2, 2));
        assert!(!q("2").is_between(-2, 2));
        assert!(!q("-2").is_between(-2, 2));
    }
}
