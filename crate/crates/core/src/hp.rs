//! Multi-precision fallback used when a working-precision sign is undecided.
//!
//! [`HpReal`] is a fixed-point enclosure with [`FRAC_BITS`] fractional bits.
//! [`HpProduct`] keeps a running product of primes as a 256-bit truncated
//! mantissa and a binary exponent, so `ϑ(p_n) = log ∏ p_i` can be recovered at
//! any step with a single high-precision logarithm.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::Write;

use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::certified::Sign;
use crate::error::Error;
use crate::rational::Rational;

/// Fractional bits of an [`HpReal`] (≈ 96 decimal digits).
pub const FRAC_BITS: u32 = 320;
/// Extra bits carried inside the logarithm routine.
const GUARD_BITS: u32 = 64;
const WORK_BITS: u32 = FRAC_BITS + GUARD_BITS;

/// `[mid − rad, mid + rad] · 2^-FRAC_BITS`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HpReal {
    mid: BigInt,
    rad: BigUint,
}

impl HpReal {
    pub fn zero() -> Self {
        HpReal {
            mid: BigInt::zero(),
            rad: BigUint::zero(),
        }
    }

    pub fn from_u64(v: u64) -> Self {
        HpReal {
            mid: BigInt::from(v) << FRAC_BITS,
            rad: BigUint::zero(),
        }
    }

    /// Exact rational `q`, rounded to the fixed-point grid.
    pub fn from_rational(q: &Rational) -> Self {
        HpReal::from_u64(1)
            .mul_i128(q.numerator())
            .div_i128(q.denominator())
    }

    pub fn add(&self, o: &Self) -> Self {
        HpReal {
            mid: &self.mid + &o.mid,
            rad: &self.rad + &o.rad,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        HpReal {
            mid: &self.mid - &o.mid,
            rad: &self.rad + &o.rad,
        }
    }

    pub fn mul_i128(&self, k: i128) -> Self {
        HpReal {
            mid: &self.mid * BigInt::from(k),
            rad: &self.rad * BigUint::from(k.unsigned_abs()),
        }
    }

    /// Division by a non-zero integer; one unit is charged for the rounding.
    pub fn div_i128(&self, d: i128) -> Self {
        assert!(d != 0, "division by zero");
        let dd = BigInt::from(d);
        let du = BigUint::from(d.unsigned_abs());
        let mid = self.mid.div_floor(&dd);
        let rad = self.rad.div_ceil(&du) + 1u32;
        HpReal { mid, rad }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mid = (&self.mid * &o.mid) >> FRAC_BITS;
        let a = self.mid.magnitude();
        let b = o.mid.magnitude();
        let spread = a * &o.rad + b * &self.rad + &self.rad * &o.rad;
        let rad = (spread >> FRAC_BITS) + 2u32;
        HpReal { mid, rad }
    }

    /// Widens the radius by `units · 2^-FRAC_BITS`.
    pub fn widen(&self, units: &BigUint) -> Self {
        HpReal {
            mid: self.mid.clone(),
            rad: &self.rad + units,
        }
    }

    pub fn sign(&self) -> Sign {
        let rad = BigInt::from(self.rad.clone());
        if &self.mid - &rad > BigInt::zero() {
            Sign::Positive
        } else if &self.mid + &rad < BigInt::zero() {
            Sign::Negative
        } else {
            Sign::Indeterminate
        }
    }

    /// Midpoint rounded to a double.
    pub fn to_f64(&self) -> f64 {
        scaled_to_f64(&self.mid)
    }

    pub fn radius_f64(&self) -> f64 {
        scaled_to_f64(&BigInt::from(self.rad.clone()))
    }

    pub fn lower_f64(&self) -> f64 {
        crate::certified::next_down(self.to_f64() - self.radius_f64())
    }

    pub fn upper_f64(&self) -> f64 {
        crate::certified::next_up(self.to_f64() + self.radius_f64())
    }

    pub fn contains_f64(&self, v: f64) -> bool {
        self.lower_f64() <= v && v <= self.upper_f64()
    }

    /// Exact decimal rendering `mid±rad`.
    pub fn to_decimal_string(&self) -> String {
        let mut s = String::new();
        if self.mid.sign() == BigSign::Minus {
            s.push('-');
        }
        write_scaled(&mut s, self.mid.magnitude());
        s.push('±');
        write_scaled(&mut s, &self.rad);
        s
    }

    pub fn from_decimal_str(text: &str) -> Result<Self, Error> {
        let bad = |reason| Error::Parse {
            input: String::from(text),
            reason,
        };
        let (mid_text, rad_text) = text.split_once('±').ok_or_else(|| bad("missing ±"))?;
        let (mid, mid_exact) = parse_scaled(mid_text).ok_or_else(|| bad("bad midpoint"))?;
        let (rad, rad_exact) = parse_scaled(rad_text).ok_or_else(|| bad("bad radius"))?;
        if rad.sign() == BigSign::Minus {
            return Err(bad("negative radius"));
        }
        let mut rad = rad.magnitude().clone();
        if !mid_exact {
            rad += 1u32;
        }
        if !rad_exact {
            rad += 1u32;
        }
        Ok(HpReal { mid, rad })
    }
}

fn scaled_to_f64(v: &BigInt) -> f64 {
    // Keep 64 significant bits before converting.
    let bits = v.bits();
    if bits <= 1000 {
        let shift = bits.saturating_sub(64);
        let top = (v >> shift).to_f64().unwrap_or(f64::NAN);
        top * libm::pow(2.0, shift as f64 - FRAC_BITS as f64)
    } else {
        f64::NAN
    }
}

fn write_scaled(out: &mut String, m: &BigUint) {
    let int = m >> FRAC_BITS;
    let mask = (BigUint::one() << FRAC_BITS) - 1u32;
    let mut frac = m & &mask;
    let _ = write!(out, "{int}");
    if frac.is_zero() {
        return;
    }
    out.push('.');
    let ten = BigUint::from(10u32);
    while !frac.is_zero() {
        frac *= &ten;
        let digit = (&frac >> FRAC_BITS).to_u32().unwrap_or(0);
        out.push(char::from(b'0' + digit as u8));
        frac &= &mask;
    }
}

/// Parses a decimal into the fixed-point grid; the flag says whether it was exact.
fn parse_scaled(s: &str) -> Option<(BigInt, bool)> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: Vec<u8> = int_part.bytes().chain(frac_part.bytes()).collect();
    let whole = BigUint::parse_bytes(&digits, 10)?;
    let denom = BigUint::from(10u32).pow(frac_part.len() as u32);
    let (q, r) = (whole << FRAC_BITS).div_rem(&denom);
    let mut v = BigInt::from(q);
    if neg {
        v = -v;
    }
    Some((v, r.is_zero()))
}

/// `2·atanh(s)` for a fixed-point `s` (scale `2^WORK_BITS`) with `|s| ≤ 1/3`.
fn two_atanh(s: &BigInt) -> BigInt {
    if s.is_negative() {
        return -two_atanh(&-s);
    }
    let s2 = (s * s) >> WORK_BITS;
    let mut power = s.clone();
    let mut sum = BigInt::zero();
    let mut k: u32 = 1;
    while !power.is_zero() {
        sum += &power / BigInt::from(k);
        power = (&power * &s2) >> WORK_BITS;
        k += 2;
    }
    sum << 1
}

fn ln2_work() -> BigInt {
    let third = (BigInt::one() << WORK_BITS) / BigInt::from(3u32);
    two_atanh(&third)
}

/// Natural log of `mantissa · 2^exp2` for a positive integer mantissa.
pub fn log_scaled(mantissa: &BigUint, exp2: i64) -> HpReal {
    assert!(!mantissa.is_zero(), "log of zero");
    let top = mantissa.bits() as i64 - 1;
    // m = mantissa / 2^top in [1, 2), as a WORK_BITS fixed-point number
    let m_fixed: BigUint = if top <= WORK_BITS as i64 {
        mantissa << (WORK_BITS as i64 - top) as usize
    } else {
        mantissa >> (top - WORK_BITS as i64) as usize
    };
    let mut m = BigInt::from(m_fixed);
    let mut k = top + exp2;
    let one = BigInt::one() << WORK_BITS;
    // Bring m into [0.75, 1.5) so that |s| ≤ 1/5.
    if m > (&one * 3u32) >> 1 {
        m >>= 1;
        k += 1;
    }
    let s = ((&m - &one) << WORK_BITS) / (&m + &one);
    let mut acc = two_atanh(&s);
    if k != 0 {
        acc += ln2_work() * BigInt::from(k);
    }
    // Rounding in the series and in s, plus |k| times the error of ln 2, all
    // at WORK_BITS scale: bounded far below 2^24 (|k| + 2) units.
    let work_error = BigUint::from(k.unsigned_abs() + 2) << 24u32;
    let mid = acc >> GUARD_BITS;
    let rad = (work_error >> GUARD_BITS) + 2u32;
    HpReal { mid, rad }
}

pub fn log_u64(p: u64) -> HpReal {
    log_scaled(&BigUint::from(p), 0)
}

/// Running product of integers, truncated to a 256-bit mantissa.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HpProduct {
    /// Little-endian limbs; the top bit of `limbs[3]` is always set.
    limbs: [u64; 4],
    exp2: i64,
    /// Number of truncating renormalizations so far.
    truncations: u64,
}

impl Default for HpProduct {
    fn default() -> Self {
        Self::one()
    }
}

impl HpProduct {
    pub fn one() -> Self {
        HpProduct {
            limbs: [0, 0, 0, 1 << 63],
            exp2: -255,
            truncations: 0,
        }
    }

    pub fn mul_u64(&mut self, p: u64) {
        debug_assert!(p > 0);
        let mut r = [0u64; 5];
        let mut carry: u128 = 0;
        for i in 0..4 {
            let t = self.limbs[i] as u128 * p as u128 + carry;
            r[i] = t as u64;
            carry = t >> 64;
        }
        r[4] = carry as u64;
        if r[4] == 0 {
            // p == 1 leaves the mantissa normalized.
            self.limbs.copy_from_slice(&r[..4]);
            return;
        }
        let shift = 64 - r[4].leading_zeros();
        let lost = if shift == 64 { r[0] } else { r[0] & ((1u64 << shift) - 1) };
        for i in 0..4 {
            self.limbs[i] = if shift == 64 {
                r[i + 1]
            } else {
                (r[i] >> shift) | (r[i + 1] << (64 - shift))
            };
        }
        self.exp2 += shift as i64;
        if lost != 0 {
            self.truncations += 1;
        }
    }

    /// `(limbs, exp2, truncations)`, for serialization.
    pub fn raw(&self) -> ([u64; 4], i64, u64) {
        (self.limbs, self.exp2, self.truncations)
    }

    pub fn from_raw(limbs: [u64; 4], exp2: i64, truncations: u64) -> Result<Self, Error> {
        if limbs[3] >> 63 != 1 {
            return Err(Error::State("product mantissa is not normalized"));
        }
        Ok(HpProduct {
            limbs,
            exp2,
            truncations,
        })
    }

    /// Enclosure of the log of the exact product.
    pub fn log(&self) -> HpReal {
        let mut mantissa = BigUint::zero();
        for &limb in self.limbs.iter().rev() {
            mantissa = (mantissa << 64u32) | BigUint::from(limb);
        }
        let base = log_scaled(&mantissa, self.exp2);
        if self.truncations == 0 {
            return base;
        }
        // exact ∈ [M, M (1 + 2^-255)^t]  ⇒  log exact − log M ∈ [0, t 2^-254]
        let half = BigUint::from(self.truncations) << (FRAC_BITS - 254);
        HpReal {
            mid: base.mid + BigInt::from(half.clone()),
            rad: base.rad + half,
        }
    }
}

/// High-precision `ϑ`: a folded enclosure plus the product of primes since.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HpTheta {
    base: HpReal,
    base_count: u64,
    product: HpProduct,
    count: u64,
}

impl Default for HpTheta {
    fn default() -> Self {
        HpTheta {
            base: HpReal::zero(),
            base_count: 0,
            product: HpProduct::one(),
            count: 0,
        }
    }
}

impl HpTheta {
    pub fn new() -> Self {
        Self::default()
    }

    /// Restarts from a stored enclosure of `ϑ(p_count)`.
    pub fn from_snapshot(base: HpReal, count: u64) -> Self {
        HpTheta {
            base,
            base_count: count,
            product: HpProduct::one(),
            count,
        }
    }

    pub fn push(&mut self, p: u64) {
        self.product.mul_u64(p);
        self.count += 1;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn value(&self) -> HpReal {
        if self.count == self.base_count {
            return self.base.clone();
        }
        self.base.add(&self.product.log())
    }

    /// Folds the pending product into the stored enclosure.
    pub fn fold(&mut self) -> &HpReal {
        if self.count != self.base_count {
            self.base = self.value();
            self.base_count = self.count;
            self.product = HpProduct::one();
        }
        &self.base
    }

    pub fn snapshot(&self) -> (HpReal, u64) {
        (self.value(), self.count)
    }

    /// `(base, base_count, product)`, for serialization.
    pub fn parts(&self) -> (&HpReal, u64, &HpProduct) {
        (&self.base, self.base_count, &self.product)
    }

    /// Inverse of [`parts`](Self::parts); `count` is the total number of primes.
    pub fn from_parts(base: HpReal, base_count: u64, product: HpProduct, count: u64) -> Self {
        HpTheta {
            base,
            base_count,
            product,
            count,
        }
    }
}

impl PartialOrd for HpReal {
    /// Orders disjoint enclosures; overlapping ones are incomparable.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sub(other).sign() {
            Sign::Positive => Some(Ordering::Greater),
            Sign::Negative => Some(Ordering::Less),
            Sign::Indeterminate if self == other => Some(Ordering::Equal),
            Sign::Indeterminate => None,
        }
    }
}

/// Bit length of the radius, in units of `2^-FRAC_BITS`.
pub fn radius_bits(v: &HpReal) -> u64 {
    v.rad.bits()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    // 40-digit references
    const LN2: &str = "0.6931471805599453094172321214581765680755";
    const LN19: &str = "2.944438979166440460009027431887853537237";
    const LN_6469693230: &str = "22.59039453011565621888260736851360534328";

    fn close(v: &HpReal, reference: &str, digits: u32) {
        let r = HpReal::from_decimal_str(&(reference.to_string() + "±0")).unwrap();
        let d = v.sub(&r);
        let tol = BigInt::one() << (FRAC_BITS - (digits as f64 * 3.33) as u32);
        assert!(d.mid.abs() <= tol, "{} vs {reference}", v.to_decimal_string());
    }

    #[test]
    fn logs_match_references() {
        close(&log_u64(2), LN2, 38);
        close(&log_u64(19), LN19, 38);
        let mut prod = HpProduct::one();
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29] {
            prod.mul_u64(p);
        }
        close(&prod.log(), LN_6469693230, 38);
        assert!(radius_bits(&log_u64(19)) < 40);
    }

    #[test]
    fn log_of_one_is_zero() {
        let v = log_u64(1);
        assert!(v.contains_f64(0.0));
        assert_eq!(v.sign(), Sign::Indeterminate);
    }

    #[test]
    fn decimal_round_trip() {
        let v = log_u64(1_000_003).mul_i128(-7).div_i128(3);
        let text = v.to_decimal_string();
        let back = HpReal::from_decimal_str(&text).unwrap();
        assert_eq!(back, v);
        assert!(HpReal::from_decimal_str("1.5").is_err());
        assert!(HpReal::from_decimal_str("x±0").is_err());
    }

    #[test]
    fn product_tracks_truncation() {
        let mut prod = HpProduct::one();
        let mut exact = BigUint::one();
        for p in (2u64..400).filter(|n| (2..*n).all(|d| n % d != 0)) {
            prod.mul_u64(p);
            exact *= p;
        }
        assert!(prod.truncations > 0);
        let direct = log_scaled(&exact, 0);
        let via = prod.log();
        assert_ne!(via.sub(&direct).sign(), Sign::Positive);
        assert_ne!(via.sub(&direct).sign(), Sign::Negative);
    }

    #[test]
    fn theta_snapshots_fold() {
        let primes = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29];
        let mut a = HpTheta::new();
        let mut b = HpTheta::new();
        for (i, &p) in primes.iter().enumerate() {
            a.push(p);
            b.push(p);
            if i % 3 == 0 {
                b.fold();
            }
        }
        close(&a.value(), LN_6469693230, 38);
        close(&b.value(), LN_6469693230, 38);
        let (snap, count) = b.snapshot();
        let restored = HpTheta::from_snapshot(snap.clone(), count);
        assert_eq!(restored.value(), snap);
    }

    #[test]
    fn rational_embedding() {
        let third = HpReal::from_rational(&Rational::new(1, 3));
        assert!(third.contains_f64(1.0 / 3.0));
        let q = HpReal::from_rational(&Rational::new(-5, 4));
        assert_eq!(q.to_f64(), -1.25);
    }

    #[test]
    fn mul_encloses() {
        let a = log_u64(3);
        let b = log_u64(5);
        let p = a.mul(&b);
        assert!(p.contains_f64(3f64.ln() * 5f64.ln()));
    }
}
