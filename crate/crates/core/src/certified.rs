//! Value-plus-radius arithmetic in working precision.
//!
//! Every operation returns a radius that bounds the distance between the
//! stored value and the exact real result, assuming the inputs' radii were
//! sound. Values are rounded to nearest; each rounding is charged one ulp of
//! the result. Radius arithmetic itself is rounded to nearest and then pushed
//! up by one ulp, so radii only ever err on the large side.

use core::ops::Neg;

use crate::rational::Rational;

/// Distance from `|x|` to the next representable value away from zero.
pub fn ulp(x: f64) -> f64 {
    let a = x.abs();
    if !a.is_finite() {
        return f64::INFINITY;
    }
    if a == 0.0 {
        return f64::from_bits(1);
    }
    next_up(a) - a
}

pub fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    if x > 0.0 {
        f64::from_bits(bits + 1)
    } else {
        f64::from_bits(bits - 1)
    }
}

pub fn next_down(x: f64) -> f64 {
    -next_up(-x)
}

/// Rounded radius pushed one ulp up.
#[inline]
fn up(r: f64) -> f64 {
    next_up(r)
}

/// Sign decision on an enclosure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
    Indeterminate,
}

/// A real number known to lie in `[value − radius, value + radius]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedReal {
    pub value: f64,
    pub radius: f64,
}

impl CertifiedReal {
    pub fn new(value: f64, radius: f64) -> Self {
        debug_assert!(radius >= 0.0);
        CertifiedReal { value, radius }
    }

    /// An exactly representable value.
    pub fn exact(value: f64) -> Self {
        CertifiedReal { value, radius: 0.0 }
    }

    pub fn from_u64(v: u64) -> Self {
        let value = v as f64;
        let radius = if v < (1 << 53) { 0.0 } else { ulp(value) };
        CertifiedReal { value, radius }
    }

    pub fn from_i128(v: i128) -> Self {
        let value = v as f64;
        let radius = if v.unsigned_abs() < (1 << 53) {
            0.0
        } else {
            ulp(value)
        };
        CertifiedReal { value, radius }
    }

    pub fn from_rational(q: &Rational) -> Self {
        Self::from_i128(q.numerator()).div(&Self::from_i128(q.denominator()))
    }

    pub fn lower(&self) -> f64 {
        next_down(self.value - self.radius)
    }

    pub fn upper(&self) -> f64 {
        next_up(self.value + self.radius)
    }

    pub fn contains(&self, v: f64) -> bool {
        (v - self.value).abs() <= self.radius
    }

    pub fn add(&self, o: &Self) -> Self {
        let value = self.value + o.value;
        let radius = up(up(self.radius + o.radius) + ulp(value));
        CertifiedReal { value, radius }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&-*o)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let value = self.value * o.value;
        let cross = up(up(self.value.abs() * o.radius) + up(o.value.abs() * self.radius));
        let radius = up(up(cross + up(self.radius * o.radius)) + ulp(value));
        CertifiedReal { value, radius }
    }

    /// Division by an enclosure that excludes zero.
    pub fn div(&self, o: &Self) -> Self {
        let denom_low = o.value.abs() - o.radius;
        assert!(denom_low > 0.0, "divisor enclosure contains zero");
        let value = self.value / o.value;
        // |a/b − a'/b'| ≤ (|a| r_b + |b| r_a) / (|b|(|b| − r_b)) with rounding slack
        let num = up(up(self.value.abs() * o.radius) + up(o.value.abs() * self.radius));
        let den = next_down(o.value.abs() * next_down(denom_low));
        let radius = up(up(num / den) + ulp(value));
        CertifiedReal { value, radius }
    }

    pub fn mul_u64(&self, k: u64) -> Self {
        self.mul(&Self::from_u64(k))
    }

    pub fn sign(&self) -> Sign {
        cert_sign(self)
    }
}

impl Neg for CertifiedReal {
    type Output = CertifiedReal;
    fn neg(self) -> Self::Output {
        CertifiedReal {
            value: -self.value,
            radius: self.radius,
        }
    }
}

/// Positive iff `value − radius > 0`, Negative iff `value + radius < 0`.
pub fn cert_sign(v: &CertifiedReal) -> Sign {
    if v.value - v.radius > 0.0 && v.lower() > 0.0 {
        Sign::Positive
    } else if v.value + v.radius < 0.0 && v.upper() < 0.0 {
        Sign::Negative
    } else {
        Sign::Indeterminate
    }
}

/// Working-precision natural log of `p`, certified to two ulps.
pub fn cert_log(p: u64) -> CertifiedReal {
    debug_assert!(p >= 2);
    let value = libm::log(p as f64);
    let mut radius = 2.0 * ulp(value);
    if p >= (1 << 53) {
        // conversion of p to f64 is off by at most one part in 2^53
        radius = up(radius + f64::EPSILON);
    }
    CertifiedReal { value, radius }
}

#[inline]
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Running `ϑ(p_n) = Σ log p_i` as a two-term expansion with a radius.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThetaAccumulator {
    pub hi: f64,
    pub lo: f64,
    pub radius: f64,
    pub count: u64,
}

impl ThetaAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// `hi + lo` rounded to one double, radius widened by that rounding.
    pub fn value(&self) -> CertifiedReal {
        let value = self.hi + self.lo;
        CertifiedReal {
            value,
            radius: up(self.radius + ulp(value)),
        }
    }

    /// `ϑ − v` evaluated against the full two-term expansion.
    pub fn sub(&self, v: &CertifiedReal) -> CertifiedReal {
        let (s, e) = two_sum(self.hi, -v.value);
        let tail = e + self.lo;
        let value = s + tail;
        let radius = up(up(up(self.radius + v.radius) + ulp(tail)) + ulp(value));
        CertifiedReal { value, radius }
    }
}

/// Adds a non-negative certified term to the accumulator.
pub fn acc_add(acc: &ThetaAccumulator, term: &CertifiedReal) -> ThetaAccumulator {
    debug_assert!(term.value >= 0.0);
    let (s, e) = two_sum(acc.hi, term.value);
    let tail = e + acc.lo;
    let (hi, lo) = fast_two_sum(s, tail);
    // `e + lo` is the only inexact step; fast_two_sum is exact since |s| ≥ |tail|.
    let radius = up(up(acc.radius + term.radius) + ulp(tail));
    ThetaAccumulator {
        hi,
        lo,
        radius,
        count: acc.count + 1,
    }
}

impl ThetaAccumulator {
    pub fn add(&mut self, term: &CertifiedReal) {
        *self = acc_add(self, term);
    }
}
