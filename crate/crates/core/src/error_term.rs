//! `k(n, x)`, `E_n(x)` and its affine form `a_n + b_n x`.
//!
//! ```text
//! k(n, x) = n − π(n) + π(n)/π(log n) − x π(π(n))
//! E_n(x)  = ϑ(p_n) − k(n, x) log p_{n+1}
//! a_n     = ϑ(p_n) − (n − π(n) + π(n)/π(log n)) log p_{n+1}
//! b_n     = π(π(n)) log p_{n+1}
//! α_n     = −a_n / b_n      (E_n(x) > 0  ⟺  x > α_n)
//! ```

use alloc::format;

use num_rational::Ratio;
use num_traits::{CheckedMul, CheckedSub};

use crate::certified::{next_down, next_up, CertifiedReal, ThetaAccumulator};
use crate::counters::PrimeCounts;
use crate::error::{Error, Result};
use crate::hp::{self, HpReal};
use crate::rational::Rational;

/// `n − π(n) + π(n)/π(log n)`, the part of `k(n, x)` that does not depend on `x`.
pub fn base_exponent(counts: &PrimeCounts) -> Rational {
    let q = counts.pi_log_n as i128;
    debug_assert!(q >= 1);
    let numerator = q * (counts.n as i128 - counts.pi_n as i128) + counts.pi_n as i128;
    Rational::new(numerator, q)
}

/// Exact `k(n, x)`.
pub fn k_exponent(counts: &PrimeCounts, x: &Rational) -> Result<Rational> {
    let base = *base_exponent(counts).ratio();
    let overflow = || Error::domain("k_exponent", format!("k({}, {x}) overflows i128", counts.n));
    let shift = x
        .ratio()
        .checked_mul(&Ratio::from_integer(counts.pi_pi_n as i128))
        .ok_or_else(overflow)?;
    base.checked_sub(&shift)
        .map(Rational::from_ratio)
        .ok_or_else(overflow)
}

/// `(a_n, b_n)` from `ϑ(p_n)`, the counts at `n` and `log p_{n+1}`.
pub fn affine_coeffs(
    counts: &PrimeCounts,
    theta: &ThetaAccumulator,
    log_p_next: &CertifiedReal,
) -> (CertifiedReal, CertifiedReal) {
    let base = base_exponent(counts);
    let scaled = log_p_next
        .mul(&CertifiedReal::from_i128(base.numerator()))
        .div(&CertifiedReal::from_i128(base.denominator()));
    let a = theta.sub(&scaled);
    let b = log_p_next.mul_u64(counts.pi_pi_n);
    (a, b)
}

/// `a + b x`.
pub fn e_n(a: &CertifiedReal, b: &CertifiedReal, x: &Rational) -> CertifiedReal {
    a.add(&b.mul(&CertifiedReal::from_rational(x)))
}

/// `E_n(x)` evaluated directly as `ϑ(p_n) − k(n, x) log p_{n+1}`.
pub fn e_n_direct(
    counts: &PrimeCounts,
    theta: &ThetaAccumulator,
    x: &Rational,
    log_p_next: &CertifiedReal,
) -> Result<CertifiedReal> {
    let k = k_exponent(counts, x)?;
    Ok(theta.sub(&CertifiedReal::from_rational(&k).mul(log_p_next)))
}

/// `E_n(x)` from a high-precision `ϑ(p_n)`.
pub fn e_n_high_precision(
    theta: &HpReal,
    counts: &PrimeCounts,
    x: &Rational,
    p_next: u64,
) -> Result<HpReal> {
    let k = k_exponent(counts, x)?;
    let scaled = hp::log_u64(p_next)
        .mul_i128(k.numerator())
        .div_i128(k.denominator());
    Ok(theta.sub(&scaled))
}

/// Outward-rounded enclosure of `−a/b`; `b` must be certified positive.
pub fn alpha_n(a: &CertifiedReal, b: &CertifiedReal) -> Result<(f64, f64)> {
    let b_lo = next_down(b.value - b.radius);
    if !(b_lo > 0.0) {
        return Err(Error::NotPositive {
            value: b.value,
            radius: b.radius,
        });
    }
    let b_hi = next_up(b.value + b.radius);
    let num_lo = next_down(-a.value - a.radius);
    let num_hi = next_up(-a.value + a.radius);
    let lo = if num_lo >= 0.0 {
        num_lo / b_hi
    } else {
        num_lo / b_lo
    };
    let hi = if num_hi >= 0.0 {
        num_hi / b_lo
    } else {
        num_hi / b_hi
    };
    Ok((next_down(lo), next_up(hi)))
}

/// Affine coefficients and threshold enclosure at one index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaRecord {
    pub n: u64,
    pub a: CertifiedReal,
    pub b: CertifiedReal,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
}

impl AlphaRecord {
    pub fn new(
        counts: &PrimeCounts,
        theta: &ThetaAccumulator,
        log_p_next: &CertifiedReal,
    ) -> Result<Self> {
        let (a, b) = affine_coeffs(counts, theta, log_p_next);
        let (alpha_lo, alpha_hi) = alpha_n(&a, &b)?;
        Ok(AlphaRecord {
            n: counts.n,
            a,
            b,
            alpha_lo,
            alpha_hi,
        })
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.alpha_lo + self.alpha_hi)
    }
}
