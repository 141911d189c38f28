//! Incremental `π(n)`, `π(log n)` and `π(π(n))`.

use alloc::format;
use alloc::sync::Arc;

use crate::error::{Error, Result};
use crate::sieve::{BasePrimes, PrimeCursor};

/// The primes below 100.
pub const SMALL_PRIMES: [u8; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97,
];

/// `⌈e^p⌉` for the primes `p` with `e^p < 2^63`. For an integer `n`,
/// `p ≤ log n ⟺ n ≥ ⌈e^p⌉`, so `π(log n)` is an exact table lookup.
pub const EXP_PRIME_CEILINGS: [u64; 14] = [
    8,                   // e^2
    21,                  // e^3
    149,                 // e^5
    1097,                // e^7
    59_875,              // e^11
    442_414,             // e^13
    24_154_953,          // e^17
    178_482_301,         // e^19
    9_744_803_447,       // e^23
    3_931_334_297_145,   // e^29
    29_048_849_665_248,  // e^31
    11_719_142_372_802_612,     // e^37
    639_843_493_530_054_950,    // e^41
    4_727_839_468_229_346_562,  // e^43
];

/// Number of primes `≤ t` for a real `0 ≤ t < 100`.
pub fn pi_small(t: f64) -> Result<u32> {
    if !(t < 100.0) || t.is_nan() {
        return Err(Error::domain("pi_small", format!("t = {t} is not below 100")));
    }
    Ok(SMALL_PRIMES.iter().take_while(|&&p| (p as f64) <= t).count() as u32)
}

/// `π(log n)` for an integer `n ≥ 1`, decided exactly.
pub fn pi_log(n: u64) -> u32 {
    EXP_PRIME_CEILINGS.iter().take_while(|&&c| n >= c).count() as u32
}

/// The three counts at one index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeCounts {
    pub n: u64,
    pub pi_n: u64,
    pub pi_log_n: u64,
    pub pi_pi_n: u64,
}

/// Keeps [`PrimeCounts`] exact while `n` moves forward one step at a time.
///
/// One prime stream tells whether `n + 1` is prime; a second one walks the
/// primes up to `π(n)` lazily, so `π(π(n))` never needs a lookup table.
#[derive(Debug, Clone)]
pub struct CountingCursor {
    counts: PrimeCounts,
    /// Smallest prime greater than `n`.
    next_prime_above_n: u64,
    n_stream: PrimeCursor,
    /// Smallest prime greater than `π(n)`.
    next_prime_above_pi: u64,
    pi_stream: PrimeCursor,
}

/// Lowest index the counters support (`π(log n) ≥ 1` from here on).
pub const MIN_INDEX: u64 = 8;

impl CountingCursor {
    /// Cursor at `n = 8`: `(π(8), π(log 8), π(π(8))) = (4, 1, 2)`.
    pub fn new(base: Arc<BasePrimes>, segment_len: u64) -> Result<Self> {
        Self::resume(
            base,
            segment_len,
            PrimeCounts {
                n: 8,
                pi_n: 4,
                pi_log_n: 1,
                pi_pi_n: 2,
            },
        )
    }

    /// Cursor at a position whose counts the caller already knows.
    pub fn resume(base: Arc<BasePrimes>, segment_len: u64, counts: PrimeCounts) -> Result<Self> {
        if counts.n < MIN_INDEX {
            return Err(Error::domain(
                "CountingCursor",
                format!("n = {} < {MIN_INDEX}", counts.n),
            ));
        }
        if counts.pi_log_n != pi_log(counts.n) as u64 {
            return Err(Error::State("π(log n) does not match n"));
        }
        let mut n_stream =
            PrimeCursor::seek(base.clone(), segment_len, counts.n, counts.pi_n + 1)?;
        let next_prime_above_n = n_stream.next_prime()?;
        let mut pi_stream =
            PrimeCursor::seek(base, segment_len, counts.pi_n, counts.pi_pi_n + 1)?;
        let next_prime_above_pi = pi_stream.next_prime()?;
        Ok(CountingCursor {
            counts,
            next_prime_above_n,
            n_stream,
            next_prime_above_pi,
            pi_stream,
        })
    }

    pub fn counts(&self) -> PrimeCounts {
        self.counts
    }

    /// Moves to `n + 1`.
    pub fn advance(&mut self) -> Result<()> {
        let c = &mut self.counts;
        c.n += 1;
        if c.n == self.next_prime_above_n {
            self.next_prime_above_n = self.n_stream.next_prime()?;
            c.pi_n += 1;
            if c.pi_n == self.next_prime_above_pi {
                self.next_prime_above_pi = self.pi_stream.next_prime()?;
                c.pi_pi_n += 1;
            }
        }
        if let Some(&threshold) = EXP_PRIME_CEILINGS.get(c.pi_log_n as usize) {
            if c.n >= threshold {
                c.pi_log_n += 1;
            }
        }
        Ok(())
    }
}
