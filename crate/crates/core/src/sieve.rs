//! Segmented sieve of Eratosthenes with restartable cursors.
//!
//! Odd numbers only: bit `i` of a window based at the even number `w`
//! stands for `w + 2i + 1`, and 2 is emitted separately. The base primes up
//! to `√limit` are computed once and shared read-only between cursors, so any
//! number of cursors may walk the same range independently.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::bounds::axler_pn_upper;
use crate::error::{Error, Result};

/// Default window length in numbers (odd and even), 2^20.
pub const DEFAULT_SEGMENT_LEN: u64 = 1 << 20;

/// Sieve limit used when the requested index is below the validity range of
/// the explicit `p_n` upper bound.
pub const SMALL_SIEVE_LIMIT: u64 = 40_000;

/// Index from which the explicit upper bound for `p_n` holds.
pub const PN_BOUND_FLOOR: u64 = 3468;

/// Odd primes up to `√limit`, shared by every cursor sieving below `limit`.
#[derive(Debug)]
pub struct BasePrimes {
    primes: Vec<u32>,
    limit: u64,
}

impl BasePrimes {
    pub fn new(limit: u64) -> Self {
        let root = isqrt(limit);
        let primes = simple_sieve(root)
            .into_iter()
            .filter(|&p| p != 2)
            .collect();
        BasePrimes { primes, limit }
    }

    /// Like [`BasePrimes::new`], but refuses when the base table plus one
    /// window of `segment_len` numbers exceeds `budget` bytes.
    pub fn with_budget(limit: u64, segment_len: u64, budget: u64) -> Result<Self> {
        let needed = estimated_bytes(limit, segment_len);
        if needed > budget {
            return Err(Error::MemoryBudget { needed, budget });
        }
        Ok(Self::new(limit))
    }

    /// Largest value cursors built on this table may emit.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

/// Rough memory footprint of a base table for `limit` plus one window.
pub fn estimated_bytes(limit: u64, segment_len: u64) -> u64 {
    let root = isqrt(limit).max(2) as f64;
    // π(√L) ≤ 1.26 √L / log √L
    let base = (1.26 * root / libm::log(root).max(1.0)) as u64 * 4;
    base + segment_len / 16 + 64
}

/// Sieve size guaranteed to reach `p_{n_max + 1}`.
///
/// Uses the explicit upper bound for `p_n` (valid from `n = 3468`) with a 1%
/// margin; below that range a fixed limit of 40000 covers every prime needed.
pub fn sieve_limit_for(n_max: u64) -> u64 {
    if n_max < PN_BOUND_FLOOR {
        return SMALL_SIEVE_LIMIT;
    }
    let bound = axler_pn_upper(n_max + 1).expect("index is in range");
    libm::ceil(bound * 1.01) as u64
}

/// Plain sieve of Eratosthenes: every prime `≤ limit`, in order.
pub fn simple_sieve(limit: u64) -> Vec<u32> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u32);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

pub(crate) fn isqrt(v: u64) -> u64 {
    let mut r = libm::sqrt(v as f64) as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > v) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= v) {
        r += 1;
    }
    r
}

/// A cursor emitting `p_1, p_2, …` in order, sieving window by window.
#[derive(Debug, Clone)]
pub struct PrimeCursor {
    base: Arc<BasePrimes>,
    segment_len: u64,
    next_index: u64,
    window_base: u64,
    bits: Vec<u64>,
    word: usize,
    current: u64,
    current_limit: u64,
    pending_two: bool,
}

impl PrimeCursor {
    /// A cursor positioned before `p_1 = 2`.
    pub fn new(base: Arc<BasePrimes>, segment_len: u64) -> Self {
        let segment_len = normalize_segment(segment_len);
        PrimeCursor {
            base,
            segment_len,
            next_index: 1,
            window_base: 0,
            bits: Vec::new(),
            word: 0,
            current: 0,
            current_limit: 0,
            pending_two: true,
        }
    }

    /// A cursor whose next emission is the first prime greater than `after`,
    /// which the caller asserts is `p_{next_index}`.
    pub fn seek(
        base: Arc<BasePrimes>,
        segment_len: u64,
        after: u64,
        next_index: u64,
    ) -> Result<Self> {
        let mut cursor = Self::new(base, segment_len);
        if after < 2 {
            if next_index != 1 {
                return Err(Error::State("cursor index does not match position"));
            }
            return Ok(cursor);
        }
        cursor.pending_two = false;
        cursor.next_index = next_index;
        // Windows are aligned to multiples of the segment length.
        let window_base = (after + 1) / cursor.segment_len * cursor.segment_len;
        cursor.fill_window(window_base)?;
        let first = if after <= window_base {
            0
        } else {
            ((after - window_base) / 2) as usize
        };
        // `first` is the first bit whose value exceeds `after`.
        let first = if window_base + 2 * (first as u64) < after {
            first + 1
        } else {
            first
        };
        cursor.word = first / 64;
        cursor.current = if cursor.word < cursor.bits.len() {
            cursor.bits[cursor.word] & (!0u64 << (first % 64))
        } else {
            0
        };
        Ok(cursor)
    }

    /// Index (1-based) of the prime the next call will return.
    pub fn next_index(&self) -> u64 {
        self.next_index
    }

    /// Highest value sieved so far.
    pub fn current_limit(&self) -> u64 {
        self.current_limit
    }

    pub fn base(&self) -> &Arc<BasePrimes> {
        &self.base
    }

    pub fn segment_len(&self) -> u64 {
        self.segment_len
    }

    /// Returns `p_k` for the pre-call `next_index` `k` and advances.
    pub fn next_prime(&mut self) -> Result<u64> {
        if self.pending_two {
            self.pending_two = false;
            self.next_index += 1;
            return Ok(2);
        }
        while self.current == 0 {
            self.word += 1;
            if self.word >= self.bits.len() {
                let next_base = if self.bits.is_empty() {
                    0
                } else {
                    self.window_base + self.segment_len
                };
                self.fill_window(next_base)?;
                self.word = 0;
            }
            self.current = self.bits[self.word];
        }
        let bit = self.current.trailing_zeros() as u64;
        self.current &= self.current - 1;
        self.next_index += 1;
        Ok(self.window_base + 2 * (self.word as u64 * 64 + bit) + 1)
    }

    fn fill_window(&mut self, window_base: u64) -> Result<()> {
        let limit = self.base.limit;
        if window_base > limit {
            return Err(Error::SieveLimit {
                requested: window_base,
                limit,
            });
        }
        let odd_count = (self.segment_len / 2) as usize;
        let words = odd_count / 64;
        self.bits.clear();
        self.bits.resize(words, !0u64);
        self.window_base = window_base;
        let window_end = window_base + self.segment_len; // exclusive

        if window_base == 0 {
            // 1 is not prime
            self.bits[0] &= !1;
        }
        for &p in self.base.primes.iter() {
            let p = p as u64;
            let square = p * p;
            if square >= window_end {
                break;
            }
            let mut start = if square >= window_base {
                square
            } else {
                let r = window_base % p;
                let mut s = if r == 0 { window_base } else { window_base + p - r };
                if s % 2 == 0 {
                    s += p;
                }
                s
            };
            if start % 2 == 0 {
                start += p;
            }
            let mut j = ((start - window_base - 1) / 2) as usize;
            let step = p as usize;
            while j < odd_count {
                self.bits[j >> 6] &= !(1u64 << (j & 63));
                j += step;
            }
        }

        // Values above the limit are not sieved by the base table.
        if window_end - 1 > limit {
            let keep = (limit - window_base).div_ceil(2) as usize;
            for j in keep..odd_count {
                self.bits[j >> 6] &= !(1u64 << (j & 63));
            }
            self.current_limit = limit;
        } else {
            self.current_limit = window_end - 1;
        }
        self.word = 0;
        self.current = self.bits[0];
        if self.current_limit == limit && self.bits.iter().all(|&w| w == 0) {
            return Err(Error::SieveLimit {
                requested: window_end,
                limit,
            });
        }
        Ok(())
    }
}

fn normalize_segment(segment_len: u64) -> u64 {
    // Whole 64-bit words of odd numbers.
    let s = segment_len.max(128);
    s.div_ceil(128) * 128
}
