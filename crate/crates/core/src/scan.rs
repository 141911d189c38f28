//! The certified sweep over `n`.
//!
//! A [`Walker`] carries `p_n`, `p_{n+1}`, `ϑ(p_n)` and the prime counts one
//! index at a time. [`PsiScan`] tests any number of `x` values against each
//! `(a_n, b_n)`; the other entry points reuse the same walker for `α_n`,
//! tail suprema `A_m` and plateau gaps.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::bounds::{n_upper, tail_alpha_bound, EffectiveConstants};
use crate::certified::{cert_log, CertifiedReal, Sign, ThetaAccumulator};
use crate::counters::{CountingCursor, PrimeCounts, MIN_INDEX};
use crate::error::{Error, Result};
use crate::error_term::{affine_coeffs, e_n_high_precision, AlphaRecord};
use crate::hp::{HpProduct, HpReal, HpTheta};
use crate::rational::Rational;
use crate::sieve::{sieve_limit_for, BasePrimes, PrimeCursor, DEFAULT_SEGMENT_LEN};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub segment_len: u64,
    /// Byte budget for base primes plus one sieve window.
    pub mem_budget: Option<u64>,
    /// High-precision `ϑ` is folded into a fresh snapshot this often.
    pub snapshot_every: u64,
    pub constants: EffectiveConstants,
    /// Hard cap for automatically extended tail scans.
    pub n_max: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            segment_len: DEFAULT_SEGMENT_LEN,
            mem_budget: None,
            snapshot_every: 1_000_000,
            constants: EffectiveConstants::default(),
            n_max: 100_000_000,
        }
    }
}

fn base_primes(n_last: u64, config: &ScanConfig) -> Result<Arc<BasePrimes>> {
    // The walker always holds p_{n+1}, and steps once past the last index.
    let limit = sieve_limit_for(n_last + 1);
    let base = match config.mem_budget {
        Some(budget) => BasePrimes::with_budget(limit, config.segment_len, budget)?,
        None => BasePrimes::new(limit),
    };
    Ok(Arc::new(base))
}

/// Serializable high-precision `ϑ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HpState {
    pub base: HpReal,
    pub base_count: u64,
    pub limbs: [u64; 4],
    pub exp2: i64,
    pub truncations: u64,
}

/// Per-`x` bookkeeping as stored in a checkpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackerState {
    pub x: Rational,
    pub last_nonpositive: Option<u64>,
    pub indeterminate: Vec<u64>,
}

/// Everything needed to continue a scan at index `n` (not yet tested).
#[derive(Debug, Clone, PartialEq)]
pub struct ScanState {
    pub n: u64,
    pub p_n: u64,
    pub p_next: u64,
    pub theta: ThetaAccumulator,
    pub counts: PrimeCounts,
    pub trackers: Vec<TrackerState>,
    pub hp: Option<HpState>,
}

/// Steps `n → n + 1` keeping `ϑ(p_n)`, `p_{n+1}` and the counts exact.
#[derive(Debug, Clone)]
pub struct Walker {
    primes: PrimeCursor,
    counts: CountingCursor,
    theta: ThetaAccumulator,
    hp: HpTheta,
    p_n: u64,
    p_next: u64,
    log_next: CertifiedReal,
    snapshot_every: u64,
}

impl Walker {
    /// A walker at `n = 8`.
    pub fn start(base: Arc<BasePrimes>, config: &ScanConfig) -> Result<Self> {
        let mut primes = PrimeCursor::new(base.clone(), config.segment_len);
        let mut theta = ThetaAccumulator::new();
        let mut hp = HpTheta::new();
        let mut p_n = 0;
        for _ in 0..MIN_INDEX {
            p_n = primes.next_prime()?;
            theta.add(&cert_log(p_n));
            hp.push(p_n);
        }
        let p_next = primes.next_prime()?;
        Ok(Walker {
            primes,
            counts: CountingCursor::new(base, config.segment_len)?,
            theta,
            hp,
            p_n,
            p_next,
            log_next: cert_log(p_next),
            snapshot_every: config.snapshot_every.max(1),
        })
    }

    pub fn resume(base: Arc<BasePrimes>, config: &ScanConfig, state: &ScanState) -> Result<Self> {
        let n = state.n;
        if state.counts.n != n || state.theta.count != n {
            return Err(Error::State("index, counts and θ disagree"));
        }
        if !(state.p_n < state.p_next) {
            return Err(Error::State("p_n ≥ p_{n+1}"));
        }
        let hp = match &state.hp {
            Some(h) => {
                let product = HpProduct::from_raw(h.limbs, h.exp2, h.truncations)?;
                if h.base_count > n {
                    return Err(Error::State("high-precision snapshot is ahead of the scan"));
                }
                HpTheta::from_parts(h.base.clone(), h.base_count, product, n)
            }
            None => return Err(Error::State("missing high-precision snapshot")),
        };
        let primes = PrimeCursor::seek(base.clone(), config.segment_len, state.p_next, n + 2)?;
        Ok(Walker {
            primes,
            counts: CountingCursor::resume(base, config.segment_len, state.counts)?,
            theta: state.theta,
            hp,
            p_n: state.p_n,
            p_next: state.p_next,
            log_next: cert_log(state.p_next),
            snapshot_every: config.snapshot_every.max(1),
        })
    }

    pub fn n(&self) -> u64 {
        self.counts.counts().n
    }

    pub fn counts(&self) -> PrimeCounts {
        self.counts.counts()
    }

    pub fn p_n(&self) -> u64 {
        self.p_n
    }

    pub fn p_next(&self) -> u64 {
        self.p_next
    }

    pub fn theta(&self) -> &ThetaAccumulator {
        &self.theta
    }

    pub fn log_next(&self) -> &CertifiedReal {
        &self.log_next
    }

    /// High-precision enclosure of `ϑ(p_n)`.
    pub fn hp_theta(&self) -> HpReal {
        self.hp.value()
    }

    pub fn affine(&self) -> (CertifiedReal, CertifiedReal) {
        affine_coeffs(&self.counts.counts(), &self.theta, &self.log_next)
    }

    pub fn record(&self) -> Result<AlphaRecord> {
        AlphaRecord::new(&self.counts.counts(), &self.theta, &self.log_next)
    }

    pub fn step(&mut self) -> Result<()> {
        self.theta.add(&self.log_next);
        self.hp.push(self.p_next);
        if self.hp.count().is_multiple_of(self.snapshot_every) {
            self.hp.fold();
        }
        self.p_n = self.p_next;
        self.p_next = self.primes.next_prime()?;
        self.log_next = cert_log(self.p_next);
        self.counts.advance()
    }

    /// Steps until `n == target`.
    pub fn advance_to(&mut self, target: u64) -> Result<()> {
        while self.n() < target {
            self.step()?;
        }
        Ok(())
    }

    fn hp_state(&self) -> HpState {
        let (base, base_count, product) = self.hp.parts();
        let (limbs, exp2, truncations) = product.raw();
        HpState {
            base: base.clone(),
            base_count,
            limbs,
            exp2,
            truncations,
        }
    }
}

/// `Ψ(x)` together with how it was established.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiResult {
    pub x: Rational,
    pub psi: u64,
    pub last_nonpositive: Option<u64>,
    /// The ceiling past which the effective bound makes `E_n(x)` positive.
    pub n_upper_used: u64,
    /// Last index actually tested.
    pub scanned_to: u64,
    /// Indices whose sign stayed undecided after escalation.
    pub indeterminate_ns: Vec<u64>,
    /// Reached `N_upper` with every sign decided. Never set for `x < 0`:
    /// the effective bound is violated there (e.g. `n = 3835`, `x = −1.127`).
    pub certified: bool,
}

#[derive(Debug, Clone)]
struct PsiTracker {
    x: Rational,
    x_cert: CertifiedReal,
    n_upper: u64,
    /// Last index to test; `< 8` means nothing to scan.
    stop: u64,
    last_nonpositive: Option<u64>,
    indeterminate: Vec<u64>,
}

impl PsiTracker {
    fn new(x: Rational, ceiling: Option<u64>, c: &EffectiveConstants) -> Result<Self> {
        let (n_up, stop) = if x >= Rational::from_integer(2) {
            (MIN_INDEX, 0)
        } else if x <= Rational::from_integer(-2) {
            return Err(Error::domain(
                "scan_psi",
                alloc::format!("x = {x} is not in (-2, 2)"),
            ));
        } else {
            let n_up = n_upper(x.to_f64(), c)?;
            (n_up, ceiling.map_or(n_up, |cap| cap.min(n_up)))
        };
        Ok(PsiTracker {
            x,
            x_cert: CertifiedReal::from_rational(&x),
            n_upper: n_up,
            stop,
            last_nonpositive: None,
            indeterminate: Vec::new(),
        })
    }

    fn result(&self, next_n: u64) -> PsiResult {
        let scanned_to = if self.stop < MIN_INDEX {
            MIN_INDEX
        } else {
            self.stop.min(next_n.saturating_sub(1))
        };
        let reached = self.stop < MIN_INDEX || scanned_to >= self.n_upper;
        PsiResult {
            x: self.x,
            psi: self.last_nonpositive.map_or(MIN_INDEX, |n| n + 1),
            last_nonpositive: self.last_nonpositive,
            n_upper_used: self.n_upper,
            scanned_to,
            indeterminate_ns: self.indeterminate.clone(),
            certified: reached && self.indeterminate.is_empty() && !self.x.is_negative(),
        }
    }
}

/// A resumable single pass computing `Ψ(x)` for several `x` at once.
#[derive(Debug, Clone)]
pub struct PsiScan {
    walker: Walker,
    trackers: Vec<PsiTracker>,
    n_stop: u64,
}

impl PsiScan {
    pub fn new(xs: &[Rational], ceiling: Option<u64>, config: &ScanConfig) -> Result<Self> {
        let trackers = Self::trackers(xs, ceiling, config)?;
        let n_stop = trackers.iter().map(|t| t.stop).max().unwrap_or(0).max(MIN_INDEX);
        let walker = Walker::start(base_primes(n_stop, config)?, config)?;
        Ok(PsiScan {
            walker,
            trackers,
            n_stop,
        })
    }

    /// Continues from a checkpointed state; the `x` values come from the state.
    pub fn resume(state: &ScanState, ceiling: Option<u64>, config: &ScanConfig) -> Result<Self> {
        let xs: Vec<Rational> = state.trackers.iter().map(|t| t.x).collect();
        let mut trackers = Self::trackers(&xs, ceiling, config)?;
        for (t, s) in trackers.iter_mut().zip(&state.trackers) {
            if s.last_nonpositive.is_some_and(|n| n >= state.n) {
                return Err(Error::State("tracker is ahead of the scan"));
            }
            t.last_nonpositive = s.last_nonpositive;
            t.indeterminate = s.indeterminate.clone();
        }
        let n_stop = trackers.iter().map(|t| t.stop).max().unwrap_or(0).max(MIN_INDEX);
        let walker = Walker::resume(base_primes(n_stop.max(state.n), config)?, config, state)?;
        Ok(PsiScan {
            walker,
            trackers,
            n_stop,
        })
    }

    fn trackers(xs: &[Rational], ceiling: Option<u64>, config: &ScanConfig) -> Result<Vec<PsiTracker>> {
        if xs.is_empty() {
            return Err(Error::domain("scan_psi", "no x values"));
        }
        xs.iter()
            .map(|&x| PsiTracker::new(x, ceiling, &config.constants))
            .collect()
    }

    /// Next index to be tested.
    pub fn n(&self) -> u64 {
        self.walker.n()
    }

    /// Last index any tracker needs.
    pub fn n_stop(&self) -> u64 {
        self.n_stop
    }

    pub fn is_done(&self) -> bool {
        self.n() > self.n_stop
    }

    pub fn theta(&self) -> &ThetaAccumulator {
        self.walker.theta()
    }

    /// Tests every index up to `min(last, n_stop)`.
    pub fn run_to(&mut self, last: u64) -> Result<()> {
        let last = last.min(self.n_stop);
        while self.walker.n() <= last {
            self.test_current()?;
            self.walker.step()?;
        }
        Ok(())
    }

    pub fn run(&mut self) -> Result<()> {
        self.run_to(self.n_stop)
    }

    fn test_current(&mut self) -> Result<()> {
        let n = self.walker.n();
        let (a, b) = self.walker.affine();
        let mut hp_theta: Option<HpReal> = None;
        for t in self.trackers.iter_mut().filter(|t| n <= t.stop) {
            let e = a.add(&b.mul(&t.x_cert));
            match e.sign() {
                Sign::Positive => {}
                Sign::Negative => t.last_nonpositive = Some(n),
                Sign::Indeterminate => {
                    let theta = hp_theta.get_or_insert_with(|| self.walker.hp_theta());
                    let e_hp = e_n_high_precision(
                        theta,
                        &self.walker.counts(),
                        &t.x,
                        self.walker.p_next(),
                    )?;
                    match e_hp.sign() {
                        Sign::Positive => {}
                        Sign::Negative => t.last_nonpositive = Some(n),
                        Sign::Indeterminate => {
                            t.last_nonpositive = Some(n);
                            t.indeterminate.push(n);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn state(&self) -> ScanState {
        ScanState {
            n: self.walker.n(),
            p_n: self.walker.p_n(),
            p_next: self.walker.p_next(),
            theta: *self.walker.theta(),
            counts: self.walker.counts(),
            trackers: self
                .trackers
                .iter()
                .map(|t| TrackerState {
                    x: t.x,
                    last_nonpositive: t.last_nonpositive,
                    indeterminate: t.indeterminate.clone(),
                })
                .collect(),
            hp: Some(self.walker.hp_state()),
        }
    }

    pub fn results(&self) -> Vec<PsiResult> {
        let next = self.walker.n();
        self.trackers.iter().map(|t| t.result(next)).collect()
    }
}

/// `Ψ(x)` for each `x` in one pass. With a `ceiling` below a value's
/// `N_upper(x)` that value comes back uncertified.
pub fn scan_psi(xs: &[Rational], ceiling: Option<u64>, config: &ScanConfig) -> Result<Vec<PsiResult>> {
    let mut scan = PsiScan::new(xs, ceiling, config)?;
    scan.run()?;
    Ok(scan.results())
}

/// Largest `α_n` seen over a range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeSummary {
    pub n_from: u64,
    pub n_to: u64,
    /// Index with the largest `alpha_hi`.
    pub argmax: u64,
    pub max_lo: f64,
    pub max_hi: f64,
}

/// Emits one [`AlphaRecord`] per `n` in `[n_from, n_to]`.
pub fn scan_alpha_envelope<F: FnMut(&AlphaRecord)>(
    n_from: u64,
    n_to: u64,
    config: &ScanConfig,
    mut sink: F,
) -> Result<EnvelopeSummary> {
    if n_from < MIN_INDEX || n_from > n_to {
        return Err(Error::domain(
            "scan_alpha_envelope",
            alloc::format!("need 8 ≤ n_from ≤ n_to, got [{n_from}, {n_to}]"),
        ));
    }
    let mut walker = Walker::start(base_primes(n_to, config)?, config)?;
    walker.advance_to(n_from)?;
    let mut summary = EnvelopeSummary {
        n_from,
        n_to,
        argmax: n_from,
        max_lo: f64::NEG_INFINITY,
        max_hi: f64::NEG_INFINITY,
    };
    loop {
        let rec = walker.record()?;
        sink(&rec);
        if rec.alpha_hi > summary.max_hi {
            summary.max_hi = rec.alpha_hi;
            summary.argmax = rec.n;
        }
        summary.max_lo = summary.max_lo.max(rec.alpha_lo);
        if walker.n() == n_to {
            return Ok(summary);
        }
        walker.step()?;
    }
}

/// Enclosure of `A_m = sup_{n ≥ m} α_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSup {
    pub m: u64,
    pub lo: f64,
    pub hi: f64,
    /// Index with the largest `alpha_hi` in `[m, reached]`.
    pub argmax: u64,
    /// The scan covered `[m, reached]`; beyond it `α_n ≤ tail_bound`.
    pub reached: u64,
    pub tail_bound: Option<f64>,
    pub certified: bool,
}

#[derive(Debug, Clone, Copy)]
struct Block {
    lo: f64,
    hi: f64,
    argmax: u64,
}

impl Block {
    const EMPTY: Block = Block {
        lo: f64::NEG_INFINITY,
        hi: f64::NEG_INFINITY,
        argmax: 0,
    };

    fn update(&mut self, r: &AlphaRecord) {
        self.lo = self.lo.max(r.alpha_lo);
        if r.alpha_hi > self.hi {
            self.hi = r.alpha_hi;
            self.argmax = r.n;
        }
    }

    fn merge(&self, o: &Block) -> Block {
        Block {
            lo: self.lo.max(o.lo),
            hi: self.hi.max(o.hi),
            argmax: if o.hi > self.hi { o.argmax } else { self.argmax },
        }
    }
}

/// `A_m` for every `m` in `ms` from a single scan.
///
/// The scan runs to at least `scan_to` and then until the tail bound
/// `α_n ≤ −2 + (c1 log log n + c2)/log n` drops strictly below the running
/// maximum for the largest `m`, or until `config.n_max`.
pub fn tail_sups(ms: &[u64], scan_to: Option<u64>, config: &ScanConfig) -> Result<Vec<TailSup>> {
    let mut sorted: Vec<u64> = ms.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let Some(&m_min) = sorted.first() else {
        return Err(Error::domain("tail_sup", "no m values"));
    };
    if m_min < MIN_INDEX {
        return Err(Error::domain("tail_sup", alloc::format!("m = {m_min} < 8")));
    }
    let m_last = *sorted.last().unwrap();
    let c = &config.constants;
    let n_cap = config.n_max.max(m_last);
    let n_min = scan_to.unwrap_or(0).max(m_last).min(n_cap);

    let mut walker = Walker::start(base_primes(n_cap, config)?, config)?;
    walker.advance_to(m_min)?;
    let mut blocks = vec![Block::EMPTY; sorted.len()];
    let mut block = 0;
    loop {
        let n = walker.n();
        while block + 1 < sorted.len() && sorted[block + 1] <= n {
            block += 1;
        }
        blocks[block].update(&walker.record()?);
        if n >= n_cap {
            break;
        }
        if n >= n_min && n >= c.n_floor && tail_alpha_bound(n, c)? < blocks[sorted.len() - 1].lo {
            break;
        }
        walker.step()?;
    }

    let reached = walker.n();
    let tail_bound = if reached >= c.n_floor {
        Some(tail_alpha_bound(reached, c)?)
    } else {
        None
    };
    let mut suffix = Block::EMPTY;
    let mut out = vec![None; sorted.len()];
    for i in (0..sorted.len()).rev() {
        suffix = blocks[i].merge(&suffix);
        out[i] = Some(TailSup {
            m: sorted[i],
            lo: suffix.lo,
            hi: suffix.hi,
            argmax: suffix.argmax,
            reached,
            tail_bound,
            certified: tail_bound.is_some_and(|t| t < suffix.lo),
        });
    }
    let by_m: Vec<TailSup> = out.into_iter().flatten().collect();
    Ok(ms
        .iter()
        .map(|m| by_m[sorted.binary_search(m).unwrap()])
        .collect())
}

pub fn tail_sup(m: u64, scan_to: Option<u64>, config: &ScanConfig) -> Result<TailSup> {
    Ok(tail_sups(&[m], scan_to, config)?[0])
}

/// Certified lower bound `Δ_m = max(0, A_m⁻ − A_{m+1}⁺)` on a plateau length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateauGap {
    pub m: u64,
    pub gap: f64,
    pub a_m: TailSup,
    pub a_next: TailSup,
}

pub fn plateau_gaps(ms: &[u64], config: &ScanConfig) -> Result<Vec<PlateauGap>> {
    let mut all: Vec<u64> = ms.iter().flat_map(|&m| [m, m + 1]).collect();
    all.sort_unstable();
    all.dedup();
    let sups = tail_sups(&all, None, config)?;
    let find = |m: u64| sups[all.binary_search(&m).unwrap()];
    ms.iter()
        .map(|&m| {
            let (a_m, a_next) = (find(m), find(m + 1));
            for s in [a_m, a_next] {
                if !s.certified {
                    return Err(Error::UncertifiedTail {
                        m: s.m,
                        reached: s.reached,
                    });
                }
            }
            Ok(PlateauGap {
                m,
                gap: (a_m.lo - a_next.hi).max(0.0),
                a_m,
                a_next,
            })
        })
        .collect()
}

pub fn plateau_gap(m: u64, config: &ScanConfig) -> Result<PlateauGap> {
    Ok(plateau_gaps(&[m], config)?[0])
}

/// `Δ_m` next to the normalized `Δ_m · m log² m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateauScaleRow {
    pub m: u64,
    pub gap: f64,
    pub normalized: f64,
}

pub fn plateau_scale_report(ms: &[u64], config: &ScanConfig) -> Result<Vec<PlateauScaleRow>> {
    Ok(plateau_gaps(ms, config)?
        .into_iter()
        .map(|g| {
            let l = libm::log(g.m as f64);
            PlateauScaleRow {
                m: g.m,
                gap: g.gap,
                normalized: g.gap * g.m as f64 * l * l,
            }
        })
        .collect())
}

/// Outcome of checking `Ψ(a) = Ψ(b)`; since `Ψ` is non-increasing this
/// pins `Ψ` on all of `[a, b]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constancy {
    pub at_a: PsiResult,
    pub at_b: PsiResult,
    pub constant: bool,
}

pub fn verify_interval_constancy(a: Rational, b: Rational, config: &ScanConfig) -> Result<Constancy> {
    if a > b {
        return Err(Error::domain(
            "verify_interval_constancy",
            alloc::format!("empty interval [{a}, {b}]"),
        ));
    }
    if !a.is_between(-2, 2) || !b.is_between(-2, 2) {
        return Err(Error::domain(
            "verify_interval_constancy",
            alloc::format!("[{a}, {b}] is not inside (-2, 2)"),
        ));
    }
    let mut r = scan_psi(&[a, b], None, config)?;
    let at_b = r.pop().unwrap();
    let at_a = r.pop().unwrap();
    let constant = at_a.certified && at_b.certified && at_a.psi == at_b.psi;
    Ok(Constancy {
        at_a,
        at_b,
        constant,
    })
}
