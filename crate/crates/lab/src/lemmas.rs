//! Runtime check of the explicit bounds for `π(t)`, `p_n` and `ϑ(p_n)`
//! against exact sieve data.

use std::sync::Arc;

use anyhow::Result;
use bonse_core::bounds::{axler_pn_upper, axler_theta_lower, dusart_pi_bounds};
use bonse_core::certified::{cert_log, next_down};
use bonse_core::sieve::{sieve_limit_for, BasePrimes, PrimeCursor};
use bonse_core::ThetaAccumulator;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaRow {
    pub lemma: &'static str,
    pub domain: String,
    pub checked: u64,
    pub violations: u64,
    pub first_violation: Option<String>,
}

impl LemmaRow {
    fn new(lemma: &'static str, domain: String) -> Self {
        LemmaRow {
            lemma,
            domain,
            checked: 0,
            violations: 0,
            first_violation: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(what());
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LemmaConfig {
    /// Largest `t` for the `π` bounds and largest `n` sampled for the others.
    pub limit: u64,
    pub samples: usize,
    pub seed: u64,
    pub segment_len: u64,
}

/// `π` sandwich on every integer `t ∈ [2, limit]` and just below `t + 1`;
/// `p_n` and `ϑ(p_n)` bounds at random `n`.
pub fn verify_lemmas(cfg: &LemmaConfig) -> Result<Vec<LemmaRow>> {
    let limit = cfg.limit.max(3468);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pn_samples: Vec<u64> = (0..cfg.samples).map(|_| rng.gen_range(3468..=limit)).collect();
    let mut theta_samples: Vec<u64> = (0..cfg.samples).map(|_| rng.gen_range(2..=limit)).collect();
    pn_samples.sort_unstable();
    theta_samples.sort_unstable();

    let base = Arc::new(BasePrimes::new(sieve_limit_for(limit)));

    let mut pi_row = LemmaRow::new("pi bounds", format!("t in [2, {limit}]"));
    let mut cursor = PrimeCursor::new(base.clone(), cfg.segment_len);
    let mut next = cursor.next_prime()?;
    let mut pi = 0u64;
    for t in 2..=limit {
        while next <= t {
            pi += 1;
            next = cursor.next_prime()?;
        }
        let tf = t as f64;
        let (lower, upper) = dusart_pi_bounds(tf)?;
        pi_row.check(pi as f64 <= upper, || format!("pi({t}) = {pi} > {upper}"));
        if let Some(lower) = lower {
            pi_row.check(lower <= pi as f64, || format!("pi({t}) = {pi} < {lower}"));
            // π is constant on [t, t+1) while t/log t grows
            let below_next = next_down(tf + 1.0);
            let (lower_next, _) = dusart_pi_bounds(below_next)?;
            let lower_next = lower_next.unwrap();
            pi_row.check(lower_next <= pi as f64, || {
                format!("pi({below_next}) = {pi} < {lower_next}")
            });
        }
    }

    let mut pn_row = LemmaRow::new("p_n upper bound", format!("{} random n in [3468, {limit}]", cfg.samples));
    let mut theta_row = LemmaRow::new("theta lower bound", format!("{} random n in [2, {limit}]", cfg.samples));
    let mut cursor = PrimeCursor::new(base, cfg.segment_len);
    let mut theta = ThetaAccumulator::new();
    let (mut i, mut j) = (0, 0);
    let last = pn_samples.last().copied().unwrap_or(0).max(theta_samples.last().copied().unwrap_or(0));
    for n in 1..=last {
        let p = cursor.next_prime()?;
        theta.add(&cert_log(p));
        while i < pn_samples.len() && pn_samples[i] == n {
            let bound = axler_pn_upper(n)?;
            pn_row.check(p as f64 <= bound, || format!("p_{n} = {p} > {bound}"));
            i += 1;
        }
        while j < theta_samples.len() && theta_samples[j] == n {
            let bound = axler_theta_lower(n)?;
            let exact = theta.value();
            theta_row.check(bound < exact.lower(), || {
                format!("theta(p_{n}) = {} ± {} ≤ {bound}", exact.value, exact.radius)
            });
            j += 1;
        }
    }
    Ok(vec![pi_row, pn_row, theta_row])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_has_no_violations() {
        let rows = verify_lemmas(&LemmaConfig {
            limit: 50_000,
            samples: 50,
            seed: 7,
            segment_len: 1 << 16,
        })
        .unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert_eq!(r.violations, 0, "{r:?}");
            assert!(r.checked > 0);
        }
        assert_eq!(rows[1].checked, 50);
    }
}
