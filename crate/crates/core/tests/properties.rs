use std::sync::Arc;

use bonse_core::bounds::{
    closed_form_bound, effective_lower_bound, n_upper, tail_alpha_bound, unconditional_log_threshold,
};
use bonse_core::error_term::{e_n, e_n_direct};
use bonse_core::scan::{ScanConfig, Walker};
use bonse_core::sieve::{sieve_limit_for, BasePrimes};
use bonse_core::{CertifiedReal, EffectiveConstants, Rational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn walker_at(n: u64) -> Walker {
    let base = Arc::new(BasePrimes::new(sieve_limit_for(n.max(20_000))));
    let mut w = Walker::start(base, &ScanConfig::default()).unwrap();
    w.advance_to(n).unwrap();
    w
}

fn overlap(u: &CertifiedReal, v: &CertifiedReal) -> bool {
    u.lower() <= v.upper() && v.lower() <= u.upper()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn affine_matches_direct(n in 8u64..=10_000) {
        let w = walker_at(n);
        let (a, b) = w.affine();
        for x in [Rational::from_integer(-1), Rational::from_integer(0), Rational::new(1, 2),
                  Rational::from_integer(1), Rational::from_integer(2)] {
            let affine = e_n(&a, &b, &x);
            let direct = e_n_direct(&w.counts(), w.theta(), &x, w.log_next()).unwrap();
            prop_assert!(overlap(&affine, &direct), "n = {} x = {}", n, x);
        }
    }

    #[test]
    fn n_upper_is_monotone(x in -0.9f64..1.99, dx in 1e-6f64..0.5) {
        let c = EffectiveConstants::default();
        let y = (x + dx).min(1.999);
        prop_assume!(y > x);
        prop_assert!(n_upper(y, &c).unwrap() <= n_upper(x, &c).unwrap());
    }

    #[test]
    fn closed_form_dominates_threshold(x in -1.0f64..1.99) {
        let c = EffectiveConstants::default();
        let y = unconditional_log_threshold(x, &c).unwrap();
        prop_assert!(closed_form_bound(x, &c).unwrap() >= y.exp());
    }
}

#[test]
fn effective_bound_below_enclosure_for_nonnegative_x() {
    let c = EffectiveConstants::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pts: Vec<(u64, i128)> = (0..200).map(|_| (rng.gen_range(3468..=1_000_000), rng.gen_range(0..=1999))).collect();
    pts.sort_unstable();
    let base = Arc::new(BasePrimes::new(sieve_limit_for(1_000_000)));
    let mut w = Walker::start(base, &ScanConfig::default()).unwrap();
    for (n, k) in pts {
        w.advance_to(n).unwrap();
        let x = Rational::new(k, 1000);
        let (a, b) = w.affine();
        let e = e_n(&a, &b, &x);
        let lower = effective_lower_bound(n, x.to_f64(), &c).unwrap();
        assert!(lower <= e.lower(), "n = {n} x = {x}: {lower} > {}", e.lower());
    }
}

#[test]
fn effective_bound_fails_for_negative_x() {
    let c = EffectiveConstants::default();
    let w = walker_at(3835);
    let (a, b) = w.affine();
    let x = Rational::new(-1127, 1000);
    let e = e_n(&a, &b, &x);
    assert!(e.upper() < effective_lower_bound(3835, x.to_f64(), &c).unwrap());
}

#[test]
fn tail_bound_decreases_and_dominates() {
    let c = EffectiveConstants::default();
    let mut w = walker_at(3468);
    let mut prev = f64::INFINITY;
    for n in 3468..=20_000u64 {
        let t = tail_alpha_bound(n, &c).unwrap();
        assert!(t <= prev);
        prev = t;
        let r = w.record().unwrap();
        assert!(r.alpha_hi <= t, "alpha_{n} = {} > {t}", r.alpha_hi);
        w.step().unwrap();
    }
}
