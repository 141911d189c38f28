//! Enclosures checked against an independent 192-bit evaluation.

use std::sync::Arc;

use astro_float::{BigFloat, Consts, RoundingMode};
use bonse_core::certified::cert_log;
use bonse_core::counters::pi_log;
use bonse_core::error_term::{e_n, e_n_high_precision};
use bonse_core::scan::{ScanConfig, Walker};
use bonse_core::sieve::{simple_sieve, BasePrimes};
use bonse_core::{Rational, Sign, ThetaAccumulator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const P: usize = 192;
const RM: RoundingMode = RoundingMode::ToEven;

struct Oracle {
    cc: Consts,
    primes: Vec<u32>,
}

impl Oracle {
    fn new(limit: u64) -> Self {
        Oracle {
            cc: Consts::new().unwrap(),
            primes: simple_sieve(limit),
        }
    }

    fn int(v: i128) -> BigFloat {
        assert!(v.unsigned_abs() < 1 << 53);
        BigFloat::from_f64(v as f64, P)
    }

    fn ln(&mut self, v: u64) -> BigFloat {
        Self::int(v as i128).ln(P, RM, &mut self.cc)
    }

    fn pi(&self, t: u64) -> u64 {
        self.primes.partition_point(|&p| p as u64 <= t) as u64
    }

    /// `ϑ(p_n)`.
    fn theta(&mut self, n: usize) -> BigFloat {
        let mut t = BigFloat::from_f64(0.0, P);
        for i in 0..n {
            let l = self.ln(self.primes[i] as u64);
            t = t.add(&l, P, RM);
        }
        t
    }

    /// `(a_n, b_n)` given `ϑ(p_n)`.
    fn affine(&mut self, n: u64, theta: &BigFloat) -> (BigFloat, BigFloat) {
        let pi_n = self.pi(n);
        let pi_pi = self.pi(pi_n);
        // primes q with q ≤ log n
        let pi_log = self
            .primes
            .iter()
            .take_while(|&&q| (q as f64) < (n as f64).ln())
            .count() as i128;
        let l = self.ln(self.primes[n as usize] as u64);
        let base = Self::int((n - pi_n) as i128)
            .add(&Self::int(pi_n as i128).div(&Self::int(pi_log), P, RM), P, RM);
        let a = theta.sub(&base.mul(&l, P, RM), P, RM);
        let b = Self::int(pi_pi as i128).mul(&l, P, RM);
        (a, b)
    }
}

fn le(a: &BigFloat, b: &BigFloat) -> bool {
    a.cmp(b).unwrap() <= 0
}

fn big(v: f64) -> BigFloat {
    BigFloat::from_f64(v, P)
}

#[test]
fn alpha_enclosures_contain_oracle_up_to_200() {
    let mut o = Oracle::new(10_000);
    let base = Arc::new(BasePrimes::new(10_000));
    let mut w = Walker::start(base, &ScanConfig::default()).unwrap();
    let mut theta = o.theta(8);
    for n in 8..=200u64 {
        assert_eq!(w.n(), n);
        let (a, b) = o.affine(n, &theta);
        let alpha = a.div(&b, P, RM).neg();
        let r = w.record().unwrap();
        assert!(
            le(&big(r.alpha_lo), &alpha) && le(&alpha, &big(r.alpha_hi)),
            "n = {n}: [{}, {}] misses {alpha}",
            r.alpha_lo,
            r.alpha_hi
        );
        let l = o.ln(o.primes[n as usize] as u64);
        theta = theta.add(&l, P, RM);
        w.step().unwrap();
    }
}

#[test]
fn published_alphas() {
    let base = Arc::new(BasePrimes::new(1000));
    let mut w = Walker::start(base, &ScanConfig::default()).unwrap();
    let want = [
        (8, 1.434598283984914),
        (9, 1.645617778969186),
        (10, 1.7107631471936996),
        (11, 1.264287515050569),
        (12, 1.339910727916699),
    ];
    for (n, v) in want {
        w.advance_to(n).unwrap();
        let r = w.record().unwrap();
        assert!((r.midpoint() - v).abs() < 1e-12, "alpha_{n} = {}", r.midpoint());
    }
}

#[test]
fn theta_radius_covers_oracle() {
    let mut o = Oracle::new(200_000);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut acc = ThetaAccumulator::new();
    let mut exact = BigFloat::from_f64(0.0, P);
    let count = o.primes.len();
    let checkpoints: Vec<usize> = {
        let mut v: Vec<usize> = (0..1000).map(|_| rng.gen_range(1..=count)).collect();
        v.sort_unstable();
        v
    };
    let mut next = checkpoints.iter().peekable();
    for i in 0..count {
        let p = o.primes[i] as u64;
        acc.add(&cert_log(p));
        let l = o.ln(p);
        exact = exact.add(&l, P, RM);
        while next.peek().is_some_and(|&&k| k == i + 1) {
            let v = acc.value();
            assert!(le(&big(v.lower()), &exact) && le(&exact, &big(v.upper())), "theta(p_{})", i + 1);
            next.next();
        }
    }
}

#[test]
fn certified_signs_agree_with_oracle() {
    let n_max = 10_000u64;
    let mut o = Oracle::new(120_000);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut samples: Vec<(u64, Rational)> = (0..10_000)
        .map(|_| {
            let n = rng.gen_range(8..=n_max);
            let den = rng.gen_range(1..=1000i128);
            let num = rng.gen_range(-1999 * den / 1000..=1999 * den / 1000);
            (n, Rational::new(num, den))
        })
        .collect();
    samples.sort_by_key(|s| s.0);

    let base = Arc::new(BasePrimes::new(120_000));
    let mut w = Walker::start(base, &ScanConfig::default()).unwrap();
    let mut theta = o.theta(8);
    let (mut decided, mut wrong) = (0, 0);
    for (n, x) in samples {
        while w.n() < n {
            let l = o.ln(o.primes[w.n() as usize] as u64);
            theta = theta.add(&l, P, RM);
            w.step().unwrap();
        }
        let (a, b) = w.affine();
        let (ea, eb) = o.affine(n, &theta);
        let xf = Oracle::int(x.numerator()).div(&Oracle::int(x.denominator()), P, RM);
        let exact = ea.add(&eb.mul(&xf, P, RM), P, RM);
        let sign = match e_n(&a, &b, &x).sign() {
            Sign::Indeterminate => e_n_high_precision(&w.hp_theta(), &w.counts(), &x, w.p_next())
                .unwrap()
                .sign(),
            s => s,
        };
        match sign {
            Sign::Positive => wrong += if exact.is_positive() { 0 } else { 1 },
            Sign::Negative => wrong += if exact.is_negative() { 0 } else { 1 },
            Sign::Indeterminate => continue,
        }
        decided += 1;
    }
    assert_eq!(wrong, 0);
    assert!(decided > 9_900, "{decided}");
    assert_eq!(pi_log(10_000), 4);
}
