//! Explicit estimates and threshold solvers.
//!
//! Everything here is plain working precision. The outputs only feed
//! sufficient conditions (where a scan may stop, how large a sieve must be),
//! so each one is nudged in the conservative direction before use.

use alloc::format;
use alloc::vec::Vec;

use libm::{ceil, exp, log, pow, sqrt};

use crate::error::{Error, Result};

/// Published constants of the effective lower bound for `E_n(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveConstants {
    pub c1: f64,
    pub c2: f64,
    /// Smallest `n` for which the effective lower bound is valid.
    pub n_floor: u64,
    /// Constant of the conditional (RH) error term.
    pub c_rh: f64,
}

impl Default for EffectiveConstants {
    fn default() -> Self {
        EffectiveConstants {
            c1: 8.0,
            c2: 14.0,
            n_floor: 3468,
            c_rh: 1.0 / (8.0 * core::f64::consts::PI),
        }
    }
}

/// Added to a solved `y*` before taking `⌈exp(y*)⌉`.
pub const LOG_NUDGE: f64 = 1e-9;

const FIXED_POINT_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 10_000;
/// `log(2^63)`: thresholds above this do not fit in a `u64`.
const LOG_U64_CEILING: f64 = 43.668_272_375_276_55;

fn check_open_interval(op: &'static str, x: f64) -> Result<f64> {
    if x > -2.0 && x < 2.0 {
        Ok(x + 2.0)
    } else {
        Err(Error::domain(op, format!("x = {x} is outside (-2, 2)")))
    }
}

/// Two-sided bounds for `π(t)`: the lower bound `t/log t` (only for
/// `t ≥ 17`) and the upper bound `t/log t · (1 + 1/log t + 2.53816/log² t)`.
pub fn dusart_pi_bounds(t: f64) -> Result<(Option<f64>, f64)> {
    if !(t >= 2.0) {
        return Err(Error::domain("dusart_pi_bounds", format!("t = {t} < 2")));
    }
    let l = log(t);
    let main = t / l;
    let upper = main * (1.0 + 1.0 / l + 2.53816 / (l * l));
    let lower = (t >= 17.0).then_some(main);
    Ok((lower, upper))
}

/// Upper bound for the `n`-th prime, valid for `n ≥ 3468`.
pub fn axler_pn_upper(n: u64) -> Result<f64> {
    if n < 3468 {
        return Err(Error::domain("axler_pn_upper", format!("n = {n} < 3468")));
    }
    let nf = n as f64;
    let l = log(nf);
    let ll = log(l);
    Ok(nf * (l + ll - 1.0 + (ll - 2.0) / l - (ll * ll - 6.0 * ll) / (2.0 * l * l)))
}

/// Lower bound for `ϑ(p_n)`, valid for `n ≥ 2`.
pub fn axler_theta_lower(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("axler_theta_lower", format!("n = {n} < 2")));
    }
    let nf = n as f64;
    let l = log(nf);
    let ll = log(l);
    Ok(nf * (l + ll - 1.0 + (ll - 2.0) / l - (ll * ll - 6.0 * ll + 11.621) / (2.0 * l * l)))
}

/// `(x+2) n/y − (c1 log y + c2) n/y²` with `y = log n`, rounded downward.
pub fn effective_lower_bound(n: u64, x: f64, c: &EffectiveConstants) -> Result<f64> {
    if n < c.n_floor {
        return Err(Error::domain(
            "effective_lower_bound",
            format!("n = {n} < {}", c.n_floor),
        ));
    }
    let nf = n as f64;
    let y = log(nf);
    let main = (x + 2.0) * nf / y;
    let correction = (c.c1 * log(y) + c.c2) * nf / (y * y);
    let slack = (main.abs() + correction.abs()) * 1e-14;
    Ok(main - correction - slack)
}

/// Upper bound for `α_n` implied by the effective lower bound:
/// `−2 + (c1 log log n + c2)/log n`, rounded upward. Decreasing in `n`.
pub fn tail_alpha_bound(n: u64, c: &EffectiveConstants) -> Result<f64> {
    if n < c.n_floor {
        return Err(Error::domain(
            "tail_alpha_bound",
            format!("n = {n} < {}", c.n_floor),
        ));
    }
    let y = log(n as f64);
    let t = (c.c1 * log(y) + c.c2) / y;
    Ok(-2.0 + t + (2.0 + t.abs()) * 1e-14)
}

/// The fixed point `y*` of `y = (c1 log y + c2)/(x+2)` on `[e, ∞)`.
pub fn unconditional_log_threshold(x: f64, c: &EffectiveConstants) -> Result<f64> {
    let s = check_open_interval("n_upper", x)?;
    let mut y = f64::max(core::f64::consts::E, (c.c1 + c.c2) / s);
    for _ in 0..MAX_ITERATIONS {
        let next = (c.c1 * log(y) + c.c2) / s;
        let done = (next - y).abs() < FIXED_POINT_TOL;
        y = next;
        if done {
            break;
        }
    }
    Ok(y)
}

/// `N_upper(x) = ⌈exp(y*)⌉`: beyond it the effective bound forces `E_n(x) > 0`.
/// Never below the validity floor of the bound.
pub fn n_upper(x: f64, c: &EffectiveConstants) -> Result<u64> {
    let y = unconditional_log_threshold(x, c)? + LOG_NUDGE;
    if y >= LOG_U64_CEILING {
        return Err(Error::Overflow { log_value: y });
    }
    let n = ceil(exp(y)) as u64;
    Ok(n.max(c.n_floor))
}

/// `((c1+c2)/(x+2))^(2(c1+c2)/(x+2))`.
pub fn closed_form_bound(x: f64, c: &EffectiveConstants) -> Result<f64> {
    let s = check_open_interval("closed_form_bound", x)?;
    let a = (c.c1 + c.c2) / s;
    Ok(pow(a, 2.0 * a))
}

/// `(c1/(x+2))^(c1/(x+2))`, the leading behaviour of `Ψ(x)` as `x → −2⁺`.
pub fn asymptotic_psi(x: f64, c: &EffectiveConstants) -> Result<f64> {
    if !(x > -2.0) {
        return Err(Error::domain("asymptotic_psi", format!("x = {x} ≤ -2")));
    }
    let a = c.c1 / (x + 2.0);
    Ok(pow(a, a))
}

/// Conditional threshold from `y = 5 log y + 2 log(c_rh/(x+2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhThreshold {
    pub y_star: f64,
    /// `⌈exp(y*)⌉`, saturating at `u128::MAX`.
    pub n_rh: u128,
    pub solved: bool,
}

/// Lower edge of the region where `y − 5 log y` is increasing.
pub const RH_Y_MIN: f64 = 5.0;

pub fn rh_n_upper(x: f64, c: &EffectiveConstants) -> Result<RhThreshold> {
    let s = check_open_interval("rh_n_upper", x)?;
    let shift = 2.0 * log(c.c_rh / s);
    let unsolved = RhThreshold {
        y_star: RH_Y_MIN,
        n_rh: ceil(exp(RH_Y_MIN)) as u128,
        solved: false,
    };
    // f(y) = y − 5 log y − shift has its minimum at y = 5.
    if RH_Y_MIN - 5.0 * log(RH_Y_MIN) - shift > 0.0 {
        return Ok(unsolved);
    }
    let mut y = 10.0 + f64::max(0.0, shift);
    for _ in 0..MAX_ITERATIONS {
        let next = 5.0 * log(y) + shift;
        if next < RH_Y_MIN {
            return Ok(unsolved);
        }
        let done = (next - y).abs() < FIXED_POINT_TOL;
        y = next;
        if done {
            let e = exp(y + LOG_NUDGE);
            let n_rh = if e >= u128::MAX as f64 {
                u128::MAX
            } else {
                ceil(e) as u128
            };
            return Ok(RhThreshold {
                y_star: y,
                n_rh,
                solved: true,
            });
        }
    }
    Ok(unsolved)
}

/// One row of the unconditional-versus-conditional error comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhErrorRow {
    pub n: f64,
    /// `n log log n / log² n`
    pub unconditional: f64,
    /// `√n log^{3/2} n`
    pub conditional: f64,
    pub ratio: f64,
}

pub fn rh_error_report(n_values: &[f64]) -> Result<Vec<RhErrorRow>> {
    n_values
        .iter()
        .map(|&n| {
            if !(n >= 16.0) {
                return Err(Error::domain("rh_error_report", format!("n = {n} < 16")));
            }
            let l = log(n);
            let unconditional = n * log(l) / (l * l);
            let conditional = sqrt(n) * l * sqrt(l);
            Ok(RhErrorRow {
                n,
                unconditional,
                conditional,
                ratio: unconditional / conditional,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c() -> EffectiveConstants {
        EffectiveConstants::default()
    }

    #[test]
    fn pi_bounds_examples() {
        let (lo, hi) = dusart_pi_bounds(100.0).unwrap();
        let lo = lo.unwrap();
        assert!((lo - 21.7147).abs() < 1e-3);
        assert!(lo <= 25.0 && 25.0 <= hi);
        assert!((hi - 29.0).abs() < 0.1, "{hi}");

        let (lo, _) = dusart_pi_bounds(17.0).unwrap();
        assert!((lo.unwrap() - 6.0003).abs() < 1e-3);

        let (lo, hi) = dusart_pi_bounds(2.0).unwrap();
        assert!(lo.is_none());
        assert!(hi > 1.0);
        assert!(dusart_pi_bounds(1.5).is_err());
        assert!(dusart_pi_bounds(f64::NAN).is_err());
    }

    #[test]
    fn pn_upper_examples() {
        assert!(axler_pn_upper(3468).unwrap() >= 32327.0);
        assert!(axler_pn_upper(100_000).unwrap() >= 1_299_709.0);
        assert!(axler_pn_upper(1_000_000).unwrap() >= 15_485_863.0);
        assert!(axler_pn_upper(3467).is_err());
    }

    #[test]
    fn theta_lower_examples() {
        let v = axler_theta_lower(10).unwrap();
        assert!((v - 9.406).abs() < 5e-3, "{v}");
        assert!(v < 22.590);
        assert!(axler_theta_lower(2).unwrap() < 6f64.ln());
        assert!(axler_theta_lower(1).is_err());
    }

    #[test]
    fn effective_bound_examples() {
        let v = effective_lower_bound(3468, 0.1, &c()).unwrap();
        assert!((v + 713.5).abs() < 0.5, "{v}");
        let n = 44_500_000u64;
        let v = effective_lower_bound(n, 0.1, &c()).unwrap();
        assert!(v > 0.001 * n as f64 / (n as f64).ln());
        for n in [3468u64, 10_000, 1 << 40] {
            assert!(effective_lower_bound(n, -2.0, &c()).unwrap() <= 0.0);
        }
        assert!(effective_lower_bound(3000, 0.1, &c()).is_err());
    }

    #[test]
    fn n_upper_table() {
        let table = [
            (1.3, 17_456u64),
            (0.9, 107_532),
            (0.8, 185_476),
            (0.5, 1_274_770),
            (0.3, 6_292_702),
            (0.2, 15_774_907),
        ];
        for (x, expected) in table {
            assert_eq!(n_upper(x, &c()).unwrap(), expected, "x = {x}");
        }
        // exp(y*) = 43,565,839.248… and 2,730,250.035…; the ceiling is one
        // above the printed table entries for these two rows.
        assert_eq!(n_upper(0.1, &c()).unwrap(), 43_565_840);
        assert_eq!(n_upper(0.4, &c()).unwrap(), 2_730_251);
        assert!(n_upper(2.0, &c()).is_err());
        assert!(n_upper(-2.0, &c()).is_err());
        assert!(matches!(n_upper(-1.9, &c()), Err(Error::Overflow { .. })));
    }

    #[test]
    fn n_upper_fixed_point_residual() {
        for x in [-1.0, 0.0, 0.1, 1.0, 1.9] {
            let y = unconditional_log_threshold(x, &c()).unwrap();
            let g = (8.0 * y.ln() + 14.0) / (x + 2.0);
            assert!((g - y).abs() < 1e-11, "x = {x}");
        }
    }

    #[test]
    fn n_upper_floor() {
        assert_eq!(n_upper(1.99, &c()).unwrap(), 3468);
    }

    #[test]
    fn closed_form_table() {
        let rows = [
            (1.4, 3.12e10),
            (1.3, 9.67e10),
            (1.2, 3.25e11),
            (1.1, 1.20e12),
            (1.0, 4.91e12),
        ];
        for (x, expected) in rows {
            let v = closed_form_bound(x, &c()).unwrap();
            assert!((v / expected - 1.0).abs() < 5e-3, "x = {x}: {v}");
        }
        assert!(closed_form_bound(2.0, &c()).is_err());
    }

    #[test]
    fn asymptotic_examples() {
        let x = -2.0 + 8.0 / core::f64::consts::E;
        let v = asymptotic_psi(x, &c()).unwrap();
        assert!((v - 15.154_262_241_479_262).abs() < 1e-9);
        assert_eq!(asymptotic_psi(6.0, &c()).unwrap(), 1.0);
        assert_eq!(asymptotic_psi(-1.0, &c()).unwrap(), 16_777_216.0);
        assert!(asymptotic_psi(-2.0, &c()).is_err());
    }

    #[test]
    fn rh_unsolved_in_mid_range() {
        let r = rh_n_upper(0.0, &c()).unwrap();
        assert!(!r.solved);
        assert_eq!(r.n_rh, 149);
        let f5 = 5.0 - 5.0 * 5f64.ln() - 2.0 * (c().c_rh / 2.0).ln();
        assert!((f5 - 4.787).abs() < 1e-3);
    }

    #[test]
    fn rh_solved_near_minus_two() {
        let x = -2.0 + 1e-4;
        let r = rh_n_upper(x, &c()).unwrap();
        assert!(r.solved);
        let rhs = 5.0 * r.y_star.ln() + 2.0 * (c().c_rh / 1e-4).ln();
        assert!((r.y_star - rhs).abs() < 1e-10);
        assert!(r.n_rh as f64 >= r.y_star.exp());
    }

    #[test]
    fn rh_asymptote_ratio_decreases() {
        // y*/(2 log(1/(x+2))) tends to 1, slowly: 1.43 at 1e-6, 1.33 at 1e-9.
        let mut previous = f64::INFINITY;
        for k in [6, 9, 20, 60, 150] {
            let s = 10f64.powi(-k);
            let r = rh_n_upper(-2.0 + s, &c());
            let y = match r {
                Ok(r) => r.y_star,
                // -2 + 1e-20 rounds to -2 in f64; solve the shifted equation directly.
                Err(_) => {
                    let shift = 2.0 * (c().c_rh / s).ln();
                    let mut y = 10.0 + shift;
                    for _ in 0..200 {
                        y = 5.0 * y.ln() + shift;
                    }
                    y
                }
            };
            let ratio = y / (2.0 * (1.0 / s).ln());
            assert!(ratio > 1.0 && ratio < previous, "k = {k}: {ratio}");
            previous = ratio;
        }
        assert!(previous < 1.2);
    }

    #[test]
    fn rh_report_formulas() {
        let rows = rh_error_report(&[1e2, 1e5]).unwrap();
        let n: f64 = 1e5;
        let l = n.ln();
        assert!((rows[1].unconditional - n * l.ln() / (l * l)).abs() < 1e-9);
        assert!((rows[1].conditional - n.sqrt() * l.powf(1.5)).abs() < 1e-9);
        assert!((rows[0].ratio - 0.072_866_888).abs() < 1e-6);
        assert!(rh_error_report(&[10.0]).is_err());
    }

    #[test]
    fn tail_bound_decreasing() {
        let mut prev = f64::INFINITY;
        for n in [3468u64, 5000, 10_000, 100_000, 10_000_000, 1 << 40] {
            let t = tail_alpha_bound(n, &c()).unwrap();
            assert!(t < prev);
            prev = t;
        }
    }
}
