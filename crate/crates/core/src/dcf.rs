//! Per-slot transmission probability of a saturated DCF station and the
//! collision fixed points built on it.
//!
//! The backoff chain has stages 0..=m+1: a station retries once more at
//! stage m and drops the frame after that attempt fails. Summing its
//! stationary distribution gives
//!
//! ```text
//! tau(p) = 2 / (W0 * A(p) + 1),
//! A(p)   = (sum_{j=0}^{m} (2p)^j + 2^m p^{m+1}) / (sum_{j=0}^{m+1} p^j)
//! ```
//!
//! which is the usual closed form with both `1 - 2p` and `1 - p` factors
//! cancelled, so p = 1/2 needs no special handling.

use alloc::format;

use crate::math::powi;
use crate::{Error, Result};

pub const TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: u32 = 10_000;
const DAMPING: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointSolution {
    /// Per-slot transmission probability of one station.
    pub tau: f64,
    /// Collision probability seen by a transmitting station.
    pub p_coll: f64,
    pub iterations: u32,
    /// |tau - tau_from_pc(p_coll(tau))| at the returned tau.
    pub residual: f64,
}

/// Transmission probability per slot given a constant per-attempt collision
/// probability `p_c`.
pub fn tau_from_pc(p_c: f64, w0: u32, m: u32) -> Result<f64> {
    if !(0.0..1.0).contains(&p_c) {
        return Err(Error::Domain(format!(
            "collision probability must lie in [0, 1), got {p_c}"
        )));
    }
    Ok(tau_unchecked(p_c, w0, m))
}

fn tau_unchecked(p: f64, w0: u32, m: u32) -> f64 {
    let mut num = 0.0;
    let mut term = 1.0;
    for _ in 0..=m {
        num += term;
        term *= 2.0 * p;
    }
    num += powi(2.0, m) * powi(p, m + 1);

    let mut den = 0.0;
    let mut term = 1.0;
    for _ in 0..=m + 1 {
        den += term;
        term *= p;
    }
    2.0 / (f64::from(w0) * num / den + 1.0)
}

/// Limit of the transmission probability as the collision probability
/// tends to one; finite because the retry limit bounds the chain.
pub fn tau_at_certain_collision(w0: u32, m: u32) -> f64 {
    tau_unchecked(1.0, w0, m)
}

/// 1 - (1 - a)(1 - b), written so that a = 0 returns b exactly.
fn union(a: f64, b: f64) -> f64 {
    a + b - a * b
}

/// Collision probability from `others` competing stations each sending
/// with probability `tau`.
pub fn contention_pc(tau: f64, others: u32) -> f64 {
    if others == 0 {
        0.0
    } else {
        1.0 - powi(1.0 - tau, others)
    }
}

/// Solves tau = tau_from_pc(p(tau)) for a collision map `p` that is
/// non-decreasing in tau and stays below 1.
fn solve_fixed_point(p_of_tau: impl Fn(f64) -> f64, w0: u32, m: u32) -> Result<FixedPointSolution> {
    let g = |tau: f64| tau_unchecked(p_of_tau(tau), w0, m);
    let mut tau = 2.0 / (f64::from(w0) + 1.0);
    let mut best = f64::INFINITY;
    let mut stalled = 0u32;

    for it in 1..=MAX_ITERATIONS {
        let residual = (tau - g(tau)).abs();
        if residual <= TOLERANCE {
            return Ok(FixedPointSolution {
                tau,
                p_coll: p_of_tau(tau),
                iterations: it - 1,
                residual,
            });
        }
        if residual < best * 0.999 {
            best = residual;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= 50 {
                return bisect(&p_of_tau, w0, m, it);
            }
        }
        tau = (1.0 - DAMPING) * tau + DAMPING * g(tau);
    }
    bisect(&p_of_tau, w0, m, MAX_ITERATIONS)
}

/// h(tau) = tau - g(tau) is increasing with h(0) < 0 < h(1), so bisection
/// always brackets the unique root.
fn bisect(p_of_tau: &impl Fn(f64) -> f64, w0: u32, m: u32, spent: u32) -> Result<FixedPointSolution> {
    let h = |tau: f64| tau - tau_unchecked(p_of_tau(tau), w0, m);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut iterations = spent;
    for _ in 0..200 {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let v = h(mid);
        if v.abs() <= TOLERANCE {
            return Ok(FixedPointSolution {
                tau: mid,
                p_coll: p_of_tau(mid),
                iterations,
                residual: v.abs(),
            });
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let tau = 0.5 * (lo + hi);
    Err(Error::NoConvergence {
        iterations,
        residual: h(tau).abs(),
    })
}

/// Fixed point of `n` contending stations with no interferer.
pub fn solve_wifi_only(n: u32, w0: u32, m: u32) -> Result<FixedPointSolution> {
    if n == 0 {
        return Err(Error::Config("need at least one station".into()));
    }
    if n == 1 {
        return Ok(direct(0.0, w0, m));
    }
    solve_fixed_point(|tau| contention_pc(tau, n - 1), w0, m)
}

/// Fixed point of `n_w` stations whose attempts additionally fail with the
/// constant probability `p_cwl` from the LTE ON edge.
pub fn solve_coex(n_w: u32, p_cwl: f64, w0: u32, m: u32) -> Result<FixedPointSolution> {
    if n_w == 0 {
        return Err(Error::Config("need at least one station".into()));
    }
    if !(0.0..1.0).contains(&p_cwl) {
        return Err(Error::Domain(format!(
            "LTE collision probability must lie in [0, 1), got {p_cwl}"
        )));
    }
    if n_w == 1 {
        return Ok(direct(p_cwl, w0, m));
    }
    solve_fixed_point(|tau| union(contention_pc(tau, n_w - 1), p_cwl), w0, m)
}

/// A lone station sees a collision probability independent of tau.
fn direct(p: f64, w0: u32, m: u32) -> FixedPointSolution {
    FixedPointSolution {
        tau: tau_unchecked(p, w0, m),
        p_coll: p,
        iterations: 0,
        residual: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau(p: f64) -> f64 {
        tau_from_pc(p, 16, 6).unwrap()
    }

    /// The closed form before cancelling (1 - 2p) and (1 - p).
    fn tau_raw(p: f64, w0: u32, m: u32) -> f64 {
        let w0 = f64::from(w0);
        let m = m as i32;
        let num = (1.0 - (2.0 * p).powi(m + 1)) * (1.0 - p)
            + 2f64.powi(m) * (p.powi(m + 1) - p.powi(m + 2)) * (1.0 - 2.0 * p);
        let den = (1.0 - 2.0 * p) * (1.0 - p.powi(m + 2));
        2.0 / (w0 * num / den + 1.0)
    }

    /// Root of h(tau) = tau - g(tau) by plain bisection, independent of the
    /// damped solver.
    fn bisection_oracle(p_of_tau: impl Fn(f64) -> f64) -> f64 {
        let h = |t: f64| t - tau_raw(p_of_tau(t), 16, 6);
        let (mut lo, mut hi) = (1e-12, 1.0 - 1e-12);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn zero_collisions_give_two_over_w0_plus_one() {
        for m in 0..8 {
            assert!((tau_from_pc(0.0, 16, m).unwrap() - 2.0 / 17.0).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_uncancelled_form_away_from_half() {
        for &p in &[0.01, 0.1, 0.2, 0.3, 0.45, 0.55, 0.7, 0.9, 0.99] {
            for m in [0u32, 3, 6] {
                let a = tau_from_pc(p, 16, m).unwrap();
                let b = tau_raw(p, 16, m);
                assert!((a - b).abs() < 1e-10, "p={p} m={m}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn half_is_the_two_sided_limit() {
        let at = tau(0.5);
        assert!(at.is_finite());
        let below = tau_raw(0.5 - 1e-9, 16, 6);
        let above = tau_raw(0.5 + 1e-9, 16, 6);
        assert!((at - below).abs() < 1e-6);
        assert!((at - above).abs() < 1e-6);
    }

    #[test]
    fn domain_is_checked() {
        assert!(matches!(tau_from_pc(1.0, 16, 6), Err(Error::Domain(_))));
        assert!(matches!(tau_from_pc(-0.1, 16, 6), Err(Error::Domain(_))));
        assert!(matches!(tau_from_pc(f64::NAN, 16, 6), Err(Error::Domain(_))));
    }

    #[test]
    fn strictly_decreasing_on_dense_grid() {
        for w0 in [2u32, 16, 32] {
            for m in 1..8 {
                let mut prev = tau_from_pc(0.0, w0, m).unwrap();
                for i in 1..2000 {
                    let p = f64::from(i) / 2000.0;
                    let t = tau_from_pc(p, w0, m).unwrap();
                    assert!(t < prev, "w0={w0} m={m} p={p}");
                    prev = t;
                }
            }
        }
    }

    #[test]
    fn constant_window_ignores_collisions() {
        // m = 0: every stage uses W0, so the mean backoff never changes.
        for i in 0..100 {
            let p = f64::from(i) / 100.0;
            assert!((tau_from_pc(p, 16, 0).unwrap() - 2.0 / 17.0).abs() < 1e-15);
        }
    }

    #[test]
    fn single_station_never_collides() {
        let s = solve_wifi_only(1, 16, 6).unwrap();
        assert_eq!(s.p_coll, 0.0);
        assert!((s.tau - 2.0 / 17.0).abs() < 1e-12);
    }

    #[test]
    fn wifi_only_matches_bisection() {
        for n in [2u32, 3, 5, 10, 20, 50] {
            let s = solve_wifi_only(n, 16, 6).unwrap();
            let oracle = bisection_oracle(|t| 1.0 - (1.0 - t).powi(n as i32 - 1));
            assert!((s.tau - oracle).abs() < 1e-9, "n={n}: {} vs {oracle}", s.tau);
            assert!(s.residual <= TOLERANCE);
        }
    }

    #[test]
    fn wifi_only_degrades_with_n() {
        let mut prev = solve_wifi_only(1, 16, 6).unwrap();
        for n in 2..=40 {
            let s = solve_wifi_only(n, 16, 6).unwrap();
            assert!(s.tau <= prev.tau && s.p_coll >= prev.p_coll, "n={n}");
            prev = s;
        }
        let two = solve_wifi_only(2, 16, 6).unwrap();
        let ten = solve_wifi_only(10, 16, 6).unwrap();
        assert!(ten.p_coll > two.p_coll);
    }

    #[test]
    fn coex_single_station_reduces_to_lte_collisions() {
        let s = solve_coex(1, 0.3, 16, 6).unwrap();
        assert_eq!(s.p_coll, 0.3);
        assert_eq!(s.tau, tau(0.3));
        let s = solve_coex(1, 0.0, 16, 6).unwrap();
        assert!((s.tau - 2.0 / 17.0).abs() < 1e-15);
    }

    #[test]
    fn coex_matches_bisection() {
        let s = solve_coex(5, 0.2, 16, 6).unwrap();
        let oracle = bisection_oracle(|t| 1.0 - (1.0 - t).powi(4) * 0.8);
        assert!((s.tau - oracle).abs() < 1e-9);
    }

    #[test]
    fn coex_rejects_certain_lte_collision() {
        assert!(matches!(solve_coex(3, 1.0, 16, 6), Err(Error::Domain(_))));
        assert!(matches!(solve_coex(0, 0.1, 16, 6), Err(Error::Config(_))));
    }

    #[test]
    fn coex_total_dominates_components() {
        for n in [1u32, 2, 5, 10, 30] {
            for i in 0..20 {
                let p_cwl = f64::from(i) / 20.0;
                let s = solve_coex(n, p_cwl, 16, 6).unwrap();
                assert!(s.p_coll >= p_cwl);
                assert!(s.p_coll >= contention_pc(s.tau, n - 1));
                // Re-evaluating the defining equations reproduces the pair.
                let p_again = 1.0 - (1.0 - s.tau).powi(n as i32 - 1) * (1.0 - p_cwl);
                assert!((p_again - s.p_coll).abs() < 1e-9);
                assert!((tau(s.p_coll) - s.tau).abs() < 1e-9);
            }
        }
    }
}
