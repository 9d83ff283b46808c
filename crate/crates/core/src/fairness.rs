//! Duty cycles that make an LTE network as fair to `n_w` Wi-Fi stations as
//! a second Wi-Fi network of the same size would be.
//!
//! Both objectives are piecewise constant in alpha (floors in the OFF
//! period bounds), so the search is exhaustive on a 1e-3 grid followed by
//! a golden-section refinement around the best grid point.

use alloc::vec::Vec;

use crate::dcf;
use crate::params::{ScenarioConfig, LTEU_MAX_ON_US, LTEU_MIN_OFF_US, LTEU_MIN_ON_US};
use crate::throughput::{wifi_coex_throughput, wifi_only_throughput};
use crate::{Error, Result};

const GRID_STEPS: u32 = 1000;
const REFINE_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FairnessResult {
    pub alpha_star: f64,
    /// |metric - target| at `alpha_star`.
    pub objective_residual: f64,
    /// tau_w or Tput_w at `alpha_star`.
    pub metric_at_optimum: f64,
    /// tau_wo or Tput_wo / 2 of the reference Wi-Fi-only network.
    pub target: f64,
    /// Optimum sits on the edge of the admissible interval with a nonzero
    /// residual: the target is not reachable.
    pub at_boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FairnessMode {
    /// Equal per-slot channel access probability.
    Access,
    /// Wi-Fi throughput equal to half of the two-network Wi-Fi throughput.
    Throughput,
}

/// Grid of admissible duty cycles, as multiples of 1e-3.
pub fn admissible_grid(cfg: &ScenarioConfig) -> Result<Vec<f64>> {
    let (lo, hi) = admissible_interval(cfg)?;
    let grid: Vec<f64> = (1..GRID_STEPS)
        .map(|i| f64::from(i) / f64::from(GRID_STEPS))
        .filter(|&a| a >= lo && a <= hi)
        .collect();
    if grid.is_empty() {
        Err(Error::EmptyInterval)
    } else {
        Ok(grid)
    }
}

/// Closed interval of duty cycles allowed by the scenario.
pub fn admissible_interval(cfg: &ScenarioConfig) -> Result<(f64, f64)> {
    let step = 1.0 / f64::from(GRID_STEPS);
    let (mut lo, mut hi) = (step, 1.0 - step);
    if cfg.enforce_lteu_limits {
        let t_c = cfg.lte.t_cycle;
        lo = lo.max(LTEU_MIN_ON_US / t_c);
        hi = hi.min(LTEU_MAX_ON_US / t_c).min(1.0 - LTEU_MIN_OFF_US / t_c);
        // Absorb rounding in the ratios so e.g. 4000/10000 admits 0.4.
        lo -= 1e-12;
        hi += 1e-12;
    }
    if lo > hi {
        Err(Error::EmptyInterval)
    } else {
        Ok((lo, hi))
    }
}

pub fn access_fair_alpha(cfg: &ScenarioConfig, n_w: u32) -> Result<FairnessResult> {
    fair_alpha(cfg, n_w, 2 * n_w, FairnessMode::Access)
}

pub fn throughput_fair_alpha(cfg: &ScenarioConfig, n_w: u32) -> Result<FairnessResult> {
    fair_alpha(cfg, n_w, 2 * n_w, FairnessMode::Throughput)
}

/// Fair duty cycle for `n_w` coexisting stations against a Wi-Fi-only
/// reference of `reference_n` stations.
pub fn fair_alpha(cfg: &ScenarioConfig, n_w: u32, reference_n: u32, mode: FairnessMode) -> Result<FairnessResult> {
    let base = cfg.with_n_w(n_w);
    base.wifi.validate()?;
    if n_w == 0 || reference_n == 0 {
        return Err(Error::Config("station counts must be positive".into()));
    }
    let w = &base.wifi;
    let target = match mode {
        FairnessMode::Access => dcf::solve_wifi_only(reference_n, w.w0, w.m)?.tau,
        FairnessMode::Throughput => wifi_only_throughput(reference_n, &base)? / 2.0,
    };
    let metric = |alpha: f64| -> Result<f64> {
        // Limits are applied through the admissible interval.
        let mut c = base.with_alpha(alpha);
        c.enforce_lteu_limits = false;
        let r = wifi_coex_throughput(&c)?;
        Ok(match mode {
            FairnessMode::Access => r.tau_w,
            FairnessMode::Throughput => r.tput_wifi_coex,
        })
    };
    let objective = |alpha: f64| metric(alpha).map(|v| (v - target).abs());

    let grid = admissible_grid(&base)?;
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let mut best_alpha = grid[0];
    let mut best = f64::INFINITY;
    for &alpha in &grid {
        let v = objective(alpha)?;
        // Strict improvement keeps the smallest alpha on plateaus.
        if v < best {
            best = v;
            best_alpha = alpha;
        }
    }

    let step = 1.0 / f64::from(GRID_STEPS);
    let (a, b) = ((best_alpha - step).max(lo), (best_alpha + step).min(hi));
    let refined = golden_section(a, b, REFINE_TOL, |x| objective(x).unwrap_or(f64::INFINITY));
    let refined_value = objective(refined)?;
    if refined_value < best {
        best = refined_value;
        best_alpha = refined;
    }

    let at_boundary = best > 0.0 && ((best_alpha - lo).abs() < 1e-12 || (best_alpha - hi).abs() < 1e-12);
    Ok(FairnessResult {
        alpha_star: best_alpha,
        objective_residual: best,
        metric_at_optimum: metric(best_alpha)?,
        target,
        at_boundary,
    })
}

fn golden_section(mut a: f64, mut b: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}
