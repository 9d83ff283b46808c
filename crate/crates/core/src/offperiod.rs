//! What happens inside one LTE OFF period.
//!
//! A station starts its first backoff DIFS after the ON period ends and
//! sends back-to-back frames, each preceded by DIFS and a backoff. With
//! backoff values z_1, z_2, ... the k-th frame starts at
//! `k*DIFS + (k-1)*T_p + sigma*S_k`, `S_k = z_1 + ... + z_k`, so
//!
//! * it completes before the ON edge iff `S_k <= L_b(k)`,
//! * it straddles the ON edge iff `L_b(k) < S_k <= U_b(k)`,
//! * it never starts in this OFF period iff `S_k > U_b(k)`.
//!
//! The first backoff is drawn from {0..2*W0-1} (the previous OFF period
//! is assumed to have ended with an edge collision), later ones from
//! {0..W0-1}. With several stations the total number of idle slots before
//! the k-th transmission is instead negative binomial in the per-slot
//! transmission probability.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::floor_tol;
use crate::{Error, Result};

/// Slot bounds for each frame index of one OFF period.
#[derive(Debug, Clone, PartialEq)]
pub struct OffPeriodGeometry {
    /// floor(T_off / T_p): the most frames that fit.
    pub n_k: usize,
    /// L_b(k) for k = 1..=n_k+1, stored at index k-1.
    pub l_b: Vec<i64>,
    /// U_b(k) for k = 1..=n_k+1.
    pub u_b: Vec<i64>,
    /// W_s(k) = (k-1)*W0 - 1 for k = 1..=n_k+1.
    pub w_s: Vec<i64>,
}

impl OffPeriodGeometry {
    /// L_b(k), 1-based.
    pub fn lb(&self, k: usize) -> i64 {
        self.l_b[k - 1]
    }

    /// U_b(k), 1-based.
    pub fn ub(&self, k: usize) -> i64 {
        self.u_b[k - 1]
    }

    /// Largest k for which an edge hit is possible.
    pub fn max_hit_index(&self) -> usize {
        self.n_k + 1
    }
}

pub fn geometry(t_off: f64, t_p: f64, difs: f64, sigma: f64, w0: u32) -> OffPeriodGeometry {
    let n_k = if t_off > 0.0 && t_p > 0.0 {
        floor_tol(t_off / t_p).max(0) as usize
    } else {
        0
    };
    let mut l_b = Vec::with_capacity(n_k + 1);
    let mut u_b = Vec::with_capacity(n_k + 1);
    let mut w_s = Vec::with_capacity(n_k + 1);
    for k in 1..=n_k + 1 {
        let kf = k as f64;
        l_b.push(floor_tol((t_off - kf * (t_p + difs)) / sigma));
        u_b.push(floor_tol((t_off - (kf - 1.0) * t_p - kf * difs) / sigma));
        w_s.push((k as i64 - 1) * i64::from(w0) - 1);
    }
    OffPeriodGeometry { n_k, l_b, u_b, w_s }
}

/// PMF of the sum of `count` independent uniforms on {0..w0-1}, indexed by
/// the value of the sum.
pub fn uniform_sum_pmf(count: usize, w0: u32) -> Vec<f64> {
    // Integer counts over w0^count outcomes are exact while the total stays
    // within the f64 mantissa; one division then rounds each entry once.
    const EXACT: u64 = 1 << 53;
    if let Some(total) = u64::from(w0).checked_pow(count as u32).filter(|&t| t <= EXACT) {
        let mut counts = vec![1u64];
        for _ in 0..count {
            counts = convolve_uniform_counts(&counts, w0 as usize);
        }
        return counts.iter().map(|&c| c as f64 / total as f64).collect();
    }
    let mut pmf = vec![1.0];
    for _ in 0..count {
        pmf = convolve_uniform(&pmf, w0);
    }
    pmf
}

fn convolve_uniform_counts(counts: &[u64], w: usize) -> Vec<u64> {
    let len = counts.len() + w - 1;
    let mut out = Vec::with_capacity(len);
    let mut window = 0u64;
    for i in 0..len {
        if i < counts.len() {
            window += counts[i];
        }
        if i >= w {
            window -= counts[i - w];
        }
        out.push(window);
    }
    out
}

/// One more uniform {0..w-1} term, by a sliding window sum.
fn convolve_uniform(pmf: &[f64], w: u32) -> Vec<f64> {
    let w = w as usize;
    let scale = 1.0 / w as f64;
    let len = pmf.len() + w - 1;
    let mut out = Vec::with_capacity(len);
    let mut window = 0.0;
    for i in 0..len {
        if i < pmf.len() {
            window += pmf[i];
        }
        if i >= w {
            window -= pmf[i - w];
        }
        // Rebuild periodically to keep the running sum from drifting.
        if i % 256 == 255 {
            let lo = (i + 1).saturating_sub(w);
            window = pmf[lo..=i.min(pmf.len() - 1)].iter().sum();
        }
        out.push(window.max(0.0) * scale);
    }
    out
}

/// Cumulative distribution of a PMF on {0..len-1}, queried with clamping.
struct Cdf(Vec<f64>);

impl Cdf {
    fn new(pmf: &[f64]) -> Self {
        let mut acc = 0.0;
        Cdf(pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect())
    }

    fn at(&self, x: i64) -> f64 {
        if x < 0 {
            0.0
        } else {
            let i = (x as usize).min(self.0.len() - 1);
            self.0[i].min(1.0)
        }
    }

    /// P(lo <= X <= hi).
    fn range(&self, lo: i64, hi: i64) -> f64 {
        let lo = lo.max(0);
        if hi < lo {
            0.0
        } else {
            (self.at(hi) - self.at(lo - 1)).max(0.0)
        }
    }
}

fn check_index(k: usize, max: usize) -> Result<()> {
    if k == 0 || k > max {
        Err(Error::Domain(format!("frame index {k} outside 1..={max}")))
    } else {
        Ok(())
    }
}

/// P(k-th frame straddles the ON edge), given the first backoff is uniform
/// on {0..2*W0-1} and `rest` is the distribution of z_2 + ... + z_k.
fn hit_given(k: usize, geom: &OffPeriodGeometry, w0: u32, rest: &Cdf) -> f64 {
    let (lb, ub) = (geom.lb(k), geom.ub(k));
    let first_max = i64::from(2 * w0 - 1).min(ub);
    let p_first = 1.0 / f64::from(2 * w0);
    let mut sum = 0.0;
    for z1 in 0..=first_max {
        sum += rest.range(lb - z1 + 1, ub - z1);
    }
    (sum * p_first).min(1.0)
}

/// P(frames 1..=k all complete before the ON edge).
fn success_given(k: usize, geom: &OffPeriodGeometry, w0: u32, rest: &Cdf) -> f64 {
    let lb = geom.lb(k);
    let first_max = i64::from(2 * w0 - 1).min(lb);
    let p_first = 1.0 / f64::from(2 * w0);
    let mut sum = 0.0;
    for z1 in 0..=first_max {
        sum += rest.range(0, lb - z1);
    }
    (sum * p_first).min(1.0)
}

/// Probability that the k-th frame of an OFF period is the one that
/// overlaps the next ON period (single transmitter).
pub fn hit_prob(k: usize, geom: &OffPeriodGeometry, w0: u32) -> Result<f64> {
    check_index(k, geom.max_hit_index())?;
    let rest = Cdf::new(&uniform_sum_pmf(k - 1, w0));
    Ok(hit_given(k, geom, w0, &rest))
}

/// Probability that the first k frames of an OFF period all succeed
/// (single transmitter).
pub fn success_seq_single(k: usize, geom: &OffPeriodGeometry, w0: u32) -> Result<f64> {
    check_index(k, geom.n_k)?;
    let rest = Cdf::new(&uniform_sum_pmf(k - 1, w0));
    Ok(success_given(k, geom, w0, &rest))
}

/// Edge-hit probabilities p'_h(k) for k = 1..=n_k+1.
pub fn hit_probs(geom: &OffPeriodGeometry, w0: u32) -> Vec<f64> {
    sweep_single(geom, w0).0
}

/// Edge-hit probabilities for k = 1..=n_k+1 and success-sequence
/// probabilities for k = 1..=n_k, sharing the convolutions.
fn sweep_single(geom: &OffPeriodGeometry, w0: u32) -> (Vec<f64>, Vec<f64>) {
    let mut hits = Vec::with_capacity(geom.n_k + 1);
    let mut succ = Vec::with_capacity(geom.n_k);
    let mut pmf = vec![1.0];
    for k in 1..=geom.max_hit_index() {
        if k > 1 {
            pmf = convolve_uniform(&pmf, w0);
        }
        let cdf = Cdf::new(&pmf);
        hits.push(hit_given(k, geom, w0, &cdf));
        if k <= geom.n_k {
            succ.push(success_given(k, geom, w0, &cdf));
        }
    }
    (hits, succ)
}

/// LTE-to-Wi-Fi collision probability: only the last of k frames sent in
/// an OFF period is lost, so a hit at index k weighs 1/k.
pub fn collision_prob_lte(geom: &OffPeriodGeometry, w0: u32) -> f64 {
    collision_from_hits(&hit_probs(geom, w0))
}

pub fn collision_from_hits(hits: &[f64]) -> f64 {
    hits.iter()
        .enumerate()
        .map(|(i, p)| p / (i + 1) as f64)
        .sum::<f64>()
        .min(1.0)
}

/// P(Z'(k) <= limit) for Z'(k) negative binomial: the number of idle slots
/// before the k-th transmission when each slot carries one with
/// probability `p_trw`.
pub fn negbin_tail(k: usize, p_trw: f64, limit: i64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("negative binomial needs k >= 1".into()));
    }
    if !(p_trw > 0.0 && p_trw <= 1.0) {
        return Err(Error::Domain(format!(
            "transmission probability must lie in (0, 1], got {p_trw}"
        )));
    }
    if limit < 0 {
        return Ok(0.0);
    }
    if p_trw == 1.0 {
        return Ok(1.0);
    }
    let kf = k as f64;
    let q = 1.0 - p_trw;
    let mode = ((kf - 1.0) * q / p_trw).max(0.0);
    let log_start = kf * libm::log(p_trw);
    // Start in linear space when p^k is representable, in log space otherwise.
    if log_start > -700.0 {
        let mut term = libm::exp(log_start);
        let mut sum = term;
        for i in 0..limit {
            let fi = i as f64;
            term *= (fi + kf) / (fi + 1.0) * q;
            sum += term;
            if fi > mode && term < 1e-18 * sum {
                break;
            }
        }
        Ok(sum.min(1.0))
    } else {
        let lq = libm::log(q);
        let mut log_term = log_start;
        let mut sum = 0.0;
        for i in 0..=limit {
            if i > 0 {
                let fi = (i - 1) as f64;
                log_term += libm::log((fi + kf) / (fi + 1.0)) + lq;
            }
            let term = libm::exp(log_term);
            sum += term;
            if (i as f64) > mode && term < 1e-18 * sum {
                break;
            }
        }
        Ok(sum.min(1.0))
    }
}

/// Success-sequence probability with `n_w > 1` contending stations.
pub fn success_seq_multi(k: usize, p_trw: f64, geom: &OffPeriodGeometry) -> Result<f64> {
    check_index(k, geom.n_k)?;
    negbin_tail(k, p_trw, geom.lb(k) - k as i64)
}

/// Expected number of frames completed in an OFF period, from the
/// success-sequence probabilities `succ[k-1] = P'_s(k)`, k = 1..=n_k.
pub fn expected_packets(succ: &[f64], n_k: usize) -> Result<f64> {
    if succ.len() != n_k {
        return Err(Error::Consistency(format!(
            "expected {n_k} success probabilities, got {}",
            succ.len()
        )));
    }
    const SLACK: f64 = 1e-12;
    for (i, &p) in succ.iter().enumerate() {
        if !(-SLACK..=1.0 + SLACK).contains(&p) {
            return Err(Error::Consistency(format!(
                "P'_s({}) = {p} is not a probability",
                i + 1
            )));
        }
    }
    for (i, w) in succ.windows(2).enumerate() {
        if w[1] > w[0] + SLACK {
            return Err(Error::Consistency(format!(
                "P'_s({}) = {} exceeds P'_s({}) = {}",
                i + 2,
                w[1],
                i + 1,
                w[0]
            )));
        }
    }
    let mut e_n = 0.0;
    for k in 1..=n_k {
        let next = succ.get(k).copied().unwrap_or(0.0);
        e_n += k as f64 * (succ[k - 1] - next);
    }
    Ok(e_n.clamp(0.0, n_k as f64))
}

/// Everything the throughput model needs from one OFF period.
#[derive(Debug, Clone, PartialEq)]
pub struct OffPeriodDistributions {
    pub geometry: OffPeriodGeometry,
    /// p'_h(k), k = 1..=n_k+1.
    pub hit: Vec<f64>,
    /// P'_s(k), k = 1..=n_k.
    pub succ: Vec<f64>,
    pub e_n: f64,
    pub p_cwl: f64,
}

/// Single-transmitter OFF-period model.
pub fn single_station(geom: OffPeriodGeometry, w0: u32) -> Result<OffPeriodDistributions> {
    let (hit, succ) = sweep_single(&geom, w0);
    let e_n = expected_packets(&succ, geom.n_k)?;
    let p_cwl = collision_from_hits(&hit);
    Ok(OffPeriodDistributions {
        geometry: geom,
        hit,
        succ,
        e_n,
        p_cwl,
    })
}

/// Replaces the success sequence by the multi-station (negative binomial)
/// form; edge hits keep the single-transmitter model.
pub fn with_contention(mut dist: OffPeriodDistributions, p_trw: f64) -> Result<OffPeriodDistributions> {
    let succ = (1..=dist.geometry.n_k)
        .map(|k| success_seq_multi(k, p_trw, &dist.geometry))
        .collect::<Result<Vec<_>>>()?;
    dist.e_n = expected_packets(&succ, dist.geometry.n_k)?;
    dist.succ = succ;
    Ok(dist)
}
