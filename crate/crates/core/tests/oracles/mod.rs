//! Brute-force reference computations shared by the integration tests.
//! Nothing here calls into the closed forms under test.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stationary transmission probability of the explicit backoff chain with
/// stages 0..=m+1, found by power iteration on the state vector.
///
/// States (j, k): stage j, counter k in 0..W_j. From (j, k > 0) the counter
/// drops by one; from (j, 0) the station transmits and moves to stage j+1
/// with probability p (uniform counter), or back to stage 0 otherwise. The
/// last stage always returns to stage 0.
pub fn chain_tau(p: f64, w0: usize, m: usize) -> f64 {
    let windows: Vec<usize> = (0..=m + 1).map(|j| w0 << j.min(m)).collect();
    let offsets: Vec<usize> = windows
        .iter()
        .scan(0, |acc, w| {
            let o = *acc;
            *acc += w;
            Some(o)
        })
        .collect();
    let n: usize = windows.iter().sum();
    let mut pi = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for _ in 0..2_000_000 {
        next.iter_mut().for_each(|x| *x = 0.0);
        let mut to_zero = 0.0;
        for j in 0..=m + 1 {
            let (o, w) = (offsets[j], windows[j]);
            for k in 1..w {
                next[o + k - 1] += pi[o + k];
            }
            let mass = pi[o];
            if j <= m {
                to_zero += (1.0 - p) * mass;
                let up = p * mass / windows[j + 1] as f64;
                for k in 0..windows[j + 1] {
                    next[offsets[j + 1] + k] += up;
                }
            } else {
                to_zero += mass;
            }
        }
        let back = to_zero / w0 as f64;
        for v in next.iter_mut().take(w0) {
            *v += back;
        }
        // Lazy step: averaging with the previous vector damps any slow
        // oscillation without moving the fixed point.
        let mut diff = 0.0;
        for i in 0..n {
            let v = 0.5 * (pi[i] + next[i]);
            diff += (v - pi[i]).abs();
            pi[i] = v;
        }
        if diff < 1e-15 {
            break;
        }
    }
    offsets.iter().map(|&o| pi[o]).sum()
}

/// PMF of a sum of `count` uniforms on {0..w-1} by enumerating every tuple.
pub fn enumerate_uniform_sum(count: usize, w: usize) -> Vec<f64> {
    let mut counts = vec![0u64; count * (w - 1) + 1];
    let total = w.pow(count as u32);
    for mut code in 0..total {
        let mut s = 0;
        for _ in 0..count {
            s += code % w;
            code /= w;
        }
        counts[s] += 1;
    }
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// P(sum of k geometric failure counts <= limit), by explicit convolution.
pub fn geometric_convolution_cdf(k: usize, p: f64, limit: usize) -> f64 {
    let single: Vec<f64> = (0..=limit).map(|i| p * (1.0 - p).powi(i as i32)).collect();
    let mut acc = single.clone();
    for _ in 1..k {
        let mut out = vec![0.0; limit + 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in single.iter().enumerate().take(limit + 1 - i) {
                out[i + j] += a * b;
            }
        }
        acc = out;
    }
    acc.iter().sum()
}

/// A single station sending back to back through one OFF period.
#[derive(Debug, Clone, Copy)]
pub struct Placement {
    pub t_off: f64,
    pub t_p: f64,
    pub difs: f64,
    pub sigma: f64,
    pub w0: u32,
}

/// Monte-Carlo frequencies of "frame k straddles the ON edge" and "frames
/// 1..=k all complete", from physical start and end times.
pub struct PlacementFrequencies {
    pub trials: u64,
    /// hits[k-1]: frame k overlapped the ON period.
    pub hits: Vec<u64>,
    /// completed[k-1]: at least k frames completed.
    pub completed: Vec<u64>,
}

pub fn place_frames(g: Placement, trials: u64, seed: u64) -> PlacementFrequencies {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max = (g.t_off / g.t_p) as usize + 2;
    let mut hits = vec![0u64; max];
    let mut completed = vec![0u64; max];
    for _ in 0..trials {
        let mut t = 0.0;
        let mut k = 0;
        loop {
            let window = if k == 0 { 2 * g.w0 } else { g.w0 };
            let z = rng.random_range(0..window);
            let start = t + g.difs + f64::from(z) * g.sigma;
            if start >= g.t_off {
                break;
            }
            let end = start + g.t_p;
            if end > g.t_off {
                hits[k] += 1;
                break;
            }
            completed[k] += 1;
            k += 1;
            t = end;
        }
    }
    PlacementFrequencies {
        trials,
        hits,
        completed,
    }
}

/// |observed - expected| within `sigmas` binomial standard deviations.
pub fn within_sigmas(count: u64, trials: u64, p: f64, sigmas: f64) -> bool {
    let freq = count as f64 / trials as f64;
    let sd = (p * (1.0 - p) / trials as f64).sqrt();
    (freq - p).abs() <= sigmas * sd + 1e-12
}
