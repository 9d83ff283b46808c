//! Combining independent simulation runs of one scenario.

use coex_core::sim::{SimStats, StationStats};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{CliError, Result};

/// Mean and 95% t-interval half-width of a sample.
pub fn mean_ci95(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 2 {
        return Err(CliError::Usage(format!(
            "a confidence interval needs at least 2 runs, got {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let t = StudentsT::new(0.0, 1.0, n - 1.0)
        .map_err(|e| CliError::Internal(e.to_string()))?
        .inverse_cdf(0.975);
    Ok((mean, t * (var / n).sqrt()))
}

/// Mean metrics over runs with 95% half-widths. Counts and busy/idle
/// times are summed.
pub fn aggregate(runs: &[SimStats]) -> Result<SimStats> {
    if runs.len() < 2 {
        return Err(CliError::Usage(format!(
            "aggregation needs at least 2 runs, got {}",
            runs.len()
        )));
    }
    let stations = runs[0].per_station.len();
    if runs.iter().any(|r| r.per_station.len() != stations) {
        return Err(CliError::Usage(
            "runs of different scenarios cannot be aggregated".into(),
        ));
    }
    let col = |f: fn(&SimStats) -> f64| -> Vec<f64> { runs.iter().map(f).collect() };
    let (tput, ci_tput) = mean_ci95(&col(|r| r.tput_wifi))?;
    let (p_total, ci_total) = mean_ci95(&col(|r| r.p_coll_total))?;
    let (p_lte, ci_lte) = mean_ci95(&col(|r| r.p_coll_lte))?;
    let sum = |f: fn(&SimStats) -> u64| runs.iter().map(f).sum::<u64>();

    let n = runs.len() as f64;
    let per_station = (0..stations)
        .map(|i| {
            let total = |f: fn(&StationStats) -> u64| runs.iter().map(|r| f(&r.per_station[i])).sum();
            StationStats {
                tx_attempts: total(|s| s.tx_attempts),
                successes: total(|s| s.successes),
                lte_edge_collisions: total(|s| s.lte_edge_collisions),
                wifi_wifi_collisions: total(|s| s.wifi_wifi_collisions),
                drops: total(|s| s.drops),
                tput_wifi: runs.iter().map(|r| r.per_station[i].tput_wifi).sum::<f64>() / n,
            }
        })
        .collect();

    Ok(SimStats {
        tx_attempts: sum(|r| r.tx_attempts),
        successes: sum(|r| r.successes),
        lte_edge_collisions: sum(|r| r.lte_edge_collisions),
        wifi_wifi_collisions: sum(|r| r.wifi_wifi_collisions),
        drops: sum(|r| r.drops),
        p_coll_total: p_total,
        p_coll_lte: p_lte,
        tput_wifi: tput,
        per_station,
        ci95_tput: ci_tput,
        ci95_p_coll_total: ci_total,
        ci95_p_coll_lte: ci_lte,
        busy_ns: sum(|r| r.busy_ns),
        idle_ns: sum(|r| r.idle_ns),
        runs: runs.iter().map(|r| r.runs).sum(),
    })
}
