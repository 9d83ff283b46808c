//! The four subcommands as library functions returning tables.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use coex_core::fairness::{fair_alpha, FairnessMode};
use coex_core::sim::{self, SimConfig, SimStats};
use coex_core::throughput::wifi_coex_throughput;
use rayon::prelude::*;
use serde::Serialize;

use crate::aggregate::aggregate;
use crate::error::{CliError, Result};
use crate::spec::{GridPoint, Mode, SweepSpec, SweepVar};
use crate::table::{num, Table};

const KEY_COLUMNS: [&str; 5] = ["alpha", "t_cycle_us", "n_w", "r_w_mbps", "packet_bytes"];

fn require(spec: &SweepSpec, mode: Mode) -> Result<()> {
    if spec.enables(mode) {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "the sweep spec does not enable {mode:?}; add it to modes"
        )))
    }
}

fn key_cells(p: &GridPoint) -> Vec<String> {
    let s = &p.scenario;
    vec![
        num(p.sweep_value),
        num(s.lte.alpha),
        num(s.lte.t_cycle),
        s.n_w.to_string(),
        num(s.r_w),
        s.packet_bytes.to_string(),
    ]
}

pub const ANALYZE_COLUMNS: [&str; 13] = [
    "sweep_value",
    "alpha",
    "t_cycle_us",
    "n_w",
    "r_w_mbps",
    "packet_bytes",
    "p_cwl",
    "p_c_total",
    "tau_w",
    "e_n",
    "tput_wifi_mbps",
    "tput_lte_mbps",
    "tput_wifi_only_scaled_mbps",
];

/// Analytical model at every grid point.
pub fn analyze(spec: &SweepSpec) -> Result<Table> {
    require(spec, Mode::Analytical)?;
    let rows: Vec<Result<Vec<String>>> = spec
        .points()
        .par_iter()
        .map(|p| {
            let r = wifi_coex_throughput(&p.scenario)?;
            let bound = (1.0 - p.scenario.lte.alpha) * r.tput_wifi_only.unwrap_or(f64::NAN);
            let mut row = key_cells(p);
            row.extend([
                num(r.p_cwl),
                num(r.p_c_total),
                num(r.tau_w),
                num(r.e_n),
                num(r.tput_wifi_coex),
                num(r.tput_lte),
                num(bound),
            ]);
            Ok(row)
        })
        .collect();
    let mut table = Table::new(&ANALYZE_COLUMNS);
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimOptions {
    pub runs: u32,
    /// Seconds per run.
    pub sim_time: f64,
    /// Run r uses seed + r.
    pub seed: u64,
    /// Seconds excluded at the start of each run.
    pub warmup: f64,
    /// Directory for per-run event traces.
    #[serde(skip)]
    pub trace_dir: Option<PathBuf>,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            runs: 5,
            sim_time: 200.0,
            seed: 1,
            warmup: 1.0,
            trace_dir: None,
        }
    }
}

pub const SIMULATE_COLUMNS: [&str; 18] = [
    "sweep_value",
    "alpha",
    "t_cycle_us",
    "n_w",
    "r_w_mbps",
    "packet_bytes",
    "runs",
    "p_coll_lte",
    "p_coll_lte_ci95",
    "p_coll_total",
    "p_coll_total_ci95",
    "tput_wifi_mbps",
    "tput_wifi_ci95",
    "tx_attempts",
    "successes",
    "lte_edge_collisions",
    "wifi_wifi_collisions",
    "drops",
];

fn run_one(cfg: &SimConfig, trace: Option<PathBuf>) -> Result<SimStats> {
    let Some(path) = trace else {
        return Ok(sim::run(cfg)?);
    };
    let file = File::create(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    let mut io_err = None;
    let stats = sim::run_traced(cfg, |e| {
        if io_err.is_none() {
            if let Err(err) = writeln!(out, "{e}") {
                io_err = Some(err);
            }
        }
    })?;
    if let Some(err) = io_err {
        return Err(err.into());
    }
    out.flush()?;
    Ok(stats)
}

/// Simulates every grid point `runs` times and reports means with 95%
/// intervals.
pub fn simulate(spec: &SweepSpec, opts: &SimOptions) -> Result<(Table, Vec<SimStats>)> {
    require(spec, Mode::Simulate)?;
    if opts.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    if let Some(dir) = &opts.trace_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
    }
    let points = spec.points();
    let runs = opts.runs as usize;
    let configs: Vec<SimConfig> = points
        .iter()
        .flat_map(|p| {
            (0..opts.runs).map(move |r| SimConfig {
                scenario: p.scenario.clone(),
                sim_time: opts.sim_time,
                seed: opts.seed.wrapping_add(u64::from(r)),
                warmup: opts.warmup,
                lte_enabled: true,
            })
        })
        .collect();
    // Points were validated on load; this checks the run options.
    if let Some(c) = configs.first() {
        c.validate()?;
    }
    let results: Vec<Result<SimStats>> = configs
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let trace = opts
                .trace_dir
                .as_ref()
                .map(|d| d.join(format!("point-{:04}-run-{}.trace", i / runs, i % runs)));
            run_one(c, trace)
        })
        .collect();
    let results: Vec<SimStats> = results.into_iter().collect::<Result<_>>()?;

    let mut table = Table::new(&SIMULATE_COLUMNS);
    let mut per_point = Vec::with_capacity(points.len());
    for (p, chunk) in points.iter().zip(results.chunks(runs)) {
        let s = if runs == 1 { chunk[0].clone() } else { aggregate(chunk)? };
        let mut row = key_cells(p);
        row.extend([
            s.runs.to_string(),
            num(s.p_coll_lte),
            num(s.ci95_p_coll_lte),
            num(s.p_coll_total),
            num(s.ci95_p_coll_total),
            num(s.tput_wifi),
            num(s.ci95_tput),
            s.tx_attempts.to_string(),
            s.successes.to_string(),
            s.lte_edge_collisions.to_string(),
            s.wifi_wifi_collisions.to_string(),
            s.drops.to_string(),
        ]);
        table.push(row);
        per_point.push(s);
    }
    Ok((table, per_point))
}

pub const FAIRNESS_COLUMNS: [&str; 12] = [
    "mode",
    "n_w",
    "t_cycle_us",
    "r_w_mbps",
    "packet_bytes",
    "alpha_star",
    "objective_residual",
    "metric_at_optimum",
    "target",
    "at_boundary",
    "tput_wifi_mbps",
    "tput_lte_mbps",
];

pub fn mode_name(mode: FairnessMode) -> &'static str {
    match mode {
        FairnessMode::Access => "access",
        FairnessMode::Throughput => "throughput",
    }
}

/// Fairness modes the sweep enables, or just `only` when given.
pub fn fairness_modes(spec: &SweepSpec, only: Option<FairnessMode>) -> Result<Vec<FairnessMode>> {
    let enabled = |m: FairnessMode| match m {
        FairnessMode::Access => spec.enables(Mode::FairnessAccess),
        FairnessMode::Throughput => spec.enables(Mode::FairnessThroughput),
    };
    let modes: Vec<FairnessMode> = match only {
        Some(m) => vec![m],
        None => [FairnessMode::Access, FairnessMode::Throughput]
            .into_iter()
            .filter(|&m| enabled(m))
            .collect(),
    };
    if modes.is_empty() || !modes.iter().all(|&m| enabled(m)) {
        return Err(CliError::Config(
            "the sweep spec does not enable this fairness mode".into(),
        ));
    }
    Ok(modes)
}

/// Fair duty cycle for every n_w of the sweep, against a Wi-Fi-only
/// reference of 2 n_w stations.
pub fn fairness(spec: &SweepSpec, modes: &[FairnessMode]) -> Result<Table> {
    if spec.sweep_var != SweepVar::NW {
        return Err(CliError::Config("fairness sweeps must use sweep_var = n_w".into()));
    }
    if spec.alpha_values.is_some() {
        return Err(CliError::Config("fairness solves for alpha; drop alpha_values".into()));
    }
    let jobs: Vec<(FairnessMode, u32)> = modes
        .iter()
        .flat_map(|&m| spec.values.iter().map(move |&v| (m, v as u32)))
        .collect();
    let base = &spec.base;
    let rows: Vec<Result<Vec<String>>> = jobs
        .par_iter()
        .map(|&(mode, n_w)| {
            let r = fair_alpha(base, n_w, 2 * n_w, mode)?;
            let mut at = base.with_n_w(n_w).with_alpha(r.alpha_star);
            at.enforce_lteu_limits = false;
            let t = wifi_coex_throughput(&at)?;
            Ok(vec![
                mode_name(mode).to_string(),
                n_w.to_string(),
                num(base.lte.t_cycle),
                num(base.r_w),
                base.packet_bytes.to_string(),
                num(r.alpha_star),
                num(r.objective_residual),
                num(r.metric_at_optimum),
                num(r.target),
                r.at_boundary.to_string(),
                num(t.tput_wifi_coex),
                num(t.tput_lte),
            ])
        })
        .collect();
    let mut table = Table::new(&FAIRNESS_COLUMNS);
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Absolute, for probabilities.
    pub probability: f64,
    /// Relative, for throughput.
    pub throughput: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            probability: 0.03,
            throughput: 0.07,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Deviation {
    Absolute,
    Relative,
}

/// (name, analytical column, simulated column, how deviations are measured)
const METRICS: [(&str, &str, &str, Deviation); 3] = [
    ("p_collision_lte", "p_cwl", "p_coll_lte", Deviation::Absolute),
    ("p_collision_total", "p_c_total", "p_coll_total", Deviation::Absolute),
    ("tput_wifi", "tput_wifi_mbps", "tput_wifi_mbps", Deviation::Relative),
];

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub joined: Table,
    /// (metric, largest deviation); relative for throughput.
    pub max_deviation: Vec<(String, f64)>,
    /// Human-readable description of each row outside tolerance.
    pub failures: Vec<String>,
}

fn pick<'a>(t: &Table, names: [&'a str; 2]) -> Option<&'a str> {
    names.into_iter().find(|n| t.column(n).is_some())
}

/// Joins two result tables on the scenario columns and measures the
/// deviation of each shared metric.
pub fn compare(left: &Table, right: &Table, tol: Tolerances) -> Result<CompareReport> {
    for t in [left, right] {
        for k in KEY_COLUMNS {
            if t.column(k).is_none() {
                return Err(CliError::Config(format!("input lacks key column {k}")));
            }
        }
    }
    let key = |t: &Table, row: usize| -> String {
        KEY_COLUMNS
            .iter()
            .map(|k| t.rows[row][t.column(k).unwrap()].as_str())
            .collect::<Vec<_>>()
            .join("|")
    };
    let mut index = HashMap::new();
    for i in 0..right.rows.len() {
        if index.insert(key(right, i), i).is_some() {
            return Err(CliError::Config(format!("duplicate scenario in row {}", i + 1)));
        }
    }

    let metrics: Vec<(&str, &str, &str, Deviation)> = METRICS
        .iter()
        .filter_map(|&(name, a, s, dev)| Some((name, pick(left, [a, s])?, pick(right, [s, a])?, dev)))
        .collect();
    if metrics.is_empty() {
        return Err(CliError::Config("the inputs share no comparable metric".into()));
    }

    let mut header: Vec<&str> = KEY_COLUMNS.to_vec();
    let names: Vec<[String; 3]> = metrics
        .iter()
        .map(|m| {
            [
                format!("{}_left", m.0),
                format!("{}_right", m.0),
                format!("{}_dev", m.0),
            ]
        })
        .collect();
    for n in &names {
        header.extend(n.iter().map(String::as_str));
    }
    header.push("within_tolerance");
    let mut joined = Table::new(&header);
    let mut max_dev = vec![0.0f64; metrics.len()];
    let mut failures = Vec::new();

    for i in 0..left.rows.len() {
        let k = key(left, i);
        let j = *index
            .get(&k)
            .ok_or_else(|| CliError::Config(format!("no matching row for scenario {k}")))?;
        let mut row: Vec<String> = KEY_COLUMNS
            .iter()
            .map(|c| left.rows[i][left.column(c).unwrap()].clone())
            .collect();
        let mut ok = true;
        for (m, &(name, a_col, b_col, dev)) in metrics.iter().enumerate() {
            let a = left.number(i, a_col)?;
            let b = right.number(j, b_col)?;
            let (d, limit) = match dev {
                Deviation::Absolute => ((a - b).abs(), tol.probability),
                Deviation::Relative => {
                    let d = if a == b { 0.0 } else { (a - b).abs() / b.abs() };
                    (d, tol.throughput)
                }
            };
            max_dev[m] = max_dev[m].max(d);
            if d > limit {
                ok = false;
                failures.push(format!("{k}: {name} {a} vs {b} (deviation {d} > {limit})"));
            }
            row.extend([num(a), num(b), num(d)]);
        }
        row.push(ok.to_string());
        joined.push(row);
    }
    Ok(CompareReport {
        joined,
        max_deviation: metrics.iter().map(|m| m.0.to_string()).zip(max_dev).collect(),
        failures,
    })
}
