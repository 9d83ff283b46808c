//! Event-driven simulator of saturated DCF stations sharing one channel
//! with an LTE eNB that transmits on a fixed ON/OFF schedule.
//!
//! Each cycle starts with the ON period: ON occupies `[c*T_C, c*T_C + T_on)`.
//! All stations hear each other and the eNB; there is no PHY, capture or
//! EIFS. Rules:
//!
//! * after every busy period (frame or ON) the medium must be idle for DIFS;
//!   slot boundaries then follow every `sigma`,
//! * at each idle slot boundary a station with counter 0 transmits, every
//!   other station decrements its counter (so the boundary at which a frame
//!   starts also counts as a decrement for the stations that defer),
//! * a boundary at or after the start of an ON period does not happen: the
//!   counters freeze and resume after the ON period and another DIFS,
//! * a frame occupies the medium for `T_p` whatever its outcome; it fails if
//!   any part of it overlaps an ON period or if another station starts in
//!   the same slot,
//! * a failure moves the station one backoff stage up; after the extra
//!   attempt at stage `m` the frame is dropped and the stage reset.
//!
//! Time is kept in integer nanoseconds. Randomness comes from ChaCha8
//! seeded with [`rand::SeedableRng::seed_from_u64`], so a seed reproduces a
//! run bit for bit on every platform.

mod trace;

pub use trace::{Outcome, TraceEvent};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::params::{packet_airtime_unchecked, ScenarioConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub scenario: ScenarioConfig,
    /// Simulated time, seconds.
    pub sim_time: f64,
    pub seed: u64,
    /// Initial interval excluded from the statistics, seconds.
    #[serde(default)]
    pub warmup: f64,
    /// With the interferer off the channel is Wi-Fi only and the duty
    /// cycle is ignored.
    #[serde(default = "default_true")]
    pub lte_enabled: bool,
}

fn default_true() -> bool {
    true
}

impl SimConfig {
    pub fn new(scenario: ScenarioConfig, sim_time: f64, seed: u64) -> Self {
        Self {
            scenario,
            sim_time,
            seed,
            warmup: 0.0,
            lte_enabled: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if !(self.sim_time.is_finite() && self.warmup.is_finite()) {
            return Err(Error::Config("simulation times must be finite".into()));
        }
        if !(self.warmup >= 0.0 && self.sim_time > self.warmup) {
            return Err(Error::Config(format!(
                "need sim_time > warmup >= 0, got sim_time={} warmup={}",
                self.sim_time, self.warmup
            )));
        }
        if self.sim_time > 1.0e6 {
            return Err(Error::Config("sim_time above 10^6 s".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StationStats {
    pub tx_attempts: u64,
    pub successes: u64,
    pub lte_edge_collisions: u64,
    pub wifi_wifi_collisions: u64,
    pub drops: u64,
    /// Mbit/s of delivered payload.
    pub tput_wifi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimStats {
    pub tx_attempts: u64,
    pub successes: u64,
    pub lte_edge_collisions: u64,
    pub wifi_wifi_collisions: u64,
    pub drops: u64,
    /// 1 - successes / attempts.
    pub p_coll_total: f64,
    /// LTE edge collisions / attempts.
    pub p_coll_lte: f64,
    /// Aggregate delivered payload, Mbit/s.
    pub tput_wifi: f64,
    pub per_station: Vec<StationStats>,
    /// 95% half-widths across runs; zero for a single run.
    pub ci95_tput: f64,
    pub ci95_p_coll_total: f64,
    pub ci95_p_coll_lte: f64,
    /// Medium busy and idle time over the whole run, ns.
    pub busy_ns: u64,
    pub idle_ns: u64,
    pub runs: u32,
}

const NS_PER_US: f64 = 1000.0;

fn us_to_ns(us: f64) -> u64 {
    libm::round(us * NS_PER_US) as u64
}

fn s_to_ns(s: f64) -> u64 {
    libm::round(s * 1e9) as u64
}

/// ON intervals of the interferer.
struct Schedule {
    cycle: u64,
    on: u64,
    enabled: bool,
}

impl Schedule {
    /// First ON interval that contains `t` or starts after it.
    fn next_on(&self, t: u64) -> (u64, u64) {
        if !self.enabled || self.on == 0 {
            return (u64::MAX, u64::MAX);
        }
        let start = t / self.cycle * self.cycle;
        if t < start + self.on {
            (start, start + self.on)
        } else {
            (start + self.cycle, start + self.cycle + self.on)
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Station {
    counter: u32,
    stage: u32,
}

/// Runs one simulation.
pub fn run(cfg: &SimConfig) -> Result<SimStats> {
    run_traced(cfg, |_| {})
}

/// Runs one simulation, passing every event to `observe` in time order.
pub fn run_traced(cfg: &SimConfig, mut observe: impl FnMut(&TraceEvent)) -> Result<SimStats> {
    cfg.validate()?;
    let sc = &cfg.scenario;
    let w = &sc.wifi;
    let timing = packet_airtime_unchecked(w, sc.r_w, sc.packet_bytes);
    let lte = sc.lte.timing();

    let difs = us_to_ns(w.difs);
    let sigma = us_to_ns(w.sigma);
    let t_p = us_to_ns(timing.t_p);
    let sched = Schedule {
        cycle: us_to_ns(sc.lte.t_cycle),
        on: us_to_ns(lte.t_on),
        enabled: cfg.lte_enabled,
    };
    let end = s_to_ns(cfg.sim_time);
    let warmup = s_to_ns(cfg.warmup);
    let n = sc.n_w as usize;
    let retry_stages = w.m + 1;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let draw = |rng: &mut ChaCha8Rng, stage: u32| -> u32 { rng.random_range(0..w.window(stage)) };

    let mut stations: Vec<Station> = Vec::with_capacity(n);
    for i in 0..n {
        let slots = draw(&mut rng, 0);
        observe(&TraceEvent::Backoff {
            t_ns: 0,
            station: i,
            stage: 0,
            slots,
        });
        stations.push(Station {
            counter: slots,
            stage: 0,
        });
    }
    let mut per_station = vec![StationStats::default(); n];
    let mut busy_ns = 0u64;
    let mut idle_ns = 0u64;
    let clip = |t: u64| t.min(end);

    let mut t_free = 0u64;
    let mut transmitters: Vec<usize> = Vec::with_capacity(n);
    let mut last_on_reported = None;

    while t_free < end {
        let (on_start, on_end) = sched.next_on(t_free);
        if on_start <= t_free {
            // Medium is held by the eNB.
            if last_on_reported != Some(on_start) {
                observe(&TraceEvent::LteOn {
                    t_ns: on_start,
                    until_ns: on_end,
                });
                last_on_reported = Some(on_start);
            }
            busy_ns += clip(on_end) - clip(t_free);
            t_free = on_end;
            continue;
        }

        let t0 = t_free + difs;
        let c_min = stations.iter().map(|s| s.counter).min().unwrap_or(0);
        let t_tx = t0 + u64::from(c_min) * sigma;
        if t0 >= on_start || t_tx >= on_start {
            // DIFS or the countdown is cut by the next ON period. Boundaries
            // strictly before it still decrement every counter.
            if t0 < on_start {
                let boundaries = (on_start - t0).div_ceil(sigma) as u32;
                for s in &mut stations {
                    s.counter -= boundaries;
                }
            }
            idle_ns += clip(on_start) - clip(t_free);
            t_free = on_start;
            continue;
        }
        if t_tx >= end {
            break;
        }

        transmitters.clear();
        for (i, s) in stations.iter_mut().enumerate() {
            if s.counter == c_min {
                transmitters.push(i);
            } else {
                s.counter -= c_min + 1;
            }
        }
        let frame_end = t_tx + t_p;
        let edge = frame_end > on_start;
        let outcome = if edge {
            Outcome::LteEdge
        } else if transmitters.len() > 1 {
            Outcome::WifiCollision
        } else {
            Outcome::Success
        };

        // The medium stays busy through every ON period the frame runs into.
        let mut busy_end = frame_end;
        let (mut s, mut e) = (on_start, on_end);
        while s < busy_end {
            if last_on_reported != Some(s) {
                observe(&TraceEvent::LteOn { t_ns: s, until_ns: e });
                last_on_reported = Some(s);
            }
            busy_end = busy_end.max(e);
            (s, e) = sched.next_on(e);
        }
        idle_ns += clip(t_tx) - clip(t_free);
        busy_ns += clip(busy_end) - clip(t_tx);

        let counted = t_tx >= warmup;
        for &i in &transmitters {
            let st = &mut stations[i];
            observe(&TraceEvent::TxStart {
                t_ns: t_tx,
                station: i,
                stage: st.stage,
                end_ns: frame_end,
            });
            observe(&TraceEvent::TxEnd {
                t_ns: frame_end,
                station: i,
                outcome,
            });
            let ps = &mut per_station[i];
            if counted {
                ps.tx_attempts += 1;
                match outcome {
                    Outcome::Success => ps.successes += 1,
                    Outcome::LteEdge => ps.lte_edge_collisions += 1,
                    Outcome::WifiCollision => ps.wifi_wifi_collisions += 1,
                }
            }
            if outcome == Outcome::Success {
                st.stage = 0;
            } else {
                st.stage += 1;
                if st.stage > retry_stages {
                    observe(&TraceEvent::Drop {
                        t_ns: frame_end,
                        station: i,
                    });
                    if counted {
                        ps.drops += 1;
                    }
                    st.stage = 0;
                }
            }
            st.counter = draw(&mut rng, st.stage);
            observe(&TraceEvent::Backoff {
                t_ns: frame_end,
                station: i,
                stage: st.stage,
                slots: st.counter,
            });
        }
        t_free = busy_end;
    }
    if t_free < end {
        idle_ns += end - t_free;
    }

    let window_us = (end - warmup) as f64 / NS_PER_US;
    let bits = f64::from(sc.packet_bytes) * 8.0;
    for ps in &mut per_station {
        ps.tput_wifi = ps.successes as f64 * bits / window_us;
    }
    Ok(summarize(per_station, busy_ns, idle_ns))
}

fn summarize(per_station: Vec<StationStats>, busy_ns: u64, idle_ns: u64) -> SimStats {
    let sum = |f: fn(&StationStats) -> u64| per_station.iter().map(f).sum::<u64>();
    let tx_attempts = sum(|s| s.tx_attempts);
    let successes = sum(|s| s.successes);
    let lte_edge_collisions = sum(|s| s.lte_edge_collisions);
    let ratio = |x: u64| {
        if tx_attempts == 0 {
            0.0
        } else {
            x as f64 / tx_attempts as f64
        }
    };
    SimStats {
        tx_attempts,
        successes,
        lte_edge_collisions,
        wifi_wifi_collisions: sum(|s| s.wifi_wifi_collisions),
        drops: sum(|s| s.drops),
        p_coll_total: if tx_attempts == 0 { 0.0 } else { 1.0 - ratio(successes) },
        p_coll_lte: ratio(lte_edge_collisions),
        tput_wifi: per_station.iter().map(|s| s.tput_wifi).sum(),
        per_station,
        ci95_tput: 0.0,
        ci95_p_coll_total: 0.0,
        ci95_p_coll_lte: 0.0,
        busy_ns,
        idle_ns,
        runs: 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(alpha: f64, n_w: u32, r_w: f64, bytes: u32, secs: f64, seed: u64) -> SimConfig {
        SimConfig::new(ScenarioConfig::new(alpha, 10_000.0, n_w, r_w, bytes), secs, seed)
    }

    #[test]
    fn schedule_intervals() {
        let s = Schedule {
            cycle: 10,
            on: 4,
            enabled: true,
        };
        assert_eq!(s.next_on(0), (0, 4));
        assert_eq!(s.next_on(3), (0, 4));
        assert_eq!(s.next_on(4), (10, 14));
        assert_eq!(s.next_on(9), (10, 14));
        assert_eq!(s.next_on(10), (10, 14));
    }

    #[test]
    fn rejects_bad_times() {
        let mut c = cfg(0.5, 1, 6.0, 1500, 1.0, 1);
        c.warmup = 1.0;
        assert!(run(&c).is_err());
        c.warmup = -0.1;
        assert!(run(&c).is_err());
    }

    #[test]
    fn counts_are_conserved() {
        for n_w in [1, 3, 10] {
            let s = run(&cfg(0.5, n_w, 6.0, 1500, 5.0, 7)).unwrap();
            assert_eq!(
                s.successes + s.lte_edge_collisions + s.wifi_wifi_collisions,
                s.tx_attempts
            );
            assert!((s.p_coll_total - (1.0 - s.successes as f64 / s.tx_attempts as f64)).abs() < 1e-15);
            assert_eq!(s.busy_ns + s.idle_ns, 5_000_000_000);
            assert_eq!(s.per_station.len(), n_w as usize);
            if n_w == 1 {
                assert_eq!(s.wifi_wifi_collisions, 0);
            }
        }
    }

    #[test]
    fn nothing_fits_in_the_off_period() {
        // T_off = 2 ms < T_p + DIFS.
        let s = run(&cfg(0.8, 1, 6.0, 1500, 5.0, 3)).unwrap();
        assert!(s.tx_attempts > 0);
        assert_eq!(s.successes, 0);
        assert_eq!(s.tput_wifi, 0.0);
        assert_eq!(s.p_coll_lte, 1.0);
        assert!(s.drops > 0);
    }

    #[test]
    fn same_seed_same_result() {
        let c = cfg(0.45, 4, 54.0, 700, 2.0, 99);
        assert_eq!(run(&c).unwrap(), run(&c).unwrap());
        let mut other = c.clone();
        other.seed = 100;
        assert_ne!(run(&c).unwrap(), run(&other).unwrap());
    }

    #[test]
    fn single_station_spacing_without_interferer() {
        // Back-to-back frames are separated by DIFS plus the drawn backoff.
        let mut c = cfg(0.5, 1, 6.0, 1500, 0.5, 5);
        c.lte_enabled = false;
        let mut last_end = None;
        let mut pending = None;
        run_traced(&c, |e| match *e {
            TraceEvent::Backoff { slots, .. } => pending = Some(slots),
            TraceEvent::TxStart { t_ns, end_ns, .. } => {
                if let (Some(prev), Some(slots)) = (last_end, pending) {
                    assert_eq!(t_ns, prev + 34_000 + u64::from(slots) * 9_000);
                }
                assert_eq!(end_ns - t_ns, 2_120_000);
                last_end = Some(end_ns);
            }
            _ => {}
        })
        .unwrap();
    }
}
