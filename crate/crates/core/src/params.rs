//! Scenario parameters and the airtime quantities derived from them.
//!
//! All durations are microseconds, all rates Mbit/s, sizes in bytes. A
//! duration in µs times a rate in Mbit/s is a bit count, which keeps the
//! airtime formulas free of unit factors.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// LTE-U Forum limits on the ON and OFF durations, µs.
pub const LTEU_MIN_ON_US: f64 = 4000.0;
pub const LTEU_MAX_ON_US: f64 = 20000.0;
pub const LTEU_MIN_OFF_US: f64 = 1000.0;

/// 802.11a DCF constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WifiMacParams {
    /// Minimum contention window, slots. CWmin = 15 gives 16.
    pub w0: u32,
    /// Highest backoff stage. CWmax = 1023 with W0 = 16 gives 6.
    pub m: u32,
    pub sigma: f64,
    pub difs: f64,
    pub sifs: f64,
    pub phy_header: f64,
    pub mac_header_bytes: u32,
    pub ack_bytes: u32,
    /// Preamble portion of the ACK, sent independently of the ACK rate.
    pub ack_extra: f64,
    /// Propagation delay. Only the Wi-Fi-only throughput formula uses it.
    pub delta: f64,
    /// Basic rate set used for ACKs, ascending.
    pub basic_rates: Vec<f64>,
}

impl Default for WifiMacParams {
    fn default() -> Self {
        Self {
            w0: 16,
            m: 6,
            sigma: 9.0,
            difs: 34.0,
            sifs: 16.0,
            phy_header: 20.0,
            mac_header_bytes: 34,
            ack_bytes: 14,
            ack_extra: 20.0,
            delta: 0.1,
            basic_rates: vec![6.0, 12.0, 24.0],
        }
    }
}

impl WifiMacParams {
    pub fn validate(&self) -> Result<()> {
        if self.w0 < 2 || !self.w0.is_power_of_two() {
            return Err(Error::Config(format!(
                "w0 must be a power of two >= 2, got {}",
                self.w0
            )));
        }
        // 2^m * W0 must fit comfortably in a u32 slot counter.
        if self.m > 20 {
            return Err(Error::Config(format!("m = {} is unreasonably large", self.m)));
        }
        for (name, v) in [
            ("sigma", self.sigma),
            ("difs", self.difs),
            ("sifs", self.sifs),
            ("phy_header", self.phy_header),
            ("ack_extra", self.ack_extra),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::Config(format!("delta must be non-negative, got {}", self.delta)));
        }
        if self.mac_header_bytes == 0 || self.ack_bytes == 0 {
            return Err(Error::Config("header sizes must be positive".into()));
        }
        if self.basic_rates.is_empty() {
            return Err(Error::Config("basic_rates must not be empty".into()));
        }
        if self.basic_rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Config("basic rates must be positive".into()));
        }
        if self.basic_rates.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Config("basic_rates must be sorted ascending".into()));
        }
        Ok(())
    }

    /// Contention window at backoff stage `stage`; stages above `m` reuse W_m.
    pub fn window(&self, stage: u32) -> u32 {
        self.w0 << stage.min(self.m)
    }
}

/// Fixed duty-cycle LTE downlink.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LteDcParams {
    /// Fraction of the cycle the eNB transmits.
    pub alpha: f64,
    /// Cycle period T_C, µs.
    pub t_cycle: f64,
    /// LTE data rate, Mbit/s.
    pub r_l: f64,
}

impl LteDcParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.t_cycle.is_finite() && self.t_cycle > 0.0) {
            return Err(Error::Config(format!("t_cycle must be positive, got {}", self.t_cycle)));
        }
        if !(self.r_l.is_finite() && self.r_l > 0.0) {
            return Err(Error::Config(format!("r_l must be positive, got {}", self.r_l)));
        }
        Ok(())
    }

    pub fn timing(&self) -> LteTiming {
        LteTiming::split(self.alpha, self.t_cycle)
    }

    /// Checks the LTE-U Forum ON/OFF duration limits.
    pub fn check_lteu_limits(&self) -> Result<()> {
        let t = self.timing();
        let mut violated = Vec::new();
        if t.t_on < LTEU_MIN_ON_US {
            violated.push(format!("T_on = {} us < {} us", t.t_on, LTEU_MIN_ON_US));
        }
        if t.t_on > LTEU_MAX_ON_US {
            violated.push(format!("T_on = {} us > {} us", t.t_on, LTEU_MAX_ON_US));
        }
        if t.t_off < LTEU_MIN_OFF_US {
            violated.push(format!("T_off = {} us < {} us", t.t_off, LTEU_MIN_OFF_US));
        }
        if violated.is_empty() {
            Ok(())
        } else {
            Err(Error::LteuLimit(violated.join("; ")))
        }
    }
}

/// ON/OFF split of one LTE cycle, µs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LteTiming {
    pub t_on: f64,
    pub t_off: f64,
}

impl LteTiming {
    /// Splits `t_cycle` so that `t_on + t_off == t_cycle` holds exactly in
    /// floating point. The smaller part is computed by subtraction from the
    /// larger, which is exact (Sterbenz) since the larger is >= t_cycle / 2.
    pub fn split(alpha: f64, t_cycle: f64) -> Self {
        if alpha >= 0.5 {
            let t_on = alpha * t_cycle;
            Self {
                t_on,
                t_off: t_cycle - t_on,
            }
        } else {
            let t_off = t_cycle - alpha * t_cycle;
            Self {
                t_on: t_cycle - t_off,
                t_off,
            }
        }
    }
}

/// One coexistence scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub wifi: WifiMacParams,
    pub lte: LteDcParams,
    /// Number of saturated Wi-Fi stations.
    pub n_w: u32,
    /// Wi-Fi data rate, Mbit/s.
    pub r_w: f64,
    /// MAC payload size N_B, bytes.
    pub packet_bytes: u32,
    #[serde(default)]
    pub enforce_lteu_limits: bool,
}

impl ScenarioConfig {
    /// Table-default Wi-Fi parameters with the given LTE and traffic settings.
    pub fn new(alpha: f64, t_cycle: f64, n_w: u32, r_w: f64, packet_bytes: u32) -> Self {
        Self {
            wifi: WifiMacParams::default(),
            lte: LteDcParams {
                alpha,
                t_cycle,
                r_l: 100.0,
            },
            n_w,
            r_w,
            packet_bytes,
            enforce_lteu_limits: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.wifi.validate()?;
        self.lte.validate()?;
        if self.n_w == 0 {
            return Err(Error::Config("n_w must be at least 1".into()));
        }
        if self.packet_bytes == 0 {
            return Err(Error::Config("packet_bytes must be positive".into()));
        }
        if !(self.r_w.is_finite() && self.r_w > 0.0) {
            return Err(Error::Config(format!("r_w must be positive, got {}", self.r_w)));
        }
        ack_basic_rate(self.r_w, &self.wifi.basic_rates)?;
        if self.enforce_lteu_limits {
            self.lte.check_lteu_limits()?;
        }
        Ok(())
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        let mut cfg = self.clone();
        cfg.lte.alpha = alpha;
        cfg
    }

    pub fn with_n_w(&self, n_w: u32) -> Self {
        let mut cfg = self.clone();
        cfg.n_w = n_w;
        cfg
    }
}

/// Airtime components of one data frame exchange, µs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketTiming {
    /// Payload duration T_d.
    pub t_d: f64,
    /// MAC header duration.
    pub t_mach: f64,
    /// ACK duration at the chosen basic rate.
    pub t_ack: f64,
    /// Total airtime T_p = MACH + PhyH + T_d + SIFS + ACK (no DIFS).
    pub t_p: f64,
    /// ACK rate r_0.
    pub r_0: f64,
}

/// Highest basic rate not exceeding the data rate.
pub fn ack_basic_rate(r_w: f64, basic_rates: &[f64]) -> Result<f64> {
    basic_rates.iter().copied().rfind(|&r| r <= r_w).ok_or_else(|| {
        Error::Config(format!(
            "data rate {r_w} Mbps is below every basic rate {basic_rates:?}"
        ))
    })
}

pub fn packet_airtime(cfg: &ScenarioConfig) -> Result<PacketTiming> {
    cfg.validate()?;
    Ok(packet_airtime_unchecked(&cfg.wifi, cfg.r_w, cfg.packet_bytes))
}

pub(crate) fn packet_airtime_unchecked(wifi: &WifiMacParams, r_w: f64, packet_bytes: u32) -> PacketTiming {
    // Validated configs always have a basic rate <= r_w.
    let r_0 = ack_basic_rate(r_w, &wifi.basic_rates).unwrap_or(wifi.basic_rates[0]);
    let t_d = f64::from(packet_bytes) * 8.0 / r_w;
    let t_mach = f64::from(wifi.mac_header_bytes) * 8.0 / r_w;
    let t_ack = f64::from(wifi.ack_bytes) * 8.0 / r_0 + wifi.ack_extra;
    PacketTiming {
        t_d,
        t_mach,
        t_ack,
        t_p: t_mach + wifi.phy_header + t_d + wifi.sifs + t_ack,
        r_0,
    }
}

/// (T_on, T_off) of a scenario, checking the LTE-U limits when enabled.
pub fn lte_timing(lte: &LteDcParams, enforce_lteu_limits: bool) -> Result<LteTiming> {
    lte.validate()?;
    if enforce_lteu_limits {
        lte.check_lteu_limits()?;
    }
    Ok(lte.timing())
}
