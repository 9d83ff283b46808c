//! Throughput of the coexisting Wi-Fi network, the LTE downlink, and a
//! Wi-Fi-only reference network.

use crate::dcf;
use crate::math::powi;
use crate::offperiod::{self, OffPeriodDistributions};
use crate::params::{packet_airtime_unchecked, PacketTiming, ScenarioConfig};
use crate::Result;

/// Data symbols per LTE subframe over symbols per subframe (one control
/// symbol).
pub const LTE_DATA_FRACTION: f64 = 13.0 / 14.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputReport {
    /// Wi-Fi throughput in coexistence, Mbit/s.
    pub tput_wifi_coex: f64,
    /// LTE downlink throughput, Mbit/s.
    pub tput_lte: f64,
    /// The same `n_w` stations with the channel to themselves, Mbit/s.
    pub tput_wifi_only: Option<f64>,
    pub p_trw: f64,
    pub p_sw: f64,
    pub e_n: f64,
    pub p_c_total: f64,
    pub p_cwl: f64,
    pub tau_w: f64,
    pub timing: PacketTiming,
    pub off_period: OffPeriodDistributions,
}

/// Probability that at least one of `n_w` stations transmits in a slot.
pub fn p_trw(tau: f64, n_w: u32) -> f64 {
    1.0 - powi(1.0 - tau, n_w)
}

/// Probability that a busy slot carries exactly one transmission.
pub fn p_sw(tau: f64, n_w: u32) -> f64 {
    if n_w <= 1 || tau <= 0.0 {
        return 1.0;
    }
    let busy = p_trw(tau, n_w);
    f64::from(n_w) * tau * powi(1.0 - tau, n_w - 1) / busy
}

/// LTE downlink throughput at duty cycle `alpha` and rate `r_l`.
pub fn lte_throughput(alpha: f64, r_l: f64) -> f64 {
    LTE_DATA_FRACTION * alpha * r_l
}

/// Saturation throughput of `n` stations with no interferer, Mbit/s.
pub fn wifi_only_throughput(n: u32, cfg: &ScenarioConfig) -> Result<f64> {
    cfg.wifi.validate()?;
    let w = &cfg.wifi;
    let sol = dcf::solve_wifi_only(n, w.w0, w.m)?;
    let timing = packet_airtime_unchecked(w, cfg.r_w, cfg.packet_bytes);
    Ok(wifi_only_from_tau(sol.tau, n, cfg, &timing))
}

fn wifi_only_from_tau(tau: f64, n: u32, cfg: &ScenarioConfig, timing: &PacketTiming) -> f64 {
    let w = &cfg.wifi;
    let p_tr = p_trw(tau, n);
    let p_s = p_sw(tau, n);
    // Both the success and collision periods span the whole exchange.
    let t_sw = timing.t_p + w.difs + 2.0 * w.delta;
    let t_cw = t_sw;
    let num = p_tr * p_s * timing.t_d;
    let den = (1.0 - p_tr) * w.sigma + p_tr * (1.0 - p_s) * t_cw + p_tr * p_s * t_sw;
    num / den * cfg.r_w
}

/// Coexistence throughput: LTE edge collisions from the single-transmitter
/// OFF-period model, the joint (tau, P_c,t) fixed point, then the expected
/// number of frames per OFF period.
pub fn wifi_coex_throughput(cfg: &ScenarioConfig) -> Result<ThroughputReport> {
    cfg.validate()?;
    let w = &cfg.wifi;
    let timing = packet_airtime_unchecked(w, cfg.r_w, cfg.packet_bytes);
    let lte = cfg.lte.timing();
    let geom = offperiod::geometry(lte.t_off, timing.t_p, w.difs, w.sigma, w.w0);
    let single = offperiod::single_station(geom, w.w0)?;
    let p_cwl = single.p_cwl;

    let (tau_w, p_c_total) = if p_cwl < 1.0 {
        let sol = dcf::solve_coex(cfg.n_w, p_cwl, w.w0, w.m)?;
        (sol.tau, sol.p_coll)
    } else {
        // Every attempt is lost to the ON edge: the chain sits at the
        // p -> 1 limit of its transmission probability.
        (dcf::tau_at_certain_collision(w.w0, w.m), 1.0)
    };

    let p_tr = p_trw(tau_w, cfg.n_w);
    let p_s = p_sw(tau_w, cfg.n_w);
    let off_period = if cfg.n_w > 1 {
        offperiod::with_contention(single, p_tr)?
    } else {
        single
    };
    let e_n = off_period.e_n;
    let tput_wifi_coex = e_n * timing.t_d * p_s / cfg.lte.t_cycle * cfg.r_w;

    let wifi_only = dcf::solve_wifi_only(cfg.n_w, w.w0, w.m)?;
    Ok(ThroughputReport {
        tput_wifi_coex,
        tput_lte: lte_throughput(cfg.lte.alpha, cfg.lte.r_l),
        tput_wifi_only: Some(wifi_only_from_tau(wifi_only.tau, cfg.n_w, cfg, &timing)),
        p_trw: p_tr,
        p_sw: p_s,
        e_n,
        p_c_total,
        p_cwl,
        tau_w,
        timing,
        off_period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(alpha: f64, t_cycle: f64, n_w: u32, r_w: f64, bytes: u32) -> ScenarioConfig {
        ScenarioConfig::new(alpha, t_cycle, n_w, r_w, bytes)
    }

    #[test]
    fn busy_and_success_probabilities() {
        assert!((p_trw(0.3, 1) - 0.3).abs() < 1e-15);
        assert_eq!(p_trw(0.0, 7), 0.0);
        assert!((p_trw(0.1, 5) - 0.40951).abs() < 1e-12);
        assert_eq!(p_sw(0.4, 1), 1.0);
        assert_eq!(p_sw(0.0, 9), 1.0);
        assert!((p_sw(1e-9, 9) - 1.0).abs() < 1e-6);
        let want = 5.0 * 0.1 * 0.9f64.powi(4) / 0.40951;
        assert!((p_sw(0.1, 5) - want).abs() < 1e-12);
        assert!((p_sw(0.1, 5) - 0.8011).abs() < 1e-4);
    }

    #[test]
    fn lte_throughput_is_linear() {
        assert!((lte_throughput(0.5, 100.0) - 46.428_571_428_571).abs() < 1e-9);
        assert_eq!(lte_throughput(0.0, 100.0), 0.0);
        let x = lte_throughput(0.2, 75.0);
        assert!((lte_throughput(0.4, 75.0) - 2.0 * x).abs() < 1e-12);
        assert!((lte_throughput(0.2, 150.0) - 2.0 * x).abs() < 1e-12);
    }

    #[test]
    fn single_station_wifi_only_closed_form() {
        let cfg = scenario(0.5, 10_000.0, 1, 6.0, 1500);
        let got = wifi_only_throughput(1, &cfg).unwrap();
        // With one station tau = 2/(W0+1): mean idle time per frame is
        // sigma * (1 - tau) / tau = sigma * (W0 - 1) / 2.
        let t_sw = 2120.0 + 34.0 + 0.2;
        let want = 2000.0 * 6.0 / (t_sw + 9.0 * 7.5);
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn wifi_only_header_overhead_and_contention() {
        let six = wifi_only_throughput(2, &scenario(0.5, 10_000.0, 2, 6.0, 1500)).unwrap();
        let fast = wifi_only_throughput(2, &scenario(0.5, 10_000.0, 2, 54.0, 1500)).unwrap();
        assert!(fast < 9.0 * six);
        assert!(fast > six);
        let cfg = scenario(0.5, 10_000.0, 2, 6.0, 1500);
        let two = wifi_only_throughput(2, &cfg).unwrap();
        let twenty = wifi_only_throughput(20, &cfg).unwrap();
        assert!(twenty < two);
    }

    #[test]
    fn nothing_fits_gives_zero_throughput() {
        // T_off = 2000 us < T_p + DIFS = 2154 us.
        let r = wifi_coex_throughput(&scenario(0.8, 10_000.0, 1, 6.0, 1500)).unwrap();
        assert_eq!(r.e_n, 0.0);
        assert_eq!(r.tput_wifi_coex, 0.0);
        assert_eq!(r.p_cwl, 1.0);
        assert_eq!(r.p_c_total, 1.0);
        assert!(r.tau_w > 0.0 && r.tau_w < 2.0 / 17.0);
    }

    #[test]
    fn duty_cycles_0_4_and_0_5_coincide_at_1500_bytes() {
        let a = wifi_coex_throughput(&scenario(0.4, 10_000.0, 1, 6.0, 1500)).unwrap();
        let b = wifi_coex_throughput(&scenario(0.5, 10_000.0, 1, 6.0, 1500)).unwrap();
        assert_eq!(a.p_cwl, b.p_cwl);
        assert_eq!(a.tput_wifi_coex, b.tput_wifi_coex);
        // With contention the success tail depends on the exact L_b(k), which
        // moves with T_off; the two curves agree only to plotting accuracy.
        for n_w in [5, 10] {
            let a = wifi_coex_throughput(&scenario(0.4, 10_000.0, n_w, 6.0, 1500)).unwrap();
            let b = wifi_coex_throughput(&scenario(0.5, 10_000.0, n_w, 6.0, 1500)).unwrap();
            assert_eq!(a.p_cwl, b.p_cwl);
            assert_eq!(a.p_c_total, b.p_c_total);
            let rel = (a.tput_wifi_coex - b.tput_wifi_coex).abs() / a.tput_wifi_coex;
            assert!(rel < 1e-5, "n_w={n_w}: {rel}");
        }
    }

    #[test]
    fn coexistence_stays_below_duty_cycled_wifi_only() {
        for &(t_cycle, r_w) in &[(10_000.0, 6.0), (30_000.0, 6.0), (10_000.0, 54.0)] {
            for n_w in 1..=4 {
                for i in 1..10 {
                    let alpha = f64::from(i) / 10.0;
                    for bytes in (100..=2000).step_by(100) {
                        let cfg = scenario(alpha, t_cycle, n_w, r_w, bytes);
                        let r = wifi_coex_throughput(&cfg).unwrap();
                        let bound = (1.0 - alpha) * r.tput_wifi_only.unwrap();
                        assert!(
                            r.tput_wifi_coex <= bound + 1e-9,
                            "T_C={t_cycle} r_w={r_w} n_w={n_w} alpha={alpha} bytes={bytes}: {} > {bound}",
                            r.tput_wifi_coex
                        );
                        assert!(r.tput_wifi_coex <= (1.0 - alpha) * r_w);
                    }
                }
            }
        }
    }

    #[test]
    fn many_stations_can_beat_the_duty_cycled_bound() {
        // The OFF period removes the contention a full-time network pays
        // for, so with enough stations coexistence is the better deal.
        let cfg = scenario(0.1, 10_000.0, 10, 6.0, 1500);
        let r = wifi_coex_throughput(&cfg).unwrap();
        assert!(r.tput_wifi_coex > 0.9 * r.tput_wifi_only.unwrap());
    }

    #[test]
    fn mean_over_sizes_decreases_with_alpha() {
        let mut prev = f64::INFINITY;
        for i in 1..10 {
            let alpha = f64::from(i) / 10.0;
            let mut total = 0.0;
            let mut count = 0.0;
            for bytes in (500..=2000).step_by(100) {
                total += wifi_coex_throughput(&scenario(alpha, 10_000.0, 1, 6.0, bytes))
                    .unwrap()
                    .tput_wifi_coex;
                count += 1.0;
            }
            let mean = total / count;
            assert!(mean < prev, "alpha={alpha}: {mean} !< {prev}");
            prev = mean;
        }
    }
}
