//! Base-station power consumption and energy efficiency.
//!
//! Total consumed power is the sum of eight terms: radiated downlink power,
//! uplink training, channel estimation, coding/decoding, backhaul, digital
//! processing, transceiver chains and a fixed site load. Processing power is
//! derived from flop counts and the BS computational efficiency.

use crate::error::{Error, Result};
use crate::precoding::Precoder;

/// Power-model constants. Defaults are the reference XL-MIMO deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerParams {
    /// System bandwidth `B` (Hz).
    pub bandwidth: f64,
    /// Coherence block `S` (symbols).
    pub coherence_block: f64,
    /// Uplink pilot length (symbols). `None` means one pilot per user, capped at `S`.
    pub tau: Option<f64>,
    /// Long-term fading coherence time (s).
    pub t_lt: f64,
    /// Computational efficiency (flops per joule, i.e. flops/s per W).
    pub l_bs: f64,
    /// BS power-amplifier efficiency.
    pub eta_dl: f64,
    /// Mobile-terminal power-amplifier efficiency.
    pub eta_ul_mt: f64,
    /// Downlink fraction of the data phase.
    pub xi_dl: f64,
    /// Uplink fraction of the data phase (uplink data is not modeled).
    pub xi_ul: f64,
    /// Uplink pilot transmit power (W).
    pub rho_p: f64,
    pub p_fix: f64,
    pub p_syn: f64,
    /// Circuit power per active BS antenna (W).
    pub p_bs: f64,
    /// Circuit power per mobile terminal (W).
    pub p_mt: f64,
    /// Coding power density (W per bit/s).
    pub p_cod: f64,
    /// Decoding power density (W per bit/s).
    pub p_dec: f64,
    /// Backhaul power density (W per bit/s).
    pub p_bt: f64,
}

impl Default for PowerParams {
    fn default() -> Self {
        Self {
            bandwidth: 20e6,
            coherence_block: 200.0,
            tau: None,
            t_lt: 2.0,
            l_bs: 12.8e9,
            eta_dl: 0.39,
            eta_ul_mt: 0.5,
            xi_dl: 1.0,
            xi_ul: 0.0,
            rho_p: 0.02,
            p_fix: 18.0,
            p_syn: 2.0,
            p_bs: 1.0,
            p_mt: 0.1,
            p_cod: 0.1e-9,
            p_dec: 0.8e-9,
            p_bt: 0.25e-9,
        }
    }
}

impl PowerParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("bandwidth", self.bandwidth),
            ("coherence_block", self.coherence_block),
            ("t_lt", self.t_lt),
            ("l_bs", self.l_bs),
            ("eta_dl", self.eta_dl),
            ("eta_ul_mt", self.eta_ul_mt),
        ];
        for (name, v) in fields {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        let nonneg = [
            ("xi_dl", self.xi_dl),
            ("xi_ul", self.xi_ul),
            ("rho_p", self.rho_p),
            ("p_fix", self.p_fix),
            ("p_syn", self.p_syn),
            ("p_bs", self.p_bs),
            ("p_mt", self.p_mt),
            ("p_cod", self.p_cod),
            ("p_dec", self.p_dec),
            ("p_bt", self.p_bt),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be >= 0, got {v}")));
            }
        }
        if let Some(tau) = self.tau {
            if !(tau.is_finite() && tau >= 0.0) {
                return Err(Error::InvalidParameter(format!("tau must be >= 0, got {tau}")));
            }
            if tau > self.coherence_block {
                return Err(Error::PilotTooLong {
                    tau,
                    block: self.coherence_block,
                });
            }
        }
        Ok(())
    }

    /// Effective pilot length for `k` users.
    pub fn pilot_length(&self, k: usize) -> f64 {
        self.tau.unwrap_or_else(|| (k as f64).min(self.coherence_block))
    }

    /// Rate-proportional power density `P_cod + P_dec + P_bt` (W per bit/s).
    pub fn p_bc(&self) -> f64 {
        self.p_cod + self.p_dec + self.p_bt
    }

    /// Power decomposition for `ms` active antennas serving `k` users at
    /// `sum_rate_bps`. `selection_flops` is the antenna-selection cost, or
    /// `None` when no selector runs.
    pub fn breakdown(
        &self,
        p_max: f64,
        precoder: Precoder,
        ms: usize,
        k: usize,
        sum_rate_bps: f64,
        selection_flops: Option<f64>,
    ) -> Result<PowerBreakdown> {
        let tau = self.pilot_length(k);
        let block = self.coherence_block;
        if tau > block {
            return Err(Error::PilotTooLong { tau, block });
        }
        if sum_rate_bps.is_nan() || sum_rate_bps < 0.0 {
            return Err(Error::InvalidParameter(format!("sum rate {sum_rate_bps} is negative")));
        }
        let b = self.bandwidth;
        let (msf, kf) = (ms as f64, k as f64);

        let c_ts = Complexity::TransmitSignal { ms, k }.flops();
        let c_prec = match precoder {
            Precoder::Cb => Complexity::PrecodingCb { ms, k },
            Precoder::Zf => Complexity::PrecodingZf { ms, k },
        }
        .flops();
        let c_as = selection_flops.unwrap_or(0.0);

        let p_tx_dl = self.xi_dl * p_max / self.eta_dl;
        let p_tx_tr = tau / block * kf * self.rho_p / self.eta_ul_mt;
        let p_ce = b / block * 2.0 * tau * msf * kf / self.l_bs;
        let p_cd = (self.p_cod + self.p_dec) * sum_rate_bps;
        let p_bh = self.p_bt * sum_rate_bps;
        let p_pr = b * (1.0 - tau / block) * c_ts / self.l_bs
            + b / block * c_prec / self.l_bs
            + c_as / (self.t_lt * self.l_bs);
        let p_tc = self.p_syn + msf * self.p_bs + kf * self.p_mt;
        let p_fix = self.p_fix;

        let total = p_tx_dl + p_tx_tr + p_ce + p_cd + p_bh + p_pr + p_tc + p_fix;
        let p_dagger = p_tx_dl + p_tx_tr + self.p_syn + kf * self.p_mt + p_fix;
        Ok(PowerBreakdown {
            p_tx_dl,
            p_tx_tr,
            p_ce,
            p_cd,
            p_bh,
            p_pr,
            p_tc,
            p_fix,
            total,
            p_dagger,
        })
    }
}

/// Consumed power split by component (watts).
#[derive(Debug, Clone, PartialEq)]
pub struct PowerBreakdown {
    pub p_tx_dl: f64,
    pub p_tx_tr: f64,
    pub p_ce: f64,
    pub p_cd: f64,
    pub p_bh: f64,
    pub p_pr: f64,
    pub p_tc: f64,
    pub p_fix: f64,
    pub total: f64,
    /// Terms that do not depend on the active set.
    pub p_dagger: f64,
}

impl PowerBreakdown {
    pub fn components(&self) -> [f64; 8] {
        [
            self.p_tx_dl,
            self.p_tx_tr,
            self.p_ce,
            self.p_cd,
            self.p_bh,
            self.p_pr,
            self.p_tc,
            self.p_fix,
        ]
    }
}

/// Energy efficiency `B * sum_se / total` in bits per joule.
pub fn energy_efficiency(sum_se_bpcu: f64, bandwidth: f64, breakdown: &PowerBreakdown) -> Result<f64> {
    if !(breakdown.total > 0.0) {
        return Err(Error::NonPositivePower(breakdown.total));
    }
    Ok(bandwidth * sum_se_bpcu / breakdown.total)
}

/// Flop counts (one flop = one arithmetic operation on two complex numbers).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Complexity {
    /// Forming the transmit vector: `2 Ms K`.
    TransmitSignal { ms: usize, k: usize },
    /// CB precoder: `3 Ms K`.
    PrecodingCb { ms: usize, k: usize },
    /// ZF precoder: `K^3/3 + 3 Ms K^2 + Ms K`.
    PrecodingZf { ms: usize, k: usize },
    /// One energy-efficiency evaluation: `2 M K^2`.
    EnergyEfficiency { m: usize, k: usize },
    /// HRNP ranking and sort: `3 M K + M ln M`.
    Hrnp { m: usize, k: usize },
    /// `C_hrnp + N_it M C_ee`.
    LocalSearch { m: usize, k: usize, iterations: f64 },
    /// `C_hrnp + N_it (P C_ee + P ln P)`.
    Genetic { m: usize, k: usize, iterations: f64, population: usize },
    /// `C_hrnp + N_it (P C_ee + P)`.
    Swarm { m: usize, k: usize, iterations: f64, particles: usize },
}

impl Complexity {
    pub fn flops(&self) -> f64 {
        let ln = |x: usize| if x == 0 { 0.0 } else { (x as f64).ln() };
        match *self {
            Complexity::TransmitSignal { ms, k } => 2.0 * ms as f64 * k as f64,
            Complexity::PrecodingCb { ms, k } => 3.0 * ms as f64 * k as f64,
            Complexity::PrecodingZf { ms, k } => {
                let (ms, k) = (ms as f64, k as f64);
                k.powi(3) / 3.0 + 3.0 * ms * k * k + ms * k
            }
            Complexity::EnergyEfficiency { m, k } => 2.0 * m as f64 * (k as f64).powi(2),
            Complexity::Hrnp { m, k } => 3.0 * m as f64 * k as f64 + m as f64 * ln(m),
            Complexity::LocalSearch { m, k, iterations } => {
                Complexity::Hrnp { m, k }.flops()
                    + iterations * m as f64 * Complexity::EnergyEfficiency { m, k }.flops()
            }
            Complexity::Genetic { m, k, iterations, population } => {
                let p = population as f64;
                Complexity::Hrnp { m, k }.flops()
                    + iterations * (p * Complexity::EnergyEfficiency { m, k }.flops() + p * ln(population))
            }
            Complexity::Swarm { m, k, iterations, particles } => {
                let p = particles as f64;
                Complexity::Hrnp { m, k }.flops()
                    + iterations * (p * Complexity::EnergyEfficiency { m, k }.flops() + p)
            }
        }
    }
}

/// Flop budget of one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlopCost {
    pub c_ts: f64,
    pub c_prec: f64,
    pub c_as: f64,
    pub c_ee: f64,
}

impl FlopCost {
    pub fn new(precoder: Precoder, ms: usize, k: usize, m: usize, c_as: f64) -> Self {
        let c_prec = match precoder {
            Precoder::Cb => Complexity::PrecodingCb { ms, k },
            Precoder::Zf => Complexity::PrecodingZf { ms, k },
        };
        Self {
            c_ts: Complexity::TransmitSignal { ms, k }.flops(),
            c_prec: c_prec.flops(),
            c_as,
            c_ee: Complexity::EnergyEfficiency { m, k }.flops(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn flop_examples() {
        assert_eq!(Complexity::TransmitSignal { ms: 146, k: 100 }.flops(), 29_200.0);
        assert_eq!(Complexity::PrecodingZf { ms: 0, k: 3 }.flops(), 9.0);
        let hrnp = Complexity::Hrnp { m: 500, k: 100 }.flops();
        assert_relative_eq!(hrnp, 150_000.0 + 500.0 * 500f64.ln(), max_relative = 1e-15);
        assert!((hrnp - 153_107.0).abs() < 1.0);
    }

    #[test]
    fn selector_flops_build_on_hrnp() {
        let (m, k) = (500, 100);
        let hrnp = Complexity::Hrnp { m, k }.flops();
        let ee = Complexity::EnergyEfficiency { m, k }.flops();
        assert_eq!(ee, 1e7);
        assert_relative_eq!(
            Complexity::LocalSearch { m, k, iterations: 3.0 }.flops(),
            hrnp + 3.0 * 500.0 * 1e7
        );
        assert_relative_eq!(
            Complexity::Genetic { m, k, iterations: 2.0, population: 250 }.flops(),
            hrnp + 2.0 * (250.0 * 1e7 + 250.0 * 250f64.ln())
        );
        assert_relative_eq!(
            Complexity::Swarm { m, k, iterations: 4.0, particles: 100 }.flops(),
            hrnp + 4.0 * (100.0 * 1e7 + 100.0)
        );
        let fc = FlopCost::new(Precoder::Cb, 10, 2, 20, 5.0);
        assert_eq!((fc.c_ts, fc.c_prec, fc.c_as, fc.c_ee), (40.0, 60.0, 5.0, 160.0));
    }

    #[test]
    fn idle_array_costs_only_fixed_terms() {
        let pp = PowerParams::default();
        let p_max = 0.23e-3;
        let b = pp.breakdown(p_max, Precoder::Zf, 0, 100, 0.0, None).unwrap();
        let zf_fixed = pp.bandwidth / pp.coherence_block * (100f64.powi(3) / 3.0) / pp.l_bs;
        assert_relative_eq!(b.total, b.p_dagger + zf_fixed, max_relative = 1e-14);
        assert_eq!(b.p_ce, 0.0);
        assert_eq!(b.p_cd, 0.0);
    }

    #[test]
    fn training_power_reference_value() {
        let b = PowerParams::default()
            .breakdown(0.23e-3, Precoder::Zf, 10, 100, 0.0, None)
            .unwrap();
        assert_relative_eq!(b.p_tx_tr, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn slope_in_active_antennas() {
        let pp = PowerParams::default();
        let (k, b, s, l) = (100.0, pp.bandwidth, pp.coherence_block, pp.l_bs);
        let t1 = pp.p_bs + 5.0 * b * k * k / (s * l) + (1.0 - k / s) * 2.0 * b * k / l + b * k / (s * l);
        assert_relative_eq!(t1, 1.548, max_relative = 1e-3);
        let at = |ms| pp.breakdown(0.23e-3, Precoder::Zf, ms, 100, 1e9, Some(1e5)).unwrap().total;
        for ms in [1, 100, 146, 499] {
            assert_relative_eq!(at(ms + 1) - at(ms), t1, max_relative = 1e-9);
        }
    }

    #[test]
    fn components_close_exactly() {
        let b = PowerParams::default()
            .breakdown(0.23e-3, Precoder::Cb, 146, 100, 9.6e9, Some(153_107.0))
            .unwrap();
        let sum: f64 = b.components().iter().sum();
        assert_eq!(b.total - sum, 0.0);
        assert_relative_eq!(
            b.p_dagger,
            b.p_tx_dl + b.p_tx_tr + 2.0 + 100.0 * 0.1 + 18.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn selection_cost_vanishes_with_infinite_coherence() {
        let pp = PowerParams { t_lt: f64::INFINITY, ..Default::default() };
        let with = pp.breakdown(1e-3, Precoder::Zf, 146, 100, 1e9, Some(1e12)).unwrap();
        let without = pp.breakdown(1e-3, Precoder::Zf, 146, 100, 1e9, None).unwrap();
        assert_eq!(with.p_pr, without.p_pr);
    }

    #[test]
    fn pilot_length_defaults_and_limits() {
        let pp = PowerParams::default();
        assert_eq!(pp.pilot_length(100), 100.0);
        assert_eq!(pp.pilot_length(256), 200.0);
        let long = PowerParams { tau: Some(300.0), ..Default::default() };
        assert!(matches!(long.validate(), Err(Error::PilotTooLong { .. })));
        assert!(long.breakdown(1e-3, Precoder::Zf, 10, 10, 0.0, None).is_err());
    }

    #[test]
    fn energy_efficiency_examples() {
        let pp = PowerParams::default();
        let mut b = pp.breakdown(0.23e-3, Precoder::Zf, 146, 100, 0.0, None).unwrap();
        assert_eq!(energy_efficiency(0.0, 20e6, &b).unwrap(), 0.0);

        b.total = 271.7;
        let ee = energy_efficiency(482.5, 20e6, &b).unwrap();
        assert_relative_eq!(ee, 35.5e6, max_relative = 1e-3);

        let mut doubled = b.clone();
        doubled.total *= 2.0;
        assert_eq!(energy_efficiency(482.5, 20e6, &doubled).unwrap(), ee / 2.0);

        b.total = 0.0;
        assert!(matches!(energy_efficiency(1.0, 20e6, &b), Err(Error::NonPositivePower(_))));
    }
}
