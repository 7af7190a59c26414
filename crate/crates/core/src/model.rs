//! System model: static parameters, channel power gains, per-subchannel
//! decisions and the closed-form rate and fronthaul expressions every solver
//! is built on.
//!
//! Units are SI throughout: rates in bits/s, powers in watts, bandwidth in Hz.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::scalar::{le_rel, Scalar};

/// Relative slack used when checking constraint satisfaction.
pub const FEASIBILITY_RTOL: f64 = 1e-9;

/// Static description of one cluster: dimensions, bandwidth, quantizers,
/// fronthaul links, power budgets, weights and receiver noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams<T> {
    pub num_rrhs: usize,
    pub num_users: usize,
    pub num_subchannels: usize,
    /// Total bandwidth `B` in Hz.
    pub bandwidth: T,
    /// Scalar quantizer resolution per RRH, bits per I/Q component.
    pub quantizer_bits: Vec<u32>,
    /// Fronthaul capacity per RRH in bits/s.
    pub fronthaul_capacity: Vec<T>,
    /// Total transmit power budget per user in watts.
    pub power_budget: Vec<T>,
    /// Rate weight per user.
    pub weights: Vec<T>,
    /// Receiver noise power per RRH and subchannel in watts.
    pub noise_power: Vec<T>,
}

impl<T: Scalar> SystemParams<T> {
    /// Parameters with identical values across RRHs and across users.
    #[allow(clippy::too_many_arguments)]
    pub fn uniform(
        num_rrhs: usize,
        num_users: usize,
        num_subchannels: usize,
        bandwidth: T,
        quantizer_bits: u32,
        fronthaul_capacity: T,
        power_budget: T,
        noise_power: T,
    ) -> Result<Self, ModelError> {
        let params = Self {
            num_rrhs,
            num_users,
            num_subchannels,
            bandwidth,
            quantizer_bits: vec![quantizer_bits; num_rrhs],
            fronthaul_capacity: vec![fronthaul_capacity; num_rrhs],
            power_budget: vec![power_budget; num_users],
            weights: vec![T::one(); num_users],
            noise_power: vec![noise_power; num_rrhs],
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidParams(msg));
        if self.num_rrhs == 0 || self.num_users == 0 || self.num_subchannels == 0 {
            return bad("M, K and N must all be at least 1".into());
        }
        if !(self.bandwidth > T::zero() && self.bandwidth.is_finite()) {
            return bad(format!(
                "bandwidth must be positive, got {}",
                self.bandwidth
            ));
        }
        let m = self.num_rrhs;
        let k = self.num_users;
        for (name, len, want) in [
            ("quantizer_bits", self.quantizer_bits.len(), m),
            ("fronthaul_capacity", self.fronthaul_capacity.len(), m),
            ("noise_power", self.noise_power.len(), m),
            ("power_budget", self.power_budget.len(), k),
            ("weights", self.weights.len(), k),
        ] {
            if len != want {
                return bad(format!("{name} has length {len}, expected {want}"));
            }
        }
        if let Some(b) = self.quantizer_bits.iter().find(|&&b| b == 0 || b > 60) {
            return bad(format!(
                "quantizer resolution must be in 1..=60 bits, got {b}"
            ));
        }
        let positive = |v: &[T]| v.iter().all(|&x| x > T::zero() && x.is_finite());
        if !positive(&self.fronthaul_capacity) {
            return bad("fronthaul capacities must be positive".into());
        }
        if !positive(&self.power_budget) {
            return bad("power budgets must be positive".into());
        }
        if !positive(&self.noise_power) {
            return bad("noise powers must be positive".into());
        }
        if !self
            .weights
            .iter()
            .all(|&w| w >= T::zero() && w.is_finite())
        {
            return bad("rate weights must be nonnegative".into());
        }
        Ok(())
    }

    /// Bandwidth of one subchannel, `B/N`.
    #[inline]
    pub fn sc_bandwidth(&self) -> T {
        self.bandwidth / T::from_usize_lossy(self.num_subchannels)
    }

    /// Saturation SNR `theta_m = 2^(2 beta_m) / 3` of RRH `m`'s quantizer.
    #[inline]
    pub fn theta(&self, m: usize) -> T {
        crate::scalar::theta(self.quantizer_bits[m])
    }

    /// Fronthaul rate needed to forward one quantized subchannel, `2 B beta_m / N`.
    #[inline]
    pub fn quantized_sc_cost(&self, m: usize) -> T {
        T::lit(2.0) * self.sc_bandwidth() * T::from_u32(self.quantizer_bits[m]).unwrap()
    }
}

/// Channel power gains `|h_{m,k,n}|^2`, dense `M x K x N`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelGains<T> {
    num_rrhs: usize,
    num_users: usize,
    num_subchannels: usize,
    data: Vec<T>,
}

impl<T: Scalar> ChannelGains<T> {
    pub fn new(
        num_rrhs: usize,
        num_users: usize,
        num_subchannels: usize,
        data: Vec<T>,
    ) -> Result<Self, ModelError> {
        if data.len() != num_rrhs * num_users * num_subchannels {
            return Err(ModelError::InvalidParams(format!(
                "gain buffer has {} entries, expected {}",
                data.len(),
                num_rrhs * num_users * num_subchannels
            )));
        }
        let gains = Self {
            num_rrhs,
            num_users,
            num_subchannels,
            data,
        };
        if let Some(i) = gains
            .data
            .iter()
            .position(|g| !(g.is_finite() && *g >= T::zero()))
        {
            let (m, k, n) = gains.unravel(i);
            return Err(ModelError::InvalidGain {
                rrh: m,
                user: k,
                sc: n,
                value: gains.data[i].to_f64_lossy(),
            });
        }
        Ok(gains)
    }

    pub fn from_fn(
        num_rrhs: usize,
        num_users: usize,
        num_subchannels: usize,
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Result<Self, ModelError> {
        let mut data = Vec::with_capacity(num_rrhs * num_users * num_subchannels);
        for m in 0..num_rrhs {
            for k in 0..num_users {
                for n in 0..num_subchannels {
                    data.push(f(m, k, n));
                }
            }
        }
        Self::new(num_rrhs, num_users, num_subchannels, data)
    }

    #[inline]
    pub fn get(&self, m: usize, k: usize, n: usize) -> T {
        self.data[(m * self.num_users + k) * self.num_subchannels + n]
    }

    /// Gains of every RRH towards user `k` on subchannel `n`.
    pub fn column(&self, k: usize, n: usize) -> Vec<T> {
        (0..self.num_rrhs).map(|m| self.get(m, k, n)).collect()
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.num_rrhs, self.num_users, self.num_subchannels)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn check_matches(&self, params: &SystemParams<T>) -> Result<(), ModelError> {
        let expected = (params.num_rrhs, params.num_users, params.num_subchannels);
        if self.dims() != expected {
            return Err(ModelError::DimensionMismatch {
                expected,
                got: self.dims(),
            });
        }
        Ok(())
    }

    fn unravel(&self, i: usize) -> (usize, usize, usize) {
        let n = i % self.num_subchannels;
        let mk = i / self.num_subchannels;
        (mk / self.num_users, mk % self.num_users, n)
    }
}

/// Lagrange multipliers: `lambda` per RRH fronthaul constraint, `mu` per user
/// power constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualPoint<T> {
    pub lambda: Vec<T>,
    pub mu: Vec<T>,
}

impl<T: Scalar> DualPoint<T> {
    pub fn zeros(num_rrhs: usize, num_users: usize) -> Self {
        Self {
            lambda: vec![T::zero(); num_rrhs],
            mu: vec![T::zero(); num_users],
        }
    }

    pub fn is_valid_for(&self, params: &SystemParams<T>) -> bool {
        self.lambda.len() == params.num_rrhs
            && self.mu.len() == params.num_users
            && self
                .lambda
                .iter()
                .chain(&self.mu)
                .all(|&x| x >= T::zero() && x.is_finite())
    }
}

/// Processing mode of a subchannel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Forward-and-decode: selected RRHs quantize, the CP combines (`delta = 0`).
    Fad,
    /// Decode-and-forward: one RRH decodes locally (`delta = 1`).
    Daf,
}

impl Mode {
    pub fn delta(self) -> u8 {
        match self {
            Mode::Fad => 0,
            Mode::Daf => 1,
        }
    }
}

/// Everything decided for one subchannel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScDecision<T> {
    pub mode: Mode,
    /// RRH participation, one flag per RRH.
    pub alpha: Vec<bool>,
    pub user: Option<usize>,
    pub power: T,
}

impl<T: Scalar> ScDecision<T> {
    /// No user, no power, no RRH.
    pub fn empty(num_rrhs: usize) -> Self {
        Self {
            mode: Mode::Daf,
            alpha: vec![false; num_rrhs],
            user: None,
            power: T::zero(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.user.is_none()
    }

    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.alpha
            .iter()
            .enumerate()
            .filter_map(|(m, &a)| a.then_some(m))
    }

    pub fn num_selected(&self) -> usize {
        self.alpha.iter().filter(|&&a| a).count()
    }

    pub fn validate(&self, sc: usize, params: &SystemParams<T>) -> Result<(), ModelError> {
        let err = |reason: &str| {
            Err(ModelError::InvalidDecision {
                sc,
                reason: reason.to_string(),
            })
        };
        if self.alpha.len() != params.num_rrhs {
            return err("alpha length differs from the number of RRHs");
        }
        if !(self.power >= T::zero() && self.power.is_finite()) {
            return err("power must be finite and nonnegative");
        }
        if self.mode == Mode::Daf && self.num_selected() > 1 {
            return err("DaF subchannel processed by more than one RRH");
        }
        match self.user {
            None => {
                if self.power != T::zero() || self.num_selected() > 0 {
                    return err("unassigned subchannel carries power or RRHs");
                }
            }
            Some(k) if k >= params.num_users => return err("user index out of range"),
            Some(_) => {}
        }
        if self.power == T::zero() && self.num_selected() > 0 {
            return err("zero-power subchannel has selected RRHs");
        }
        Ok(())
    }
}

/// Variance of the scalar-quantization error, `3 (g p + sigma2) 2^(-2 beta)`.
#[inline]
pub fn quant_noise_variance<T: Scalar>(gain: T, power: T, noise: T, beta: u32) -> T {
    T::lit(3.0) * (gain * power + noise) * T::lit(2.0).powi(-2 * beta as i32)
}

/// SNR contributed at the CP by one quantizing RRH.
#[inline]
pub fn fad_partial_snr<T: Scalar>(gain: T, power: T, noise: T, beta: u32) -> T {
    gain * power / (noise + quant_noise_variance(gain, power, noise, beta))
}

/// Achievable FaD rate when the RRHs flagged in `alpha` quantize and forward;
/// `gains[m]` is RRH `m`'s gain towards the assigned user on this subchannel.
pub fn fad_rate<T: Scalar>(alpha: &[bool], gains: &[T], power: T, params: &SystemParams<T>) -> T {
    let snr: T = alpha
        .iter()
        .zip(gains)
        .enumerate()
        .filter(|(_, (&a, _))| a)
        .map(|(m, (_, &g))| {
            fad_partial_snr(g, power, params.noise_power[m], params.quantizer_bits[m])
        })
        .sum();
    params.sc_bandwidth() * snr.ln_1p() / T::LN_2()
}

/// Rate of local decoding at a single RRH.
#[inline]
pub fn daf_rate<T: Scalar>(gain: T, power: T, noise: T, sc_bandwidth: T) -> T {
    sc_bandwidth * (gain * power / noise).ln_1p() / T::LN_2()
}

/// Rate delivered on subchannel `n` by `decision`.
pub fn hybrid_rate<T: Scalar>(
    decision: &ScDecision<T>,
    n: usize,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
) -> Result<T, ModelError> {
    decision.validate(n, params)?;
    let Some(k) = decision.user else {
        return Ok(T::zero());
    };
    Ok(match decision.mode {
        Mode::Daf => decision
            .selected()
            .map(|m| {
                daf_rate(
                    channel.get(m, k, n),
                    decision.power,
                    params.noise_power[m],
                    params.sc_bandwidth(),
                )
            })
            .sum(),
        Mode::Fad => fad_rate(
            &decision.alpha,
            &channel.column(k, n),
            decision.power,
            params,
        ),
    })
}

/// Fronthaul rate RRH `m` spends on subchannel `n` under `decision`.
pub fn sc_fronthaul_usage<T: Scalar>(
    decision: &ScDecision<T>,
    m: usize,
    n: usize,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
) -> T {
    match (decision.user, decision.alpha[m]) {
        (Some(k), true) => match decision.mode {
            Mode::Daf => daf_rate(
                channel.get(m, k, n),
                decision.power,
                params.noise_power[m],
                params.sc_bandwidth(),
            ),
            Mode::Fad => params.quantized_sc_cost(m),
        },
        _ => T::zero(),
    }
}

/// Total fronthaul rate RRH `m` needs to forward everything it processes.
pub fn fronthaul_usage<T: Scalar>(
    decisions: &[ScDecision<T>],
    m: usize,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
) -> T {
    decisions
        .iter()
        .enumerate()
        .map(|(n, d)| sc_fronthaul_usage(d, m, n, channel, params))
        .sum()
}

/// A constraint broken by an allocation. `slack` is capacity minus usage,
/// hence negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum Violation<T> {
    Fronthaul { rrh: usize, slack: T },
    Power { user: usize, slack: T },
}

/// Metrics of a decision vector recomputed from scratch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationReport<T> {
    pub weighted_sum_rate: T,
    pub fronthaul_usage: Vec<T>,
    pub power_usage: Vec<T>,
    pub violations: Vec<Violation<T>>,
}

impl<T> AllocationReport<T> {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Recomputes weighted sum-rate and constraint usage of `decisions` and lists
/// every violated constraint.
pub fn evaluate_allocation<T: Scalar>(
    decisions: &[ScDecision<T>],
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
) -> Result<AllocationReport<T>, ModelError> {
    params.validate()?;
    channel.check_matches(params)?;
    if decisions.len() != params.num_subchannels {
        return Err(ModelError::DecisionCount {
            expected: params.num_subchannels,
            got: decisions.len(),
        });
    }
    let mut rate = T::zero();
    let mut power_usage = vec![T::zero(); params.num_users];
    for (n, d) in decisions.iter().enumerate() {
        let r = hybrid_rate(d, n, channel, params)?;
        if let Some(k) = d.user {
            rate = rate + params.weights[k] * r;
            power_usage[k] = power_usage[k] + d.power;
        }
    }
    let fronthaul: Vec<T> = (0..params.num_rrhs)
        .map(|m| fronthaul_usage(decisions, m, channel, params))
        .collect();
    let rtol = T::lit(FEASIBILITY_RTOL);
    let mut violations = Vec::new();
    for (m, (&used, &cap)) in fronthaul.iter().zip(&params.fronthaul_capacity).enumerate() {
        if !le_rel(used, cap, rtol) {
            violations.push(Violation::Fronthaul {
                rrh: m,
                slack: cap - used,
            });
        }
    }
    for (k, (&used, &cap)) in power_usage.iter().zip(&params.power_budget).enumerate() {
        if !le_rel(used, cap, rtol) {
            violations.push(Violation::Power {
                user: k,
                slack: cap - used,
            });
        }
    }
    Ok(AllocationReport {
        weighted_sum_rate: rate,
        fronthaul_usage: fronthaul,
        power_usage,
        violations,
    })
}

/// Per-subchannel decisions together with their recomputed metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation<T> {
    pub decisions: Vec<ScDecision<T>>,
    pub weighted_sum_rate: T,
    pub fronthaul_usage: Vec<T>,
    pub power_usage: Vec<T>,
}

impl<T: Scalar> Allocation<T> {
    pub fn from_decisions(
        decisions: Vec<ScDecision<T>>,
        channel: &ChannelGains<T>,
        params: &SystemParams<T>,
    ) -> Result<Self, ModelError> {
        let report = evaluate_allocation(&decisions, channel, params)?;
        Ok(Self {
            decisions,
            weighted_sum_rate: report.weighted_sum_rate,
            fronthaul_usage: report.fronthaul_usage,
            power_usage: report.power_usage,
        })
    }

    /// All subchannels unassigned.
    pub fn empty(params: &SystemParams<T>) -> Self {
        Self {
            decisions: vec![ScDecision::empty(params.num_rrhs); params.num_subchannels],
            weighted_sum_rate: T::zero(),
            fronthaul_usage: vec![T::zero(); params.num_rrhs],
            power_usage: vec![T::zero(); params.num_users],
        }
    }

    pub fn report(
        &self,
        channel: &ChannelGains<T>,
        params: &SystemParams<T>,
    ) -> Result<AllocationReport<T>, ModelError> {
        evaluate_allocation(&self.decisions, channel, params)
    }

    pub fn count_mode(&self, mode: Mode) -> usize {
        self.decisions
            .iter()
            .filter(|d| !d.is_empty() && d.mode == mode)
            .count()
    }
}

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit_params(m: usize, beta: u32) -> SystemParams<f64> {
        // B/N = 1, sigma2 = 1
        SystemParams::uniform(m, 1, 1, 1.0, beta, 1e9, 1.0, 1.0).unwrap()
    }

    #[test]
    fn quantization_noise_examples() {
        assert_eq!(quant_noise_variance(1.0, 0.0, 1.0, 1), 0.75);
        assert_eq!(quant_noise_variance(1.0, 1.0, 1.0, 1), 1.5);
        assert!(quant_noise_variance(1.0, 1.0, 1.0, 30) < 1e-15);
    }

    #[test]
    fn partial_snr_examples() {
        assert_relative_eq!(fad_partial_snr(1.0, 1.0, 1.0, 1), 0.4, max_relative = 1e-15);
        assert_eq!(fad_partial_snr(1.0, 0.0, 1.0, 1), 0.0);
        assert!((fad_partial_snr(1.0f64, 1e9, 1.0, 1) - 4.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn fad_rate_examples() {
        let p1 = unit_params(1, 1);
        assert_eq!(fad_rate(&[false], &[1.0], 1.0, &p1), 0.0);
        assert_relative_eq!(
            fad_rate(&[true], &[1.0], 1.0, &p1),
            0.485426827,
            max_relative = 1e-8
        );
        let p2 = unit_params(2, 1);
        assert_relative_eq!(
            fad_rate(&[true, true], &[1.0, 1.0], 1.0, &p2),
            1.8f64.log2(),
            max_relative = 1e-12
        );
        assert_relative_eq!(1.8f64.log2(), 0.847997, max_relative = 1e-6);
    }

    #[test]
    fn daf_rate_examples() {
        assert_eq!(daf_rate(1.0, 1.0, 1.0, 1.0), 1.0);
        assert_eq!(daf_rate(1.0, 0.0, 1.0, 1.0), 0.0);
        assert_relative_eq!(daf_rate(3.0, 1.0, 1.0, 1.0), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn hybrid_rate_examples() {
        let params = unit_params(1, 1);
        let ch = ChannelGains::new(1, 1, 1, vec![1.0]).unwrap();
        let mut d = ScDecision {
            mode: Mode::Daf,
            alpha: vec![true],
            user: Some(0),
            power: 1.0,
        };
        assert_relative_eq!(hybrid_rate(&d, 0, &ch, &params).unwrap(), 1.0);
        d.mode = Mode::Fad;
        assert_relative_eq!(
            hybrid_rate(&d, 0, &ch, &params).unwrap(),
            0.485426827,
            max_relative = 1e-8
        );
        assert_eq!(
            hybrid_rate(&ScDecision::empty(1), 0, &ch, &params).unwrap(),
            0.0
        );
    }

    #[test]
    fn hybrid_rate_rejects_broken_decisions() {
        let params = unit_params(2, 1);
        let ch = ChannelGains::new(2, 1, 1, vec![1.0, 1.0]).unwrap();
        let two_decoders = ScDecision {
            mode: Mode::Daf,
            alpha: vec![true, true],
            user: Some(0),
            power: 1.0,
        };
        assert!(hybrid_rate(&two_decoders, 0, &ch, &params).is_err());
        let orphan_power = ScDecision {
            mode: Mode::Fad,
            alpha: vec![false, false],
            user: None,
            power: 1.0,
        };
        assert!(hybrid_rate(&orphan_power, 0, &ch, &params).is_err());
        let zero_power_selected = ScDecision {
            mode: Mode::Fad,
            alpha: vec![true, false],
            user: Some(0),
            power: 0.0,
        };
        assert!(hybrid_rate(&zero_power_selected, 0, &ch, &params).is_err());
    }

    #[test]
    fn fronthaul_usage_examples() {
        let params = SystemParams::uniform(1, 1, 64, 20e6, 10, 1e9, 1.0, 1e-13).unwrap();
        let ch = ChannelGains::from_fn(1, 1, 64, |_, _, _| 1e-10).unwrap();
        let mut decisions = vec![ScDecision::empty(1); 64];
        assert_eq!(fronthaul_usage(&decisions, 0, &ch, &params), 0.0);
        for d in decisions.iter_mut().take(4) {
            *d = ScDecision {
                mode: Mode::Fad,
                alpha: vec![true],
                user: Some(0),
                power: 0.01,
            };
        }
        assert_relative_eq!(
            fronthaul_usage(&decisions, 0, &ch, &params),
            25e6,
            max_relative = 1e-12
        );

        // one decoded subchannel whose DaF rate is exactly 1 Mbps
        let params = SystemParams::uniform(1, 1, 1, 1e6, 10, 1e9, 1.0, 1.0).unwrap();
        let ch = ChannelGains::new(1, 1, 1, vec![1.0]).unwrap();
        let decoded = vec![ScDecision {
            mode: Mode::Daf,
            alpha: vec![true],
            user: Some(0),
            power: 1.0,
        }];
        assert_relative_eq!(
            fronthaul_usage(&decoded, 0, &ch, &params),
            1e6,
            max_relative = 1e-12
        );
    }

    #[test]
    fn empty_allocation_is_feasible_with_zero_metrics() {
        let params = SystemParams::uniform(3, 2, 4, 1e6, 8, 1e7, 0.1, 1e-12).unwrap();
        let ch = ChannelGains::from_fn(3, 2, 4, |m, k, n| 1e-9 * (1 + m + k + n) as f64).unwrap();
        let alloc = Allocation::empty(&params);
        let report = alloc.report(&ch, &params).unwrap();
        assert_eq!(report.weighted_sum_rate, 0.0);
        assert!(report.fronthaul_usage.iter().all(|&u| u == 0.0));
        assert!(report.power_usage.iter().all(|&u| u == 0.0));
        assert!(report.is_feasible());
    }

    #[test]
    fn power_overshoot_is_reported_with_negative_slack() {
        let params = SystemParams::uniform(1, 2, 2, 1e6, 8, 1e12, 1.0, 1e-12).unwrap();
        let ch = ChannelGains::from_fn(1, 2, 2, |_, _, _| 1e-9).unwrap();
        let d = |p| ScDecision {
            mode: Mode::Daf,
            alpha: vec![true],
            user: Some(1),
            power: p,
        };
        let report = evaluate_allocation(&[d(0.51), d(0.5)], &ch, &params).unwrap();
        assert_eq!(report.violations.len(), 1);
        match report.violations[0] {
            Violation::Power { user, slack } => {
                assert_eq!(user, 1);
                assert_relative_eq!(slack, -0.01, max_relative = 1e-9);
            }
            ref v => panic!("unexpected violation {v:?}"),
        }
    }

    #[test]
    fn params_validation() {
        assert!(SystemParams::<f64>::uniform(0, 1, 1, 1.0, 1, 1.0, 1.0, 1.0).is_err());
        assert!(SystemParams::<f64>::uniform(1, 1, 1, -1.0, 1, 1.0, 1.0, 1.0).is_err());
        assert!(SystemParams::<f64>::uniform(1, 1, 1, 1.0, 0, 1.0, 1.0, 1.0).is_err());
        assert!(SystemParams::<f64>::uniform(1, 1, 1, 1.0, 1, 0.0, 1.0, 1.0).is_err());
        let mut p = SystemParams::<f64>::uniform(1, 1, 1, 1.0, 1, 1.0, 1.0, 1.0).unwrap();
        p.weights[0] = -1.0;
        assert!(p.validate().is_err());
        assert!(ChannelGains::<f64>::new(1, 1, 1, vec![f64::NAN]).is_err());
        assert!(ChannelGains::<f64>::new(1, 1, 2, vec![1.0]).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let snr: f32 = fad_partial_snr(1.0, 1.0, 1.0, 1);
        assert!((snr - 0.4).abs() < 1e-6);
        assert!((daf_rate(3.0f32, 1.0, 1.0, 1.0) - 2.0).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn partial_snr_saturates_below_theta(g in 1e-3f64..1e3, p in 0.0f64..1e6, s in 1e-3f64..10.0, beta in 1u32..16) {
            let th: f64 = crate::scalar::theta(beta);
            let snr = fad_partial_snr(g, p, s, beta);
            prop_assert!(snr >= 0.0 && snr < th);
            prop_assert!(fad_partial_snr(g, p * 2.0 + 1e-9, s, beta) >= snr);
        }

        #[test]
        fn snr_of_subset_is_sum_of_parts(gs in proptest::collection::vec(0.0f64..10.0, 1..6), p in 0.0f64..10.0, beta in 1u32..12) {
            let m = gs.len();
            let params = SystemParams::uniform(m, 1, 1, 1.0, beta, 1.0, 1.0, 1.0).unwrap();
            let alpha = vec![true; m];
            let direct: f64 = gs.iter().map(|&g| fad_partial_snr(g, p, 1.0, beta)).sum();
            let via_rate = fad_rate(&alpha, &gs, p, &params);
            prop_assert_eq!(via_rate, direct.ln_1p() / std::f64::consts::LN_2);
        }

        #[test]
        fn rates_monotone_in_power_and_gain(g in 0.0f64..10.0, p in 0.0f64..10.0, dp in 0.0f64..1.0, dg in 0.0f64..1.0, beta in 1u32..12) {
            let params = SystemParams::uniform(1, 1, 1, 1.0, beta, 1.0, 1.0, 1.0).unwrap();
            let r = |g: f64, p: f64| fad_rate(&[true], &[g], p, &params);
            prop_assert!(r(g, p + dp) >= r(g, p));
            prop_assert!(r(g + dg, p) >= r(g, p));
            prop_assert!(daf_rate(g, p + dp, 1.0, 1.0) >= daf_rate(g, p, 1.0, 1.0));
            prop_assert!(daf_rate(g + dg, p, 1.0, 1.0) >= daf_rate(g, p, 1.0, 1.0));
        }

        #[test]
        fn dbm_round_trip(dbm in -60.0f64..60.0) {
            let back = watts_to_dbm(dbm_to_watts(dbm));
            prop_assert!((back - dbm).abs() <= 1e-12 * dbm.abs().max(1.0));
        }
    }
}
