use log::debug;
use serde::{Deserialize, Serialize};

use super::{evaluate_dual, DualEvaluation};
use crate::error::SolverError;
use crate::model::{
    evaluate_allocation, fad_partial_snr, hybrid_rate, sc_fronthaul_usage, Allocation,
    AllocationReport, ChannelGains, DualPoint, Mode, ScDecision, SystemParams, Violation,
};
use crate::persc::ScSolver;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum RepairAction<T> {
    /// All of `user`'s powers multiplied by `factor`.
    ScalePower { user: usize, factor: T },
    /// DaF subchannel switched off.
    ClearDaf { sc: usize, rrh: usize },
    /// DaF power lowered to `power` so that `rrh` just meets its capacity.
    TrimDaf { sc: usize, rrh: usize, power: T },
    /// RRH removed from a FaD subchannel; `cleared` when it was the last one.
    DropFad {
        sc: usize,
        rrh: usize,
        cleared: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairStep<T> {
    pub action: RepairAction<T>,
    /// Metrics after the step.
    pub weighted_sum_rate: T,
    pub fronthaul_usage: Vec<T>,
    pub power_usage: Vec<T>,
}

impl<T: Scalar> RepairStep<T> {
    fn after(action: RepairAction<T>, report: &AllocationReport<T>) -> Self {
        Self {
            action,
            weighted_sum_rate: report.weighted_sum_rate,
            fronthaul_usage: report.fronthaul_usage.clone(),
            power_usage: report.power_usage.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairReport<T> {
    /// Weighted sum-rate of the subproblem maximizers before any repair.
    pub rate_before: T,
    pub rate_after: T,
    pub steps: Vec<RepairStep<T>>,
}

impl<T> RepairReport<T> {
    pub fn repaired(&self) -> bool {
        !self.steps.is_empty()
    }
}

/// Solves the subproblems at `dual` and repairs the maximizers into a
/// feasible allocation.
pub fn recover_primal<T: Scalar>(
    dual: &DualPoint<T>,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
    solver: ScSolver,
) -> Result<(Allocation<T>, RepairReport<T>), SolverError> {
    let eval = evaluate_dual(dual, channel, params, solver)?;
    repair_allocation(&eval, channel, params)
}

/// Makes the subproblem maximizers of `eval` feasible: users over budget have
/// their powers scaled down, then the RRH with the largest relative fronthaul
/// overshoot gives up its lowest-rate subchannel (DaF: switched off; FaD: the
/// violating RRHs on it are dropped in increasing SNR contribution until this
/// RRH is gone), with everything recomputed after each step.
pub fn repair_allocation<T: Scalar>(
    eval: &DualEvaluation<T>,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
) -> Result<(Allocation<T>, RepairReport<T>), SolverError> {
    Ok(repair_above(eval, channel, params, None)?.expect("no floor given"))
}

/// Repairs only when the unrepaired rate exceeds `floor`; repair never
/// increases the rate, so anything else cannot beat the floor.
pub(crate) fn repair_above<T: Scalar>(
    eval: &DualEvaluation<T>,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
    floor: Option<T>,
) -> Result<Option<(Allocation<T>, RepairReport<T>)>, SolverError> {
    let mut decisions: Vec<ScDecision<T>> =
        eval.per_sc.iter().map(|r| r.decision.clone()).collect();
    let mut report = evaluate_allocation(&decisions, channel, params)?;
    let rate_before = report.weighted_sum_rate;
    if floor.is_some_and(|f| rate_before <= f) {
        return Ok(None);
    }
    let mut steps = Vec::new();

    for k in 0..params.num_users {
        let used = report.power_usage[k];
        let budget = params.power_budget[k];
        if !report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Power { user, .. } if *user == k))
        {
            continue;
        }
        let factor = budget / used;
        for d in decisions.iter_mut().filter(|d| d.user == Some(k)) {
            d.power = d.power * factor;
        }
        report = evaluate_allocation(&decisions, channel, params)?;
        steps.push(RepairStep::after(
            RepairAction::ScalePower { user: k, factor },
            &report,
        ));
    }

    while let Some(m) = worst_fronthaul_violation(&report, params) {
        let n = lowest_rate_sc(&decisions, m, channel, params)?;
        match decisions[n].mode {
            Mode::Daf => {
                let action = match trimmed_daf_power(&decisions[n], m, n, &report, channel, params)
                {
                    Some(power) => {
                        decisions[n].power = power;
                        RepairAction::TrimDaf {
                            sc: n,
                            rrh: m,
                            power,
                        }
                    }
                    None => {
                        decisions[n] = ScDecision::empty(params.num_rrhs);
                        RepairAction::ClearDaf { sc: n, rrh: m }
                    }
                };
                report = evaluate_allocation(&decisions, channel, params)?;
                steps.push(RepairStep::after(action, &report));
            }
            Mode::Fad => {
                while decisions[n].alpha[m] {
                    let drop = weakest_violating_rrh(&decisions[n], n, &report, channel, params)
                        .unwrap_or(m);
                    let d = &mut decisions[n];
                    d.alpha[drop] = false;
                    let cleared = d.num_selected() == 0;
                    if cleared {
                        *d = ScDecision::empty(params.num_rrhs);
                    }
                    report = evaluate_allocation(&decisions, channel, params)?;
                    steps.push(RepairStep::after(
                        RepairAction::DropFad {
                            sc: n,
                            rrh: drop,
                            cleared,
                        },
                        &report,
                    ));
                    if cleared {
                        break;
                    }
                }
            }
        }
    }

    let allocation = Allocation {
        decisions,
        weighted_sum_rate: report.weighted_sum_rate,
        fronthaul_usage: report.fronthaul_usage,
        power_usage: report.power_usage,
    };
    if !steps.is_empty() {
        debug!(
            "repair: {} steps, rate {} -> {}",
            steps.len(),
            rate_before,
            allocation.weighted_sum_rate
        );
    }
    Ok(Some((
        allocation,
        RepairReport {
            rate_before,
            rate_after: report.weighted_sum_rate,
            steps,
        },
    )))
}

fn is_fronthaul_violated<T>(report: &AllocationReport<T>, m: usize) -> bool {
    report
        .violations
        .iter()
        .any(|v| matches!(v, Violation::Fronthaul { rrh, .. } if *rrh == m))
}

fn worst_fronthaul_violation<T: Scalar>(
    report: &AllocationReport<T>,
    params: &SystemParams<T>,
) -> Option<usize> {
    let mut worst: Option<(usize, T)> = None;
    for v in &report.violations {
        if let Violation::Fronthaul { rrh, slack } = v {
            let rel = -*slack / params.fronthaul_capacity[*rrh];
            if worst.is_none_or(|(_, w)| rel > w) {
                worst = Some((*rrh, rel));
            }
        }
    }
    worst.map(|(m, _)| m)
}

/// Power at which DaF subchannel `n` carries its rate minus the excess of
/// RRH `m` (aiming slightly below capacity), or `None` when the excess is
/// at least the whole rate.
fn trimmed_daf_power<T: Scalar>(
    d: &ScDecision<T>,
    m: usize,
    n: usize,
    report: &AllocationReport<T>,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
) -> Option<T> {
    let k = d.user?;
    let cap = params.fronthaul_capacity[m];
    let excess = report.fronthaul_usage[m] - cap + T::lit(1e-12) * cap;
    let rate = sc_fronthaul_usage(d, m, n, channel, params);
    let target = rate - excess;
    if !(target > T::zero()) {
        return None;
    }
    let bw = params.sc_bandwidth();
    let snr = (target / bw * T::LN_2()).exp_m1();
    let power = snr * params.noise_power[m] / channel.get(m, k, n);
    (power > T::zero() && power < d.power).then_some(power)
}

fn lowest_rate_sc<T: Scalar>(
    decisions: &[ScDecision<T>],
    m: usize,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
) -> Result<usize, SolverError> {
    let mut best: Option<(usize, T)> = None;
    for (n, d) in decisions.iter().enumerate() {
        if d.is_empty() || !d.alpha[m] {
            continue;
        }
        let r = hybrid_rate(d, n, channel, params)?;
        if best.is_none_or(|(_, b)| r < b) {
            best = Some((n, r));
        }
    }
    // A violated RRH always processes at least one subchannel.
    best.map(|(n, _)| n).ok_or(SolverError::EmptySubset)
}

fn weakest_violating_rrh<T: Scalar>(
    decision: &ScDecision<T>,
    n: usize,
    report: &AllocationReport<T>,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
) -> Option<usize> {
    let k = decision.user?;
    let mut best: Option<(usize, T)> = None;
    for m in decision.selected() {
        if !is_fronthaul_violated(report, m) {
            continue;
        }
        let snr = fad_partial_snr(
            channel.get(m, k, n),
            decision.power,
            params.noise_power[m],
            params.quantizer_bits[m],
        );
        if best.is_none_or(|(_, b)| snr < b) {
            best = Some((m, snr));
        }
    }
    best.map(|(m, _)| m)
}
