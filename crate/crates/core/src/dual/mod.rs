//! Dual function evaluation, ellipsoid minimization of the dual and primal
//! recovery.

mod ellipsoid;
mod repair;

pub use ellipsoid::{
    ellipsoid_solve, ellipsoid_solve_with, CutKind, DualSolution, EllipsoidOptions, EllipsoidState,
    IterationRecord,
};
pub use repair::{recover_primal, repair_allocation, RepairAction, RepairReport, RepairStep};

use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::model::{sc_fronthaul_usage, Allocation, ChannelGains, DualPoint, SystemParams};
use crate::persc::{check_inputs, solve_sc_with_prices, Prices, ScSolver, ScSubproblemResult};
use crate::scalar::Scalar;

/// Dual function value at a point with the per-subchannel maximizers and the
/// resulting subgradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualEvaluation<T> {
    pub value: T,
    pub per_sc: Vec<ScSubproblemResult<T>>,
    /// `1 - usage_m / Rbar_m` at the maximizer.
    pub subgrad_lambda: Vec<T>,
    /// `Pbar_k - sum_n p_{k,n}` at the maximizer.
    pub subgrad_mu: Vec<T>,
}

impl<T: Scalar> DualEvaluation<T> {
    /// Total FaD candidates evaluated across all subchannels.
    pub fn fad_candidates(&self) -> usize {
        self.per_sc.iter().map(|r| r.fad_candidates).sum()
    }
}

/// `g(lambda, mu) = sum_n L_n + sum_m lambda_m + sum_k mu_k Pbar_k` with every
/// subchannel subproblem solved independently.
pub fn evaluate_dual<T: Scalar>(
    dual: &DualPoint<T>,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
    solver: ScSolver,
) -> Result<DualEvaluation<T>, SolverError> {
    check_inputs(dual, channel, params)?;
    let prices = Prices::new(dual, params);
    let per_sc = (0..params.num_subchannels)
        .map(|n| solve_sc_with_prices(n, &prices, channel, params, solver))
        .collect::<Result<Vec<_>, _>>()?;

    let mut fronthaul = vec![T::zero(); params.num_rrhs];
    let mut power = vec![T::zero(); params.num_users];
    for (n, res) in per_sc.iter().enumerate() {
        let d = &res.decision;
        if let Some(k) = d.user {
            power[k] = power[k] + d.power;
            for m in d.selected() {
                fronthaul[m] = fronthaul[m] + sc_fronthaul_usage(d, m, n, channel, params);
            }
        }
    }
    let value = per_sc.iter().map(|r| r.lagrangian_value).sum::<T>()
        + dual.lambda.iter().copied().sum::<T>()
        + dual
            .mu
            .iter()
            .zip(&params.power_budget)
            .map(|(&m, &p)| m * p)
            .sum::<T>();
    Ok(DualEvaluation {
        value,
        per_sc,
        subgrad_lambda: fronthaul
            .iter()
            .zip(&params.fronthaul_capacity)
            .map(|(&u, &r)| T::one() - u / r)
            .collect(),
        subgrad_mu: power
            .iter()
            .zip(&params.power_budget)
            .map(|(&u, &p)| p - u)
            .collect(),
    })
}

/// Options of the full dual pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveOptions<T> {
    pub ellipsoid: EllipsoidOptions<T>,
    /// Repair the subproblem maximizers of every evaluated dual point and keep
    /// the best feasible allocation, instead of repairing only at the best
    /// dual point.
    pub track_best_primal: bool,
}

impl<T: Scalar> Default for SolveOptions<T> {
    fn default() -> Self {
        Self {
            ellipsoid: EllipsoidOptions::default(),
            track_best_primal: true,
        }
    }
}

/// Result of the dual pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Solution<T> {
    pub allocation: Allocation<T>,
    /// Smallest dual value found; an upper bound on the optimum when the
    /// subproblems are solved exactly.
    pub dual_bound: T,
    pub dual: DualPoint<T>,
    pub iterations: usize,
    pub converged: bool,
    pub repair: RepairReport<T>,
}

/// Minimizes the dual with the ellipsoid method and recovers a feasible
/// allocation.
pub fn solve<T: Scalar>(
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
    solver: ScSolver,
    opts: &SolveOptions<T>,
) -> Result<Solution<T>, SolverError> {
    let mut best: Option<(Allocation<T>, RepairReport<T>)> = None;
    let mut repair_err = None;
    let sol = {
        let mut observe = |_: &IterationRecord<T>, eval: Option<&DualEvaluation<T>>| {
            if !opts.track_best_primal {
                return;
            }
            let Some(eval) = eval else { return };
            let floor = best.as_ref().map(|(b, _)| b.weighted_sum_rate);
            match repair::repair_above(eval, channel, params, floor) {
                Ok(Some(candidate)) => {
                    if floor.is_none_or(|f| candidate.0.weighted_sum_rate > f) {
                        best = Some(candidate);
                    }
                }
                Ok(None) => {}
                Err(e) => repair_err = Some(e),
            }
        };
        ellipsoid_solve_with(channel, params, solver, &opts.ellipsoid, &mut observe)?
    };
    if let Some(e) = repair_err {
        return Err(e);
    }
    let at_best_dual = repair_allocation(&sol.evaluation, channel, params)?;
    let (allocation, repair) = match best {
        Some(b) if b.0.weighted_sum_rate > at_best_dual.0.weighted_sum_rate => b,
        _ => at_best_dual,
    };
    Ok(Solution {
        allocation,
        dual_bound: sol.evaluation.value,
        dual: sol.dual,
        iterations: sol.iterations,
        converged: sol.converged,
        repair,
    })
}
