//! Greedy RRH-subset construction for the FaD subproblem of one
//! (subchannel, user) pair. Worst case `M (M + 1) / 2` candidate evaluations
//! instead of `2^M`.

use serde::{Deserialize, Serialize};

use crate::model::{ChannelGains, DualPoint, SystemParams};
use crate::persc::{FadUserProblem, Prices};
use crate::scalar::Scalar;

/// One greedy iteration: the best unselected RRH and the objective with it added.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyStep<T> {
    pub candidate: usize,
    pub value: T,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyTrace<T> {
    pub iterations: Vec<GreedyStep<T>>,
    /// Selected RRHs in ascending index order.
    pub final_subset: Vec<usize>,
    pub final_power: T,
    pub candidates_evaluated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyOutcome<T> {
    pub subset: Vec<bool>,
    pub power: T,
    pub value: T,
    pub trace: GreedyTrace<T>,
}

/// Runs the greedy selection on a prepared (subchannel, user) problem.
pub fn greedy_on<T: Scalar>(problem: &FadUserProblem<T>) -> GreedyOutcome<T> {
    let m = problem.num_rrhs();
    let mut selected = vec![false; m];
    let mut members: Vec<usize> = Vec::with_capacity(m);
    let mut trial: Vec<usize> = Vec::with_capacity(m);
    let mut value = T::zero();
    let mut power = T::zero();
    let mut iterations = Vec::new();
    let mut evaluated = 0;

    for _ in 0..m {
        let mut best: Option<(usize, T, T)> = None;
        for l in (0..m).filter(|&l| !selected[l]) {
            trial.clone_from(&members);
            let pos = trial.partition_point(|&x| x < l);
            trial.insert(pos, l);
            let cand = problem.evaluate(&trial);
            evaluated += 1;
            // ties keep the lowest index
            if best.is_none_or(|(_, v, _)| cand.value > v) {
                best = Some((l, cand.value, cand.power));
            }
        }
        let Some((j, v, p)) = best else { break };
        let accepted = v > value;
        iterations.push(GreedyStep {
            candidate: j,
            value: v,
            accepted,
        });
        if !accepted {
            break;
        }
        selected[j] = true;
        let pos = members.partition_point(|&x| x < j);
        members.insert(pos, j);
        value = v;
        power = p;
    }

    GreedyOutcome {
        subset: selected,
        power,
        value,
        trace: GreedyTrace {
            iterations,
            final_subset: members,
            final_power: power,
            candidates_evaluated: evaluated,
        },
    }
}

/// Greedy FaD subset and power for user `k` on subchannel `n`.
pub fn greedy_fad_selection<T: Scalar>(
    n: usize,
    k: usize,
    dual: &DualPoint<T>,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
) -> GreedyOutcome<T> {
    let problem = FadUserProblem::new(n, k, &Prices::new(dual, params), channel, params);
    greedy_on(&problem)
}
