use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use hcran_core::{solve, Allocation, ChannelGains, ScSolver, SolveOptions, SystemParams};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    HybridOptimal,
    HybridGreedy,
    AllFad,
    AllDaf,
    /// Dual function value at the multipliers found by `HybridOptimal`.
    DualBound,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::HybridOptimal,
        Scheme::HybridGreedy,
        Scheme::AllFad,
        Scheme::AllDaf,
        Scheme::DualBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::HybridOptimal => "hybrid_optimal",
            Scheme::HybridGreedy => "hybrid_greedy",
            Scheme::AllFad => "all_fad",
            Scheme::AllDaf => "all_daf",
            Scheme::DualBound => "dual_bound",
        }
    }

    pub fn solver(self) -> ScSolver {
        match self {
            Scheme::HybridOptimal | Scheme::DualBound => ScSolver::HYBRID_OPTIMAL,
            Scheme::HybridGreedy => ScSolver::HYBRID_GREEDY,
            Scheme::AllFad => ScSolver::FAD_ONLY,
            Scheme::AllDaf => ScSolver::DAF_ONLY,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| HarnessError::InvalidConfig(format!("unknown scheme {s:?}")))
    }
}

/// Outcome of one scheme on one problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemeRun {
    pub scheme: Scheme,
    /// Weighted sum-rate of the allocation, or the dual value for
    /// `DualBound`.
    pub rate: f64,
    /// Absent for `DualBound`.
    pub allocation: Option<Allocation<f64>>,
    /// Dual value at the final multipliers; an upper bound on the optimum
    /// for the exhaustive solvers.
    pub dual_value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub time_s: f64,
}

impl SchemeRun {
    /// Same run reported as the dual bound.
    pub fn as_dual_bound(&self) -> SchemeRun {
        SchemeRun {
            scheme: Scheme::DualBound,
            rate: self.dual_value,
            allocation: None,
            ..self.clone()
        }
    }
}

/// Runs `scheme` on a single (unclustered) problem.
pub fn run_scheme(
    scheme: Scheme,
    channel: &ChannelGains<f64>,
    params: &SystemParams<f64>,
    opts: &SolveOptions<f64>,
) -> Result<SchemeRun, HarnessError> {
    if scheme.solver() == ScSolver::HYBRID_OPTIMAL
        && params.num_rrhs > crate::config::MAX_EXHAUSTIVE_CLUSTER_RRHS
    {
        return Err(HarnessError::SchemeMismatch(format!(
            "{scheme} on {} RRHs needs clustering",
            params.num_rrhs
        )));
    }
    let start = Instant::now();
    let sol = solve(channel, params, scheme.solver(), opts)?;
    let time_s = start.elapsed().as_secs_f64();
    if !sol.converged {
        log::warn!(
            "{scheme}: ellipsoid stopped at the iteration limit ({})",
            sol.iterations
        );
    }
    let run = SchemeRun {
        scheme,
        rate: sol.allocation.weighted_sum_rate,
        allocation: Some(sol.allocation),
        dual_value: sol.dual_bound,
        iterations: sol.iterations,
        converged: sol.converged,
        time_s,
    };
    Ok(if scheme == Scheme::DualBound {
        run.as_dual_bound()
    } else {
        run
    })
}
