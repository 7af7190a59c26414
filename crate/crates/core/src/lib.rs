//! Joint subchannel, power, RRH-selection and decoding-mode allocation for the
//! uplink of an OFDMA cloud radio access network with capacity-limited
//! fronthaul links.
//!
//! Each subchannel is either decoded at a single RRH that forwards the
//! message bits (DaF), or quantized by a subset of RRHs and decoded jointly at
//! the central processor (FaD). The weighted sum-rate problem is solved by
//! dual decomposition: [`persc`] solves the per-subchannel subproblems,
//! [`dual`] minimizes the dual function with the ellipsoid method and repairs
//! the primal.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix `f64`.

pub mod dual;
pub mod error;
pub mod greedy;
pub mod linesearch;
pub mod model;
pub mod persc;
pub mod scalar;

pub use dual::{
    ellipsoid_solve, evaluate_dual, recover_primal, solve, DualEvaluation, DualSolution,
    EllipsoidOptions, RepairReport, Solution, SolveOptions,
};
pub use error::{ModelError, SolverError};
pub use greedy::{greedy_fad_selection, greedy_on, GreedyOutcome, GreedyTrace};
pub use model::{
    evaluate_allocation, Allocation, AllocationReport, ChannelGains, DualPoint, Mode, ScDecision,
    SystemParams, Violation,
};
pub use persc::{
    exhaustive_for_user, solve_sc, FadSolver, FadUserProblem, ModePolicy, Prices, ScSolver,
    ScSubproblemResult,
};
pub use scalar::Scalar;

pub type Params = SystemParams<f64>;
pub type Gains = ChannelGains<f64>;
pub type Dual = DualPoint<f64>;
pub type Decision = ScDecision<f64>;
pub type Alloc = Allocation<f64>;
