//! Per-subchannel dual subproblem.
//!
//! For fixed multipliers the Lagrangian separates over subchannels. On each
//! subchannel we find the best forward-and-decode configuration (user, RRH
//! subset, power), the best decode-and-forward configuration (user, single
//! RRH, water-filled power) and keep the better of the two, or nothing when
//! neither has positive value.

use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::greedy;
use crate::linesearch::golden_section_max_by;
use crate::model::{daf_rate, ChannelGains, DualPoint, Mode, ScDecision, SystemParams};
use crate::scalar::{pos, Scalar};

/// Lower bound applied to `mu` before solving subproblems.
pub const MU_FLOOR: f64 = 1e-12;

/// Largest RRH count the subset enumeration accepts.
pub const MAX_EXHAUSTIVE_RRHS: usize = 24;

/// Relative bracket width at which the power line search stops.
pub const LINE_SEARCH_RTOL: f64 = 1e-8;

/// How the FaD RRH subset is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadSolver {
    /// Enumerate all `2^M` subsets.
    Exhaustive,
    /// Grow the subset one RRH at a time while the objective improves.
    Greedy,
}

/// Which processing modes a subchannel may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModePolicy {
    Hybrid,
    FadOnly,
    DafOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScSolver {
    pub fad: FadSolver,
    pub modes: ModePolicy,
}

impl ScSolver {
    pub const HYBRID_OPTIMAL: Self = Self {
        fad: FadSolver::Exhaustive,
        modes: ModePolicy::Hybrid,
    };
    pub const HYBRID_GREEDY: Self = Self {
        fad: FadSolver::Greedy,
        modes: ModePolicy::Hybrid,
    };
    pub const FAD_ONLY: Self = Self {
        fad: FadSolver::Exhaustive,
        modes: ModePolicy::FadOnly,
    };
    pub const DAF_ONLY: Self = Self {
        fad: FadSolver::Exhaustive,
        modes: ModePolicy::DafOnly,
    };
}

/// Multiplier-derived prices shared by all subchannels of one dual evaluation.
#[derive(Debug, Clone)]
pub struct Prices<T> {
    /// `(2 B beta_m / N) lambda_m / Rbar_m`: price of quantizing one subchannel at RRH m.
    pub quantize_cost: Vec<T>,
    /// `lambda_m / Rbar_m`: price per decoded bit/s at RRH m.
    pub decode_price: Vec<T>,
    /// Power prices with the floor applied.
    pub mu: Vec<T>,
}

impl<T: Scalar> Prices<T> {
    pub fn new(dual: &DualPoint<T>, params: &SystemParams<T>) -> Self {
        let decode_price: Vec<T> = dual
            .lambda
            .iter()
            .zip(&params.fronthaul_capacity)
            .map(|(&l, &r)| l / r)
            .collect();
        let quantize_cost = decode_price
            .iter()
            .enumerate()
            .map(|(m, &p)| params.quantized_sc_cost(m) * p)
            .collect();
        let floor = T::lit(MU_FLOOR);
        Self {
            quantize_cost,
            decode_price,
            mu: dual.mu.iter().map(|&m| m.max(floor)).collect(),
        }
    }
}

/// Maximizer of `omega r^Q - mu p` for one quantizing RRH, where
/// `snr_scale = g / sigma2`, `weighted_bw = omega B / N`.
pub(crate) fn single_rrh_power<T: Scalar>(snr_scale: T, theta: T, weighted_bw: T, mu: T) -> T {
    if weighted_bw <= T::zero() || snr_scale <= T::zero() {
        return T::zero();
    }
    let one = T::one();
    let two = T::lit(2.0);
    let threshold = (mu * T::LN_2() / weighted_bw) * (one + one / theta);
    if snr_scale <= threshold {
        return T::zero();
    }
    let c = weighted_bw * snr_scale * theta / (mu * T::LN_2());
    let inner = pos(c - (theta + one));
    let x = T::lit(4.0) * inner / ((theta + two) * (theta + two));
    // sqrt(1 + x) - 1 without cancellation
    (theta + two) / (two * snr_scale) * (x / ((one + x).sqrt() + one))
}

/// Optimal FaD power when a single RRH quantizes, in closed form. Zero below
/// the activation threshold `g/sigma2 <= (mu N ln2 / (omega B)) (1 + 1/theta)`.
pub fn fad_power_single_rrh<T: Scalar>(
    gain: T,
    noise: T,
    beta: u32,
    omega: T,
    mu: T,
    sc_bandwidth: T,
) -> Result<T, SolverError> {
    if mu <= T::zero() {
        return Err(SolverError::UnboundedSubproblem);
    }
    if omega <= T::zero() {
        return Ok(T::zero());
    }
    Ok(single_rrh_power(
        gain / noise,
        crate::scalar::theta(beta),
        omega * sc_bandwidth,
        mu,
    ))
}

/// Optimal FaD power for an arbitrary nonempty RRH subset, by golden-section
/// search over `[0, p_cap]`. `gains[m]` is RRH `m`'s gain on this subchannel.
pub fn fad_power_line_search<T: Scalar>(
    subset: &[usize],
    gains: &[T],
    params: &SystemParams<T>,
    omega: T,
    mu: T,
    p_cap: T,
) -> Result<T, SolverError> {
    if subset.is_empty() {
        return Err(SolverError::EmptySubset);
    }
    let problem = FadUserProblem {
        user: 0,
        snr_scale: gains
            .iter()
            .zip(&params.noise_power)
            .map(|(&g, &s)| g / s)
            .collect(),
        theta: (0..params.num_rrhs).map(|m| params.theta(m)).collect(),
        cost: vec![T::zero(); params.num_rrhs],
        weighted_bw: omega * params.sc_bandwidth(),
        mu,
        p_cap,
    };
    Ok(problem.line_search(subset))
}

/// Power and objective value of one FaD configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadCandidate<T> {
    pub power: T,
    pub value: T,
}

/// The FaD subproblem of one (subchannel, user) pair: choose the RRH subset
/// and power maximizing `omega r^Q - sum(quantize cost) - mu p`.
#[derive(Debug, Clone)]
pub struct FadUserProblem<T> {
    pub(crate) user: usize,
    snr_scale: Vec<T>,
    theta: Vec<T>,
    cost: Vec<T>,
    weighted_bw: T,
    mu: T,
    p_cap: T,
}

impl<T: Scalar> FadUserProblem<T> {
    pub fn new(
        n: usize,
        k: usize,
        prices: &Prices<T>,
        channel: &ChannelGains<T>,
        params: &SystemParams<T>,
    ) -> Self {
        let m = params.num_rrhs;
        Self {
            user: k,
            snr_scale: (0..m)
                .map(|i| channel.get(i, k, n) / params.noise_power[i])
                .collect(),
            theta: (0..m).map(|i| params.theta(i)).collect(),
            cost: prices.quantize_cost.clone(),
            weighted_bw: params.weights[k] * params.sc_bandwidth(),
            mu: prices.mu[k],
            p_cap: params.power_budget[k],
        }
    }

    pub fn user(&self) -> usize {
        self.user
    }

    pub fn num_rrhs(&self) -> usize {
        self.snr_scale.len()
    }

    fn snr(&self, members: &[usize], p: T) -> T {
        let one = T::one();
        members
            .iter()
            .map(|&m| {
                let x = self.snr_scale[m] * p;
                self.theta[m] * x / (x + self.theta[m] + one)
            })
            .sum()
    }

    /// `omega r^Q - mu p` (without the fronthaul price).
    fn power_objective(&self, members: &[usize], p: T) -> T {
        self.weighted_bw * self.snr(members, p).ln_1p() / T::LN_2() - self.mu * p
    }

    fn slope(&self, members: &[usize], p: T) -> T {
        let one = T::one();
        let mut snr = T::zero();
        let mut dsnr = T::zero();
        for &m in members {
            let a = self.snr_scale[m];
            let th = self.theta[m];
            let den = a * p + th + one;
            snr = snr + th * a * p / den;
            dsnr = dsnr + th * a * (th + one) / (den * den);
        }
        self.weighted_bw / T::LN_2() * dsnr / (one + snr) - self.mu
    }

    fn line_search(&self, members: &[usize]) -> T {
        if self.weighted_bw <= T::zero() || self.slope(members, T::zero()) <= T::zero() {
            return T::zero();
        }
        if self.slope(members, self.p_cap) >= T::zero() {
            return self.p_cap;
        }
        golden_section_max_by(
            |c, d| self.objective_increase(members, c, d) <= T::zero(),
            T::zero(),
            self.p_cap,
            T::lit(LINE_SEARCH_RTOL) * self.p_cap,
        )
    }

    /// `f(d) - f(c)` for `c < d`, computed without subtracting two nearly
    /// equal objective values.
    fn objective_increase(&self, members: &[usize], c: T, d: T) -> T {
        let one = T::one();
        let mut snr_c = T::zero();
        let mut gain = T::zero();
        for &m in members {
            let a = self.snr_scale[m];
            let th = self.theta[m];
            let den_c = a * c + th + one;
            let den_d = a * d + th + one;
            snr_c = snr_c + th * a * c / den_c;
            gain = gain + th * (th + one) * a * (d - c) / (den_c * den_d);
        }
        self.weighted_bw * (gain / (one + snr_c)).ln_1p() / T::LN_2() - self.mu * (d - c)
    }

    /// Optimal power for the given sorted, nonempty member list: closed form
    /// for a single RRH, line search otherwise.
    pub fn optimal_power(&self, members: &[usize]) -> T {
        match members {
            [] => T::zero(),
            [m] => single_rrh_power(
                self.snr_scale[*m],
                self.theta[*m],
                self.weighted_bw,
                self.mu,
            )
            .min(self.p_cap),
            _ => self.line_search(members),
        }
    }

    pub fn subset_cost(&self, members: &[usize]) -> T {
        members.iter().map(|&m| self.cost[m]).sum()
    }

    /// Objective `f(A, p(A))` of a subset with its optimal power; the empty
    /// subset has value exactly zero.
    pub fn evaluate(&self, members: &[usize]) -> FadCandidate<T> {
        if members.is_empty() {
            return FadCandidate {
                power: T::zero(),
                value: T::zero(),
            };
        }
        let power = self.optimal_power(members);
        FadCandidate {
            power,
            value: self.power_objective(members, power) - self.subset_cost(members),
        }
    }
}

/// Best FaD configuration on one subchannel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FadChoice<T> {
    pub user: Option<usize>,
    pub subset: Vec<bool>,
    pub power: T,
    pub value: T,
    /// Number of (user, subset) candidates whose objective was evaluated.
    pub candidates: usize,
}

impl<T: Scalar> FadChoice<T> {
    fn empty(num_rrhs: usize) -> Self {
        Self {
            user: None,
            subset: vec![false; num_rrhs],
            power: T::zero(),
            value: T::zero(),
            candidates: 0,
        }
    }
}

/// Enumerates every subset for one user in lexicographic order of the
/// participation vector (RRH 0 most significant) and keeps the first strict
/// maximizer. Returns the best members, candidate and the number evaluated.
pub fn exhaustive_for_user<T: Scalar>(
    problem: &FadUserProblem<T>,
) -> (Vec<usize>, FadCandidate<T>, usize) {
    let m = problem.num_rrhs();
    let mut best_members = Vec::new();
    let mut best = problem.evaluate(&[]);
    let mut members = Vec::with_capacity(m);
    let total = 1usize << m;
    for code in 1..total {
        members.clear();
        members.extend((0..m).filter(|&i| code >> (m - 1 - i) & 1 == 1));
        let cand = problem.evaluate(&members);
        if cand.value > best.value {
            best = cand;
            best_members.clone_from(&members);
        }
    }
    (best_members, best, total)
}

pub(crate) fn solve_fad_with_prices<T: Scalar>(
    n: usize,
    prices: &Prices<T>,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
    solver: FadSolver,
) -> Result<FadChoice<T>, SolverError> {
    let m = params.num_rrhs;
    if solver == FadSolver::Exhaustive && m > MAX_EXHAUSTIVE_RRHS {
        return Err(SolverError::TooManyRrhs {
            max: MAX_EXHAUSTIVE_RRHS,
            got: m,
        });
    }
    let mut best = FadChoice::empty(m);
    let mut candidates = 0;
    for k in 0..params.num_users {
        let problem = FadUserProblem::new(n, k, prices, channel, params);
        let (members, cand, evaluated) = match solver {
            FadSolver::Exhaustive => exhaustive_for_user(&problem),
            FadSolver::Greedy => {
                let out = greedy::greedy_on(&problem);
                let evaluated = out.trace.candidates_evaluated;
                (
                    out.trace.final_subset,
                    FadCandidate {
                        power: out.power,
                        value: out.value,
                    },
                    evaluated,
                )
            }
        };
        candidates += evaluated;
        if cand.value > best.value {
            let mut subset = vec![false; m];
            for &i in &members {
                subset[i] = true;
            }
            best = FadChoice {
                user: Some(k),
                subset,
                power: cand.power,
                value: cand.value,
                candidates: 0,
            };
        }
    }
    best.candidates = candidates;
    Ok(best)
}

/// Best FaD configuration on subchannel `n` over all users and all `2^M`
/// RRH subsets.
pub fn solve_fad_subproblem<T: Scalar>(
    n: usize,
    dual: &DualPoint<T>,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
) -> Result<FadChoice<T>, SolverError> {
    check_inputs(dual, channel, params)?;
    solve_fad_with_prices(
        n,
        &Prices::new(dual, params),
        channel,
        params,
        FadSolver::Exhaustive,
    )
}

/// Water-filling power for DaF at one RRH:
/// `[ (B / (mu N ln2)) (omega - lambda/Rbar) - sigma2/g ]^+`.
pub fn daf_power<T: Scalar>(
    gain: T,
    noise: T,
    omega: T,
    lambda: T,
    fronthaul_capacity: T,
    mu: T,
    sc_bandwidth: T,
) -> Result<T, SolverError> {
    if mu <= T::zero() {
        return Err(SolverError::UnboundedSubproblem);
    }
    Ok(water_fill(
        gain / noise,
        omega - lambda / fronthaul_capacity,
        mu,
        sc_bandwidth,
    ))
}

#[inline]
fn water_fill<T: Scalar>(snr_scale: T, net_weight: T, mu: T, sc_bandwidth: T) -> T {
    if snr_scale <= T::zero() || net_weight <= T::zero() {
        return T::zero();
    }
    pos(sc_bandwidth / (mu * T::LN_2()) * net_weight - T::one() / snr_scale)
}

/// Best DaF configuration on one subchannel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DafChoice<T> {
    pub user: Option<usize>,
    pub rrh: Option<usize>,
    pub power: T,
    pub value: T,
}

pub(crate) fn solve_daf_with_prices<T: Scalar>(
    n: usize,
    prices: &Prices<T>,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
) -> DafChoice<T> {
    let bw = params.sc_bandwidth();
    let mut best = DafChoice {
        user: None,
        rrh: None,
        power: T::zero(),
        value: T::zero(),
    };
    for k in 0..params.num_users {
        let mu = prices.mu[k];
        let cap = params.power_budget[k];
        // lexicographically smallest single-RRH participation vector first
        for m in (0..params.num_rrhs).rev() {
            let net = params.weights[k] - prices.decode_price[m];
            let g = channel.get(m, k, n);
            let noise = params.noise_power[m];
            let p = water_fill(g / noise, net, mu, bw).min(cap);
            if p <= T::zero() {
                continue;
            }
            let value = net * daf_rate(g, p, noise, bw) - mu * p;
            if value > best.value {
                best = DafChoice {
                    user: Some(k),
                    rrh: Some(m),
                    power: p,
                    value,
                };
            }
        }
    }
    best
}

/// Best DaF configuration on subchannel `n` over all (user, RRH) pairs.
pub fn solve_daf_subproblem<T: Scalar>(
    n: usize,
    dual: &DualPoint<T>,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
) -> Result<DafChoice<T>, SolverError> {
    check_inputs(dual, channel, params)?;
    Ok(solve_daf_with_prices(
        n,
        &Prices::new(dual, params),
        channel,
        params,
    ))
}

/// Solution of the dual subproblem of one subchannel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScSubproblemResult<T> {
    pub decision: ScDecision<T>,
    /// `max(L^Q, L^D, 0)`
    pub lagrangian_value: T,
    /// `(L^Q, L^D)`; a mode excluded by the policy reports zero.
    pub mode_values: (T, T),
    /// FaD (user, subset) candidates evaluated.
    pub fad_candidates: usize,
}

pub(crate) fn solve_sc_with_prices<T: Scalar>(
    n: usize,
    prices: &Prices<T>,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
    solver: ScSolver,
) -> Result<ScSubproblemResult<T>, SolverError> {
    let m = params.num_rrhs;
    let fad = match solver.modes {
        ModePolicy::DafOnly => FadChoice::empty(m),
        _ => solve_fad_with_prices(n, prices, channel, params, solver.fad)?,
    };
    let daf = match solver.modes {
        ModePolicy::FadOnly => DafChoice {
            user: None,
            rrh: None,
            power: T::zero(),
            value: T::zero(),
        },
        _ => solve_daf_with_prices(n, prices, channel, params),
    };
    let (decision, value) = if fad.value > daf.value {
        (
            ScDecision {
                mode: Mode::Fad,
                alpha: fad.subset.clone(),
                user: fad.user,
                power: fad.power,
            },
            fad.value,
        )
    } else if daf.value > T::zero() {
        let mut alpha = vec![false; m];
        alpha[daf.rrh.expect("positive DaF value has an RRH")] = true;
        (
            ScDecision {
                mode: Mode::Daf,
                alpha,
                user: daf.user,
                power: daf.power,
            },
            daf.value,
        )
    } else {
        (ScDecision::empty(m), T::zero())
    };
    Ok(ScSubproblemResult {
        decision,
        lagrangian_value: value,
        mode_values: (fad.value, daf.value),
        fad_candidates: fad.candidates,
    })
}

/// Solves subchannel `n`'s dual subproblem: FaD and DaF optima, then the mode
/// with the larger value (DaF on ties).
pub fn solve_sc<T: Scalar>(
    n: usize,
    dual: &DualPoint<T>,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
    solver: ScSolver,
) -> Result<ScSubproblemResult<T>, SolverError> {
    check_inputs(dual, channel, params)?;
    solve_sc_with_prices(n, &Prices::new(dual, params), channel, params, solver)
}

pub(crate) fn check_inputs<T: Scalar>(
    dual: &DualPoint<T>,
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
) -> Result<(), SolverError> {
    params.validate()?;
    channel.check_matches(params)?;
    if !dual.is_valid_for(params) {
        return Err(SolverError::InvalidDual);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense grid maximizer of `f` over `[0, hi]`.
    /// Grid argmax of a concave `f` on `[0, hi]` down to resolution `step`,
    /// zooming into the neighbourhood of the best point of each level.
    fn grid_argmax(f: impl Fn(f64) -> f64, hi: f64, step: f64) -> f64 {
        const POINTS: usize = 2000;
        let (mut lo, mut hi) = (0.0, hi);
        let top = hi;
        loop {
            let h = ((hi - lo) / POINTS as f64).max(step);
            let mut best = (lo, f(lo));
            let mut p = lo;
            while p < hi {
                p = (p + h).min(hi);
                let v = f(p);
                if v > best.1 {
                    best = (p, v);
                }
            }
            if h <= step {
                return best.0;
            }
            lo = (best.0 - h).max(0.0);
            hi = (best.0 + h).min(top);
        }
    }

    fn unit_params(m: usize, k: usize, beta: u32) -> SystemParams<f64> {
        SystemParams::uniform(m, k, 1, 1.0, beta, 1.0, 1e3, 1.0).unwrap()
    }

    #[test]
    fn single_rrh_power_matches_grid_search() {
        let p = fad_power_single_rrh(1.0, 1.0, 1, 1.0, 0.05, 1.0).unwrap();
        let params = unit_params(1, 1, 1);
        let obj = |q: f64| crate::model::fad_rate(&[true], &[1.0], q, &params) - 0.05 * q;
        let grid = grid_argmax(obj, 20.0, 1e-6);
        assert!(
            (p - grid).abs() <= 1e-4 * grid,
            "closed form {p}, grid {grid}"
        );
    }

    #[test]
    fn single_rrh_power_threshold_and_degenerate_cases() {
        let (mu, omega, bw, beta) = (0.3f64, 1.0, 1.0, 2u32);
        let theta: f64 = crate::scalar::theta(beta);
        let at_threshold = (mu * std::f64::consts::LN_2 / (omega * bw)) * (1.0 + 1.0 / theta);
        assert_eq!(
            fad_power_single_rrh(at_threshold, 1.0, beta, omega, mu, bw).unwrap(),
            0.0
        );
        assert!(fad_power_single_rrh(at_threshold * 1.01, 1.0, beta, omega, mu, bw).unwrap() > 0.0);
        assert_eq!(
            fad_power_single_rrh(5.0, 1.0, 3, 0.0, 0.1, 1.0).unwrap(),
            0.0
        );
        assert_eq!(
            fad_power_single_rrh(5.0, 1.0, 3, 1.0, 0.0, 1.0),
            Err(SolverError::UnboundedSubproblem)
        );
    }

    #[test]
    fn closed_form_zeroes_the_stationarity_quadratic() {
        // (x + 1)(x + theta + 1) = omega B g theta / (sigma2 mu N ln2), x = g p / sigma2
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let g: f64 = rng.gen_range(0.1..10.0);
            let s: f64 = rng.gen_range(0.1..2.0);
            let beta = rng.gen_range(1..16);
            let mu: f64 = rng.gen_range(1e-3..0.5);
            let p = fad_power_single_rrh(g, s, beta, 1.0, mu, 1.0).unwrap();
            if p == 0.0 {
                continue;
            }
            let theta: f64 = crate::scalar::theta(beta);
            let x = g * p / s;
            let lhs = (x + 1.0) * (x + theta + 1.0);
            let rhs = g * theta / (s * mu * std::f64::consts::LN_2);
            assert!(
                (lhs - rhs).abs() <= 1e-6 * rhs,
                "residual {} of {rhs}",
                lhs - rhs
            );
        }
    }

    #[test]
    fn line_search_agrees_with_closed_form_for_one_rrh() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let beta = rng.gen_range(1..14);
            let params = SystemParams::uniform(1, 1, 1, 1.0, beta, 1.0, 1.0, 1.0).unwrap();
            let g: f64 = rng.gen_range(0.5..20.0);
            let mu: f64 = rng.gen_range(0.01..0.5);
            let closed = fad_power_single_rrh(g, 1.0, beta, 1.0, mu, 1.0).unwrap();
            // the bracket is 1e-8 * cap wide, so 1e-6 relative needs p >= 1e-2 * cap
            let cap = 20.0;
            let searched = fad_power_line_search(&[0], &[g], &params, 1.0, mu, cap).unwrap();
            if closed > cap {
                assert_eq!(searched, cap);
            } else if closed >= 1e-2 * cap {
                assert!(
                    (closed - searched).abs() <= 1e-6 * closed,
                    "{closed} vs {searched}"
                );
            }
        }
    }

    #[test]
    fn line_search_zero_when_price_is_prohibitive() {
        let params = unit_params(3, 1, 4);
        let p =
            fad_power_line_search(&[0, 1, 2], &[1.0, 2.0, 0.5], &params, 1.0, 100.0, 10.0).unwrap();
        assert_eq!(p, 0.0);
        assert_eq!(
            fad_power_line_search(&[], &[1.0, 2.0, 0.5], &params, 1.0, 1.0, 10.0),
            Err(SolverError::EmptySubset)
        );
    }

    #[test]
    fn line_search_matches_grid_for_two_rrhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let beta = rng.gen_range(1..8);
            let params = unit_params(2, 1, beta);
            let gains = [rng.gen_range(0.2..5.0), rng.gen_range(0.2..5.0)];
            let mu = rng.gen_range(0.02..0.3);
            let p = fad_power_line_search(&[0, 1], &gains, &params, 1.0, mu, 50.0).unwrap();
            let obj = |q: f64| crate::model::fad_rate(&[true, true], &gains, q, &params) - mu * q;
            let grid = grid_argmax(obj, 50.0, 1e-6);
            assert!((p - grid).abs() <= 1e-4 * grid.max(1e-3), "{p} vs {grid}");
        }
    }

    #[test]
    fn water_filling_examples() {
        let mu = 1.0 / std::f64::consts::LN_2;
        assert_relative_eq!(
            daf_power(2.0, 1.0, 1.0, 0.0, 1.0, mu, 1.0).unwrap(),
            0.5,
            max_relative = 1e-12
        );
        assert_eq!(daf_power(2.0, 1.0, 1.0, 3.0, 3.0, mu, 1.0).unwrap(), 0.0);
        assert_eq!(daf_power(0.0, 1.0, 1.0, 0.0, 1.0, mu, 1.0).unwrap(), 0.0);
        assert!(daf_power(1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn water_filling_matches_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g: f64 = rng.gen_range(0.2..5.0);
            let lambda: f64 = rng.gen_range(0.0..0.5);
            let mu: f64 = rng.gen_range(0.05..0.5);
            let p = daf_power(g, 1.0, 1.0, lambda, 1.0, mu, 1.0).unwrap();
            let obj = |q: f64| (1.0 - lambda) * daf_rate(g, q, 1.0, 1.0) - mu * q;
            let grid = grid_argmax(obj, 40.0, 1e-6);
            assert!((p - grid).abs() <= 1e-4 * grid.max(1e-2), "{p} vs {grid}");
        }
    }

    #[test]
    fn prohibitive_fronthaul_price_gives_empty_fad() {
        let params = unit_params(3, 2, 6);
        let ch = ChannelGains::from_fn(3, 2, 1, |m, k, _| 1.0 + (m + k) as f64).unwrap();
        let dual = DualPoint {
            lambda: vec![1e9; 3],
            mu: vec![0.01; 2],
        };
        let fad = solve_fad_subproblem(0, &dual, &ch, &params).unwrap();
        assert_eq!(fad.user, None);
        assert_eq!(fad.value, 0.0);
        assert_eq!(fad.candidates, 2 * 8);
    }

    #[test]
    fn one_rrh_one_user_fad_value_is_closed_form_substitution() {
        let beta = 3;
        let params = SystemParams::uniform(1, 1, 1, 1.0, beta, 10.0, 100.0, 1.0).unwrap();
        let ch = ChannelGains::new(1, 1, 1, vec![4.0]).unwrap();
        let dual = DualPoint {
            lambda: vec![0.5],
            mu: vec![0.05],
        };
        let fad = solve_fad_subproblem(0, &dual, &ch, &params).unwrap();
        let p = fad_power_single_rrh(4.0, 1.0, beta, 1.0, 0.05, 1.0).unwrap();
        let expected = crate::model::fad_rate(&[true], &[4.0], p, &params)
            - 2.0 * beta as f64 * 0.5 / 10.0
            - 0.05 * p;
        assert_relative_eq!(fad.value, expected, max_relative = 1e-12);
        assert_relative_eq!(fad.power, p);
    }

    #[test]
    fn zero_weights_give_empty_daf() {
        let mut params = unit_params(2, 2, 4);
        params.weights = vec![0.0, 0.0];
        let ch = ChannelGains::from_fn(2, 2, 1, |_, _, _| 3.0).unwrap();
        let daf = solve_daf_subproblem(0, &DualPoint::zeros(2, 2), &ch, &params).unwrap();
        assert_eq!(daf.user, None);
        assert_eq!(daf.value, 0.0);
    }

    #[test]
    fn one_by_one_daf_is_water_filling_value() {
        let params = SystemParams::uniform(1, 1, 1, 1.0, 8, 4.0, 100.0, 1.0).unwrap();
        let ch = ChannelGains::new(1, 1, 1, vec![2.5]).unwrap();
        let dual = DualPoint {
            lambda: vec![1.0],
            mu: vec![0.1],
        };
        let daf = solve_daf_subproblem(0, &dual, &ch, &params).unwrap();
        let p = daf_power(2.5, 1.0, 1.0, 1.0, 4.0, 0.1, 1.0).unwrap();
        assert_relative_eq!(daf.power, p);
        assert_relative_eq!(
            daf.value,
            0.75 * daf_rate(2.5, p, 1.0, 1.0) - 0.1 * p,
            max_relative = 1e-12
        );
        let obj = |q: f64| 0.75 * daf_rate(2.5, q, 1.0, 1.0) - 0.1 * q;
        let grid = grid_argmax(obj, 100.0, 1e-5);
        assert!((p - grid).abs() < 1e-4 * grid);
    }

    #[test]
    fn tie_between_modes_selects_daf() {
        // lambda huge kills FaD; DaF equally worthless -> both zero -> empty
        let params = unit_params(1, 1, 1);
        let ch = ChannelGains::new(1, 1, 1, vec![0.0]).unwrap();
        let res = solve_sc(
            0,
            &DualPoint::zeros(1, 1),
            &ch,
            &params,
            ScSolver::HYBRID_OPTIMAL,
        )
        .unwrap();
        assert_eq!(res.mode_values, (0.0, 0.0));
        assert!(res.decision.is_empty());
        assert_eq!(res.decision.mode, Mode::Daf);
        assert_eq!(res.lagrangian_value, 0.0);
    }

    #[test]
    fn forced_modes_respect_policy() {
        let params = unit_params(2, 1, 6);
        let ch = ChannelGains::from_fn(2, 1, 1, |m, _, _| 2.0 + m as f64).unwrap();
        let dual = DualPoint {
            lambda: vec![0.01; 2],
            mu: vec![0.05],
        };
        let fad = solve_sc(0, &dual, &ch, &params, ScSolver::FAD_ONLY).unwrap();
        assert_eq!(fad.decision.mode, Mode::Fad);
        assert_eq!(fad.mode_values.1, 0.0);
        let daf = solve_sc(0, &dual, &ch, &params, ScSolver::DAF_ONLY).unwrap();
        assert_eq!(daf.decision.mode, Mode::Daf);
        assert_eq!(daf.mode_values.0, 0.0);
        let hybrid = solve_sc(0, &dual, &ch, &params, ScSolver::HYBRID_OPTIMAL).unwrap();
        assert!(hybrid.lagrangian_value >= fad.lagrangian_value);
        assert!(hybrid.lagrangian_value >= daf.lagrangian_value);
    }

    #[test]
    fn exhaustive_counts_every_user_subset_pair() {
        for m in 1..=6 {
            for k in 1..=3 {
                let params = SystemParams::uniform(m, k, 1, 1.0, 4, 1.0, 10.0, 1.0).unwrap();
                let ch = ChannelGains::from_fn(m, k, 1, |a, b, _| 0.5 + (a * k + b) as f64 * 0.1)
                    .unwrap();
                let dual = DualPoint {
                    lambda: vec![0.1; m],
                    mu: vec![0.1; k],
                };
                let res = solve_sc(0, &dual, &ch, &params, ScSolver::HYBRID_OPTIMAL).unwrap();
                assert_eq!(res.fad_candidates, k << m);
            }
        }
    }

    #[test]
    fn exhaustive_limit_enforced() {
        let m = MAX_EXHAUSTIVE_RRHS + 1;
        let params = SystemParams::uniform(m, 1, 1, 1.0, 4, 1.0, 10.0, 1.0).unwrap();
        let ch = ChannelGains::from_fn(m, 1, 1, |_, _, _| 1.0).unwrap();
        let err = solve_fad_subproblem(0, &DualPoint::zeros(m, 1), &ch, &params);
        assert!(matches!(err, Err(SolverError::TooManyRrhs { .. })));
    }

    #[test]
    fn works_in_f32() {
        let p: f32 = fad_power_single_rrh(1.0, 1.0, 1, 1.0, 0.05, 1.0).unwrap();
        let p64 = fad_power_single_rrh(1.0f64, 1.0, 1, 1.0, 0.05, 1.0).unwrap();
        assert!(((p as f64) - p64).abs() <= 1e-4 * p64);
        let params = SystemParams::<f32>::uniform(2, 1, 1, 1.0, 4, 1.0, 10.0, 1.0).unwrap();
        let ch = ChannelGains::<f32>::from_fn(2, 1, 1, |m, _, _| 1.0 + m as f32).unwrap();
        let dual = DualPoint {
            lambda: vec![0.01f32; 2],
            mu: vec![0.05f32],
        };
        let res = solve_sc(0, &dual, &ch, &params, ScSolver::HYBRID_OPTIMAL).unwrap();
        assert!(res.lagrangian_value > 0.0);
    }
}
