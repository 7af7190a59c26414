use log::{debug, trace};
use serde::{Deserialize, Serialize};

use super::{evaluate_dual, DualEvaluation};
use crate::error::SolverError;
use crate::model::{ChannelGains, DualPoint, SystemParams};
use crate::persc::{check_inputs, ScSolver};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EllipsoidOptions<T> {
    /// Radius of the initial ball in scaled coordinates.
    pub initial_radius: T,
    /// Relative accuracy of the stopping rule.
    pub tolerance: T,
    /// Defaults to `ceil(8 (M + K)^2 ln(1 / tolerance))`.
    pub max_iterations: Option<usize>,
}

impl<T: Scalar> Default for EllipsoidOptions<T> {
    fn default() -> Self {
        Self {
            initial_radius: T::lit(1e3),
            tolerance: T::lit(1e-4),
            max_iterations: None,
        }
    }
}

impl<T: Scalar> EllipsoidOptions<T> {
    pub fn iteration_limit(&self, dim: usize) -> usize {
        self.max_iterations.unwrap_or_else(|| {
            let d = dim as f64;
            (8.0 * d * d * (1.0 / self.tolerance.to_f64_lossy()).ln()).ceil() as usize
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutKind {
    /// Center feasible: cut with the dual subgradient.
    Objective,
    /// Center has a negative coordinate: cut with the negated unit vector.
    Feasibility,
}

/// One line of the iteration log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord<T> {
    pub iteration: usize,
    /// Dual value at the center, when it was evaluated.
    pub value: Option<T>,
    pub cut: CutKind,
    /// `sqrt(g' P g)`, the width of the ellipsoid along the cut.
    pub width: T,
}

/// Ellipsoid `{ z : (z - c)' P^{-1} (z - c) <= 1 }` in scaled dual coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EllipsoidState<T> {
    pub center: Vec<T>,
    /// Row-major `dim x dim` shape matrix.
    pub shape: Vec<T>,
    pub iteration: usize,
    pub best_value: Option<T>,
}

impl<T: Scalar> EllipsoidState<T> {
    pub fn ball(center: Vec<T>, radius: T) -> Self {
        let d = center.len();
        let mut shape = vec![T::zero(); d * d];
        for i in 0..d {
            shape[i * d + i] = radius * radius;
        }
        Self {
            center,
            shape,
            iteration: 0,
            best_value: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn shape_times(&self, g: &[T]) -> Vec<T> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.shape[i * d + j] * g[j]).sum())
            .collect()
    }

    /// `sqrt(g' P g)`
    pub fn width(&self, g: &[T]) -> T {
        let pg = self.shape_times(g);
        pg.iter().zip(g).map(|(&a, &b)| a * b).sum::<T>().sqrt()
    }

    /// Central cut keeping the half-space `{ z : g'(z - c) <= 0 }`.
    pub fn cut(&mut self, g: &[T]) -> Result<(), SolverError> {
        let d = self.dim();
        let pg = self.shape_times(g);
        let gpg: T = pg.iter().zip(g).map(|(&a, &b)| a * b).sum();
        if !(gpg > T::zero()) || !gpg.is_finite() {
            return Err(SolverError::ShapeNotPositiveDefinite(self.iteration));
        }
        let dd = T::from_usize_lossy(d);
        let one = T::one();
        let step: Vec<T> = pg.iter().map(|&v| v / gpg.sqrt()).collect();
        for (c, &s) in self.center.iter_mut().zip(&step) {
            *c = *c - s / (dd + one);
        }
        let scale = dd * dd / (dd * dd - one);
        let rank = T::lit(2.0) / (dd + one);
        for i in 0..d {
            for j in i..d {
                let v = scale * (self.shape[i * d + j] - rank * step[i] * step[j]);
                self.shape[i * d + j] = v;
                self.shape[j * d + i] = v;
            }
        }
        self.iteration += 1;
        if !is_positive_definite(&self.shape, d) {
            return Err(SolverError::ShapeNotPositiveDefinite(self.iteration));
        }
        Ok(())
    }
}

fn is_positive_definite<T: Scalar>(a: &[T], d: usize) -> bool {
    let mut l = vec![T::zero(); d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = a[i * d + j];
            for k in 0..j {
                s = s - l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if !(s > T::zero()) {
                    return false;
                }
                l[i * d + i] = s.sqrt();
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    true
}

/// Maps scaled coordinates to multipliers: `lambda_m = w R_m z_m`,
/// `mu_k = w (B/N) / (P_k ln2) z_{M+k}` with `w` the largest rate weight.
struct Scaling<T> {
    factors: Vec<T>,
    num_rrhs: usize,
}

impl<T: Scalar> Scaling<T> {
    fn new(params: &SystemParams<T>) -> Self {
        let w = params.weights.iter().copied().fold(T::zero(), T::max);
        let w = if w > T::zero() { w } else { T::one() };
        let bw = params.sc_bandwidth();
        let factors = params
            .fronthaul_capacity
            .iter()
            .map(|&r| w * r)
            .chain(
                params
                    .power_budget
                    .iter()
                    .map(|&p| w * bw / (p * T::LN_2())),
            )
            .collect();
        Self {
            factors,
            num_rrhs: params.num_rrhs,
        }
    }

    fn to_dual(&self, z: &[T]) -> DualPoint<T> {
        let x: Vec<T> = z.iter().zip(&self.factors).map(|(&z, &f)| z * f).collect();
        DualPoint {
            lambda: x[..self.num_rrhs].to_vec(),
            mu: x[self.num_rrhs..].to_vec(),
        }
    }

    fn scaled_subgradient(&self, ev: &DualEvaluation<T>) -> Vec<T> {
        ev.subgrad_lambda
            .iter()
            .chain(&ev.subgrad_mu)
            .zip(&self.factors)
            .map(|(&g, &f)| g * f)
            .collect()
    }
}

/// Outcome of the ellipsoid method.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualSolution<T> {
    /// Best (lowest-value) evaluated dual point.
    pub dual: DualPoint<T>,
    pub evaluation: DualEvaluation<T>,
    pub iterations: usize,
    /// False when the iteration limit was hit first.
    pub converged: bool,
}

/// Minimizes the dual function over the nonnegative orthant with the
/// central-cut ellipsoid method.
pub fn ellipsoid_solve<T: Scalar>(
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
    solver: ScSolver,
    opts: &EllipsoidOptions<T>,
) -> Result<DualSolution<T>, SolverError> {
    ellipsoid_solve_with(channel, params, solver, opts, &mut |_, _| {})
}

/// Same as [`ellipsoid_solve`], calling `observer` after every iteration with
/// the log record and, for objective cuts, the evaluation at the center.
pub fn ellipsoid_solve_with<T: Scalar>(
    channel: &ChannelGains<T>,
    params: &SystemParams<T>,
    solver: ScSolver,
    opts: &EllipsoidOptions<T>,
    observer: &mut dyn FnMut(&IterationRecord<T>, Option<&DualEvaluation<T>>),
) -> Result<DualSolution<T>, SolverError> {
    check_inputs(
        &DualPoint::zeros(params.num_rrhs, params.num_users),
        channel,
        params,
    )?;
    let scaling = Scaling::new(params);
    let (m, k) = (params.num_rrhs, params.num_users);
    let center: Vec<T> = std::iter::repeat_n(T::one(), m)
        .chain(std::iter::repeat_n(T::from_usize_lossy(k), k))
        .collect();
    let mut state = EllipsoidState::ball(center, opts.initial_radius);
    let limit = opts.iteration_limit(m + k);
    let mut best: Option<(DualPoint<T>, DualEvaluation<T>)> = None;
    let mut converged = false;

    while state.iteration < limit {
        let infeasible = state
            .center
            .iter()
            .enumerate()
            .filter(|(_, &z)| z < T::zero())
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i);
        if let Some(i) = infeasible {
            let mut g = vec![T::zero(); m + k];
            g[i] = -T::one();
            let record = IterationRecord {
                iteration: state.iteration,
                value: None,
                cut: CutKind::Feasibility,
                width: state.width(&g),
            };
            trace!("ellipsoid {:?}", record);
            observer(&record, None);
            state.cut(&g)?;
            continue;
        }

        let dual = scaling.to_dual(&state.center);
        let ev = evaluate_dual(&dual, channel, params, solver)?;
        let g = scaling.scaled_subgradient(&ev);
        let width = state.width(&g);
        let record = IterationRecord {
            iteration: state.iteration,
            value: Some(ev.value),
            cut: CutKind::Objective,
            width,
        };
        trace!("ellipsoid {:?}", record);
        observer(&record, Some(&ev));
        let value = ev.value;
        if best.as_ref().is_none_or(|(_, b)| value < b.value) {
            state.best_value = Some(value);
            best = Some((dual, ev));
        }
        if width <= opts.tolerance * value.abs().max(T::one()) {
            converged = true;
            break;
        }
        state.cut(&g)?;
    }

    let iterations = state.iteration;
    let (dual, evaluation) = match best {
        Some(b) => b,
        None => {
            // never reached the orthant; fall back to the clamped center
            let z: Vec<T> = state.center.iter().map(|&z| z.max(T::zero())).collect();
            let dual = scaling.to_dual(&z);
            let ev = evaluate_dual(&dual, channel, params, solver)?;
            (dual, ev)
        }
    };
    debug!(
        "ellipsoid finished after {iterations} iterations, converged={converged}, g={}",
        evaluation.value
    );
    Ok(DualSolution {
        dual,
        evaluation,
        iterations,
        converged,
    })
}
