use std::collections::BTreeMap;

use hcran_channel::{derive_seed, generate_channel, generate_topology, Topology};
use hcran_core::{ChannelGains, EllipsoidOptions, SolveOptions, SystemParams};
use serde::{Deserialize, Serialize};

use crate::cluster::cluster_and_solve;
use crate::config::ExperimentConfig;
use crate::scheme::{run_scheme, Scheme};
use crate::HarnessError;

/// Relative slack allowed when comparing hybrid_optimal with the
/// single-mode benchmarks.
pub const DOMINANCE_RTOL: f64 = 1e-6;

/// Aggregate of one scheme at one sweep value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scheme: Scheme,
    pub sweep_var: String,
    pub sweep_value: f64,
    pub mean_rate_bps: f64,
    pub stderr_bps: f64,
    /// Mean of `(bound - rate) / bound` against the dual bound of the same
    /// draw; absent when hybrid_optimal was not run.
    pub mean_gap: Option<f64>,
    pub mean_time_s: f64,
}

/// One scheme on one draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawRecord {
    pub sweep_value: f64,
    pub draw: usize,
    pub seed: u64,
    pub scheme: Scheme,
    pub rate_bps: f64,
    pub dual_value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedDraw {
    pub sweep_value: f64,
    pub draw: usize,
    pub error: String,
}

/// A draw on which hybrid_optimal fell below a single-mode benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceNote {
    pub sweep_value: f64,
    pub draw: usize,
    pub benchmark: Scheme,
    pub hybrid_bps: f64,
    pub benchmark_bps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub config: ExperimentConfig,
    pub rows: Vec<ResultRow>,
    pub draws: Vec<DrawRecord>,
    pub failed: Vec<FailedDraw>,
    pub dominance_notes: Vec<DominanceNote>,
}

impl SweepTable {
    pub fn row(&self, scheme: Scheme, sweep_value: f64) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.scheme == scheme && same_value(r.sweep_value, sweep_value))
    }

    /// Copy with solve times zeroed, for comparing runs.
    pub fn without_timing(&self) -> SweepTable {
        let mut t = self.clone();
        t.rows.iter_mut().for_each(|r| r.mean_time_s = 0.0);
        t.draws.iter_mut().for_each(|d| d.time_s = 0.0);
        t
    }
}

fn same_value(a: f64, b: f64) -> bool {
    a == b || (a.is_nan() && b.is_nan())
}

/// Solver options implied by the configuration.
pub fn solve_options(config: &ExperimentConfig) -> SolveOptions<f64> {
    SolveOptions {
        ellipsoid: EllipsoidOptions {
            tolerance: config.tolerance,
            ..EllipsoidOptions::default()
        },
        ..SolveOptions::default()
    }
}

/// Topology and channel of draw `draw`. The same draw index gives the same
/// deployment at every sweep value and for every scheme.
pub fn draw_instance(
    config: &ExperimentConfig,
    draw: usize,
) -> Result<(u64, Topology, ChannelGains<f64>), HarnessError> {
    let seed = derive_seed(config.seed, draw as u64);
    let topology = generate_topology(&config.preset.topology(), seed)?;
    let channel = generate_channel::<f64>(&topology, &config.channel, seed)?.gains;
    Ok((seed, topology, channel))
}

/// Runs every scheme on every (sweep value, draw) pair and aggregates.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepTable, HarnessError> {
    config.validate()?;
    let opts = solve_options(config);
    let mut draws = Vec::new();
    let mut failed = Vec::new();
    for value in config.sweep_values() {
        let point = config.point(value);
        for draw in 0..config.draws {
            let result = draw_instance(config, draw).and_then(|(seed, topo, ch)| {
                let params = config.system_params(point, topo.num_rrhs(), topo.num_users())?;
                run_draw(config, &topo, &ch, &params, &opts, value, draw, seed)
            });
            match result {
                Ok(records) => draws.extend(records),
                Err(e) => {
                    log::warn!(
                        "{} = {value}, draw {draw} failed: {e}",
                        config.sweep_var_name()
                    );
                    failed.push(FailedDraw {
                        sweep_value: value,
                        draw,
                        error: e.to_string(),
                    });
                }
            }
        }
    }
    if !failed.is_empty() {
        log::warn!("{} draws failed and were excluded", failed.len());
    }
    let rows = aggregate(config, &draws);
    let dominance_notes = paired_dominance(&draws);
    for n in &dominance_notes {
        log::info!(
            "draw {} at {}: hybrid_optimal {:.6e} below {} {:.6e}",
            n.draw,
            n.sweep_value,
            n.hybrid_bps,
            n.benchmark,
            n.benchmark_bps
        );
    }
    let table = SweepTable {
        config: config.clone(),
        rows,
        draws,
        failed,
        dominance_notes,
    };
    if config.check_dominance {
        check_dominance(&table)?;
    }
    Ok(table)
}

#[allow(clippy::too_many_arguments)]
fn run_draw(
    config: &ExperimentConfig,
    topo: &Topology,
    ch: &ChannelGains<f64>,
    params: &SystemParams<f64>,
    opts: &SolveOptions<f64>,
    value: f64,
    draw: usize,
    seed: u64,
) -> Result<Vec<DrawRecord>, HarnessError> {
    let solve = |scheme: Scheme| -> Result<DrawRecord, HarnessError> {
        let (rate_bps, dual_value, iterations, converged, time_s) = if topo.num_clusters > 1 {
            let r = cluster_and_solve(topo, ch, params, scheme, opts)?;
            let iters = r.clusters.iter().map(|c| c.run.iterations).sum();
            let conv = r.clusters.iter().all(|c| c.run.converged);
            (r.rate, r.dual_value, iters, conv, r.time_s)
        } else {
            let r = run_scheme(scheme, ch, params, opts)?;
            (r.rate, r.dual_value, r.iterations, r.converged, r.time_s)
        };
        Ok(DrawRecord {
            sweep_value: value,
            draw,
            seed,
            scheme,
            rate_bps,
            dual_value,
            iterations,
            converged,
            time_s,
        })
    };
    let mut optimal: Option<DrawRecord> = None;
    let mut out = Vec::with_capacity(config.schemes.len());
    for &scheme in &config.schemes {
        let rec = match scheme {
            Scheme::HybridOptimal | Scheme::DualBound => {
                let base = match &optimal {
                    Some(r) => r.clone(),
                    None => {
                        let r = solve(Scheme::HybridOptimal)?;
                        optimal = Some(r.clone());
                        r
                    }
                };
                if scheme == Scheme::DualBound {
                    DrawRecord {
                        scheme,
                        rate_bps: base.dual_value,
                        ..base
                    }
                } else {
                    base
                }
            }
            other => solve(other)?,
        };
        out.push(rec);
    }
    Ok(out)
}

fn aggregate(config: &ExperimentConfig, draws: &[DrawRecord]) -> Vec<ResultRow> {
    // dual bound per (value, draw), keyed by the bit pattern of the value
    let bounds: BTreeMap<(u64, usize), f64> = draws
        .iter()
        .filter(|d| d.scheme == Scheme::HybridOptimal || d.scheme == Scheme::DualBound)
        .map(|d| ((d.sweep_value.to_bits(), d.draw), d.dual_value))
        .collect();
    let mut rows = Vec::new();
    for value in config.sweep_values() {
        for &scheme in &config.schemes {
            let recs: Vec<&DrawRecord> = draws
                .iter()
                .filter(|d| d.scheme == scheme && same_value(d.sweep_value, value))
                .collect();
            if recs.is_empty() {
                continue;
            }
            let rates: Vec<f64> = recs.iter().map(|d| d.rate_bps).collect();
            let (mean, stderr) = mean_stderr(&rates);
            let gaps: Option<Vec<f64>> = recs
                .iter()
                .map(|d| {
                    bounds.get(&(d.sweep_value.to_bits(), d.draw)).map(|&ub| {
                        if ub > 0.0 {
                            (ub - d.rate_bps) / ub
                        } else {
                            0.0
                        }
                    })
                })
                .collect();
            rows.push(ResultRow {
                scheme,
                sweep_var: config.sweep_var_name().to_string(),
                sweep_value: value,
                mean_rate_bps: mean,
                stderr_bps: stderr,
                mean_gap: gaps.map(|g| mean_stderr(&g).0),
                mean_time_s: mean_stderr(&recs.iter().map(|d| d.time_s).collect::<Vec<_>>()).0,
            });
        }
    }
    rows
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    if x.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn paired_dominance(draws: &[DrawRecord]) -> Vec<DominanceNote> {
    let mut notes = Vec::new();
    for h in draws.iter().filter(|d| d.scheme == Scheme::HybridOptimal) {
        for b in draws.iter().filter(|d| {
            matches!(d.scheme, Scheme::AllFad | Scheme::AllDaf)
                && d.draw == h.draw
                && same_value(d.sweep_value, h.sweep_value)
        }) {
            if h.rate_bps < b.rate_bps - DOMINANCE_RTOL * b.rate_bps {
                notes.push(DominanceNote {
                    sweep_value: h.sweep_value,
                    draw: h.draw,
                    benchmark: b.scheme,
                    hybrid_bps: h.rate_bps,
                    benchmark_bps: b.rate_bps,
                });
            }
        }
    }
    notes
}

/// Every hybrid_optimal row must reach the all_fad and all_daf rows at the
/// same sweep value up to [`DOMINANCE_RTOL`].
pub fn check_dominance(table: &SweepTable) -> Result<(), HarnessError> {
    for h in table
        .rows
        .iter()
        .filter(|r| r.scheme == Scheme::HybridOptimal)
    {
        for b in table.rows.iter().filter(|r| {
            matches!(r.scheme, Scheme::AllFad | Scheme::AllDaf)
                && same_value(r.sweep_value, h.sweep_value)
        }) {
            if h.mean_rate_bps < b.mean_rate_bps - DOMINANCE_RTOL * b.mean_rate_bps {
                return Err(HarnessError::Dominance(format!(
                    "{} = {}: hybrid_optimal {:.6e} below {} {:.6e}",
                    h.sweep_var, h.sweep_value, h.mean_rate_bps, b.scheme, b.mean_rate_bps
                )));
            }
        }
    }
    Ok(())
}
