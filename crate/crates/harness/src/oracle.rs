use hcran_core::model::{daf_rate, fad_rate, sc_fronthaul_usage, FEASIBILITY_RTOL};
use hcran_core::scalar::le_rel;
use hcran_core::{Allocation, ChannelGains, Mode, ScDecision, SystemParams};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

pub const ORACLE_MAX_SUBCHANNELS: usize = 4;
pub const ORACLE_MAX_RRHS: usize = 3;
pub const ORACLE_MAX_USERS: usize = 2;
pub const ORACLE_MAX_GRID: usize = 16;

/// Best allocation on the power grid and how far the true optimum can be
/// above it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleResult {
    pub allocation: Allocation<f64>,
    pub weighted_sum_rate: f64,
    /// The optimum over continuous powers is at most
    /// `weighted_sum_rate + grid_slack`.
    pub grid_slack: f64,
    /// Mode/user/subset combinations that passed the fronthaul check of
    /// their quantized subchannels.
    pub structures: usize,
}

/// One way to use a subchannel, without its power.
#[derive(Debug, Clone, Copy)]
struct Config {
    user: usize,
    mode: Mode,
    /// Bit `m` set when RRH `m` processes the subchannel.
    mask: u8,
}

impl Config {
    fn decision(&self, num_rrhs: usize, power: f64) -> ScDecision<f64> {
        ScDecision {
            mode: self.mode,
            alpha: (0..num_rrhs).map(|m| self.mask >> m & 1 == 1).collect(),
            user: Some(self.user),
            power,
        }
    }
}

struct Tables {
    configs: Vec<Config>,
    grid: usize,
    /// `[n][c][u]`: weighted rate with `u` power units.
    rate: Vec<Vec<Vec<f64>>>,
    /// `[n][c][u]`: fronthaul used by the decoding RRH of a DaF config.
    daf_usage: Vec<Vec<Vec<f64>>>,
    /// `[c][m]`: fronthaul used by the quantizing RRHs of a FaD config.
    fad_cost: Vec<Vec<f64>>,
}

/// Exhaustive search over every (user, mode, RRH set) per subchannel and
/// every split of each user's budget into `grid` equal units, at least one
/// unit per active subchannel. Limited to `N <= 4`, `M <= 3`, `K <= 2`,
/// `grid <= 16`.
pub fn brute_force_oracle(
    channel: &ChannelGains<f64>,
    params: &SystemParams<f64>,
    grid: usize,
) -> Result<OracleResult, HarnessError> {
    params.validate()?;
    channel.check_matches(params)?;
    let (m, k, n) = (params.num_rrhs, params.num_users, params.num_subchannels);
    if n > ORACLE_MAX_SUBCHANNELS
        || m > ORACLE_MAX_RRHS
        || k > ORACLE_MAX_USERS
        || grid == 0
        || grid > ORACLE_MAX_GRID
    {
        return Err(HarnessError::OracleLimits(format!(
            "oracle supports N <= {ORACLE_MAX_SUBCHANNELS}, M <= {ORACLE_MAX_RRHS}, K <= {ORACLE_MAX_USERS}, \
             1 <= grid <= {ORACLE_MAX_GRID}; got N = {n}, M = {m}, K = {k}, grid = {grid}"
        )));
    }
    let tables = build_tables(channel, params, grid);
    let mut search = Search::new(&tables, params);
    search.run();

    let mut decisions = vec![ScDecision::empty(m); n];
    if let Some((structure, units)) = &search.best_point {
        for sc in 0..n {
            if let Some(c) = structure[sc] {
                let cfg = tables.configs[c];
                let unit = params.power_budget[cfg.user] / grid as f64;
                decisions[sc] = cfg.decision(m, units[sc] as f64 * unit);
            }
        }
    }
    let allocation = Allocation::from_decisions(decisions, channel, params)?;
    let report = allocation.report(channel, params)?;
    if !report.is_feasible() {
        return Err(HarnessError::Internal(format!(
            "oracle produced an infeasible allocation: {:?}",
            report.violations
        )));
    }
    Ok(OracleResult {
        weighted_sum_rate: allocation.weighted_sum_rate,
        allocation,
        grid_slack: grid_slack(channel, params, grid),
        structures: search.structures,
    })
}

/// Rounding every power of an optimal allocation down to the grid keeps it
/// feasible and, by concavity of both rate expressions, costs each
/// subchannel at most its rate with one power unit.
pub fn grid_slack(channel: &ChannelGains<f64>, params: &SystemParams<f64>, grid: usize) -> f64 {
    let all = vec![true; params.num_rrhs];
    let bw = params.sc_bandwidth();
    (0..params.num_subchannels)
        .map(|n| {
            (0..params.num_users)
                .map(|k| {
                    let unit = params.power_budget[k] / grid as f64;
                    let fad = fad_rate(&all, &channel.column(k, n), unit, params);
                    let daf = (0..params.num_rrhs)
                        .map(|m| daf_rate(channel.get(m, k, n), unit, params.noise_power[m], bw))
                        .fold(0.0, f64::max);
                    params.weights[k] * fad.max(daf)
                })
                .fold(0.0, f64::max)
        })
        .sum()
}

fn build_tables(channel: &ChannelGains<f64>, params: &SystemParams<f64>, grid: usize) -> Tables {
    let (m, k, n) = (params.num_rrhs, params.num_users, params.num_subchannels);
    let mut configs = Vec::new();
    for user in 0..k {
        for mask in 1..(1u8 << m) {
            configs.push(Config {
                user,
                mode: Mode::Fad,
                mask,
            });
        }
        for rrh in 0..m {
            configs.push(Config {
                user,
                mode: Mode::Daf,
                mask: 1 << rrh,
            });
        }
    }
    let mut rate = vec![vec![vec![0.0; grid + 1]; configs.len()]; n];
    let mut daf_usage = vec![vec![vec![0.0; grid + 1]; configs.len()]; n];
    for sc in 0..n {
        for (c, cfg) in configs.iter().enumerate() {
            let unit = params.power_budget[cfg.user] / grid as f64;
            for u in 1..=grid {
                let d = cfg.decision(m, u as f64 * unit);
                let r = hcran_core::model::hybrid_rate(&d, sc, channel, params).unwrap_or(0.0);
                rate[sc][c][u] = params.weights[cfg.user] * r;
                if cfg.mode == Mode::Daf {
                    let rrh = cfg.mask.trailing_zeros() as usize;
                    daf_usage[sc][c][u] = sc_fronthaul_usage(&d, rrh, sc, channel, params);
                }
            }
        }
    }
    let fad_cost = configs
        .iter()
        .map(|cfg| {
            (0..m)
                .map(|rrh| {
                    if cfg.mode == Mode::Fad && cfg.mask >> rrh & 1 == 1 {
                        params.quantized_sc_cost(rrh)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    Tables {
        configs,
        grid,
        rate,
        daf_usage,
        fad_cost,
    }
}

type Structure = Vec<Option<usize>>;

struct Search<'a> {
    t: &'a Tables,
    params: &'a SystemParams<f64>,
    best: f64,
    best_point: Option<(Structure, Vec<usize>)>,
    structures: usize,
}

impl<'a> Search<'a> {
    fn new(t: &'a Tables, params: &'a SystemParams<f64>) -> Self {
        Self {
            t,
            params,
            best: 0.0,
            best_point: None,
            structures: 0,
        }
    }

    fn fits(&self, used: f64, rrh: usize) -> bool {
        le_rel(used, self.params.fronthaul_capacity[rrh], FEASIBILITY_RTOL)
    }

    fn run(&mut self) {
        let n = self.params.num_subchannels;
        let mut all = Vec::new();
        let mut current = Vec::with_capacity(n);
        let mut fh = vec![0.0; self.params.num_rrhs];
        self.collect(&mut current, &mut fh, &mut all);
        self.structures = all.len();
        // most promising first so that the bound cuts the tail
        all.sort_by(|a, b| b.1.total_cmp(&a.1));
        for (structure, ub) in all {
            if ub <= self.best {
                break;
            }
            self.split_power(&structure);
        }
    }

    /// Every structure whose quantized subchannels fit the fronthaul, with
    /// its rate at full budget on every subchannel as an upper bound.
    fn collect(&self, current: &mut Structure, fh: &mut [f64], out: &mut Vec<(Structure, f64)>) {
        let sc = current.len();
        if sc == self.params.num_subchannels {
            let ub = current
                .iter()
                .enumerate()
                .map(|(n, c)| c.map_or(0.0, |c| self.t.rate[n][c][self.t.grid]))
                .sum::<f64>();
            if ub > 0.0 {
                out.push((current.clone(), ub));
            }
            return;
        }
        current.push(None);
        self.collect(current, fh, out);
        current.pop();
        for c in 0..self.t.configs.len() {
            let cost = &self.t.fad_cost[c];
            let ok = (0..fh.len()).all(|m| cost[m] == 0.0 || self.fits(fh[m] + cost[m], m));
            if !ok {
                continue;
            }
            for m in 0..fh.len() {
                fh[m] += cost[m];
            }
            current.push(Some(c));
            self.collect(current, fh, out);
            current.pop();
            for m in 0..fh.len() {
                fh[m] -= cost[m];
            }
        }
    }

    fn split_power(&mut self, structure: &Structure) {
        let k = self.params.num_users;
        let n = structure.len();
        // subchannels each user still has to serve after position sc
        let mut after = vec![vec![0usize; k]; n + 1];
        for sc in (0..n).rev() {
            after[sc] = after[sc + 1].clone();
            if let Some(c) = structure[sc] {
                after[sc][self.t.configs[c].user] += 1;
            }
        }
        let has_daf: Vec<bool> = (0..k)
            .map(|user| {
                structure.iter().flatten().any(|&c| {
                    let cfg = self.t.configs[c];
                    cfg.user == user && cfg.mode == Mode::Daf
                })
            })
            .collect();
        let mut suffix_ub = vec![0.0; n + 1];
        for sc in (0..n).rev() {
            suffix_ub[sc] =
                suffix_ub[sc + 1] + structure[sc].map_or(0.0, |c| self.t.rate[sc][c][self.t.grid]);
        }
        let mut fh: Vec<f64> = (0..self.params.num_rrhs)
            .map(|m| {
                structure
                    .iter()
                    .flatten()
                    .map(|&c| self.t.fad_cost[c][m])
                    .sum()
            })
            .collect();
        let mut units = vec![0usize; n];
        let mut remaining = vec![self.t.grid; k];
        let ctx = SplitCtx {
            structure,
            after: &after,
            has_daf: &has_daf,
            suffix_ub: &suffix_ub,
        };
        self.dfs(&ctx, 0, 0.0, &mut remaining, &mut fh, &mut units);
    }

    fn dfs(
        &mut self,
        ctx: &SplitCtx,
        sc: usize,
        rate: f64,
        remaining: &mut [usize],
        fh: &mut [f64],
        units: &mut [usize],
    ) {
        if rate + ctx.suffix_ub[sc] <= self.best {
            return;
        }
        if sc == ctx.structure.len() {
            self.best = rate;
            self.best_point = Some((ctx.structure.clone(), units.to_vec()));
            return;
        }
        let Some(c) = ctx.structure[sc] else {
            units[sc] = 0;
            return self.dfs(ctx, sc + 1, rate, remaining, fh, units);
        };
        let cfg = self.t.configs[c];
        let user = cfg.user;
        let reserve = ctx.after[sc + 1][user];
        if remaining[user] < reserve + 1 {
            return;
        }
        let max_u = remaining[user] - reserve;
        // a user without DaF subchannels gains from spending everything
        let min_u = if reserve == 0 && !ctx.has_daf[user] {
            max_u
        } else {
            1
        };
        let daf_rrh = (cfg.mode == Mode::Daf).then(|| cfg.mask.trailing_zeros() as usize);
        for u in (min_u..=max_u).rev() {
            if let Some(m) = daf_rrh {
                let used = fh[m] + self.t.daf_usage[sc][c][u];
                if !self.fits(used, m) {
                    continue;
                }
                fh[m] = used;
            }
            remaining[user] -= u;
            units[sc] = u;
            self.dfs(
                ctx,
                sc + 1,
                rate + self.t.rate[sc][c][u],
                remaining,
                fh,
                units,
            );
            remaining[user] += u;
            if let Some(m) = daf_rrh {
                fh[m] -= self.t.daf_usage[sc][c][u];
            }
        }
    }
}

struct SplitCtx<'s> {
    structure: &'s Structure,
    after: &'s [Vec<usize>],
    has_daf: &'s [bool],
    suffix_ub: &'s [f64],
}
