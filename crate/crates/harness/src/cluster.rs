use hcran_channel::Topology;
use hcran_core::{ChannelGains, SolveOptions, SystemParams};
use serde::{Deserialize, Serialize};

use crate::scheme::{run_scheme, Scheme, SchemeRun};
use crate::HarnessError;

/// Restriction of a problem to a subset of RRHs and users. Subchannels are
/// shared by every cluster.
pub fn sub_problem(
    params: &SystemParams<f64>,
    channel: &ChannelGains<f64>,
    rrhs: &[usize],
    users: &[usize],
) -> Result<(SystemParams<f64>, ChannelGains<f64>), HarnessError> {
    let pick = |v: &[f64], idx: &[usize]| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
    let sub = SystemParams {
        num_rrhs: rrhs.len(),
        num_users: users.len(),
        num_subchannels: params.num_subchannels,
        bandwidth: params.bandwidth,
        quantizer_bits: rrhs.iter().map(|&m| params.quantizer_bits[m]).collect(),
        fronthaul_capacity: pick(&params.fronthaul_capacity, rrhs),
        power_budget: pick(&params.power_budget, users),
        weights: pick(&params.weights, users),
        noise_power: pick(&params.noise_power, rrhs),
    };
    sub.validate()?;
    let ch = ChannelGains::from_fn(
        rrhs.len(),
        users.len(),
        params.num_subchannels,
        |m, k, n| channel.get(rrhs[m], users[k], n),
    )?;
    Ok((sub, ch))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterRun {
    pub cluster: usize,
    /// Global indices; the cluster's allocation uses positions in these lists.
    pub rrhs: Vec<usize>,
    pub users: Vec<usize>,
    pub run: SchemeRun,
}

/// Per-cluster results and their sums.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusteredRun {
    pub scheme: Scheme,
    pub clusters: Vec<ClusterRun>,
    pub rate: f64,
    pub dual_value: f64,
    pub time_s: f64,
}

impl ClusteredRun {
    pub fn as_dual_bound(&self) -> ClusteredRun {
        ClusteredRun {
            scheme: Scheme::DualBound,
            clusters: self
                .clusters
                .iter()
                .map(|c| ClusterRun {
                    run: c.run.as_dual_bound(),
                    ..c.clone()
                })
                .collect(),
            rate: self.dual_value,
            ..self.clone()
        }
    }
}

/// Solves every cluster of `topology` on its own and sums the results.
/// Clusters without users or without RRHs contribute nothing.
pub fn cluster_and_solve(
    topology: &Topology,
    channel: &ChannelGains<f64>,
    params: &SystemParams<f64>,
    scheme: Scheme,
    opts: &SolveOptions<f64>,
) -> Result<ClusteredRun, HarnessError> {
    let mut clusters = Vec::new();
    for c in 0..topology.num_clusters {
        let rrhs = topology.rrhs_in(c);
        let users = topology.users_in(c);
        if rrhs.is_empty() || users.is_empty() {
            continue;
        }
        let (sub, ch) = sub_problem(params, channel, &rrhs, &users)?;
        let run = run_scheme(scheme, &ch, &sub, opts)?;
        log::debug!(
            "cluster {c}: {} RRHs, {} users, {scheme} {:.4e}",
            rrhs.len(),
            users.len(),
            run.rate
        );
        clusters.push(ClusterRun {
            cluster: c,
            rrhs,
            users,
            run,
        });
    }
    Ok(ClusteredRun {
        scheme,
        rate: clusters.iter().map(|c| c.run.rate).sum(),
        dual_value: clusters.iter().map(|c| c.run.dual_value).sum(),
        time_s: clusters.iter().map(|c| c.run.time_s).sum(),
        clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use hcran_channel::{generate_channel, generate_topology, ChannelConfig, TopologyConfig};

    fn clustered(users: usize) -> (Topology, ChannelGains<f64>, SystemParams<f64>) {
        let cfg = TopologyConfig::Clustered {
            clusters_x: 2,
            clusters_y: 1,
            cluster_side: 400.0,
            rrh_offset: 100.0,
            users,
        };
        let topo = generate_topology(&cfg, 4).unwrap();
        let ch_cfg = ChannelConfig {
            num_subchannels: 8,
            bandwidth: 2.5e6,
            ..ChannelConfig::default()
        };
        let draw = generate_channel::<f64>(&topo, &ch_cfg, 4).unwrap();
        let params = SystemParams::uniform(
            10,
            users,
            8,
            2.5e6,
            10,
            31.25e6,
            0.025,
            ch_cfg.noise_power_watts(),
        )
        .unwrap();
        (topo, draw.gains, params)
    }

    #[test]
    fn total_is_sum_of_clusters() {
        let (topo, ch, params) = clustered(4);
        let run = cluster_and_solve(
            &topo,
            &ch,
            &params,
            Scheme::AllDaf,
            &SolveOptions::default(),
        )
        .unwrap();
        let sum: f64 = run.clusters.iter().map(|c| c.run.rate).sum();
        assert_eq!(run.rate, sum);
        for c in &run.clusters {
            assert_eq!(c.rrhs.len(), 5);
            assert!(c
                .users
                .iter()
                .all(|&k| topo.cluster_of_user[k] == c.cluster));
        }
    }

    #[test]
    fn single_cluster_equals_direct_solve() {
        let topo = generate_topology(&TopologyConfig::small(), 8).unwrap();
        let ch_cfg = ChannelConfig {
            num_subchannels: 8,
            bandwidth: 2.5e6,
            ..ChannelConfig::default()
        };
        let ch = generate_channel::<f64>(&topo, &ch_cfg, 8).unwrap().gains;
        let params = SystemParams::uniform(
            5,
            3,
            8,
            2.5e6,
            10,
            31.25e6,
            0.025,
            ch_cfg.noise_power_watts(),
        )
        .unwrap();
        let opts = SolveOptions::default();
        let a = cluster_and_solve(&topo, &ch, &params, Scheme::HybridGreedy, &opts).unwrap();
        let b = run_scheme(Scheme::HybridGreedy, &ch, &params, &opts).unwrap();
        assert_eq!(a.rate, b.rate);
        assert_eq!(a.dual_value, b.dual_value);
    }

    #[test]
    fn sub_problem_picks_entries() {
        let (_, ch, params) = clustered(3);
        let (sub, sch) = sub_problem(&params, &ch, &[7, 2], &[1]).unwrap();
        assert_eq!(sub.num_rrhs, 2);
        assert_eq!(sch.get(0, 0, 5), ch.get(7, 1, 5));
        assert_eq!(sch.get(1, 0, 3), ch.get(2, 1, 3));
    }
}
