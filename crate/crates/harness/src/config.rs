use std::path::{Path, PathBuf};

use hcran_channel::{ChannelConfig, TopologyConfig};
use hcran_core::model::dbm_to_watts;
use hcran_core::SystemParams;
use serde::{Deserialize, Serialize};

use crate::scheme::Scheme;
use crate::HarnessError;

/// Largest cluster on which `hybrid_optimal` (2^M subsets per user and
/// subchannel) is accepted.
pub const MAX_EXHAUSTIVE_CLUSTER_RRHS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Small,
    Large,
    Custom(TopologyConfig),
}

impl Preset {
    pub fn topology(&self) -> TopologyConfig {
        match self {
            Preset::Small => TopologyConfig::small(),
            Preset::Large => TopologyConfig::large(),
            Preset::Custom(t) => t.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    Beta,
    PbarDbm,
    RbarMbps,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::Beta => "beta",
            SweepVar::PbarDbm => "pbar_dbm",
            SweepVar::RbarMbps => "rbar_mbps",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub variable: SweepVar,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    /// Path prefix; `.csv`, `.json` and `_plot.csv` are appended.
    pub path: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv, OutputFormat::Json]
}

/// One experiment: a deployment, radio parameters, an optional sweep and the
/// schemes to compare. Powers are in dBm and rates in Mbps here and
/// converted to SI units when the solver inputs are built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub channel: ChannelConfig,
    pub beta: u32,
    pub rbar_mbps: f64,
    pub pbar_dbm: f64,
    pub sweep: Option<Sweep>,
    pub schemes: Vec<Scheme>,
    pub draws: usize,
    pub seed: u64,
    /// Relative stopping tolerance of the ellipsoid method.
    pub tolerance: f64,
    /// Fail the sweep when a hybrid_optimal row falls below all_fad or
    /// all_daf by more than 1e-6 relative.
    pub check_dominance: bool,
    pub output: Option<OutputConfig>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            preset: Preset::Small,
            channel: ChannelConfig::default(),
            beta: 10,
            rbar_mbps: 250.0,
            pbar_dbm: 23.0,
            sweep: None,
            schemes: Scheme::ALL.to_vec(),
            draws: 10,
            seed: 0,
            tolerance: 1e-4,
            check_dominance: true,
            output: None,
        }
    }
}

/// Operating point after applying one sweep value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub beta: u32,
    pub rbar_mbps: f64,
    pub pbar_dbm: f64,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::InvalidConfig(msg));
        self.preset.topology().validate()?;
        self.channel.validate()?;
        if self.draws == 0 {
            return bad("draws must be at least 1".into());
        }
        if self.schemes.is_empty() {
            return bad("scheme list is empty".into());
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return bad("tolerance must lie in (0, 1)".into());
        }
        for p in self.points() {
            if !(1..=60).contains(&p.beta) {
                return bad(format!("beta {} outside 1..=60", p.beta));
            }
            if !(p.rbar_mbps.is_finite() && p.rbar_mbps > 0.0) {
                return bad(format!(
                    "fronthaul capacity {} Mbps must be positive",
                    p.rbar_mbps
                ));
            }
            if !p.pbar_dbm.is_finite() {
                return bad("power budget must be finite".into());
            }
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return bad("sweep value list is empty".into());
            }
            if s.values.windows(2).any(|w| !(w[0] < w[1])) {
                return bad("sweep values must be strictly increasing".into());
            }
            if s.variable == SweepVar::Beta && s.values.iter().any(|v| v.fract() != 0.0) {
                return bad("beta values must be integers".into());
            }
        }
        let largest = largest_cluster(&self.preset.topology());
        if self.schemes.contains(&Scheme::HybridOptimal) && largest > MAX_EXHAUSTIVE_CLUSTER_RRHS {
            return Err(HarnessError::SchemeMismatch(format!(
                "hybrid_optimal needs clusters of at most {MAX_EXHAUSTIVE_CLUSTER_RRHS} RRHs, this preset has {largest}"
            )));
        }
        Ok(())
    }

    /// Sweep values, or the single point 0 under the name "none".
    pub fn sweep_values(&self) -> Vec<f64> {
        match &self.sweep {
            Some(s) => s.values.clone(),
            None => vec![0.0],
        }
    }

    pub fn sweep_var_name(&self) -> &'static str {
        self.sweep.as_ref().map_or("none", |s| s.variable.name())
    }

    pub fn point(&self, value: f64) -> OperatingPoint {
        let mut p = OperatingPoint {
            beta: self.beta,
            rbar_mbps: self.rbar_mbps,
            pbar_dbm: self.pbar_dbm,
        };
        if let Some(s) = &self.sweep {
            match s.variable {
                SweepVar::Beta => p.beta = value as u32,
                SweepVar::PbarDbm => p.pbar_dbm = value,
                SweepVar::RbarMbps => p.rbar_mbps = value,
            }
        }
        p
    }

    fn points(&self) -> Vec<OperatingPoint> {
        self.sweep_values()
            .into_iter()
            .map(|v| self.point(v))
            .collect()
    }

    /// Solver parameters for `num_rrhs` RRHs and `num_users` users at an
    /// operating point; all weights are one.
    pub fn system_params(
        &self,
        point: OperatingPoint,
        num_rrhs: usize,
        num_users: usize,
    ) -> Result<SystemParams<f64>, HarnessError> {
        Ok(SystemParams::uniform(
            num_rrhs,
            num_users,
            self.channel.num_subchannels,
            self.channel.bandwidth,
            point.beta,
            point.rbar_mbps * 1e6,
            dbm_to_watts(point.pbar_dbm),
            self.channel.noise_power_watts(),
        )?)
    }
}

fn largest_cluster(t: &TopologyConfig) -> usize {
    match t {
        TopologyConfig::Clustered { .. } => 5,
        other => other.num_rrhs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_setup() {
        let c = ExperimentConfig::default();
        assert_eq!(c.channel.bandwidth, 20e6);
        assert_eq!(c.channel.num_subchannels, 64);
        assert_eq!((c.beta, c.rbar_mbps, c.pbar_dbm), (10, 250.0, 23.0));
        let p = c.system_params(c.point(0.0), 5, 3).unwrap();
        assert!((p.power_budget[0] - 0.19953).abs() < 1e-5);
        assert_eq!(p.fronthaul_capacity[0], 250e6);
        assert!(p.weights.iter().all(|&w| w == 1.0));
        c.validate().unwrap();
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c = ExperimentConfig::from_json(
            r#"{"preset": "large", "sweep": {"variable": "rbar_mbps", "values": [50, 100]}, "draws": 2}"#,
        )
        .unwrap();
        assert_eq!(c.preset, Preset::Large);
        assert_eq!(c.point(100.0).rbar_mbps, 100.0);
        assert_eq!(c.point(100.0).beta, 10);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = ExperimentConfig::default();
        c.schemes.clear();
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.sweep = Some(Sweep {
            variable: SweepVar::Beta,
            values: vec![4.0, 2.0],
        });
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.draws = 0;
        assert!(c.validate().is_err());
        let c = ExperimentConfig {
            preset: Preset::Custom(TopologyConfig::Custom {
                rrhs: (0..20)
                    .map(|i| hcran_channel::Point::new(i as f64, 0.0))
                    .collect(),
                user_region: hcran_channel::Square {
                    center: hcran_channel::Point::new(0.0, 0.0),
                    side: 100.0,
                },
                users: 2,
            }),
            ..ExperimentConfig::default()
        };
        assert!(matches!(c.validate(), Err(HarnessError::SchemeMismatch(_))));
    }
}
