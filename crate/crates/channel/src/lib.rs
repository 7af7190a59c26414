//! Random deployments and frequency-selective channel gains for uplink
//! OFDMA cloud-RAN simulation.
//!
//! Large-scale loss is `38 + 30 log10(d) + X` dB with log-normal shadowing
//! `X`; small-scale fading is Rayleigh with an exponential power delay
//! profile of `N/4` taps, turned into per-subchannel gains by a length-`N`
//! DFT. Every draw is a pure function of its seed.

mod fading;
mod topology;

use std::fs;
use std::path::Path;

use hcran_core::{ChannelGains, ModelError, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fading::{default_tau, draw_taps, exponential_pdp, FrequencyResponse};
pub use topology::{generate_topology, Point, Square, Topology, TopologyConfig};

pub(crate) const TOPOLOGY_STREAM: u64 = 0;
pub(crate) const CHANNEL_STREAM: u64 = 1;

const FILE_FORMAT: &str = "hcran-channel";
const FILE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid channel configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed channel file: {0}")]
    Format(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// ChaCha8 generator for one of the independent streams of `seed`.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed of draw `index` of an experiment seeded with `base`, so that draws
/// can be produced independently and in any order.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Radio parameters of the channel model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelConfig {
    /// Total bandwidth `B` in Hz.
    pub bandwidth: f64,
    pub num_subchannels: usize,
    pub pathloss_intercept_db: f64,
    /// dB per decade of distance.
    pub pathloss_slope_db: f64,
    pub shadowing_std_db: f64,
    /// Distance floor in meters.
    pub min_distance: f64,
    /// Tap count; `N/4` when absent.
    pub taps: Option<usize>,
    /// PDP decay constant in taps; `taps/3` when absent.
    pub pdp_tau: Option<f64>,
    pub noise_psd_dbm_hz: f64,
    pub noise_figure_db: f64,
    /// Informational only.
    pub carrier_frequency: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            bandwidth: 20e6,
            num_subchannels: 64,
            pathloss_intercept_db: 38.0,
            pathloss_slope_db: 30.0,
            shadowing_std_db: 6.0,
            min_distance: 1.0,
            taps: None,
            pdp_tau: None,
            noise_psd_dbm_hz: -174.0,
            noise_figure_db: 6.0,
            carrier_frequency: 2e9,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<(), ChannelError> {
        let bad = |msg: &str| Err(ChannelError::InvalidConfig(msg.to_string()));
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return bad("bandwidth must be positive");
        }
        if self.num_subchannels == 0 || !self.num_subchannels.is_multiple_of(4) {
            return bad("number of subchannels must be a positive multiple of 4");
        }
        if self
            .taps
            .is_some_and(|l| l == 0 || l > self.num_subchannels)
        {
            return bad("tap count must be in 1..=N");
        }
        if self.pdp_tau.is_some_and(|t| !(t.is_finite() && t > 0.0)) {
            return bad("PDP decay constant must be positive");
        }
        if !(self.shadowing_std_db.is_finite() && self.shadowing_std_db >= 0.0) {
            return bad("shadowing deviation must be nonnegative");
        }
        if !(self.min_distance.is_finite() && self.min_distance > 0.0) {
            return bad("distance floor must be positive");
        }
        Ok(())
    }

    pub fn num_taps(&self) -> usize {
        self.taps.unwrap_or(self.num_subchannels / 4)
    }

    pub fn tau(&self) -> f64 {
        self.pdp_tau.unwrap_or_else(|| default_tau(self.num_taps()))
    }

    /// Path loss plus shadowing in dB at distance `d`.
    pub fn loss_db(&self, d: f64, shadowing_db: f64) -> f64 {
        self.pathloss_intercept_db
            + self.pathloss_slope_db * d.max(self.min_distance).log10()
            + shadowing_db
    }

    /// Thermal noise plus noise figure over one subchannel, in dBm.
    pub fn noise_power_dbm(&self) -> f64 {
        self.noise_psd_dbm_hz
            + 10.0 * (self.bandwidth / self.num_subchannels as f64).log10()
            + self.noise_figure_db
    }

    pub fn noise_power_watts(&self) -> f64 {
        hcran_core::model::dbm_to_watts(self.noise_power_dbm())
    }
}

/// Channel gains of one realization together with what produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw<T> {
    pub gains: ChannelGains<T>,
    pub seed: u64,
    /// Path loss plus shadowing per (RRH, user) in dB, row-major `M x K`.
    pub loss_db: Vec<f64>,
    /// Shadowing term per (RRH, user) in dB, row-major `M x K`.
    pub shadowing_db: Vec<f64>,
}

/// Gains `10^(-loss/10) |H[n]|^2` for every RRH-user pair of `topology`.
pub fn generate_channel<T: Scalar>(
    topology: &Topology,
    config: &ChannelConfig,
    seed: u64,
) -> Result<ChannelDraw<T>, ChannelError> {
    config.validate()?;
    let (m, k, n) = (
        topology.num_rrhs(),
        topology.num_users(),
        config.num_subchannels,
    );
    let mut rng = stream_rng(seed, CHANNEL_STREAM);
    let pdp = exponential_pdp(config.num_taps(), config.tau());
    let mut response = FrequencyResponse::new(n);
    let mut data = Vec::with_capacity(m * k * n);
    let mut loss_db = Vec::with_capacity(m * k);
    let mut shadowing_db = Vec::with_capacity(m * k);
    for rrh in &topology.rrh_pos {
        for user in &topology.user_pos {
            let x: f64 = config.shadowing_std_db * rng.sample::<f64, _>(StandardNormal);
            let loss = config.loss_db(rrh.distance(*user), x);
            let scale = 10f64.powf(-loss / 10.0);
            let taps = draw_taps(&mut rng, &pdp);
            data.extend(response.power(&taps).into_iter().map(|h| T::lit(scale * h)));
            loss_db.push(loss);
            shadowing_db.push(x);
        }
    }
    Ok(ChannelDraw {
        gains: ChannelGains::new(m, k, n, data)?,
        seed,
        loss_db,
        shadowing_db,
    })
}

/// On-disk form of a draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub format: String,
    pub version: u32,
    pub num_rrhs: usize,
    pub num_users: usize,
    pub num_subchannels: usize,
    pub seed: u64,
    /// Row-major `M x K x N`.
    pub gains: Vec<f64>,
    pub loss_db: Vec<f64>,
    pub shadowing_db: Vec<f64>,
}

impl From<&ChannelDraw<f64>> for ChannelFile {
    fn from(d: &ChannelDraw<f64>) -> Self {
        let (num_rrhs, num_users, num_subchannels) = d.gains.dims();
        Self {
            format: FILE_FORMAT.to_string(),
            version: FILE_VERSION,
            num_rrhs,
            num_users,
            num_subchannels,
            seed: d.seed,
            gains: d.gains.as_slice().to_vec(),
            loss_db: d.loss_db.clone(),
            shadowing_db: d.shadowing_db.clone(),
        }
    }
}

impl TryFrom<ChannelFile> for ChannelDraw<f64> {
    type Error = ChannelError;

    fn try_from(f: ChannelFile) -> Result<Self, ChannelError> {
        if f.format != FILE_FORMAT || f.version != FILE_VERSION {
            return Err(ChannelError::Format(format!(
                "unsupported format {} v{}",
                f.format, f.version
            )));
        }
        let pairs = f.num_rrhs * f.num_users;
        if f.loss_db.len() != pairs || f.shadowing_db.len() != pairs {
            return Err(ChannelError::Format(format!(
                "expected {pairs} per-pair loss entries"
            )));
        }
        Ok(Self {
            gains: ChannelGains::new(f.num_rrhs, f.num_users, f.num_subchannels, f.gains)?,
            seed: f.seed,
            loss_db: f.loss_db,
            shadowing_db: f.shadowing_db,
        })
    }
}

impl ChannelDraw<f64> {
    pub fn to_json(&self) -> Result<String, ChannelError> {
        Ok(serde_json::to_string(&ChannelFile::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self, ChannelError> {
        serde_json::from_str::<ChannelFile>(s)?.try_into()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ChannelError> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ChannelError> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}
