#![allow(dead_code)]

use hcran_channel::{
    generate_channel, generate_topology, ChannelConfig, Point, Square, TopologyConfig,
};
use hcran_core::model::dbm_to_watts;
use hcran_core::{ChannelGains, SystemParams};

/// Three RRHs on the diagonal of the small layout, two users in the 750 m
/// square, and every 16th subchannel of a reference 64-subchannel draw, so
/// the four subchannels keep the reference width, noise and frequency
/// selectivity. Capacity and budget are the reference values scaled by
/// 4/64; the fronthaul carries 2.5 quantized subchannels.
pub fn tiny_instance(seed: u64) -> (SystemParams<f64>, ChannelGains<f64>) {
    let topo_cfg = TopologyConfig::Custom {
        rrhs: vec![
            Point::new(0.0, 0.0),
            Point::new(-187.5, -187.5),
            Point::new(187.5, 187.5),
        ],
        user_region: Square {
            center: Point::new(0.0, 0.0),
            side: 750.0,
        },
        users: 2,
    };
    let ch_cfg = ChannelConfig::default();
    let topo = generate_topology(&topo_cfg, seed).unwrap();
    let full = generate_channel::<f64>(&topo, &ch_cfg, seed).unwrap().gains;
    let ch = ChannelGains::from_fn(3, 2, 4, |m, k, n| full.get(m, k, 16 * n)).unwrap();
    let params = SystemParams::uniform(
        3,
        2,
        4,
        1.25e6,
        10,
        15.625e6,
        dbm_to_watts(23.0) * 4.0 / 64.0,
        ch_cfg.noise_power_watts(),
    )
    .unwrap();
    (params, ch)
}
