#![allow(dead_code)]

use hcran_core::{ChannelGains, SystemParams};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random small instance with O(1) gains and noise; capacities and budgets
/// drawn so that both constraint families bind now and then.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    m: usize,
    k: usize,
    n: usize,
) -> (SystemParams<f64>, ChannelGains<f64>) {
    let bandwidth = n as f64 * rng.gen_range(0.5..2.0);
    let beta = rng.gen_range(1..6);
    let sc_bw = bandwidth / n as f64;
    // between a fraction of one quantized SC and a few of them
    let rbar = 2.0 * sc_bw * beta as f64 * rng.gen_range(0.3..3.0);
    let pbar = rng.gen_range(0.5..5.0);
    let mut params = SystemParams::uniform(m, k, n, bandwidth, beta, rbar, pbar, 1.0).unwrap();
    params.weights = (0..k).map(|_| rng.gen_range(0.5..1.5)).collect();
    params.noise_power = (0..m).map(|_| rng.gen_range(0.5..2.0)).collect();
    params.quantizer_bits = (0..m).map(|_| rng.gen_range(1..6)).collect();
    let ch = ChannelGains::from_fn(m, k, n, |_, _, _| {
        // exponential fading times a random large-scale factor
        let fading: f64 = -rng.gen_range(1e-6f64..1.0).ln();
        fading * rng.gen_range(0.1..10.0)
    })
    .unwrap();
    (params, ch)
}

pub fn random_dual(rng: &mut ChaCha8Rng, params: &SystemParams<f64>) -> hcran_core::DualPoint<f64> {
    let sc_bw = params.sc_bandwidth();
    hcran_core::DualPoint {
        lambda: params
            .fronthaul_capacity
            .iter()
            .map(|&r| {
                if rng.gen_bool(0.2) {
                    0.0
                } else {
                    rng.gen_range(0.0..2.0) * r
                }
            })
            .collect(),
        mu: params
            .power_budget
            .iter()
            .map(|&p| rng.gen_range(0.01..3.0) * sc_bw / (p * std::f64::consts::LN_2))
            .collect(),
    }
}
