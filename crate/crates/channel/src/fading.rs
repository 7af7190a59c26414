use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Exponential power delay profile with `taps` taps and decay constant `tau`
/// (in taps), normalized to unit total power.
pub fn exponential_pdp(taps: usize, tau: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..taps).map(|l| (-(l as f64) / tau).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Default decay constant: the last of `taps` taps sits about `e^-3` below
/// the first.
pub fn default_tau(taps: usize) -> f64 {
    taps as f64 / 3.0
}

/// Circularly-symmetric complex Gaussian taps with variances `pdp`.
pub fn draw_taps(rng: &mut impl Rng, pdp: &[f64]) -> Vec<Complex64> {
    pdp.iter()
        .map(|&v| {
            let s = (v / 2.0).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(s * re, s * im)
        })
        .collect()
}

/// Length-`N` DFT of zero-padded tap vectors.
pub struct FrequencyResponse {
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
}

impl FrequencyResponse {
    pub fn new(n: usize) -> Self {
        Self {
            fft: FftPlanner::new().plan_fft_forward(n),
            buf: vec![Complex64::default(); n],
        }
    }

    /// `|H[n]|^2` for every subchannel.
    pub fn power(&mut self, taps: &[Complex64]) -> Vec<f64> {
        assert!(taps.len() <= self.buf.len());
        self.buf.fill(Complex64::default());
        self.buf[..taps.len()].copy_from_slice(taps);
        self.fft.process(&mut self.buf);
        self.buf.iter().map(|h| h.norm_sqr()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pdp_is_normalized_and_decays() {
        let pdp = exponential_pdp(16, default_tau(16));
        assert!((pdp.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(pdp.windows(2).all(|w| w[1] < w[0]));
        let ratio = pdp[15] / pdp[0];
        assert!((ratio.ln() + 3.0 * 15.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn single_tap_is_flat() {
        let mut fr = FrequencyResponse::new(8);
        let h = fr.power(&[Complex64::new(0.6, -0.8)]);
        assert!(h.iter().all(|&g| (g - 1.0).abs() < 1e-12));
    }

    #[test]
    fn parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let taps = draw_taps(&mut rng, &exponential_pdp(16, 5.0));
        let mut fr = FrequencyResponse::new(64);
        let mean = fr.power(&taps).iter().sum::<f64>() / 64.0;
        let energy: f64 = taps.iter().map(|t| t.norm_sqr()).sum();
        assert!((mean - energy).abs() < 1e-12);
    }
}
