use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::rng::Rng;

/// One realization of the channel seen by a frame.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelConfig {
    /// `None` disables AWGN.
    pub snr_db: Option<f64>,
    pub phase_offset: f64,
    /// Carrier frequency offset in cycles per sample.
    pub cfo: f64,
    pub sro_ppm: f64,
    pub multipath: Option<Vec<Complex64>>,
}

impl ChannelConfig {
    pub fn identity() -> Self {
        ChannelConfig {
            snr_db: None,
            phase_offset: 0.0,
            cfo: 0.0,
            sro_ppm: 0.0,
            multipath: None,
        }
    }

    pub fn awgn_only(snr_db: f64) -> Self {
        ChannelConfig {
            snr_db: Some(snr_db),
            ..Self::identity()
        }
    }
}

/// Ranges from which per-frame channel realizations are drawn.
#[derive(Clone, Debug, PartialEq)]
pub struct ImpairmentRanges {
    pub random_phase: bool,
    pub max_cfo: f64,
    pub max_sro_ppm: f64,
    pub multipath: bool,
}

impl Default for ImpairmentRanges {
    fn default() -> Self {
        ImpairmentRanges {
            random_phase: true,
            max_cfo: 1e-3,
            max_sro_ppm: 50.0,
            multipath: false,
        }
    }
}

impl ImpairmentRanges {
    pub fn none() -> Self {
        ImpairmentRanges {
            random_phase: false,
            max_cfo: 0.0,
            max_sro_ppm: 0.0,
            multipath: false,
        }
    }

    pub fn draw(&self, snr_db: Option<f64>, rng: &mut Rng) -> ChannelConfig {
        let sym = |rng: &mut Rng, max: f64| {
            if max > 0.0 {
                rng.random_range(-max..=max)
            } else {
                0.0
            }
        };
        let phase_offset = if self.random_phase {
            // (-pi, pi]
            PI - rng.random_range(0.0..2.0 * PI)
        } else {
            0.0
        };
        let cfo = sym(rng, self.max_cfo);
        let sro_ppm = sym(rng, self.max_sro_ppm);
        let multipath = self.multipath.then(|| {
            let mut taps = vec![Complex64::new(1.0, 0.0)];
            for k in 1..3 {
                let scale = 0.3 / k as f64;
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                taps.push(Complex64::new(re, im) * scale * std::f64::consts::FRAC_1_SQRT_2);
            }
            let e = taps.iter().map(|t| t.norm_sqr()).sum::<f64>().sqrt();
            taps.into_iter().map(|t| t / e).collect()
        });
        ChannelConfig {
            snr_db,
            phase_offset,
            cfo,
            sro_ppm,
            multipath,
        }
    }
}

/// Everything except the additive noise, in order: multipath, phase
/// rotation, CFO, sample-rate offset.
pub fn propagate(x: &[Complex64], ch: &ChannelConfig) -> Vec<Complex64> {
    let mut y: Vec<Complex64> = match &ch.multipath {
        Some(taps) => (0..x.len())
            .map(|n| {
                taps.iter()
                    .enumerate()
                    .filter(|(k, _)| *k <= n)
                    .map(|(k, t)| x[n - k] * t)
                    .sum()
            })
            .collect(),
        None => x.to_vec(),
    };
    if ch.phase_offset != 0.0 || ch.cfo != 0.0 {
        for (n, s) in y.iter_mut().enumerate() {
            *s *= Complex64::from_polar(1.0, ch.phase_offset + 2.0 * PI * ch.cfo * n as f64);
        }
    }
    if ch.sro_ppm != 0.0 {
        let ratio = 1.0 + ch.sro_ppm * 1e-6;
        let last = y.len() - 1;
        y = (0..y.len())
            .map(|n| {
                let pos = (n as f64 * ratio).min(last as f64);
                let i0 = pos.floor() as usize;
                let frac = pos - i0 as f64;
                if i0 >= last {
                    y[last]
                } else {
                    y[i0] * (1.0 - frac) + y[i0 + 1] * frac
                }
            })
            .collect();
    }
    y
}

/// Adds complex white Gaussian noise with total variance
/// `P_signal * 10^(-snr/10)`, split equally between I and Q.
pub fn add_awgn(x: &mut [Complex64], snr_db: f64, rng: &mut Rng) {
    let p_signal = x.iter().map(|s| s.norm_sqr()).sum::<f64>() / x.len() as f64;
    let sigma = (p_signal * 10f64.powf(-snr_db / 10.0) / 2.0).sqrt();
    for s in x.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *s += Complex64::new(re, im) * sigma;
    }
}

pub fn impair(x: &[Complex64], ch: &ChannelConfig, rng: &mut Rng) -> Vec<Complex64> {
    let mut y = propagate(x, ch);
    if let Some(snr) = ch.snr_db {
        add_awgn(&mut y, snr, rng);
    }
    y
}
