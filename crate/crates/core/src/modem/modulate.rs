//! Clean baseband synthesis for every modulation class.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::StandardNormal;

use super::ModClass;
use crate::rng::Rng;

pub const SAMPLES_PER_SYMBOL: usize = 8;
pub const RRC_ROLLOFF: f64 = 0.35;
pub const RRC_SPAN_SYMBOLS: usize = 8;
pub const CPFSK_INDEX: f64 = 0.5;
pub const GFSK_INDEX: f64 = 0.5;
pub const GFSK_BT: f64 = 0.3;
const GFSK_SPAN_SYMBOLS: usize = 4;
pub const AM_DSB_DEPTH: f64 = 0.5;
/// Peak WBFM frequency deviation in cycles per sample.
pub const WBFM_DEVIATION: f64 = 0.08;

/// Root-raised-cosine taps, `span * sps + 1` long, unit energy.
pub fn rrc_taps(rolloff: f64, sps: usize, span: usize) -> Vec<f64> {
    let n = span * sps + 1;
    let mid = (n / 2) as f64;
    let b = rolloff;
    let mut taps: Vec<f64> = (0..n)
        .map(|k| {
            let t = (k as f64 - mid) / sps as f64;
            if t == 0.0 {
                1.0 - b + 4.0 * b / PI
            } else if b > 0.0 && ((4.0 * b * t).abs() - 1.0).abs() < 1e-12 {
                b / 2f64.sqrt()
                    * ((1.0 + 2.0 / PI) * (PI / (4.0 * b)).sin()
                        + (1.0 - 2.0 / PI) * (PI / (4.0 * b)).cos())
            } else {
                ((PI * t * (1.0 - b)).sin() + 4.0 * b * t * (PI * t * (1.0 + b)).cos())
                    / (PI * t * (1.0 - (4.0 * b * t).powi(2)))
            }
        })
        .collect();
    let energy = taps.iter().map(|x| x * x).sum::<f64>().sqrt();
    taps.iter_mut().for_each(|x| *x /= energy);
    taps
}

/// Gaussian frequency-pulse filter with unit DC gain.
fn gaussian_taps(bt: f64, sps: usize, span: usize) -> Vec<f64> {
    let n = span * sps + 1;
    let mid = (n / 2) as f64;
    // standard deviation in symbol periods
    let sigma = (2f64.ln()).sqrt() / (2.0 * PI * bt);
    let mut taps: Vec<f64> = (0..n)
        .map(|k| {
            let t = (k as f64 - mid) / sps as f64;
            (-t * t / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|x| *x /= sum);
    taps
}

/// Odd-length Hamming-windowed Hilbert transformer.
fn hilbert_taps(len: usize) -> Vec<f64> {
    let mid = (len / 2) as isize;
    (0..len)
        .map(|k| {
            let m = k as isize - mid;
            if m % 2 == 0 {
                0.0
            } else {
                let w = 0.54 - 0.46 * (2.0 * PI * k as f64 / (len - 1) as f64).cos();
                2.0 / (PI * m as f64) * w
            }
        })
        .collect()
}

fn lowpass_taps(cutoff: f64, len: usize) -> Vec<f64> {
    let mid = (len / 2) as f64;
    let mut taps: Vec<f64> = (0..len)
        .map(|k| {
            let m = k as f64 - mid;
            let sinc = if m == 0.0 {
                2.0 * cutoff
            } else {
                (2.0 * PI * cutoff * m).sin() / (PI * m)
            };
            sinc * (0.54 - 0.46 * (2.0 * PI * k as f64 / (len - 1) as f64).cos())
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|x| *x /= sum);
    taps
}

/// Full linear convolution of a complex signal with real taps.
pub fn convolve(x: &[Complex64], taps: &[f64]) -> Vec<Complex64> {
    let mut y = vec![Complex64::new(0.0, 0.0); x.len() + taps.len() - 1];
    for (i, &xv) in x.iter().enumerate() {
        if xv == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (j, &h) in taps.iter().enumerate() {
            y[i + j] += xv * h;
        }
    }
    y
}

fn convolve_real(x: &[f64], taps: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; x.len() + taps.len() - 1];
    for (i, &xv) in x.iter().enumerate() {
        for (j, &h) in taps.iter().enumerate() {
            y[i + j] += xv * h;
        }
    }
    y
}

/// Unit-average-power constellation of a linearly modulated class.
pub fn constellation(class: ModClass) -> Option<Vec<Complex64>> {
    let c = |i: f64, q: f64| Complex64::new(i, q);
    let square_qam = |m: i32| {
        let levels: Vec<f64> = (0..m).map(|k| (2 * k - m + 1) as f64).collect();
        let norm = (2.0 * (m * m - 1) as f64 / 3.0).sqrt();
        levels
            .iter()
            .flat_map(|&i| {
                levels
                    .iter()
                    .map(move |&q| Complex64::new(i / norm, q / norm))
            })
            .collect::<Vec<_>>()
    };
    Some(match class {
        ModClass::Bpsk => vec![c(1.0, 0.0), c(-1.0, 0.0)],
        ModClass::Qpsk => (0..4)
            .map(|k| Complex64::from_polar(1.0, PI / 4.0 + k as f64 * PI / 2.0))
            .collect(),
        ModClass::Psk8 => (0..8)
            .map(|k| Complex64::from_polar(1.0, k as f64 * PI / 4.0))
            .collect(),
        ModClass::Pam4 => [-3.0, -1.0, 1.0, 3.0]
            .iter()
            .map(|&a| c(a / 5f64.sqrt(), 0.0))
            .collect(),
        ModClass::Qam16 => square_qam(4),
        ModClass::Qam64 => square_qam(8),
        _ => return None,
    })
}

/// Symbols of a linearly modulated frame and where their pulse peaks land
/// in the frame: symbol `j` peaks at sample `first_peak + j * sps`.
#[derive(Clone, Debug)]
pub struct SymbolTrace {
    pub symbols: Vec<Complex64>,
    pub first_peak: isize,
}

pub(crate) struct Synth {
    pub samples: Vec<Complex64>,
    pub trace: Option<SymbolTrace>,
}

fn window(buf: &[Complex64], start: usize, len: usize) -> Vec<Complex64> {
    buf[start..start + len].to_vec()
}

fn linear(points: &[Complex64], seq_len: usize, rng: &mut Rng) -> Synth {
    let sps = SAMPLES_PER_SYMBOL;
    let taps = rrc_taps(RRC_ROLLOFF, sps, RRC_SPAN_SYMBOLS);
    let delay = taps.len() / 2;
    let n_sym = seq_len / sps + 2 * RRC_SPAN_SYMBOLS + 2;
    let symbols: Vec<Complex64> = (0..n_sym)
        .map(|_| points[rng.random_range(0..points.len())])
        .collect();
    let mut up = vec![Complex64::new(0.0, 0.0); n_sym * sps];
    for (j, &s) in symbols.iter().enumerate() {
        up[j * sps] = s;
    }
    let shaped = convolve(&up, &taps);
    let start = taps.len() - 1 + rng.random_range(0..sps);
    Synth {
        samples: window(&shaped, start, seq_len),
        trace: Some(SymbolTrace {
            symbols,
            first_peak: delay as isize - start as isize,
        }),
    }
}

fn random_bits(n: usize, rng: &mut Rng) -> Vec<f64> {
    (0..n)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

fn phase_to_signal(phase: &[f64]) -> Vec<Complex64> {
    phase
        .iter()
        .map(|&p| Complex64::from_polar(1.0, p))
        .collect()
}

fn cpfsk(seq_len: usize, rng: &mut Rng) -> Synth {
    let sps = SAMPLES_PER_SYMBOL;
    let n_sym = seq_len / sps + 2;
    let bits = random_bits(n_sym, rng);
    let mut phase = Vec::with_capacity(n_sym * sps);
    let mut acc = rng.random_range(-PI..PI);
    for &b in &bits {
        for _ in 0..sps {
            acc += PI * CPFSK_INDEX * b / sps as f64;
            phase.push(acc);
        }
    }
    let start = rng.random_range(0..sps);
    Synth {
        samples: window(&phase_to_signal(&phase), start, seq_len),
        trace: None,
    }
}

fn gfsk(seq_len: usize, rng: &mut Rng) -> Synth {
    let sps = SAMPLES_PER_SYMBOL;
    let g = gaussian_taps(GFSK_BT, sps, GFSK_SPAN_SYMBOLS);
    let n_sym = seq_len / sps + 2 * GFSK_SPAN_SYMBOLS + 2;
    let nrz: Vec<f64> = random_bits(n_sym, rng)
        .into_iter()
        .flat_map(|b| std::iter::repeat_n(b, sps))
        .collect();
    let freq = convolve_real(&nrz, &g);
    let mut acc = rng.random_range(-PI..PI);
    let phase: Vec<f64> = freq
        .iter()
        .map(|&f| {
            acc += PI * GFSK_INDEX * f / sps as f64;
            acc
        })
        .collect();
    let start = g.len() - 1 + rng.random_range(0..sps);
    Synth {
        samples: window(&phase_to_signal(&phase), start, seq_len),
        trace: None,
    }
}

/// Band-limited message: three random sinusoids plus low-pass noise,
/// scaled to peak magnitude 1.
fn analog_source(len: usize, rng: &mut Rng) -> Vec<f64> {
    let tones: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(0.5..1.0),
                rng.random_range(0.002..0.03),
                rng.random_range(-PI..PI),
            )
        })
        .collect();
    let lp = lowpass_taps(0.03, 31);
    let white: Vec<f64> = (0..len + lp.len() - 1)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let noise = convolve_real(&white, &lp);
    let offset = lp.len() - 1;
    let mut m: Vec<f64> = (0..len)
        .map(|n| {
            let t = n as f64;
            tones
                .iter()
                .map(|&(a, f, p)| a * (2.0 * PI * f * t + p).cos())
                .sum::<f64>()
                + 0.3 * noise[offset + n]
        })
        .collect();
    let peak = m.iter().fold(0.0f64, |acc, x| acc.max(x.abs())).max(1e-12);
    m.iter_mut().for_each(|x| *x /= peak);
    m
}

fn am_dsb(seq_len: usize, rng: &mut Rng) -> Synth {
    let m = analog_source(seq_len, rng);
    Synth {
        samples: m
            .iter()
            .map(|&x| Complex64::new(1.0 + AM_DSB_DEPTH * x, 0.0))
            .collect(),
        trace: None,
    }
}

fn am_ssb(seq_len: usize, rng: &mut Rng) -> Synth {
    let h = hilbert_taps(31);
    let guard = h.len() - 1;
    let m = analog_source(seq_len + 2 * guard, rng);
    let hm = convolve_real(&m, &h);
    let delay = h.len() / 2;
    let start = guard;
    Synth {
        samples: (start..start + seq_len)
            .map(|n| Complex64::new(m[n], hm[n + delay]))
            .collect(),
        trace: None,
    }
}

fn wbfm(seq_len: usize, rng: &mut Rng) -> Synth {
    let m = analog_source(seq_len, rng);
    let mut acc = rng.random_range(-PI..PI);
    let phase: Vec<f64> = m
        .iter()
        .map(|&x| {
            acc += 2.0 * PI * WBFM_DEVIATION * x;
            acc
        })
        .collect();
    Synth {
        samples: phase_to_signal(&phase),
        trace: None,
    }
}

pub(crate) fn normalize_power(x: &mut [Complex64]) {
    let p = x.iter().map(|s| s.norm_sqr()).sum::<f64>() / x.len() as f64;
    if p > 0.0 {
        let g = 1.0 / p.sqrt();
        x.iter_mut().for_each(|s| *s *= g);
    }
}

pub(crate) fn synthesize(class: ModClass, seq_len: usize, rng: &mut Rng) -> Synth {
    let mut out = match class {
        ModClass::Cpfsk => cpfsk(seq_len, rng),
        ModClass::Gfsk => gfsk(seq_len, rng),
        ModClass::AmDsb => am_dsb(seq_len, rng),
        ModClass::AmSsb => am_ssb(seq_len, rng),
        ModClass::Wbfm => wbfm(seq_len, rng),
        linear_class => linear(&constellation(linear_class).unwrap(), seq_len, rng),
    };
    normalize_power(&mut out.samples);
    out
}

/// Hard-decision nearest point.
pub fn nearest(points: &[Complex64], z: Complex64) -> usize {
    points
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - z).norm_sqr().total_cmp(&(b.1 - z).norm_sqr()))
        .map(|(i, _)| i)
        .unwrap()
}
