//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use radaug::experiments::feature_table;
use radaug::modem::{generate_dataset, synthesize_frame, GenConfig, ModClass};
use radaug::nn::{AdamState, DropoutMasks, Example, Network, Shape, Tensor};
use radaug::rng::substream;
use radaug::signal::Dataset;
use rand::Rng as _;

/// Root-raised-cosine impulse response, closed form, `span` symbols long.
pub fn rrc(beta: f64, sps: usize, span: usize) -> Vec<f64> {
    let half = (span * sps / 2) as isize;
    (-half..=half)
        .map(|n| {
            let t = n as f64 / sps as f64;
            if n == 0 {
                1.0 - beta + 4.0 * beta / PI
            } else if (4.0 * beta * t).abs() == 1.0 {
                beta / 2f64.sqrt()
                    * ((1.0 + 2.0 / PI) * (PI / (4.0 * beta)).sin()
                        + (1.0 - 2.0 / PI) * (PI / (4.0 * beta)).cos())
            } else {
                ((PI * t * (1.0 - beta)).sin() + 4.0 * beta * t * (PI * t * (1.0 + beta)).cos())
                    / (PI * t * (1.0 - (4.0 * beta * t).powi(2)))
            }
        })
        .collect()
}

/// Measured SNR in dB of every frame of one stratum: faded-signal power over
/// the power of what the noise stage added.
pub fn measured_snr_db(cfg: &GenConfig, class: ModClass, snr_db: i32, frames: usize) -> Vec<f64> {
    (0..frames)
        .map(|i| {
            let r = synthesize_frame(cfg, class, snr_db, i);
            let ps: f64 = r.faded.iter().map(|s| s.norm_sqr()).sum();
            let pn: f64 = r
                .received
                .iter()
                .zip(&r.faded)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum();
            10.0 * (ps / pn).log10()
        })
        .collect()
}

/// Coherent BPSK receiver that knows the carrier phase and frequency offset:
/// de-rotate, matched filter, sample at the pulse peaks, decide by sign.
/// Only symbols whose whole matched-filter window lies inside the frame are
/// scored. Returns (correct, total).
pub fn bpsk_oracle(cfg: &GenConfig, snr_db: i32, frames: usize) -> (usize, usize) {
    let h = rrc(0.35, 8, 8);
    let half = (h.len() / 2) as isize;
    let mut correct = 0;
    let mut total = 0;
    for i in 0..frames {
        let r = synthesize_frame(cfg, ModClass::Bpsk, snr_db, i);
        let trace = r.trace.expect("linear class has a symbol trace");
        let n = r.received.len() as isize;
        let derot: Vec<Complex64> = r
            .received
            .iter()
            .enumerate()
            .map(|(k, s)| {
                s * Complex64::from_polar(
                    1.0,
                    -(r.channel.phase_offset + 2.0 * PI * r.channel.cfo * k as f64),
                )
            })
            .collect();
        for (j, sym) in trace.symbols.iter().enumerate() {
            let p = trace.first_peak + j as isize * 8;
            if p - half < 0 || p + half >= n {
                continue;
            }
            let y: f64 = h
                .iter()
                .enumerate()
                .map(|(k, hk)| hk * derot[(p - half + k as isize) as usize].re)
                .sum();
            total += 1;
            if (y > 0.0) == (sym.re > 0.0) {
                correct += 1;
            }
        }
    }
    (correct, total)
}

/// Four linear classes at SNR 10 and 14 dB.
pub fn small_data(seed: u64, per: usize, len: usize) -> Dataset {
    generate_dataset(&GenConfig {
        classes: vec![
            ModClass::Bpsk,
            ModClass::Qpsk,
            ModClass::Pam4,
            ModClass::Qam16,
        ],
        snr_grid: vec![10, 14],
        frames_per_class_per_snr: per,
        seq_len: len,
        seed,
        ..GenConfig::default()
    })
    .unwrap()
}

const LR: f64 = 0.001;

/// Number of seeds (out of 10) for which 20 full-batch Adam steps on 32
/// frames give a strictly decreasing loss.
pub fn overfit_successes() -> usize {
    (0..10u64)
        .filter(|&seed| {
            let data = feature_table(&small_data(100 + seed, 4, 64)).unwrap();
            assert_eq!(data.len(), 32);
            let batch: Vec<Example<'_, f32>> = data
                .iter()
                .map(|(x, y)| Example {
                    features: x,
                    label: *y,
                })
                .collect();
            let mut net = Network::init(Shape::new(2, 16, 4).unwrap(), &mut substream(seed, &[]));
            let mut adam = AdamState::new(net.params().len());
            let mut losses = vec![];
            for _ in 0..21 {
                let (g, out) = net.backward(&batch, None).unwrap();
                losses.push(out.mean_loss);
                adam.step(net.params_mut(), &g, LR);
            }
            losses.windows(2).all(|w| w[1] < w[0])
        })
        .count()
}

const STEP: f64 = 1e-5;

pub fn random_inputs(steps: usize, d: usize, seed: u64) -> Vec<f64> {
    let mut rng = substream(seed, &[]);
    (0..steps * d)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect()
}

/// Central differences of the mean batch loss for every parameter.
fn numeric_gradient(
    net: &Network<f64>,
    batch: &[Example<'_, f64>],
    masks: Option<&[DropoutMasks<f64>]>,
) -> Vec<f64> {
    let mut probe = net.clone();
    (0..net.params().len())
        .map(|i| {
            let orig = probe.params()[i];
            probe.params_mut()[i] = orig + STEP;
            let up = probe.loss(batch, masks).unwrap();
            probe.params_mut()[i] = orig - STEP;
            let down = probe.loss(batch, masks).unwrap();
            probe.params_mut()[i] = orig;
            (up - down) / (2.0 * STEP)
        })
        .collect()
}

/// Largest elementwise discrepancy in a tensor, relative to the tensor's
/// largest gradient magnitude.
fn tensor_rel_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let scale = analytic
        .iter()
        .chain(numeric)
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1e-12);
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs())
        .fold(0.0, f64::max)
        / scale
}

/// Relative error of the analytic gradient for every parameter tensor.
/// Panics if an analytic tensor gradient is identically zero.
pub fn gradient_errors(
    net: &Network<f64>,
    batch: &[Example<'_, f64>],
    masks: Option<&[DropoutMasks<f64>]>,
) -> Vec<(Tensor, f64)> {
    let (analytic, _) = net.backward(batch, masks).unwrap();
    let numeric = numeric_gradient(net, batch, masks);
    let shape = net.shape();
    Tensor::ALL
        .iter()
        .map(|&t| {
            let o = shape.offset(t);
            let n = shape.len(t);
            assert!(
                analytic[o..o + n].iter().any(|g| *g != 0.0),
                "{} gradient is identically zero",
                t.name()
            );
            (t, tensor_rel_error(&analytic[o..o + n], &numeric[o..o + n]))
        })
        .collect()
}
