use rand::seq::SliceRandom;

use super::adam::AdamState;
use super::network::{DropoutMasks, Example, Network};
use super::schedule::PlateauSchedule;
use crate::error::{invalid_argument, invalid_input, Result};
use crate::rng::substream;

const SHUFFLE_STREAM: u64 = 0x5F1;
const DROPOUT_STREAM: u64 = 0xD40;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub initial_lr: f64,
    pub dropout: f64,
    pub plateau_patience: usize,
    /// Rescale the batch gradient to this global L2 norm when it is larger.
    pub grad_clip: Option<f64>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 80,
            batch_size: 128,
            initial_lr: 0.001,
            dropout: 0.5,
            plateau_patience: 3,
            grad_clip: None,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 || self.plateau_patience == 0 {
            return Err(invalid_argument(
                "epochs, batch size and patience must be positive",
            ));
        }
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return Err(invalid_argument(format!(
                "learning rate {} must be positive",
                self.initial_lr
            )));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(invalid_argument(format!(
                "dropout {} outside [0, 1)",
                self.dropout
            )));
        }
        if let Some(c) = self.grad_clip {
            if !(c > 0.0 && c.is_finite()) {
                return Err(invalid_argument(format!(
                    "gradient clip {c} must be positive"
                )));
            }
        }
        Ok(())
    }
}

/// Scales `grad` down to L2 norm `max` if it exceeds it.
pub fn clip_grad_norm(grad: &mut [f32], max: f64) -> f64 {
    let norm = grad.iter().map(|g| (*g as f64).powi(2)).sum::<f64>().sqrt();
    if norm > max {
        let s = (max / norm) as f32;
        grad.iter_mut().for_each(|g| *g *= s);
    }
    norm
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    /// Learning rate used during this epoch.
    pub lr: f64,
}

/// Mini-batch Adam over `examples` (`features`, `label`), reshuffled every
/// epoch. Training accuracy is measured on the dropout-perturbed forward
/// passes of the epoch and drives the plateau schedule.
pub fn train(
    net: &mut Network<f32>,
    examples: &[(Vec<f32>, usize)],
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<Vec<EpochRecord>> {
    cfg.validate()?;
    if examples.is_empty() {
        return Err(invalid_input("no training examples"));
    }
    let hidden = net.shape().hidden;
    let input_dim = net.shape().input_dim;
    let mut adam = AdamState::new(net.params().len());
    let mut sched = PlateauSchedule::new(cfg.plateau_patience);
    let mut lr = cfg.initial_lr;
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut order: Vec<usize> = (0..examples.len()).collect();

    for epoch in 0..cfg.epochs {
        order.sort_unstable();
        order.shuffle(&mut substream(cfg.seed, &[SHUFFLE_STREAM, epoch as u64]));
        let mut loss_sum = 0.0;
        let mut correct = 0usize;
        for (b, idx) in order.chunks(cfg.batch_size).enumerate() {
            let batch: Vec<Example<'_, f32>> = idx
                .iter()
                .map(|&i| Example {
                    features: &examples[i].0,
                    label: examples[i].1,
                })
                .collect();
            let dropout = cfg.dropout;
            let seed = cfg.seed;
            let mask_for = |n: usize| {
                (dropout > 0.0).then(|| {
                    let steps = batch[n].features.len() / input_dim;
                    let mut rng =
                        substream(seed, &[DROPOUT_STREAM, epoch as u64, b as u64, n as u64]);
                    DropoutMasks::sample(dropout, steps, hidden, &mut rng)
                })
            };
            let (mut grad, out) = net.backward_with(&batch, &mask_for);
            if let Some(c) = cfg.grad_clip {
                clip_grad_norm(&mut grad, c);
            }
            adam.step(net.params_mut(), &grad, lr);
            loss_sum += out.mean_loss * batch.len() as f64;
            correct += out
                .predictions
                .iter()
                .zip(&batch)
                .filter(|(p, ex)| **p == ex.label)
                .count();
        }
        let rec = EpochRecord {
            epoch: epoch + 1,
            train_loss: loss_sum / examples.len() as f64,
            train_acc: correct as f64 / examples.len() as f64,
            lr,
        };
        on_epoch(&rec);
        lr = sched.next_lr(rec.train_acc, lr);
        history.push(rec);
    }
    Ok(history)
}
