//! Synthetic I/Q modulation datasets, label-preserving augmentation
//! (quarter-turn rotation, flips, Gaussian noise), a from-scratch two-layer
//! LSTM classifier, and the train-time / test-time augmentation experiment
//! harness around them.

pub mod augment;
pub mod error;
pub mod experiments;
pub mod modem;
pub mod nn;
pub mod rng;
pub mod rsig;
pub mod signal;

pub use error::{Error, Result};
