//! From-scratch two-layer LSTM classifier: forward pass, backpropagation
//! through time, Adam, plateau learning-rate schedule and model files.

mod adam;
mod network;
mod rmdl;
mod schedule;
mod train;

pub use adam::{AdamState, BETA1, BETA2, EPSILON};
pub use network::{
    argmax, count_params, cross_entropy, log_softmax_loss, macs_per_step, softmax, BatchOutput,
    DropoutMasks, Example, Mode, Network, Scalar, Shape, Tensor,
};
pub use rmdl::Model;
pub use schedule::{lr_schedule, PlateauSchedule};
pub use train::{clip_grad_norm, train, EpochRecord, TrainConfig};

/// Amplitude and phase.
pub const INPUT_DIM: usize = 2;
