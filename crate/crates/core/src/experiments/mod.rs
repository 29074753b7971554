//! The augmentation experiment matrix: stratified split, partial-data
//! subsampling, train-time / test-time / train-test-time augmentation,
//! training and per-SNR evaluation.

mod data;
mod eval;
mod report;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

pub use data::{split_dataset, strata, stratum_quotas, subsample};
pub use eval::{evaluate, predict, tta_predict, Classifier, Confusion, Metrics};
pub use report::{
    accuracy_csv, confusion_csv, confusion_file_name, history_csv, write_history, write_reports,
};

use crate::augment::{augment_dataset, Policy, PolicyKind};
use crate::error::{invalid_argument, Result};
use crate::nn::{train, EpochRecord, Model, Network, Shape, TrainConfig, INPUT_DIM};
use crate::rng::{derive_seed, substream};
use crate::signal::{preprocess, Dataset};

/// When augmentation is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AugPhase {
    None,
    Train,
    Test,
    TrainTest,
}

impl AugPhase {
    pub fn augments_training(&self) -> bool {
        matches!(self, AugPhase::Train | AugPhase::TrainTest)
    }

    pub fn augments_test(&self) -> bool {
        matches!(self, AugPhase::Test | AugPhase::TrainTest)
    }
}

impl FromStr for AugPhase {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "none" => Ok(AugPhase::None),
            "train" => Ok(AugPhase::Train),
            "test" => Ok(AugPhase::Test),
            "train-test" => Ok(AugPhase::TrainTest),
            other => Err(invalid_argument(format!(
                "unknown augmentation phase {other:?} (expected none|train|test|train-test)"
            ))),
        }
    }
}

impl fmt::Display for AugPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AugPhase::None => "none",
            AugPhase::Train => "train",
            AugPhase::Test => "test",
            AugPhase::TrainTest => "train-test",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub aug_phase: AugPhase,
    pub policy: Policy,
    pub train_fraction: f64,
    /// Frame length fed to the network; a dataset of twice this length is
    /// halved first.
    pub seq_len: usize,
    /// Split the source frames before halving so both halves of a frame
    /// land on the same side.
    pub split_before_halving: bool,
    pub hidden: usize,
    pub train: TrainConfig,
    /// Root seed for split, subsample, augmentation, initialization and
    /// test-time noise. Training shuffles and dropout use `train.seed`.
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn baseline(seq_len: usize) -> Self {
        ExperimentConfig {
            aug_phase: AugPhase::None,
            policy: Policy::identity(),
            train_fraction: 1.0,
            seq_len,
            split_before_halving: false,
            hidden: 128,
            train: TrainConfig::default(),
            seed: 0,
        }
    }

    pub fn with_policy(mut self, kind: PolicyKind, phase: AugPhase) -> Self {
        self.policy = Policy::builtin(kind);
        self.aug_phase = phase;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let identity = self.policy.scale_factor() == 1
            && self.policy.is_deterministic()
            && self.policy.transforms()[0].same_action(&crate::augment::Transform::Identity);
        if identity && self.aug_phase != AugPhase::None {
            return Err(invalid_argument(format!(
                "augmentation phase {} needs a policy other than none",
                self.aug_phase
            )));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction <= 1.0) {
            return Err(invalid_argument(format!(
                "train fraction {} outside (0, 1]",
                self.train_fraction
            )));
        }
        if self.hidden == 0 {
            return Err(invalid_argument("hidden size must be positive"));
        }
        self.train.validate()
    }

    pub fn describe(&self) -> String {
        format!(
            "phase={} policy={} N={} fraction={} seq_len={} split_before_halving={} hidden={} \
             epochs={} batch={} lr={} dropout={} patience={} seed={} train_seed={}",
            self.aug_phase,
            self.policy.name,
            self.policy.scale_factor(),
            self.train_fraction,
            self.seq_len,
            self.split_before_halving,
            self.hidden,
            self.train.epochs,
            self.train.batch_size,
            self.train.initial_lr,
            self.train.dropout,
            self.train.plateau_patience,
            self.seed,
            self.train.seed
        )
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub model: Model,
    pub metrics: Metrics,
    pub history: Vec<EpochRecord>,
    /// Training frames after subsampling and augmentation.
    pub train_size: usize,
    pub test: Dataset,
}

const STAGE_SPLIT: u64 = 1;
const STAGE_SUBSAMPLE: u64 = 2;
const STAGE_AUGMENT: u64 = 3;
const STAGE_INIT: u64 = 4;
const STAGE_EVAL: u64 = 5;

fn stage_seed(root: u64, stage: u64) -> u64 {
    derive_seed(root, &[stage])
}

/// Brings `data` to the configured frame length and splits it.
pub fn prepare_split(cfg: &ExperimentConfig, data: &Dataset) -> Result<(Dataset, Dataset)> {
    let split_seed = stage_seed(cfg.seed, STAGE_SPLIT);
    if data.seq_len() == cfg.seq_len {
        split_dataset(data, split_seed)
    } else if data.seq_len() == 2 * cfg.seq_len {
        if cfg.split_before_halving {
            let (a, b) = split_dataset(data, split_seed)?;
            Ok((a.halved()?, b.halved()?))
        } else {
            split_dataset(&data.halved()?, split_seed)
        }
    } else {
        Err(invalid_argument(format!(
            "dataset frames have length {}, experiment expects {} (or twice that)",
            data.seq_len(),
            cfg.seq_len
        )))
    }
}

/// Amplitude/phase rows for every frame, with labels.
pub fn feature_table(ds: &Dataset) -> Result<Vec<(Vec<f32>, usize)>> {
    ds.frames()
        .par_iter()
        .map(|f| Ok((preprocess(&f.frame)?.to_rows(), f.label as usize)))
        .collect()
}

/// split -> subsample -> optional train-time augmentation -> training ->
/// evaluation (with test-time fusion when the phase asks for it).
pub fn run_experiment(
    cfg: &ExperimentConfig,
    data: &Dataset,
    on_epoch: impl FnMut(&EpochRecord),
) -> Result<Outcome> {
    cfg.validate()?;
    let (train_side, test) = prepare_split(cfg, data)?;
    let mut train_set = subsample(
        &train_side,
        cfg.train_fraction,
        stage_seed(cfg.seed, STAGE_SUBSAMPLE),
    )?;
    if cfg.aug_phase.augments_training() {
        train_set = augment_dataset(&train_set, &cfg.policy, stage_seed(cfg.seed, STAGE_AUGMENT))?;
    }
    let examples = feature_table(&train_set)?;
    let shape = Shape::new(INPUT_DIM, cfg.hidden, data.num_classes())?;
    let mut net = Network::init(shape, &mut substream(cfg.seed, &[STAGE_INIT]));
    let history = train(&mut net, &examples, &cfg.train, on_epoch)?;
    let model = Model::new(
        net,
        data.class_names().to_vec(),
        format!("trained {}; data: {}", cfg.describe(), data.provenance),
    )?;
    let tta = cfg.aug_phase.augments_test().then_some(&cfg.policy);
    let metrics = evaluate(&model, &test, tta, stage_seed(cfg.seed, STAGE_EVAL))?;
    Ok(Outcome {
        model,
        metrics,
        history,
        train_size: train_set.len(),
        test,
    })
}

/// Seed used for test-time noise when evaluating outside an experiment run.
pub fn eval_seed(root: u64) -> u64 {
    stage_seed(root, STAGE_EVAL)
}
