//! Desk-scale training run: 4 linear classes, 5 SNRs, 500 frames per
//! class per SNR, h=32, 20 epochs. Prints training progress, test accuracy
//! and a confusion matrix per SNR.
//!
//! Positional arguments, all optional:
//! `seed dropout batch snr_lo fraction joint|no lr clip`
//! (defaults `1 0.5 128 10 1.0 no 0.001 none`).
//!
//!     cargo run --release --example desk_probe -- 2 0.5 16 10 1.0 no 0.001 1.0

use std::time::Instant;

use radaug::augment::PolicyKind;
use radaug::experiments::{run_experiment, AugPhase, ExperimentConfig};
use radaug::modem::{generate_dataset, GenConfig, ModClass};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let seed: u64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(1);
    let dropout: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0.5);
    let batch: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(128);
    let lo: i32 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(10);
    let frac: f64 = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let aug = args.get(6).map(|s| s == "joint").unwrap_or(false);
    let lr: f64 = args.get(7).map(|s| s.parse().unwrap()).unwrap_or(0.001);
    let clip: Option<f64> = args.get(8).and_then(|s| s.parse().ok());
    let t0 = Instant::now();
    let ds = generate_dataset(&GenConfig {
        classes: vec![
            ModClass::Bpsk,
            ModClass::Qpsk,
            ModClass::Pam4,
            ModClass::Qam16,
        ],
        snr_grid: (lo..=lo + 8).step_by(2).collect(),
        frames_per_class_per_snr: 500,
        seq_len: 128,
        seed,
        ..Default::default()
    })
    .unwrap();
    println!("gen {:?}", t0.elapsed());
    let mut cfg = ExperimentConfig::baseline(128);
    if aug {
        cfg = cfg.with_policy(PolicyKind::Joint, AugPhase::TrainTest);
    }
    cfg.train_fraction = frac;
    cfg.hidden = 32;
    cfg.seed = seed;
    cfg.train.epochs = 20;
    cfg.train.seed = seed;
    cfg.train.dropout = dropout;
    cfg.train.batch_size = batch;
    cfg.train.initial_lr = lr;
    cfg.train.grad_clip = clip;
    let out = run_experiment(&cfg, &ds, |r| {
        println!(
            "epoch {} loss {:.4} acc {:.4} lr {} t={:?}",
            r.epoch,
            r.train_loss,
            r.train_acc,
            r.lr,
            t0.elapsed()
        )
    })
    .unwrap();
    println!(
        "train size {} test acc {:.4} total {:?}",
        out.train_size,
        out.metrics.overall_accuracy(),
        t0.elapsed()
    );
    for (snr, c) in &out.metrics.per_snr {
        println!("  {snr}: {:.4} {:?}", c.accuracy(), c.counts);
    }
}
