use proptest::collection::vec;
use proptest::prelude::*;

use radaug::augment::{apply_transform, augment_dataset, Policy, PolicyKind, Transform};
use radaug::experiments::{split_dataset, strata, subsample};
use radaug::nn::{argmax, softmax};
use radaug::rng::substream;
use radaug::rsig;
use radaug::signal::{
    halve_frame, normalize_frame, preprocess, Dataset, IQSample, LabeledFrame, SignalFrame,
};

fn frame_strategy(max_len: usize) -> impl Strategy<Value = SignalFrame> {
    vec((-1e3f32..1e3, -1e3f32..1e3), 1..max_len).prop_map(|v| {
        SignalFrame::new(v.into_iter().map(|(i, q)| IQSample::new(i, q)).collect()).unwrap()
    })
}

fn even_frame_strategy(max_half: usize) -> impl Strategy<Value = SignalFrame> {
    vec((-1e3f32..1e3, -1e3f32..1e3), 1..max_half).prop_flat_map(|a| {
        let n = a.len();
        vec((-1e3f32..1e3, -1e3f32..1e3), n..=n).prop_map(move |b| {
            let s = a
                .iter()
                .chain(&b)
                .map(|&(i, q)| IQSample::new(i, q))
                .collect();
            SignalFrame::new(s).unwrap()
        })
    })
}

fn apply(f: &SignalFrame, t: Transform) -> SignalFrame {
    apply_transform(f, t, &mut substream(0, &[]))
}

fn energetic(f: &SignalFrame) -> bool {
    f.mean_power() > 1e-6
}

/// Dataset with `pairs` frames in each of a few (label, snr) strata.
fn dataset(pairs: usize, seq_len: usize, seed: u64) -> Dataset {
    let mut rng = substream(seed, &[]);
    let mut frames = vec![];
    for label in 0..3u8 {
        for snr in [-4i8, 6] {
            for _ in 0..2 * pairs {
                let s: Vec<IQSample> = (0..seq_len)
                    .map(|_| {
                        IQSample::new(
                            rand::Rng::random_range(&mut rng, -1.0..1.0),
                            rand::Rng::random_range(&mut rng, -1.0..1.0),
                        )
                    })
                    .collect();
                frames.push(LabeledFrame {
                    frame: SignalFrame::new(s).unwrap(),
                    label,
                    snr_db: snr,
                });
            }
        }
    }
    Dataset::new(
        frames,
        vec!["a".into(), "b".into(), "c".into()],
        seq_len,
        "prop",
    )
    .unwrap()
}

proptest! {
    #[test]
    fn quarter_turns_compose_additively(f in frame_strategy(64), a in 0u8..4, b in 0u8..4) {
        let ab = apply(&apply(&f, Transform::RotateQuarter(a)), Transform::RotateQuarter(b));
        prop_assert_eq!(ab, apply(&f, Transform::RotateQuarter((a + b) % 4)));
    }

    #[test]
    fn four_quarter_turns_are_identity(f in frame_strategy(64)) {
        let mut g = f.clone();
        for _ in 0..4 {
            g = apply(&g, Transform::RotateQuarter(1));
        }
        prop_assert_eq!(g, f);
    }

    #[test]
    fn flips_are_involutions(f in frame_strategy(64)) {
        for t in [Transform::FlipH, Transform::FlipV, Transform::FlipBoth] {
            prop_assert_eq!(apply(&apply(&f, t), t), f.clone());
        }
        let hv = apply(&apply(&f, Transform::FlipH), Transform::FlipV);
        prop_assert_eq!(&hv, &apply(&f, Transform::RotateQuarter(2)));
        prop_assert_eq!(hv, apply(&f, Transform::FlipBoth));
    }

    #[test]
    fn deterministic_transforms_preserve_power_exactly(f in frame_strategy(64), k in 0u8..4) {
        let before: Vec<f32> = f.samples().iter().map(|s| s.i * s.i + s.q * s.q).collect();
        for t in [Transform::RotateQuarter(k), Transform::FlipH, Transform::FlipV] {
            let after: Vec<f32> = apply(&f, t).samples().iter().map(|s| s.i * s.i + s.q * s.q).collect();
            prop_assert_eq!(&after, &before);
        }
    }

    #[test]
    fn halves_concatenate_back(f in even_frame_strategy(32)) {
        let (a, b) = halve_frame(&f).unwrap();
        prop_assert_eq!(a.len(), b.len());
        let joined: Vec<IQSample> = a.samples().iter().chain(b.samples()).copied().collect();
        prop_assert_eq!(joined, f.samples().to_vec());
    }

    #[test]
    fn normalization_is_idempotent_and_scale_free(f in frame_strategy(64), c in 0.01f32..100.0) {
        prop_assume!(energetic(&f));
        let n = normalize_frame(&f).unwrap();
        prop_assert!((n.mean_power() - 1.0).abs() < 1e-5);
        let nn = normalize_frame(&n).unwrap();
        let scaled = SignalFrame::new(f.samples().iter().map(|s| IQSample::new(s.i * c, s.q * c)).collect()).unwrap();
        let ns = normalize_frame(&scaled).unwrap();
        for ((x, y), z) in n.samples().iter().zip(nn.samples()).zip(ns.samples()) {
            prop_assert!((x.i - y.i).abs() <= 1e-5 && (x.q - y.q).abs() <= 1e-5);
            prop_assert!((x.i - z.i).abs() <= 1e-4 && (x.q - z.q).abs() <= 1e-4);
        }
    }

    #[test]
    fn features_are_bounded(f in frame_strategy(64)) {
        let feats = preprocess(&f).unwrap();
        prop_assert_eq!(feats.len(), f.len());
        for (a, p) in feats.amplitude.iter().zip(&feats.phase) {
            prop_assert!(*a >= 0.0 && a.is_finite());
            prop_assert!(*p > -1.0 && *p <= 1.0);
        }
    }

    #[test]
    fn rotation_shifts_phase_by_a_half(f in frame_strategy(32)) {
        let base = preprocess(&f).unwrap();
        let rot = preprocess(&apply(&f, Transform::RotateQuarter(1))).unwrap();
        prop_assert_eq!(&base.amplitude, &rot.amplitude);
        for ((p, q), s) in base.phase.iter().zip(&rot.phase).zip(f.samples()) {
            if s.i == 0.0 && s.q == 0.0 {
                continue;
            }
            let d = (q - p).rem_euclid(2.0);
            prop_assert!((d - 0.5).abs() < 1e-5, "phase moved by {}", d);
        }
    }

    #[test]
    fn softmax_is_a_distribution(logits in vec(-50.0f64..50.0, 1..12)) {
        let p = softmax(&logits);
        prop_assert!(p.iter().all(|x| *x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert_eq!(argmax(&p), argmax(&logits));
    }

    #[test]
    fn rsig_round_trips(pairs in 1usize..3, len in 1usize..20, seed in any::<u64>()) {
        let ds = dataset(pairs, len, seed);
        let back = rsig::from_bytes(&rsig::to_bytes(&ds).unwrap()).unwrap();
        prop_assert_eq!(back.frames(), ds.frames());
        prop_assert_eq!(back.class_names(), ds.class_names());
    }

    #[test]
    fn split_halves_every_stratum(pairs in 1usize..5, seed in any::<u64>()) {
        let ds = dataset(pairs, 4, 1);
        let (a, b) = split_dataset(&ds, seed).unwrap();
        prop_assert_eq!(a.len() + b.len(), ds.len());
        for (key, idx) in strata(&ds) {
            prop_assert_eq!(strata(&a)[&key].len(), idx.len() / 2);
            prop_assert_eq!(strata(&b)[&key].len(), idx.len() / 2);
        }
        // disjoint and exhaustive
        let mut all: Vec<&LabeledFrame> = a.frames().iter().chain(b.frames()).collect();
        all.sort_by(|x, y| x.frame.to_interleaved().partial_cmp(&y.frame.to_interleaved()).unwrap());
        let mut orig: Vec<&LabeledFrame> = ds.frames().iter().collect();
        orig.sort_by(|x, y| x.frame.to_interleaved().partial_cmp(&y.frame.to_interleaved()).unwrap());
        prop_assert_eq!(all, orig);
    }

    #[test]
    fn subsample_keeps_rounded_share(pairs in 1usize..6, frac in 0.3f64..=1.0, seed in any::<u64>()) {
        let ds = dataset(pairs, 4, 2);
        let n = 2 * pairs;
        let share = frac * n as f64;
        prop_assume!(share >= 1.0);
        let sub = subsample(&ds, frac, seed).unwrap();
        let groups = strata(&sub);
        prop_assert_eq!(groups.len(), 6);
        for idx in groups.values() {
            prop_assert!(idx.len() == share.floor() as usize || idx.len() == share.ceil() as usize);
        }
        prop_assert_eq!(sub.len(), (frac * (6 * n) as f64).round_ties_even() as usize);
    }

    #[test]
    fn augmentation_multiplies_size(pairs in 1usize..3, seed in any::<u64>()) {
        let ds = dataset(pairs, 8, 3);
        for kind in [PolicyKind::Rotation, PolicyKind::Flip, PolicyKind::Noise, PolicyKind::Joint, PolicyKind::None] {
            let p = Policy::builtin(kind);
            let out = augment_dataset(&ds, &p, seed).unwrap();
            prop_assert_eq!(out.len(), ds.len() * p.scale_factor());
            for (k, f) in out.frames().iter().enumerate() {
                let src = &ds.frames()[k / p.scale_factor()];
                prop_assert_eq!((f.label, f.snr_db), (src.label, src.snr_db));
            }
        }
    }
}
