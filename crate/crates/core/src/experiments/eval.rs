use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::augment::Policy;
use crate::error::{invalid_input, Result};
use crate::nn::{argmax, Mode, Model};
use crate::rng::{substream, Rng};
use crate::signal::{preprocess, Dataset, SignalFrame};

const TTA_STREAM: u64 = 0x77A;

/// Anything that maps a raw I/Q frame to class probabilities.
pub trait Classifier: Sync {
    fn class_names(&self) -> &[String];
    fn predict_proba(&self, frame: &SignalFrame) -> Result<Vec<f64>>;
}

impl Classifier for Model {
    fn class_names(&self) -> &[String] {
        &self.class_names
    }

    fn predict_proba(&self, frame: &SignalFrame) -> Result<Vec<f64>> {
        let features = preprocess(frame)?.to_rows();
        Ok(self
            .net
            .forward(&features, Mode::Eval)?
            .into_iter()
            .map(f64::from)
            .collect())
    }
}

/// Test-time augmentation: sums the class probabilities of every policy
/// variant and returns the argmax (lowest index on ties) with the sum
/// divided by N.
pub fn tta_predict<C: Classifier + ?Sized>(
    model: &C,
    frame: &SignalFrame,
    policy: &Policy,
    rng: &mut Rng,
) -> Result<(usize, Vec<f64>)> {
    let mut sum: Option<Vec<f64>> = None;
    for variant in policy.variants(frame, rng) {
        let p = model.predict_proba(&variant)?;
        match sum.as_mut() {
            None => sum = Some(p),
            Some(s) => s.iter_mut().zip(&p).for_each(|(a, b)| *a += b),
        }
    }
    let sum = sum.expect("policy has at least one transform");
    let class = argmax(&sum);
    let n = policy.scale_factor() as f64;
    Ok((class, sum.into_iter().map(|x| x / n).collect()))
}

/// Plain prediction: argmax of a single forward pass.
pub fn predict<C: Classifier + ?Sized>(
    model: &C,
    frame: &SignalFrame,
) -> Result<(usize, Vec<f64>)> {
    let p = model.predict_proba(frame)?;
    Ok((argmax(&p), p))
}

/// Confusion counts at one SNR; rows are true classes, columns predictions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Confusion {
    pub counts: Vec<Vec<u64>>,
}

impl Confusion {
    fn new(k: usize) -> Self {
        Confusion {
            counts: vec![vec![0; k]; k],
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.correct() as f64 / n as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Metrics {
    pub class_names: Vec<String>,
    pub per_snr: BTreeMap<i32, Confusion>,
}

impl Metrics {
    pub fn accuracy_at(&self, snr_db: i32) -> Option<f64> {
        self.per_snr.get(&snr_db).map(Confusion::accuracy)
    }

    pub fn overall_accuracy(&self) -> f64 {
        let (c, n) = self
            .per_snr
            .values()
            .fold((0, 0), |(c, n), m| (c + m.correct(), n + m.total()));
        if n == 0 {
            0.0
        } else {
            c as f64 / n as f64
        }
    }

    pub fn total(&self) -> u64 {
        self.per_snr.values().map(Confusion::total).sum()
    }
}

/// Per-SNR accuracy and confusion matrices over the whole test set. With a
/// policy, each frame is classified by [`tta_predict`] using substream
/// `(seed, frame index)`; stored frames are never modified.
pub fn evaluate<C: Classifier + ?Sized>(
    model: &C,
    test: &Dataset,
    tta: Option<&Policy>,
    seed: u64,
) -> Result<Metrics> {
    if model.class_names() != test.class_names() {
        return Err(invalid_input(format!(
            "model classes {:?} do not match dataset classes {:?}",
            model.class_names(),
            test.class_names()
        )));
    }
    let predictions: Vec<usize> = test
        .frames()
        .par_iter()
        .enumerate()
        .map(|(i, f)| match tta {
            Some(p) => {
                let mut rng = substream(seed, &[TTA_STREAM, i as u64]);
                tta_predict(model, &f.frame, p, &mut rng).map(|r| r.0)
            }
            None => predict(model, &f.frame).map(|r| r.0),
        })
        .collect::<Result<_>>()?;
    let k = test.num_classes();
    let mut per_snr: BTreeMap<i32, Confusion> = BTreeMap::new();
    for (f, &pred) in test.frames().iter().zip(&predictions) {
        let m = per_snr
            .entry(f.snr_db as i32)
            .or_insert_with(|| Confusion::new(k));
        m.counts[f.label as usize][pred] += 1;
    }
    Ok(Metrics {
        class_names: test.class_names().to_vec(),
        per_snr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::PolicyKind;
    use crate::signal::{IQSample, LabeledFrame};

    /// Returns fixed probabilities regardless of input.
    struct Fixed(Vec<String>, Vec<f64>);

    impl Classifier for Fixed {
        fn class_names(&self) -> &[String] {
            &self.0
        }
        fn predict_proba(&self, _: &SignalFrame) -> Result<Vec<f64>> {
            Ok(self.1.clone())
        }
    }

    /// Probabilities depend on the sign of the first I sample.
    struct SignSensitive(Vec<String>);

    impl Classifier for SignSensitive {
        fn class_names(&self) -> &[String] {
            &self.0
        }
        fn predict_proba(&self, f: &SignalFrame) -> Result<Vec<f64>> {
            Ok(if f.samples()[0].i > 0.0 {
                vec![0.6, 0.4]
            } else {
                vec![0.3, 0.7]
            })
        }
    }

    fn frame() -> SignalFrame {
        SignalFrame::new(vec![IQSample::new(1.0, 0.0), IQSample::new(0.5, 0.5)]).unwrap()
    }

    #[test]
    fn hand_computed_fusion() {
        let m = SignSensitive(vec!["a".into(), "b".into()]);
        // variants: identity (0.6, 0.4) then flip_h (0.3, 0.7) -> sums (0.9, 1.1)
        let policy = Policy::new(
            "pair",
            vec![
                crate::augment::Transform::Identity,
                crate::augment::Transform::FlipH,
            ],
        )
        .unwrap();
        let (class, fused) = tta_predict(&m, &frame(), &policy, &mut substream(0, &[])).unwrap();
        assert_eq!(class, 1);
        assert!((fused[0] - 0.45).abs() < 1e-15 && (fused[1] - 0.55).abs() < 1e-15);
    }

    #[test]
    fn ties_go_to_lowest_class() {
        let m = Fixed(vec!["a".into(), "b".into()], vec![0.5, 0.5]);
        let policy = Policy::builtin(PolicyKind::Flip);
        let (class, fused) = tta_predict(&m, &frame(), &policy, &mut substream(0, &[])).unwrap();
        assert_eq!(class, 0);
        assert_eq!(fused, vec![0.5, 0.5]);
    }

    #[test]
    fn constant_model_on_balanced_set() {
        let names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let mut frames = vec![];
        for label in 0..3u8 {
            for snr in [0i8, 10] {
                for _ in 0..4 {
                    frames.push(LabeledFrame {
                        frame: frame(),
                        label,
                        snr_db: snr,
                    });
                }
            }
        }
        let ds = Dataset::new(frames, names.clone(), 2, "").unwrap();
        let m = Fixed(names, vec![0.1, 0.7, 0.2]);
        let metrics = evaluate(&m, &ds, None, 0).unwrap();
        for snr in [0, 10] {
            assert!((metrics.accuracy_at(snr).unwrap() - 1.0 / 3.0).abs() < 1e-12);
            let c = &metrics.per_snr[&snr];
            for row in &c.counts {
                assert_eq!(row.iter().sum::<u64>(), 4);
            }
        }
        let tta = evaluate(&m, &ds, Some(&Policy::builtin(PolicyKind::Rotation)), 0).unwrap();
        assert_eq!(tta, metrics);
    }

    #[test]
    fn class_table_mismatch_rejected() {
        let ds = Dataset::new(
            vec![LabeledFrame {
                frame: frame(),
                label: 0,
                snr_db: 0,
            }],
            vec!["a".into()],
            2,
            "",
        )
        .unwrap();
        let m = Fixed(vec!["z".into()], vec![1.0]);
        assert!(evaluate(&m, &ds, None, 0).is_err());
    }
}
