//! Frames, labels, datasets and the amplitude/phase features fed to the
//! classifier.

use std::f64::consts::PI;

use crate::error::{invalid_input, Error, Result};

/// One complex baseband sample.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IQSample {
    pub i: f32,
    pub q: f32,
}

impl IQSample {
    pub const fn new(i: f32, q: f32) -> Self {
        IQSample { i, q }
    }

    pub fn is_finite(&self) -> bool {
        self.i.is_finite() && self.q.is_finite()
    }

    pub fn norm_sqr(&self) -> f64 {
        let (i, q) = (self.i as f64, self.q as f64);
        i * i + q * q
    }
}

/// A non-empty run of finite I/Q samples; the unit of classification.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalFrame {
    samples: Vec<IQSample>,
}

impl SignalFrame {
    pub fn new(samples: Vec<IQSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid_input("frame must contain at least one sample"));
        }
        if let Some(pos) = samples.iter().position(|s| !s.is_finite()) {
            return Err(invalid_input(format!("non-finite sample at index {pos}")));
        }
        Ok(SignalFrame { samples })
    }

    /// Builds a frame from interleaved `I0, Q0, I1, Q1, ...` values.
    pub fn from_interleaved(values: &[f32]) -> Result<Self> {
        if values.len() % 2 != 0 {
            return Err(invalid_input("interleaved I/Q buffer has odd length"));
        }
        Self::new(
            values
                .chunks_exact(2)
                .map(|c| IQSample::new(c[0], c[1]))
                .collect(),
        )
    }

    pub(crate) fn from_vec_unchecked(samples: Vec<IQSample>) -> Self {
        debug_assert!(!samples.is_empty());
        SignalFrame { samples }
    }

    pub fn samples(&self) -> &[IQSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<IQSample> {
        self.samples
    }

    pub fn to_interleaved(&self) -> Vec<f32> {
        self.samples.iter().flat_map(|s| [s.i, s.q]).collect()
    }

    /// Mean of `|s|^2` over the frame.
    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(IQSample::norm_sqr).sum::<f64>() / self.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledFrame {
    pub frame: SignalFrame,
    pub label: u8,
    pub snr_db: i8,
}

/// Labeled frames sharing one length and one class table.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    frames: Vec<LabeledFrame>,
    class_names: Vec<String>,
    seq_len: usize,
    pub provenance: String,
}

impl Dataset {
    pub fn new(
        frames: Vec<LabeledFrame>,
        class_names: Vec<String>,
        seq_len: usize,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if seq_len == 0 {
            return Err(invalid_input("seq_len must be positive"));
        }
        if class_names.is_empty() || class_names.len() > u8::MAX as usize {
            return Err(invalid_input(format!(
                "class count {} outside 1..=255",
                class_names.len()
            )));
        }
        for (idx, f) in frames.iter().enumerate() {
            if f.frame.len() != seq_len {
                return Err(invalid_input(format!(
                    "frame {idx} has length {}, expected {seq_len}",
                    f.frame.len()
                )));
            }
            if f.label as usize >= class_names.len() {
                return Err(invalid_input(format!(
                    "frame {idx} label {} outside class table of {}",
                    f.label,
                    class_names.len()
                )));
            }
        }
        Ok(Dataset {
            frames,
            class_names,
            seq_len,
            provenance: provenance.into(),
        })
    }

    pub fn frames(&self) -> &[LabeledFrame] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<LabeledFrame> {
        self.frames
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn seq_len(&self) -> usize {
        self.seq_len
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Same class table and length, different frames.
    pub fn with_frames(
        &self,
        frames: Vec<LabeledFrame>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        Dataset::new(frames, self.class_names.clone(), self.seq_len, provenance)
    }

    /// Splits every frame in half; both halves keep the source labels.
    pub fn halved(&self) -> Result<Self> {
        if self.seq_len % 2 != 0 {
            return Err(invalid_input(format!(
                "cannot halve odd seq_len {}",
                self.seq_len
            )));
        }
        let mut frames = Vec::with_capacity(self.frames.len() * 2);
        for f in &self.frames {
            let (a, b) = halve_frame(&f.frame)?;
            frames.push(LabeledFrame {
                frame: a,
                label: f.label,
                snr_db: f.snr_db,
            });
            frames.push(LabeledFrame {
                frame: b,
                label: f.label,
                snr_db: f.snr_db,
            });
        }
        Dataset::new(
            frames,
            self.class_names.clone(),
            self.seq_len / 2,
            format!("{}; halved", self.provenance),
        )
    }
}

/// Amplitude and scaled phase sequences of one frame.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureFrame {
    pub amplitude: Vec<f32>,
    /// Phase divided by pi, so in (-1, 1].
    pub phase: Vec<f32>,
}

impl FeatureFrame {
    pub fn len(&self) -> usize {
        self.amplitude.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitude.is_empty()
    }

    /// Row-major `[len x 2]` matrix of `(amplitude, phase)` pairs.
    pub fn to_rows(&self) -> Vec<f32> {
        self.amplitude
            .iter()
            .zip(&self.phase)
            .flat_map(|(&a, &p)| [a, p])
            .collect()
    }
}

/// Four-quadrant phase in (-pi, pi]; the origin maps to 0.
pub fn raw_phase(s: IQSample) -> f64 {
    if s.i == 0.0 && s.q == 0.0 {
        return 0.0;
    }
    let phi = (s.q as f64).atan2(s.i as f64);
    // atan2(-0.0, x<0) yields -pi
    if phi <= -PI {
        PI
    } else {
        phi
    }
}

pub fn to_features(frame: &SignalFrame) -> Result<FeatureFrame> {
    if frame.is_empty() {
        return Err(invalid_input("empty frame"));
    }
    let mut amplitude = Vec::with_capacity(frame.len());
    let mut phase = Vec::with_capacity(frame.len());
    for (t, s) in frame.samples().iter().enumerate() {
        if !s.is_finite() {
            return Err(invalid_input(format!("non-finite sample at index {t}")));
        }
        amplitude.push(s.norm_sqr().sqrt() as f32);
        phase.push((raw_phase(*s) / PI) as f32);
    }
    Ok(FeatureFrame { amplitude, phase })
}

pub fn halve_frame(frame: &SignalFrame) -> Result<(SignalFrame, SignalFrame)> {
    let n = frame.len();
    if n % 2 != 0 {
        return Err(invalid_input(format!(
            "cannot halve frame of odd length {n}"
        )));
    }
    let (a, b) = frame.samples().split_at(n / 2);
    Ok((
        SignalFrame::from_vec_unchecked(a.to_vec()),
        SignalFrame::from_vec_unchecked(b.to_vec()),
    ))
}

/// Scales the frame to unit RMS magnitude.
pub fn normalize_frame(frame: &SignalFrame) -> Result<SignalFrame> {
    let power = frame.mean_power();
    if !(power > 0.0) || !power.is_finite() {
        return Err(Error::Degenerate("frame has zero energy".into()));
    }
    let scale = 1.0 / power.sqrt();
    Ok(SignalFrame::from_vec_unchecked(
        frame
            .samples()
            .iter()
            .map(|s| IQSample::new((s.i as f64 * scale) as f32, (s.q as f64 * scale) as f32))
            .collect(),
    ))
}

/// Classifier input pipeline: RMS normalization followed by feature
/// extraction. A zero-energy frame skips normalization and yields all-zero
/// features.
pub fn preprocess(frame: &SignalFrame) -> Result<FeatureFrame> {
    match normalize_frame(frame) {
        Ok(n) => to_features(&n),
        Err(Error::Degenerate(_)) => to_features(frame),
        Err(e) => Err(e),
    }
}
