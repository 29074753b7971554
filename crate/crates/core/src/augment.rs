//! Label-preserving I/Q augmentations and the policies that expand a
//! dataset by a scale factor.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{invalid_argument, invalid_input, Result};
use crate::rng::{substream, Rng};
use crate::signal::{Dataset, IQSample, LabeledFrame, SignalFrame};

const AUGMENT_STREAM: u64 = 0xA06;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Transform {
    Identity,
    /// Counter-clockwise rotation by `k * pi/2`, `k` taken mod 4.
    RotateQuarter(u8),
    /// `(I, Q) -> (-I, Q)`
    FlipH,
    /// `(I, Q) -> (I, -Q)`
    FlipV,
    /// `(I, Q) -> (-I, -Q)`
    FlipBoth,
    /// Adds zero-mean Gaussian noise with this standard deviation to every
    /// I and every Q component.
    AddNoise(f64),
}

/// Signed permutation `[[a, b], [c, d]]` with entries in {-1, 0, 1}.
type Orthant = [[i8; 2]; 2];

impl Transform {
    /// The exact linear map of a deterministic transform, `None` for noise
    /// with positive sigma.
    fn linear_map(&self) -> Option<Orthant> {
        let rot = |k: u8| match k % 4 {
            0 => [[1, 0], [0, 1]],
            1 => [[0, -1], [1, 0]],
            2 => [[-1, 0], [0, -1]],
            _ => [[0, 1], [-1, 0]],
        };
        match *self {
            Transform::Identity => Some(rot(0)),
            Transform::RotateQuarter(k) => Some(rot(k)),
            Transform::FlipH => Some([[-1, 0], [0, 1]]),
            Transform::FlipV => Some([[1, 0], [0, -1]]),
            Transform::FlipBoth => Some(rot(2)),
            Transform::AddNoise(s) if s == 0.0 => Some(rot(0)),
            Transform::AddNoise(_) => None,
        }
    }

    /// True when both transforms act identically on every signal.
    pub fn same_action(&self, other: &Transform) -> bool {
        match (self.linear_map(), other.linear_map()) {
            (Some(a), Some(b)) => a == b,
            (None, None) => self == other,
            _ => false,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.linear_map().is_some()
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Transform::AddNoise(s) if !(s.is_finite() && s >= 0.0) => Err(invalid_argument(
                format!("noise sigma must be finite and >= 0, got {s}"),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Identity => write!(f, "identity"),
            Transform::RotateQuarter(k) => write!(f, "rot{}", k % 4),
            Transform::FlipH => write!(f, "flip_h"),
            Transform::FlipV => write!(f, "flip_v"),
            Transform::FlipBoth => write!(f, "flip_hv"),
            Transform::AddNoise(s) => write!(f, "noise({s})"),
        }
    }
}

#[inline]
fn quarter_turn(s: IQSample, k: u8) -> IQSample {
    match k % 4 {
        0 => s,
        1 => IQSample::new(-s.q, s.i),
        2 => IQSample::new(-s.i, -s.q),
        _ => IQSample::new(s.q, -s.i),
    }
}

/// Applies one transform. `rng` is only consumed by `AddNoise` with
/// positive sigma, two normal draws per sample (I then Q).
pub fn apply_transform(frame: &SignalFrame, t: Transform, rng: &mut Rng) -> SignalFrame {
    let map: Box<dyn FnMut(IQSample) -> IQSample + '_> = match t {
        Transform::Identity => Box::new(|s| s),
        Transform::RotateQuarter(k) => Box::new(move |s| quarter_turn(s, k)),
        Transform::FlipH => Box::new(|s: IQSample| IQSample::new(-s.i, s.q)),
        Transform::FlipV => Box::new(|s: IQSample| IQSample::new(s.i, -s.q)),
        Transform::FlipBoth => Box::new(|s: IQSample| IQSample::new(-s.i, -s.q)),
        Transform::AddNoise(sigma) if sigma == 0.0 => Box::new(|s| s),
        Transform::AddNoise(sigma) => Box::new(move |s: IQSample| {
            let ni: f64 = rng.sample(StandardNormal);
            let nq: f64 = rng.sample(StandardNormal);
            IQSample::new(
                (s.i as f64 + sigma * ni) as f32,
                (s.q as f64 + sigma * nq) as f32,
            )
        }),
    };
    SignalFrame::from_vec_unchecked(frame.samples().iter().copied().map(map).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyKind {
    None,
    Rotation,
    Flip,
    Noise,
    Joint,
}

impl FromStr for PolicyKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(PolicyKind::None),
            "rotation" => Ok(PolicyKind::Rotation),
            "flip" => Ok(PolicyKind::Flip),
            "noise" => Ok(PolicyKind::Noise),
            "joint" => Ok(PolicyKind::Joint),
            other => Err(invalid_argument(format!(
                "unknown augmentation policy {other:?} (expected none|rotation|flip|noise|joint)"
            ))),
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::None => "none",
            PolicyKind::Rotation => "rotation",
            PolicyKind::Flip => "flip",
            PolicyKind::Noise => "noise",
            PolicyKind::Joint => "joint",
        })
    }
}

pub const DEFAULT_NOISE_SIGMAS: [f64; 4] = [0.0, 0.0005, 0.001, 0.002];

/// An ordered list of transforms; each input frame becomes one output per
/// transform.
#[derive(Clone, Debug, PartialEq)]
pub struct Policy {
    pub name: String,
    transforms: Vec<Transform>,
}

impl Policy {
    pub fn new(name: impl Into<String>, transforms: Vec<Transform>) -> Result<Self> {
        if transforms.is_empty() {
            return Err(invalid_argument("policy needs at least one transform"));
        }
        for t in &transforms {
            t.validate()?;
        }
        Ok(Policy {
            name: name.into(),
            transforms,
        })
    }

    pub fn identity() -> Self {
        Policy {
            name: "none".into(),
            transforms: vec![Transform::Identity],
        }
    }

    pub fn builtin(kind: PolicyKind) -> Self {
        use Transform::*;
        let (name, transforms) = match kind {
            PolicyKind::None => return Self::identity(),
            PolicyKind::Rotation => ("rotation", (0..4).map(RotateQuarter).collect()),
            PolicyKind::Flip => ("flip", vec![Identity, FlipH, FlipV, FlipBoth]),
            PolicyKind::Noise => (
                "noise",
                DEFAULT_NOISE_SIGMAS.iter().map(|&s| AddNoise(s)).collect(),
            ),
            PolicyKind::Joint => {
                let union: Vec<Transform> = (0..4)
                    .map(RotateQuarter)
                    .chain([Identity, FlipH, FlipV, FlipBoth])
                    .collect();
                ("joint", dedup_by_action(&union))
            }
        };
        Policy {
            name: name.into(),
            transforms,
        }
    }

    /// Noise policy with a caller-chosen list of standard deviations.
    pub fn noise(sigmas: &[f64]) -> Result<Self> {
        Policy::new(
            "noise",
            sigmas.iter().map(|&s| Transform::AddNoise(s)).collect(),
        )
    }

    pub fn transforms(&self) -> &[Transform] {
        &self.transforms
    }

    pub fn scale_factor(&self) -> usize {
        self.transforms.len()
    }

    pub fn is_deterministic(&self) -> bool {
        self.transforms.iter().all(Transform::is_deterministic)
    }

    /// All variants of one frame in policy order.
    pub fn variants(&self, frame: &SignalFrame, rng: &mut Rng) -> Vec<SignalFrame> {
        self.transforms
            .iter()
            .map(|&t| apply_transform(frame, t, rng))
            .collect()
    }
}

/// Keeps the first transform of every group that acts identically.
pub fn dedup_by_action(ts: &[Transform]) -> Vec<Transform> {
    let mut out: Vec<Transform> = Vec::new();
    for t in ts {
        if !out.iter().any(|u| u.same_action(t)) {
            out.push(*t);
        }
    }
    out
}

/// Expands `ds` by the policy's scale factor. Output order is source order
/// by policy order; frame `i` draws its noise from substream `(seed, i)`.
pub fn augment_dataset(ds: &Dataset, policy: &Policy, seed: u64) -> Result<Dataset> {
    if ds.is_empty() {
        return Err(invalid_input("cannot augment an empty dataset"));
    }
    let frames: Vec<LabeledFrame> = ds
        .frames()
        .par_iter()
        .enumerate()
        .flat_map_iter(|(idx, lf)| {
            let mut rng = substream(seed, &[AUGMENT_STREAM, idx as u64]);
            policy
                .variants(&lf.frame, &mut rng)
                .into_iter()
                .map(|frame| LabeledFrame {
                    frame,
                    label: lf.label,
                    snr_db: lf.snr_db,
                })
                .collect::<Vec<_>>()
        })
        .collect();
    ds.with_frames(
        frames,
        format!(
            "{}; augmented policy={} N={} seed={}",
            ds.provenance,
            policy.name,
            policy.scale_factor(),
            seed
        ),
    )
}
