//! Synthetic labeled I/Q frames for the eleven modulation classes.
//!
//! Each frame is built from its own random substream keyed by
//! `(seed, class, snr, index)`, so generation parallelizes without changing
//! the output.

mod channel;
mod modulate;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

pub use channel::{add_awgn, impair as impair_complex, propagate, ChannelConfig, ImpairmentRanges};
pub use modulate::{
    constellation, convolve, nearest, rrc_taps, SymbolTrace, AM_DSB_DEPTH, CPFSK_INDEX, GFSK_BT,
    GFSK_INDEX, RRC_ROLLOFF, RRC_SPAN_SYMBOLS, SAMPLES_PER_SYMBOL, WBFM_DEVIATION,
};

use crate::error::{invalid_argument, Result};
use crate::rng::{substream, Rng};
use crate::signal::{Dataset, IQSample, LabeledFrame, SignalFrame};

const GEN_STREAM: u64 = 0x6E4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModClass {
    Bpsk,
    Qpsk,
    Psk8,
    Cpfsk,
    Gfsk,
    Pam4,
    Qam16,
    Qam64,
    AmDsb,
    AmSsb,
    Wbfm,
}

impl ModClass {
    /// Canonical order; labels of a full dataset index this list.
    pub const ALL: [ModClass; 11] = [
        ModClass::Bpsk,
        ModClass::Qpsk,
        ModClass::Psk8,
        ModClass::Cpfsk,
        ModClass::Gfsk,
        ModClass::Pam4,
        ModClass::Qam16,
        ModClass::Qam64,
        ModClass::AmDsb,
        ModClass::AmSsb,
        ModClass::Wbfm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModClass::Bpsk => "BPSK",
            ModClass::Qpsk => "QPSK",
            ModClass::Psk8 => "8PSK",
            ModClass::Cpfsk => "CPFSK",
            ModClass::Gfsk => "GFSK",
            ModClass::Pam4 => "PAM4",
            ModClass::Qam16 => "QAM16",
            ModClass::Qam64 => "QAM64",
            ModClass::AmDsb => "AM-DSB",
            ModClass::AmSsb => "AM-SSB",
            ModClass::Wbfm => "WBFM",
        }
    }

    pub fn is_linear(&self) -> bool {
        constellation(*self).is_some()
    }
}

impl fmt::Display for ModClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModClass {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_uppercase();
        ModClass::ALL
            .into_iter()
            .find(|c| c.name().replace('-', "") == key || (key == "PSK8" && *c == ModClass::Psk8))
            .ok_or_else(|| invalid_argument(format!("unknown modulation class {s:?}")))
    }
}

/// Parses `all` or a comma-separated class list.
pub fn parse_class_list(s: &str) -> Result<Vec<ModClass>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(ModClass::ALL.to_vec());
    }
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

/// Parses `start:stop:step` (inclusive) or a single value.
pub fn parse_snr_grid(s: &str) -> Result<Vec<i32>> {
    let nums: Vec<i32> = s
        .split(':')
        .map(|p| {
            p.trim()
                .parse::<i32>()
                .map_err(|_| invalid_argument(format!("bad SNR grid {s:?}")))
        })
        .collect::<Result<_>>()?;
    match nums[..] {
        [v] => Ok(vec![v]),
        [start, stop, step] if step > 0 && start <= stop => {
            Ok((start..=stop).step_by(step as usize).collect())
        }
        _ => Err(invalid_argument(format!(
            "SNR grid {s:?} must be start:stop:step with step > 0 and start <= stop"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub classes: Vec<ModClass>,
    pub snr_grid: Vec<i32>,
    pub frames_per_class_per_snr: usize,
    pub seq_len: usize,
    pub seed: u64,
    pub impairments: ImpairmentRanges,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            classes: ModClass::ALL.to_vec(),
            snr_grid: (-20..=18).step_by(2).collect(),
            frames_per_class_per_snr: 1000,
            seq_len: 128,
            seed: 0,
            impairments: ImpairmentRanges::default(),
        }
    }
}

impl GenConfig {
    pub fn total_frames(&self) -> usize {
        self.classes.len() * self.snr_grid.len() * self.frames_per_class_per_snr
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(invalid_argument("class list is empty"));
        }
        if self.snr_grid.is_empty() {
            return Err(invalid_argument("SNR grid is empty"));
        }
        if let Some(s) = self.snr_grid.iter().find(|s| i8::try_from(**s).is_err()) {
            return Err(invalid_argument(format!("SNR {s} dB outside -128..=127")));
        }
        for (i, c) in self.classes.iter().enumerate() {
            if self.classes[..i].contains(c) {
                return Err(invalid_argument(format!("class {c} listed twice")));
            }
        }
        if self.seq_len < 2 || self.seq_len > u16::MAX as usize {
            return Err(invalid_argument(format!(
                "seq_len {} outside 2..=65535",
                self.seq_len
            )));
        }
        if self.frames_per_class_per_snr == 0 {
            return Err(invalid_argument(
                "frames per class per SNR must be positive",
            ));
        }
        let imp = &self.impairments;
        if !(imp.max_cfo >= 0.0 && imp.max_cfo < 0.5) {
            return Err(invalid_argument(format!(
                "max CFO {} outside [0, 0.5)",
                imp.max_cfo
            )));
        }
        if !(imp.max_sro_ppm >= 0.0 && imp.max_sro_ppm.is_finite()) {
            return Err(invalid_argument("max SRO must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        let classes: Vec<&str> = self.classes.iter().map(ModClass::name).collect();
        let imp = &self.impairments;
        format!(
            "generator classes={} snr={:?} per_class={} len={} seed={} random_phase={} max_cfo={} \
             max_sro_ppm={} multipath={} rrc_rolloff={} sps={} rrc_span={} cpfsk_h={} gfsk_h={} \
             gfsk_bt={} am_depth={} wbfm_dev={}",
            classes.join(","),
            self.snr_grid,
            self.frames_per_class_per_snr,
            self.seq_len,
            self.seed,
            imp.random_phase,
            imp.max_cfo,
            imp.max_sro_ppm,
            imp.multipath,
            RRC_ROLLOFF,
            SAMPLES_PER_SYMBOL,
            RRC_SPAN_SYMBOLS,
            CPFSK_INDEX,
            GFSK_INDEX,
            GFSK_BT,
            AM_DSB_DEPTH,
            WBFM_DEVIATION
        )
    }
}

fn to_frame(x: &[Complex64]) -> SignalFrame {
    SignalFrame::from_vec_unchecked(
        x.iter()
            .map(|c| IQSample::new(c.re as f32, c.im as f32))
            .collect(),
    )
}

/// Clean, unit-average-power baseband frame.
pub fn modulate(class: ModClass, seq_len: usize, rng: &mut Rng) -> SignalFrame {
    assert!(seq_len >= 2, "seq_len must be at least 2");
    to_frame(&modulate::synthesize(class, seq_len, rng).samples)
}

/// Applies a channel realization to a stored frame.
pub fn impair(frame: &SignalFrame, ch: &ChannelConfig, rng: &mut Rng) -> SignalFrame {
    let x: Vec<Complex64> = frame
        .samples()
        .iter()
        .map(|s| Complex64::new(s.i as f64, s.q as f64))
        .collect();
    to_frame(&channel::impair(&x, ch, rng))
}

/// Everything known about one generated frame, kept in double precision.
#[derive(Clone, Debug)]
pub struct FrameRecord {
    pub clean: Vec<Complex64>,
    pub channel: ChannelConfig,
    /// Clean frame after the channel but before noise.
    pub faded: Vec<Complex64>,
    pub received: Vec<Complex64>,
    pub trace: Option<SymbolTrace>,
}

/// Regenerates frame `index` of stratum `(class, snr_db)` exactly as
/// [`generate_dataset`] builds it.
pub fn synthesize_frame(
    cfg: &GenConfig,
    class: ModClass,
    snr_db: i32,
    index: usize,
) -> FrameRecord {
    let mut rng = substream(
        cfg.seed,
        &[GEN_STREAM, class as u64, snr_db as i64 as u64, index as u64],
    );
    let synth = modulate::synthesize(class, cfg.seq_len, &mut rng);
    let ch = cfg.impairments.draw(Some(snr_db as f64), &mut rng);
    let faded = channel::propagate(&synth.samples, &ch);
    let mut received = faded.clone();
    add_awgn(&mut received, snr_db as f64, &mut rng);
    FrameRecord {
        clean: synth.samples,
        channel: ch,
        faded,
        received,
        trace: synth.trace,
    }
}

/// Frames ordered by class, then SNR, then index within the stratum.
pub fn generate_dataset(cfg: &GenConfig) -> Result<Dataset> {
    cfg.validate()?;
    let per = cfg.frames_per_class_per_snr;
    let strata: Vec<(u8, ModClass, i32)> = cfg
        .classes
        .iter()
        .enumerate()
        .flat_map(|(label, &c)| cfg.snr_grid.iter().map(move |&s| (label as u8, c, s)))
        .collect();
    let frames: Vec<LabeledFrame> = (0..strata.len() * per)
        .into_par_iter()
        .map(|k| {
            let (label, class, snr) = strata[k / per];
            let rec = synthesize_frame(cfg, class, snr, k % per);
            LabeledFrame {
                frame: to_frame(&rec.received),
                label,
                snr_db: snr as i8,
            }
        })
        .collect();
    Dataset::new(
        frames,
        cfg.classes.iter().map(|c| c.name().to_string()).collect(),
        cfg.seq_len,
        cfg.describe(),
    )
}
