//! RSIG v1 dataset container.
//!
//! Little-endian layout:
//!
//! ```text
//! "RSIG"  u32 version=1  u32 frame_count  u16 seq_len  u8 class_count  u8 reserved=0
//! class_count x (u8 byte_len, UTF-8 name)
//! frame_count x (u8 label, i8 snr_db, seq_len x (f32 I, f32 Q))
//! ```

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{format_err, Error, Result};
use crate::signal::{Dataset, IQSample, LabeledFrame, SignalFrame};

pub const MAGIC: [u8; 4] = *b"RSIG";
pub const VERSION: u32 = 1;

pub fn write<W: Write>(ds: &Dataset, mut w: W) -> Result<()> {
    let frame_count = u32::try_from(ds.len())
        .map_err(|_| format_err(format!("{} frames exceed u32 range", ds.len())))?;
    let seq_len = u16::try_from(ds.seq_len())
        .map_err(|_| format_err(format!("seq_len {} exceeds u16 range", ds.seq_len())))?;
    let mut buf = Vec::with_capacity(16 + ds.len() * (2 + ds.seq_len() * 8));
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&frame_count.to_le_bytes());
    buf.extend_from_slice(&seq_len.to_le_bytes());
    buf.push(ds.num_classes() as u8);
    buf.push(0);
    for name in ds.class_names() {
        let bytes = name.as_bytes();
        let len = u8::try_from(bytes.len())
            .map_err(|_| format_err(format!("class name {name:?} longer than 255 bytes")))?;
        buf.push(len);
        buf.extend_from_slice(bytes);
    }
    for f in ds.frames() {
        buf.push(f.label);
        buf.push(f.snr_db as u8);
        for s in f.frame.samples() {
            buf.extend_from_slice(&s.i.to_le_bytes());
            buf.extend_from_slice(&s.q.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn to_bytes(ds: &Dataset) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write(ds, &mut out)?;
    Ok(out)
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.data.len())
            .ok_or_else(|| format_err(format!("truncated RSIG data at byte {}", self.pos)))?;
        let out = &self.data[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

pub fn from_bytes(data: &[u8]) -> Result<Dataset> {
    let mut c = Cursor { data, pos: 0 };
    if c.take(4)? != MAGIC {
        return Err(format_err("bad magic, not an RSIG file"));
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(format_err(format!("unsupported RSIG version {version}")));
    }
    let frame_count = c.u32()? as usize;
    let seq_len = c.u16()? as usize;
    let class_count = c.u8()? as usize;
    let _reserved = c.u8()?;
    let mut class_names = Vec::with_capacity(class_count);
    for _ in 0..class_count {
        let len = c.u8()? as usize;
        let name = std::str::from_utf8(c.take(len)?)
            .map_err(|e| format_err(format!("class name is not UTF-8: {e}")))?;
        class_names.push(name.to_string());
    }
    let record = 2 + seq_len * 8;
    if data.len() - c.pos != frame_count * record {
        return Err(format_err(format!(
            "expected {} bytes of frame records, found {}",
            frame_count * record,
            data.len() - c.pos
        )));
    }
    let mut frames = Vec::with_capacity(frame_count);
    for _ in 0..frame_count {
        let label = c.u8()?;
        let snr_db = c.u8()? as i8;
        let raw = c.take(seq_len * 8)?;
        let samples = raw
            .chunks_exact(8)
            .map(|b| {
                IQSample::new(
                    f32::from_le_bytes(b[0..4].try_into().unwrap()),
                    f32::from_le_bytes(b[4..8].try_into().unwrap()),
                )
            })
            .collect();
        frames.push(LabeledFrame {
            frame: SignalFrame::new(samples).map_err(|e| format_err(e.to_string()))?,
            label,
            snr_db,
        });
    }
    Dataset::new(frames, class_names, seq_len, "RSIG v1").map_err(|e| match e {
        Error::InvalidInput(m) => format_err(m),
        other => other,
    })
}

pub fn read<R: Read>(mut r: R) -> Result<Dataset> {
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    from_bytes(&data)
}

pub fn save(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_bytes(ds)?)?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let mut ds = from_bytes(&fs::read(path)?)?;
    ds.provenance = format!(
        "RSIG v1: {} frames, classes {}, length {}",
        ds.len(),
        ds.class_names().join(","),
        ds.seq_len()
    );
    Ok(ds)
}
