//! Run-length encoding of binary masks, inline (JSON `rle` field) and as a
//! binary `.rle` sidecar for multi-frame batches.
//!
//! Runs alternate zero / one cells in row-major order, starting with zeros
//! (a leading run may be empty).
//!
//! Sidecar layout, little-endian:
//!
//! ```text
//! magic "LTRLE\0" | version u16 | frame count u32
//! per frame:  id length u32 | id bytes | mask count u32
//! per mask:   index u32 | confidence f64 | rows u32 | cols u32
//!             | x_min x_max y_min y_max f64 | direction u8 | mask confidence f64
//!             | run count u32 | runs u32...
//! ```

use crate::error::{Error, Result};
use crate::geometry::{DirectionLabel, Roi};
use crate::mask_codec::InstanceMask;

const MAGIC: &[u8; 6] = b"LTRLE\0";
const VERSION: u16 = 1;

pub fn rle_encode(values: &[f64]) -> Vec<u32> {
    let mut runs = Vec::new();
    let mut current = false;
    let mut len = 0u32;
    for &v in values {
        let on = v != 0.0;
        if on != current {
            runs.push(len);
            len = 0;
            current = on;
        }
        len += 1;
    }
    runs.push(len);
    runs
}

pub fn rle_decode(runs: &[u32], expected: usize) -> Result<Vec<f64>> {
    let total: u64 = runs.iter().map(|&r| r as u64).sum();
    if total != expected as u64 {
        return Err(Error::InvalidGrid(format!(
            "runs cover {total} cells, expected {expected}"
        )));
    }
    let mut out = Vec::with_capacity(expected);
    for (i, &r) in runs.iter().enumerate() {
        let v = if i % 2 == 0 { 0.0 } else { 1.0 };
        out.extend(std::iter::repeat_n(v, r as usize));
    }
    Ok(out)
}

/// One mask instance inside a sidecar frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskRecord {
    /// Index of the instance in the frame's prediction list.
    pub index: usize,
    pub confidence: f64,
    pub mask: InstanceMask<f64>,
    pub roi: Roi<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskFrame {
    pub frame_id: String,
    pub masks: Vec<MaskRecord>,
}

fn direction_code(d: DirectionLabel) -> u8 {
    match d {
        DirectionLabel::Up => 0,
        DirectionLabel::Down => 1,
        DirectionLabel::Left => 2,
        DirectionLabel::Right => 3,
    }
}

pub fn write_mask_sidecar(frames: &[MaskFrame]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(frames.len() as u32).to_le_bytes());
    for frame in frames {
        out.extend_from_slice(&(frame.frame_id.len() as u32).to_le_bytes());
        out.extend_from_slice(frame.frame_id.as_bytes());
        out.extend_from_slice(&(frame.masks.len() as u32).to_le_bytes());
        for rec in &frame.masks {
            if !rec.mask.is_binary() {
                return Err(Error::InvalidGrid(format!(
                    "frame {:?} mask {} is not binary; use JSON data arrays",
                    frame.frame_id, rec.index
                )));
            }
            out.extend_from_slice(&(rec.index as u32).to_le_bytes());
            out.extend_from_slice(&rec.confidence.to_le_bytes());
            out.extend_from_slice(&(rec.mask.rows() as u32).to_le_bytes());
            out.extend_from_slice(&(rec.mask.cols() as u32).to_le_bytes());
            for v in [rec.roi.x_min, rec.roi.x_max, rec.roi.y_min, rec.roi.y_max] {
                out.extend_from_slice(&v.to_le_bytes());
            }
            out.push(direction_code(rec.mask.direction));
            out.extend_from_slice(&rec.mask.confidence.to_le_bytes());
            let runs = rle_encode(rec.mask.probs());
            out.extend_from_slice(&(runs.len() as u32).to_le_bytes());
            for r in runs {
                out.extend_from_slice(&r.to_le_bytes());
            }
        }
    }
    Ok(out)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Parse {
                line: 0,
                column: self.pos,
                message: "truncated mask sidecar".into(),
            });
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn bad(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: 0,
            column: self.pos,
            message: message.into(),
        }
    }
}

pub fn read_mask_sidecar(bytes: &[u8]) -> Result<Vec<MaskFrame>> {
    let mut rd = Reader { buf: bytes, pos: 0 };
    if rd.take(MAGIC.len())? != MAGIC {
        return Err(rd.bad("not a mask sidecar (bad magic)"));
    }
    let version = u16::from_le_bytes(rd.take(2)?.try_into().unwrap());
    if version != VERSION {
        return Err(rd.bad(format!("unsupported sidecar version {version}")));
    }
    let n_frames = rd.u32()? as usize;
    let mut frames = Vec::with_capacity(n_frames.min(1 << 16));
    for _ in 0..n_frames {
        let id_len = rd.u32()? as usize;
        let frame_id =
            String::from_utf8(rd.take(id_len)?.to_vec()).map_err(|_| rd.bad("frame id is not UTF-8"))?;
        let n_masks = rd.u32()? as usize;
        let mut masks = Vec::with_capacity(n_masks.min(1 << 16));
        for _ in 0..n_masks {
            let index = rd.u32()? as usize;
            let confidence = rd.f64()?;
            let rows = rd.u32()? as usize;
            let cols = rd.u32()? as usize;
            let (x0, x1, y0, y1) = (rd.f64()?, rd.f64()?, rd.f64()?, rd.f64()?);
            let direction = match rd.take(1)?[0] {
                0 => DirectionLabel::Up,
                1 => DirectionLabel::Down,
                2 => DirectionLabel::Left,
                3 => DirectionLabel::Right,
                other => return Err(rd.bad(format!("bad direction code {other}"))),
            };
            let mask_confidence = rd.f64()?;
            let n_runs = rd.u32()? as usize;
            let runs = (0..n_runs).map(|_| rd.u32()).collect::<Result<Vec<_>>>()?;
            let probs = rle_decode(&runs, rows * cols)?;
            masks.push(MaskRecord {
                index,
                confidence,
                mask: InstanceMask::new(rows, cols, probs, direction, mask_confidence)?,
                roi: Roi::new(x0, x1, y0, y1)?,
            });
        }
        frames.push(MaskFrame { frame_id, masks });
    }
    if rd.pos != bytes.len() {
        return Err(rd.bad("trailing bytes after last frame"));
    }
    Ok(frames)
}
