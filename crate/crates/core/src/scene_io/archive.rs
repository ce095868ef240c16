//! File-level readers and writers. The format follows the file extension:
//! `.ndjson` holds one frame per line, `.rle` is the binary mask sidecar,
//! anything else is a single JSON document.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scene_io::json::{load_prediction, load_scene, save_prediction, save_scene};
use crate::scene_io::rle::{read_mask_sidecar, write_mask_sidecar, MaskFrame, MaskRecord};
use crate::scene_io::{CenterlineGeometry, CenterlinePred, PredictionSet, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchiveFormat {
    Json,
    Ndjson,
    Rle,
}

impl ArchiveFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("ndjson") => Self::Ndjson,
            Some(e) if e.eq_ignore_ascii_case("rle") => Self::Rle,
            _ => Self::Json,
        }
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Applies `parse` to every non-blank line, shifting parse-error line numbers
/// to file coordinates and prefixing validation paths with the frame index.
fn read_lines<T>(bytes: &[u8], parse: impl Fn(&[u8]) -> Result<T>) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in bytes.split(|&b| b == b'\n').enumerate() {
        if line.iter().all(|b| b.is_ascii_whitespace()) {
            continue;
        }
        let frame = out.len();
        out.push(parse(line).map_err(|e| match e {
            Error::Parse {
                line: _,
                column,
                message,
            } => Error::Parse {
                line: i + 1,
                column,
                message,
            },
            Error::Validation { path, message } => Error::Validation {
                path: format!("/{frame}{path}"),
                message,
            },
            other => other,
        })?);
    }
    Ok(out)
}

fn join_lines(docs: impl Iterator<Item = Vec<u8>>) -> Vec<u8> {
    let mut out = Vec::new();
    for d in docs {
        out.extend_from_slice(&d);
        out.push(b'\n');
    }
    out
}

fn single<T>(items: &[T], path: &Path) -> Result<()> {
    if items.len() == 1 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "{} holds a single frame, got {}; use .ndjson for batches",
            path.display(),
            items.len()
        )))
    }
}

pub fn read_scenes(path: impl AsRef<Path>) -> Result<Vec<Scene>> {
    let path = path.as_ref();
    let bytes = read_bytes(path)?;
    match ArchiveFormat::from_path(path) {
        ArchiveFormat::Json => Ok(vec![load_scene(&bytes)?]),
        ArchiveFormat::Ndjson => read_lines(&bytes, load_scene),
        ArchiveFormat::Rle => Err(Error::InvalidConfig(format!(
            "{}: mask sidecars hold predictions, not scenes",
            path.display()
        ))),
    }
}

pub fn write_scenes(path: impl AsRef<Path>, scenes: &[Scene]) -> Result<()> {
    let path = path.as_ref();
    match ArchiveFormat::from_path(path) {
        ArchiveFormat::Json => {
            single(scenes, path)?;
            write_bytes(path, &save_scene(&scenes[0]))
        }
        ArchiveFormat::Ndjson => write_bytes(path, &join_lines(scenes.iter().map(save_scene))),
        ArchiveFormat::Rle => Err(Error::InvalidConfig(format!(
            "{}: mask sidecars hold predictions, not scenes",
            path.display()
        ))),
    }
}

pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<PredictionSet>> {
    let path = path.as_ref();
    let bytes = read_bytes(path)?;
    match ArchiveFormat::from_path(path) {
        ArchiveFormat::Json => Ok(vec![load_prediction(&bytes)?]),
        ArchiveFormat::Ndjson => read_lines(&bytes, load_prediction),
        ArchiveFormat::Rle => read_mask_sidecar(&bytes)?
            .into_iter()
            .map(frame_to_prediction)
            .collect(),
    }
}

pub fn write_predictions(path: impl AsRef<Path>, preds: &[PredictionSet]) -> Result<()> {
    let path = path.as_ref();
    match ArchiveFormat::from_path(path) {
        ArchiveFormat::Json => {
            single(preds, path)?;
            write_bytes(path, &save_prediction(&preds[0]))
        }
        ArchiveFormat::Ndjson => write_bytes(path, &join_lines(preds.iter().map(save_prediction))),
        ArchiveFormat::Rle => {
            let frames = preds
                .iter()
                .map(prediction_to_frame)
                .collect::<Result<Vec<_>>>()?;
            write_bytes(path, &write_mask_sidecar(&frames)?)
        }
    }
}

fn frame_to_prediction(frame: MaskFrame) -> Result<PredictionSet> {
    let mut set = PredictionSet::empty(frame.frame_id);
    for (k, rec) in frame.masks.into_iter().enumerate() {
        if rec.index != k {
            return Err(Error::validation(
                format!("/{}/index", k),
                format!("mask indices must be 0..n in order, found {}", rec.index),
            ));
        }
        set.centerline_preds.push(CenterlinePred {
            confidence: rec.confidence,
            geometry: CenterlineGeometry::Mask {
                mask: rec.mask,
                roi: rec.roi,
            },
        });
    }
    set.validate()?;
    Ok(set)
}

/// Only mask-only prediction sets fit the sidecar; anything else would be
/// silently lost, so it is rejected.
fn prediction_to_frame(pred: &PredictionSet) -> Result<MaskFrame> {
    if !pred.traffic_preds.is_empty() || pred.ll_scores.rows() > 0 || pred.lt_scores.rows() > 0 {
        return Err(Error::InvalidConfig(format!(
            "frame {:?}: .rle sidecars carry masks only; use JSON for traffic and topology",
            pred.frame_id
        )));
    }
    let masks = pred
        .centerline_preds
        .iter()
        .enumerate()
        .map(|(index, p)| match &p.geometry {
            CenterlineGeometry::Mask { mask, roi } => Ok(MaskRecord {
                index,
                confidence: p.confidence,
                mask: mask.clone(),
                roi: *roi,
            }),
            _ => Err(Error::InvalidConfig(format!(
                "frame {:?} prediction {index} is not a mask",
                pred.frame_id
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MaskFrame {
        frame_id: pred.frame_id.clone(),
        masks,
    })
}
