use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{bezier_sample, BezierCurve, DirectionLabel, Polyline};
use crate::mask_codec::{decode_mask, DecodeConfig, GridSpec, InstanceMask};
use crate::scalar::Real;

/// Which prediction branch supplies the final centerline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FusionPolicy {
    #[default]
    MaskOnly,
    BezierOnly,
    /// Bezier for Left/Right labels, mask for Up/Down.
    DirectionalFusion,
}

impl FusionPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::MaskOnly => "mask",
            Self::BezierOnly => "bezier",
            Self::DirectionalFusion => "fusion",
        }
    }
}

impl fmt::Display for FusionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FusionPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mask" | "mask-only" => Ok(Self::MaskOnly),
            "bezier" | "bezier-only" => Ok(Self::BezierOnly),
            "fusion" | "directional" | "directional-fusion" => Ok(Self::DirectionalFusion),
            _ => Err(Error::InvalidConfig(format!("unknown fusion policy {s:?}"))),
        }
    }
}

/// Picks the branch dictated by `policy` for an instance labelled `label`.
pub fn fuse_predictions<T: Real>(
    mask_poly: Result<Polyline<T>>,
    bezier_poly: Polyline<T>,
    label: DirectionLabel,
    policy: FusionPolicy,
) -> Result<Polyline<T>> {
    match policy {
        FusionPolicy::MaskOnly => mask_poly,
        FusionPolicy::BezierOnly => Ok(bezier_poly),
        FusionPolicy::DirectionalFusion if label.is_lateral() => Ok(bezier_poly),
        FusionPolicy::DirectionalFusion => mask_poly,
    }
}

/// Full two-branch resolution of one instance.
///
/// When the mask decodes, the Bezier endpoints are pinned to the decoded
/// polyline's endpoints before sampling; otherwise the curve is sampled as
/// predicted.
pub fn resolve_mask_bezier<T: Real>(
    mask: &InstanceMask<T>,
    curve: &BezierCurve<T>,
    label: DirectionLabel,
    grid: &GridSpec<T>,
    cfg: &DecodeConfig,
    policy: FusionPolicy,
) -> Result<Polyline<T>> {
    let mask_poly = decode_mask(mask, grid, cfg);
    let curve = match &mask_poly {
        Ok(pl) => curve.with_endpoints(pl.first(), pl.last()),
        Err(_) => *curve,
    };
    let needs_bezier = match policy {
        FusionPolicy::MaskOnly => false,
        FusionPolicy::BezierOnly => true,
        FusionPolicy::DirectionalFusion => label.is_lateral(),
    };
    if !needs_bezier {
        return mask_poly;
    }
    let bezier_poly = bezier_sample(&curve, cfg.sample_count)?;
    fuse_predictions(mask_poly, bezier_poly, label, policy)
}
