//! Direction-labeled instance-mask centerlines: encoding to and decoding from
//! BEV masks, Bezier fusion, lane-topology evaluation metrics and a synthetic
//! scene generator.
//!
//! Numeric kernels are generic over [`Real`] (`f32` or `f64`); file formats
//! and evaluation work in `f64`. The aliases below name the common
//! instantiations.

// Negated float comparisons are the NaN-rejecting form used in validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod mask_codec;
pub mod metrics;
pub mod pipeline;
pub mod scalar;
pub mod scene_io;
pub mod topology;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Point3D = geometry::Point3<f64>;
pub type Polyline3D = geometry::Polyline<f64>;
pub type Bezier3D = geometry::BezierCurve<f64>;
pub type Roi2D = geometry::Roi<f64>;
pub type Grid = mask_codec::GridSpec<f64>;
pub type Mask = mask_codec::InstanceMask<f64>;
pub type Scores = topology::ScoreMatrix<f64>;

pub type Point3F = geometry::Point3<f32>;
pub type Polyline3F = geometry::Polyline<f32>;
pub type MaskF = mask_codec::InstanceMask<f32>;
