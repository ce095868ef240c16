//! Canonical JSON: object keys sorted, floats in shortest round-trip form.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{BezierCurve, DirectionLabel, Point3, Polyline, Roi};
use crate::mask_codec::InstanceMask;
use crate::metrics::{Box2D, TrafficCategory};
use crate::scene_io::rle::{rle_decode, rle_encode};
use crate::scene_io::{
    Centerline, CenterlineGeometry, CenterlinePred, PredictionSet, Scene, TrafficElement, TrafficPred,
};
use crate::topology::ScoreMatrix;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoiDoc {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CenterlineDoc {
    id: String,
    points: Vec<[f64; 3]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrafficElementDoc {
    id: String,
    #[serde(rename = "box")]
    bbox: [f64; 4],
    category: TrafficCategory,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    frame_id: String,
    #[serde(default)]
    roi: Option<RoiDoc>,
    centerlines: Vec<CenterlineDoc>,
    #[serde(default)]
    traffic_elements: Vec<TrafficElementDoc>,
    #[serde(default)]
    topology_ll: Vec<[String; 2]>,
    #[serde(default)]
    topology_lt: Vec<[String; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaskDoc {
    rows: usize,
    cols: usize,
    roi: RoiDoc,
    direction: String,
    confidence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    data: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rle: Option<Vec<u32>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CenterlinePredDoc {
    confidence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    polyline: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mask: Option<MaskDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bezier: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    direction: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrafficPredDoc {
    confidence: f64,
    #[serde(rename = "box")]
    bbox: [f64; 4],
    category: TrafficCategory,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScoreDoc {
    rows: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PredictionDoc {
    frame_id: String,
    #[serde(default)]
    centerline_preds: Vec<CenterlinePredDoc>,
    #[serde(default)]
    traffic_preds: Vec<TrafficPredDoc>,
    #[serde(default)]
    ll_scores: ScoreDoc,
    #[serde(default)]
    lt_scores: ScoreDoc,
}

fn parse_value(bytes: &[u8]) -> Result<Value> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(key),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

fn from_value<T: DeserializeOwned>(value: Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = json_pointer(e.path());
        Error::validation(path, e.into_inner().to_string())
    })
}

fn to_canonical_bytes<T: Serialize>(doc: &T) -> Vec<u8> {
    // serde_json's default map is ordered, so this sorts keys.
    let value = serde_json::to_value(doc).expect("documents contain only finite numbers");
    serde_json::to_vec(&value).expect("value serializes")
}

fn roi_from_doc(doc: &RoiDoc, path: &str) -> Result<Roi<f64>> {
    Roi::new(doc.x_min, doc.x_max, doc.y_min, doc.y_max).map_err(|e| Error::validation(path, e.to_string()))
}

fn roi_to_doc(roi: &Roi<f64>) -> RoiDoc {
    RoiDoc {
        x_min: roi.x_min,
        x_max: roi.x_max,
        y_min: roi.y_min,
        y_max: roi.y_max,
    }
}

fn polyline_from_doc(points: &[[f64; 3]], path: &str) -> Result<Polyline<f64>> {
    Polyline::from_f64(points).map_err(|e| Error::validation(path, e.to_string()))
}

fn polyline_to_doc(p: &Polyline<f64>) -> Vec<[f64; 3]> {
    p.points().iter().map(|q| [q.x, q.y, q.z]).collect()
}

fn box_from_doc(b: [f64; 4], category: TrafficCategory, path: &str) -> Result<Box2D> {
    Box2D::new(b[0], b[1], b[2], b[3], category).map_err(|e| Error::validation(path, e.to_string()))
}

fn direction_from_doc(s: &str, path: &str) -> Result<DirectionLabel> {
    s.parse()
        .map_err(|_| Error::validation(path, format!("unknown direction label {s:?}")))
}

/// Parses a `*.scene.json` document.
pub fn load_scene(bytes: &[u8]) -> Result<Scene> {
    let doc: SceneDoc = from_value(parse_value(bytes)?)?;
    let roi = match &doc.roi {
        Some(r) => roi_from_doc(r, "/roi")?,
        None => Roi::default(),
    };
    let centerlines = doc
        .centerlines
        .iter()
        .enumerate()
        .map(|(i, c)| {
            Ok(Centerline {
                id: c.id.clone(),
                polyline: polyline_from_doc(&c.points, &format!("/centerlines/{i}/points"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let traffic_elements = doc
        .traffic_elements
        .iter()
        .enumerate()
        .map(|(i, t)| {
            Ok(TrafficElement {
                id: t.id.clone(),
                bbox: box_from_doc(t.bbox, t.category, &format!("/traffic_elements/{i}/box"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pairs = |v: Vec<[String; 2]>| v.into_iter().map(|[a, b]| (a, b)).collect();
    Scene::new(
        doc.frame_id,
        roi,
        centerlines,
        traffic_elements,
        pairs(doc.topology_ll),
        pairs(doc.topology_lt),
    )
}

/// Canonical single-line serialization of a scene.
pub fn save_scene(scene: &Scene) -> Vec<u8> {
    let doc = SceneDoc {
        frame_id: scene.frame_id.clone(),
        roi: Some(roi_to_doc(&scene.roi)),
        centerlines: scene
            .centerlines
            .iter()
            .map(|c| CenterlineDoc {
                id: c.id.clone(),
                points: polyline_to_doc(&c.polyline),
            })
            .collect(),
        traffic_elements: scene
            .traffic_elements
            .iter()
            .map(|t| TrafficElementDoc {
                id: t.id.clone(),
                bbox: [t.bbox.x1, t.bbox.y1, t.bbox.x2, t.bbox.y2],
                category: t.bbox.category,
            })
            .collect(),
        topology_ll: scene
            .topology_ll
            .iter()
            .map(|(a, b)| [a.clone(), b.clone()])
            .collect(),
        topology_lt: scene
            .topology_lt
            .iter()
            .map(|(a, b)| [a.clone(), b.clone()])
            .collect(),
    };
    to_canonical_bytes(&doc)
}

fn mask_from_doc(doc: &MaskDoc, path: &str) -> Result<(InstanceMask<f64>, Roi<f64>)> {
    let roi = roi_from_doc(&doc.roi, &format!("{path}/roi"))?;
    let direction = direction_from_doc(&doc.direction, &format!("{path}/direction"))?;
    let n = doc.rows * doc.cols;
    let probs = match (&doc.data, &doc.rle) {
        (Some(data), None) => data.clone(),
        (None, Some(runs)) => {
            rle_decode(runs, n).map_err(|e| Error::validation(format!("{path}/rle"), e.to_string()))?
        }
        _ => {
            return Err(Error::validation(
                path,
                "mask needs exactly one of \"data\" or \"rle\"",
            ))
        }
    };
    let mask = InstanceMask::new(doc.rows, doc.cols, probs, direction, doc.confidence)
        .map_err(|e| Error::validation(path, e.to_string()))?;
    Ok((mask, roi))
}

fn mask_to_doc(mask: &InstanceMask<f64>, roi: &Roi<f64>) -> MaskDoc {
    let (data, rle) = if mask.is_binary() {
        (None, Some(rle_encode(mask.probs())))
    } else {
        (Some(mask.probs().to_vec()), None)
    };
    MaskDoc {
        rows: mask.rows(),
        cols: mask.cols(),
        roi: roi_to_doc(roi),
        direction: mask.direction.as_str().to_string(),
        confidence: mask.confidence,
        data,
        rle,
    }
}

fn bezier_from_doc(cps: &[[f64; 3]], path: &str) -> Result<BezierCurve<f64>> {
    if cps.len() != 5 {
        return Err(Error::validation(
            path,
            format!("{} control points, exactly 5 required", cps.len()),
        ));
    }
    if cps.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::validation(path, "non-finite control point"));
    }
    Ok(BezierCurve::new(std::array::from_fn(|i| {
        Point3::new(cps[i][0], cps[i][1], cps[i][2])
    })))
}

fn bezier_to_doc(b: &BezierCurve<f64>) -> Vec<[f64; 3]> {
    b.control_points.iter().map(|q| [q.x, q.y, q.z]).collect()
}

fn centerline_pred_from_doc(doc: &CenterlinePredDoc, path: &str) -> Result<CenterlinePred> {
    let geometry = match (&doc.polyline, &doc.mask, &doc.bezier, &doc.direction) {
        (Some(p), None, None, None) => {
            CenterlineGeometry::Polyline(polyline_from_doc(p, &format!("{path}/polyline"))?)
        }
        (None, Some(m), None, None) => {
            let (mask, roi) = mask_from_doc(m, &format!("{path}/mask"))?;
            CenterlineGeometry::Mask { mask, roi }
        }
        (None, None, Some(b), None) => {
            CenterlineGeometry::Bezier(bezier_from_doc(b, &format!("{path}/bezier"))?)
        }
        (None, Some(m), Some(b), Some(d)) => {
            let (mask, roi) = mask_from_doc(m, &format!("{path}/mask"))?;
            CenterlineGeometry::MaskBezier {
                mask,
                roi,
                bezier: bezier_from_doc(b, &format!("{path}/bezier"))?,
                direction: direction_from_doc(d, &format!("{path}/direction"))?,
            }
        }
        _ => {
            return Err(Error::validation(
                path,
                "expected one of: polyline, mask, bezier, or mask + bezier + direction",
            ))
        }
    };
    Ok(CenterlinePred {
        confidence: doc.confidence,
        geometry,
    })
}

fn centerline_pred_to_doc(p: &CenterlinePred) -> CenterlinePredDoc {
    let mut doc = CenterlinePredDoc {
        confidence: p.confidence,
        polyline: None,
        mask: None,
        bezier: None,
        direction: None,
    };
    match &p.geometry {
        CenterlineGeometry::Polyline(pl) => doc.polyline = Some(polyline_to_doc(pl)),
        CenterlineGeometry::Mask { mask, roi } => doc.mask = Some(mask_to_doc(mask, roi)),
        CenterlineGeometry::Bezier(b) => doc.bezier = Some(bezier_to_doc(b)),
        CenterlineGeometry::MaskBezier {
            mask,
            roi,
            bezier,
            direction,
        } => {
            doc.mask = Some(mask_to_doc(mask, roi));
            doc.bezier = Some(bezier_to_doc(bezier));
            doc.direction = Some(direction.as_str().to_string());
        }
    }
    doc
}

fn scores_from_doc(doc: ScoreDoc, path: &str) -> Result<ScoreMatrix<f64>> {
    if doc.values.len() != doc.rows.len() || doc.values.iter().any(|r| r.len() != doc.cols.len()) {
        return Err(Error::validation(
            format!("{path}/values"),
            format!("expected {} rows of {} values", doc.rows.len(), doc.cols.len()),
        ));
    }
    ScoreMatrix::new(doc.values.into_iter().flatten().collect(), doc.rows, doc.cols)
        .map_err(|e| Error::validation(format!("{path}/values"), e.to_string()))
}

fn scores_to_doc(m: &ScoreMatrix<f64>) -> ScoreDoc {
    ScoreDoc {
        rows: m.row_ids.clone(),
        cols: m.col_ids.clone(),
        values: (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| m.get(r, c)).collect())
            .collect(),
    }
}

/// Parses a `*.pred.json` document.
pub fn load_prediction(bytes: &[u8]) -> Result<PredictionSet> {
    let doc: PredictionDoc = from_value(parse_value(bytes)?)?;
    let centerline_preds = doc
        .centerline_preds
        .iter()
        .enumerate()
        .map(|(i, c)| centerline_pred_from_doc(c, &format!("/centerline_preds/{i}")))
        .collect::<Result<Vec<_>>>()?;
    let traffic_preds = doc
        .traffic_preds
        .iter()
        .enumerate()
        .map(|(i, t)| {
            Ok(TrafficPred {
                confidence: t.confidence,
                bbox: box_from_doc(t.bbox, t.category, &format!("/traffic_preds/{i}/box"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let set = PredictionSet {
        frame_id: doc.frame_id,
        centerline_preds,
        traffic_preds,
        ll_scores: scores_from_doc(doc.ll_scores, "/ll_scores")?,
        lt_scores: scores_from_doc(doc.lt_scores, "/lt_scores")?,
    };
    set.validate()?;
    Ok(set)
}

/// Canonical single-line serialization of a prediction set.
pub fn save_prediction(pred: &PredictionSet) -> Vec<u8> {
    let doc = PredictionDoc {
        frame_id: pred.frame_id.clone(),
        centerline_preds: pred.centerline_preds.iter().map(centerline_pred_to_doc).collect(),
        traffic_preds: pred
            .traffic_preds
            .iter()
            .map(|t| TrafficPredDoc {
                confidence: t.confidence,
                bbox: [t.bbox.x1, t.bbox.y1, t.bbox.x2, t.bbox.y2],
                category: t.bbox.category,
            })
            .collect(),
        ll_scores: scores_to_doc(&pred.ll_scores),
        lt_scores: scores_to_doc(&pred.lt_scores),
    };
    to_canonical_bytes(&doc)
}
