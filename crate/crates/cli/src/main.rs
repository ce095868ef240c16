use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use lanetopo::geometry::Roi;
use lanetopo::mask_codec::{DecodeConfig, FusionPolicy, GridSpec, SampleSpacing};
use lanetopo::metrics::{evaluate_frames, EvalOptions, EvalSummary, MetricConfig};
use lanetopo::pipeline::{decode_predictions, rasterize_scene, DEFAULT_THICKNESS};
use lanetopo::scene_io::{
    generate_synthetic_scene, read_predictions, read_scenes, write_predictions, write_scenes, ArchiveFormat,
    PredictionSet, Scene, SynthConfig,
};
use lanetopo::topology::ScoreMatrix;

#[derive(Debug, Parser)]
#[command(
    name = "lanetopo",
    version,
    about = "Instance-mask centerline codec and lane-topology evaluation"
)]
struct Cli {
    /// Worker threads for frame-level parallelism (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate synthetic scenes.
    Synth {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output archive (.json for one frame, .ndjson for several).
        #[arg(long)]
        out: PathBuf,
        /// Number of frames; frame i uses seed + i.
        #[arg(long, default_value_t = 1)]
        frames: u64,
        #[command(flatten)]
        synth: SynthArgs,
    },
    /// Burn scene centerlines into instance masks.
    Rasterize {
        #[arg(long)]
        scene: PathBuf,
        /// Output (.json, .ndjson, or .rle for masks only).
        #[arg(long)]
        out: PathBuf,
        /// Band width around the centerline, meters.
        #[arg(long, default_value_t = DEFAULT_THICKNESS)]
        thickness: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Decode mask / Bezier predictions to polylines.
    Decode {
        #[arg(long)]
        masks: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, ignore_case = true, default_value_t = Policy::Mask)]
        policy: Policy,
        #[command(flatten)]
        decode: DecodeArgs,
    },
    /// Score predictions against ground truth.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long, value_enum, ignore_case = true, default_value_t = Format::Table)]
        format: Format,
        #[arg(long, value_enum, ignore_case = true, default_value_t = Policy::Mask)]
        policy: Policy,
        #[command(flatten)]
        decode: DecodeArgs,
        #[command(flatten)]
        metric: MetricArgs,
    },
    /// Synthesize, rasterize, decode and score in memory.
    Roundtrip {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        frames: u64,
        #[arg(long, default_value_t = DEFAULT_THICKNESS)]
        thickness: f64,
        #[arg(long, value_enum, ignore_case = true, default_value_t = Format::Table)]
        format: Format,
        #[arg(long, value_enum, ignore_case = true, default_value_t = Policy::Mask)]
        policy: Policy,
        #[command(flatten)]
        synth: SynthArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        decode: DecodeArgs,
        #[command(flatten)]
        metric: MetricArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Policy {
    #[value(alias = "mask-only")]
    Mask,
    #[value(alias = "bezier-only")]
    Bezier,
    #[value(alias = "directional", alias = "directional-fusion")]
    Fusion,
}

impl From<Policy> for FusionPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Mask => FusionPolicy::MaskOnly,
            Policy::Bezier => FusionPolicy::BezierOnly,
            Policy::Fusion => FusionPolicy::DirectionalFusion,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Spacing {
    Axis,
    ArcLength,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    n_straight: Option<usize>,
    #[arg(long)]
    n_arc: Option<usize>,
    #[arg(long)]
    n_uturn: Option<usize>,
    #[arg(long)]
    n_lateral: Option<usize>,
    #[arg(long)]
    lane_spacing: Option<f64>,
    #[arg(long)]
    curvature_min: Option<f64>,
    #[arg(long)]
    curvature_max: Option<f64>,
    #[arg(long)]
    n_traffic_elements: Option<usize>,
    #[arg(long)]
    split_probability: Option<f64>,
}

impl SynthArgs {
    fn config(&self, seed: u64) -> SynthConfig {
        let d = SynthConfig::default();
        SynthConfig {
            seed,
            n_straight: self.n_straight.unwrap_or(d.n_straight),
            n_arc: self.n_arc.unwrap_or(d.n_arc),
            n_uturn: self.n_uturn.unwrap_or(d.n_uturn),
            n_lateral: self.n_lateral.unwrap_or(d.n_lateral),
            lane_spacing: self.lane_spacing.unwrap_or(d.lane_spacing),
            arc_curvature_range: (
                self.curvature_min.unwrap_or(d.arc_curvature_range.0),
                self.curvature_max.unwrap_or(d.arc_curvature_range.1),
            ),
            n_traffic_elements: self.n_traffic_elements.unwrap_or(d.n_traffic_elements),
            split_probability: self.split_probability.unwrap_or(d.split_probability),
        }
    }
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Grid rows (cells along x).
    #[arg(long, default_value_t = 200)]
    rows: usize,
    /// Grid columns (cells along y).
    #[arg(long, default_value_t = 104)]
    cols: usize,
}

impl GridArgs {
    fn grid(&self) -> lanetopo::Result<GridSpec<f64>> {
        GridSpec::new(self.rows, self.cols, Roi::default())
    }
}

#[derive(Debug, Args)]
struct DecodeArgs {
    #[arg(long)]
    row_threshold: Option<f64>,
    #[arg(long)]
    mass_floor: Option<f64>,
    #[arg(long)]
    sample_count: Option<usize>,
    #[arg(long)]
    min_valid_lines: Option<usize>,
    #[arg(long, value_enum, ignore_case = true)]
    spacing: Option<Spacing>,
}

impl DecodeArgs {
    fn config(&self) -> lanetopo::Result<DecodeConfig> {
        let d = DecodeConfig::default();
        let cfg = DecodeConfig {
            row_valid_threshold: self.row_threshold.unwrap_or(d.row_valid_threshold),
            cell_mass_floor: self.mass_floor.unwrap_or(d.cell_mass_floor),
            sample_count: self.sample_count.unwrap_or(d.sample_count),
            min_valid_lines: self.min_valid_lines.unwrap_or(d.min_valid_lines),
            spacing: match self.spacing {
                Some(Spacing::Axis) => SampleSpacing::IndependentAxis,
                Some(Spacing::ArcLength) => SampleSpacing::ArcLength,
                None => d.spacing,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct MetricArgs {
    /// Comma-separated Frechet thresholds, meters.
    #[arg(long, value_delimiter = ',')]
    frechet_thresholds: Option<Vec<f64>>,
    /// Comma-separated Chamfer thresholds, meters.
    #[arg(long, value_delimiter = ',')]
    chamfer_thresholds: Option<Vec<f64>>,
    #[arg(long)]
    iou_threshold: Option<f64>,
    #[arg(long)]
    edge_floor: Option<f64>,
}

impl MetricArgs {
    fn config(&self) -> lanetopo::Result<MetricConfig> {
        let d = MetricConfig::default();
        let cfg = MetricConfig {
            frechet_thresholds: self.frechet_thresholds.clone().unwrap_or(d.frechet_thresholds),
            chamfer_thresholds: self.chamfer_thresholds.clone().unwrap_or(d.chamfer_thresholds),
            iou_threshold: self.iou_threshold.unwrap_or(d.iou_threshold),
            edge_score_floor: self.edge_floor.unwrap_or(d.edge_score_floor),
            ..d
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_summary(s: &EvalSummary, format: Format) {
    match format {
        Format::Table => {
            let labels: HashMap<&str, &str> = [
                ("det_l_frechet", "DET_l (Frechet)"),
                ("det_l_chamfer", "DET_l (Chamfer)"),
                ("det_t", "DET_t"),
                ("top_ll", "TOP_ll"),
                ("top_lt", "TOP_lt"),
                ("f1", "F1"),
                ("ols", "OLS"),
            ]
            .into_iter()
            .collect();
            for (k, v) in s.fields() {
                println!("{:<16} {:>5.1}", labels[k], v * 100.0);
            }
        }
        Format::Json => {
            let v = serde_json::to_value(s).expect("summary serializes");
            println!("{v}");
        }
    }
}

/// Pairs predictions with ground truth by frame id. Ground-truth frames
/// without a prediction are scored against an empty prediction set.
fn pair_frames(preds: Vec<PredictionSet>, gts: &[Scene]) -> Result<Vec<PredictionSet>> {
    let mut by_id: HashMap<String, PredictionSet> = HashMap::new();
    for p in preds {
        let id = p.frame_id.clone();
        if by_id.insert(id.clone(), p).is_some() {
            bail!("duplicate prediction frame {id:?}");
        }
    }
    let mut out = Vec::with_capacity(gts.len());
    for g in gts {
        match by_id.remove(&g.frame_id) {
            Some(p) => out.push(p),
            None => {
                log::warn!("no prediction for frame {:?}; scoring it as empty", g.frame_id);
                out.push(PredictionSet::empty(g.frame_id.clone()));
            }
        }
    }
    if let Some(id) = by_id.keys().min() {
        bail!("prediction frame {id:?} has no ground truth");
    }
    Ok(out)
}

/// ROI for clipping decoded predictions: the grid of the first mask, else the default.
fn prediction_roi(p: &PredictionSet) -> Roi<f64> {
    p.centerline_preds
        .iter()
        .find_map(|c| c.geometry.grid())
        .map_or_else(Roi::default, |g| g.roi)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth {
            seed,
            out,
            frames,
            synth,
        } => {
            let scenes = (0..frames)
                .into_par_iter()
                .map(|i| generate_synthetic_scene(&synth.config(seed + i)))
                .collect::<lanetopo::Result<Vec<_>>>()?;
            write_scenes(&out, &scenes)?;
            log::info!("wrote {} scene(s) to {}", scenes.len(), out.display());
        }
        Command::Rasterize {
            scene,
            out,
            thickness,
            grid,
        } => {
            let grid = grid.grid()?;
            let scenes = read_scenes(&scene)?;
            let mut preds = scenes
                .par_iter()
                .map(|s| rasterize_scene(s, &grid, thickness))
                .collect::<lanetopo::Result<Vec<_>>>()?;
            if ArchiveFormat::from_path(&out) == ArchiveFormat::Rle {
                // The sidecar holds masks only.
                for p in &mut preds {
                    p.traffic_preds.clear();
                    p.ll_scores = ScoreMatrix::empty();
                    p.lt_scores = ScoreMatrix::empty();
                }
            }
            write_predictions(&out, &preds).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Decode {
            masks,
            out,
            policy,
            decode,
        } => {
            let opts = EvalOptions {
                decode: decode.config()?,
                policy: policy.into(),
                ..EvalOptions::default()
            };
            let preds = read_predictions(&masks)?;
            let decoded = preds
                .par_iter()
                .map(|p| decode_predictions(p, &prediction_roi(p), &opts))
                .collect::<lanetopo::Result<Vec<_>>>()?;
            write_predictions(&out, &decoded)?;
        }
        Command::Eval {
            pred,
            gt,
            format,
            policy,
            decode,
            metric,
        } => {
            let opts = EvalOptions {
                metric: metric.config()?,
                decode: decode.config()?,
                policy: policy.into(),
            };
            let gts = read_scenes(&gt)?;
            let preds = pair_frames(read_predictions(&pred)?, &gts)?;
            let frames: Vec<_> = preds.iter().zip(&gts).collect();
            print_summary(&evaluate_frames(&frames, &opts)?, format);
        }
        Command::Roundtrip {
            seed,
            frames,
            thickness,
            format,
            policy,
            synth,
            grid,
            decode,
            metric,
        } => {
            let grid = grid.grid()?;
            let opts = EvalOptions {
                metric: metric.config()?,
                decode: decode.config()?,
                policy: policy.into(),
            };
            let built = (0..frames)
                .into_par_iter()
                .map(|i| {
                    let scene = generate_synthetic_scene(&synth.config(seed + i))?;
                    let masks = rasterize_scene(&scene, &grid, thickness)?;
                    Ok((scene, masks))
                })
                .collect::<lanetopo::Result<Vec<_>>>()?;
            let pairs: Vec<_> = built.iter().map(|(s, m)| (m, s)).collect();
            print_summary(&evaluate_frames(&pairs, &opts)?, format);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LANETOPO_LOG", "warn")).init();
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
