//! `shoaltrack`: command-line workflow for fixed-cardinality school
//! tracking, from synthetic data generation through tracking, repair,
//! evaluation, tuning, and plotting.

mod commands;
mod config;
mod manifest;
mod plot;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

const PRECEDENCE_HELP: &str = "Configuration precedence: command-line flags override config-file keys, \
which override built-in defaults. The config file is TOML, given by --config or the SHOALTRACK_CONFIG \
environment variable; see the repository README for the key reference.";

#[derive(Parser)]
#[command(name = "shoaltrack", version, about = "Fixed-cardinality multi-object tracking toolkit", after_help = PRECEDENCE_HELP)]
pub struct Cli {
    /// TOML config file.
    #[arg(long, global = true, env = "SHOALTRACK_CONFIG")]
    pub config: Option<PathBuf>,

    /// Seed override for seeded subcommands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Suppress informational output.
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate synthetic ground truth and a corrupted detection stream.
    Synth(SynthArgs),
    /// Run the online tracker over a detection file.
    Track(TrackArgs),
    /// Merge fragmented tracks and interpolate the gaps.
    Connect(ConnectArgs),
    /// Score a prediction against ground truth.
    Eval(EvalArgs),
    /// Search tracker and connector hyperparameters for the best HOTA.
    Tune(TuneArgs),
    /// Render trajectories as SVG plus a per-frame center CSV.
    Plot(PlotArgs),
    /// Run synth, track, connect, and eval in one go.
    Pipeline(PipelineArgs),
}

#[derive(Args, Clone, Default)]
pub struct SynthArgs {
    /// Ground-truth output file.
    #[arg(long, default_value = "gt.txt")]
    pub out_gt: PathBuf,
    /// Detection output file.
    #[arg(long, default_value = "det.txt")]
    pub out_det: PathBuf,
    /// Number of fish in the school.
    #[arg(long)]
    pub fish: Option<u32>,
    /// Sequence length in seconds.
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub fps: Option<f64>,
    /// Arena width in pixels.
    #[arg(long)]
    pub width: Option<f64>,
    /// Arena height in pixels.
    #[arg(long)]
    pub height: Option<f64>,
    #[arg(long)]
    pub box_width: Option<f64>,
    #[arg(long)]
    pub box_height: Option<f64>,
    /// Swimming speed in pixels per frame.
    #[arg(long)]
    pub speed: Option<f64>,
    #[arg(long)]
    pub cohesion: Option<f64>,
    #[arg(long)]
    pub alignment: Option<f64>,
    #[arg(long)]
    pub separation: Option<f64>,
    /// Per-box dropout probability of the corruption model.
    #[arg(long)]
    pub dropout: Option<f64>,
    /// Center jitter std in pixels.
    #[arg(long)]
    pub jitter: Option<f64>,
    /// Expected false boxes per frame.
    #[arg(long)]
    pub clutter: Option<f64>,
    /// IoU above which overlapping true boxes merge into one detection.
    #[arg(long)]
    pub merge_iou: Option<f64>,
    /// Mean confidence of true detections.
    #[arg(long)]
    pub conf_mean: Option<f64>,
    /// Confidence std of true detections.
    #[arg(long)]
    pub conf_std: Option<f64>,
    #[arg(long)]
    pub clutter_conf_mean: Option<f64>,
    #[arg(long)]
    pub clutter_conf_std: Option<f64>,
}

#[derive(Args, Clone, Default)]
pub struct TrackArgs {
    /// Detection input file.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Track output file.
    #[arg(short, long, default_value = "tracks.txt")]
    pub output: PathBuf,
    /// Association variant: sort or bytetrack.
    #[arg(long)]
    pub variant: Option<String>,
    /// High-score confidence threshold.
    #[arg(long)]
    pub high: Option<f64>,
    /// Low-score cutoff; detections below are discarded.
    #[arg(long)]
    pub low: Option<f64>,
    /// Confidence needed for an unmatched detection to start a track.
    #[arg(long)]
    pub new: Option<f64>,
    /// First-stage IoU-distance gate.
    #[arg(long = "match")]
    pub match_thresh: Option<f64>,
    /// Second-stage IoU-distance gate.
    #[arg(long)]
    pub second_match: Option<f64>,
    /// Frames a lost track is kept for re-acquisition.
    #[arg(long)]
    pub max_lost: Option<u32>,
    /// Fixed cardinality for --skip-creation.
    #[arg(long)]
    pub cap: Option<u32>,
    /// Refuse to create tracks beyond the cap.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub skip_creation: Option<bool>,
    /// Re-assign unmatched tracks to already-used detections.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub rematch_lost: Option<bool>,
    /// Matched frames required before a track emits.
    #[arg(long)]
    pub min_hits: Option<u32>,
}

#[derive(Args, Clone, Default)]
pub struct ConnectArgs {
    /// Track input file.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Repaired track output file.
    #[arg(short, long, default_value = "connected.txt")]
    pub output: PathBuf,
    /// Largest frame gap considered for merging.
    #[arg(long)]
    pub max_frame_gap: Option<u32>,
    /// Maximum endpoint jump in pixels; 0 disables the cap.
    #[arg(long)]
    pub distance_cap: Option<f64>,
}

#[derive(Args, Clone, Default)]
pub struct EvalArgs {
    /// Ground-truth track file.
    #[arg(long)]
    pub gt: PathBuf,
    /// Prediction track file.
    #[arg(long)]
    pub pred: PathBuf,
    /// Write the aligned table here as well as to stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Write the metrics row as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the per-threshold breakdown as CSV.
    #[arg(long)]
    pub per_alpha: Option<PathBuf>,
    /// Row name; defaults to the prediction file stem.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Args, Clone, Default)]
pub struct TuneArgs {
    /// Ground-truth track file of the development split.
    #[arg(long)]
    pub gt: PathBuf,
    /// Detection file of the development split.
    #[arg(long)]
    pub det: PathBuf,
    /// Search strategy: coordinate or random.
    #[arg(long)]
    pub method: Option<String>,
    /// Rounds of the coordinate sweep.
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Trials of the random search.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Best configuration output (TOML).
    #[arg(long, default_value = "best.toml")]
    pub out_config: PathBuf,
    /// Trial log output (CSV).
    #[arg(long, default_value = "trials.csv")]
    pub out_log: PathBuf,
}

#[derive(Args, Clone, Default)]
pub struct PlotArgs {
    /// Track input file.
    #[arg(short, long)]
    pub input: PathBuf,
    /// SVG output file.
    #[arg(short, long, default_value = "tracks.svg")]
    pub output: PathBuf,
    /// Optional per-frame center CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct PipelineArgs {
    /// Directory for every intermediate and final artifact.
    #[arg(long, default_value = "run")]
    pub out_dir: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = commands::run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
