use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use keyedge::data::noise::NoiseModel;
use keyedge::data::records::{read_jsonl, write_csv, write_jsonl, RatioRecord};
use keyedge::data::scene::{DimsRanges, SceneConfig};
use keyedge::error::exit_code;
use keyedge::geometry::CameraIntrinsics;
use keyedge::metrics::{DetectionRecord, GroundTruthRecord, DEFAULT_IOU_MIN};
use keyedge::pipeline::{evaluate_arde, labelgen, solve_record, synthesize, LabelFilter, SolveRecord};
use keyedge::sensitivity::{run_sensitivity, write_sensitivity_csv, SensitivityConfig};
use keyedge::{Error, Result};

#[derive(Parser)]
#[command(name = "keyedge", version, about = "Keyedge-ratio depth and yaw tools")]
struct Cli {
    /// Worker threads for parallel commands (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic scene as keyedge-ratio records.
    Synth(SynthArgs),
    /// Convert KITTI label and calib directories into ground-truth ratio records.
    Labelgen(LabelgenArgs),
    /// Recover depth and yaw from ratio records.
    Solve(SolveArgs),
    /// Compute ARDE for detections against ground truth.
    EvalArde(EvalArgs),
    /// Monte Carlo sensitivity of recovered depth to height noise.
    Sensitivity(SensitivityArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseKind {
    None,
    Gaussian,
    Quantize,
}

#[derive(Args)]
struct CameraArgs {
    #[arg(long, default_value_t = 721.5377)]
    focal: f64,
    #[arg(long, default_value_t = 609.5593)]
    cx: f64,
    #[arg(long, default_value_t = 172.854)]
    cy: f64,
}

impl CameraArgs {
    fn intrinsics(&self) -> Result<CameraIntrinsics> {
        CameraIntrinsics::new(self.focal, self.cx, self.cy)
    }
}

#[derive(Args)]
struct DimsArgs {
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [3.2, 5.2])]
    length_range: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [1.4, 2.0])]
    width_range: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [1.3, 1.9])]
    height_range: Vec<f64>,
}

impl DimsArgs {
    fn ranges(&self) -> DimsRanges {
        let pair = |v: &[f64]| (v[0], v[1]);
        DimsRanges {
            l: pair(&self.length_range),
            w: pair(&self.width_range),
            h: pair(&self.height_range),
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [5.0, 60.0])]
    depth_range: Vec<f64>,
    /// Viewing-angle range in degrees.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [-40.0, 40.0], allow_hyphen_values = true)]
    gamma_range_deg: Vec<f64>,
    #[command(flatten)]
    dims: DimsArgs,
    #[arg(long, value_enum, default_value_t = NoiseKind::None)]
    noise: NoiseKind,
    /// Gaussian sigma or quantization step, pixels.
    #[arg(long, default_value_t = 0.0)]
    noise_px: f64,
    /// Keep poses whose ratios carry no measurable distortion.
    #[arg(long)]
    keep_degenerate: bool,
    #[command(flatten)]
    camera: CameraArgs,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct LabelgenArgs {
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    calib: PathBuf,
    /// Drop objects with truncation > 0.5 or occlusion level 2.
    #[arg(long)]
    skip_hard: bool,
    /// Keep only these classes (repeatable).
    #[arg(long = "class")]
    classes: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    detections: PathBuf,
    #[arg(long)]
    ground_truth: PathBuf,
    #[arg(long, default_value_t = DEFAULT_IOU_MIN)]
    iou_min: f64,
    /// Viewing-angle bin edges in degrees.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    bins_deg: Vec<f64>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SensitivityArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.25, 0.5, 1.0])]
    noise_px: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [5.0, 20.0, 40.0, 60.0])]
    depth_edges: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [-30.0, -10.0, 10.0, 20.0], allow_hyphen_values = true)]
    gamma_edges_deg: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[command(flatten)]
    dims: DimsArgs,
    #[command(flatten)]
    camera: CameraArgs,
    #[arg(long, short)]
    out: PathBuf,
}

fn check_output(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(Error::Io(io::Error::new(
            io::ErrorKind::NotFound,
            format!("output directory {} does not exist", dir.display()),
        ))),
        _ => Ok(()),
    }
}

fn check_input(path: &Path, dir: bool) -> Result<()> {
    let ok = if dir { path.is_dir() } else { path.is_file() };
    if ok {
        Ok(())
    } else {
        Err(Error::Io(io::Error::new(
            io::ErrorKind::NotFound,
            format!("{} not found", path.display()),
        )))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn read_records<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    read_jsonl(BufReader::new(File::open(path)?))
}

fn write_records(records: &[RatioRecord], format: Format, path: &Path) -> Result<()> {
    let out = create(path)?;
    match format {
        Format::Jsonl => write_jsonl(records, out),
        Format::Csv => write_csv(records, out),
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Synth(args) => {
            check_output(&args.out)?;
            let cfg = SceneConfig {
                count: args.count,
                depth_range: (args.depth_range[0], args.depth_range[1]),
                gamma_range: (
                    args.gamma_range_deg[0].to_radians(),
                    args.gamma_range_deg[1].to_radians(),
                ),
                dims_ranges: args.dims.ranges(),
                seed: args.seed,
                reject_degenerate: !args.keep_degenerate,
            };
            let noise = match args.noise {
                NoiseKind::None => NoiseModel::None,
                NoiseKind::Gaussian => NoiseModel::GaussianHeight { sigma_px: args.noise_px },
                NoiseKind::Quantize => NoiseModel::PixelQuantization { quantum_px: args.noise_px },
            };
            let records = synthesize(&cfg, &noise, &args.camera.intrinsics()?)?;
            write_records(&records, args.format, &args.out)
        }
        Command::Labelgen(args) => {
            check_input(&args.labels, true)?;
            check_input(&args.calib, true)?;
            check_output(&args.out)?;
            let filter = LabelFilter {
                skip_hard: args.skip_hard,
                classes: args.classes,
            };
            let records = labelgen(&args.labels, &args.calib, &filter)?;
            write_records(&records, args.format, &args.out)
        }
        Command::Solve(args) => {
            check_input(&args.input, false)?;
            check_output(&args.out)?;
            let records: Vec<RatioRecord> = read_records(&args.input)?;
            let solved: Vec<SolveRecord> = records.iter().map(solve_record).collect();
            let failed = solved.iter().filter(|s| s.error.is_some()).count();
            if failed > 0 {
                eprintln!("{failed} of {} records could not be solved", solved.len());
            }
            write_jsonl(&solved, create(&args.out)?)
        }
        Command::EvalArde(args) => {
            check_input(&args.detections, false)?;
            check_input(&args.ground_truth, false)?;
            if let Some(out) = &args.out {
                check_output(out)?;
            }
            let dets: Vec<DetectionRecord> = read_records(&args.detections)?;
            let gts: Vec<GroundTruthRecord> = read_records(&args.ground_truth)?;
            let edges: Vec<f64> = args.bins_deg.iter().map(|d| d.to_radians()).collect();
            let report = evaluate_arde(&dets, &gts, args.iou_min, &edges)?;
            let json = serde_json::to_string_pretty(&report)
                .map_err(|source| Error::Json { line: 0, source })?;
            match &args.out {
                Some(path) => {
                    let mut out = create(path)?;
                    writeln!(out, "{json}")?;
                    out.flush()?;
                }
                None => println!("{json}"),
            }
            Ok(())
        }
        Command::Sensitivity(args) => {
            check_output(&args.out)?;
            let cfg = SensitivityConfig {
                noise_levels_px: args.noise_px,
                depth_edges: args.depth_edges,
                gamma_edges: args.gamma_edges_deg.iter().map(|d| d.to_radians()).collect(),
                trials_per_cell: args.trials,
                dims_ranges: args.dims.ranges(),
                intrinsics: args.camera.intrinsics()?,
                seed: args.seed,
            };
            let rows = run_sensitivity(&cfg)?;
            write_sensitivity_csv(&rows, create(&args.out)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(exit_code::SUCCESS as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
