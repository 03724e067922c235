//! The `shapeval` command line. Exit codes: 0 success, 1 evaluation error,
//! 2 usage error. Every run prints the resolved configuration and seed to
//! stderr so results can be tied back to their parameters.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use shapeval_core::{farthest_point_sample, farthest_point_sample_from, sample_surface, Seed};

use crate::config::EvalConfig;
use crate::error::EvalError;
use crate::harness::{
    aggregate_rows, evaluate_features, evaluate_instances, evaluate_sets, pair_entries,
};
use crate::load::{cloud_from_tensor, cloud_to_tensor};
use crate::manifest::read_manifest;
use crate::meshio::read_mesh;
use crate::report::{
    rows_from_csv, write_report, MetricReport, ReportFormat, ReportMetadata,
};
use crate::tensor::{read_tensor, write_tensor};

#[derive(Parser, Debug)]
#[command(name = "shapeval", version, about = "Deterministic 3D shape evaluation harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonOpts {
    /// Global random seed; all per-shape streams derive from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Surface samples per mesh for instance metrics.
    #[arg(long, default_value_t = 100_000)]
    surface_samples: usize,

    /// Farthest-point samples per shape for set metrics.
    #[arg(long, default_value_t = 2048)]
    fps_points: usize,

    /// F-score distance threshold.
    #[arg(long, default_value_t = 0.01)]
    fscore_tau: f64,

    /// Monte-Carlo query count for volumetric IoU.
    #[arg(long, default_value_t = 100_000)]
    iou_queries: usize,

    /// Total padding of the IoU sampling cube.
    #[arg(long, default_value_t = 0.1)]
    iou_padding: f64,

    /// Completions per partial input (best-of-N selection).
    #[arg(long, default_value_t = 1)]
    best_of_n: usize,

    /// Worker threads; 0 = auto. Falls back to SHAPEVAL_THREADS.
    #[arg(long)]
    threads: Option<usize>,

    /// Neighbour count for feature precision/recall.
    #[arg(long, default_value_t = 3)]
    knn_pr_k: usize,

    /// Neighbour count for density/coverage.
    #[arg(long, default_value_t = 5)]
    knn_dc_k: usize,

    /// Polynomial kernel degree.
    #[arg(long, default_value_t = 3)]
    kernel_degree: u32,

    /// Polynomial kernel scale; default 1/d.
    #[arg(long)]
    kernel_scale: Option<f64>,

    /// Polynomial kernel offset.
    #[arg(long, default_value_t = 1.0)]
    kernel_offset: f64,

    /// Block size for the blocked kernel estimator; default full sets.
    #[arg(long)]
    kernel_block_size: Option<usize>,

    /// Derive the Chamfer-L1 scale from each ground truth's bounding box
    /// instead of assuming unit-frame inputs.
    #[arg(long)]
    raw_frame: bool,

    /// Skip volumetric IoU even for mesh pairs.
    #[arg(long)]
    skip_iou: bool,

    /// Pin the FPS start index (for reproducible fixtures).
    #[arg(long)]
    fps_start: Option<usize>,
}

impl CommonOpts {
    fn resolve(&self) -> Result<EvalConfig, EvalError> {
        let threads = match self.threads {
            Some(t) => t,
            None => match std::env::var("SHAPEVAL_THREADS") {
                Ok(value) => value.parse().map_err(|_| {
                    EvalError::Usage(format!("SHAPEVAL_THREADS is not a number: {value:?}"))
                })?,
                Err(_) => 0,
            },
        };
        Ok(EvalConfig {
            seed: Seed(self.seed),
            surface_samples: self.surface_samples,
            fps_points: self.fps_points,
            fscore_tau: self.fscore_tau,
            iou_queries: self.iou_queries,
            iou_padding: self.iou_padding,
            best_of_n: self.best_of_n,
            knn_pr_k: self.knn_pr_k,
            knn_dc_k: self.knn_dc_k,
            kernel_degree: self.kernel_degree,
            kernel_scale: self.kernel_scale,
            kernel_offset: self.kernel_offset,
            kernel_block_size: self.kernel_block_size,
            threads,
            raw_frame: self.raw_frame,
            skip_iou: self.skip_iou,
            fps_start: self.fps_start,
        })
    }
}

#[derive(Args, Debug)]
struct OutputOpts {
    /// Report output path.
    #[arg(long)]
    out: PathBuf,

    /// Report format.
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Instance-level metrics (Chamfer, F-score family, IoU, NC) per class.
    Instance {
        /// JSON-lines manifest; entry paths are relative to it.
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        output: OutputOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Set-level metrics (1-NNA, COV, MMD, TMD, UHD, feature distances).
    Set {
        #[arg(long)]
        manifest: PathBuf,
        /// Cache prefix for pairwise distance matrices; reused when present.
        #[arg(long)]
        cache_matrix: Option<PathBuf>,
        #[command(flatten)]
        output: OutputOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Feature-space metrics only (Fréchet/kernel distances, P/R, D/C).
    Feature {
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        output: OutputOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Farthest-point subsample a point tensor.
    Fps {
        /// Input tensor, shape [n,3] or [n,6].
        #[arg(long)]
        input: PathBuf,
        /// Output tensor path.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Area-weighted surface sampling of a mesh into a point tensor.
    Sample {
        /// Input mesh (OFF or restricted OBJ).
        #[arg(long)]
        mesh: PathBuf,
        /// Number of samples.
        #[arg(long)]
        n: usize,
        /// Carry per-point unit normals ([n,6] output).
        #[arg(long)]
        with_normals: bool,
        /// Output tensor path.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Precompute and store the set-level distance matrices for a manifest.
    Matrix {
        #[arg(long)]
        manifest: PathBuf,
        /// Cache prefix; files land at `<prefix>.<class>.{gg,rr,gr}.tnsr`.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Recompute the Mean scope from a CSV of bare class rows.
    Aggregate {
        /// Input CSV with header `scope,metric,value,count`.
        #[arg(long)]
        rows: PathBuf,
        #[command(flatten)]
        output: OutputOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
}

/// Runs the CLI; returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version arrive as Err but are not usage errors.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("shapeval: error: {e}");
            1
        }
    }
}

fn execute(command: Command) -> Result<(), EvalError> {
    let common = match &command {
        Command::Instance { common, .. }
        | Command::Set { common, .. }
        | Command::Feature { common, .. }
        | Command::Fps { common, .. }
        | Command::Sample { common, .. }
        | Command::Matrix { common, .. }
        | Command::Aggregate { common, .. } => common,
    };
    let cfg = common.resolve()?;
    eprintln!("shapeval: config: {cfg}");

    let mut pool = rayon::ThreadPoolBuilder::new();
    if cfg.threads > 0 {
        pool = pool.num_threads(cfg.threads);
    }
    let pool = pool
        .build()
        .map_err(|e| EvalError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(command, &cfg))
}

fn manifest_base(manifest: &Path) -> PathBuf {
    manifest.parent().unwrap_or_else(|| Path::new(".")).to_path_buf()
}

fn dispatch(command: Command, cfg: &EvalConfig) -> Result<(), EvalError> {
    match command {
        Command::Instance { manifest, output, .. } => {
            let entries = read_manifest(&manifest)?;
            let tasks = pair_entries(&entries, cfg)?;
            let report = evaluate_instances(&manifest_base(&manifest), &tasks, cfg)?;
            write_report(&report, &output.out, output.format.into())?;
            Ok(())
        }
        Command::Set { manifest, cache_matrix, output, .. } => {
            let entries = read_manifest(&manifest)?;
            let tasks = pair_entries(&entries, cfg)?;
            let report = evaluate_sets(
                &manifest_base(&manifest),
                &entries,
                &tasks,
                cfg,
                cache_matrix.as_deref(),
            )?;
            write_report(&report, &output.out, output.format.into())?;
            Ok(())
        }
        Command::Feature { manifest, output, .. } => {
            let entries = read_manifest(&manifest)?;
            let report = evaluate_features(&manifest_base(&manifest), &entries, cfg)?;
            write_report(&report, &output.out, output.format.into())?;
            Ok(())
        }
        Command::Fps { input, out, .. } => {
            let tensor = read_tensor(&input).map_err(|e| EvalError::at(&input, e))?;
            let cloud = cloud_from_tensor(&tensor).map_err(|e| e.with_path(&input))?;
            let k = cfg.fps_points.min(cloud.len());
            let sampled = match cfg.fps_start {
                Some(start) => farthest_point_sample_from(&cloud, k, start),
                None => farthest_point_sample(&cloud, k, cfg.seed),
            }
            .map_err(|e| EvalError::at(&input, e))?;
            write_tensor(&cloud_to_tensor(&sampled), &out).map_err(|e| EvalError::at(&out, e))?;
            Ok(())
        }
        Command::Sample { mesh, n, with_normals, out, .. } => {
            let load = read_mesh(&mesh).map_err(|e| EvalError::at(&mesh, e))?;
            let cloud = sample_surface(&load.mesh, n, cfg.seed, with_normals)
                .map_err(|e| EvalError::at(&mesh, e))?;
            write_tensor(&cloud_to_tensor(&cloud), &out).map_err(|e| EvalError::at(&out, e))?;
            Ok(())
        }
        Command::Matrix { manifest, out, .. } => {
            let entries = read_manifest(&manifest)?;
            let tasks = pair_entries(&entries, cfg)?;
            // Computing the set report against the prefix populates every
            // per-class (and pooled) matrix file as a side effect.
            evaluate_sets(&manifest_base(&manifest), &entries, &tasks, cfg, Some(&out))?;
            Ok(())
        }
        Command::Aggregate { rows, output, .. } => {
            let text = std::fs::read_to_string(&rows)?;
            let class_rows = rows_from_csv(&text)?;
            let all_rows = aggregate_rows(class_rows)?;
            let report = MetricReport {
                metadata: ReportMetadata::new(
                    cfg.seed.0,
                    cfg.surface_samples as u64,
                    cfg.fps_points as u64,
                ),
                rows: all_rows,
            };
            write_report(&report, &output.out, output.format.into())?;
            Ok(())
        }
    }
}
