//! The evaluation driver: pairs manifest entries into tasks, prepares clouds
//! (surface sampling, farthest-point subsampling), runs the metric batteries
//! and aggregates per class with a `Mean` row (unweighted class average) and,
//! for set metrics, an `All` row recomputed on the pooled sets.
//!
//! Determinism: every per-shape random stream is derived from the global seed
//! and the shape's identity (never from scheduling order), task results are
//! reduced in sorted class/id order, and parallel matrix cells are written to
//! indexed slots. Reports are therefore bit-identical across runs and thread
//! counts.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use shapeval_core::{
    best_of_n, chamfer_l2_prebuilt, cov_mmd, density_coverage, frechet_distance, gaussian_summary,
    kernel_distance, knn_precision_recall, one_nna, rng::derive_stream, tmd, uhd,
    volumetric_iou, DistanceMatrix, FeatureMatrix, FscoreParams, InstanceResult, IouParams,
    KnnParams, NnIndex, PointCloud,
};

use crate::config::EvalConfig;
use crate::error::EvalError;
use crate::load::{load_features, load_shape, LoadedShape};
use crate::manifest::{Kind, ManifestEntry, Role};
use crate::report::{MetricReport, ReportMetadata, ReportRow, ALL_SCOPE, MEAN_SCOPE};
use crate::tensor::{read_tensor, write_tensor, TensorData, TensorFile};

pub const M_CD_L1: &str = "CD-L1";
pub const M_CD_L2: &str = "CD-L2";
pub const M_F1: &str = "F1";
pub const M_PRECISION: &str = "Precision";
pub const M_RECALL: &str = "Recall";
pub const M_IOU: &str = "IoU";
pub const M_NC: &str = "NC";
pub const M_1NNA: &str = "1-NNA";
pub const M_COV: &str = "COV";
pub const M_MMD: &str = "MMD";
pub const M_TMD: &str = "TMD";
pub const M_UHD: &str = "UHD";
pub const M_FD: &str = "FD";
pub const M_KD: &str = "KD";
pub const M_DENSITY: &str = "Density";
pub const M_COVERAGE: &str = "Coverage";

/// MMD is reported scaled by 10^3; the kernel value itself is unscaled.
const MMD_REPORT_SCALE: f64 = 1e3;

/// One unit of evaluation work: a reference shape with its 1..N candidate
/// predictions and, for completion benchmarks, the partial input.
#[derive(Debug, Clone)]
pub struct PairedTask {
    pub id: String,
    pub class_label: String,
    pub generated: Vec<ManifestEntry>,
    pub reference: ManifestEntry,
    pub partial: Option<ManifestEntry>,
}

/// Matches every reference entry with its generated entry (same id) or its
/// completion group (group == reference id, exactly `best_of_n` members).
/// Feature entries are class-level inputs and take no part in pairing.
/// Unmatched shape entries of any role are an error, not a warning.
pub fn pair_entries(
    entries: &[ManifestEntry],
    cfg: &EvalConfig,
) -> Result<Vec<PairedTask>, EvalError> {
    let shape_entries: Vec<&ManifestEntry> =
        entries.iter().filter(|e| e.kind != Kind::Features).collect();

    let mut references: Vec<&ManifestEntry> = Vec::new();
    let mut generated: HashMap<&str, &ManifestEntry> = HashMap::new();
    let mut partials: HashMap<&str, &ManifestEntry> = HashMap::new();
    let mut completions: BTreeMap<&str, Vec<&ManifestEntry>> = BTreeMap::new();
    for entry in &shape_entries {
        match entry.role {
            Role::Reference => references.push(entry),
            Role::Generated => {
                generated.insert(entry.id.as_str(), entry);
            }
            Role::Partial => {
                partials.insert(entry.id.as_str(), entry);
            }
            Role::Completion => completions
                .entry(entry.group.as_deref().expect("validated at parse"))
                .or_default()
                .push(entry),
        }
    }
    references.sort_by(|a, b| (&a.class_label, &a.id).cmp(&(&b.class_label, &b.id)));

    let mut used: HashSet<(&str, Role)> = HashSet::new();
    let mut tasks = Vec::with_capacity(references.len());
    for reference in references {
        let id = reference.id.as_str();
        let task_generated: Vec<ManifestEntry> = match completions.get(id) {
            Some(group) => {
                if group.len() != cfg.best_of_n {
                    return Err(EvalError::MissingCompletionGroup {
                        group: id.to_string(),
                        expected: cfg.best_of_n,
                        found: group.len(),
                    });
                }
                let mut sorted = group.clone();
                sorted.sort_by(|a, b| a.id.cmp(&b.id));
                for e in &sorted {
                    used.insert((e.id.as_str(), Role::Completion));
                }
                sorted.into_iter().cloned().collect()
            }
            None => match generated.get(id) {
                Some(entry) => {
                    used.insert((id, Role::Generated));
                    vec![(*entry).clone()]
                }
                None => return Err(EvalError::UnmatchedReference { id: id.to_string() }),
            },
        };
        let partial = partials.get(id).map(|e| {
            used.insert((id, Role::Partial));
            (*e).clone()
        });
        tasks.push(PairedTask {
            id: reference.id.clone(),
            class_label: reference.class_label.clone(),
            generated: task_generated,
            reference: (*reference).clone(),
            partial,
        });
    }

    for entry in &shape_entries {
        let matched = match entry.role {
            Role::Reference => true,
            Role::Generated | Role::Partial => used.contains(&(entry.id.as_str(), entry.role)),
            Role::Completion => used.contains(&(entry.id.as_str(), Role::Completion)),
        };
        if !matched {
            return Err(EvalError::OrphanEntry {
                id: entry.id.clone(),
                role: entry.role.to_string(),
            });
        }
    }
    Ok(tasks)
}

fn fscore_params(cfg: &EvalConfig) -> FscoreParams {
    FscoreParams { tau: cfg.fscore_tau }
}

struct TaskInstance {
    class_label: String,
    result: InstanceResult,
    degenerate_dropped: u64,
}

fn run_instance_task(
    base: &Path,
    task: &PairedTask,
    cfg: &EvalConfig,
) -> Result<TaskInstance, EvalError> {
    let gt = load_shape(
        base,
        &task.reference,
        cfg.surface_samples,
        cfg.seed,
        &format!("surface/reference/{}", task.id),
    )?;
    let mut dropped = gt.degenerate_dropped;

    let mut candidates: Vec<LoadedShape> = Vec::with_capacity(task.generated.len());
    for (k, entry) in task.generated.iter().enumerate() {
        let shape = load_shape(
            base,
            entry,
            cfg.surface_samples,
            cfg.seed,
            &format!("surface/generated/{}/{k}", task.id),
        )?;
        dropped += shape.degenerate_dropped;
        candidates.push(shape);
    }

    let clouds: Vec<PointCloud> = candidates.iter().map(|c| c.cloud.clone()).collect();
    let (winner, mut result) = best_of_n(&clouds, &gt.cloud, &fscore_params(cfg))?;

    if cfg.raw_frame {
        // chamfer_l1 arrives scaled for a unit frame (x10); rescale to
        // 10 / L for the object's actual bounding-box edge L.
        let bbox = match &gt.mesh {
            Some(mesh) => mesh.bounding_box()?,
            None => gt.cloud.bounding_box()?,
        };
        let edge = bbox.max_edge();
        if edge <= 0.0 {
            return Err(shapeval_core::Error::InvalidParameter(
                "raw-frame scaling needs a non-degenerate bounding box",
            )
            .into());
        }
        result.chamfer_l1 /= edge;
    }

    if !cfg.skip_iou {
        if let (Some(pred_mesh), Some(gt_mesh)) = (&candidates[winner].mesh, &gt.mesh) {
            let params = IouParams { n_queries: cfg.iou_queries, padding: cfg.iou_padding };
            let seed = derive_stream(cfg.seed, &format!("iou/{}/{winner}", task.id));
            result.iou = Some(volumetric_iou(pred_mesh, gt_mesh, &params, seed)?);
        }
    }

    Ok(TaskInstance {
        class_label: task.class_label.clone(),
        result,
        degenerate_dropped: dropped,
    })
}

/// Instance-level battery: per-class unweighted means over instances, plus a
/// `Mean` row per metric (unweighted over class rows). Instance metrics get
/// no `All` row. Any failing task aborts the run with its id attached.
pub fn evaluate_instances(
    base: &Path,
    tasks: &[PairedTask],
    cfg: &EvalConfig,
) -> Result<MetricReport, EvalError> {
    if tasks.is_empty() {
        return Err(EvalError::Usage("no tasks to evaluate".into()));
    }
    let outcomes: Vec<Result<TaskInstance, EvalError>> = tasks
        .par_iter()
        .map(|task| run_instance_task(base, task, cfg).map_err(|e| e.in_task(&task.id)))
        .collect();

    let mut per_class: BTreeMap<String, Vec<InstanceResult>> = BTreeMap::new();
    let mut metadata = ReportMetadata::new(
        cfg.seed.0,
        cfg.surface_samples as u64,
        cfg.fps_points as u64,
    );
    for outcome in outcomes {
        let item = outcome?;
        metadata.degenerate_faces_dropped += item.degenerate_dropped;
        per_class.entry(item.class_label).or_default().push(item.result);
    }

    let mut rows = Vec::new();
    for (class, results) in &per_class {
        let n = results.len() as u64;
        let mean = |f: fn(&InstanceResult) -> f64| {
            results.iter().map(f).sum::<f64>() / results.len() as f64
        };
        rows.push(row(class, M_CD_L1, mean(|r| r.chamfer_l1), n));
        rows.push(row(class, M_CD_L2, mean(|r| r.chamfer_l2), n));
        rows.push(row(class, M_F1, mean(|r| r.f1), n));
        rows.push(row(class, M_PRECISION, mean(|r| r.precision), n));
        rows.push(row(class, M_RECALL, mean(|r| r.recall), n));
        let ious: Vec<f64> = results.iter().filter_map(|r| r.iou).collect();
        if !ious.is_empty() {
            let v = ious.iter().sum::<f64>() / ious.len() as f64;
            rows.push(row(class, M_IOU, v, ious.len() as u64));
        }
        let ncs: Vec<f64> = results.iter().filter_map(|r| r.normal_consistency).collect();
        if !ncs.is_empty() {
            let v = ncs.iter().sum::<f64>() / ncs.len() as f64;
            rows.push(row(class, M_NC, v, ncs.len() as u64));
        }
    }
    let means = mean_rows(&rows);
    rows.extend(means);
    Ok(MetricReport { metadata, rows })
}

fn row(scope: &str, metric: &str, value: f64, count: u64) -> ReportRow {
    ReportRow { scope: scope.to_string(), metric: metric.to_string(), value, count }
}

/// One `Mean` row per metric: the unweighted arithmetic mean of the class
/// rows, in metric first-occurrence order; count is the number of classes.
pub fn mean_rows(class_rows: &[ReportRow]) -> Vec<ReportRow> {
    let mut order: Vec<&str> = Vec::new();
    let mut sums: HashMap<&str, (f64, u64)> = HashMap::new();
    for r in class_rows {
        if r.scope == MEAN_SCOPE || r.scope == ALL_SCOPE {
            continue;
        }
        if !sums.contains_key(r.metric.as_str()) {
            order.push(&r.metric);
        }
        let slot = sums.entry(&r.metric).or_insert((0.0, 0));
        slot.0 += r.value;
        slot.1 += 1;
    }
    order
        .iter()
        .map(|metric| {
            let (sum, n) = sums[metric];
            row(MEAN_SCOPE, metric, sum / n as f64, n)
        })
        .collect()
}

/// FPS a cloud down to at most `fps_points` on the named sub-stream; clouds
/// that are already small enough pass through a full permutation (`k = n`).
fn fps_cloud(
    cloud: &PointCloud,
    cfg: &EvalConfig,
    tag: &str,
) -> Result<PointCloud, shapeval_core::Error> {
    let k = cfg.fps_points.min(cloud.len());
    match cfg.fps_start {
        Some(start) => shapeval_core::farthest_point_sample_from(cloud, k, start),
        None => shapeval_core::farthest_point_sample(cloud, k, derive_stream(cfg.seed, tag)),
    }
}

/// Per-class prepared set data.
struct ClassSet {
    class: String,
    /// FPS'd generated representative per task (best-of-N winner).
    gen_fps: Vec<PointCloud>,
    /// FPS'd reference per task.
    ref_fps: Vec<PointCloud>,
    /// Per-task diversity over the FPS'd completions (tasks with >= 2).
    tmd_values: Vec<f64>,
    /// Per-task fidelity from the partial input (tasks with a partial).
    uhd_values: Vec<f64>,
    degenerate_dropped: u64,
}

/// Prepared clouds and per-task scores for one set-level task.
struct PreparedTask {
    gen_fps: PointCloud,
    ref_fps: PointCloud,
    tmd_value: Option<f64>,
    uhd_value: Option<f64>,
    degenerate_dropped: u64,
}

fn prepare_class_task(
    base: &Path,
    task: &PairedTask,
    cfg: &EvalConfig,
) -> Result<PreparedTask, EvalError> {
    let gt = load_shape(
        base,
        &task.reference,
        cfg.surface_samples,
        cfg.seed,
        &format!("surface/reference/{}", task.id),
    )?;
    let mut dropped = gt.degenerate_dropped;

    let mut full: Vec<PointCloud> = Vec::with_capacity(task.generated.len());
    for (k, entry) in task.generated.iter().enumerate() {
        let shape = load_shape(
            base,
            entry,
            cfg.surface_samples,
            cfg.seed,
            &format!("surface/generated/{}/{k}", task.id),
        )?;
        dropped += shape.degenerate_dropped;
        full.push(shape.cloud);
    }

    let winner = if full.len() == 1 {
        0
    } else {
        best_of_n(&full, &gt.cloud, &fscore_params(cfg))?.0
    };

    let mut completions_fps: Vec<PointCloud> = Vec::with_capacity(full.len());
    for (k, cloud) in full.iter().enumerate() {
        completions_fps.push(fps_cloud(cloud, cfg, &format!("fps/generated/{}/{k}", task.id))?);
    }
    let gen_fps = completions_fps[winner].clone();
    let ref_fps = fps_cloud(&gt.cloud, cfg, &format!("fps/reference/{}", task.id))?;

    let tmd_value = if completions_fps.len() >= 2 {
        Some(tmd(&completions_fps)?)
    } else {
        None
    };
    let uhd_value = match &task.partial {
        Some(entry) => {
            let partial = load_shape(
                base,
                entry,
                cfg.surface_samples,
                cfg.seed,
                &format!("surface/partial/{}", task.id),
            )?;
            dropped += partial.degenerate_dropped;
            let partial_fps = fps_cloud(&partial.cloud, cfg, &format!("fps/partial/{}", task.id))?;
            Some(uhd(&partial_fps, &completions_fps)?)
        }
        None => None,
    };

    Ok(PreparedTask {
        gen_fps,
        ref_fps,
        tmd_value,
        uhd_value,
        degenerate_dropped: dropped,
    })
}

/// Builds a pairwise Chamfer matrix with one NN index per cloud, cells
/// computed in parallel into indexed slots (bitwise equal to the serial
/// kernel at any thread count).
fn cd_matrix_parallel(
    gen: &[PointCloud],
    reference: &[PointCloud],
) -> Result<DistanceMatrix, EvalError> {
    let gen_idx: Vec<NnIndex> = gen
        .par_iter()
        .map(NnIndex::build)
        .collect::<Result<_, _>>()?;
    let ref_idx: Vec<NnIndex> = reference
        .par_iter()
        .map(NnIndex::build)
        .collect::<Result<_, _>>()?;
    let cols = reference.len();
    let values: Vec<f64> = (0..gen.len() * cols)
        .into_par_iter()
        .map(|flat| {
            let (i, j) = (flat / cols, flat % cols);
            chamfer_l2_prebuilt(&gen[i], &gen_idx[i], &reference[j], &ref_idx[j])
        })
        .collect();
    Ok(DistanceMatrix::from_values(gen.len(), cols, values)?)
}

fn sanitize_class(class: &str) -> String {
    class
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') { c } else { '_' })
        .collect()
}

fn cache_path(prefix: &Path, class: &str, which: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_os_string();
    name.push(format!(".{}.{which}.tnsr", sanitize_class(class)));
    PathBuf::from(name)
}

/// Loads a cached matrix or computes and (when a prefix is given) stores it.
fn matrix_cached(
    prefix: Option<&Path>,
    class: &str,
    which: &str,
    gen: &[PointCloud],
    reference: &[PointCloud],
) -> Result<DistanceMatrix, EvalError> {
    if let Some(prefix) = prefix {
        let path = cache_path(prefix, class, which);
        if path.exists() {
            let tensor = read_tensor(&path).map_err(|e| EvalError::at(&path, e))?;
            if tensor.shape.len() != 2 {
                return Err(EvalError::BadShape {
                    what: "cached distance matrix",
                    expected: "[rows,cols]",
                    found: tensor.shape,
                });
            }
            let (rows, cols) = (tensor.shape[0] as usize, tensor.shape[1] as usize);
            if rows != gen.len() || cols != reference.len() {
                return Err(EvalError::CacheShapeMismatch {
                    path,
                    expected_rows: gen.len(),
                    expected_cols: reference.len(),
                    rows,
                    cols,
                });
            }
            return Ok(DistanceMatrix::from_values(rows, cols, tensor.data.as_f64())?);
        }
        let matrix = cd_matrix_parallel(gen, reference)?;
        let tensor = TensorFile::new(
            vec![matrix.rows() as u64, matrix.cols() as u64],
            TensorData::F64(matrix.values().to_vec()),
        )
        .expect("matrix dims are consistent");
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        write_tensor(&tensor, &path).map_err(|e| EvalError::at(&path, e))?;
        Ok(matrix)
    } else {
        cd_matrix_parallel(gen, reference)
    }
}

/// Feature matrices for one class, stacked in id order when a class
/// supplies several files per side.
#[derive(Default)]
struct ClassFeatures {
    generated: Option<FeatureMatrix>,
    reference: Option<FeatureMatrix>,
}

fn collect_features(
    base: &Path,
    entries: &[ManifestEntry],
) -> Result<BTreeMap<String, ClassFeatures>, EvalError> {
    let mut sorted: Vec<&ManifestEntry> = entries
        .iter()
        .filter(|e| e.kind == Kind::Features)
        .collect();
    sorted.sort_by(|a, b| (&a.class_label, &a.id).cmp(&(&b.class_label, &b.id)));

    let mut by_class: BTreeMap<String, ClassFeatures> = BTreeMap::new();
    for entry in sorted {
        let matrix = load_features(base, entry)?;
        let slot = by_class.entry(entry.class_label.clone()).or_default();
        let side = match entry.role {
            Role::Generated | Role::Completion => &mut slot.generated,
            Role::Reference | Role::Partial => &mut slot.reference,
        };
        *side = Some(match side.take() {
            Some(existing) => existing.vstack(&matrix)?,
            None => matrix,
        });
    }
    Ok(by_class)
}

fn feature_rows(
    scope: &str,
    gen: &FeatureMatrix,
    reference: &FeatureMatrix,
    cfg: &EvalConfig,
) -> Result<Vec<ReportRow>, EvalError> {
    let n = gen.n() as u64;
    let fd = frechet_distance(&gaussian_summary(reference)?, &gaussian_summary(gen)?)?;
    let kd = kernel_distance(reference, gen, &cfg.kernel_params(gen.d()))?;
    let (precision, recall) =
        knn_precision_recall(reference, gen, &KnnParams { k: cfg.knn_pr_k })?;
    let (density, coverage) = density_coverage(reference, gen, &KnnParams { k: cfg.knn_dc_k })?;
    Ok(vec![
        row(scope, M_FD, fd, n),
        row(scope, M_KD, kd, n),
        row(scope, M_PRECISION, precision, n),
        row(scope, M_RECALL, recall, n),
        row(scope, M_DENSITY, density, n),
        row(scope, M_COVERAGE, coverage, n),
    ])
}

/// Set-level battery: per class 1-NNA / COV / MMD on FPS'd clouds (plus TMD
/// and UHD for completion tasks, plus feature-space metrics when feature
/// files are supplied), a `Mean` row per metric, and an `All` row recomputed
/// on the pooled sets rather than averaged.
pub fn evaluate_sets(
    base: &Path,
    entries: &[ManifestEntry],
    tasks: &[PairedTask],
    cfg: &EvalConfig,
    cache_prefix: Option<&Path>,
) -> Result<MetricReport, EvalError> {
    if tasks.is_empty() {
        return Err(EvalError::Usage("no tasks to evaluate".into()));
    }

    let mut class_names: Vec<String> = Vec::new();
    {
        let mut seen = HashSet::new();
        for task in tasks {
            if seen.insert(task.class_label.clone()) {
                class_names.push(task.class_label.clone());
            }
        }
        class_names.sort();
        let mut sanitized = HashMap::new();
        for class in &class_names {
            if let Some(other) = sanitized.insert(sanitize_class(class), class.clone()) {
                return Err(EvalError::ClassNameCollision { a: other, b: class.clone() });
            }
        }
    }

    let mut by_class: BTreeMap<&str, Vec<&PairedTask>> = BTreeMap::new();
    for task in tasks {
        by_class.entry(&task.class_label).or_default().push(task);
    }

    let mut metadata = ReportMetadata::new(
        cfg.seed.0,
        cfg.surface_samples as u64,
        cfg.fps_points as u64,
    );

    // Prepare every class: parallel across tasks, reduced in sorted order.
    let mut class_sets: Vec<ClassSet> = Vec::with_capacity(by_class.len());
    for (class, class_tasks) in &by_class {
        let prepared: Vec<Result<_, EvalError>> = class_tasks
            .par_iter()
            .map(|task| prepare_class_task(base, task, cfg).map_err(|e| e.in_task(&task.id)))
            .collect();
        let mut set = ClassSet {
            class: class.to_string(),
            gen_fps: Vec::new(),
            ref_fps: Vec::new(),
            tmd_values: Vec::new(),
            uhd_values: Vec::new(),
            degenerate_dropped: 0,
        };
        for item in prepared {
            let prepared = item?;
            set.gen_fps.push(prepared.gen_fps);
            set.ref_fps.push(prepared.ref_fps);
            set.tmd_values.extend(prepared.tmd_value);
            set.uhd_values.extend(prepared.uhd_value);
            set.degenerate_dropped += prepared.degenerate_dropped;
        }
        if set.gen_fps.len() < 2 {
            return Err(EvalError::TooFewShapes {
                class: class.to_string(),
                found: set.gen_fps.len(),
            });
        }
        metadata.degenerate_faces_dropped += set.degenerate_dropped;
        class_sets.push(set);
    }

    let features = collect_features(base, entries)?;

    let mut rows: Vec<ReportRow> = Vec::new();
    for set in &class_sets {
        rows.extend(set_rows(&set.class, set, cache_prefix)?);
        if let Some(ClassFeatures { generated: Some(gen), reference: Some(reference) }) =
            features.get(&set.class)
        {
            rows.extend(feature_rows(&set.class, gen, reference, cfg)?);
        }
    }

    let means = mean_rows(&rows);
    rows.extend(means);

    // Pooled "All" scope: one flat set across classes, metrics recomputed.
    if class_sets.len() > 1 {
        let pooled_gen: Vec<PointCloud> =
            class_sets.iter().flat_map(|s| s.gen_fps.iter().cloned()).collect();
        let pooled_ref: Vec<PointCloud> =
            class_sets.iter().flat_map(|s| s.ref_fps.iter().cloned()).collect();
        let pooled = ClassSet {
            class: ALL_SCOPE.to_string(),
            gen_fps: pooled_gen,
            ref_fps: pooled_ref,
            tmd_values: class_sets.iter().flat_map(|s| s.tmd_values.clone()).collect(),
            uhd_values: class_sets.iter().flat_map(|s| s.uhd_values.clone()).collect(),
            degenerate_dropped: 0,
        };
        rows.extend(set_rows(ALL_SCOPE, &pooled, cache_prefix)?);

        let mut gen_pool: Option<FeatureMatrix> = None;
        let mut ref_pool: Option<FeatureMatrix> = None;
        for class_features in features.values() {
            if let (Some(g), Some(r)) = (&class_features.generated, &class_features.reference) {
                gen_pool = Some(match gen_pool.take() {
                    Some(acc) => acc.vstack(g)?,
                    None => g.clone(),
                });
                ref_pool = Some(match ref_pool.take() {
                    Some(acc) => acc.vstack(r)?,
                    None => r.clone(),
                });
            }
        }
        if let (Some(g), Some(r)) = (gen_pool, ref_pool) {
            rows.extend(feature_rows(ALL_SCOPE, &g, &r, cfg)?);
        }
    }

    Ok(MetricReport { metadata, rows })
}

fn set_rows(
    scope: &str,
    set: &ClassSet,
    cache_prefix: Option<&Path>,
) -> Result<Vec<ReportRow>, EvalError> {
    let dgg = matrix_cached(cache_prefix, &set.class, "gg", &set.gen_fps, &set.gen_fps)?;
    let drr = matrix_cached(cache_prefix, &set.class, "rr", &set.ref_fps, &set.ref_fps)?;
    let dgr = matrix_cached(cache_prefix, &set.class, "gr", &set.gen_fps, &set.ref_fps)?;

    let nna = one_nna(&dgg, &drr, &dgr)?;
    let (cov, mmd) = cov_mmd(&dgr)?;
    let n = set.gen_fps.len() as u64;

    let mut rows = vec![
        row(scope, M_1NNA, nna, n),
        row(scope, M_COV, cov, n),
        row(scope, M_MMD, mmd * MMD_REPORT_SCALE, n),
    ];
    if !set.tmd_values.is_empty() {
        let v = set.tmd_values.iter().sum::<f64>() / set.tmd_values.len() as f64;
        rows.push(row(scope, M_TMD, v, set.tmd_values.len() as u64));
    }
    if !set.uhd_values.is_empty() {
        let v = set.uhd_values.iter().sum::<f64>() / set.uhd_values.len() as f64;
        rows.push(row(scope, M_UHD, v, set.uhd_values.len() as u64));
    }
    Ok(rows)
}

/// Feature-file battery: Fréchet and kernel distances plus the k-NN
/// precision/recall and density/coverage decompositions, per class with
/// `Mean` and pooled `All`. Every class must supply both sides.
pub fn evaluate_features(
    base: &Path,
    entries: &[ManifestEntry],
    cfg: &EvalConfig,
) -> Result<MetricReport, EvalError> {
    let features = collect_features(base, entries)?;
    if features.is_empty() {
        return Err(EvalError::MissingFeatures { class: "(manifest)".to_string(), side: "any" });
    }

    let mut rows: Vec<ReportRow> = Vec::new();
    let mut gen_pool: Option<FeatureMatrix> = None;
    let mut ref_pool: Option<FeatureMatrix> = None;
    for (class, class_features) in &features {
        let gen = class_features.generated.as_ref().ok_or_else(|| EvalError::MissingFeatures {
            class: class.clone(),
            side: "generated",
        })?;
        let reference =
            class_features.reference.as_ref().ok_or_else(|| EvalError::MissingFeatures {
                class: class.clone(),
                side: "reference",
            })?;
        rows.extend(feature_rows(class, gen, reference, cfg)?);
        gen_pool = Some(match gen_pool.take() {
            Some(acc) => acc.vstack(gen)?,
            None => gen.clone(),
        });
        ref_pool = Some(match ref_pool.take() {
            Some(acc) => acc.vstack(reference)?,
            None => reference.clone(),
        });
    }
    let means = mean_rows(&rows);
    rows.extend(means);
    if features.len() > 1 {
        let (g, r) = (gen_pool.unwrap(), ref_pool.unwrap());
        rows.extend(feature_rows(ALL_SCOPE, &g, &r, cfg)?);
    }

    let metadata = ReportMetadata::new(
        cfg.seed.0,
        cfg.surface_samples as u64,
        cfg.fps_points as u64,
    );
    Ok(MetricReport { metadata, rows })
}

/// Recomputes the `Mean` scope from bare class rows (the aggregation entry
/// point for externally produced tables). Input rows must not already carry
/// `Mean` or `All` scopes.
pub fn aggregate_rows(class_rows: Vec<ReportRow>) -> Result<Vec<ReportRow>, EvalError> {
    if class_rows.iter().any(|r| r.scope == MEAN_SCOPE || r.scope == ALL_SCOPE) {
        return Err(EvalError::Usage(
            "input rows must contain only class scopes; Mean/All are recomputed".into(),
        ));
    }
    let mut rows = class_rows;
    let means = mean_rows(&rows);
    rows.extend(means);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(id: &str, class: &str, role: Role, kind: Kind, group: Option<&str>) -> ManifestEntry {
        ManifestEntry {
            id: id.to_string(),
            class_label: class.to_string(),
            role,
            kind,
            path: format!("{id}.bin"),
            group: group.map(str::to_string),
        }
    }

    #[test]
    fn pairing_matches_by_id() {
        let entries = vec![
            entry("a", "chair", Role::Reference, Kind::Points, None),
            entry("a", "chair", Role::Generated, Kind::Points, None),
            entry("b", "chair", Role::Reference, Kind::Points, None),
            entry("b", "chair", Role::Generated, Kind::Points, None),
            entry("c", "plane", Role::Reference, Kind::Points, None),
            entry("c", "plane", Role::Generated, Kind::Points, None),
        ];
        let tasks = pair_entries(&entries, &EvalConfig::default()).unwrap();
        assert_eq!(tasks.len(), 3);
        assert_eq!(tasks[0].class_label, "chair");
        assert_eq!(tasks[2].class_label, "plane");
        assert!(tasks.iter().all(|t| t.generated.len() == 1));
    }

    #[test]
    fn unmatched_reference_is_an_error() {
        let entries = vec![entry("a", "chair", Role::Reference, Kind::Points, None)];
        match pair_entries(&entries, &EvalConfig::default()) {
            Err(EvalError::UnmatchedReference { id }) => assert_eq!(id, "a"),
            other => panic!("expected UnmatchedReference, got {other:?}"),
        }
    }

    #[test]
    fn orphan_generated_is_an_error() {
        let entries = vec![
            entry("a", "chair", Role::Reference, Kind::Points, None),
            entry("a", "chair", Role::Generated, Kind::Points, None),
            entry("zzz", "chair", Role::Generated, Kind::Points, None),
        ];
        assert!(matches!(
            pair_entries(&entries, &EvalConfig::default()),
            Err(EvalError::OrphanEntry { .. })
        ));
    }

    #[test]
    fn completion_group_pairs_with_reference() {
        let cfg = EvalConfig { best_of_n: 3, ..EvalConfig::default() };
        let entries = vec![
            entry("a", "chair", Role::Reference, Kind::Points, None),
            entry("a", "chair", Role::Partial, Kind::Points, None),
            entry("a-0", "chair", Role::Completion, Kind::Points, Some("a")),
            entry("a-1", "chair", Role::Completion, Kind::Points, Some("a")),
            entry("a-2", "chair", Role::Completion, Kind::Points, Some("a")),
        ];
        let tasks = pair_entries(&entries, &cfg).unwrap();
        assert_eq!(tasks.len(), 1);
        assert_eq!(tasks[0].generated.len(), 3);
        assert!(tasks[0].partial.is_some());
    }

    #[test]
    fn wrong_completion_count_is_an_error() {
        let cfg = EvalConfig { best_of_n: 10, ..EvalConfig::default() };
        let entries = vec![
            entry("a", "chair", Role::Reference, Kind::Points, None),
            entry("a-0", "chair", Role::Completion, Kind::Points, Some("a")),
        ];
        assert!(matches!(
            pair_entries(&entries, &cfg),
            Err(EvalError::MissingCompletionGroup { expected: 10, found: 1, .. })
        ));
    }

    #[test]
    fn feature_entries_do_not_pair() {
        let entries = vec![
            entry("a", "chair", Role::Reference, Kind::Points, None),
            entry("a", "chair", Role::Generated, Kind::Points, None),
            entry("feat-g", "chair", Role::Generated, Kind::Features, None),
            entry("feat-r", "chair", Role::Reference, Kind::Features, None),
        ];
        let tasks = pair_entries(&entries, &EvalConfig::default()).unwrap();
        assert_eq!(tasks.len(), 1);
    }

    #[test]
    fn mean_rows_are_unweighted() {
        let rows = vec![
            row("a", "F1", 60.0, 100),
            row("b", "F1", 80.0, 3),
            row("a", "COV", 10.0, 100),
            row("b", "COV", 30.0, 3),
        ];
        let means = mean_rows(&rows);
        assert_eq!(means.len(), 2);
        assert_eq!(means[0].metric, "F1");
        assert_eq!(means[0].value, 70.0);
        assert_eq!(means[0].count, 2);
        assert_eq!(means[1].metric, "COV");
        assert_eq!(means[1].value, 20.0);
    }

    #[test]
    fn aggregate_rejects_precomputed_means() {
        let rows = vec![row(MEAN_SCOPE, "F1", 1.0, 1)];
        assert!(matches!(aggregate_rows(rows), Err(EvalError::Usage(_))));
    }

    #[test]
    fn table_mean_reproduction() {
        // Frozen five-class fixture for the unweighted class average.
        let nna = [33.678, 50.990, 74.700, 35.941, 54.219];
        let rows: Vec<ReportRow> = nna
            .iter()
            .enumerate()
            .map(|(i, &v)| row(&format!("c{i}"), M_1NNA, v, 1))
            .collect();
        let means = mean_rows(&rows);
        assert!((means[0].value - 49.9056).abs() < 1e-10);
    }
}
