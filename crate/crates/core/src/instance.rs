//! One-to-one shape comparison metrics: Chamfer distances, the F-score
//! family, Monte-Carlo volumetric IoU, normal consistency, directed Hausdorff
//! distance, and best-of-N candidate selection.

use crate::error::{Error, Result};
use crate::geom::vec3::dot;
use crate::geom::{NnIndex, PointCloud, TriangleMesh};
use crate::math;
use crate::rng::{Seed, SplitMix64};

/// F-score distance threshold, in model units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FscoreParams {
    pub tau: f64,
}

impl Default for FscoreParams {
    fn default() -> Self {
        Self { tau: 0.01 }
    }
}

/// Monte-Carlo occupancy sampling parameters. Queries are drawn uniformly
/// from the cube `[-(0.5 + padding/2), +(0.5 + padding/2)]^3`: a centered
/// unit cube grown by `padding` in total along each axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IouParams {
    pub n_queries: usize,
    pub padding: f64,
}

impl Default for IouParams {
    fn default() -> Self {
        Self { n_queries: 100_000, padding: 0.1 }
    }
}

/// Instance-level metric bundle for one prediction/ground-truth pair.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceResult {
    /// L1 Chamfer distance in the normalized frame, scaled by 10.
    pub chamfer_l1: f64,
    /// Squared (L2) Chamfer distance.
    pub chamfer_l2: f64,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub iou: Option<f64>,
    pub normal_consistency: Option<f64>,
}

fn require_non_empty(x: &PointCloud, y: &PointCloud) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyGeometry);
    }
    Ok(())
}

/// Mean squared nearest-neighbour distance from every point of `from` to the
/// indexed set, in index order.
fn mean_min_dist2(from: &PointCloud, to_index: &NnIndex) -> f64 {
    let mut sum = 0.0;
    for &p in from.points() {
        sum += to_index.min_dist2(p);
    }
    sum / from.len() as f64
}

fn mean_min_dist(from: &PointCloud, to_index: &NnIndex) -> f64 {
    let mut sum = 0.0;
    for &p in from.points() {
        sum += math::sqrt(to_index.min_dist2(p));
    }
    sum / from.len() as f64
}

/// Bidirectional squared Chamfer distance with per-set means:
/// `mean_x min_y |x-y|^2 + mean_y min_x |x-y|^2`.
pub fn chamfer_l2(x: &PointCloud, y: &PointCloud) -> Result<f64> {
    require_non_empty(x, y)?;
    let ix = NnIndex::build(x)?;
    let iy = NnIndex::build(y)?;
    Ok(chamfer_l2_prebuilt(x, &ix, y, &iy))
}

/// [`chamfer_l2`] with caller-provided indices, so batch jobs can reuse one
/// index per cloud across many pairs. `ix` must index `x` and `iy` must
/// index `y`; results are bitwise identical to [`chamfer_l2`].
pub fn chamfer_l2_prebuilt(x: &PointCloud, ix: &NnIndex, y: &PointCloud, iy: &NnIndex) -> f64 {
    mean_min_dist2(x, iy) + mean_min_dist2(y, ix)
}

/// L1 Chamfer distance: the mean of an accuracy and a completeness term,
/// `1/(2|X|) sum_x min_y |x-y| + 1/(2|Y|) sum_y min_x |x-y|`, unscaled.
pub fn chamfer_l1(x: &PointCloud, y: &PointCloud) -> Result<f64> {
    require_non_empty(x, y)?;
    let ix = NnIndex::build(x)?;
    let iy = NnIndex::build(y)?;
    Ok(0.5 * mean_min_dist(x, &iy) + 0.5 * mean_min_dist(y, &ix))
}

/// [`chamfer_l1`] times 10: the reporting convention for inputs normalized so
/// the object's maximal bounding-box edge is 1. Callers working in a raw
/// coordinate frame should instead scale [`chamfer_l1`] by
/// `10 / bounding_box(gt).max_edge()`.
pub fn chamfer_l1_scaled(x: &PointCloud, y: &PointCloud) -> Result<f64> {
    Ok(10.0 * chamfer_l1(x, y)?)
}

/// F-score with precision and recall, all in percent.
///
/// `x` holds prediction samples, `y` ground-truth samples. A point counts as
/// matched when its nearest neighbour in the other set lies strictly closer
/// than `tau`.
pub fn fscore(x: &PointCloud, y: &PointCloud, params: &FscoreParams) -> Result<(f64, f64, f64)> {
    if !params.tau.is_finite() || params.tau <= 0.0 {
        return Err(Error::InvalidParameter("fscore tau must be > 0"));
    }
    require_non_empty(x, y)?;
    let ix = NnIndex::build(x)?;
    let iy = NnIndex::build(y)?;

    let close = |from: &PointCloud, to: &NnIndex| {
        let mut hits = 0usize;
        for &p in from.points() {
            if math::sqrt(to.min_dist2(p)) < params.tau {
                hits += 1;
            }
        }
        100.0 * hits as f64 / from.len() as f64
    };

    let precision = close(x, &iy);
    let recall = close(y, &ix);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok((f1, precision, recall))
}

/// Monte-Carlo volumetric intersection-over-union, in percent.
///
/// Draws `n_queries` points uniformly from the padded unit cube (three stream
/// draws per point, x then y then z) and classifies each against both meshes
/// with the ray-parity test. Both meshes must be watertight and normalized to
/// the centered unit frame. Errs with [`Error::NoOccupiedSamples`] when no
/// query lands in either mesh, which almost always means the inputs are not
/// normalized.
pub fn volumetric_iou(
    pred: &TriangleMesh,
    gt: &TriangleMesh,
    params: &IouParams,
    seed: Seed,
) -> Result<f64> {
    if params.n_queries == 0 {
        return Err(Error::InvalidParameter("iou query count must be >= 1"));
    }
    if !params.padding.is_finite() || params.padding < 0.0 {
        return Err(Error::InvalidParameter("iou padding must be >= 0"));
    }
    if pred.triangles().is_empty() || gt.triangles().is_empty() {
        return Err(Error::EmptyGeometry);
    }

    let half = 0.5 + params.padding / 2.0;
    let mut rng = SplitMix64::new(seed);
    let mut inter = 0u64;
    let mut union = 0u64;
    for _ in 0..params.n_queries {
        let q = [
            (rng.unit_f64() * 2.0 - 1.0) * half,
            (rng.unit_f64() * 2.0 - 1.0) * half,
            (rng.unit_f64() * 2.0 - 1.0) * half,
        ];
        let in_pred = crate::geom::is_inside(pred, q)?;
        let in_gt = crate::geom::is_inside(gt, q)?;
        if in_pred && in_gt {
            inter += 1;
        }
        if in_pred || in_gt {
            union += 1;
        }
    }
    if union == 0 {
        return Err(Error::NoOccupiedSamples);
    }
    Ok(100.0 * inter as f64 / union as f64)
}

/// Mean absolute cosine between normals at mutually nearest points, averaged
/// over both directions, in percent. Both clouds must carry normals.
pub fn normal_consistency(x: &PointCloud, y: &PointCloud) -> Result<f64> {
    require_non_empty(x, y)?;
    let (xn, yn) = match (x.normals(), y.normals()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::MissingNormals),
    };
    let ix = NnIndex::build(x)?;
    let iy = NnIndex::build(y)?;

    let mut sum_x = 0.0;
    for (p, n) in x.points().iter().zip(xn) {
        let (j, _) = iy.nearest(*p);
        sum_x += math::abs(dot(*n, yn[j])).min(1.0);
    }
    let mut sum_y = 0.0;
    for (p, n) in y.points().iter().zip(yn) {
        let (j, _) = ix.nearest(*p);
        sum_y += math::abs(dot(*n, xn[j])).min(1.0);
    }
    Ok(100.0 * 0.5 * (sum_x / x.len() as f64 + sum_y / y.len() as f64))
}

/// Directed Hausdorff distance `max_{a in A} min_{b in B} |a - b|`.
pub fn directed_hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    require_non_empty(a, b)?;
    let ib = NnIndex::build(b)?;
    let mut worst = 0.0f64;
    for &p in a.points() {
        let d = ib.min_dist2(p);
        if d > worst {
            worst = d;
        }
    }
    Ok(math::sqrt(worst))
}

/// Selects the completion with the highest F1 against `gt` (ties to the
/// lowest index) and returns its full instance-metric bundle. IoU is left
/// unset (clouds carry no volume); normal consistency is filled in when both
/// the winner and `gt` carry normals.
pub fn best_of_n(
    completions: &[PointCloud],
    gt: &PointCloud,
    params: &FscoreParams,
) -> Result<(usize, InstanceResult)> {
    if completions.is_empty() {
        return Err(Error::EmptyGeometry);
    }
    let mut best_idx = 0usize;
    let mut best = f64::NEG_INFINITY;
    for (i, candidate) in completions.iter().enumerate() {
        let (f1, _, _) = fscore(candidate, gt, params)?;
        if f1 > best {
            best = f1;
            best_idx = i;
        }
    }
    let winner = &completions[best_idx];
    let (f1, precision, recall) = fscore(winner, gt, params)?;
    let normal_consistency = match (winner.normals(), gt.normals()) {
        (Some(_), Some(_)) => Some(normal_consistency(winner, gt)?),
        _ => None,
    };
    Ok((
        best_idx,
        InstanceResult {
            chamfer_l1: chamfer_l1_scaled(winner, gt)?,
            chamfer_l2: chamfer_l2(winner, gt)?,
            f1,
            precision,
            recall,
            iou: None,
            normal_consistency,
        },
    ))
}
