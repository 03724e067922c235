//! Distribution-level metrics over two sets of shapes: the pairwise Chamfer
//! matrix, coverage (COV), minimum matching distance (MMD), the leave-one-out
//! 1-nearest-neighbour two-sample accuracy (1-NNA), total mutual difference
//! (TMD) and unidirectional Hausdorff distance (UHD).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::{NnIndex, PointCloud};
use crate::instance::{chamfer_l2_prebuilt, directed_hausdorff};

/// Rectangular matrix of pairwise shape distances, rows = generated set,
/// columns = reference set, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Wraps precomputed values; every entry must be finite and >= 0.
    pub fn from_values(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::InconsistentDims);
        }
        for &v in &values {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self { rows, cols, values })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Set-level metric bundle for one generated/reference pairing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetResult {
    pub cov: f64,
    pub mmd: f64,
    pub one_nna: f64,
}

/// Entry `(i, j)` is the squared Chamfer distance between generated cloud `i`
/// and reference cloud `j`. Cells are independent, so callers may recompute
/// any subset in parallel and obtain identical values.
pub fn pairwise_cd_matrix(gen: &[PointCloud], reference: &[PointCloud]) -> Result<DistanceMatrix> {
    if gen.is_empty() || reference.is_empty() {
        return Err(Error::EmptyGeometry);
    }
    let gen_idx: Vec<NnIndex> = gen.iter().map(NnIndex::build).collect::<Result<_>>()?;
    let ref_idx: Vec<NnIndex> = reference.iter().map(NnIndex::build).collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(gen.len() * reference.len());
    for (g, gi) in gen.iter().zip(&gen_idx) {
        for (r, ri) in reference.iter().zip(&ref_idx) {
            values.push(chamfer_l2_prebuilt(g, gi, r, ri));
        }
    }
    DistanceMatrix::from_values(gen.len(), reference.len(), values)
}

/// Coverage and minimum matching distance from a generated-by-reference
/// distance matrix.
///
/// COV is the percentage of reference columns that are the argmin of at least
/// one generated row (ties to the lowest column); MMD is the mean over
/// reference columns of the column minimum.
pub fn cov_mmd(d: &DistanceMatrix) -> Result<(f64, f64)> {
    if d.rows == 0 || d.cols == 0 {
        return Err(Error::DegenerateMatrix);
    }
    let mut covered = vec![false; d.cols];
    for i in 0..d.rows {
        let mut best = 0usize;
        let mut best_v = d.get(i, 0);
        for j in 1..d.cols {
            let v = d.get(i, j);
            if v < best_v {
                best_v = v;
                best = j;
            }
        }
        covered[best] = true;
    }
    let cov = 100.0 * covered.iter().filter(|&&c| c).count() as f64 / d.cols as f64;

    let mut mmd = 0.0;
    for j in 0..d.cols {
        let mut min_v = d.get(0, j);
        for i in 1..d.rows {
            let v = d.get(i, j);
            if v < min_v {
                min_v = v;
            }
        }
        mmd += min_v;
    }
    mmd /= d.cols as f64;
    Ok((cov, mmd))
}

#[derive(Clone, Copy)]
struct Candidate {
    dist: f64,
    generated: bool,
    index: usize,
}

impl Candidate {
    /// Ordering for nearest-neighbour election: smaller distance first, then
    /// generated before reference, then lower index.
    fn beats(&self, other: &Candidate) -> bool {
        if self.dist != other.dist {
            return self.dist < other.dist;
        }
        if self.generated != other.generated {
            return self.generated;
        }
        self.index < other.index
    }
}

/// Leave-one-out 1-NN two-sample classification accuracy, in percent.
///
/// Every sample in the merged set votes the label of its nearest *other*
/// sample (self excluded); the return value is the percentage of samples
/// whose vote matches their true set. 50% is ideal for unconditional
/// generation; 0% for completion against paired ground truth, where each
/// sample's duplicate sits in the other set.
pub fn one_nna(dgg: &DistanceMatrix, drr: &DistanceMatrix, dgr: &DistanceMatrix) -> Result<f64> {
    let ng = dgg.rows;
    let nr = drr.rows;
    if dgg.cols != ng || drr.cols != nr || dgr.rows != ng || dgr.cols != nr {
        return Err(Error::InconsistentDims);
    }
    if ng == 0 || nr == 0 {
        return Err(Error::DegenerateMatrix);
    }

    let mut correct = 0usize;
    for i in 0..ng {
        let mut best: Option<Candidate> = None;
        for j in 0..ng {
            if j == i {
                continue;
            }
            let c = Candidate { dist: dgg.get(i, j), generated: true, index: j };
            if best.is_none_or(|b| c.beats(&b)) {
                best = Some(c);
            }
        }
        for j in 0..nr {
            let c = Candidate { dist: dgr.get(i, j), generated: false, index: j };
            if best.is_none_or(|b| c.beats(&b)) {
                best = Some(c);
            }
        }
        if best.expect("merged set has >= 2 samples").generated {
            correct += 1;
        }
    }
    for j in 0..nr {
        let mut best: Option<Candidate> = None;
        for i in 0..nr {
            if i == j {
                continue;
            }
            let c = Candidate { dist: drr.get(j, i), generated: false, index: i };
            if best.is_none_or(|b| c.beats(&b)) {
                best = Some(c);
            }
        }
        for i in 0..ng {
            let c = Candidate { dist: dgr.get(i, j), generated: true, index: i };
            if best.is_none_or(|b| c.beats(&b)) {
                best = Some(c);
            }
        }
        if !best.expect("merged set has >= 2 samples").generated {
            correct += 1;
        }
    }
    Ok(100.0 * correct as f64 / (ng + nr) as f64)
}

/// Total mutual difference: for each completion, the mean squared Chamfer
/// distance to the other completions, summed over completions. A diversity
/// score; identical completions give 0.
pub fn tmd(completions: &[PointCloud]) -> Result<f64> {
    let k = completions.len();
    if k < 2 {
        return Err(Error::NeedAtLeastTwo);
    }
    let indices: Vec<NnIndex> = completions.iter().map(NnIndex::build).collect::<Result<_>>()?;
    // Chamfer is exactly symmetric, so compute each unordered pair once.
    let mut pairwise = vec![0.0; k * k];
    for i in 0..k {
        for j in i + 1..k {
            let d = chamfer_l2_prebuilt(&completions[i], &indices[i], &completions[j], &indices[j]);
            pairwise[i * k + j] = d;
            pairwise[j * k + i] = d;
        }
    }
    let mut total = 0.0;
    for i in 0..k {
        let mut sum = 0.0;
        for j in 0..k {
            if j != i {
                sum += pairwise[i * k + j];
            }
        }
        total += sum / (k - 1) as f64;
    }
    Ok(total)
}

/// Unidirectional Hausdorff distance: the mean over completions of the
/// directed Hausdorff distance from the partial input to the completion. A
/// fidelity score; every observed point must be explained by each completion.
pub fn uhd(partial: &PointCloud, completions: &[PointCloud]) -> Result<f64> {
    if completions.is_empty() || partial.is_empty() {
        return Err(Error::EmptyGeometry);
    }
    let mut sum = 0.0;
    for completion in completions {
        sum += directed_hausdorff(partial, completion)?;
    }
    Ok(sum / completions.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cloud(pts: &[[f64; 3]]) -> PointCloud {
        PointCloud::new(pts.to_vec()).unwrap()
    }

    fn singletons(xs: &[f64]) -> Vec<PointCloud> {
        xs.iter().map(|&x| cloud(&[[x, 0.0, 0.0]])).collect()
    }

    #[test]
    fn matrix_of_identical_sets() {
        let g = singletons(&[0.0, 1.0, 5.0]);
        let d = pairwise_cd_matrix(&g, &g).unwrap();
        for i in 0..3 {
            assert_eq!(d.get(i, i), 0.0);
            for j in 0..3 {
                assert_eq!(d.get(i, j), d.get(j, i));
            }
        }
    }

    #[test]
    fn one_by_one_matrix() {
        let g = singletons(&[0.0]);
        let r = singletons(&[2.0]);
        let d = pairwise_cd_matrix(&g, &r).unwrap();
        assert_eq!(d.get(0, 0), 8.0); // 2 * 2^2
        let (cov, mmd) = cov_mmd(&d).unwrap();
        assert_eq!(cov, 100.0);
        assert_eq!(mmd, 8.0);
    }

    #[test]
    fn cov_mmd_identity_sets() {
        let g = singletons(&[0.0, 1.0, 5.0]);
        let d = pairwise_cd_matrix(&g, &g).unwrap();
        let (cov, mmd) = cov_mmd(&d).unwrap();
        assert_eq!(cov, 100.0);
        assert_eq!(mmd, 0.0);
    }

    #[test]
    fn cov_collapses_when_all_rows_pick_one_column() {
        // Column 0 is everyone's argmin.
        let d = DistanceMatrix::from_values(4, 4, vec![
            0.1, 5.0, 5.0, 5.0, //
            0.2, 5.0, 5.0, 5.0, //
            0.3, 5.0, 5.0, 5.0, //
            0.4, 5.0, 5.0, 5.0,
        ])
        .unwrap();
        let (cov, _) = cov_mmd(&d).unwrap();
        assert_eq!(cov, 25.0);
    }

    #[test]
    fn one_nna_separated_clusters_is_100() {
        let g = singletons(&[0.0, 0.01, 0.02, 0.03]);
        let r = singletons(&[100.0, 100.01, 100.02, 100.03]);
        let dgg = pairwise_cd_matrix(&g, &g).unwrap();
        let drr = pairwise_cd_matrix(&r, &r).unwrap();
        let dgr = pairwise_cd_matrix(&g, &r).unwrap();
        assert_eq!(one_nna(&dgg, &drr, &dgr).unwrap(), 100.0);
    }

    #[test]
    fn one_nna_duplicated_sets_is_0() {
        let g = singletons(&[0.0, 1.0, 2.0, 3.0]);
        let dgg = pairwise_cd_matrix(&g, &g).unwrap();
        let dgr = pairwise_cd_matrix(&g, &g).unwrap();
        assert_eq!(one_nna(&dgg, &dgg, &dgr).unwrap(), 0.0);
    }

    #[test]
    fn one_nna_singletons_is_0() {
        let g = singletons(&[0.0]);
        let r = singletons(&[9.0]);
        let dgg = pairwise_cd_matrix(&g, &g).unwrap();
        let drr = pairwise_cd_matrix(&r, &r).unwrap();
        let dgr = pairwise_cd_matrix(&g, &r).unwrap();
        assert_eq!(one_nna(&dgg, &drr, &dgr).unwrap(), 0.0);
    }

    #[test]
    fn cov_invariant_under_monotone_transform_and_mmd_linear() {
        let g = singletons(&[0.0, 1.5, 4.0, 2.2]);
        let r = singletons(&[0.4, 2.0, 8.0]);
        let d = pairwise_cd_matrix(&g, &r).unwrap();
        let (cov, mmd) = cov_mmd(&d).unwrap();

        // Squaring is monotone on non-negative distances.
        let squared = DistanceMatrix::from_values(
            d.rows(),
            d.cols(),
            d.values().iter().map(|v| v * v).collect(),
        )
        .unwrap();
        let (cov_sq, _) = cov_mmd(&squared).unwrap();
        assert_eq!(cov, cov_sq);

        let scaled = DistanceMatrix::from_values(
            d.rows(),
            d.cols(),
            d.values().iter().map(|v| v * 4.0).collect(),
        )
        .unwrap();
        let (cov_sc, mmd_sc) = cov_mmd(&scaled).unwrap();
        assert_eq!(cov, cov_sc);
        assert!((mmd_sc - 4.0 * mmd).abs() < 1e-12);
    }

    #[test]
    fn one_nna_scale_invariant() {
        let g = singletons(&[0.0, 1.0, 4.0]);
        let r = singletons(&[0.5, 2.0, 8.0]);
        let dgg = pairwise_cd_matrix(&g, &g).unwrap();
        let drr = pairwise_cd_matrix(&r, &r).unwrap();
        let dgr = pairwise_cd_matrix(&g, &r).unwrap();
        let base = one_nna(&dgg, &drr, &dgr).unwrap();

        let scale = |d: &DistanceMatrix| {
            DistanceMatrix::from_values(
                d.rows(),
                d.cols(),
                d.values().iter().map(|v| v * 7.25).collect(),
            )
            .unwrap()
        };
        let scaled = one_nna(&scale(&dgg), &scale(&drr), &scale(&dgr)).unwrap();
        assert_eq!(base, scaled);
    }

    #[test]
    fn tmd_identical_completions_is_zero() {
        let c = cloud(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        assert_eq!(tmd(&[c.clone(), c.clone(), c]).unwrap(), 0.0);
    }

    #[test]
    fn tmd_two_singletons() {
        let comps = singletons(&[0.0, 1.0]);
        // CD = 2 between them; each term contributes 2.
        assert_eq!(tmd(&comps).unwrap(), 4.0);
    }

    #[test]
    fn tmd_needs_two() {
        let comps = singletons(&[0.0]);
        assert_eq!(tmd(&comps), Err(Error::NeedAtLeastTwo));
    }

    #[test]
    fn uhd_hand_case() {
        let partial = cloud(&[[0.0, 0.0, 0.0], [3.0, 0.0, 0.0]]);
        let completion = cloud(&[[1.0, 0.0, 0.0]]);
        assert_eq!(uhd(&partial, &[completion]).unwrap(), 2.0);
    }

    #[test]
    fn uhd_containment_and_duplicates() {
        let partial = cloud(&[[0.0, 0.0, 0.0]]);
        let completion = cloud(&[[0.0, 0.0, 0.0], [5.0, 0.0, 0.0]]);
        assert_eq!(uhd(&partial, core::slice::from_ref(&completion)).unwrap(), 0.0);
        assert_eq!(
            uhd(&partial, &[completion.clone(), completion]).unwrap(),
            0.0
        );
    }
}
