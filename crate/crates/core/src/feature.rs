//! Feature-space distribution metrics: Gaussian summaries and the Fréchet
//! distance, the unbiased kernel (MMD^2) distance with a polynomial kernel,
//! k-NN manifold precision/recall and the density/coverage refinement.
//!
//! These operate on plain `n x d` feature matrices; whatever network produced
//! the features is upstream of this crate.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg;
use crate::math;

/// Relative tolerance for clamping small negative eigenvalues of the
/// covariance product.
const PSD_CLAMP_REL: f64 = 1e-6;

/// Row-major `n x d` matrix of per-sample feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidParameter("feature matrix must be at least 1x1"));
        }
        if values.len() != n * d {
            return Err(Error::InconsistentDims);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n, d, values })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Rows of both matrices stacked, for pooled evaluation.
    pub fn vstack(&self, other: &FeatureMatrix) -> Result<FeatureMatrix> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch { left: self.d, right: other.d });
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        FeatureMatrix::new(self.n + other.n, self.d, values)
    }
}

/// Mean vector and covariance of a feature matrix; the operands of the
/// Fréchet distance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSummary {
    pub mu: Vec<f64>,
    /// Row-major `d x d`, symmetric by construction.
    pub sigma: Vec<f64>,
}

impl GaussianSummary {
    /// Validating constructor: `sigma` must be `d x d`, finite, symmetric to
    /// `1e-9` and with a non-negative diagonal. [`gaussian_summary`] output
    /// satisfies all of this by construction.
    pub fn new(mu: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        let d = mu.len();
        if sigma.len() != d * d {
            return Err(Error::InconsistentDims);
        }
        if mu.iter().chain(sigma.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        for i in 0..d {
            if sigma[i * d + i] < 0.0 {
                return Err(Error::InvalidParameter("covariance diagonal must be >= 0"));
            }
            for j in i + 1..d {
                if math::abs(sigma[i * d + j] - sigma[j * d + i]) > 1e-9 {
                    return Err(Error::InvalidParameter("covariance must be symmetric"));
                }
            }
        }
        Ok(Self { mu, sigma })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }
}

/// Column means and the unbiased (`n - 1`) covariance, computed in two
/// passes. The covariance is exactly symmetric: each off-diagonal entry is
/// computed once and mirrored.
pub fn gaussian_summary(f: &FeatureMatrix) -> Result<GaussianSummary> {
    if f.n < 2 {
        return Err(Error::TooFewSamples { n: f.n, min: 2 });
    }
    let (n, d) = (f.n, f.d);
    let mut mu = vec![0.0; d];
    for i in 0..n {
        let row = f.row(i);
        for j in 0..d {
            mu[j] += row[j];
        }
    }
    for m in mu.iter_mut() {
        *m /= n as f64;
    }

    let mut sigma = vec![0.0; d * d];
    for j in 0..d {
        for k in j..d {
            let mut sum = 0.0;
            for i in 0..n {
                let row = f.row(i);
                sum += (row[j] - mu[j]) * (row[k] - mu[k]);
            }
            let c = sum / (n - 1) as f64;
            sigma[j * d + k] = c;
            sigma[k * d + j] = c;
        }
    }
    Ok(GaussianSummary { mu, sigma })
}

/// Fréchet distance between two Gaussian summaries:
/// `|mu_a - mu_b|^2 + tr(S_a + S_b - 2 (S_a S_b)^{1/2})`.
///
/// The matrix square root is taken via the symmetric eigendecomposition of
/// `(S_a S_b + S_b S_a) / 2`; eigenvalues above `-1e-6 * lambda_max` are
/// clamped to zero, anything lower is reported as a corrupt-input error. The
/// result is clamped to be non-negative. The symmetrized product is bitwise
/// identical under operand swap, so the distance is exactly symmetric.
pub fn frechet_distance(a: &GaussianSummary, b: &GaussianSummary) -> Result<f64> {
    let d = a.dim();
    if d != b.dim() {
        return Err(Error::DimensionMismatch { left: d, right: b.dim() });
    }

    let mut mean_term = 0.0;
    for j in 0..d {
        let diff = a.mu[j] - b.mu[j];
        mean_term += diff * diff;
    }

    let ab = linalg::matmul(&a.sigma, &b.sigma, d);
    let ba = linalg::matmul(&b.sigma, &a.sigma, d);
    let mut sym = vec![0.0; d * d];
    for i in 0..d * d {
        sym[i] = 0.5 * (ab[i] + ba[i]);
    }

    let eigs = linalg::symmetric_eigenvalues(&sym, d)?;
    let lambda_max = eigs.iter().fold(0.0f64, |m, &e| m.max(e));
    let tol = PSD_CLAMP_REL * lambda_max;
    let mut trace_sqrt = 0.0;
    for &e in &eigs {
        if e < -tol {
            return Err(Error::NonPsdProduct { eigenvalue: e, tolerance: tol });
        }
        trace_sqrt += math::sqrt(e.max(0.0));
    }

    let mut trace_a = 0.0;
    let mut trace_b = 0.0;
    for j in 0..d {
        trace_a += a.sigma[j * d + j];
        trace_b += b.sigma[j * d + j];
    }

    Ok((mean_term + trace_a + trace_b - 2.0 * trace_sqrt).max(0.0))
}

/// Polynomial-kernel parameters for the unbiased MMD^2 estimator. With
/// `block_size = None` the estimator runs over the full sets; otherwise
/// consecutive blocks of that size are estimated independently and averaged
/// (rows beyond the last full block are dropped).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub degree: u32,
    pub scale: f64,
    pub offset: f64,
    pub block_size: Option<usize>,
}

impl KernelParams {
    /// The customary defaults: `(x . y / d + 1)^3`, single block.
    pub fn for_dim(d: usize) -> Self {
        Self { degree: 3, scale: 1.0 / d as f64, offset: 1.0, block_size: None }
    }
}

fn poly_kernel(x: &[f64], y: &[f64], p: &KernelParams) -> f64 {
    let mut dot = 0.0;
    for j in 0..x.len() {
        dot += x[j] * y[j];
    }
    math::powi(p.scale * dot + p.offset, p.degree)
}

fn mmd2_unbiased(
    x: &FeatureMatrix,
    y: &FeatureMatrix,
    xr: core::ops::Range<usize>,
    yr: core::ops::Range<usize>,
    p: &KernelParams,
) -> f64 {
    let m = xr.len();
    let n = yr.len();

    let mut kxx = 0.0;
    for i in xr.clone() {
        for j in xr.clone() {
            if i != j {
                kxx += poly_kernel(x.row(i), x.row(j), p);
            }
        }
    }
    let mut kyy = 0.0;
    for i in yr.clone() {
        for j in yr.clone() {
            if i != j {
                kyy += poly_kernel(y.row(i), y.row(j), p);
            }
        }
    }
    let mut kxy = 0.0;
    for i in xr {
        for j in yr.clone() {
            kxy += poly_kernel(x.row(i), y.row(j), p);
        }
    }

    kxx / (m * (m - 1)) as f64 + kyy / (n * (n - 1)) as f64 - 2.0 * kxy / (m * n) as f64
}

/// Unbiased squared maximum mean discrepancy between two feature sets under
/// the polynomial kernel `(scale * <x, y> + offset)^degree`. Exactly
/// symmetric in its arguments and invariant under row permutation of either
/// matrix (single-block mode).
pub fn kernel_distance(x: &FeatureMatrix, y: &FeatureMatrix, p: &KernelParams) -> Result<f64> {
    if x.d != y.d {
        return Err(Error::DimensionMismatch { left: x.d, right: y.d });
    }
    if p.degree < 1 {
        return Err(Error::InvalidParameter("kernel degree must be >= 1"));
    }
    if !p.scale.is_finite() || p.scale <= 0.0 {
        return Err(Error::InvalidParameter("kernel scale must be > 0"));
    }
    if x.n < 2 || y.n < 2 {
        return Err(Error::TooFewSamples { n: x.n.min(y.n), min: 2 });
    }

    match p.block_size {
        None => Ok(mmd2_unbiased(x, y, 0..x.n, 0..y.n, p)),
        Some(bs) => {
            if bs < 2 {
                return Err(Error::InvalidParameter("kernel block size must be >= 2"));
            }
            let blocks = x.n.min(y.n) / bs;
            if blocks == 0 {
                return Err(Error::TooFewSamples { n: x.n.min(y.n), min: bs });
            }
            let mut sum = 0.0;
            for b in 0..blocks {
                sum += mmd2_unbiased(x, y, b * bs..(b + 1) * bs, b * bs..(b + 1) * bs, p);
            }
            Ok(sum / blocks as f64)
        }
    }
}

/// Neighbour count for the k-NN manifold metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnnParams {
    pub k: usize,
}

impl KnnParams {
    /// Customary default for precision/recall.
    pub const PRECISION_RECALL: KnnParams = KnnParams { k: 3 };
    /// Customary default for density/coverage.
    pub const DENSITY_COVERAGE: KnnParams = KnnParams { k: 5 };
}

/// Squared distance from every row of `a` to its k-th nearest *other* row of
/// `a`: the squared k-NN ball radius of each sample.
fn knn_radii2(a: &FeatureMatrix, k: usize) -> Vec<f64> {
    let n = a.n;
    let mut radii = Vec::with_capacity(n);
    let mut dists = Vec::with_capacity(n - 1);
    for i in 0..n {
        dists.clear();
        let ri = a.row(i);
        for j in 0..n {
            if j != i {
                dists.push(row_dist2(ri, a.row(j)));
            }
        }
        // k-th smallest value; ties among equal values need no index rule.
        let (_, kth, _) = dists.select_nth_unstable_by(k - 1, |x, y| x.total_cmp(y));
        radii.push(*kth);
    }
    radii
}

fn row_dist2(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    for j in 0..a.len() {
        let diff = a[j] - b[j];
        sum += diff * diff;
    }
    sum
}

/// Improved k-NN precision and recall, in percent.
///
/// The manifold of a set is the union of balls centered at each sample with
/// radius equal to the distance to its k-th nearest neighbour within the set
/// (self excluded). Precision is the share of generated samples inside the
/// reference manifold; recall the share of reference samples inside the
/// generated manifold. Ball membership is inclusive, so identical sets score
/// exactly 100/100.
pub fn knn_precision_recall(
    reference: &FeatureMatrix,
    generated: &FeatureMatrix,
    p: &KnnParams,
) -> Result<(f64, f64)> {
    if reference.d != generated.d {
        return Err(Error::DimensionMismatch { left: reference.d, right: generated.d });
    }
    if p.k == 0 || p.k >= reference.n || p.k >= generated.n {
        return Err(Error::KTooLarge { k: p.k, n: reference.n.min(generated.n) });
    }

    let r_radii = knn_radii2(reference, p.k);
    let g_radii = knn_radii2(generated, p.k);

    let inside = |points: &FeatureMatrix, centers: &FeatureMatrix, radii: &[f64]| {
        let mut hits = 0usize;
        for i in 0..points.n {
            let row = points.row(i);
            let contained = (0..centers.n).any(|c| row_dist2(row, centers.row(c)) <= radii[c]);
            if contained {
                hits += 1;
            }
        }
        100.0 * hits as f64 / points.n as f64
    };

    let precision = inside(generated, reference, &r_radii);
    let recall = inside(reference, generated, &g_radii);
    Ok((precision, recall))
}

/// Density and coverage, the refined replacements for k-NN precision/recall.
///
/// Density counts, for every generated sample, how many reference balls
/// contain it, normalized by `k * |G|`; it can exceed 1. Coverage is the
/// fraction of reference samples whose k-NN ball contains at least one
/// generated sample.
pub fn density_coverage(
    reference: &FeatureMatrix,
    generated: &FeatureMatrix,
    p: &KnnParams,
) -> Result<(f64, f64)> {
    if reference.d != generated.d {
        return Err(Error::DimensionMismatch { left: reference.d, right: generated.d });
    }
    if p.k == 0 || p.k >= reference.n {
        return Err(Error::KTooLarge { k: p.k, n: reference.n });
    }

    let radii = knn_radii2(reference, p.k);
    let mut ball_hits = 0u64;
    let mut covered = vec![false; reference.n];
    for i in 0..generated.n {
        let row = generated.row(i);
        for (c, &r2) in radii.iter().enumerate() {
            if row_dist2(row, reference.row(c)) <= r2 {
                ball_hits += 1;
                covered[c] = true;
            }
        }
    }
    let density = ball_hits as f64 / (p.k * generated.n) as f64;
    let coverage = covered.iter().filter(|&&c| c).count() as f64 / reference.n as f64;
    Ok((density, coverage))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[&[f64]]) -> FeatureMatrix {
        let n = rows.len();
        let d = rows[0].len();
        FeatureMatrix::new(n, d, rows.iter().flat_map(|r| r.iter().copied()).collect()).unwrap()
    }

    #[test]
    fn summary_of_two_scalars() {
        let f = matrix(&[&[0.0], &[2.0]]);
        let s = gaussian_summary(&f).unwrap();
        assert_eq!(s.mu, vec![1.0]);
        assert_eq!(s.sigma, vec![2.0]);
    }

    #[test]
    fn summary_of_constant_matrix() {
        let f = matrix(&[&[3.0, -1.0], &[3.0, -1.0], &[3.0, -1.0]]);
        let s = gaussian_summary(&f).unwrap();
        assert_eq!(s.mu, vec![3.0, -1.0]);
        assert!(s.sigma.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn summary_needs_two_samples() {
        let f = matrix(&[&[1.0]]);
        assert_eq!(gaussian_summary(&f), Err(Error::TooFewSamples { n: 1, min: 2 }));
    }

    #[test]
    fn summary_matches_naive_recomputation() {
        use crate::rng::{Seed, SplitMix64};
        let mut rng = SplitMix64::new(Seed(404));
        let (n, d) = (100, 4);
        let values: Vec<f64> = (0..n * d).map(|_| rng.unit_f64() * 6.0 - 3.0).collect();
        let f = FeatureMatrix::new(n, d, values.clone()).unwrap();
        let s = gaussian_summary(&f).unwrap();

        // Naive per-entry recomputation, including the mirrored triangle.
        for j in 0..d {
            let mean: f64 = (0..n).map(|i| values[i * d + j]).sum::<f64>() / n as f64;
            assert!((s.mu[j] - mean).abs() <= 1e-12);
            for k in 0..d {
                let mean_k: f64 = (0..n).map(|i| values[i * d + k]).sum::<f64>() / n as f64;
                let cov: f64 = (0..n)
                    .map(|i| (values[i * d + j] - mean) * (values[i * d + k] - mean_k))
                    .sum::<f64>()
                    / (n - 1) as f64;
                assert!((s.sigma[j * d + k] - cov).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn frechet_identity_is_zero() {
        let f = matrix(&[&[0.0, 1.0], &[2.0, -1.0], &[0.5, 0.5], &[1.5, 2.0]]);
        let s = gaussian_summary(&f).unwrap();
        let fd = frechet_distance(&s, &s).unwrap();
        assert!(fd.abs() < 1e-9, "fd = {fd}");
    }

    #[test]
    fn frechet_1d_closed_form() {
        // N(0,1) vs N(1,4): (0-1)^2 + (1-2)^2 = 2.
        let a = GaussianSummary::new(vec![0.0], vec![1.0]).unwrap();
        let b = GaussianSummary::new(vec![1.0], vec![4.0]).unwrap();
        let fd = frechet_distance(&a, &b).unwrap();
        assert!((fd - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn summary_constructor_validates() {
        assert!(GaussianSummary::new(vec![0.0, 0.0], vec![1.0, 0.5, 0.2, 1.0]).is_err());
        assert!(GaussianSummary::new(vec![0.0], vec![-1.0]).is_err());
        assert!(GaussianSummary::new(vec![0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn frechet_diagonal_closed_form() {
        let a = GaussianSummary {
            mu: vec![0.0, 1.0, -2.0],
            sigma: vec![1.0, 0.0, 0.0, 0.0, 4.0, 0.0, 0.0, 0.0, 0.25],
        };
        let b = GaussianSummary {
            mu: vec![0.5, 0.0, -1.0],
            sigma: vec![9.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        };
        let expected: f64 = [
            (0.5f64, 1.0f64, 9.0f64),
            (1.0, 4.0, 1.0),
            (1.0, 0.25, 1.0),
        ]
        .iter()
        .map(|&(dmu, sa, sb): &(f64, f64, f64)| {
            dmu * dmu + (sa.sqrt() - sb.sqrt()) * (sa.sqrt() - sb.sqrt())
        })
        .sum();
        let fd = frechet_distance(&a, &b).unwrap();
        assert!((fd - expected).abs() < 1e-9);
    }

    #[test]
    fn frechet_symmetry_is_exact() {
        let a = GaussianSummary {
            mu: vec![0.1, -0.4],
            sigma: vec![2.0, 0.7, 0.7, 1.5],
        };
        let b = GaussianSummary {
            mu: vec![1.0, 0.3],
            sigma: vec![0.5, -0.2, -0.2, 3.0],
        };
        let ab = frechet_distance(&a, &b).unwrap();
        let ba = frechet_distance(&b, &a).unwrap();
        assert_eq!(ab.to_bits(), ba.to_bits());
    }

    #[test]
    fn kernel_constant_features() {
        let x = matrix(&[&[1.0], &[1.0]]);
        assert_eq!(kernel_distance(&x, &x, &KernelParams::for_dim(1)).unwrap(), 0.0);
    }

    #[test]
    fn kernel_zero_vs_one_hand_value() {
        let x = matrix(&[&[0.0], &[0.0]]);
        let y = matrix(&[&[1.0], &[1.0]]);
        // Kxx = 1, Kyy = 8, Kxy = 1 -> 1 + 8 - 2 = 7.
        let v = kernel_distance(&x, &y, &KernelParams::for_dim(1)).unwrap();
        assert_eq!(v, 7.0);
    }

    #[test]
    fn kernel_symmetric_in_arguments() {
        let x = matrix(&[&[0.0, 1.0], &[1.0, 0.0], &[2.0, 2.0]]);
        let y = matrix(&[&[0.5, 0.5], &[1.5, -0.5]]);
        let p = KernelParams::for_dim(2);
        let xy = kernel_distance(&x, &y, &p).unwrap();
        let yx = kernel_distance(&y, &x, &p).unwrap();
        assert!((xy - yx).abs() < 1e-15);
    }

    #[test]
    fn kernel_block_mode_averages_blocks() {
        let x = matrix(&[&[0.0], &[1.0], &[2.0], &[3.0]]);
        let y = matrix(&[&[0.5], &[1.5], &[2.5], &[3.5]]);
        let mut p = KernelParams::for_dim(1);
        p.block_size = Some(2);
        let blocked = kernel_distance(&x, &y, &p).unwrap();

        let sub = |m: &FeatureMatrix, r: core::ops::Range<usize>| {
            FeatureMatrix::new(
                r.len(),
                1,
                r.clone().flat_map(|i| m.row(i).to_vec()).collect(),
            )
            .unwrap()
        };
        let p1 = KernelParams::for_dim(1);
        let manual = 0.5
            * (kernel_distance(&sub(&x, 0..2), &sub(&y, 0..2), &p1).unwrap()
                + kernel_distance(&sub(&x, 2..4), &sub(&y, 2..4), &p1).unwrap());
        assert!((blocked - manual).abs() < 1e-15);
    }

    #[test]
    fn pr_identical_sets_score_100() {
        let f = matrix(&[
            &[0.0, 0.0],
            &[1.0, 0.0],
            &[0.0, 1.0],
            &[1.0, 1.0],
            &[0.5, 0.5],
        ]);
        let (p, r) = knn_precision_recall(&f, &f, &KnnParams::PRECISION_RECALL).unwrap();
        assert_eq!((p, r), (100.0, 100.0));
    }

    #[test]
    fn pr_separated_clusters_score_0() {
        let r = matrix(&[&[0.0, 0.0], &[0.1, 0.0], &[0.0, 0.1], &[0.1, 0.1]]);
        let g = matrix(&[&[50.0, 50.0], &[50.1, 50.0], &[50.0, 50.1], &[50.1, 50.1]]);
        let (p, rec) = knn_precision_recall(&r, &g, &KnnParams { k: 2 }).unwrap();
        assert_eq!((p, rec), (0.0, 0.0));
    }

    #[test]
    fn pr_is_recall_swapped() {
        let a = matrix(&[&[0.0], &[0.3], &[0.9], &[1.4], &[2.0]]);
        let b = matrix(&[&[0.1], &[0.5], &[1.1], &[1.9], &[3.0]]);
        let p = KnnParams { k: 2 };
        let (pr, rc) = knn_precision_recall(&a, &b, &p).unwrap();
        let (pr2, rc2) = knn_precision_recall(&b, &a, &p).unwrap();
        assert_eq!(pr, rc2);
        assert_eq!(rc, pr2);
    }

    #[test]
    fn dc_identical_sets() {
        let f = matrix(&[&[0.0], &[1.0], &[2.0], &[3.0]]);
        let (_, coverage) = density_coverage(&f, &f, &KnnParams { k: 1 }).unwrap();
        assert_eq!(coverage, 1.0);
    }

    #[test]
    fn dc_separated_sets_are_zero() {
        let r = matrix(&[&[0.0], &[0.1], &[0.2], &[0.3], &[0.4], &[0.5]]);
        let g = matrix(&[&[90.0], &[91.0]]);
        let (density, coverage) = density_coverage(&r, &g, &KnnParams::DENSITY_COVERAGE).unwrap();
        assert_eq!((density, coverage), (0.0, 0.0));
    }

    #[test]
    fn k_bounds_checked() {
        let f = matrix(&[&[0.0], &[1.0]]);
        assert!(matches!(
            knn_precision_recall(&f, &f, &KnnParams { k: 2 }),
            Err(Error::KTooLarge { .. })
        ));
    }
}
