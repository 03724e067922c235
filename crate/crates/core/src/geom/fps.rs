use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::cloud::PointCloud;
use crate::geom::vec3::dist2;
use crate::rng::{Seed, SplitMix64};

/// Greedy farthest-point sampling, start index drawn uniformly from `seed`
/// (one stream draw). Output preserves selection order.
pub fn farthest_point_sample(pc: &PointCloud, k: usize, seed: Seed) -> Result<PointCloud> {
    let start = if pc.is_empty() {
        0
    } else {
        SplitMix64::new(seed).below(pc.len())
    };
    farthest_point_sample_from(pc, k, start)
}

/// Greedy farthest-point sampling with a pinned start index.
pub fn farthest_point_sample_from(pc: &PointCloud, k: usize, start: usize) -> Result<PointCloud> {
    let indices = farthest_point_sample_indices(pc, k, start)?;
    Ok(pc.select(&indices))
}

/// The index sequence chosen by greedy FPS: each step selects the not yet
/// selected point maximizing the distance to the selected set, ties broken by
/// lowest index. Duplicated points therefore never shadow the `k = n`
/// permutation property.
pub fn farthest_point_sample_indices(pc: &PointCloud, k: usize, start: usize) -> Result<Vec<usize>> {
    let n = pc.len();
    if n == 0 {
        return Err(Error::EmptyGeometry);
    }
    if k == 0 || k > n {
        return Err(Error::KTooLarge { k, n });
    }
    if start >= n {
        return Err(Error::InvalidParameter("start index out of range"));
    }

    let points = pc.points();
    let mut selected = Vec::with_capacity(k);
    let mut taken = vec![false; n];
    let mut min_d2 = vec![f64::INFINITY; n];

    let mut current = start;
    selected.push(current);
    taken[current] = true;

    for _ in 1..k {
        let cp = points[current];
        let mut best = usize::MAX;
        let mut best_d2 = f64::NEG_INFINITY;
        for (i, p) in points.iter().enumerate() {
            let d = dist2(*p, cp);
            if d < min_d2[i] {
                min_d2[i] = d;
            }
            if !taken[i] && min_d2[i] > best_d2 {
                best_d2 = min_d2[i];
                best = i;
            }
        }
        current = best;
        selected.push(current);
        taken[current] = true;
    }

    Ok(selected)
}
