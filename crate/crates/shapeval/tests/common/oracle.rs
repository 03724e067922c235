//! Independent brute-force implementations of every metric, used as oracles.
//! Nothing here touches the spatial index or the production metric code:
//! plain O(n^2) double loops and full sorts only.

use shapeval_core::PointCloud;

fn d2(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

fn min_d2(p: [f64; 3], cloud: &PointCloud) -> f64 {
    cloud
        .points()
        .iter()
        .map(|&q| d2(p, q))
        .fold(f64::INFINITY, f64::min)
}

pub fn chamfer_l2(x: &PointCloud, y: &PointCloud) -> f64 {
    let to_y: f64 = x.points().iter().map(|&p| min_d2(p, y)).sum::<f64>() / x.len() as f64;
    let to_x: f64 = y.points().iter().map(|&p| min_d2(p, x)).sum::<f64>() / y.len() as f64;
    to_y + to_x
}

pub fn chamfer_l1_scaled(x: &PointCloud, y: &PointCloud) -> f64 {
    let to_y: f64 =
        x.points().iter().map(|&p| min_d2(p, y).sqrt()).sum::<f64>() / (2.0 * x.len() as f64);
    let to_x: f64 =
        y.points().iter().map(|&p| min_d2(p, x).sqrt()).sum::<f64>() / (2.0 * y.len() as f64);
    10.0 * (to_y + to_x)
}

pub fn fscore(x: &PointCloud, y: &PointCloud, tau: f64) -> (f64, f64, f64) {
    let close = |from: &PointCloud, to: &PointCloud| {
        let hits = from
            .points()
            .iter()
            .filter(|&&p| min_d2(p, to).sqrt() < tau)
            .count();
        100.0 * hits as f64 / from.len() as f64
    };
    let precision = close(x, y);
    let recall = close(y, x);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    (f1, precision, recall)
}

pub fn normal_consistency(x: &PointCloud, y: &PointCloud) -> f64 {
    let dir = |from: &PointCloud, to: &PointCloud| {
        let fn_ = from.normals().unwrap();
        let tn = to.normals().unwrap();
        let mut sum = 0.0;
        for (p, n) in from.points().iter().zip(fn_) {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (j, q) in to.points().iter().enumerate() {
                let d = d2(*p, *q);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            let m = tn[best];
            let dot = (n[0] * m[0] + n[1] * m[1] + n[2] * m[2]).abs().min(1.0);
            sum += dot;
        }
        sum / from.len() as f64
    };
    100.0 * 0.5 * (dir(x, y) + dir(y, x))
}

pub fn directed_hausdorff(a: &PointCloud, b: &PointCloud) -> f64 {
    a.points()
        .iter()
        .map(|&p| min_d2(p, b))
        .fold(0.0f64, f64::max)
        .sqrt()
}

pub fn tmd(completions: &[PointCloud]) -> f64 {
    let k = completions.len();
    let mut total = 0.0;
    for i in 0..k {
        let mut sum = 0.0;
        for (j, other) in completions.iter().enumerate() {
            if j != i {
                sum += chamfer_l2(&completions[i], other);
            }
        }
        total += sum / (k - 1) as f64;
    }
    total
}

pub fn uhd(partial: &PointCloud, completions: &[PointCloud]) -> f64 {
    completions
        .iter()
        .map(|c| directed_hausdorff(partial, c))
        .sum::<f64>()
        / completions.len() as f64
}

/// COV and MMD recomputed from scratch over cloud lists.
pub fn cov_mmd(gen: &[PointCloud], reference: &[PointCloud]) -> (f64, f64) {
    let mut covered = vec![false; reference.len()];
    for g in gen {
        let mut best = 0usize;
        let mut best_v = f64::INFINITY;
        for (j, r) in reference.iter().enumerate() {
            let v = chamfer_l2(g, r);
            if v < best_v {
                best_v = v;
                best = j;
            }
        }
        covered[best] = true;
    }
    let cov = 100.0 * covered.iter().filter(|&&c| c).count() as f64 / reference.len() as f64;

    let mut mmd = 0.0;
    for r in reference {
        let mut min_v = f64::INFINITY;
        for g in gen {
            min_v = min_v.min(chamfer_l2(g, r));
        }
        mmd += min_v;
    }
    (cov, mmd / reference.len() as f64)
}

/// Leave-one-out 1-NN accuracy recomputed directly over the merged set with
/// the same tie rule (distance, then generated-before-reference, then index).
pub fn one_nna(gen: &[PointCloud], reference: &[PointCloud]) -> f64 {
    #[derive(Clone, Copy)]
    struct Sample<'a> {
        cloud: &'a PointCloud,
        generated: bool,
        index: usize,
    }
    let mut samples = Vec::new();
    for (i, g) in gen.iter().enumerate() {
        samples.push(Sample { cloud: g, generated: true, index: i });
    }
    for (j, r) in reference.iter().enumerate() {
        samples.push(Sample { cloud: r, generated: false, index: j });
    }

    let mut correct = 0usize;
    for (si, s) in samples.iter().enumerate() {
        let mut best: Option<(f64, bool, usize)> = None;
        for (ti, t) in samples.iter().enumerate() {
            if ti == si {
                continue;
            }
            let cand = (chamfer_l2(s.cloud, t.cloud), t.generated, t.index);
            let better = match best {
                None => true,
                Some(b) => {
                    if cand.0 != b.0 {
                        cand.0 < b.0
                    } else if cand.1 != b.1 {
                        cand.1
                    } else {
                        cand.2 < b.2
                    }
                }
            };
            if better {
                best = Some(cand);
            }
        }
        if best.unwrap().1 == s.generated {
            correct += 1;
        }
    }
    100.0 * correct as f64 / samples.len() as f64
}

fn row_d2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn rows(values: &[f64], d: usize) -> Vec<&[f64]> {
    values.chunks(d).collect()
}

/// k-NN radius per row by full sort.
fn radii2(values: &[f64], d: usize, k: usize) -> Vec<f64> {
    let rs = rows(values, d);
    rs.iter()
        .enumerate()
        .map(|(i, r)| {
            let mut ds: Vec<f64> = rs
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, o)| row_d2(r, o))
                .collect();
            ds.sort_by(f64::total_cmp);
            ds[k - 1]
        })
        .collect()
}

pub fn knn_precision_recall(
    reference: &[f64],
    generated: &[f64],
    d: usize,
    k: usize,
) -> (f64, f64) {
    let share_inside = |points: &[f64], centers: &[f64], radii: &[f64]| {
        let ps = rows(points, d);
        let cs = rows(centers, d);
        let hits = ps
            .iter()
            .filter(|p| cs.iter().zip(radii).any(|(c, &r2)| row_d2(p, c) <= r2))
            .count();
        100.0 * hits as f64 / ps.len() as f64
    };
    let r_radii = radii2(reference, d, k);
    let g_radii = radii2(generated, d, k);
    (
        share_inside(generated, reference, &r_radii),
        share_inside(reference, generated, &g_radii),
    )
}

pub fn density_coverage(reference: &[f64], generated: &[f64], d: usize, k: usize) -> (f64, f64) {
    let radii = radii2(reference, d, k);
    let gs = rows(generated, d);
    let cs = rows(reference, d);

    let mut hits = 0u64;
    for g in &gs {
        for (c, &r2) in cs.iter().zip(&radii) {
            if row_d2(g, c) <= r2 {
                hits += 1;
            }
        }
    }
    let density = hits as f64 / (k * gs.len()) as f64;

    let covered = cs
        .iter()
        .zip(&radii)
        .filter(|(c, &r2)| gs.iter().any(|g| row_d2(g, c) <= r2))
        .count();
    (density, covered as f64 / cs.len() as f64)
}
