use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::cloud::PointCloud;
use crate::geom::mesh::TriangleMesh;
use crate::geom::vec3::{add, cross, norm, scale, sub};
use crate::math;
use crate::rng::{Seed, SplitMix64};

/// Uniform area-weighted surface sampling.
///
/// Triangle selection probability is proportional to triangle area, placement
/// within the triangle is uniform via the square-root barycentric map. With
/// `with_normals`, every point carries its triangle's unit normal.
///
/// Stream consumption, per point, in order: one draw for triangle selection,
/// two draws for the barycentric coordinates.
pub fn sample_surface(
    mesh: &TriangleMesh,
    n: usize,
    seed: Seed,
    with_normals: bool,
) -> Result<PointCloud> {
    if mesh.triangles().is_empty() {
        return Err(Error::EmptyGeometry);
    }
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1"));
    }

    // Cumulative area table; zero-area triangles contribute nothing and can
    // never be selected by the strict upper-bound search below.
    let tri_count = mesh.triangles().len();
    let mut cumulative = Vec::with_capacity(tri_count);
    let mut total = 0.0;
    for t in 0..tri_count {
        total += mesh.area(t);
        cumulative.push(total);
    }
    if total <= 0.0 {
        return Err(Error::ZeroTotalArea);
    }

    let mut rng = SplitMix64::new(seed);
    let mut points = Vec::with_capacity(n);
    let mut normals = if with_normals { Some(Vec::with_capacity(n)) } else { None };

    for _ in 0..n {
        let target = rng.unit_f64() * total;
        // First triangle whose cumulative area exceeds the target.
        let t = cumulative.partition_point(|&c| c <= target).min(tri_count - 1);

        let [a, b, c] = mesh.corners(t);
        let r1 = math::sqrt(rng.unit_f64());
        let r2 = rng.unit_f64();
        let p = add(
            add(scale(a, 1.0 - r1), scale(b, r1 * (1.0 - r2))),
            scale(c, r1 * r2),
        );
        points.push(p);

        if let Some(ns) = normals.as_mut() {
            let raw = cross(sub(b, a), sub(c, a));
            let len = norm(raw);
            ns.push(scale(raw, 1.0 / len));
        }
    }

    match normals {
        Some(ns) => PointCloud::with_normals(points, ns),
        None => PointCloud::new(points),
    }
}
