use crate::error::{Error, Result};
use crate::geom::mesh::TriangleMesh;
use crate::geom::vec3::{cross, dot, sub, Point3};

/// Barycentric hits closer than this to an edge or vertex, and surface hits
/// closer than this to the query itself, trigger a deterministic re-cast.
const BOUNDARY_EPS: f64 = 1e-12;
/// In-plane step applied per re-cast attempt.
const PERTURB_STEP: f64 = 1e-9;
/// Incommensurable direction so repeated nudges never walk along a mesh edge.
const PERTURB_DIR: [f64; 2] = [0.754_877_666_246_692_7, 0.569_840_290_998_053_2];
const MAX_ATTEMPTS: usize = 32;

/// Ray-parity occupancy test for watertight meshes.
///
/// Casts one axis-aligned ray in each of +x, +y and +z; a ray votes "inside"
/// when it crosses an odd number of triangles, and the majority of the three
/// votes wins. Crossings are counted on strict triangle interiors; a hit
/// within `1e-12` of an edge or vertex re-casts the ray from a
/// deterministically perturbed origin. Non-watertight input is not detected
/// and yields unspecified (but deterministic) answers.
pub fn is_inside(mesh: &TriangleMesh, p: Point3) -> Result<bool> {
    let mut votes = 0;
    for axis in 0..3 {
        if cast_axis_parity(mesh, p, axis)? {
            votes += 1;
        }
    }
    Ok(votes >= 2)
}

fn cast_axis_parity(mesh: &TriangleMesh, p: Point3, axis: usize) -> Result<bool> {
    // Project onto the two other axes; u, v span the ray's orthogonal plane.
    let (ua, va) = match axis {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    };
    let mut origin = p;
    'attempt: for attempt in 0..MAX_ATTEMPTS {
        if attempt > 0 {
            let t = attempt as f64 * PERTURB_STEP;
            origin = p;
            origin[ua] += t * PERTURB_DIR[0];
            origin[va] += t * PERTURB_DIR[1];
        }
        let mut crossings = 0u64;
        for t in 0..mesh.triangles().len() {
            match test_triangle(mesh, t, origin, axis, ua, va)? {
                Hit::Miss => {}
                Hit::Crossing => crossings += 1,
                Hit::Boundary => continue 'attempt,
            }
        }
        return Ok(crossings % 2 == 1);
    }
    // Thirty-two nudges of 1e-9 never stay on a boundary for real data.
    Err(Error::DegenerateGeometry)
}

enum Hit {
    Miss,
    Crossing,
    Boundary,
}

fn test_triangle(
    mesh: &TriangleMesh,
    t: usize,
    q: Point3,
    axis: usize,
    ua: usize,
    va: usize,
) -> Result<Hit> {
    let [a, b, c] = mesh.corners(t);

    // Twice the signed area of the projected triangle.
    let denom = (b[ua] - a[ua]) * (c[va] - a[va]) - (c[ua] - a[ua]) * (b[va] - a[va]);
    if denom == 0.0 {
        // Projection degenerate: either the triangle itself has zero area
        // (an error when it sits on the ray's path) or it is edge-on to the
        // ray, which cannot produce a strict interior crossing.
        let area2 = {
            let n = cross(sub(b, a), sub(c, a));
            dot(n, n)
        };
        if area2 == 0.0 && projected_bbox_contains(a, b, c, q, ua, va) {
            return Err(Error::DegenerateGeometry);
        }
        return Ok(Hit::Miss);
    }

    // Barycentric numerators of the query in the projection plane; they sum
    // to denom exactly in real arithmetic.
    let n0 = (b[ua] - q[ua]) * (c[va] - q[va]) - (c[ua] - q[ua]) * (b[va] - q[va]);
    let n1 = (c[ua] - q[ua]) * (a[va] - q[va]) - (a[ua] - q[ua]) * (c[va] - q[va]);
    let n2 = (a[ua] - q[ua]) * (b[va] - q[va]) - (b[ua] - q[ua]) * (a[va] - q[va]);
    let inv = 1.0 / denom;
    let b0 = n0 * inv;
    let b1 = n1 * inv;
    let b2 = n2 * inv;

    let min_b = b0.min(b1).min(b2);
    if min_b <= -BOUNDARY_EPS {
        return Ok(Hit::Miss);
    }
    if min_b <= BOUNDARY_EPS {
        return Ok(Hit::Boundary);
    }

    // Strict interior in the plane; compare the hit coordinate along the ray.
    let hit = b0 * a[axis] + b1 * b[axis] + b2 * c[axis];
    let delta = hit - q[axis];
    if delta > BOUNDARY_EPS {
        Ok(Hit::Crossing)
    } else if delta < -BOUNDARY_EPS {
        Ok(Hit::Miss)
    } else {
        // The query point lies on the surface itself.
        Ok(Hit::Boundary)
    }
}

fn projected_bbox_contains(a: Point3, b: Point3, c: Point3, q: Point3, ua: usize, va: usize) -> bool {
    let (min_u, max_u) = minmax3(a[ua], b[ua], c[ua]);
    let (min_v, max_v) = minmax3(a[va], b[va], c[va]);
    q[ua] >= min_u && q[ua] <= max_u && q[va] >= min_v && q[va] <= max_v
}

fn minmax3(a: f64, b: f64, c: f64) -> (f64, f64) {
    (a.min(b).min(c), a.max(b).max(c))
}
