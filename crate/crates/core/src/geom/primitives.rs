//! Tiny analytic fixtures for smoke tests and calibration runs.

use alloc::vec;

use crate::geom::mesh::TriangleMesh;
use crate::geom::vec3::Point3;

/// Watertight axis-aligned box with outward-facing triangles: `min` corner
/// plus `edge` along each axis.
pub fn box_mesh(min: Point3, edge: f64) -> TriangleMesh {
    let mut vertices = vec![[0.0f64; 3]; 8];
    for (i, v) in vertices.iter_mut().enumerate() {
        *v = [
            min[0] + edge * (i & 1) as f64,
            min[1] + edge * ((i >> 1) & 1) as f64,
            min[2] + edge * ((i >> 2) & 1) as f64,
        ];
    }
    let triangles = vec![
        [0, 2, 3],
        [0, 3, 1], // z = min
        [4, 5, 7],
        [4, 7, 6], // z = max
        [0, 1, 5],
        [0, 5, 4], // y = min
        [2, 6, 7],
        [2, 7, 3], // y = max
        [0, 4, 6],
        [0, 6, 2], // x = min
        [1, 3, 7],
        [1, 7, 5], // x = max
    ];
    TriangleMesh::new(vertices, triangles).expect("box is a valid mesh")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_has_expected_surface_area() {
        let mesh = box_mesh([0.0, 0.0, 0.0], 2.0);
        let total: f64 = (0..mesh.triangles().len()).map(|t| mesh.area(t)).sum();
        assert!((total - 24.0).abs() < 1e-12);
    }
}
