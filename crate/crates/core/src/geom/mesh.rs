use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::cloud::{bounding_box_points, Aabb};
use crate::geom::vec3::{cross, norm, sub, Point3};

/// Indexed triangle soup. Construction validates index ranges and rejects
/// triangles that repeat a vertex index; loaders are expected to drop such
/// faces before building the mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Point3>,
    triangles: Vec<[u32; 3]>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Point3>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        for v in &vertices {
            if !v.iter().all(|c| c.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        let len = vertices.len();
        for t in &triangles {
            for &i in t {
                if i as usize >= len {
                    return Err(Error::IndexOutOfRange { index: i, len });
                }
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::DegenerateTriangle);
            }
        }
        Ok(Self { vertices, triangles })
    }

    #[inline]
    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    #[inline]
    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    /// Corner positions of triangle `t`.
    #[inline]
    pub fn corners(&self, t: usize) -> [Point3; 3] {
        let [a, b, c] = self.triangles[t];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    /// Area of triangle `t`.
    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        0.5 * norm(cross(sub(b, a), sub(c, a)))
    }

    pub fn bounding_box(&self) -> Result<Aabb> {
        bounding_box_points(&self.vertices)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tri() -> TriangleMesh {
        TriangleMesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn area_of_unit_right_triangle() {
        assert_eq!(tri().area(0), 0.5);
    }

    #[test]
    fn out_of_range_index_rejected() {
        let r = TriangleMesh::new(vec![[0.0; 3]], vec![[0, 0, 3]]);
        assert_eq!(r, Err(Error::IndexOutOfRange { index: 3, len: 1 }));
    }

    #[test]
    fn repeated_index_rejected() {
        let r = TriangleMesh::new(vec![[0.0; 3], [1.0; 3], [2.0; 3]], vec![[0, 1, 1]]);
        assert_eq!(r, Err(Error::DegenerateTriangle));
    }
}
