use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::vec3::Point3;
use crate::math;

/// Tolerance on `|n| - 1` for stored normals.
const NORMAL_TOL: f64 = 1e-6;

/// An ordered list of 3D points, optionally carrying one unit normal per
/// point. Construction validates that every coordinate is finite and that
/// normals, when present, are unit length.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Point3>,
    normals: Option<Vec<Point3>>,
}

impl PointCloud {
    pub fn new(points: Vec<Point3>) -> Result<Self> {
        for p in &points {
            if !p.iter().all(|c| c.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self { points, normals: None })
    }

    pub fn with_normals(points: Vec<Point3>, normals: Vec<Point3>) -> Result<Self> {
        if normals.len() != points.len() {
            return Err(Error::InvalidNormals);
        }
        for n in &normals {
            if !n.iter().all(|c| c.is_finite()) {
                return Err(Error::NonFinite);
            }
            let len = math::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
            if math::abs(len - 1.0) > NORMAL_TOL {
                return Err(Error::InvalidNormals);
            }
        }
        let mut cloud = Self::new(points)?;
        cloud.normals = Some(normals);
        Ok(cloud)
    }

    #[inline]
    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    #[inline]
    pub fn normals(&self) -> Option<&[Point3]> {
        self.normals.as_deref()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Subset in the given index order, carrying normals along.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        let points = indices.iter().map(|&i| self.points[i]).collect();
        let normals = self
            .normals
            .as_ref()
            .map(|ns| indices.iter().map(|&i| ns[i]).collect());
        PointCloud { points, normals }
    }

    pub fn bounding_box(&self) -> Result<Aabb> {
        bounding_box_points(&self.points)
    }
}

/// Axis-aligned bounding box; `min <= max` componentwise by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    /// Length of the longest edge.
    pub fn max_edge(&self) -> f64 {
        let mut best = 0.0;
        for d in 0..3 {
            let e = self.max[d] - self.min[d];
            if e > best {
                best = e;
            }
        }
        best
    }
}

/// Tight axis-aligned box over a non-empty point list.
pub fn bounding_box_points(points: &[Point3]) -> Result<Aabb> {
    let first = *points.first().ok_or(Error::EmptyGeometry)?;
    let mut min = first;
    let mut max = first;
    for p in &points[1..] {
        for d in 0..3 {
            if p[d] < min[d] {
                min[d] = p[d];
            }
            if p[d] > max[d] {
                max[d] = p[d];
            }
        }
    }
    Ok(Aabb { min, max })
}
