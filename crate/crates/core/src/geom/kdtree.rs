use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::cloud::PointCloud;
use crate::geom::vec3::{dist2, Point3};

const LEAF_SIZE: usize = 16;

#[derive(Debug)]
enum Node {
    Split { dim: u8, value: f64, right: u32 },
    Leaf { start: u32, len: u32 },
}

/// Exact nearest-neighbour index over a point cloud.
///
/// Queries return exactly the brute-force answer: the point minimizing the
/// squared Euclidean distance, ties resolved to the lowest original index.
/// The tree is immutable after construction and safe to query from many
/// threads.
#[derive(Debug)]
pub struct NnIndex {
    nodes: Vec<Node>,
    // Points permuted into leaf order, with their original indices.
    points: Vec<Point3>,
    original: Vec<u32>,
}

impl NnIndex {
    pub fn build(pc: &PointCloud) -> Result<Self> {
        if pc.is_empty() {
            return Err(Error::EmptyGeometry);
        }
        let pts = pc.points();
        let mut order: Vec<u32> = (0..pts.len() as u32).collect();
        let mut index = NnIndex {
            nodes: Vec::new(),
            points: Vec::with_capacity(pts.len()),
            original: Vec::with_capacity(pts.len()),
        };
        index.build_node(pts, &mut order);
        Ok(index)
    }

    fn build_node(&mut self, pts: &[Point3], order: &mut [u32]) -> usize {
        let pos = self.nodes.len();
        if order.len() <= LEAF_SIZE {
            let start = self.points.len() as u32;
            for &i in order.iter() {
                self.points.push(pts[i as usize]);
                self.original.push(i);
            }
            self.nodes.push(Node::Leaf { start, len: order.len() as u32 });
            return pos;
        }

        // Split the widest extent at its median; the (coordinate, index)
        // total order keeps the partition deterministic even with duplicates.
        let mut min = pts[order[0] as usize];
        let mut max = min;
        for &i in order.iter().skip(1) {
            let p = pts[i as usize];
            for d in 0..3 {
                if p[d] < min[d] {
                    min[d] = p[d];
                }
                if p[d] > max[d] {
                    max[d] = p[d];
                }
            }
        }
        let mut dim = 0;
        let mut widest = max[0] - min[0];
        for d in 1..3 {
            let e = max[d] - min[d];
            if e > widest {
                widest = e;
                dim = d;
            }
        }

        let mid = order.len() / 2;
        order.select_nth_unstable_by(mid, |&a, &b| {
            let (pa, pb) = (pts[a as usize][dim], pts[b as usize][dim]);
            pa.partial_cmp(&pb).unwrap().then(a.cmp(&b))
        });
        let value = pts[order[mid] as usize][dim];

        self.nodes.push(Node::Split { dim: dim as u8, value, right: 0 });
        let (left, right) = order.split_at_mut(mid);
        let left_pos = self.build_node(pts, left);
        debug_assert_eq!(left_pos, pos + 1);
        let right_pos = self.build_node(pts, right);
        if let Node::Split { right, .. } = &mut self.nodes[pos] {
            *right = right_pos as u32;
        }
        pos
    }

    /// Index (into the original cloud) and squared distance of the nearest
    /// point to `query`.
    pub fn nearest(&self, query: Point3) -> (usize, f64) {
        let mut best_d2 = f64::INFINITY;
        let mut best_idx = u32::MAX;
        self.search(0, query, &mut best_d2, &mut best_idx);
        (best_idx as usize, best_d2)
    }

    fn search(&self, node: usize, query: Point3, best_d2: &mut f64, best_idx: &mut u32) {
        match &self.nodes[node] {
            Node::Leaf { start, len } => {
                let start = *start as usize;
                for j in start..start + *len as usize {
                    let d = dist2(self.points[j], query);
                    let idx = self.original[j];
                    if d < *best_d2 || (d == *best_d2 && idx < *best_idx) {
                        *best_d2 = d;
                        *best_idx = idx;
                    }
                }
            }
            Node::Split { dim, value, right } => {
                let delta = query[*dim as usize] - value;
                let (near, far) = if delta < 0.0 {
                    (node + 1, *right as usize)
                } else {
                    (*right as usize, node + 1)
                };
                self.search(near, query, best_d2, best_idx);
                // Only a strictly larger plane distance can rule out an
                // equal-distance, lower-index candidate on the far side.
                if delta * delta <= *best_d2 {
                    self.search(far, query, best_d2, best_idx);
                }
            }
        }
    }

    /// Smallest squared distance from `query` to the indexed cloud.
    #[inline]
    pub fn min_dist2(&self, query: Point3) -> f64 {
        self.nearest(query).1
    }
}
