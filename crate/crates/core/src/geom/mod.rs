//! Geometric kernels: clouds, meshes, bounding boxes, surface sampling,
//! farthest-point sampling, exact nearest-neighbour search and the ray-parity
//! occupancy test.

mod cloud;
mod fps;
mod inside;
mod kdtree;
mod mesh;
pub mod primitives;
mod sample;
pub(crate) mod vec3;

pub use cloud::{bounding_box_points, Aabb, PointCloud};
pub use fps::{farthest_point_sample, farthest_point_sample_from, farthest_point_sample_indices};
pub use inside::is_inside;
pub use kdtree::NnIndex;
pub use mesh::TriangleMesh;
pub use sample::sample_surface;
