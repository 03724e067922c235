//! Deterministic geometric and statistical kernels for evaluating 3D shape
//! generation and completion: point-cloud distances, surface sampling,
//! farthest-point subsampling, exact nearest-neighbour queries, occupancy
//! tests, set-level two-sample statistics and feature-space distribution
//! distances.
//!
//! The crate is `no_std`-compatible (`alloc` required). Enable the `libm`
//! feature instead of `std` to build without the standard library.
//!
//! # Determinism
//!
//! Every randomized operation takes an explicit [`Seed`] and consumes values
//! from the [`SplitMix64`] stream defined in [`rng`]. Given the same inputs
//! and seed, every function in this crate produces bit-identical results on
//! any platform with IEEE 754 `f64` arithmetic: summations run in fixed index
//! order, ties are broken by lowest index, and no operation reads ambient
//! state. See the `rng` module for the exact generator definition and the
//! per-operation stream consumption order.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("shapeval-core needs either the `std` or the `libm` feature");

pub mod error;
pub mod feature;
pub mod geom;
pub mod instance;
pub mod rng;
pub mod set;

mod linalg;
mod math;

pub use error::{Error, Result};
pub use feature::{
    density_coverage, frechet_distance, gaussian_summary, kernel_distance, knn_precision_recall,
    FeatureMatrix, GaussianSummary, KernelParams, KnnParams,
};
pub use geom::{
    bounding_box_points, farthest_point_sample, farthest_point_sample_from,
    farthest_point_sample_indices, is_inside, sample_surface, Aabb, NnIndex, PointCloud,
    TriangleMesh,
};
pub use instance::{
    best_of_n, chamfer_l1, chamfer_l1_scaled, chamfer_l2, chamfer_l2_prebuilt,
    directed_hausdorff, fscore, normal_consistency, volumetric_iou, FscoreParams, InstanceResult,
    IouParams,
};
pub use rng::{Seed, SplitMix64};
pub use set::{cov_mmd, one_nna, pairwise_cd_matrix, tmd, uhd, DistanceMatrix, SetResult};
