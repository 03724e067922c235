//! Resolved evaluation configuration shared by all subcommands.

use shapeval_core::{KernelParams, Seed};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub seed: Seed,
    pub surface_samples: usize,
    pub fps_points: usize,
    pub fscore_tau: f64,
    pub iou_queries: usize,
    pub iou_padding: f64,
    pub best_of_n: usize,
    pub knn_pr_k: usize,
    pub knn_dc_k: usize,
    pub kernel_degree: u32,
    /// `None` means the customary `1/d`.
    pub kernel_scale: Option<f64>,
    pub kernel_offset: f64,
    pub kernel_block_size: Option<usize>,
    /// 0 means auto (all available cores).
    pub threads: usize,
    /// Compute the Chamfer-L1 scale from the ground-truth bounding box
    /// instead of assuming inputs normalized to a unit frame.
    pub raw_frame: bool,
    /// Skip volumetric IoU even when both sides are meshes.
    pub skip_iou: bool,
    /// Pin the farthest-point-sampling start to this index instead of
    /// drawing it from the seed.
    pub fps_start: Option<usize>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            seed: Seed(0),
            surface_samples: 100_000,
            fps_points: 2048,
            fscore_tau: 0.01,
            iou_queries: 100_000,
            iou_padding: 0.1,
            best_of_n: 1,
            knn_pr_k: 3,
            knn_dc_k: 5,
            kernel_degree: 3,
            kernel_scale: None,
            kernel_offset: 1.0,
            kernel_block_size: None,
            threads: 0,
            raw_frame: false,
            skip_iou: false,
            fps_start: None,
        }
    }
}

impl EvalConfig {
    pub fn kernel_params(&self, dim: usize) -> KernelParams {
        KernelParams {
            degree: self.kernel_degree,
            scale: self.kernel_scale.unwrap_or(1.0 / dim as f64),
            offset: self.kernel_offset,
            block_size: self.kernel_block_size,
        }
    }
}

impl std::fmt::Display for EvalConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "seed={} surface_samples={} fps_points={} fscore_tau={} iou_queries={} \
             iou_padding={} best_of_n={} knn_pr_k={} knn_dc_k={} kernel_degree={} \
             kernel_scale={} kernel_offset={} kernel_block_size={} threads={} \
             raw_frame={} skip_iou={} fps_start={}",
            self.seed.0,
            self.surface_samples,
            self.fps_points,
            self.fscore_tau,
            self.iou_queries,
            self.iou_padding,
            self.best_of_n,
            self.knn_pr_k,
            self.knn_dc_k,
            self.kernel_degree,
            self.kernel_scale.map_or("auto".to_string(), |s| s.to_string()),
            self.kernel_offset,
            self.kernel_block_size.map_or("full".to_string(), |s| s.to_string()),
            if self.threads == 0 { "auto".to_string() } else { self.threads.to_string() },
            self.raw_frame,
            self.skip_iou,
            self.fps_start.map_or("seeded".to_string(), |s| s.to_string()),
        )
    }
}
