//! Shared fixtures for the integration and acceptance suites.

#![allow(dead_code)]

pub mod oracle;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use shapeval_core::{PointCloud, Seed, SplitMix64};

/// Uniform point in the given cube.
pub fn random_point(rng: &mut SplitMix64, lo: f64, hi: f64) -> [f64; 3] {
    let span = hi - lo;
    [
        lo + rng.unit_f64() * span,
        lo + rng.unit_f64() * span,
        lo + rng.unit_f64() * span,
    ]
}

pub fn random_cloud(rng: &mut SplitMix64, n: usize, lo: f64, hi: f64) -> PointCloud {
    let pts = (0..n).map(|_| random_point(rng, lo, hi)).collect();
    PointCloud::new(pts).unwrap()
}

/// Standard normal via Box-Muller; two stream draws per value.
pub fn gauss(rng: &mut SplitMix64) -> f64 {
    loop {
        let u1 = rng.unit_f64();
        if u1 > 0.0 {
            let u2 = rng.unit_f64();
            return (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        }
    }
}

pub fn gauss_matrix(rng: &mut SplitMix64, n: usize, d: usize) -> Vec<f64> {
    (0..n * d).map(|_| gauss(rng)).collect()
}

/// Writes an axis-aligned cube as an OFF file.
pub fn write_cube_off(path: &Path, min: [f64; 3], edge: f64) {
    let mesh = shapeval_core::geom::primitives::box_mesh(min, edge);
    let mut text = String::new();
    writeln!(text, "OFF\n{} {} 0", mesh.vertices().len(), mesh.triangles().len()).unwrap();
    for v in mesh.vertices() {
        writeln!(text, "{} {} {}", v[0], v[1], v[2]).unwrap();
    }
    for t in mesh.triangles() {
        writeln!(text, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    fs::write(path, text).unwrap();
}

/// Writes a point cloud as an [n,3] f64 tensor.
pub fn write_points_tensor(path: &Path, pc: &PointCloud) {
    let tensor = shapeval::load::cloud_to_tensor(pc);
    shapeval::tensor::write_tensor(&tensor, path).unwrap();
}

/// Writes an [n,d] f64 feature tensor.
pub fn write_feature_tensor(path: &Path, n: usize, d: usize, values: Vec<f64>) {
    let tensor = shapeval::tensor::TensorFile::from_f64(vec![n as u64, d as u64], values).unwrap();
    shapeval::tensor::write_tensor(&tensor, path).unwrap();
}

/// One JSON-lines manifest entry.
pub fn manifest_line(
    id: &str,
    class: &str,
    role: &str,
    kind: &str,
    path: &str,
    group: Option<&str>,
) -> String {
    match group {
        Some(g) => format!(
            r#"{{"id":"{id}","class_label":"{class}","role":"{role}","kind":"{kind}","path":"{path}","group":"{g}"}}"#
        ),
        None => format!(
            r#"{{"id":"{id}","class_label":"{class}","role":"{role}","kind":"{kind}","path":"{path}"}}"#
        ),
    }
}

/// A tiny two-class mesh benchmark: per class `per_class` reference cubes and
/// slightly offset generated cubes. Returns the manifest path.
pub fn build_mesh_fixture(dir: &Path, per_class: usize) -> std::path::PathBuf {
    let mut manifest = String::new();
    for class in ["chair", "plane"] {
        for i in 0..per_class {
            let id = format!("{class}{i}");
            let jitter = 0.015 * i as f64;
            let ref_name = format!("ref_{id}.off");
            let gen_name = format!("gen_{id}.off");
            write_cube_off(&dir.join(&ref_name), [-0.25 + jitter, -0.25, -0.25], 0.45);
            write_cube_off(
                &dir.join(&gen_name),
                [-0.25 + jitter + 0.008, -0.25, -0.25],
                0.45,
            );
            manifest.push_str(&manifest_line(&id, class, "reference", "mesh", &ref_name, None));
            manifest.push('\n');
            manifest.push_str(&manifest_line(&id, class, "generated", "mesh", &gen_name, None));
            manifest.push('\n');
        }
    }
    let path = dir.join("manifest.jsonl");
    fs::write(&path, manifest).unwrap();
    path
}

/// Runs the CLI in-process with a leading program name.
pub fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["shapeval".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    shapeval::cli::run_cli(argv)
}

pub fn read_bytes(path: &Path) -> Vec<u8> {
    fs::read(path).unwrap()
}

/// Relative difference |a-b| / max(|a|,|b|,1).
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

pub fn seeded(n: u64) -> SplitMix64 {
    SplitMix64::new(Seed(n))
}
