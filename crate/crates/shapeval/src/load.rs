//! Conversions between on-disk artifacts and the kernel types, plus the
//! seeded per-shape loading used by the harness.

use std::path::{Path, PathBuf};

use shapeval_core::{
    rng::derive_stream, sample_surface, FeatureMatrix, PointCloud, Seed, TriangleMesh,
};

use crate::error::EvalError;
use crate::manifest::{Kind, ManifestEntry};
use crate::meshio::read_mesh;
use crate::tensor::{read_tensor, TensorData, TensorFile};

/// Point tensors are `[n, 3]` (positions) or `[n, 6]` (positions + unit
/// normals), either dtype; promoted to f64.
pub fn cloud_from_tensor(t: &TensorFile) -> Result<PointCloud, EvalError> {
    if t.shape.len() != 2 || (t.shape[1] != 3 && t.shape[1] != 6) {
        return Err(EvalError::BadShape {
            what: "point cloud tensor",
            expected: "[n,3] or [n,6]",
            found: t.shape.clone(),
        });
    }
    let width = t.shape[1] as usize;
    let values = t.data.as_f64();
    let n = t.shape[0] as usize;
    let mut points = Vec::with_capacity(n);
    let mut normals = if width == 6 { Some(Vec::with_capacity(n)) } else { None };
    for i in 0..n {
        let row = &values[i * width..(i + 1) * width];
        points.push([row[0], row[1], row[2]]);
        if let Some(ns) = normals.as_mut() {
            ns.push([row[3], row[4], row[5]]);
        }
    }
    let cloud = match normals {
        Some(ns) => PointCloud::with_normals(points, ns)?,
        None => PointCloud::new(points)?,
    };
    Ok(cloud)
}

pub fn cloud_to_tensor(pc: &PointCloud) -> TensorFile {
    let n = pc.len();
    match pc.normals() {
        Some(ns) => {
            let mut values = Vec::with_capacity(n * 6);
            for (p, nrm) in pc.points().iter().zip(ns) {
                values.extend_from_slice(p);
                values.extend_from_slice(nrm);
            }
            TensorFile::new(vec![n as u64, 6], TensorData::F64(values)).expect("consistent shape")
        }
        None => {
            let mut values = Vec::with_capacity(n * 3);
            for p in pc.points() {
                values.extend_from_slice(p);
            }
            TensorFile::new(vec![n as u64, 3], TensorData::F64(values)).expect("consistent shape")
        }
    }
}

/// Feature tensors are `[n, d]`, either dtype; promoted to f64.
pub fn features_from_tensor(t: &TensorFile) -> Result<FeatureMatrix, EvalError> {
    if t.shape.len() != 2 {
        return Err(EvalError::BadShape {
            what: "feature tensor",
            expected: "[n,d]",
            found: t.shape.clone(),
        });
    }
    Ok(FeatureMatrix::new(
        t.shape[0] as usize,
        t.shape[1] as usize,
        t.data.as_f64(),
    )?)
}

/// Entry paths are relative to the manifest's directory.
pub fn resolve_path(base: &Path, entry: &ManifestEntry) -> PathBuf {
    base.join(&entry.path)
}

/// A loaded shape: always a cloud, plus the mesh when the entry was one.
pub struct LoadedShape {
    pub cloud: PointCloud,
    pub mesh: Option<TriangleMesh>,
    pub degenerate_dropped: u64,
}

/// Loads a mesh or points entry as an evaluation cloud. Meshes are surface
/// sampled (`surface_samples` points, with normals) on the named sub-stream;
/// point tensors are used as stored.
pub fn load_shape(
    base: &Path,
    entry: &ManifestEntry,
    surface_samples: usize,
    seed: Seed,
    stream_tag: &str,
) -> Result<LoadedShape, EvalError> {
    let path = resolve_path(base, entry);
    match entry.kind {
        Kind::Mesh => {
            let load = read_mesh(&path).map_err(|e| EvalError::at(&path, e))?;
            let cloud = sample_surface(
                &load.mesh,
                surface_samples,
                derive_stream(seed, stream_tag),
                true,
            )
            .map_err(|e| EvalError::at(&path, e))?;
            Ok(LoadedShape {
                cloud,
                mesh: Some(load.mesh),
                degenerate_dropped: load.degenerate_dropped,
            })
        }
        Kind::Points => {
            let tensor = read_tensor(&path).map_err(|e| EvalError::at(&path, e))?;
            let cloud = cloud_from_tensor(&tensor).map_err(|e| e.with_path(&path))?;
            if cloud.is_empty() {
                return Err(EvalError::at(&path, shapeval_core::Error::EmptyGeometry));
            }
            Ok(LoadedShape { cloud, mesh: None, degenerate_dropped: 0 })
        }
        Kind::Features => Err(EvalError::WrongKind {
            id: entry.id.clone(),
            expected: "mesh or points",
            found: "features",
        }),
    }
}

pub fn load_features(base: &Path, entry: &ManifestEntry) -> Result<FeatureMatrix, EvalError> {
    if entry.kind != Kind::Features {
        return Err(EvalError::WrongKind {
            id: entry.id.clone(),
            expected: "features",
            found: match entry.kind {
                Kind::Mesh => "mesh",
                Kind::Points => "points",
                Kind::Features => unreachable!(),
            },
        });
    }
    let path = resolve_path(base, entry);
    let tensor = read_tensor(&path).map_err(|e| EvalError::at(&path, e))?;
    features_from_tensor(&tensor).map_err(|e| e.with_path(&path))
}
