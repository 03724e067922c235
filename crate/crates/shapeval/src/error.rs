//! Top-level evaluation error: every failure carries enough context (task
//! id, file path) to locate the offending input, and any failing task aborts
//! the run rather than silently skewing set statistics.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::manifest::ManifestError;
use crate::meshio::MeshError;
use crate::report::ReportError;
use crate::tensor::TensorError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{path}: {source}")]
    Tensor {
        path: PathBuf,
        #[source]
        source: TensorError,
    },
    #[error("{path}: {source}")]
    Mesh {
        path: PathBuf,
        #[source]
        source: MeshError,
    },
    #[error("manifest: {0}")]
    Manifest(#[from] ManifestError),
    #[error("report: {0}")]
    Report(#[from] ReportError),
    #[error("metric kernel: {0}")]
    Core(#[from] shapeval_core::Error),
    #[error("{path}: metric kernel: {source}")]
    CoreAt {
        path: PathBuf,
        #[source]
        source: shapeval_core::Error,
    },
    #[error("task {id}: {source}")]
    Task {
        id: String,
        #[source]
        source: Box<EvalError>,
    },
    #[error("{what}: expected shape {expected}, found {found:?}")]
    BadShape {
        what: &'static str,
        expected: &'static str,
        found: Vec<u64>,
    },
    #[error("entry {id}: expected {expected} data, found {found}")]
    WrongKind {
        id: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("reference {id} has no generated or completion entries")]
    UnmatchedReference { id: String },
    #[error("entry {id} ({role}) matches no reference")]
    OrphanEntry { id: String, role: String },
    #[error("completion group {group}: expected {expected} completions, found {found}")]
    MissingCompletionGroup { group: String, expected: usize, found: usize },
    #[error("class {class}: set metrics need at least 2 shapes per side, found {found}")]
    TooFewShapes { class: String, found: usize },
    #[error("class {class}: feature metrics requested but no {side} feature entry exists")]
    MissingFeatures { class: String, side: &'static str },
    #[error("cached matrix {path}: expected {expected_rows}x{expected_cols}, found {rows}x{cols}")]
    CacheShapeMismatch {
        path: PathBuf,
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("classes {a} and {b} collide after filename sanitization")]
    ClassNameCollision { a: String, b: String },
    #[error("{0}")]
    Usage(String),
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
}

impl EvalError {
    /// Attaches a file path to a lower-level error.
    pub fn at(path: &Path, source: impl IntoPathed) -> EvalError {
        source.into_pathed(path)
    }

    pub fn with_path(self, path: &Path) -> EvalError {
        match self {
            EvalError::Core(source) => EvalError::CoreAt { path: path.to_path_buf(), source },
            other => other,
        }
    }

    pub fn in_task(self, id: &str) -> EvalError {
        EvalError::Task { id: id.to_string(), source: Box::new(self) }
    }
}

pub trait IntoPathed {
    fn into_pathed(self, path: &Path) -> EvalError;
}

impl IntoPathed for TensorError {
    fn into_pathed(self, path: &Path) -> EvalError {
        EvalError::Tensor { path: path.to_path_buf(), source: self }
    }
}

impl IntoPathed for MeshError {
    fn into_pathed(self, path: &Path) -> EvalError {
        EvalError::Mesh { path: path.to_path_buf(), source: self }
    }
}

impl IntoPathed for shapeval_core::Error {
    fn into_pathed(self, path: &Path) -> EvalError {
        EvalError::CoreAt { path: path.to_path_buf(), source: self }
    }
}
