//! IO, file formats, evaluation harness and CLI for the shape-evaluation
//! kernels in `shapeval-core`: tensor and mesh readers, the JSON-lines
//! manifest, CSV/JSON metric reports, class aggregation and the `shapeval`
//! binary.

pub mod cli;
pub mod config;
pub mod error;
pub mod harness;
pub mod load;
pub mod manifest;
pub mod meshio;
pub mod report;
pub mod tensor;

pub use config::EvalConfig;
pub use error::EvalError;
