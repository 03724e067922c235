//! Error type shared by all kernel operations.

use core::fmt;

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong inside the metric kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An operation received an empty point cloud or mesh.
    EmptyGeometry,
    /// Surface sampling on a mesh whose total triangle area is zero.
    ZeroTotalArea,
    /// A subsample of `k` points was requested from fewer than `k` candidates.
    KTooLarge { k: usize, n: usize },
    /// A zero-area triangle was hit while casting an occupancy ray.
    DegenerateGeometry,
    /// Normal-dependent metric called on a cloud without normals.
    MissingNormals,
    /// No occupancy query fell inside either solid; inputs are probably not
    /// normalized to the sampling cube.
    NoOccupiedSamples,
    /// Diversity metrics need at least two members.
    NeedAtLeastTwo,
    /// Distance matrices passed together do not agree on set sizes.
    InconsistentDims,
    /// A distance matrix with zero rows or columns.
    DegenerateMatrix,
    /// Feature inputs with different dimensionality.
    DimensionMismatch { left: usize, right: usize },
    /// Fewer samples than the estimator can work with.
    TooFewSamples { n: usize, min: usize },
    /// The covariance product has an eigenvalue below the clamp tolerance;
    /// the feature matrices are corrupt or not covariances at all.
    NonPsdProduct { eigenvalue: f64, tolerance: f64 },
    /// Eigenvalue iteration failed to converge.
    ConvergenceFailed,
    /// A parameter violated its documented range.
    InvalidParameter(&'static str),
    /// A coordinate or feature value was NaN or infinite.
    NonFinite,
    /// A normal vector deviates from unit length by more than 1e-6.
    InvalidNormals,
    /// A triangle referenced a vertex index outside the vertex array.
    IndexOutOfRange { index: u32, len: usize },
    /// A triangle repeats a vertex index.
    DegenerateTriangle,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyGeometry => write!(f, "empty geometry"),
            Error::ZeroTotalArea => write!(f, "mesh has zero total surface area"),
            Error::KTooLarge { k, n } => write!(f, "cannot select {k} points out of {n}"),
            Error::DegenerateGeometry => {
                write!(f, "zero-area triangle encountered on an occupancy ray")
            }
            Error::MissingNormals => write!(f, "point cloud carries no normals"),
            Error::NoOccupiedSamples => {
                write!(f, "no query point fell inside either mesh; check normalization")
            }
            Error::NeedAtLeastTwo => write!(f, "need at least two members"),
            Error::InconsistentDims => write!(f, "distance matrices have inconsistent dimensions"),
            Error::DegenerateMatrix => write!(f, "distance matrix is empty"),
            Error::DimensionMismatch { left, right } => {
                write!(f, "feature dimensions differ: {left} vs {right}")
            }
            Error::TooFewSamples { n, min } => {
                write!(f, "estimator needs at least {min} samples, got {n}")
            }
            Error::NonPsdProduct { eigenvalue, tolerance } => write!(
                f,
                "covariance product eigenvalue {eigenvalue:e} below clamp tolerance -{tolerance:e}"
            ),
            Error::ConvergenceFailed => write!(f, "eigenvalue iteration did not converge"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::NonFinite => write!(f, "non-finite value in input"),
            Error::InvalidNormals => write!(f, "normal vector is not unit length"),
            Error::IndexOutOfRange { index, len } => {
                write!(f, "vertex index {index} out of range for {len} vertices")
            }
            Error::DegenerateTriangle => write!(f, "triangle repeats a vertex index"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
