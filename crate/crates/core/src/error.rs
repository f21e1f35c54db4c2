use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Argument outside the region where the special functions are validated.
    #[error("argument {z} outside validated region (|z| <= 50, |Im z| <= 5, order <= {max_order})")]
    Domain { z: Complex64, max_order: u32 },

    #[error("singular argument z = {z} for a second-kind cylinder function")]
    SingularArgument { z: Complex64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    /// S_k is numerically singular: k is (close to) an interior Dirichlet eigenvalue.
    #[error("single-layer matrix near singular at wavenumber {wavenumber} (condition estimate {condition:.3e}); shift the contour")]
    NearInteriorEigenvalue { wavenumber: Complex64, condition: f64 },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("contour node {index} at z = {z}: {source}")]
    ContourNode {
        index: usize,
        z: Complex64,
        #[source]
        source: Box<Error>,
    },

    #[error("eigenvalue tracking ambiguous at eta = {eta}: candidates {a} and {b} are equidistant from {from}")]
    Tracking { eta: f64, from: f64, a: f64, b: f64 },

    #[error("tracking lost at eta = {eta}: no eigenvalue found near {from}")]
    TrackingLost { eta: f64, from: f64 },

    #[error("index estimation failed: {0}")]
    Estimation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Wraps `self` with the index of the contour node where it happened.
    pub fn at_node(self, index: usize, z: Complex64) -> Error {
        Error::ContourNode {
            index,
            z,
            source: Box::new(self),
        }
    }
}
