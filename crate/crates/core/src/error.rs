use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation point coincides with the electrode plane.
    #[error("point lies on the electrode plane (z = 0); use the surface limit instead")]
    OnPlane,

    /// Evaluation point too close to an electrode edge, where fields diverge.
    #[error("evaluation point within {distance:.3e} m of an electrode edge")]
    Singularity { distance: f64 },

    /// Invalid electrode geometry.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Feature requested for an order the machinery does not cover.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Polynomial roots did not show the expected structure.
    #[error("root structure mismatch: {message} (residuals {residuals:?})")]
    RootStructure { message: String, residuals: Vec<f64> },

    /// An iterative search failed to produce a result.
    #[error("search failed: {0}")]
    Search(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
