//! Error type shared by the whole crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in this crate.
///
/// `Resource` is special: solver entry points return it when a configured
/// node or row cap is exceeded, so callers can distinguish "proved
/// unsatisfiable" from "gave up".
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain of the operation (bad label, bad
    /// metallic index, tile not in the set, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Substitution images or pattern shapes fail to line up.
    #[error("alignment error: {0}")]
    Alignment(String),

    /// A duplicate tile or otherwise malformed tile set.
    #[error("invalid tile set: {0}")]
    TileSet(String),

    /// A configured search cap (backtracking nodes, cyclic rows) was hit
    /// before the search finished.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// An iterative numeric routine failed to converge within its budget.
    #[error("no convergence: {0}")]
    Convergence(String),

    /// Serialization or deserialization failed.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// File input/output failed.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn alignment(msg: impl Into<String>) -> Self {
        Error::Alignment(msg.into())
    }

    pub(crate) fn tileset(msg: impl Into<String>) -> Self {
        Error::TileSet(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}
