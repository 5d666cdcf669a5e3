//! Error type shared by every module of the crate.

use alloc::string::String;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Matrix or ensemble dimensions do not line up.
    #[error("shape error: {0}")]
    Shape(String),

    /// The smallest singular value is below the rank tolerance.
    #[error("rank deficient operator: sigma_min/sigma_max = {ratio:e} <= {tolerance:e}")]
    RankDeficient { ratio: f64, tolerance: f64 },

    /// A requested singular spectrum is empty, non-positive or malformed.
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    /// A regularization parameter is outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A process or scenario specification is out of domain.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// Welch/segmentation configuration cannot be applied to the data.
    #[error("config error: {0}")]
    Config(String),

    /// A minimum could not be bracketed inside the search grid.
    #[error("no minimum bracketed: {0}")]
    NoMinimumBracketed(String),

    /// An iterative kernel exceeded its sweep budget.
    #[error("did not converge: {0}")]
    NotConverged(String),
}
