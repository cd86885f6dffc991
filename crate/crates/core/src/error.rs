use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    /// The data does not span the required number of dimensions.
    #[error("rank deficient: needed rank {needed}, numerical rank {found}")]
    RankDeficient { needed: usize, found: usize },

    #[error("design matrix M(u) is singular")]
    SingularDesign,

    #[error("cholesky factorization failed on a {dim}x{dim} matrix")]
    Cholesky { dim: usize },

    #[error("singular value decomposition did not converge")]
    SvdFailed,

    #[error("vector is constant after mean removal")]
    ConstantVector,

    #[error("SPA terminated after {found} of {needed} indices")]
    EarlyTermination { needed: usize, found: usize },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
