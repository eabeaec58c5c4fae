use thiserror::Error;

/// Failures surfaced by the library. Each variant maps onto one CLI exit code
/// (see [`Error::exit_code`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config at {path}: {msg}")]
    Config { path: String, msg: String },

    #[error("invalid field: {0}")]
    Field(String),

    #[error("group order exceeds cap {cap}")]
    GroupTooLarge { cap: usize },

    #[error("action not small: {witness}")]
    NotSmall { witness: String },

    #[error("not linearly reductive: {0}")]
    NotLinearlyReductive(String),

    #[error("non-etale group scheme: {0}")]
    NonEtale(String),

    #[error("field lacks primitive {0}-th roots of unity")]
    MissingRoots(u64),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("P not indecomposable: {0}")]
    NotIndecomposable(String),

    #[error("decomposition incomplete: {0}")]
    DecompositionIncomplete(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal verification failure: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            msg: msg.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. }
            | Error::Field(_)
            | Error::MissingRoots(_)
            | Error::Unsupported(_)
            | Error::NonEtale(_)
            | Error::NotLinearlyReductive(_)
            | Error::Io(_) => 1,
            Error::NotSmall { .. } => 2,
            Error::GroupTooLarge { .. } | Error::ResourceCap(_) => 3,
            Error::NotIndecomposable(_)
            | Error::DecompositionIncomplete(_)
            | Error::Verification(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
