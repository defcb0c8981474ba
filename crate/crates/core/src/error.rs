use thiserror::Error;

/// Errors raised by the library.
///
/// Variants are grouped by the exit-code family the CLI maps them to:
/// configuration problems, numerical failures and structural failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid presentation {presentation}: {reason}")]
    InvalidPresentation { presentation: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid word {word:?}: {reason}")]
    InvalidWord { word: String, reason: String },

    #[error("no unbounded component outside the ball of radius {base_radius} in a truncation of radius {radius}")]
    NoUnboundedComponent { base_radius: u32, radius: u32 },

    #[error("chi must be nonconstant")]
    ConstantEndFunction,

    #[error("shell vertex {word} has no boundary value")]
    InvalidBoundary { word: String },

    #[error("solver did not converge: residual {residual:e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },

    #[error("fields live on different truncations")]
    MismatchedTruncation,

    #[error("neck at {center} is undecidable inside the truncation window")]
    Undecidable { center: String },

    #[error("gap certificate at neck {center} has non-positive drop {drop:e}")]
    DegenerateDrop { center: String, drop: f64 },

    #[error("no regular threshold in (0.4, 0.6) at equality tolerance {equality_tol:e}")]
    NoRegularValue { equality_tol: f64 },

    #[error("walls cross: {0}")]
    CrossingWalls(String),

    #[error("wall incidence graph is not a tree: {0}")]
    NotATree(String),
}

impl Error {
    /// Coarse failure family, used for process exit codes.
    pub fn family(&self) -> ErrorFamily {
        match self {
            Error::NonConvergence { .. } | Error::DegenerateDrop { .. } | Error::NoRegularValue { .. } => {
                ErrorFamily::Numeric
            }
            Error::CrossingWalls(_) | Error::NotATree(_) => ErrorFamily::Structural,
            _ => ErrorFamily::Config,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorFamily {
    Config,
    Numeric,
    Structural,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
