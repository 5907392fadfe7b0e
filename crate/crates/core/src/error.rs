use thiserror::Error;

/// Errors produced by the coding, bound and solver routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cost table is not regular: context roots span [{min_root}, {max_root}]")]
    NonRegularCost { min_root: f64, max_root: f64 },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("block support {size} exceeds the limit of {limit} symbols")]
    SupportBlowup { size: u128, limit: usize },

    #[error("subset must be non-empty")]
    EmptySet,

    #[error("exact smooth entropy unavailable: {0}")]
    ExactnessUnavailable(String),

    #[error("interval precision exhausted at depth {depth} (width {width:e})")]
    PrecisionExhausted { depth: usize, width: f64 },

    #[error("codebook invariant violated: {0}")]
    InvariantViolation(String),

    #[error("`{0}` is not a codeword")]
    InvalidCodeword(String),

    #[error("no code within the search budget: {0}")]
    Infeasible(String),

    #[error("mismatched reports: {0}")]
    Mismatch(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for failures caused by instance size or numeric reach rather than bad input.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::ExactnessUnavailable(_)
                | Error::SupportBlowup { .. }
                | Error::Infeasible(_)
                | Error::PrecisionExhausted { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
