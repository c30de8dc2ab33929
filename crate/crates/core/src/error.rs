use thiserror::Error;

/// Errors shared across the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("group closure exceeded the size cap of {cap} elements")]
    SizeLimit { cap: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown element label `{0}`")]
    UnknownLabel(String),

    #[error("unknown built-in group `{0}`")]
    UnknownGroup(String),

    #[error("unknown built-in dataset `{0}`")]
    UnknownDataset(String),

    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),

    #[error("character sums are defined at positive integers only")]
    CharacterDomain,

    #[error("residue {residue} is not invertible mod {modulus}")]
    NotCoprime { residue: u64, modulus: u64 },

    #[error("symbolic exponent needs a weight assignment to evaluate")]
    UnboundVariable,

    #[error("exponent {0} is not an integer; cannot form an exact power of p")]
    NonIntegerExponent(String),

    #[error("prime {prime} divides the group order {order}; a tame prime is required")]
    WildPrime { prime: u64, order: usize },

    #[error("local map data required for wild prime {prime}")]
    DataRequired { prime: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search over {vars} variables exceeds the supported limit of {limit}")]
    TooManyVariables { vars: usize, limit: usize },

    #[error("{filt} is not a nonnegative combination of the tame class forms")]
    Inexpressible { filt: String },

    #[error("invalid data: {0}")]
    InvalidData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Parse error helper carrying a 1-based line number.
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
