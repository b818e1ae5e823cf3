use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("undeclared atom `{0}`")]
    UndeclaredAtom(String),

    #[error("invalid atom name `{0}`")]
    InvalidAtom(String),

    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),

    #[error("{atoms} atoms exceed the world cap of {cap}")]
    WorldCap { atoms: usize, cap: usize },

    #[error("conditional event #{index} has an impossible antecedent")]
    EmptyAntecedent { index: usize },

    #[error("the family is empty")]
    EmptyFamily,

    #[error("invalid rational `{0}`")]
    InvalidRational(String),

    #[error("invalid interval [{lower}, {upper}] for conditional event #{index}")]
    InvalidInterval {
        index: usize,
        lower: String,
        upper: String,
    },

    #[error("duplicate entries for conditional event #{index} have disjoint intervals")]
    ConflictingDuplicates { index: usize },

    #[error("assessment is not g-coherent (failing subfamily {failing:?})")]
    NotGCoherent { failing: Vec<usize> },

    #[error("linear program is malformed: {0}")]
    MalformedProgram(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("constituent set does not match the family: {0}")]
    Mismatch(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("conditioning event owned by stages {first} and {second}")]
    DuplicateOwner { first: usize, second: usize },

    #[error("{size} conditional events exceed the oracle cap of {cap}")]
    OracleCap { size: usize, cap: usize },

    #[error("precise override: {0}")]
    InvalidPrecise(String),

    #[error("{0}")]
    Input(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
