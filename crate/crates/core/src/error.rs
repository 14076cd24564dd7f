use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cyclotomic order mismatch: {0} vs {1}")]
    OrderMismatch(u32, u32),

    #[error("division by zero")]
    DivisionByZero,

    #[error("variable count mismatch: {0} vs {1}")]
    VarMismatch(usize, usize),

    #[error("at most {max} variables are supported, got {got}")]
    TooManyVars { max: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("polynomial is not homogeneous")]
    Inhomogeneous,

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: u32, found: u32 },

    #[error("value is not rational: {0}")]
    NotRational(String),

    #[error("group closure exceeded cap of {cap} elements")]
    CapExceeded { cap: usize },

    #[error("stabilizer of the first row is not a subgroup")]
    NotSubgroup,

    #[error("rank certification failed: {0}")]
    Certification(String),

    #[error("unknown {kind} `{name}` (available: {available})")]
    Unknown {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("enumeration needs {required} codewords but the budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("code length {0} exceeds the supported maximum of 64")]
    CodeTooLong(usize),

    #[error("input is not invariant: {0}")]
    NotInvariant(String),

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
