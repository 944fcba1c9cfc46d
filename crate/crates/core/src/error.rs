use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown operation symbol `{0}`")]
    UnknownOp(String),

    #[error("operation `{op}` expects {expected} argument(s), found {found}")]
    Arity {
        op: String,
        expected: usize,
        found: usize,
    },

    #[error("duplicate operation symbol `{0}` in signature")]
    DuplicateOp(String),

    #[error("malformed term: {0}")]
    Malformed(String),

    #[error("enumeration cap exceeded: {count} candidates > cap {cap} ({what})")]
    CapExceeded {
        what: String,
        count: u128,
        cap: u128,
    },

    #[error("domain/codomain mismatch: {0}")]
    Mismatch(String),

    #[error("coverage gap: {0}")]
    CoverageGap(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("i/o error on {path}: {msg}")]
    Io { path: String, msg: String },
}

impl Error {
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}
