use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field {field} does not embed in the cyclotomic field of conductor {conductor}")]
    NotEmbeddable { field: String, conductor: u32 },
    #[error("field {0} is not CM")]
    NotCm(String),
    #[error("degree cap exceeded: [E:Q][F:Q] = {0} > 64")]
    DegreeCap(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero test undecidable at the working precision")]
    Undecidable,
    #[error("singular matrix")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("validation failed [{code}]: {detail}")]
    Validation { code: String, detail: String },
    #[error("middle Hodge class present: {0}")]
    MiddleClass(String),
    #[error("not critical: {0}")]
    NotCritical(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("rewrite failure: {0}")]
    Rewrite(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub fn validation(code: &str, detail: impl Into<String>) -> Error {
    Error::Validation {
        code: code.to_string(),
        detail: detail.into(),
    }
}
