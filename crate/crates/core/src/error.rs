use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown mode label `{0}`")]
    UnknownMode(String),
    #[error("mode label `{0}` appears more than once")]
    DuplicateMode(String),
    #[error("{0} modes requested, at most 32 are supported")]
    TooManyModes(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("mode registries differ: {0}")]
    RegistryMismatch(String),
    #[error("matrix is not unitary (max |U†U - I| = {0:e})")]
    NotUnitary(f64),
    #[error("parameter `{name}` = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("state terms mix particle numbers {0} and {1}")]
    MixedParticleNumber(usize, usize),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("moments need 1 to 3 labels, got {0}")]
    MomentOrder(usize),
    #[error("label `{0}` repeated in a cumulant")]
    RepeatedLabel(String),
    #[error("outcome {0} has zero probability; conditioning is undefined")]
    ZeroProbability(String),
    #[error("degenerate normalisation {name} = {value:e}")]
    Degenerate { name: &'static str, value: f64 },
    #[error("Bloch vector norm {0} exceeds 1")]
    NormExceeded(f64),
    #[error("series did not converge within {terms} terms (last term {last:e})")]
    NonConvergent { terms: usize, last: f64 },
    #[error("thermal ratio q = {0} exceeds 1")]
    RatioAboveOne(f64),
    #[error("correlator table lacks {0}")]
    MissingCorrelator(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Circuit-file diagnostic with 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownElement(String),
    OutOfRange(String),
    UndeclaredMode(String),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::UnknownElement(kind) => write!(f, "unknown element kind `{kind}`"),
            ParseErrorKind::OutOfRange(msg) => write!(f, "parameter out of range: {msg}"),
            ParseErrorKind::UndeclaredMode(label) => write!(f, "undeclared mode `{label}`"),
        }
    }
}
