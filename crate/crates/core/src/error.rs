use thiserror::Error;

/// Errors raised while reading one of the text or JSON formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected character {found:?} at byte {pos}")]
    UnexpectedChar { pos: usize, found: char },
    #[error("internal node opened at byte {pos} has fewer than 2 children")]
    TooFewChildren { pos: usize },
    #[error("integer at byte {pos} is zero or too large")]
    BadInteger { pos: usize },
    #[error("trailing input at byte {pos}")]
    Trailing { pos: usize },
    #[error("internal node at byte {pos} is missing its sign")]
    MissingSign { pos: usize },
    #[error("unsigned tree expected, found a sign at byte {pos}")]
    UnexpectedSign { pos: usize },
    #[error("labelled leaf found where only '*' leaves are allowed (byte {pos})")]
    UnexpectedLabel { pos: usize },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("invalid document: {0}")]
    Schema(String),
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("node {0} is not in the tree")]
    NodeNotInTree(usize),
    #[error("graph is not a cograph: vertex set {0:?} and its complement are both connected")]
    NotACograph(Vec<usize>),
    #[error("leaves must be labelled 1..n for this operation")]
    UnlabelledLeaves,
    #[error("sampling budget exhausted after {attempts} attempts")]
    BudgetExhausted { attempts: u64 },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("bisection bracket failure: {0}")]
    Bracket(String),
    #[error("divergent iteration: {0}")]
    Divergent(String),
    #[error("zero normalizer for {0}")]
    ZeroNormalizer(&'static str),
    #[error("insufficient accepted samples: {accepted} of {required}")]
    InsufficientSamples { accepted: usize, required: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
