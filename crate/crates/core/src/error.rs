use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{value} is not a prime")]
    NotPrime { value: u64 },

    #[error("invalid rational '{token}': {reason}")]
    InvalidRational { token: String, reason: String },

    #[error("disks over different primes ({left} and {right}) cannot be compared")]
    PrimeMismatch { left: u64, right: u64 },

    #[error("duplicate point '{point}' at positions {first} and {second}")]
    DuplicatePoint { point: String, first: usize, second: usize },

    #[error("need at least {required} finite points, got {found}")]
    TooFewPoints { required: usize, found: usize },

    #[error("point index {index} out of range (dendrogram has {len} points)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("point index {index} is the infinity end, not a leaf")]
    NotALeaf { index: usize },

    #[error("matrix is not strongly ultrametric at indices ({i}, {j}, {k})")]
    NotUltrametric { i: usize, j: usize, k: usize },

    #[error("malformed valuation matrix: {0}")]
    MalformedMatrix(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("shape enumeration supports 2..=10 leaves, got {0}")]
    ShapeLimit(usize),

    #[error("configuration '{timestamp}' has {found} points, expected {expected}")]
    ConfigurationSize {
        timestamp: String,
        expected: usize,
        found: usize,
    },

    #[error("collision in configuration '{timestamp}': points {first} and {second} both equal '{point}'")]
    Collision {
        timestamp: String,
        first: usize,
        second: usize,
        point: String,
    },

    #[error("Haar measure on Z_{prime} needs integral points, but '{point}' has valuation {valuation}")]
    UnsupportedMeasure { prime: u64, point: String, valuation: i64 },

    #[error("invalid classifier weights: {0}")]
    InvalidWeights(String),

    #[error("vertex {vertex} has {children} children but the digit alphabet has only {q} symbols")]
    BranchingExceedsAlphabet { vertex: String, children: usize, q: u64 },

    #[error("{q} is not a prime power")]
    NotPrimePower { q: u64 },

    #[error("decoding needs q = p, but the codes use q = {q} over p = {p}")]
    AlphabetNotPrime { q: u64, p: u64 },

    #[error("symbol '{symbol}' in string {string} at position {position} is outside the alphabet")]
    SymbolOutsideAlphabet {
        symbol: char,
        string: usize,
        position: usize,
    },

    #[error("duplicate label '{0}'")]
    DuplicateLabel(String),
}

impl Error {
    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
