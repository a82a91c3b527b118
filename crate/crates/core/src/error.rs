use thiserror::Error;

use crate::wl::TestKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("self-loop at line {line}")]
    SelfLoop { line: usize },
    #[error("node {node} out of range for {n} nodes")]
    NodeOutOfRange { node: u32, n: usize },
    #[error("target pair ({0}, {0}) is a self-pair")]
    SelfPair(u32),
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("fractions out of range: test {test}, val {val}")]
    BadFractions { test: f64, val: f64 },
    #[error("graph too small: {edges} edges give {test} test and {val} validation links")]
    GraphTooSmall { edges: usize, test: usize, val: usize },
    #[error("need {needed} non-edges but only {available} exist")]
    NotEnoughNonEdges { needed: usize, available: usize },
    #[error("{kind} needs a target pair")]
    MissingTarget { kind: TestKind },
    #[error("{kind} on {n} nodes exceeds the dense pair gate of {gate} pairs")]
    DenseGate { kind: TestKind, n: usize, gate: usize },
    #[error("color map belongs to session {found}, interner is session {expected}")]
    SessionMismatch { expected: u64, found: u64 },
    #[error("color map is at round {colors} but the interner is at round {interner}")]
    StaleRound { colors: usize, interner: usize },
    #[error("color map was built for {found}, refining as {expected}")]
    KindMismatch { expected: TestKind, found: TestKind },
    #[error("unknown test kind {0:?}; expected one of WL1, WL1_Label01, WL2, FWL2, WL2_Local, FWL2_Local")]
    UnknownKind(String),
    #[error("tree mismatch: {0}")]
    TreeMismatch(String),
    #[error("oracle bound exceeded: {n} nodes > {bound}")]
    OracleBound { n: usize, bound: usize },
    #[error("unroll of {n} nodes to depth {depth} is too large")]
    UnrollTooLarge { n: usize, depth: usize },
    #[error("labels must be all 0 or all 1, got a single class")]
    SingleClass,
    #[error("feature and label counts differ: {features} vs {labels}")]
    LengthMismatch { features: usize, labels: usize },
    #[error("non-finite feature at row {0}")]
    NonFinite(usize),
    #[error("histogram width must be at least 1")]
    ZeroWidth,
    #[error("invalid corpus spec {0:?}")]
    CorpusSpec(String),
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
