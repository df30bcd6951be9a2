use thiserror::Error;

/// Failures raised by the arithmetic layer (formulas, concentration, metrics, index).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalcError {
    #[error("unit error: {0}")]
    Unit(String),
    #[error("division by a zero base: {0}")]
    DivisionByZeroBase(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("period error: {0}")]
    Period(String),
    #[error("empty denominator: {0}")]
    EmptyDenominator(String),
    #[error("malformed shares: {0}")]
    MalformedShares(String),
    #[error("incomplete observation: {0}")]
    IncompleteObservation(String),
    #[error("weight error: {0}")]
    Weight(String),
    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),
    #[error("alignment error: {0}")]
    Alignment(String),
    #[error("arity error: {0}")]
    Arity(String),
    #[error("evidence error: {0}")]
    Evidence(String),
}

/// Ingestion failures with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("{path}:{line}:{column}: {message}")]
    Malformed {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}:{line}: duplicate id `{id}`")]
    DuplicateId {
        path: String,
        line: usize,
        id: String,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{path}:{line}:{column}: {message}")]
pub struct DefinitionParseError {
    pub path: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("lineage error: indicator `{indicator}` references unknown input `{input}`")]
    Lineage { indicator: String, input: String },
    #[error("classification error: {0}")]
    Classification(String),
    #[error("audit log line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("audit log already holds a record for `{0}`")]
    DuplicateRecord(String),
    #[error("supersedes unknown record `{0}`")]
    UnknownSuperseded(String),
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum FrameworkError {
    #[error("hypothesis spec error: {0}")]
    Spec(String),
    #[error("mapping rule error: {0}")]
    Rule(String),
    #[error("config parse error: {0}")]
    Config(#[from] toml::de::Error),
}
