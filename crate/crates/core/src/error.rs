//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // Prefix structure
    #[error("program is empty")]
    EmptyProgram,
    #[error("prefix underflow: expression complete at token {position} but {remaining} tokens remain")]
    PrefixUnderflow { position: usize, remaining: usize },
    #[error("prefix dangling: {missing} operand(s) missing at end of program")]
    PrefixDangling { missing: usize },

    // Program generation
    #[error("function set is empty")]
    EmptyFunctionSet,
    #[error("max_depth must be at least 1")]
    ZeroMaxDepth,

    // Interpreter
    #[error("stack overflow: capacity {capacity} supports programs of depth <= {}", capacity.saturating_sub(1))]
    StackOverflow { capacity: usize },
    #[error("stack underflow during evaluation")]
    StackUnderflow,
    #[error("evaluation finished with {count} values on the stack")]
    UnbalancedEvaluation { count: usize },
    #[error("variable x{index} out of range: dataset has {n_features} feature column(s)")]
    VariableOutOfRange { index: usize, n_features: usize },
    #[error("program {program}: {source}")]
    Batch { program: usize, source: Box<Error> },

    // Fitness
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least 2 samples, got {len}")]
    TooFewSamples { len: usize },
    #[error("weights must be non-negative with a positive sum")]
    InvalidWeights,
    #[error("correlation undefined: an input vector has zero weighted variance")]
    ConstantVector,
    #[error("log loss requires binary targets in {{0, 1}}; found {value} at row {row}")]
    NonBinaryTarget { row: usize, value: f64 },

    // Selection
    #[error("raw fitness is unset; evaluate the program first")]
    FitnessUnset,
    #[error("population is empty")]
    EmptyPopulation,
    #[error("n_tournaments must be at least 1")]
    ZeroTournaments,

    // Configuration
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    // Engine self-checks
    #[error("internal defect: generation {generation}, program {program}: {source}")]
    Defect {
        generation: usize,
        program: usize,
        source: Box<Error>,
    },

    // Data
    #[error("grid side must be at least 2, got {side}")]
    GridTooSmall { side: usize },
    #[error("test_fraction must be in (0, 1), got {fraction}")]
    InvalidTestFraction { fraction: f64 },
    #[error("train/test split leaves one side empty")]
    DegenerateSplit,
    #[error("dataset has no rows")]
    EmptyDataset,
    #[error("dataset has no feature columns")]
    NoFeatureColumns,
    #[error("columns have unequal lengths")]
    RaggedColumns,
    #[error("{path}:{line}: row has {got} fields, expected {expected}")]
    RaggedRow {
        path: String,
        line: usize,
        got: usize,
        expected: usize,
    },
    #[error("{path}:{line}: column {column}: cannot parse '{value}' as a number")]
    BadNumber {
        path: String,
        line: usize,
        column: usize,
        value: String,
    },
    #[error("target column '{name}' not found; available: {available}")]
    MissingTargetColumn { name: String, available: String },
    #[error("csv error in {path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl Error {
    /// Attaches a population index to a per-program evaluation error.
    pub fn for_program(self, program: usize) -> Error {
        Error::Batch {
            program,
            source: Box::new(self),
        }
    }
}
