use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension n = {n} out of range {min}..={max}")]
    DimensionOutOfRange { n: usize, min: usize, max: usize },

    #[error("graph must have at least one vertex")]
    EmptyGraph,

    #[error("a cycle needs at least 3 vertices, got {0}")]
    DegenerateCycle(usize),

    #[error("graph has {found} vertices, at least {min} required")]
    GraphTooSmall { found: usize, min: usize },

    #[error("vertex {index} out of range for a graph with {num_vertices} vertices")]
    VertexOutOfRange { index: usize, num_vertices: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("variable {index} out of range for a QUBO with {num_vars} variables")]
    VariableOutOfRange { index: usize, num_vars: usize },

    #[error("assignment has {found} bits, QUBO has {expected} variables")]
    LengthMismatch { expected: usize, found: usize },

    #[error("integer overflow while {0}")]
    Overflow(&'static str),

    #[error("penalty weights rejected: {inequality} violated ({detail})")]
    WeightViolation { inequality: String, detail: String },

    #[error("{num_vars} variables exceeds the exhaustive search cap of {cap}")]
    TooManyVariables { num_vars: usize, cap: usize },

    #[error("{what} has {size} vertices, cap is {cap}")]
    GraphOverCap { what: &'static str, size: usize, cap: usize },

    #[error("invalid label {label:?}: {reason}")]
    InvalidLabel { label: String, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
