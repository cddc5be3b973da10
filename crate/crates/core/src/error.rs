use thiserror::Error;

/// Errors raised anywhere in the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("capacity exceeded: {requested} qubits requested, maximum is {max}")]
    Capacity { requested: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("matrix is not unitary (Frobenius defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("eigenvalue solver did not converge")]
    EigenNonConvergence,

    #[error("eigenvalue of modulus {modulus} is off the unit circle")]
    EigenvalueOffCircle { modulus: f64 },

    #[error("{what} out of range: {value} (limit {limit})")]
    OutOfRange { what: &'static str, value: u64, limit: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("need at least {needed} items, got {got}")]
    TooFew { needed: usize, got: usize },

    #[error("insufficient snapshots: {got} available, {required} required")]
    InsufficientSnapshots { got: usize, required: usize },

    #[error("permanent cap exceeded: {size} > {cap}")]
    PermanentCap { size: usize, cap: usize },

    #[error("both likelihoods vanish; posterior is undefined")]
    DegenerateLikelihood,

    #[error("brute-force key search cap exceeded: {keys} keys > {cap}")]
    SearchCap { keys: u64, cap: u64 },

    #[error("unknown experiment `{name}`; registered: {registered}")]
    UnknownExperiment { name: String, registered: String },

    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
