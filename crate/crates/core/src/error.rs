use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not unitary (Frobenius deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit {qubit} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("invalid gate placement: {0}")]
    BadPlacement(String),

    #[error("episode already finished; reset the environment before stepping")]
    EpisodeFinished,

    #[error("action {label} is not in the environment's action set")]
    UnknownAction { label: String },

    #[error("state registry exceeded its cap of {cap} states")]
    RegistryCapExceeded { cap: usize },

    #[error("{task} is not available in the {representation} representation")]
    UnsupportedCombination { task: String, representation: String },

    #[error("search-space bound overflows for {actions} actions at depth {length}")]
    SpaceSizeOverflow { actions: u64, length: u32 },

    #[error("state index {index} outside the network input dimension {dim}")]
    StateIndexOutOfRange { index: usize, dim: usize },

    #[error("cannot train on an empty batch")]
    EmptyBatch,

    #[error("unreadable artifact: {0}")]
    BadArtifact(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
