use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by tensors, coefficient matrices, kernels, and the machine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("tensor extent must be at least 1, got {0}x{1}x{2}")]
    ZeroExtent(usize, usize, usize),

    #[error("index {index} out of range for extent {extent}")]
    IndexOutOfRange { index: usize, extent: usize },

    #[error("scalar kind mismatch: expected {expected}, got {got}")]
    KindMismatch { expected: &'static str, got: &'static str },

    #[error("narrowing cast from {from} to {to} is not allowed")]
    NarrowingCast { from: &'static str, to: &'static str },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("element count mismatch: header declares {expected}, file holds {got}")]
    ElementCount { expected: usize, got: usize },

    #[error("unknown scalar kind tag '{0}'")]
    UnknownKind(String),

    #[error("malformed tensor file: {0}")]
    Malformed(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("matrix must be square for this operation, got {rows}x{cols}")]
    NonSquareMatrix { rows: usize, cols: usize },

    #[error("walsh-hadamard matrices require a power-of-two size, got {0}")]
    NonPowerOfTwo(usize),

    #[error("pivot map is not a bijection over 0..{0}")]
    NonBijectiveTags(usize),

    #[error("matrix is numerically singular (pivot below threshold)")]
    SingularMatrix,

    #[error("core {p1}x{p2}x{p3} is smaller than the problem {n1}x{n2}x{n3}")]
    CoreTooSmall { p1: usize, p2: usize, p3: usize, n1: usize, n2: usize, n3: usize },

    #[error("stage {requested} cannot run now; next stage is {expected}")]
    OutOfOrderStage { requested: u8, expected: u8 },

    #[error("machine already finished all three stages")]
    MachineFinished,
}
