use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("input is not Hermitian (max |A - A^dag| = {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    #[error("operator is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },

    #[error("matrix is not unitary (max |U^dag U - I| = {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("rank {rank} is not in 1..={dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("Euler angles out of range: {0}")]
    InvalidAngles(String),

    #[error("quadrature for 2j = {two_j} exceeds the configured cap 2j <= {cap}")]
    QuadratureOverflow { two_j: u32, cap: u32 },

    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("parameter vector has length {found}, expected {expected}")]
    BadLength { expected: usize, found: usize },

    #[error("objective returned a non-finite value")]
    NonFiniteObjective,

    #[error("|alpha|^2 = {alpha_sq} exceeds the truncation limit {limit}")]
    AlphaTooLargeForTruncation { alpha_sq: f64, limit: f64 },

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("ordering parameter s = {0} is outside [0, 1)")]
    BadOrderingParam(f64),

    #[error("truncation leakage {leakage:e} exceeds the budget {budget:e}")]
    ExcessiveLeakage { leakage: f64, budget: f64 },
}
