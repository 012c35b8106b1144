use thiserror::Error;

/// Errors produced by the history-vector machinery.
#[derive(Debug, Error)]
pub enum HistoryError {
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state is not normalized: norm = {0}")]
    NotNormalized(f64),
    #[error("operator is not unitary (max |U\u{2020}U - I| = {0:.3e})")]
    NotUnitary(f64),
    #[error("operator is not Hermitian (max |M - M\u{2020}| = {0:.3e})")]
    NotHermitian(f64),
    #[error("unknown axis label '{0}'")]
    UnknownLabel(String),
    #[error("duplicate axis label '{0}'")]
    DuplicateLabel(String),
    #[error("trivial bipartition: one side of the cut is empty")]
    TrivialCut,
    #[error("eigenvectors are not orthonormal (max residual {0:.3e})")]
    NotOrthonormal(f64),
    #[error("projector set is not orthogonal and complete (max residual {0:.3e})")]
    BadProjectorSet(f64),
    #[error("outcome index {index} out of range for slot {slot} (dim {dim})")]
    OutcomeOutOfRange { slot: usize, index: usize, dim: usize },
    #[error("spec has {evolutions} evolutions but {measurements} measurements")]
    LengthMismatch { evolutions: usize, measurements: usize },
    #[error("operation requires rank-1 measurements, slot {0} has a degenerate projector set")]
    DegenerateMeasurement(usize),
    #[error("enumeration of {total} sequences exceeds the cap of {cap}")]
    EnumerationCap { total: usize, cap: usize },
    #[error("empty slot selection")]
    EmptyKeep,
    #[error("slot index {0} out of range (n = {1})")]
    SlotOutOfRange(usize, usize),
    #[error("ensemble weights sum to {0}, expected 1")]
    BadWeights(f64),
    #[error("empty ensemble")]
    EmptyEnsemble,
    #[error("not a density matrix: eigenvalue {0:.3e} below tolerance")]
    NotPositive(f64),
    #[error("postselection impossible: normalization is zero")]
    ZeroPostselection,
    #[error("observable must have eigenvalues +1 and -1, got {0:?}")]
    NotDichotomic(Vec<f64>),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, HistoryError>;
