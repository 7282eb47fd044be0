use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix contains a non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (relative defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("right-hand side is neither Hermitian nor anti-Hermitian (defects {hermitian:.3e} / {anti_hermitian:.3e})")]
    NoDefiniteSymmetry { hermitian: f64, anti_hermitian: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("eigenvalue {value:.6e} outside the domain of {function}")]
    DomainError { function: &'static str, value: f64 },

    #[error("singular pencil: eigenvalue pair sum {sum:.3e} below threshold")]
    SingularPencil { sum: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemiDefinite { min_eigenvalue: f64 },

    #[error("state is not strictly positive (min eigenvalue {min_eigenvalue:.3e})")]
    NotStrictlyPositive { min_eigenvalue: f64 },

    #[error("trace is not 1 (got {trace:.12})")]
    TraceNotOne { trace: f64 },

    #[error("purification norm tr(WW^dag) is not 1 (got {norm:.12})")]
    NotNormalized { norm: f64 },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("Hamiltonian singular after shift (min |eigenvalue| {min_abs_eigenvalue:.3e})")]
    SingularHamiltonian { min_abs_eigenvalue: f64 },

    #[error("matrix is not tangent (residual {residual:.3e})")]
    NotTangent { residual: f64 },

    #[error("tangent vectors are attached to different base points (separation {separation:.3e})")]
    BasePointMismatch { separation: f64 },

    #[error("purification does not project to the given density (defect {defect:.3e})")]
    BaseMismatch { defect: f64 },

    #[error("base point is not invertible (min singular value {sigma_min:.3e})")]
    SingularBase { sigma_min: f64 },

    #[error("frame construction degenerated: only {built} of {wanted} vectors")]
    DegenerateFrame { built: usize, wanted: usize },

    #[error("integration step too large: dt*|H| = {product:.3e} exceeds 0.5")]
    StepTooLarge { product: f64 },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
