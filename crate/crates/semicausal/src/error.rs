//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("matrix is not Hermitian: asymmetry ‖M − M†‖_F = {asymmetry:.3e} exceeds {tol:.3e}")]
    NotHermitian { asymmetry: f64, tol: f64 },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("Choi matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("map is not subunital: ‖E(1)‖ exceeds 1 by {excess:.3e}")]
    NotSubunital { excess: f64 },

    #[error("Kraus set is empty")]
    EmptyKrausSet,

    #[error("orthonormalization failed: column {col} has norm {norm:.3e} after projection")]
    RankDeficient { col: usize, norm: f64 },

    #[error("dilation is not minimal: span rank {rank} < required {required}")]
    NotMinimal { rank: usize, required: usize },

    #[error("dilations do not realize the same map: Choi distance {distance:.3e} exceeds {tol:.3e}")]
    DilationMismatch { distance: f64, tol: f64 },

    #[error("operator does not commute with a⊗1: intertwining residual {residual:.3e} exceeds {tol:.3e}")]
    NotIntertwining { residual: f64, tol: f64 },

    #[error("operator is not an isometry: ‖U†U − 1‖_F = {defect:.3e} exceeds {tol:.3e}")]
    NotIsometry { defect: f64, tol: f64 },

    #[error("map is not semicausal: residual {residual:.3e} exceeds {tol:.3e}")]
    NotSemicausal { residual: f64, tol: f64 },

    #[error("unknown corpus example {name:?}")]
    UnknownExample { name: String },

    #[error("Kraus rank {requested} out of range [1, {max}] for a {din} → {dout} map")]
    KrausRankOutOfRange {
        requested: usize,
        max: usize,
        din: usize,
        dout: usize,
    },

    #[error("cannot build a unital channel: {kraus_rank} Kraus operators of shape {dout}×{din} span at most rank {kraus_rank}·{dout} < {din}")]
    UnitalInfeasible {
        kraus_rank: usize,
        din: usize,
        dout: usize,
    },

    #[error("{0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
