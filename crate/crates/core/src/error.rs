//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building operators, computing
/// stabilizers, or classifying states.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("qubit count mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds {limit:.3e}")]
    HermiticityViolation { defect: f64, limit: f64 },

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("state is not normalized: |sum of weights - 1| = {deficit:.3e}")]
    NotNormalized { deficit: f64 },

    #[error("operator is not permutation invariant: orbit spread {spread:.3e} exceeds {limit:.3e}")]
    NotSymmetric { spread: f64, limit: f64 },

    #[error("degree {degree} too high for {n} qubits")]
    DegreeTooHigh { degree: usize, n: usize },

    #[error("qubit count {n} exceeds supported maximum {max}")]
    ResourceLimit { n: usize, max: usize },

    #[error("matrix is not a proper rotation: orthogonality defect {defect:.3e}, det {det:.4}")]
    NotRotation { defect: f64, det: f64 },

    #[error("projection onto qubit {qubit} has rank 2; a bracket-closed algebra cannot do that")]
    Rank2Anomaly { qubit: usize },

    #[error("basis is not closed under the bracket: residual {residual:.3e}")]
    NotClosed { residual: f64 },

    #[error("singular value gap {gap:.3e} below required {required:.1e}; rank decision unreliable")]
    IllConditioned { gap: f64, required: f64 },

    #[error("per-qubit projection dims {dims:?} are not uniform; symmetric input cannot do that")]
    NonUniformProjections { dims: Vec<usize> },

    #[error("stabilizer shape (projection {proj}, dim {dim}) matches no class at n = {n}")]
    UnclassifiableDimension { n: usize, dim: usize, proj: usize },

    #[error("zero stabilizer admits no canonical form")]
    ZeroClassUnsupported,

    #[error("canonical basis expansion leaves residual {residual:.3e}")]
    BasisExpansionResidual { residual: f64 },

    #[error("assembled witness fails verification: residual {residual:.3e}")]
    WitnessVerification { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
