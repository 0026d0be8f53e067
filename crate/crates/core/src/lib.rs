//! Local-unitary stabilizer Lie algebras of n-qubit mixed states.
//!
//! A mixed state ρ on n qubits is stabilized by the subalgebra
//! K(ρ) = { M ∈ ⊕ⁿ su(2) : [M, ρ] = 0 } of the local algebra. This crate
//! computes an orthonormal basis of K(ρ) from the Pauli expansion of ρ,
//! decomposes any bracket-closed subalgebra of ⊕ⁿ su(2) into its su(2)
//! blocks, abelian part, and null qubits, and classifies permutation
//! invariant states by stabilizer type, producing canonical forms and
//! deciding local-unitary equivalence with an explicit verified witness.
//!
//! ```
//! use lustab::{states, stabilizer, Complex64, Tolerances};
//!
//! let rho = states::ghz_rho(3, Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)).unwrap();
//! let (basis, _diag) = stabilizer::stabilizer_basis(&rho, &Tolerances::default()).unwrap();
//! assert_eq!(basis.dim(), 2);
//! ```

pub mod classify;
pub mod error;
pub mod pauli;
pub mod stabilizer;
pub mod states;
pub mod su2;
pub mod sympoly;

pub use classify::{
    canonical_form, check_diag_antidiag, classify, data_close, lu_equivalent, twin_of,
    CanonicalData, CanonicalForm, ClassTag, Classification, DiagAntidiagReport, EquivOutcome,
    FactorCheck, FactorForm,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use pauli::{DenseHermitian, PauliIndex, PauliOperator};
pub use stabilizer::{
    decompose_algebra, projection_dim, stabilizer_basis, verify_block_relations, weight,
    AlgebraBasis, Block, BlockDecomposition, BlockRelationReport, BlockRelations, RankDiagnostics,
};
pub use su2::{ad_action, eta_coeffs, phi, su2_from_rotation, zeta_coeffs};
pub use su2::{LocalAlgebraElement, LocalUnitary, Su2, Unitary2};
pub use sympoly::{f_n, f_n_inv, r_g, r_rotation, symmetrize, Polynomial3, SymmetricState};

/// Largest qubit count the dense transforms and engines accept.
pub const MAX_QUBITS: usize = 10;

/// Numerical thresholds used throughout. Every rank or residual decision in
/// the crate goes through one of these fields; nothing is hard-coded inline.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// General-purpose numerical tolerance for residuals and comparisons.
    pub num: f64,
    /// Allowed Hermiticity defect when reading a dense matrix.
    pub herm: f64,
    /// Coefficients with absolute value below this are dropped from sparse maps.
    pub sparse: f64,
    /// Allowed orthonormality defect of returned bases.
    pub orth: f64,
    /// Allowed unitarity defect of 2x2 factors.
    pub unit: f64,
    /// Singular values below rank_rel * sigma_max count as zero.
    pub rank_rel: f64,
    /// Required ratio between the last retained and first discarded singular value.
    pub rank_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            num: 1e-9,
            herm: 1e-10,
            sparse: 1e-12,
            orth: 1e-8,
            unit: 1e-9,
            rank_rel: 1e-7,
            rank_gap: 1e3,
        }
    }
}
