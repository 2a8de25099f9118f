//! A desk-scale laboratory for finite-dimensional Banach algebras: certified
//! approximate diagonals for algebras of vector-valued functions on finite
//! metric spaces, exact diagonals for standard families, and derivation
//! spaces for weak-amenability experiments.
//!
//! Everything is generic over the scalar field through [`Scalar`], with f64
//! (real mode) and [`Complex64`] (complex mode) as the two instances. The
//! aliases at the crate root fix the common concrete choices.

pub mod algebra;
pub mod derivations;
pub mod diagonal;
pub mod error;
pub mod input;
pub mod linalg;
pub mod lp;
pub mod scalar;
pub mod space;
pub mod tensor;

pub use algebra::{AlgebraElement, AlgebraHandle, FiniteBanachAlgebra, NormKind};
pub use derivations::{
    derivation_space, dual_bimodule, inner_derivation_span_dim, leibniz_defect, tilde_extension,
    weak_amenability_transfer_check, weakly_amenable_commutative, DerivationSpace, DualBimodule,
    TildeExtension, TransferReport,
};
pub use diagonal::{
    exact_diagonal_group, exact_diagonal_matrix, exact_diagonal_sup, lift_central,
    lift_elementary, lift_general, pushforward_diagonal, verify_diagonal, DiagonalCertificate,
    DiagonalRequest, ElementReport, Schedule,
};
pub use error::{Error, Result};
pub use input::{
    coeffs_from_values, coeffs_to_value, scalar_from_value, scalar_to_value, AlgebraSpec,
    FunctionSpec, GeneratedFunctions, SpaceSpec, TermSpec,
};
pub use lp::norm_exact_lp;
pub use num_complex::Complex64;
pub use scalar::{Scalar, ScalarField};
pub use space::{
    ball_cover, elementary_approximation, oscillation, partition_of_unity, pou_commutator_bound,
    sqrt_diagonal, CompactSpaceModel, Cover, ElementaryApproximation, PartitionOfUnity,
};
pub use tensor::{DecomposedTensor, GrothendieckConstant};

/// Real-mode algebra handle.
pub type RealAlgebra = AlgebraHandle<f64>;
/// Complex-mode algebra handle.
pub type ComplexAlgebra = AlgebraHandle<Complex64>;
/// Real-mode element.
pub type RealElement = AlgebraElement<f64>;
/// Complex-mode element.
pub type ComplexElement = AlgebraElement<Complex64>;
