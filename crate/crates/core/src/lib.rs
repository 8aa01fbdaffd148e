//! Weighted spectral norms that approximate the spectral radius of a complex
//! square matrix to any prescribed accuracy, with verifiable certificates and
//! a consensus harness that uses them as contraction certificates.
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contraction;
pub mod error;
pub mod io;
pub mod linalg;
pub mod norm;
pub mod random;
pub mod scalar;
pub mod schur;

pub use error::{Error, Result};
pub use linalg::{condition_number_2, spectral_norm, spectral_radius_gelfand, ComplexMatrix, ComplexVector};
pub use norm::{
    construct_norm, construct_norm_with, matrix_norm, offdiagonal_part, scaled_triangular, scaling_matrix, select_t,
    vector_norm, verify_certificate, NormCertificate, NormOptions, ScalingMatrix, WeightedNorm,
};
pub use scalar::{ComplexScalar, Real};
pub use schur::{eigenvalues, hessenberg_reduce, schur, schur_decompose, SchurDecomposition, SchurError, Spectrum};

/// Double precision complex scalar.
pub type C64 = num_complex::Complex<f64>;
pub type Matrix = ComplexMatrix<f64>;
pub type Vector = ComplexVector<f64>;
pub type Schur = SchurDecomposition<f64>;
pub type Norm = WeightedNorm<f64>;
pub type Certificate = NormCertificate<f64>;

/// Single precision variants.
pub type Matrix32 = ComplexMatrix<f32>;
pub type Vector32 = ComplexVector<f32>;
pub type Norm32 = WeightedNorm<f32>;
