//! Dense complex matrix arithmetic and baseline spectral quantities.

mod matrix;
mod spectral;
mod svd;

pub use matrix::{ComplexMatrix, ComplexVector};
pub use spectral::{condition_number_2, spectral_norm, spectral_radius_gelfand, FULL_SVD_MAX_DIM};
pub use svd::{jacobi_svd, Svd};

pub(crate) use matrix::frobenius;
