//! Seeded random matrices and vectors used by tests, the acceptance suite and
//! the CLI harness.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::scalar::{cplx, real, Real};

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R, sd: f64) -> Complex<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    cplx(T::lit(sd * re), T::lit(sd * im))
}

/// Matrix with independent complex Gaussian entries whose real and imaginary
/// parts have standard deviation `sd`.
///
/// With `sd = 1/√(2n)` each entry has unit-variance magnitude `1/n` and the
/// spectrum fills the unit disk for large `n`.
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(n: usize, sd: f64, rng: &mut R) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(n, |_, _| gaussian(rng, sd)).expect("finite gaussian samples")
}

/// Complex Gaussian matrix normalized so that the expected spectral radius is
/// close to one.
pub fn ginibre<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    complex_gaussian(n, (0.5 / n as f64).sqrt(), rng)
}

pub fn complex_gaussian_vector<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexVector<T> {
    ComplexVector::new((0..n).map(|_| gaussian(rng, 1.0)).collect()).expect("finite gaussian samples")
}

pub fn real_gaussian_vector<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexVector<T> {
    ComplexVector::new(
        (0..n)
            .map(|_| {
                let x: f64 = StandardNormal.sample(rng);
                real(T::lit(x))
            })
            .collect(),
    )
    .expect("finite gaussian samples")
}

/// Haar-distributed unitary matrix: Gram–Schmidt (applied twice) on the
/// columns of a complex Gaussian matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g = complex_gaussian::<T, R>(n, 1.0, rng);
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v: Vec<Complex<T>> = (0..n).map(|i| g[(i, j)]).collect();
        for _ in 0..2 {
            for q in &cols {
                let proj = q
                    .iter()
                    .zip(&v)
                    .fold(Complex::new(T::zero(), T::zero()), |s, (a, b)| s + a.conj() * b);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi = *vi - *qi * proj;
                }
            }
        }
        let norm = crate::linalg::frobenius(&v);
        for vi in v.iter_mut() {
            *vi = *vi / norm;
        }
        cols.push(v);
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i]).expect("finite")
}

/// `S = Q·diag(σ)·Q'` with singular values spread log-uniformly between 1 and
/// `kappa`, so `κ₂(S) = kappa` exactly in exact arithmetic.
pub fn conditioned_matrix<T: Real, R: Rng + ?Sized>(n: usize, kappa: f64, rng: &mut R) -> ComplexMatrix<T> {
    let q1 = random_unitary::<T, R>(n, rng);
    let q2 = random_unitary::<T, R>(n, rng);
    let sigma: Vec<Complex<T>> = (0..n)
        .map(|i| {
            let frac = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
            real(T::lit(kappa.powf(frac)))
        })
        .collect();
    let d = ComplexMatrix::from_diagonal(&sigma).expect("finite");
    q1.mat_mul(&d).and_then(|m| m.mat_mul(&q2)).expect("equal dimensions")
}

/// `Q·diag(λ)·Q*` for a Haar unitary `Q`.
pub fn normal_matrix<T: Real, R: Rng + ?Sized>(diag: &[Complex<T>], rng: &mut R) -> ComplexMatrix<T> {
    let q = random_unitary::<T, R>(diag.len(), rng);
    let d = ComplexMatrix::from_diagonal(diag).expect("finite diagonal");
    q.mat_mul(&d)
        .and_then(|m| m.mat_mul(&q.adjoint()))
        .expect("equal dimensions")
}
