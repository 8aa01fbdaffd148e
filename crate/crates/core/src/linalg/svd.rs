//! One-sided (Hestenes) Jacobi SVD for dense complex matrices.
//!
//! Column pairs are rotated until mutually orthogonal; the accumulated
//! rotations form the right singular vectors. The method keeps high relative
//! accuracy for matrices of the form `B·D` with `B` well conditioned and `D`
//! diagonal, which is exactly the structure of the weighted-norm transforms.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::{frobenius, ComplexMatrix, ComplexVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 80;

/// Thin SVD `A = U·diag(σ)·V*`, singular values sorted descending.
#[derive(Debug, Clone)]
pub struct Svd<T: Real> {
    pub singular_values: Vec<T>,
    /// Left singular vectors as columns; a column is zero when its singular
    /// value is exactly zero.
    pub u: ComplexMatrix<T>,
    /// Right singular vectors as columns.
    pub v: ComplexMatrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn sigma_max(&self) -> T {
        self.singular_values[0]
    }

    pub fn sigma_min(&self) -> T {
        *self.singular_values.last().expect("non-empty")
    }

    /// Right singular vector belonging to the largest singular value.
    pub fn top_right_vector(&self) -> ComplexVector<T> {
        self.v.column(0)
    }
}

pub fn jacobi_svd<T: Real>(a: &ComplexMatrix<T>) -> Result<Svd<T>> {
    let n = a.dim();
    // column-major working copies
    let mut g: Vec<Vec<Complex<T>>> = (0..n).map(|j| a.column(j).into_raw()).collect();
    let mut v: Vec<Vec<Complex<T>>> = (0..n)
        .map(|j| {
            let mut e = vec![Complex::zero(); n];
            e[j] = Complex::one();
            e
        })
        .collect();

    let threshold = T::epsilon() * T::from_usize_lossy(n.max(2));
    // a column this far below its partner is rounding noise and cannot be
    // made orthogonal to it
    let floor = {
        let f = T::lit(16.0) * threshold;
        f * f
    };
    let mut converged = n == 1;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                routine: "jacobi_svd",
                iterations: sweeps,
                estimate: g.iter().map(|c| frobenius(c).as_f64()).fold(0.0, f64::max),
            });
        }
        sweeps += 1;
        converged = true;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (gp, gq) = (&g[p], &g[q]);
                    let alpha = gp.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                    let beta = gq.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                    let gamma = gp
                        .iter()
                        .zip(gq)
                        .fold(Complex::zero(), |s: Complex<T>, (x, y)| s + x.conj() * y);
                    (alpha, beta, gamma)
                };
                let gabs = gamma.norm();
                if gabs.is_zero()
                    || gabs <= threshold * (alpha * beta).sqrt()
                    || alpha.min(beta) <= floor * alpha.max(beta)
                {
                    continue;
                }
                converged = false;
                let two = T::lit(2.0);
                let zeta = (beta - alpha) / (two * gabs);
                let tan = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + tan * tan).sqrt();
                let s = c * tan;
                let phase = (gamma / gabs).conj();
                rotate(&mut g, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
    }

    let mut order: Vec<(T, usize)> = g.iter().enumerate().map(|(j, c)| (frobenius(c), j)).collect();
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));

    let singular_values: Vec<T> = order.iter().map(|&(s, _)| s).collect();
    let u = ComplexMatrix::from_fn(n, |i, k| {
        let (s, j) = order[k];
        if s.is_zero() {
            Complex::zero()
        } else {
            g[j][i] / s
        }
    })?;
    let vm = ComplexMatrix::from_fn(n, |i, k| v[order[k].1][i])?;
    Ok(Svd {
        singular_values,
        u,
        v: vm,
    })
}

/// `[x_p, x_q] ← [c·x_p − s·φ·x_q, s·x_p + c·φ·x_q]`, φ a unit phase.
fn rotate<T: Real>(cols: &mut [Vec<Complex<T>>], p: usize, q: usize, c: T, s: T, phase: Complex<T>) {
    let (left, right) = cols.split_at_mut(q);
    let xp = &mut left[p];
    let xq = &mut right[0];
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let bq = *b * phase;
        let ap = *a;
        *a = ap * c - bq * s;
        *b = ap * s + bq * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn reconstructs_small_complex_matrix() {
        let a = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 2.0), c(0.5, -1.0), c(0.0, 0.3)],
            vec![c(-2.0, 0.1), c(3.0, 0.0), c(1.0, 1.0)],
            vec![c(0.2, 0.2), c(-0.7, 0.4), c(2.0, -3.0)],
        ])
        .unwrap();
        let svd = jacobi_svd(&a).unwrap();
        let sigma =
            ComplexMatrix::from_diagonal(&svd.singular_values.iter().map(|&s| c(s, 0.0)).collect::<Vec<_>>()).unwrap();
        let back = svd.u.mat_mul(&sigma).unwrap().mat_mul(&svd.v.adjoint()).unwrap();
        let err = back.sub(&a).unwrap().frobenius_norm() / a.frobenius_norm();
        assert!(err < 1e-14, "reconstruction error {err}");
        assert!(svd.v.unitarity_defect() < 1e-14);
        assert!(svd.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn graded_columns_keep_relative_accuracy() {
        // diag(1, 1e-10, 1e-20) times a rotation: tiny singular values are exact
        let theta: f64 = 0.3;
        let r = ComplexMatrix::<f64>::from_real_rows(&[
            &[theta.cos(), -theta.sin(), 0.0],
            &[theta.sin(), theta.cos(), 0.0],
            &[0.0, 0.0, 1.0],
        ])
        .unwrap();
        let d = ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 1e-10, 0.0], &[0.0, 0.0, 1e-20]]).unwrap();
        let svd = jacobi_svd(&r.mat_mul(&d).unwrap()).unwrap();
        for (got, want) in svd.singular_values.iter().zip([1.0f64, 1e-10, 1e-20]) {
            assert!((got - want).abs() / want < 1e-14, "{got} vs {want}");
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn noise_columns_do_not_stall() {
        let a = ComplexMatrix::<f64>::from_real_rows(&[
            &[
                0.0,
                -1.1102230246251565e-16,
                -5.4144929129679768e-2,
                -2.2318996310458852e-17,
            ],
            &[0.0, 0.0, -1.2183251951559769e-1, -3.5188188631703421e-17],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        let svd = jacobi_svd(&a).unwrap();
        let want = (5.4144929129679768e-2f64.powi(2) + 1.2183251951559769e-1f64.powi(2)).sqrt();
        assert!((svd.sigma_max() - want).abs() <= 1e-15 * want);
    }

    #[test]
    fn zero_matrix() {
        let svd = jacobi_svd(&ComplexMatrix::<f64>::zeros(3)).unwrap();
        assert!(svd.singular_values.iter().all(|&s| s == 0.0));
    }
}
