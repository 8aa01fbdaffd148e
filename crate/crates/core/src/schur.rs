//! Complex Schur decomposition `A = U*·Δ·U` via Householder reduction to
//! Hessenberg form followed by single-shift QR iteration with Wilkinson shifts.
//!
//! The stored `U` follows the convention `Δ = U·A·U*`; a textbook
//! decomposition `A = Q·T·Q*` maps onto it with `U = Q*`.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::{real, Real};

/// Per-eigenvalue sweep budget used by [`schur`] and [`eigenvalues`].
pub const DEFAULT_MAX_SWEEPS: usize = 30;

const EXCEPTIONAL_SHIFT_PERIOD: usize = 10;

#[derive(Debug, Clone)]
pub struct SchurDecomposition<T: Real> {
    /// Unitary factor with `A = U*·Δ·U`.
    pub u: ComplexMatrix<T>,
    /// Upper triangular factor; its diagonal carries the eigenvalues.
    pub delta: ComplexMatrix<T>,
    /// `‖A − U*ΔU‖_F / max(1, ‖A‖_F)`.
    pub residual: T,
    /// `‖UU* − I‖_F`.
    pub unitarity_defect: T,
    /// Number of QR steps taken.
    pub steps: usize,
}

impl<T: Real> SchurDecomposition<T> {
    pub fn spectrum(&self) -> Spectrum<T> {
        Spectrum::from_diagonal(self.delta.diagonal())
    }
}

/// Eigenvalues in the order they appear on `diag(Δ)`, plus the spectral radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T: Real> {
    pub eigenvalues: Vec<Complex<T>>,
    pub rho: T,
}

impl<T: Real> Spectrum<T> {
    fn from_diagonal(eigenvalues: Vec<Complex<T>>) -> Self {
        let rho = eigenvalues.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        Self { eigenvalues, rho }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SchurError<T: Real> {
    /// The iteration budget ran out; `partial` holds the current iterate, whose
    /// `delta` still has unreduced subdiagonal entries.
    #[error("shifted QR iteration did not converge after {steps} steps")]
    NoConvergence {
        steps: usize,
        partial: Box<SchurDecomposition<T>>,
    },
    #[error(transparent)]
    Invalid(#[from] Error),
}

impl<T: Real> From<SchurError<T>> for Error {
    fn from(e: SchurError<T>) -> Self {
        match e {
            SchurError::NoConvergence { steps, partial } => Error::QrNoConvergence {
                steps,
                residual: partial.residual.as_f64(),
            },
            SchurError::Invalid(e) => e,
        }
    }
}

/// Householder reduction `A = Q·H·Q*` with `H` upper Hessenberg.
///
/// Columns whose entries below the subdiagonal are already zero are left
/// untouched, so triangular and 2×2 inputs come back as `(I, A)`.
pub fn hessenberg_reduce<T: Real>(a: &ComplexMatrix<T>) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let n = a.dim();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    if n < 3 {
        return (q, h);
    }
    let two = T::lit(2.0);
    for k in 0..n - 2 {
        let x: Vec<Complex<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let tail = crate::linalg::frobenius(&x[1..]);
        if tail.is_zero() {
            continue;
        }
        let xnorm = crate::linalg::frobenius(&x);
        let x0 = x[0];
        let phase = if x0.is_zero() { Complex::one() } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] = v[0] - alpha;
        let vnorm2 = v.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
        let tau = two / vnorm2;

        // H ← (I − τvv*)·H
        for j in 0..n {
            let s = v.iter().enumerate().fold(Complex::zero(), |acc: Complex<T>, (l, vl)| {
                acc + vl.conj() * h[(k + 1 + l, j)]
            });
            let s = s * tau;
            for (l, vl) in v.iter().enumerate() {
                h[(k + 1 + l, j)] = h[(k + 1 + l, j)] - *vl * s;
            }
        }
        // H ← H·(I − τvv*), Q ← Q·(I − τvv*)
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let s = v.iter().enumerate().fold(Complex::zero(), |acc: Complex<T>, (l, vl)| {
                    acc + m[(i, k + 1 + l)] * *vl
                });
                let s = s * tau;
                for (l, vl) in v.iter().enumerate() {
                    m[(i, k + 1 + l)] = m[(i, k + 1 + l)] - s * vl.conj();
                }
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = Complex::zero();
        }
    }
    (q, h)
}

/// Schur decomposition with default deflation tolerance and sweep budget.
pub fn schur<T: Real>(a: &ComplexMatrix<T>) -> Result<SchurDecomposition<T>, SchurError<T>> {
    schur_decompose(a, T::DEFAULT_TOL, DEFAULT_MAX_SWEEPS)
}

/// Complex Schur decomposition in the `A = U*·Δ·U` convention.
///
/// A subdiagonal entry is deflated once it falls below `tol·‖A‖_F` or below
/// machine precision relative to its diagonal neighbours. The iteration
/// budget is `max_sweeps·n²` QR steps.
pub fn schur_decompose<T: Real>(
    a: &ComplexMatrix<T>,
    tol: T,
    max_sweeps: usize,
) -> Result<SchurDecomposition<T>, SchurError<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument("deflation tolerance must be positive".into()).into());
    }
    if max_sweeps == 0 {
        return Err(Error::InvalidArgument("max_sweeps must be positive".into()).into());
    }
    let n = a.dim();
    qr_iterate(a, tol, max_sweeps * n * n)
}

pub(crate) fn qr_iterate<T: Real>(
    a: &ComplexMatrix<T>,
    tol: T,
    budget: usize,
) -> Result<SchurDecomposition<T>, SchurError<T>> {
    let n = a.dim();
    let (mut z, mut t) = hessenberg_reduce(a);
    let abs_tol = tol * a.frobenius_norm();
    let eps = T::epsilon();
    let mut steps = 0usize;
    let mut since_deflation = 0usize;

    let mut hi = n - 1;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = t[(l, l - 1)].norm();
            let local = t[(l - 1, l - 1)].norm() + t[(l, l)].norm();
            if sub <= abs_tol || sub <= eps * local {
                t[(l, l - 1)] = Complex::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if steps >= budget {
            let partial = finish(a, z, t, steps);
            return Err(SchurError::NoConvergence {
                steps,
                partial: Box::new(partial),
            });
        }
        steps += 1;
        since_deflation += 1;

        let shift = if since_deflation.is_multiple_of(EXCEPTIONAL_SHIFT_PERIOD) {
            t[(hi, hi)] + real(T::lit(0.75) * t[(hi, hi - 1)].re.abs())
        } else {
            wilkinson_shift(t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi - 1)], t[(hi, hi)])
        };

        for k in l..hi {
            let (x, y) = if k == l {
                (t[(l, l)] - shift, t[(l + 1, l)])
            } else {
                (t[(k, k - 1)], t[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            let first_col = if k > l { k - 1 } else { l };
            for j in first_col..n {
                let (p, q) = (t[(k, j)], t[(k + 1, j)]);
                t[(k, j)] = p * c + s * q;
                t[(k + 1, j)] = q * c - s.conj() * p;
            }
            let last_row = (k + 2).min(hi);
            rotate_columns(&mut t, k, c, s, last_row + 1);
            rotate_columns(&mut z, k, c, s, n);
            if k > l {
                t[(k + 1, k - 1)] = Complex::zero();
            }
        }
    }

    Ok(finish(a, z, t, steps))
}

/// Eigenvalues read off the Schur diagonal.
pub fn eigenvalues<T: Real>(a: &ComplexMatrix<T>) -> Result<Spectrum<T>, SchurError<T>> {
    Ok(schur(a)?.spectrum())
}

fn finish<T: Real>(
    a: &ComplexMatrix<T>,
    z: ComplexMatrix<T>,
    delta: ComplexMatrix<T>,
    steps: usize,
) -> SchurDecomposition<T> {
    let u = z.adjoint();
    let back = z.mat_mul(&delta).and_then(|m| m.mat_mul(&u)).expect("equal dimensions");
    let residual = back.sub(a).expect("equal dimensions").frobenius_norm() / T::one().max(a.frobenius_norm());
    let unitarity_defect = u.unitarity_defect();
    SchurDecomposition {
        u,
        delta,
        residual,
        unitarity_defect,
        steps,
    }
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    let delta = (a - d) * half;
    let bc = b * c;
    let disc = (delta * delta + bc).sqrt();
    let (p, m) = (delta + disc, delta - disc);
    let denom = if p.norm() >= m.norm() { p } else { m };
    if denom.is_zero() {
        d
    } else {
        d - bc / denom
    }
}

/// Rotation `G = [[c, s], [−s̄, c]]` with `G·[x, y]ᵀ = [r, 0]ᵀ`.
fn givens<T: Real>(x: Complex<T>, y: Complex<T>) -> (T, Complex<T>) {
    if y.is_zero() {
        return (T::one(), Complex::zero());
    }
    if x.is_zero() {
        return (T::zero(), Complex::one());
    }
    let ax = x.norm();
    let r = ax.hypot(y.norm());
    let c = ax / r;
    let s = (x / ax) * y.conj() / r;
    (c, s)
}

/// Right-multiplies columns `k, k+1` by `G*` for rows `0..rows`.
fn rotate_columns<T: Real>(m: &mut ComplexMatrix<T>, k: usize, c: T, s: Complex<T>, rows: usize) {
    for i in 0..rows {
        let (p, q) = (m[(i, k)], m[(i, k + 1)]);
        m[(i, k)] = p * c + q * s.conj();
        m[(i, k + 1)] = q * c - p * s;
    }
}
