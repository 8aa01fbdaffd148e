use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{is_finite, real, Real};

/// Dense square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    n: usize,
    data: Vec<Complex<T>>,
}

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector<T: Real> {
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn from_row_major(n: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        if !data.iter().all(is_finite) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            data.extend(row);
        }
        Self::from_row_major(n, data)
    }

    /// Convenience constructor for real-valued matrices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| real(T::lit(x))).collect())
                .collect(),
        )
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix dimension must be at least 1");
        Self {
            n,
            data: vec![Complex::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex<T>]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Empty);
        }
        if !diag.iter().all(is_finite) {
            return Err(Error::NonFinite);
        }
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        Ok(m)
    }

    /// Builds a matrix entry by entry. Non-finite entries are rejected.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Result<Self> {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self::from_row_major(n, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> ComplexVector<T> {
        ComplexVector {
            data: (0..self.n).map(|i| self[(i, j)]).collect(),
        }
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(is_finite)
    }

    /// Complex matrix product `self · rhs`.
    pub fn mat_mul(&self, rhs: &Self) -> Result<Self> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: rhs.n,
            });
        }
        let n = self.n;
        let mut out = vec![Complex::zero(); n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(Self { n, data: out })
    }

    pub fn mul_vec(&self, x: &ComplexVector<T>) -> Result<ComplexVector<T>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let data = (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x.as_slice())
                    .fold(Complex::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect();
        Ok(ComplexVector { data })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(self.data[j * n + i].conj());
            }
        }
        Self { n, data }
    }

    pub fn frobenius_norm(&self) -> T {
        frobenius(&self.data)
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.n).fold(Complex::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(usize, usize, Complex<T>) -> Complex<T>) -> Self {
        let n = self.n;
        Self {
            n,
            data: self.data.iter().enumerate().map(|(k, &a)| f(k / n, k % n, a)).collect(),
        }
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Result<Self> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: rhs.n,
            });
        }
        Ok(Self {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Largest magnitude strictly below the diagonal.
    pub fn max_lower_magnitude(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.n {
            for j in 0..i {
                m = m.max(self[(i, j)].norm());
            }
        }
        m
    }

    /// Frobenius norm of the strict upper triangle.
    pub fn strict_upper_frobenius(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            for j in i + 1..self.n {
                acc = acc + self[(i, j)].norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `‖A·A* − I‖_F`.
    pub fn unitarity_defect(&self) -> T {
        let g = self
            .mat_mul(&self.adjoint())
            .expect("square product of equal dimensions");
        g.sub(&Self::identity(self.n))
            .expect("equal dimensions")
            .frobenius_norm()
    }

    pub fn cast<U: Real>(&self) -> ComplexMatrix<U> {
        ComplexMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64())))
                .collect(),
        }
    }
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Real> ComplexVector<T> {
    pub fn new(data: Vec<Complex<T>>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Empty);
        }
        if !data.iter().all(is_finite) {
            return Err(Error::NonFinite);
        }
        Ok(Self { data })
    }

    pub fn from_real(values: &[T]) -> Result<Self> {
        Self::new(values.iter().map(|&x| real(x)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "vector dimension must be at least 1");
        Self {
            data: vec![Complex::zero(); n],
        }
    }

    pub fn ones(n: usize) -> Self {
        assert!(n > 0, "vector dimension must be at least 1");
        Self {
            data: vec![Complex::one(); n],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn norm2(&self) -> T {
        frobenius(&self.data)
    }

    /// Conjugate-linear in `self`: returns `self* · other`.
    pub fn dot(&self, other: &Self) -> Complex<T> {
        self.data
            .iter()
            .zip(&other.data)
            .fold(Complex::zero(), |acc, (&a, &b)| acc + a.conj() * b)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_len(rhs)?;
        Ok(Self {
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_len(rhs)?;
        Ok(Self {
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        })
    }

    fn check_len(&self, rhs: &Self) -> Result<()> {
        if self.len() != rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: rhs.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn from_raw(data: Vec<Complex<T>>) -> Self {
        Self { data }
    }

    pub(crate) fn into_raw(self) -> Vec<Complex<T>> {
        self.data
    }
}

impl<T: Real> Index<usize> for ComplexVector<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, i: usize) -> &Complex<T> {
        &self.data[i]
    }
}

/// Scaled two-norm of a slice of complex numbers; safe against overflow in
/// the squares.
pub(crate) fn frobenius<T: Real>(xs: &[Complex<T>]) -> T {
    let scale = xs.iter().fold(T::zero(), |m, z| m.max(z.re.abs()).max(z.im.abs()));
    if scale.is_zero() || !scale.is_finite() {
        return scale;
    }
    let sum = xs.iter().fold(T::zero(), |acc, z| {
        let re = z.re / scale;
        let im = z.im / scale;
        acc + re * re + im * im
    });
    scale * sum.sqrt()
}
