//! Weighted spectral norms `‖M‖_P = ‖P·M·P⁻¹‖₂` with `P = D_t·U`, where
//! `A = U*·Δ·U` is a Schur decomposition of the source matrix and
//! `D_t = diag(t, t², …, tⁿ)`.
//!
//! Conjugating `Δ` by `D_t` multiplies its `(i, j)` entry by `t^(i−j)`, so for
//! large `t` the strict upper triangle fades and `‖A‖_P` approaches `ρ(A)`.
//! [`construct_norm`] picks the smallest `t` that brings the norm within `ε`
//! of the spectral radius and records the outcome in a [`NormCertificate`].

use num_complex::Complex;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{jacobi_svd, spectral_norm, spectral_radius_gelfand, ComplexMatrix, ComplexVector};
use crate::random::complex_gaussian_vector;
use crate::scalar::{real, Real};
use crate::schur::{schur_decompose, DEFAULT_MAX_SWEEPS};

/// Fraction of `ε` held back when choosing `t`.
pub const SELECTION_MARGIN: f64 = 0.01;
/// Relative width at which the bisection for `t` stops.
pub const BISECTION_PRECISION: f64 = 1e-3;
/// Squaring steps of the Gelfand cross-check run by [`verify_certificate`].
pub const VERIFY_GELFAND_K: u32 = 12;
/// Allowed disagreement between the Gelfand and Schur spectral radii,
/// relative to `max(1, ρ)`.
pub const GELFAND_AGREEMENT: f64 = 0.05;

/// `D_t = diag(t, t², …, tⁿ)`, kept symbolic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingMatrix<T: Real> {
    t: T,
    n: usize,
}

impl<T: Real> ScalingMatrix<T> {
    pub fn new(t: T, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        if !(t > T::zero()) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "scaling parameter t must be positive, got {t}"
            )));
        }
        let top = powi(t, n);
        let bottom = powi(t, 1).min(top);
        if !top.is_finite() || !(T::one() / bottom).is_finite() {
            return Err(Error::Overflow(format!(
                "t^{n} with t = {t} leaves the floating point range"
            )));
        }
        Ok(Self { t, n })
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Diagonal entry `i` (0-based), i.e. `t^(i+1)`.
    pub fn entry(&self, i: usize) -> T {
        powi(self.t, i + 1)
    }

    /// Entry `i` of `D_t⁻¹`, i.e. `t^−(i+1)`.
    pub fn inverse_entry(&self, i: usize) -> T {
        T::one() / self.entry(i)
    }

    pub fn inverse(&self) -> Result<Self> {
        Self::new(T::one() / self.t, self.n)
    }

    pub fn to_matrix(&self) -> ComplexMatrix<T> {
        let diag: Vec<_> = (0..self.n).map(|i| real(self.entry(i))).collect();
        ComplexMatrix::from_diagonal(&diag).expect("checked finite at construction")
    }
}

pub fn scaling_matrix<T: Real>(t: T, n: usize) -> Result<ScalingMatrix<T>> {
    ScalingMatrix::new(t, n)
}

#[inline]
fn powi<T: Real>(t: T, k: usize) -> T {
    t.powi(k as i32)
}

fn triangular_tolerance<T: Real>() -> T {
    T::DEFAULT_TOL * T::lit(100.0)
}

fn check_triangular<T: Real>(m: &ComplexMatrix<T>) -> Result<()> {
    let lower = m.max_lower_magnitude();
    if lower > triangular_tolerance::<T>() * m.frobenius_norm() {
        return Err(Error::NotTriangular {
            magnitude: lower.as_f64(),
        });
    }
    Ok(())
}

/// `D_t·Δ·D_t⁻¹` computed entrywise as `t^(i−j)·d_ij`.
///
/// Lower-triangle entries within the triangularity tolerance are dropped.
pub fn scaled_triangular<T: Real>(delta: &ComplexMatrix<T>, t: T) -> Result<ComplexMatrix<T>> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "scaling parameter t must be positive, got {t}"
        )));
    }
    check_triangular(delta)?;
    Ok(delta.map(|i, j, d| match i.cmp(&j) {
        std::cmp::Ordering::Less => d * t.powi(-((j - i) as i32)),
        std::cmp::Ordering::Equal => d,
        std::cmp::Ordering::Greater => Complex::zero(),
    }))
}

/// Strict upper triangle (`Δ̃ − Λ`).
pub fn offdiagonal_part<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    m.map(|i, j, d| if i < j { d } else { Complex::zero() })
}

/// Diagonal part `Λ`.
pub fn diagonal_part<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    m.map(|i, j, d| if i == j { d } else { Complex::zero() })
}

/// `‖δΔ̃(t)‖₂` for an upper triangular `Δ`.
pub fn offdiagonal_norm<T: Real>(delta: &ComplexMatrix<T>, t: T) -> Result<T> {
    spectral_norm(&offdiagonal_part(&scaled_triangular(delta, t)?), T::DEFAULT_TOL)
}

/// Smallest `t ≥ 1` (to bisection precision) with `‖δΔ̃(t)‖₂ < ε·(1 − margin)`,
/// returned with the achieved `‖δΔ̃(t)‖₂`. Uses the default conditioning cap.
pub fn select_t<T: Real>(delta: &ComplexMatrix<T>, epsilon: T) -> Result<(T, T)> {
    select_t_with(delta, epsilon, T::MAX_KAPPA)
}

pub fn select_t_with<T: Real>(delta: &ComplexMatrix<T>, epsilon: T, max_kappa: T) -> Result<(T, T)> {
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    check_triangular(delta)?;
    let n = delta.dim();
    let one = T::one();

    let upper = delta.strict_upper_frobenius();
    if upper <= T::DEFAULT_TOL * T::lit(1e-2) * delta.frobenius_norm() {
        return Ok((one, offdiagonal_norm(delta, one)?));
    }

    let target = epsilon * (one - T::lit(SELECTION_MARGIN));
    let at_one = offdiagonal_norm(delta, one)?;
    let (t, achieved) = if at_one < target {
        (one, at_one)
    } else {
        // for t ≥ 1: ‖δΔ̃(t)‖₂ ≤ ‖δΔ̃(t)‖_F ≤ ‖strict-upper(Δ)‖_F / t
        let mut hi = one.max(upper / target);
        let mut at_hi = offdiagonal_norm(delta, hi)?;
        let mut doublings = 0;
        while !(at_hi < target) {
            doublings += 1;
            if doublings > 64 || !hi.is_finite() {
                return Err(Error::Overflow(format!("no t reaches epsilon = {epsilon}")));
            }
            hi = hi + hi;
            at_hi = offdiagonal_norm(delta, hi)?;
        }
        let mut lo = one;
        let precision = T::lit(BISECTION_PRECISION);
        while hi - lo > precision * hi {
            let mid = lo + (hi - lo) / T::lit(2.0);
            let at_mid = offdiagonal_norm(delta, mid)?;
            if at_mid < target {
                hi = mid;
                at_hi = at_mid;
            } else {
                lo = mid;
            }
        }
        (hi, at_hi)
    };

    let kappa = powi(t, n - 1);
    if !powi(t, n).is_finite() || !(kappa <= max_kappa) {
        return Err(Error::ConditioningExceeded {
            t: t.as_f64(),
            kappa: kappa.as_f64(),
            cap: max_kappa.as_f64(),
        });
    }
    Ok((t, achieved))
}

/// Knobs for [`construct_norm_with`].
#[derive(Debug, Clone, Copy)]
pub struct NormOptions<T: Real> {
    /// Largest admissible `κ₂(P) = t^(n−1)`.
    pub max_kappa: T,
    /// Schur deflation tolerance, relative to `‖A‖_F`.
    pub schur_tol: T,
    pub max_sweeps: usize,
}

impl<T: Real> Default for NormOptions<T> {
    fn default() -> Self {
        Self {
            max_kappa: T::MAX_KAPPA,
            schur_tol: T::DEFAULT_TOL,
            max_sweeps: DEFAULT_MAX_SWEEPS,
        }
    }
}

/// The weighted spectral norm `‖M‖ = ‖P·M·P⁻¹‖₂` and its induced vector norm
/// `‖x‖ = ‖P·x‖₂`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNorm<T: Real> {
    p: ComplexMatrix<T>,
    p_inv: ComplexMatrix<T>,
    t: T,
    epsilon: T,
    kappa: T,
}

impl<T: Real> WeightedNorm<T> {
    /// `P = D_t·U` and `P⁻¹ = U*·D_t⁻¹`, both assembled from `U` directly.
    pub fn from_schur_factor(u: &ComplexMatrix<T>, t: T, epsilon: T) -> Result<Self> {
        let n = u.dim();
        let d = ScalingMatrix::new(t, n)?;
        let p = u.map(|i, _, z| z * d.entry(i));
        let p_inv = u.adjoint().map(|_, j, z| z * d.inverse_entry(j));
        let kappa = powi(t, n - 1).max(T::one() / powi(t, n - 1));
        Ok(Self {
            p,
            p_inv,
            t,
            epsilon,
            kappa,
        })
    }

    /// Rebuilds a norm from stored transforms. `D_t⁻¹·P` must be unitary and
    /// `P_inv·D_t` its adjoint.
    pub fn from_parts(p: ComplexMatrix<T>, p_inv: ComplexMatrix<T>, t: T, epsilon: T) -> Result<Self> {
        if p.dim() != p_inv.dim() {
            return Err(Error::DimensionMismatch {
                expected: p.dim(),
                found: p_inv.dim(),
            });
        }
        let n = p.dim();
        let d = ScalingMatrix::new(t, n)?;
        if !(epsilon > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        let u = p.map(|i, _, z| z * d.inverse_entry(i));
        let u_adj = p_inv.map(|_, j, z| z * d.entry(j));
        let tol = T::DEFAULT_TOL * T::lit(100.0) * T::from_usize_lossy(n);
        let defect = u.unitarity_defect();
        if !(defect <= tol) {
            return Err(Error::InvalidArgument(format!(
                "P is not D_t times a unitary matrix (defect {defect:e})"
            )));
        }
        let mismatch = u_adj.sub(&u.adjoint())?.frobenius_norm();
        if !(mismatch <= tol) {
            return Err(Error::InvalidArgument(format!(
                "P_inv does not match P (mismatch {mismatch:e})"
            )));
        }
        let kappa = powi(t, n - 1).max(T::one() / powi(t, n - 1));
        Ok(Self {
            p,
            p_inv,
            t,
            epsilon,
            kappa,
        })
    }

    pub fn p(&self) -> &ComplexMatrix<T> {
        &self.p
    }

    pub fn p_inv(&self) -> &ComplexMatrix<T> {
        &self.p_inv
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    /// `κ₂(P) = t^(n−1)`.
    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn source_dim(&self) -> usize {
        self.p.dim()
    }

    /// `‖P·P⁻¹ − I‖_F`.
    pub fn inverse_defect(&self) -> T {
        self.p
            .mat_mul(&self.p_inv)
            .and_then(|m| m.sub(&ComplexMatrix::identity(self.source_dim())))
            .expect("equal dimensions")
            .frobenius_norm()
    }

    /// `P·M·P⁻¹`.
    pub fn transform(&self, m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        self.check_dim(m.dim())?;
        self.p.mat_mul(m)?.mat_mul(&self.p_inv)
    }

    pub fn matrix_norm(&self, m: &ComplexMatrix<T>) -> Result<T> {
        spectral_norm(&self.transform(m)?, T::DEFAULT_TOL)
    }

    pub fn vector_norm(&self, x: &ComplexVector<T>) -> Result<T> {
        self.check_dim(x.len())?;
        Ok(self.p.mul_vec(x)?.norm2())
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.source_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.source_dim(),
                found: n,
            });
        }
        Ok(())
    }
}

pub fn matrix_norm<T: Real>(w: &WeightedNorm<T>, m: &ComplexMatrix<T>) -> Result<T> {
    w.matrix_norm(m)
}

pub fn vector_norm<T: Real>(w: &WeightedNorm<T>, x: &ComplexVector<T>) -> Result<T> {
    w.vector_norm(x)
}

/// Individual outcomes behind [`NormCertificate::verified`]. Checks that were
/// not run are `None`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CertificateChecks<T: Real> {
    pub sandwich: bool,
    pub delta_below_epsilon: bool,
    pub gelfand_agreement: Option<bool>,
    /// Largest `‖Ax‖/‖x‖` over the random trial vectors.
    pub max_trial_ratio: Option<T>,
    pub induced_consistency: Option<bool>,
    /// `‖Ax*‖/‖x*‖` for the singular-vector witness `x*`.
    pub witness_ratio: Option<T>,
    pub witness_attained: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormCertificate<T: Real> {
    /// Spectral radius from the Schur diagonal.
    pub rho: T,
    /// Independent Gelfand estimate, present after [`verify_certificate`].
    pub rho_gelfand: Option<T>,
    pub norm_value: T,
    pub epsilon: T,
    pub t: T,
    pub kappa: T,
    /// `‖δΔ̃‖₂` at the chosen `t`.
    pub delta_norm: T,
    pub schur_residual: T,
    pub checks: CertificateChecks<T>,
    pub verified: bool,
}

/// Slack of the sandwich check, `CERT_SLACK·max(1, ρ)`.
pub fn certificate_slack<T: Real>(rho: T) -> T {
    T::CERT_SLACK * T::one().max(rho)
}

fn sandwich_holds<T: Real>(rho: T, norm_value: T, epsilon: T) -> bool {
    let slack = certificate_slack(rho);
    rho - slack <= norm_value && norm_value <= rho + epsilon + slack
}

/// Builds the weighted norm for `a` with default options.
pub fn construct_norm<T: Real>(a: &ComplexMatrix<T>, epsilon: T) -> Result<(WeightedNorm<T>, NormCertificate<T>)> {
    construct_norm_with(a, epsilon, &NormOptions::default())
}

pub fn construct_norm_with<T: Real>(
    a: &ComplexMatrix<T>,
    epsilon: T,
    options: &NormOptions<T>,
) -> Result<(WeightedNorm<T>, NormCertificate<T>)> {
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let schur = schur_decompose(a, options.schur_tol, options.max_sweeps)?;
    let rho = schur.spectrum().rho;
    let (t, delta_norm) = select_t_with(&schur.delta, epsilon, options.max_kappa)?;
    let w = WeightedNorm::from_schur_factor(&schur.u, t, epsilon)?;
    let norm_value = w.matrix_norm(a)?;
    log::debug!(
        "constructed norm: n = {}, rho = {rho:e}, t = {t:e}, kappa = {:e}, norm = {norm_value:e}",
        a.dim(),
        w.kappa()
    );
    let sandwich = sandwich_holds(rho, norm_value, epsilon);
    let delta_below_epsilon = delta_norm < epsilon;
    let cert = NormCertificate {
        rho,
        rho_gelfand: None,
        norm_value,
        epsilon,
        t,
        kappa: w.kappa(),
        delta_norm,
        schur_residual: schur.residual,
        checks: CertificateChecks {
            sandwich,
            delta_below_epsilon,
            ..Default::default()
        },
        verified: sandwich && delta_below_epsilon,
    };
    Ok((w, cert))
}

/// Independently re-checks a weighted norm against `a`.
///
/// The spectral radius is recomputed from a fresh Schur decomposition and
/// cross-checked by the Gelfand oracle; the norm value is recomputed; the
/// induced-norm bound is tested on `trials` seeded random vectors; and the
/// supremum is checked to be attained at `x* = P⁻¹·v` with `v` the top right
/// singular vector of `P·A·P⁻¹`. Numeric failures are recorded in the
/// returned certificate rather than raised.
pub fn verify_certificate<T: Real>(
    w: &WeightedNorm<T>,
    a: &ComplexMatrix<T>,
    trials: usize,
    seed: u64,
) -> Result<NormCertificate<T>> {
    w.check_dim(a.dim())?;
    let epsilon = w.epsilon();
    let nan = T::nan();
    let mut cert = NormCertificate {
        rho: nan,
        rho_gelfand: None,
        norm_value: nan,
        epsilon,
        t: w.t(),
        kappa: w.kappa(),
        delta_norm: nan,
        schur_residual: nan,
        checks: CertificateChecks::default(),
        verified: false,
    };

    match schur_decompose(a, T::DEFAULT_TOL, DEFAULT_MAX_SWEEPS) {
        Ok(s) => {
            cert.rho = s.spectrum().rho;
            cert.schur_residual = s.residual;
        }
        Err(e) => {
            log::warn!("verification: Schur decomposition failed: {e}");
            return Ok(cert);
        }
    }
    let rho = cert.rho;

    let gelfand = spectral_radius_gelfand(a, VERIFY_GELFAND_K).ok();
    cert.rho_gelfand = gelfand;
    let gelfand_ok = gelfand.is_some_and(|g| (g - rho).abs() <= T::lit(GELFAND_AGREEMENT) * T::one().max(rho));
    cert.checks.gelfand_agreement = Some(gelfand_ok);

    let transformed = w.transform(a)?;
    let Ok(svd) = jacobi_svd(&transformed) else {
        return Ok(cert);
    };
    let norm_value = svd.sigma_max();
    cert.norm_value = norm_value;
    cert.checks.sandwich = sandwich_holds(rho, norm_value, epsilon);

    if let Ok(d) = spectral_norm(&offdiagonal_part(&transformed), T::DEFAULT_TOL) {
        cert.delta_norm = d;
        cert.checks.delta_below_epsilon = d < epsilon;
    }

    let ratio = |x: &ComplexVector<T>| -> Result<T> {
        let den = w.vector_norm(x)?;
        let num = w.vector_norm(&a.mul_vec(x)?)?;
        Ok(num / den)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = T::zero();
    for _ in 0..trials {
        let x = complex_gaussian_vector::<T, _>(a.dim(), &mut rng);
        max_ratio = max_ratio.max(ratio(&x)?);
    }
    let trial_bound = norm_value * (T::one() + T::DEFAULT_TOL * T::lit(100.0));
    cert.checks.max_trial_ratio = Some(max_ratio);
    cert.checks.induced_consistency = Some(max_ratio <= trial_bound);

    let witness = w.p_inv().mul_vec(&svd.top_right_vector())?;
    let witness_ok = if norm_value.is_zero() {
        cert.checks.witness_ratio = Some(T::zero());
        true
    } else {
        let r = ratio(&witness)?;
        cert.checks.witness_ratio = Some(r);
        r >= norm_value * (T::one() - T::CERT_SLACK)
    };
    cert.checks.witness_attained = Some(witness_ok);

    cert.verified =
        cert.checks.sandwich && cert.checks.delta_below_epsilon && gelfand_ok && max_ratio <= trial_bound && witness_ok;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::condition_number_2;
    use crate::random::{ginibre, normal_matrix};

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn scaling_matrix_examples() {
        assert_eq!(scaling_matrix(1.0, 4).unwrap().to_matrix(), M::identity(4));
        assert_eq!(
            scaling_matrix(2.0, 3).unwrap().to_matrix(),
            M::from_real_rows(&[&[2.0, 0.0, 0.0], &[0.0, 4.0, 0.0], &[0.0, 0.0, 8.0]]).unwrap()
        );
        let d = scaling_matrix(10.0, 2).unwrap();
        assert_eq!(d.to_matrix().diagonal(), vec![c(10.0, 0.0), c(100.0, 0.0)]);
        let inv = d.inverse().unwrap();
        assert!((inv.entry(0) - 0.1).abs() < 1e-17 && (inv.entry(1) - 0.01).abs() < 1e-17);
        assert!((d.inverse_entry(1) - 0.01).abs() < 1e-17);
    }

    #[test]
    fn scaling_matrix_errors() {
        assert!(matches!(scaling_matrix(0.0, 2), Err(Error::InvalidArgument(_))));
        assert!(matches!(scaling_matrix(-1.0, 2), Err(Error::InvalidArgument(_))));
        assert!(matches!(scaling_matrix(1e100, 4), Err(Error::Overflow(_))));
    }

    #[test]
    fn scaled_triangular_examples() {
        let delta = M::from_rows(vec![vec![c(0.3, 0.1), c(2.0, -1.0)], vec![c(0.0, 0.0), c(-0.5, 0.0)]]).unwrap();
        assert_eq!(scaled_triangular(&delta, 1.0).unwrap(), delta);
        let scaled = scaled_triangular(&delta, 10.0).unwrap();
        assert_eq!(scaled[(0, 0)], delta[(0, 0)]);
        assert_eq!(scaled[(1, 1)], delta[(1, 1)]);
        assert!((scaled[(0, 1)] - c(0.2, -0.1)).norm() < 1e-16);
        let diag = M::from_diagonal(&[c(1.0, 1.0), c(2.0, 0.0)]).unwrap();
        assert_eq!(scaled_triangular(&diag, 123.0).unwrap(), diag);
    }

    #[test]
    fn scaled_triangular_uses_power_pattern() {
        // entry (i, j) picks up t^(i−j) for every superdiagonal
        let delta = M::from_fn(4, |i, j| {
            if i <= j {
                c(1.0 + i as f64, j as f64)
            } else {
                c(0.0, 0.0)
            }
        })
        .unwrap();
        let t = 3.0f64;
        let scaled = scaled_triangular(&delta, t).unwrap();
        for i in 0..4 {
            for j in i..4 {
                let want = delta[(i, j)] * t.powi(i as i32 - j as i32);
                assert!((scaled[(i, j)] - want).norm() <= 1e-15 * want.norm());
            }
        }
    }

    #[test]
    fn scaled_triangular_rejects_full_matrix() {
        let a = M::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert!(matches!(scaled_triangular(&a, 2.0), Err(Error::NotTriangular { .. })));
        assert!(matches!(select_t(&a, 0.1), Err(Error::NotTriangular { .. })));
    }

    #[test]
    fn offdiagonal_examples() {
        assert_eq!(offdiagonal_part(&M::identity(3)), M::zeros(3));
        let a = M::from_real_rows(&[&[1.0, 0.5], &[0.0, 2.0]]).unwrap();
        assert_eq!(
            offdiagonal_part(&a),
            M::from_real_rows(&[&[0.0, 0.5], &[0.0, 0.0]]).unwrap()
        );
        assert_eq!(diagonal_part(&a).add(&offdiagonal_part(&a)).unwrap(), a);
    }

    #[test]
    fn select_t_diagonal_is_one() {
        let d = M::from_diagonal(&[c(3.0, 1.0), c(-2.0, 0.0), c(0.0, 0.5)]).unwrap();
        let (t, dn) = select_t(&d, 1e-6).unwrap();
        assert_eq!(t, 1.0);
        assert_eq!(dn, 0.0);
    }

    #[test]
    fn select_t_nilpotent_closed_form() {
        // ‖δΔ̃(t)‖₂ = 1/t, smallest admissible t is 1/(0.1·0.99)
        let d = M::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let (t, dn) = select_t(&d, 0.1).unwrap();
        let t_star = 1.0 / (0.1 * 0.99);
        assert!(t >= t_star && t <= t_star * (1.0 + BISECTION_PRECISION), "t = {t}");
        assert!((dn - 1.0 / t).abs() < 1e-15);
        assert!(dn < 0.099);
    }

    #[test]
    fn select_t_jordan_closed_form() {
        let d = M::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let (t, dn) = select_t(&d, 0.5).unwrap();
        let t_star = 1.0 / (0.5 * 0.99);
        assert!(t >= t_star && t <= t_star * (1.0 + BISECTION_PRECISION), "t = {t}");
        assert!(dn < 0.495);
    }

    #[test]
    fn select_t_errors() {
        let d = M::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(select_t(&d, 0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(select_t(&d, -1.0), Err(Error::InvalidArgument(_))));
        // 8×8 nilpotent shift, ε = 1e-3 needs t ≈ 1010 and κ = t^7 ≈ 1e21
        let shift = M::from_fn(8, |i, j| if j == i + 1 { c(1.0, 0.0) } else { c(0.0, 0.0) }).unwrap();
        match select_t(&shift, 1e-3) {
            Err(Error::ConditioningExceeded { t, kappa, cap }) => {
                assert!(t > 1000.0);
                assert!((kappa - t.powi(7)).abs() <= 1e-9 * kappa);
                assert_eq!(cap, 1e12);
            }
            other => panic!("expected ConditioningExceeded, got {other:?}"),
        }
    }

    #[test]
    fn construct_diagonal_is_exact() {
        let a = M::from_diagonal(&[c(0.3, 0.0), c(0.5, 0.1)]).unwrap();
        let (w, cert) = construct_norm(&a, 1e-3).unwrap();
        assert_eq!(w.t(), 1.0);
        assert!((cert.norm_value - c(0.5, 0.1).norm()).abs() < 1e-9);
        assert!(cert.verified);
    }

    #[test]
    fn construct_nilpotent() {
        let a = M::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let (w, cert) = construct_norm(&a, 0.1).unwrap();
        assert_eq!(cert.rho, 0.0);
        assert!((cert.norm_value - cert.delta_norm).abs() < 1e-15);
        assert!(cert.norm_value < 0.1);
        assert!(cert.verified);
        assert!((w.t() - 1.0 / 0.099).abs() < 0.02);
    }

    #[test]
    fn construct_normal_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = normal_matrix(&[c(0.2, 0.0), c(0.9, 0.0), c(-0.4, 0.0)], &mut rng);
        let (w, cert) = construct_norm(&a, 1e-3).unwrap();
        assert_eq!(w.t(), 1.0);
        assert!((cert.norm_value - 0.9).abs() < 1e-8);
    }

    #[test]
    fn construct_rejects_nonpositive_epsilon() {
        let a = M::identity(2);
        assert!(matches!(construct_norm(&a, 0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(construct_norm(&a, -0.5), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn identity_has_norm_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = ginibre::<f64, _>(4, &mut rng);
        let (w, _) = construct_norm(&a, 0.1).unwrap();
        assert!((w.matrix_norm(&M::identity(4)).unwrap() - 1.0).abs() < 1e-10);
        let cert = verify_certificate(&w, &M::identity(4), 100, 0).unwrap();
        assert!((cert.norm_value - 1.0).abs() < 1e-10);
        assert_eq!(cert.rho, 1.0);
        assert!(cert.verified, "{cert:?}");
    }

    #[test]
    fn matrix_norm_of_source_matches_certificate() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = ginibre::<f64, _>(5, &mut rng);
        let (w, cert) = construct_norm(&a, 0.1).unwrap();
        assert_eq!(w.matrix_norm(&a).unwrap(), cert.norm_value);
        let a2 = a.mat_mul(&a).unwrap();
        assert!(w.matrix_norm(&a2).unwrap() <= cert.norm_value.powi(2) + 1e-8);
    }

    #[test]
    fn vector_norm_examples() {
        let a = M::from_diagonal(&[c(0.1, 0.0), c(0.2, 0.0), c(0.3, 0.0)]).unwrap();
        let (w, _) = construct_norm(&a, 0.01).unwrap();
        assert_eq!(w.vector_norm(&ComplexVector::zeros(3)).unwrap(), 0.0);
        let x = ComplexVector::new(vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0)]).unwrap();
        assert!((w.vector_norm(&x).unwrap() - x.norm2()).abs() < 1e-15);
        assert!(matches!(
            w.vector_norm(&ComplexVector::zeros(2)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            w.matrix_norm(&M::identity(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kappa_matches_condition_number() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let a = ginibre::<f64, _>(5, &mut rng);
        let (w, _) = construct_norm(&a, 0.05).unwrap();
        assert!(w.t() > 1.0);
        let k = condition_number_2(w.p()).unwrap();
        assert!((k - w.kappa()).abs() <= 1e-6 * w.kappa(), "{k} vs {}", w.kappa());
        assert!(w.inverse_defect() <= 1e-10 * 5.0);
    }

    #[test]
    fn verify_detects_halved_t_on_jordan_block() {
        let a = M::from_fn(4, |i, j| match j as i64 - i as i64 {
            0 => c(0.9, 0.0),
            1 => c(5.0, 0.0),
            _ => c(0.0, 0.0),
        })
        .unwrap();
        let (w, cert) = construct_norm(&a, 0.05).unwrap();
        assert!(cert.verified);
        let good = verify_certificate(&w, &a, 200, 1).unwrap();
        assert!(good.verified, "{good:?}");
        let u = ComplexMatrix::identity(4);
        let tampered = WeightedNorm::from_schur_factor(&u, w.t() / 2.0, 0.05).unwrap();
        let bad = verify_certificate(&tampered, &a, 200, 1).unwrap();
        assert!(bad.norm_value > bad.rho + 0.05);
        assert!(!bad.checks.sandwich);
        assert!(!bad.verified);
    }

    #[test]
    fn from_parts_rejects_mismatched_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let a = ginibre::<f64, _>(3, &mut rng);
        let (w, _) = construct_norm(&a, 0.1).unwrap();
        let again = WeightedNorm::from_parts(w.p().clone(), w.p_inv().clone(), w.t(), w.epsilon()).unwrap();
        assert_eq!(again, w);
        let broken = w.p_inv().scale(c(1.01, 0.0));
        assert!(WeightedNorm::from_parts(w.p().clone(), broken, w.t(), w.epsilon()).is_err());
        let wrong_t = WeightedNorm::from_parts(w.p().clone(), w.p_inv().clone(), w.t() * 1.001, w.epsilon());
        assert!(wrong_t.is_err());
        assert!(WeightedNorm::from_parts(w.p().clone(), w.p_inv().clone(), w.t(), 0.0).is_err());
    }

    #[test]
    fn single_precision_construction() {
        let a = ComplexMatrix::<f32>::from_real_rows(&[&[0.5, 1.0], &[0.0, 0.25]]).unwrap();
        let (w, cert) = construct_norm(&a, 0.1f32).unwrap();
        assert!(cert.verified, "{cert:?}");
        assert!(w.t() > 1.0);
        assert!(cert.norm_value <= 0.5 + 0.1 + 1e-3);
    }
}
