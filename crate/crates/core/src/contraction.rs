//! Consensus over strongly connected digraphs, certified with a weighted norm.
//!
//! For a primitive row-stochastic `W` with left Perron vector `π`, the
//! disagreement `d_k = x_k − 1·πᵀx_k` of the iteration `x_{k+1} = W·x_k`
//! obeys `d_{k+1} = M·d_k` with `M = W − 1·πᵀ`. Building the weighted norm
//! for `M` turns `ρ(M) + ε < 1` into a per-step contraction factor.

use std::collections::BTreeSet;

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::norm::{construct_norm, WeightedNorm};
use crate::random::real_gaussian_vector;
use crate::scalar::{real, Real};
use crate::schur::eigenvalues;

/// Default share of the spectral gap `1 − ρ` spent on `ε`.
pub const DEFAULT_EPSILON_FRACTION: f64 = 0.5;
pub const PERRON_TOL: f64 = 1e-14;
pub const PERRON_MAX_ITER: usize = 100_000;
/// Spectral radii at or above `1 − GAP_FLOOR` count as having no gap.
pub const GAP_FLOOR: f64 = 1e-10;

/// Directed graph on nodes `0..n`. An edge `(i, j)` means `j` receives from `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Digraph {
    /// Validates the edge list and requires strong connectivity.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({i}, {j}) out of range for {n} nodes"
                )));
            }
            if i == j {
                return Err(Error::InvalidArgument(format!("self-loop at node {i}")));
            }
            set.insert((i, j));
        }
        let g = Self { n, edges: set };
        if !g.is_strongly_connected() {
            return Err(Error::NotStronglyConnected);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Nodes `i` with an edge `(i, j)`.
    pub fn in_neighbors(&self, j: usize) -> Vec<usize> {
        self.edges.iter().filter(|&&(_, b)| b == j).map(|&(a, _)| a).collect()
    }

    /// Forward and backward reachability from node 0.
    pub fn is_strongly_connected(&self) -> bool {
        let reach = |forward: bool| {
            let mut seen = vec![false; self.n];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                for &(a, b) in &self.edges {
                    let (from, to) = if forward { (a, b) } else { (b, a) };
                    if from == v && !seen[to] {
                        seen[to] = true;
                        stack.push(to);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(true) && reach(false)
    }
}

/// Directed ring `0 → 1 → … → n−1 → 0` plus every other ordered pair with
/// probability `p`, drawn in row-major pair order from a ChaCha8 stream.
pub fn random_digraph(n: usize, p: f64, seed: u64) -> Result<Digraph> {
    if n < 2 {
        return Err(Error::InvalidArgument("a digraph needs at least 2 nodes".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ring: BTreeSet<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let mut edges = ring.clone();
    for i in 0..n {
        for j in 0..n {
            if i == j || ring.contains(&(i, j)) {
                continue;
            }
            if rng.random_bool(p) {
                edges.insert((i, j));
            }
        }
    }
    Digraph::new(n, edges)
}

/// `W[i][i] = self_weight`; the remaining mass is split equally among the
/// in-neighbours of `i`.
pub fn row_stochastic_weights<T: Real>(g: &Digraph, self_weight: T) -> Result<ComplexMatrix<T>> {
    if !(self_weight > T::zero() && self_weight < T::one()) {
        return Err(Error::InvalidArgument(format!(
            "self weight {self_weight} outside (0, 1)"
        )));
    }
    let n = g.n();
    let mut w = ComplexMatrix::zeros(n);
    for i in 0..n {
        w[(i, i)] = real(self_weight);
        let nbrs = g.in_neighbors(i);
        let share = (T::one() - self_weight) / T::from_usize_lossy(nbrs.len());
        for j in nbrs {
            w[(i, j)] = real(share);
        }
    }
    Ok(w)
}

fn check_row_stochastic<T: Real>(w: &ComplexMatrix<T>) -> Result<()> {
    let tol = T::DEFAULT_TOL;
    for i in 0..w.dim() {
        let mut sum = T::zero();
        for &z in w.row(i) {
            if z.im.abs() > tol || z.re < -tol {
                return Err(Error::InvalidArgument(
                    "weight matrix must be real and nonnegative".into(),
                ));
            }
            sum = sum + z.re;
        }
        if (sum - T::one()).abs() > tol {
            return Err(Error::InvalidArgument(format!(
                "row {i} of the weight matrix sums to {sum}"
            )));
        }
    }
    Ok(())
}

/// Left Perron vector of a primitive row-stochastic `W`: power iteration on
/// `Wᵀ` from the uniform vector, renormalized to unit sum.
pub fn perron_vector<T: Real>(w: &ComplexMatrix<T>) -> Result<Vec<T>> {
    check_row_stochastic(w)?;
    let n = w.dim();
    let tol = T::lit(PERRON_TOL).max(T::epsilon() * T::lit(8.0));
    let mut pi = vec![T::one() / T::from_usize_lossy(n); n];
    for _ in 0..PERRON_MAX_ITER {
        let mut next = vec![T::zero(); n];
        for (i, &p) in pi.iter().enumerate() {
            for (nj, z) in next.iter_mut().zip(w.row(i)) {
                *nj = *nj + p * z.re;
            }
        }
        let total = next.iter().fold(T::zero(), |s, &x| s + x);
        for x in next.iter_mut() {
            *x = *x / total;
        }
        let change = pi.iter().zip(&next).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
        pi = next;
        if change <= tol {
            if pi.iter().any(|&x| !(x > T::zero())) {
                return Err(Error::InvalidArgument(
                    "Perron vector is not positive; W is not primitive".into(),
                ));
            }
            return Ok(pi);
        }
    }
    Err(Error::NoConvergence {
        routine: "perron power iteration",
        iterations: PERRON_MAX_ITER,
        estimate: 1.0,
    })
}

/// `M = W − 1·πᵀ` together with `π`.
pub fn disagreement_matrix<T: Real>(w: &ComplexMatrix<T>) -> Result<(ComplexMatrix<T>, ComplexVector<T>)> {
    let pi = perron_vector(w)?;
    let m = w.map(|_, j, z| z - real(pi[j]));
    Ok((m, ComplexVector::from_real(&pi)?))
}

/// Weighted norm for the disagreement matrix of `W` with
/// `ε = epsilon_fraction·(1 − ρ(M))`; returns the norm and the certified rate
/// `ρ(M) + ε`.
pub fn certify_contraction<T: Real>(w: &ComplexMatrix<T>, epsilon_fraction: T) -> Result<(WeightedNorm<T>, T)> {
    if !(epsilon_fraction > T::zero() && epsilon_fraction < T::one()) {
        return Err(Error::InvalidArgument(format!(
            "epsilon fraction {epsilon_fraction} outside (0, 1)"
        )));
    }
    let (m, _) = disagreement_matrix(w)?;
    let rho = eigenvalues(&m)?.rho;
    if rho >= T::one() - T::lit(GAP_FLOOR) {
        return Err(Error::NoSpectralGap { rho: rho.as_f64() });
    }
    let epsilon = epsilon_fraction * (T::one() - rho);
    let (norm, cert) = construct_norm(&m, epsilon)?;
    log::info!(
        "contraction certificate: rho = {rho:e}, epsilon = {epsilon:e}, t = {:e}, kappa = {:e}, norm = {:e}",
        norm.t(),
        norm.kappa(),
        cert.norm_value
    );
    Ok((norm, rho + epsilon))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport<T: Real> {
    /// `ρ(M)`.
    pub rho: T,
    /// `ρ(M) + ε`.
    pub certified_rate: T,
    /// Weighted norm of `d_k` for `k = 0..=steps`.
    pub step_norms: Vec<T>,
    /// `‖d_k‖₂` for the same steps.
    pub euclidean_norms: Vec<T>,
    /// `step_norms[k+1] / step_norms[k]` for every `k` before the
    /// disagreement falls under `extinction_floor`.
    pub step_ratios: Vec<T>,
    pub max_ratio: T,
    /// Weighted norms below this are treated as rounding noise.
    pub extinction_floor: T,
    /// `max_k |πᵀx_k − πᵀx_0|`.
    pub conservation_drift: T,
    /// `max_ratio ≤ certified_rate·(1 + CERT_SLACK)`.
    pub certified: bool,
}

impl<T: Real> ContractionReport<T> {
    /// Steps where the Euclidean disagreement grew.
    pub fn euclidean_increases(&self) -> Vec<usize> {
        self.euclidean_norms
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1] > w[0])
            .map(|(k, _)| k)
            .collect()
    }
}

fn pi_dot<T: Real>(pi: &ComplexVector<T>, x: &ComplexVector<T>) -> Complex<T> {
    pi.as_slice()
        .iter()
        .zip(x.as_slice())
        .fold(Complex::zero(), |acc, (&p, &v)| acc + p * v)
}

/// Runs `x_{k+1} = W·x_k` for `steps` steps and measures the disagreement in
/// the weighted norm built for `M = W − 1·πᵀ`.
pub fn simulate_consensus<T: Real>(
    w: &ComplexMatrix<T>,
    x0: &ComplexVector<T>,
    steps: usize,
    norm: &WeightedNorm<T>,
) -> Result<ContractionReport<T>> {
    let n = w.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x0.len(),
        });
    }
    if norm.source_dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: norm.source_dim(),
        });
    }
    let (m, pi) = disagreement_matrix(w)?;
    let rho = eigenvalues(&m)?.rho;
    let certified_rate = rho + norm.epsilon();

    // rounding in d_k is about eps·‖x_0‖ per entry and P magnifies it by up to
    // ‖P‖₂ = tⁿ
    let p_norm = norm.t().powi(n as i32);
    let extinction_floor = T::CERT_SLACK * T::lit(10.0) * p_norm * x0.norm2();

    let ones = ComplexVector::ones(n);
    let c0 = pi_dot(&pi, x0);
    let mut x = x0.clone();
    let mut step_norms = Vec::with_capacity(steps + 1);
    let mut euclidean_norms = Vec::with_capacity(steps + 1);
    let mut drift = T::zero();
    for k in 0..=steps {
        let c = pi_dot(&pi, &x);
        drift = drift.max((c - c0).norm());
        let d = x.sub(&ones.scale(c))?;
        step_norms.push(norm.vector_norm(&d)?);
        euclidean_norms.push(d.norm2());
        if k < steps {
            x = w.mul_vec(&x)?;
        }
    }

    let step_ratios: Vec<T> = step_norms
        .windows(2)
        .take_while(|s| s[0] > extinction_floor)
        .map(|s| s[1] / s[0])
        .collect();
    let max_ratio = step_ratios.iter().fold(T::zero(), |m, &r| m.max(r));
    let certified = max_ratio <= certified_rate * (T::one() + T::CERT_SLACK);
    Ok(ContractionReport {
        rho,
        certified_rate,
        step_norms,
        euclidean_norms,
        step_ratios,
        max_ratio,
        extinction_floor,
        conservation_drift: drift,
        certified,
    })
}

/// Seeded real Gaussian initial state used by the CLI and the test harness.
pub fn seeded_initial_state<T: Real>(n: usize, seed: u64) -> ComplexVector<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    real_gaussian_vector(n, &mut rng)
}
