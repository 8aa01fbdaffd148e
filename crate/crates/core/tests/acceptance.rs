//! Acceptance suite. Each test writes one `criterion N: PASS|FAIL` line to
//! stdout (bypassing the test harness capture) before asserting.

use std::io::Write;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use contraction_norm::contraction::{
    certify_contraction, random_digraph, row_stochastic_weights, seeded_initial_state, simulate_consensus,
};
use contraction_norm::io::{emit_certificate, emit_matrix};
use contraction_norm::linalg::jacobi_svd;
use contraction_norm::norm::{offdiagonal_part, scaled_triangular};
use contraction_norm::random::{complex_gaussian, complex_gaussian_vector, ginibre, normal_matrix};
use contraction_norm::{
    construct_norm, schur, spectral_norm, spectral_radius_gelfand, verify_certificate, Error, Matrix, Norm, Vector, C64,
};

fn report(criterion: u32, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {criterion}: {verdict} - {detail}");
    let _ = out.flush();
}

/// Random instance `k` of the sandwich sweep.
fn sandwich_instance(k: usize) -> (Matrix, f64) {
    let n = 2 + k % 7;
    let epsilon = [0.5, 0.1, 0.01][(k / 7) % 3];
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + k as u64);
    (ginibre(n, &mut rng), epsilon)
}

fn jordan(n: usize, lambda: f64, sup: f64) -> Matrix {
    Matrix::from_fn(n, |i, j| {
        if i == j {
            Complex::new(lambda, 0.0)
        } else if j == i + 1 {
            Complex::new(sup, 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    })
    .unwrap()
}

fn ratio(w: &Norm, a: &Matrix, x: &Vector) -> f64 {
    w.vector_norm(&a.mul_vec(x).unwrap()).unwrap() / w.vector_norm(x).unwrap()
}

#[test]
fn criterion_1_sandwich_certificate() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for k in 0..200 {
        let (a, epsilon) = sandwich_instance(k);
        let n = a.dim();
        let (w, _) = match construct_norm(&a, epsilon) {
            Ok(built) => built,
            Err(e) => {
                failures.push(format!("k={k} n={n} eps={epsilon}: {e}"));
                continue;
            }
        };
        let cert = verify_certificate(&w, &a, 1000, k as u64).unwrap();
        let slack = 1e-8 * cert.rho.max(1.0);
        let sandwich = cert.rho - slack <= cert.norm_value && cert.norm_value <= cert.rho + epsilon + slack;
        let gelfand = spectral_radius_gelfand(&a, 12).unwrap();
        let oracle = (gelfand - cert.rho).abs() <= 0.05 * cert.rho.max(1.0);
        if !(cert.verified && sandwich && oracle) {
            failures.push(format!(
                "k={k} n={n} eps={epsilon}: verified={} sandwich={sandwich} gelfand={oracle}",
                cert.verified
            ));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = failures.is_empty() && elapsed < 30.0;
    report(
        1,
        ok,
        &format!(
            "{}/200 certificates verified in {elapsed:.2}s{}{}",
            200 - failures.len(),
            if failures.is_empty() { "" } else { "; failures: " },
            failures.join("; ")
        ),
    );
    assert!(ok, "{failures:#?}");
}

#[test]
fn criterion_2_induced_norm_equality() {
    let mut worst_witness = f64::INFINITY;
    let mut worst_trial: f64 = 0.0;
    for k in 0..50 {
        let (a, epsilon) = sandwich_instance(k);
        let (w, _) = construct_norm(&a, epsilon).unwrap();
        let norm = w.matrix_norm(&a).unwrap();
        let svd = jacobi_svd(&w.transform(&a).unwrap()).unwrap();
        let witness = w.p_inv().mul_vec(&svd.top_right_vector()).unwrap();
        worst_witness = worst_witness.min(ratio(&w, &a, &witness) / norm);
        let mut rng = ChaCha8Rng::seed_from_u64(500 + k as u64);
        for _ in 0..1000 {
            let x: Vector = complex_gaussian_vector(a.dim(), &mut rng);
            worst_trial = worst_trial.max(ratio(&w, &a, &x) / norm);
        }
    }
    let ok = worst_witness >= 1.0 - 1e-8 && worst_trial <= 1.0 + 1e-10;
    report(
        2,
        ok,
        &format!(
            "50 instances: min witness ratio/norm = {worst_witness:.17}, max trial ratio/norm = {worst_trial:.17}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_3_hard_defective_case() {
    let mut details = Vec::new();
    let mut ok = true;
    for n in [2, 4, 8] {
        let a = jordan(n, 0.9, 1.0);
        let (w, _) = construct_norm(&a, 0.05).unwrap();
        let cert = verify_certificate(&w, &a, 1000, 0).unwrap();
        ok &= cert.verified;
        details.push(format!("n={n}: t={:.6} verified={}", w.t(), cert.verified));
        if n == 2 {
            let closed_form = 1.0 / (0.05 * 0.99);
            let rel = (w.t() - closed_form) / closed_form;
            ok &= (0.0..=1e-3).contains(&rel);
            details.push(format!("closed form t*={closed_form:.6}, relative excess {rel:.2e}"));
        }
    }
    report(3, ok, &details.join("; "));
    assert!(ok);
}

#[test]
fn criterion_4_exact_on_normal_matrices() {
    let mut worst: f64 = 0.0;
    let mut all_t_one = true;
    for k in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + k);
        let n = 2 + (k as usize) % 7;
        let diag: Vec<C64> = complex_gaussian_vector::<f64, _>(n, &mut rng).as_slice().to_vec();
        let a = normal_matrix(&diag, &mut rng);
        let (w, cert) = construct_norm(&a, 1e-6).unwrap();
        let rho = diag.iter().map(|z| z.norm()).fold(0.0, f64::max);
        all_t_one &= w.t() == 1.0;
        worst = worst.max((cert.norm_value - rho).abs() / rho.max(1.0));
    }
    let ok = all_t_one && worst <= 1e-8;
    report(
        4,
        ok,
        &format!("50 normal matrices: t = 1 for all: {all_t_one}; max |norm - rho|/max(1, rho) = {worst:.2e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_5_linear_decay() {
    let mut worst: f64 = 0.0;
    for k in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + k);
        let n = 2 + (k as usize) % 7;
        let full: Matrix = complex_gaussian(n, 1.0, &mut rng);
        let delta = full.map(|i, j, z| if i <= j { z } else { Complex::new(0.0, 0.0) });
        for t in [1.0, 2.0, 4.0, 8.0] {
            let at = spectral_norm(&offdiagonal_part(&scaled_triangular(&delta, t).unwrap()), 1e-14).unwrap();
            let at2 = spectral_norm(&offdiagonal_part(&scaled_triangular(&delta, 2.0 * t).unwrap()), 1e-14).unwrap();
            worst = worst.max(at2 / (at / 2.0));
        }
    }
    let ok = worst <= 1.0 + 1e-12;
    report(
        5,
        ok,
        &format!("20 triangular matrices: max ||dD(2t)|| / (||dD(t)||/2) = {worst:.15}"),
    );
    assert!(ok);
}

#[test]
fn criterion_6_contraction_end_to_end() {
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_drift: f64 = 0.0;
    let mut ok = true;
    for k in 0..20u64 {
        let n = 4 + (k as usize) % 7;
        let p = if (k / 7) % 2 == 0 { 0.2 } else { 0.5 };
        let g = random_digraph(n, p, k).unwrap();
        let w: Matrix = row_stochastic_weights(&g, 0.5).unwrap();
        let (norm, rate) = certify_contraction(&w, 0.5).unwrap();
        let x0 = seeded_initial_state(n, k);
        let run = simulate_consensus(&w, &x0, 50, &norm).unwrap();
        for &r in &run.step_ratios {
            worst_excess = worst_excess.max(r - rate);
        }
        worst_drift = worst_drift.max(run.conservation_drift / x0.norm2());
        ok &= run.certified && !run.step_ratios.is_empty();
    }
    ok &= worst_excess <= 1e-8 && worst_drift < 1e-12;

    // pinned instance where the Euclidean disagreement grows at step 7
    let g = random_digraph(6, 0.2, 27).unwrap();
    let w: Matrix = row_stochastic_weights(&g, 0.1).unwrap();
    let (norm, rate) = certify_contraction(&w, 0.5).unwrap();
    let run = simulate_consensus(&w, &seeded_initial_state(6, 27), 50, &norm).unwrap();
    let live: Vec<usize> = run
        .euclidean_increases()
        .into_iter()
        .filter(|&k| k < run.step_ratios.len())
        .collect();
    let exhibit = live.contains(&7) && run.certified && run.max_ratio <= rate + 1e-8;
    ok &= exhibit;
    report(
        6,
        ok,
        &format!(
            "20 digraphs: max(ratio - rate) = {worst_excess:.3e}, max drift/||x0|| = {worst_drift:.2e}; \
             pinned n=6 p=0.2 seed=27: Euclidean increases at steps {live:?}, max ratio {:.4} <= rate {rate:.4}",
            run.max_ratio
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_7_schur_quality() {
    let (mut worst_res, mut worst_unit, mut worst_trace) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..100u64 {
        let n = 1 + (k as usize) % 32;
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + k);
        let a: Matrix = complex_gaussian(n, 1.0, &mut rng);
        let s = schur(&a).unwrap();
        let back = s.u.adjoint().mat_mul(&s.delta).unwrap().mat_mul(&s.u).unwrap();
        let fa = a.frobenius_norm();
        worst_res = worst_res.max(back.sub(&a).unwrap().frobenius_norm() / fa);
        let unit =
            s.u.mat_mul(&s.u.adjoint())
                .unwrap()
                .sub(&Matrix::identity(n))
                .unwrap()
                .frobenius_norm();
        worst_unit = worst_unit.max(unit / (1e-10 * n as f64));
        let eig_sum = s
            .delta
            .diagonal()
            .iter()
            .fold(Complex::new(0.0, 0.0), |acc, &z| acc + z);
        worst_trace = worst_trace.max((a.trace() - eig_sum).norm() / (1e-9 * n as f64 * fa));
    }
    let ok = worst_res <= 1e-9 && worst_unit <= 1.0 && worst_trace <= 1.0;
    report(
        7,
        ok,
        &format!(
            "100 matrices n<=32: max residual {worst_res:.2e}, unitarity defect at {worst_unit:.2e} of bound, \
             trace gap at {worst_trace:.2e} of bound"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_8_failure_modes() {
    let a = jordan(3, 0.5, 1.0);
    let eps_rejected = [0.0, -1.0, f64::NAN]
        .iter()
        .all(|&e| matches!(construct_norm(&a, e), Err(Error::InvalidArgument(_))));

    let defective = jordan(8, 0.9, 1.0);
    let capped = match construct_norm(&defective, 1e-3) {
        Err(Error::ConditioningExceeded { t, kappa, cap }) => {
            t > 1.0 && t.is_finite() && kappa > 1e12 && cap == 1e12 && (kappa / t.powi(7) - 1.0).abs() < 1e-12
        }
        _ => false,
    };

    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("a.txt");
    let cert_path = dir.path().join("a.cert");
    let tampered = dir.path().join("tampered.cert");
    let b = jordan(3, 0.9, 2.0);
    std::fs::write(&input, emit_matrix(&b)).unwrap();
    let (w, _) = construct_norm(&b, 0.05).unwrap();
    let cert = verify_certificate(&w, &b, 1000, 0).unwrap();
    let text = emit_certificate(&cert, &w, &b);
    std::fs::write(&cert_path, &text).unwrap();
    let forged: String = text
        .lines()
        .map(|l| {
            if l.starts_with("norm_value = ") {
                "norm_value = 9.0000000000000002e-1".to_owned()
            } else {
                l.to_owned()
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    std::fs::write(&tampered, forged).unwrap();
    let run = |cert: &std::path::Path| {
        Command::new(env!("CARGO_BIN_EXE_contraction-norm"))
            .env("CONTRACTION_NORM_LOG", "quiet")
            .args(["verify", "--input"])
            .arg(&input)
            .arg("--certificate")
            .arg(cert)
            .output()
            .unwrap()
            .status
            .code()
    };
    let (clean, forged_code) = (run(&cert_path), run(&tampered));
    let cli = clean == Some(0) && forged_code == Some(1);

    let ok = eps_rejected && capped && cli;
    report(
        8,
        ok,
        &format!(
            "epsilon <= 0 rejected: {eps_rejected}; 8x8 Jordan at eps=1e-3 hits the kappa cap with t reported: {capped}; \
             verify exit codes clean/tampered: {clean:?}/{forged_code:?}"
        ),
    );
    assert!(ok);
}
