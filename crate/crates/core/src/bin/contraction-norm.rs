#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use log::{debug, info, warn, LevelFilter};

use contraction_norm::contraction::{
    certify_contraction, random_digraph, row_stochastic_weights, seeded_initial_state, simulate_consensus,
};
use contraction_norm::io::{
    certificate_document, emit_certificate, emit_report, format_complex, format_real, load_certificate, matrix_digest,
    parse_matrix, parse_vector, ContractionRun, Document,
};
use contraction_norm::{
    construct_norm_with, eigenvalues, spectral_radius_gelfand, verify_certificate, Error, Matrix, NormOptions,
};

const LOG_ENV: &str = "CONTRACTION_NORM_LOG";
/// Relative agreement required between stored and recomputed certificate values.
const REPRODUCE_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "contraction-norm", version, about = "Certified weighted spectral norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a norm for a matrix and write its certificate.
    Construct(ConstructArgs),
    /// Re-check a certificate against its matrix.
    Verify(VerifyArgs),
    /// Evaluate a certified norm on a matrix or vector.
    Norm(NormArgs),
    /// Eigenvalues, spectral radius and the Gelfand cross-check.
    Spectrum(SpectrumArgs),
    /// Certify and simulate consensus on a random digraph.
    Contract(ContractArgs),
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    epsilon: f64,
    #[arg(long, default_value_t = 1e12)]
    max_kappa: f64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    certificate: PathBuf,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("operand").required(true).args(["matrix", "vector"])))]
struct NormArgs {
    #[arg(long)]
    certificate: PathBuf,
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    vector: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 7)]
    gelfand_k: u32,
}

#[derive(Args)]
struct ContractArgs {
    #[arg(long)]
    nodes: usize,
    #[arg(long)]
    edge_prob: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    self_weight: f64,
    #[arg(long, default_value_t = 0.5)]
    epsilon_fraction: f64,
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    output: PathBuf,
}

/// Exit status 1: the inputs were fine but something did not verify.
#[derive(Debug)]
struct Rejected(String);

impl std::fmt::Display for Rejected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Rejected {}

fn rejected(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Rejected(msg.into()))
}

/// Numerical failures of a well-formed input count as rejections.
fn classify(e: Error) -> anyhow::Error {
    match e {
        Error::ConditioningExceeded { .. }
        | Error::NoSpectralGap { .. }
        | Error::NoConvergence { .. }
        | Error::QrNoConvergence { .. }
        | Error::Overflow(_) => rejected(e.to_string()),
        other => anyhow!(other),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn read_matrix(path: &Path) -> anyhow::Result<Matrix> {
    parse_matrix(&read(path)?).with_context(|| format!("invalid matrix file {}", path.display()))
}

fn construct(args: ConstructArgs) -> anyhow::Result<bool> {
    let a = read_matrix(&args.input)?;
    if !(args.epsilon > 0.0 && args.epsilon.is_finite()) {
        bail!("--epsilon must be positive and finite, got {}", args.epsilon);
    }
    if !(args.max_kappa >= 1.0) {
        bail!("--max-kappa must be at least 1, got {}", args.max_kappa);
    }
    let options = NormOptions {
        max_kappa: args.max_kappa,
        ..NormOptions::default()
    };
    let (w, _) = construct_norm_with(&a, args.epsilon, &options).map_err(classify)?;
    info!("selected t = {:e}, kappa = {:e}", w.t(), w.kappa());
    let cert = verify_certificate(&w, &a, 1000, 0).map_err(classify)?;
    write(&args.output, &emit_certificate(&cert, &w, &a))?;
    let mut doc = certificate_document(&cert);
    doc.set("output", args.output.display());
    print!("{}", doc.render());
    Ok(cert.verified)
}

fn agrees(stored: f64, fresh: f64) -> bool {
    (stored - fresh).abs() <= REPRODUCE_TOL * stored.abs().max(fresh.abs()).max(1.0)
}

fn verify(args: VerifyArgs) -> anyhow::Result<bool> {
    let a = read_matrix(&args.input)?;
    let file = load_certificate::<f64>(&read(&args.certificate)?)
        .with_context(|| format!("invalid certificate {}", args.certificate.display()))?;
    if args.trials == 0 {
        bail!("--trials must be positive");
    }
    let digest = matrix_digest(&a);
    if file.input_digest != digest {
        return Err(rejected(format!(
            "input digest mismatch: certificate has {}, matrix is {digest}",
            file.input_digest
        )));
    }
    let stored = &file.certificate;
    if file.p.dim() != a.dim() {
        return Err(rejected("certificate dimension does not match the matrix"));
    }
    let w = file
        .weighted_norm()
        .map_err(|e| rejected(format!("stored transforms rejected: {e}")))?;
    let fresh = verify_certificate(&w, &a, args.trials, args.seed).map_err(classify)?;

    let mut problems = Vec::new();
    for (name, s, f) in [
        ("rho", stored.rho, fresh.rho),
        ("norm_value", stored.norm_value, fresh.norm_value),
        ("kappa", stored.kappa, fresh.kappa),
        ("delta_norm", stored.delta_norm, fresh.delta_norm),
    ] {
        if !agrees(s, f) {
            problems.push(format!(
                "{name}: stored {} but recomputed {}",
                format_real(s),
                format_real(f)
            ));
        }
    }
    if !stored.verified {
        problems.push("certificate is marked unverified".into());
    }
    if !fresh.verified {
        problems.push(format!("re-verification failed: {:?}", fresh.checks));
    }
    for p in &problems {
        warn!("{p}");
    }
    let mut doc = certificate_document(&fresh);
    doc.set("mismatches", problems.len());
    doc.set("verified", problems.is_empty());
    print!("{}", doc.render());
    Ok(problems.is_empty())
}

fn norm(args: NormArgs) -> anyhow::Result<bool> {
    let file = load_certificate::<f64>(&read(&args.certificate)?)
        .with_context(|| format!("invalid certificate {}", args.certificate.display()))?;
    let w = file
        .weighted_norm()
        .map_err(|e| rejected(format!("stored transforms rejected: {e}")))?;
    let mut doc = Document::new();
    if let Some(path) = args.matrix {
        let m = read_matrix(&path)?;
        doc.set("kind", "matrix").set_real("value", w.matrix_norm(&m)?);
    } else if let Some(path) = args.vector {
        let x =
            parse_vector::<f64>(&read(&path)?).with_context(|| format!("invalid vector file {}", path.display()))?;
        doc.set("kind", "vector").set_real("value", w.vector_norm(&x)?);
    }
    print!("{}", doc.render());
    Ok(true)
}

fn spectrum(args: SpectrumArgs) -> anyhow::Result<bool> {
    let a = read_matrix(&args.input)?;
    if args.gelfand_k == 0 {
        bail!("--gelfand-k must be at least 1");
    }
    let found = eigenvalues(&a).map_err(|e| classify(e.into()))?;
    let gelfand = spectral_radius_gelfand(&a, args.gelfand_k).map_err(classify)?;
    let rel = (gelfand - found.rho).abs() / found.rho.max(1.0);
    debug!("eigenvalues: {:?}", found.eigenvalues);
    let lines = found.eigenvalues.iter().map(|&z| format_complex(z)).collect();
    let mut doc = Document::new();
    doc.set_block("eigenvalues", lines)
        .set("gelfand_k", args.gelfand_k)
        .set_real("gelfand_relative_difference", rel)
        .set("n", a.dim())
        .set_real("rho", found.rho)
        .set_real("rho_gelfand", gelfand);
    print!("{}", doc.render());
    Ok(true)
}

fn contract(args: ContractArgs) -> anyhow::Result<bool> {
    if args.steps == 0 {
        bail!("--steps must be positive");
    }
    let g = random_digraph(args.nodes, args.edge_prob, args.seed)?;
    let w: Matrix = row_stochastic_weights(&g, args.self_weight)?;
    let (norm, rate) = certify_contraction(&w, args.epsilon_fraction).map_err(classify)?;
    info!("certified rate {rate:e} with t = {:e}", norm.t());
    let x0 = seeded_initial_state(args.nodes, args.seed);
    let report = simulate_consensus(&w, &x0, args.steps, &norm).map_err(classify)?;
    let run = ContractionRun {
        graph: &g,
        edge_prob: args.edge_prob,
        seed: args.seed,
        self_weight: args.self_weight,
        epsilon_fraction: args.epsilon_fraction,
        steps: args.steps,
        t: norm.t(),
        kappa: norm.kappa(),
    };
    write(&args.output, &emit_report(&report, &run))?;
    let mut doc = Document::new();
    doc.set("certified", report.certified)
        .set_real("certified_rate", report.certified_rate)
        .set_real("max_ratio", report.max_ratio)
        .set("output", args.output.display())
        .set_real("rho", report.rho);
    print!("{}", doc.render());
    Ok(report.certified)
}

fn init_logging() -> Result<(), String> {
    let level = match std::env::var(LOG_ENV).as_deref() {
        Err(_) | Ok("") => LevelFilter::Warn,
        Ok("quiet") => LevelFilter::Off,
        Ok("info") => LevelFilter::Info,
        Ok("debug") => LevelFilter::Debug,
        Ok(other) => return Err(format!("{LOG_ENV} must be debug, info or quiet, got `{other}`")),
    };
    env_logger::Builder::new()
        .filter_level(level)
        .target(env_logger::Target::Stderr)
        .format_timestamp(None)
        .init();
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = init_logging() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let outcome = match cli.command {
        Command::Construct(a) => construct(a),
        Command::Verify(a) => verify(a),
        Command::Norm(a) => norm(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Contract(a) => contract(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<Rejected>() => {
            eprintln!("verification failed: {e:#}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
