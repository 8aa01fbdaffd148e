//! Text formats: matrix files, certificates, and `key = value` documents.
//!
//! Matrices are one row per line with comma-separated complex literals such
//! as `2`, `1i`, `-i`, `0.5-0.25i` or `1e-3+2.5e2i`. Blank lines and lines
//! starting with `#` are ignored.
//!
//! Documents are sorted `key = value` lines. Matrices inside a document span
//! several lines between `key = [` and a closing `]`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex;
use sha2::{Digest, Sha256};

use crate::contraction::{ContractionReport, Digraph};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::norm::{CertificateChecks, NormCertificate, WeightedNorm};
use crate::scalar::{cplx, Real};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CERTIFICATE_HEADER: &str = "# contraction-norm certificate";

fn parse_real<T: Real>(s: &str) -> std::result::Result<T, String> {
    if s.is_empty() {
        return Err("empty number".into());
    }
    let x = s.parse::<T>().map_err(|_| format!("invalid number `{s}`"))?;
    if !x.is_finite() {
        return Err(format!("non-finite literal `{s}`"));
    }
    Ok(x)
}

/// Coefficient of an imaginary part: empty, `+` and `-` stand for ±1.
fn parse_imag<T: Real>(s: &str) -> std::result::Result<T, String> {
    match s {
        "" | "+" => Ok(T::one()),
        "-" => Ok(-T::one()),
        _ => parse_real(s),
    }
}

/// Parses one complex literal.
pub fn parse_complex<T: Real>(text: &str) -> std::result::Result<Complex<T>, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty entry".into());
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(cplx(parse_real(s)?, T::zero()));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(cplx(parse_real(&body[..k])?, parse_imag(&body[k..])?)),
        None => Ok(cplx(T::zero(), parse_imag(body)?)),
    }
}

/// 17 significant digits for `f64`, 9 for `f32`.
pub fn format_real<T: Real>(x: T) -> String {
    format!("{:.*e}", T::SIG_DIGITS - 1, x)
}

pub fn format_complex<T: Real>(z: Complex<T>) -> String {
    if z.im == T::zero() {
        return format_real(z.re);
    }
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", format_real(z.re), format_real(z.im.abs()))
}

fn parse_rows_ragged<T: Real>(lines: &[(usize, &str)]) -> Result<Vec<Vec<Complex<T>>>> {
    let mut rows = Vec::new();
    for &(line_no, line) in lines {
        let mut row = Vec::new();
        let mut column = 1;
        for field in line.split(',') {
            let entry = parse_complex(field).map_err(|message| Error::Parse {
                line: line_no,
                column: column + (field.len() - field.trim_start().len()),
                message,
            })?;
            row.push(entry);
            column += field.chars().count() + 1;
        }
        rows.push(row);
    }
    Ok(rows)
}

fn parse_rows<T: Real>(lines: &[(usize, &str)]) -> Result<Vec<Vec<Complex<T>>>> {
    let rows = parse_rows_ragged::<T>(lines)?;
    for (row, &(line_no, _)) in rows.iter().zip(lines) {
        if row.len() != rows[0].len() {
            return Err(Error::Parse {
                line: line_no,
                column: 1,
                message: format!("row has {} entries, expected {}", row.len(), rows[0].len()),
            });
        }
    }
    Ok(rows)
}

fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim_end()))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .collect()
}

pub fn parse_matrix<T: Real>(text: &str) -> Result<ComplexMatrix<T>> {
    let rows = parse_rows::<T>(&content_lines(text))?;
    if rows.is_empty() {
        return Err(Error::Empty);
    }
    let cols = rows[0].len();
    if rows.len() != cols {
        return Err(Error::NotSquare { rows: rows.len(), cols });
    }
    ComplexMatrix::from_rows(rows)
}

/// Entries separated by commas, newlines, or both.
pub fn parse_vector<T: Real>(text: &str) -> Result<ComplexVector<T>> {
    let data: Vec<Complex<T>> = parse_rows_ragged(&content_lines(text))?.into_iter().flatten().collect();
    if data.is_empty() {
        return Err(Error::Empty);
    }
    ComplexVector::new(data)
}

pub fn emit_matrix<T: Real>(m: &ComplexMatrix<T>) -> String {
    let mut out = String::new();
    for i in 0..m.dim() {
        let row: Vec<String> = m.row(i).iter().map(|&z| format_complex(z)).collect();
        out.push_str(&row.join(", "));
        out.push('\n');
    }
    out
}

pub fn emit_vector<T: Real>(x: &ComplexVector<T>) -> String {
    let entries: Vec<String> = x.as_slice().iter().map(|&z| format_complex(z)).collect();
    entries.join(", ") + "\n"
}

/// `sha256:` followed by the hex digest of the canonical text of `m`.
pub fn matrix_digest<T: Real>(m: &ComplexMatrix<T>) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(emit_matrix(m).as_bytes())))
}

/// A value in a [`Document`].
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    /// Rendered scalar text: numbers, booleans, words.
    Scalar(String),
    /// Multi-line block between `[` and `]`.
    Block(Vec<String>),
}

/// Sorted `key = value` document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    fields: BTreeMap<String, Value>,
}

impl Document {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.fields.insert(key.to_owned(), Value::Scalar(value.to_string()));
        self
    }

    pub fn set_real<T: Real>(&mut self, key: &str, x: T) -> &mut Self {
        self.set(key, format_real(x))
    }

    pub fn set_opt_real<T: Real>(&mut self, key: &str, x: Option<T>) -> &mut Self {
        match x {
            Some(x) => self.set_real(key, x),
            None => self.set(key, "none"),
        }
    }

    pub fn set_opt_bool(&mut self, key: &str, b: Option<bool>) -> &mut Self {
        match b {
            Some(b) => self.set(key, b),
            None => self.set(key, "none"),
        }
    }

    pub fn set_reals<T: Real>(&mut self, key: &str, xs: &[T]) -> &mut Self {
        let items: Vec<String> = xs.iter().map(|&x| format_real(x)).collect();
        self.set(key, format!("[{}]", items.join(", ")))
    }

    pub fn set_block(&mut self, key: &str, lines: Vec<String>) -> &mut Self {
        self.fields.insert(key.to_owned(), Value::Block(lines));
        self
    }

    pub fn set_matrix<T: Real>(&mut self, key: &str, m: &ComplexMatrix<T>) -> &mut Self {
        self.set_block(key, emit_matrix(m).lines().map(str::to_owned).collect())
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.fields.keys().map(String::as_str)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.fields {
            match value {
                Value::Scalar(s) => {
                    let _ = writeln!(out, "{key} = {s}");
                }
                Value::Block(lines) => {
                    let _ = writeln!(out, "{key} = [");
                    for line in lines {
                        let _ = writeln!(out, "  {line}");
                    }
                    out.push_str("]\n");
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut fields = BTreeMap::new();
        let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
        while let Some((line_no, line)) = lines.next() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, rest) = trimmed.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                column: 1,
                message: "expected `key = value`".into(),
            })?;
            let key = key.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(Error::Parse {
                    line: line_no,
                    column: 1,
                    message: format!("invalid key `{key}`"),
                });
            }
            let rest = rest.trim();
            let value = if rest == "[" {
                let mut block = Vec::new();
                loop {
                    match lines.next() {
                        Some((_, l)) if l.trim() == "]" => break,
                        Some((_, l)) => block.push(l.trim().to_owned()),
                        None => {
                            return Err(Error::Parse {
                                line: line_no,
                                column: 1,
                                message: format!("unterminated block for `{key}`"),
                            })
                        }
                    }
                }
                Value::Block(block)
            } else {
                Value::Scalar(rest.to_owned())
            };
            if fields.insert(key.to_owned(), value).is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    column: 1,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self { fields })
    }

    fn field_error(key: &str, message: impl std::fmt::Display) -> Error {
        Error::InvalidArgument(format!("field `{key}`: {message}"))
    }

    pub fn scalar(&self, key: &str) -> Result<&str> {
        match self.fields.get(key) {
            Some(Value::Scalar(s)) => Ok(s),
            Some(Value::Block(_)) => Err(Self::field_error(key, "expected a single value")),
            None => Err(Self::field_error(key, "missing")),
        }
    }

    pub fn real<T: Real>(&self, key: &str) -> Result<T> {
        parse_real(self.scalar(key)?).map_err(|m| Self::field_error(key, m))
    }

    pub fn opt_real<T: Real>(&self, key: &str) -> Result<Option<T>> {
        match self.scalar(key)? {
            "none" => Ok(None),
            _ => self.real(key).map(Some),
        }
    }

    pub fn boolean(&self, key: &str) -> Result<bool> {
        match self.scalar(key)? {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(Self::field_error(key, format!("expected true or false, got `{other}`"))),
        }
    }

    pub fn opt_boolean(&self, key: &str) -> Result<Option<bool>> {
        match self.scalar(key)? {
            "none" => Ok(None),
            _ => self.boolean(key).map(Some),
        }
    }

    pub fn count(&self, key: &str) -> Result<usize> {
        let s = self.scalar(key)?;
        s.parse()
            .map_err(|_| Self::field_error(key, format!("expected an integer, got `{s}`")))
    }

    pub fn matrix<T: Real>(&self, key: &str) -> Result<ComplexMatrix<T>> {
        match self.fields.get(key) {
            Some(Value::Block(lines)) => parse_matrix(&lines.join("\n")).map_err(|e| Self::field_error(key, e)),
            Some(Value::Scalar(_)) => Err(Self::field_error(key, "expected a matrix block")),
            None => Err(Self::field_error(key, "missing")),
        }
    }
}

/// Contents of a certificate file.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateFile<T: Real> {
    pub version: String,
    pub input_digest: String,
    pub certificate: NormCertificate<T>,
    pub p: ComplexMatrix<T>,
    pub p_inv: ComplexMatrix<T>,
}

impl<T: Real> CertificateFile<T> {
    pub fn weighted_norm(&self) -> Result<WeightedNorm<T>> {
        WeightedNorm::from_parts(
            self.p.clone(),
            self.p_inv.clone(),
            self.certificate.t,
            self.certificate.epsilon,
        )
    }
}

/// Certificate fields as a document, without the transforms.
pub fn certificate_document<T: Real>(cert: &NormCertificate<T>) -> Document {
    let mut doc = Document::new();
    let c = &cert.checks;
    doc.set_real("delta_norm", cert.delta_norm)
        .set("delta_below_epsilon", c.delta_below_epsilon)
        .set_real("epsilon", cert.epsilon)
        .set_opt_bool("gelfand_agreement", c.gelfand_agreement)
        .set_opt_bool("induced_consistency", c.induced_consistency)
        .set_real("kappa", cert.kappa)
        .set_opt_real("max_trial_ratio", c.max_trial_ratio)
        .set_real("norm_value", cert.norm_value)
        .set_real("rho", cert.rho)
        .set_opt_real("rho_gelfand", cert.rho_gelfand)
        .set("sandwich", c.sandwich)
        .set_real("schur_residual", cert.schur_residual)
        .set_real("t", cert.t)
        .set("verified", cert.verified)
        .set_opt_bool("witness_attained", c.witness_attained)
        .set_opt_real("witness_ratio", c.witness_ratio);
    doc
}

/// Serializes a certificate with the transforms of `w` and the digest of the
/// source matrix.
pub fn emit_certificate<T: Real>(cert: &NormCertificate<T>, w: &WeightedNorm<T>, input: &ComplexMatrix<T>) -> String {
    let mut doc = certificate_document(cert);
    doc.set("input_digest", matrix_digest(input))
        .set("n", w.source_dim())
        .set_matrix("p", w.p())
        .set_matrix("p_inv", w.p_inv())
        .set("scalar", T::NAME)
        .set("version", TOOL_VERSION);
    format!("{CERTIFICATE_HEADER}\n{}", doc.render())
}

pub fn load_certificate<T: Real>(text: &str) -> Result<CertificateFile<T>> {
    let doc = Document::parse(text)?;
    let scalar = doc.scalar("scalar")?;
    if scalar != T::NAME {
        return Err(Error::InvalidArgument(format!(
            "certificate was written for {scalar}, expected {}",
            T::NAME
        )));
    }
    let n = doc.count("n")?;
    let p: ComplexMatrix<T> = doc.matrix("p")?;
    let p_inv: ComplexMatrix<T> = doc.matrix("p_inv")?;
    for (key, m) in [("p", &p), ("p_inv", &p_inv)] {
        if m.dim() != n {
            return Err(Error::InvalidArgument(format!(
                "field `{key}`: dimension {} does not match n = {n}",
                m.dim()
            )));
        }
    }
    let checks = CertificateChecks {
        sandwich: doc.boolean("sandwich")?,
        delta_below_epsilon: doc.boolean("delta_below_epsilon")?,
        gelfand_agreement: doc.opt_boolean("gelfand_agreement")?,
        max_trial_ratio: doc.opt_real("max_trial_ratio")?,
        induced_consistency: doc.opt_boolean("induced_consistency")?,
        witness_ratio: doc.opt_real("witness_ratio")?,
        witness_attained: doc.opt_boolean("witness_attained")?,
    };
    let certificate = NormCertificate {
        rho: doc.real("rho")?,
        rho_gelfand: doc.opt_real("rho_gelfand")?,
        norm_value: doc.real("norm_value")?,
        epsilon: doc.real("epsilon")?,
        t: doc.real("t")?,
        kappa: doc.real("kappa")?,
        delta_norm: doc.real("delta_norm")?,
        schur_residual: doc.real("schur_residual")?,
        checks,
        verified: doc.boolean("verified")?,
    };
    Ok(CertificateFile {
        version: doc.scalar("version")?.to_owned(),
        input_digest: doc.scalar("input_digest")?.to_owned(),
        certificate,
        p,
        p_inv,
    })
}

/// Run parameters recorded alongside a [`ContractionReport`].
#[derive(Debug, Clone)]
pub struct ContractionRun<'a> {
    pub graph: &'a Digraph,
    pub edge_prob: f64,
    pub seed: u64,
    pub self_weight: f64,
    pub epsilon_fraction: f64,
    pub steps: usize,
    pub t: f64,
    pub kappa: f64,
}

pub fn emit_report<T: Real>(report: &ContractionReport<T>, run: &ContractionRun<'_>) -> String {
    let edges: Vec<String> = run
        .graph
        .edges()
        .iter()
        .map(|&(i, j)| format!("{}->{}", i + 1, j + 1))
        .collect();
    let mut doc = Document::new();
    doc.set("certified", report.certified)
        .set_real("certified_rate", report.certified_rate)
        .set_real("conservation_drift", report.conservation_drift)
        .set("edge_prob", format_real(run.edge_prob))
        .set("edges", format!("[{}]", edges.join(", ")))
        .set("epsilon_fraction", format_real(run.epsilon_fraction))
        .set_reals("euclidean_norms", &report.euclidean_norms)
        .set_real("extinction_floor", report.extinction_floor)
        .set("kappa", format_real(run.kappa))
        .set_real("max_ratio", report.max_ratio)
        .set("nodes", run.graph.n())
        .set_real("rho", report.rho)
        .set("seed", run.seed)
        .set("self_weight", format_real(run.self_weight))
        .set_reals("step_norms", &report.step_norms)
        .set_reals("step_ratios", &report.step_ratios)
        .set("steps", run.steps)
        .set("t", format_real(run.t))
        .set("version", TOOL_VERSION);
    doc.render()
}
