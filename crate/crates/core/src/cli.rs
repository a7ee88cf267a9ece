//! Command-line front end: argument parsing, run configuration and the
//! five subcommands.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::algebra::Measure;
use crate::certifier::{self, verify_text, CertifyOutcome, SolverOutput};
use crate::error::{Error, Result};
use crate::group::{GroupSpec, DEFAULT_BALL_CAP};
use crate::oracle::spectral_gap_exact;
use crate::rational::{format_rational, parse_rational, to_f64, Rational};
use crate::sos::{build_problem, maximize_kappa, solve_feasibility, SolveOutcome, SolverOptions};
use crate::zuk::{kappa_for, spectral_gap, zuk_certificate, LinkGraph, LINK_WITHOUT_EDGES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "ptcert", version, about = "Exact sum-of-squares certificates for Kazhdan's property (T)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the Cayley ball of the measure support.
    Ball(CommonArgs),
    /// Solve, round and certify a spectral gap.
    Certify(CommonArgs),
    /// Build the link graph of the generators and emit its certificate.
    Zuk(CommonArgs),
    /// Check a certificate file exactly (exit 0 accept, 1 reject, 2 malformed).
    Verify(VerifyArgs),
    /// Bracket the spectral gap of a finite group via its regular representation.
    OracleGap(CommonArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Group spec (JSON).
    #[arg(long)]
    pub group: PathBuf,
    /// `uniform` on the generators, or a JSON file `{"weights": {"key": "p/q", ...}}`.
    #[arg(long, default_value = "uniform")]
    pub mu: String,
    #[arg(long, default_value_t = 2)]
    pub radius: usize,
    /// `p/q`, an integer, or `max`.
    #[arg(long, default_value = "max")]
    pub kappa: String,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub denom_cap: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, default_value_t = DEFAULT_BALL_CAP)]
    pub ball_cap: usize,
    /// Override the link-graph gap estimate (`p/q`).
    #[arg(long)]
    pub lambda_hat: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Certificate file.
    pub certificate: PathBuf,
    #[arg(long)]
    pub group: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BALL_CAP)]
    pub ball_cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubcommandKind {
    Ball,
    Certify,
    Zuk,
    Verify,
    OracleGap,
}

impl SubcommandKind {
    fn name(self) -> &'static str {
        match self {
            SubcommandKind::Ball => "ball",
            SubcommandKind::Certify => "certify",
            SubcommandKind::Zuk => "zuk",
            SubcommandKind::Verify => "verify",
            SubcommandKind::OracleGap => "oracle-gap",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MuSpec {
    Uniform,
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub enum KappaSpec {
    Maximize,
    Value(Rational),
}

/// Fully parsed configuration of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub subcommand: SubcommandKind,
    pub group: PathBuf,
    pub mu: MuSpec,
    pub radius: usize,
    pub kappa: KappaSpec,
    pub tol: f64,
    pub denom_cap: u64,
    pub out: Option<PathBuf>,
    pub ball_cap: usize,
    pub threads: usize,
    pub lambda_hat: Option<Rational>,
    pub certificate: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let (subcommand, args) = match cli.command {
            Command::Ball(a) => (SubcommandKind::Ball, a),
            Command::Certify(a) => (SubcommandKind::Certify, a),
            Command::Zuk(a) => (SubcommandKind::Zuk, a),
            Command::OracleGap(a) => (SubcommandKind::OracleGap, a),
            Command::Verify(v) => {
                return Ok(Self {
                    subcommand: SubcommandKind::Verify,
                    group: v.group,
                    mu: MuSpec::Uniform,
                    radius: 2,
                    kappa: KappaSpec::Maximize,
                    tol: 1e-9,
                    denom_cap: 1_000_000,
                    out: None,
                    ball_cap: v.ball_cap,
                    threads: 1,
                    lambda_hat: None,
                    certificate: Some(v.certificate),
                })
            }
        };
        let mu = match args.mu.as_str() {
            "uniform" => MuSpec::Uniform,
            path => MuSpec::File(PathBuf::from(path)),
        };
        let kappa = match args.kappa.as_str() {
            "max" | "maximize" => KappaSpec::Maximize,
            text => KappaSpec::Value(parse_rational(text).map_err(|_| Error::Usage(format!("bad --kappa {text:?}")))?),
        };
        if !(args.tol.is_finite() && args.tol > 0.0) {
            return Err(Error::Usage(format!("--tol must be positive, got {}", args.tol)));
        }
        if args.denom_cap == 0 || args.threads == 0 {
            return Err(Error::Usage("--denom-cap and --threads must be positive".into()));
        }
        let lambda_hat = args
            .lambda_hat
            .as_deref()
            .map(|s| parse_rational(s).map_err(|_| Error::Usage(format!("bad --lambda-hat {s:?}"))))
            .transpose()?;
        Ok(Self {
            subcommand,
            group: args.group,
            mu,
            radius: args.radius,
            kappa,
            tol: args.tol,
            denom_cap: args.denom_cap,
            out: args.out,
            ball_cap: args.ball_cap,
            threads: args.threads,
            lambda_hat,
            certificate: None,
        })
    }

    /// Every setting that affects the result, as strings. Output paths are
    /// left out so that the same run written elsewhere is byte-identical.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("subcommand".into(), self.subcommand.name().into());
        m.insert("group".into(), self.group.display().to_string());
        m.insert("ball_cap".into(), self.ball_cap.to_string());
        if let Some(c) = &self.certificate {
            m.insert("certificate".into(), c.display().to_string());
            return m;
        }
        m.insert(
            "mu".into(),
            match &self.mu {
                MuSpec::Uniform => "uniform".into(),
                MuSpec::File(p) => p.display().to_string(),
            },
        );
        m.insert("radius".into(), self.radius.to_string());
        m.insert(
            "kappa".into(),
            match &self.kappa {
                KappaSpec::Maximize => "max".into(),
                KappaSpec::Value(k) => format_rational(k),
            },
        );
        m.insert("tol".into(), format!("{:e}", self.tol));
        m.insert("denom_cap".into(), self.denom_cap.to_string());
        m.insert("threads".into(), self.threads.to_string());
        if let Some(l) = &self.lambda_hat {
            m.insert("lambda_hat".into(), format_rational(l));
        }
        m
    }

    fn solver_options(&self) -> SolverOptions {
        SolverOptions { tol: self.tol, ..SolverOptions::default() }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureFile {
    weights: BTreeMap<String, String>,
}

pub fn load_measure(spec: &GroupSpec, mu: &MuSpec) -> Result<Measure> {
    match mu {
        MuSpec::Uniform => Measure::uniform_on_generators(spec),
        MuSpec::File(path) => {
            let text = read(path)?;
            let file: MeasureFile =
                serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
            let pairs: Vec<(String, String)> = file.weights.into_iter().collect();
            Measure::from_pairs(spec, &pairs)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Usage(_) | Error::Validation(_) | Error::Malformed(_) => EXIT_MALFORMED,
        Error::Resource { .. } | Error::Unreachable { .. } => EXIT_RESOURCE,
        Error::StructuralInfeasibility { .. } | Error::Numeric(_) | Error::Factorization(_) => EXIT_REJECTED,
        Error::Internal(_) => EXIT_INTERNAL,
    }
}

/// Runs one subcommand, writing the human-readable output to `out`.
pub fn run_to(config: &RunConfig, out: &mut dyn Write) -> i32 {
    match dispatch(config, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            exit_code_for(&e)
        }
    }
}

pub fn run(config: &RunConfig) -> i32 {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    run_to(config, &mut lock)
}

/// Parses process arguments and runs; clap errors map to exit 2.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match RunConfig::from_cli(cli) {
        Ok(config) => run(&config),
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Internal(format!("output: {e}"))
}

fn header(config: &RunConfig, spec: &GroupSpec, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "ptcert {} {}", env!("CARGO_PKG_VERSION"), config.subcommand.name()).map_err(io)?;
    writeln!(out, "spec_digest {}", spec.digest()).map_err(io)?;
    for (k, v) in config.echo() {
        writeln!(out, "config {k} {v}").map_err(io)?;
    }
    Ok(())
}

fn dispatch(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let spec = GroupSpec::from_path(&config.group)?;
    header(config, &spec, out)?;
    match config.subcommand {
        SubcommandKind::Ball => run_ball(config, &spec, out),
        SubcommandKind::Certify => run_certify(config, &spec, out),
        SubcommandKind::Zuk => run_zuk(config, &spec, out),
        SubcommandKind::Verify => run_verify(config, &spec, out),
        SubcommandKind::OracleGap => run_oracle(config, &spec, out),
    }
}

fn run_ball(config: &RunConfig, spec: &GroupSpec, out: &mut dyn Write) -> Result<i32> {
    let mu = load_measure(spec, &config.mu)?;
    let ball = spec.enumerate_ball(&mu.support(), config.radius, config.ball_cap)?;
    let mut text = format!("radius {}\nsize {}\nball_digest {}\n", ball.radius(), ball.len(), ball.ordering_digest());
    for (i, g) in ball.elements().iter().enumerate() {
        text.push_str(&format!("{i} {} {}\n", ball.word_length(i), spec.key(g)));
    }
    match &config.out {
        Some(path) => {
            write(path, &text)?;
            writeln!(out, "radius {} size {} written to {}", ball.radius(), ball.len(), path.display()).map_err(io)?;
        }
        None => out.write_all(text.as_bytes()).map_err(io)?,
    }
    Ok(EXIT_OK)
}

fn certificate_path(config: &RunConfig) -> PathBuf {
    config.out.clone().unwrap_or_else(|| PathBuf::from("certificate.json"))
}

fn report_path(cert: &Path) -> PathBuf {
    let mut s = cert.as_os_str().to_owned();
    s.push(".report.txt");
    PathBuf::from(s)
}

fn run_certify(config: &RunConfig, spec: &GroupSpec, out: &mut dyn Write) -> Result<i32> {
    let mu = load_measure(spec, &config.mu)?;
    let ball = spec.enumerate_ball(&mu.support(), config.radius, config.ball_cap)?;
    let opts = config.solver_options();
    writeln!(out, "ball radius {} size {}", ball.radius(), ball.len()).map_err(io)?;

    let (kappa, q, stats) = match &config.kappa {
        KappaSpec::Maximize => {
            let search = maximize_kappa(spec, &ball, &mu, &opts)?;
            writeln!(out, "kappa_best {} ({:.9})", format_rational(&search.kappa), search.kappa_f64()).map_err(io)?;
            writeln!(out, "bisection probes {}", search.probes.len()).map_err(io)?;
            (search.kappa, search.q, search.stats)
        }
        KappaSpec::Value(k) => {
            let problem = build_problem(spec, &ball, &mu, k)?;
            match solve_feasibility(&problem, &opts)? {
                SolveOutcome::Feasible { q, stats } => (k.clone(), q, stats),
                SolveOutcome::Stalled { stats, reason } => {
                    writeln!(out, "no certificate found at this radius: solver stalled ({reason})").map_err(io)?;
                    writeln!(
                        out,
                        "solver iterations {} affine_violation {:e} min_eigenvalue {:e}",
                        stats.iterations, stats.affine_violation, stats.min_eigenvalue
                    )
                    .map_err(io)?;
                    return Ok(EXIT_REJECTED);
                }
            }
        }
    };
    writeln!(
        out,
        "solver iterations {} affine_violation {:e} min_eigenvalue {:e} row_sum_violation {:e}",
        stats.iterations, stats.affine_violation, stats.min_eigenvalue, stats.row_sum_violation
    )
    .map_err(io)?;

    let output = SolverOutput { ball: &ball, q: &q, iterations: stats.iterations };
    match certifier::certify(spec, &mu, &kappa, output, config.denom_cap, config.ball_cap)? {
        CertifyOutcome::Accepted(mut cert) => {
            cert.metadata.threads = config.threads;
            cert.metadata.config = config.echo();
            let path = certificate_path(config);
            write(&path, &cert.to_json())?;
            let report = format!(
                "kappa_input {}\nresidual_bound {}\nkappa_certified {} ({:.9})\nwitnesses {}\npivot_shift {}\nsolver_iterations {}\naffine_violation {:e}\nmin_eigenvalue {:e}\nspec_digest {}\nball_digest {}\n",
                format_rational(&cert.kappa_input),
                format_rational(&cert.residual_bound),
                format_rational(&cert.kappa_certified),
                to_f64(&cert.kappa_certified),
                cert.witnesses.len(),
                format_rational(&cert.metadata.pivot_shift),
                stats.iterations,
                stats.affine_violation,
                stats.min_eigenvalue,
                cert.spec_digest,
                cert.ball_digest,
            );
            write(&report_path(&path), &report)?;
            out.write_all(report.as_bytes()).map_err(io)?;
            writeln!(out, "certificate written to {}", path.display()).map_err(io)?;
            Ok(EXIT_OK)
        }
        CertifyOutcome::Rejected(r) => {
            writeln!(
                out,
                "no certificate: kappa_input {} residual_bound {} residual_l1 {} kappa_certified {}\n{}",
                format_rational(&r.kappa_input),
                format_rational(&r.residual_bound),
                format_rational(&r.residual_l1),
                format_rational(&r.kappa_certified),
                r.suggestion
            )
            .map_err(io)?;
            Ok(EXIT_REJECTED)
        }
    }
}

fn run_zuk(config: &RunConfig, spec: &GroupSpec, out: &mut dyn Write) -> Result<i32> {
    let link = match LinkGraph::build(spec, &spec.generator_elements()) {
        Ok(link) => link,
        Err(Error::Validation(msg)) if msg == LINK_WITHOUT_EDGES => {
            writeln!(out, "{msg}; the criterion does not apply").map_err(io)?;
            return Ok(EXIT_REJECTED);
        }
        Err(e) => return Err(e),
    };
    out.write_all(link.describe(Some(spec)).as_bytes()).map_err(io)?;
    if !link.is_connected() {
        writeln!(out, "link graph is disconnected; the criterion does not apply").map_err(io)?;
        return Ok(EXIT_REJECTED);
    }
    let lambda = match &config.lambda_hat {
        Some(l) => l.clone(),
        None => {
            let (gap, lambda) = spectral_gap(&link)?;
            writeln!(out, "spectral_gap {gap:.12}").map_err(io)?;
            lambda
        }
    };
    writeln!(out, "lambda_hat {}", format_rational(&lambda)).map_err(io)?;
    if lambda.clone() * Rational::from_integer(2.into()) <= Rational::from_integer(1.into()) {
        writeln!(out, "lambda_hat is not above 1/2; the criterion gives no certificate").map_err(io)?;
        return Ok(EXIT_REJECTED);
    }
    let mut cert = match zuk_certificate(spec, &link, &lambda, config.ball_cap) {
        Ok(c) => c,
        Err(Error::Factorization(msg)) => {
            writeln!(out, "{msg}").map_err(io)?;
            return Ok(EXIT_REJECTED);
        }
        Err(e) => return Err(e),
    };
    cert.metadata.threads = config.threads;
    cert.metadata.config = config.echo();
    let path = certificate_path(config);
    write(&path, &cert.to_json())?;
    writeln!(out, "kappa_input {}", format_rational(&kappa_for(&lambda))).map_err(io)?;
    writeln!(out, "kappa_certified {}", format_rational(&cert.kappa_certified)).map_err(io)?;
    writeln!(out, "certificate written to {}", path.display()).map_err(io)?;
    Ok(EXIT_OK)
}

fn run_verify(config: &RunConfig, spec: &GroupSpec, out: &mut dyn Write) -> Result<i32> {
    let path = config.certificate.as_ref().ok_or_else(|| Error::Usage("no certificate path".into()))?;
    let text = read(path)?;
    let report = verify_text(spec, &text, config.ball_cap)?;
    writeln!(out, "checks passed: {}", report.passed.join(" ")).map_err(io)?;
    if let Some(b) = &report.recomputed_bound {
        writeln!(out, "recomputed residual_bound {}", format_rational(b)).map_err(io)?;
    }
    writeln!(out, "{}", report.verdict).map_err(io)?;
    Ok(report.verdict.exit_code())
}

fn run_oracle(config: &RunConfig, spec: &GroupSpec, out: &mut dyn Write) -> Result<i32> {
    let mu = load_measure(spec, &config.mu)?;
    let bracket = spectral_gap_exact(spec, &mu, config.ball_cap)?;
    writeln!(
        out,
        "lower {}\nupper {}\nestimate {:.12}",
        format_rational(&bracket.lower),
        format_rational(&bracket.upper),
        bracket.estimate
    )
    .map_err(io)?;
    Ok(EXIT_OK)
}
