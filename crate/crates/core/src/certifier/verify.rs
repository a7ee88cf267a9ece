//! Exact, solver-free verification of a certificate file.

use std::fmt;

use num_traits::{Signed, Zero};

use super::certificate::{CertificateFile, Witness, CERTIFICATE_VERSION};
use super::order_unit::{laplacian_squares, sum_of_squares, OrderUnitTable, Square};
use super::{absorption_squares, compute_residual, residual_bound, table_radius};
use crate::algebra::{ExactElement, Measure};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::sos::kazhdan_target;

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Accept { kappa_certified: Rational },
    Reject { check: String, detail: String },
    Malformed { detail: String },
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Accept { .. } => 0,
            Verdict::Reject { .. } => 1,
            Verdict::Malformed { .. } => 2,
        }
    }

    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accept { kappa_certified } => write!(f, "ACCEPT kappa_certified={}", format_rational(kappa_certified)),
            Verdict::Reject { check, detail } => write!(f, "REJECT check={check}: {detail}"),
            Verdict::Malformed { detail } => write!(f, "MALFORMED: {detail}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    /// Checks that passed, in order.
    pub passed: Vec<&'static str>,
    pub recomputed_bound: Option<Rational>,
    pub verdict: Verdict,
}

struct Run {
    passed: Vec<&'static str>,
    recomputed_bound: Option<Rational>,
}

impl Run {
    fn check(&mut self, name: &'static str, ok: bool, detail: impl FnOnce() -> String) -> std::result::Result<(), Verdict> {
        if ok {
            self.passed.push(name);
            Ok(())
        } else {
            Err(Verdict::Reject { check: name.to_string(), detail: detail() })
        }
    }
}

fn malformed(e: Error) -> Verdict {
    Verdict::Malformed { detail: e.to_string() }
}

/// Verifies certificate text. Resource-cap failures are returned as errors;
/// everything else becomes a verdict.
pub fn verify_text(spec: &GroupSpec, text: &str, ball_cap: usize) -> Result<VerificationReport> {
    match CertificateFile::from_json(text) {
        Ok(file) => verify(spec, &file, ball_cap),
        Err(e) => Ok(VerificationReport { passed: vec![], recomputed_bound: None, verdict: malformed(e) }),
    }
}

pub fn verify(spec: &GroupSpec, file: &CertificateFile, ball_cap: usize) -> Result<VerificationReport> {
    let mut run = Run { passed: Vec::new(), recomputed_bound: None };
    let verdict = match run_checks(spec, file, ball_cap, &mut run) {
        Ok(kappa_certified) => Verdict::Accept { kappa_certified },
        Err(Ok(v)) => v,
        Err(Err(e)) => return Err(e),
    };
    Ok(VerificationReport { passed: run.passed, recomputed_bound: run.recomputed_bound, verdict })
}

type Step<T> = std::result::Result<T, std::result::Result<Verdict, Error>>;

fn resource_or(e: Error, verdict: impl FnOnce(Error) -> Verdict) -> std::result::Result<Verdict, Error> {
    match e {
        Error::Resource { .. } => Err(e),
        other => Ok(verdict(other)),
    }
}

fn run_checks(spec: &GroupSpec, file: &CertificateFile, ball_cap: usize, run: &mut Run) -> Step<Rational> {
    if file.version != CERTIFICATE_VERSION {
        return Err(Ok(Verdict::Malformed { detail: format!("unsupported version {:?}", file.version) }));
    }
    run.passed.push("version");

    let parse = |s: &str| parse_rational(s).map_err(|e| Ok(malformed(e)));
    let kappa_input = parse(&file.kappa_input)?;
    let claimed_bound = parse(&file.residual_bound)?;
    let kappa_certified = parse(&file.kappa_certified)?;
    let mut witnesses = Vec::with_capacity(file.witnesses.len());
    for w in &file.witnesses {
        let xi = ExactElement::from_pairs(spec, &w.xi).map_err(|e| Ok(malformed(e)))?;
        witnesses.push(Witness { weight: parse(&w.weight)?, xi });
    }
    let mut mu_weights = Vec::with_capacity(file.mu.len());
    for (k, v) in &file.mu {
        mu_weights.push((spec.parse_key(k).map_err(|e| Ok(malformed(e)))?, parse(v)?));
    }
    run.passed.push("parse");

    run.check("spec_digest", file.spec_digest == spec.digest(), || {
        format!("certificate digest {} does not match group {}", file.spec_digest, spec.digest())
    })
    .map_err(Ok)?;

    let mu = match Measure::new(spec, mu_weights) {
        Ok(mu) => mu,
        Err(e) => return Err(resource_or(e, |e| Verdict::Reject { check: "measure".into(), detail: e.to_string() })),
    };
    run.passed.push("measure");

    let ball = spec
        .enumerate_ball(&mu.support(), file.radius, ball_cap)
        .map_err(|e| resource_or(e, |e| Verdict::Reject { check: "ball_digest".into(), detail: e.to_string() }))?;
    run.check("ball_digest", ball.ordering_digest() == file.ball_digest, || "ball ordering digest mismatch".into())
        .map_err(Ok)?;

    for (i, w) in witnesses.iter().enumerate() {
        run.check("weight_positive", w.weight.is_positive(), || format!("witness {i} has weight {}", w.weight))
            .map_err(Ok)?;
    }
    for (i, w) in witnesses.iter().enumerate() {
        run.check("augmentation", w.xi.augmentation().is_zero(), || format!("witness {i} has nonzero augmentation"))
            .map_err(Ok)?;
    }
    for (i, w) in witnesses.iter().enumerate() {
        run.check("support", w.xi.support().all(|g| ball.contains(g)), || format!("witness {i} leaves the ball"))
            .map_err(Ok)?;
    }

    let eta = compute_residual(spec, &mu, &kappa_input, &witnesses)
        .map_err(|e| resource_or(e, |e| Verdict::Reject { check: "residual".into(), detail: e.to_string() }))?;
    run.passed.push("residual");

    let table = OrderUnitTable::build(spec, &mu, table_radius(file.radius), ball_cap)
        .map_err(|e| resource_or(e, |e| Verdict::Reject { check: "residual_bound".into(), detail: e.to_string() }))?;
    let bound = residual_bound(spec, &eta, &table)
        .map_err(|e| resource_or(e, |e| Verdict::Reject { check: "residual_bound".into(), detail: e.to_string() }))?;
    run.recomputed_bound = Some(bound.clone());
    run.check("residual_bound", bound <= claimed_bound, || {
        format!("recomputed bound {} exceeds claimed {}", format_rational(&bound), format_rational(&claimed_bound))
    })
    .map_err(Ok)?;

    run.check("kappa_consistency", kappa_certified == &kappa_input - &claimed_bound, || {
        "kappa_certified differs from kappa_input - residual_bound".into()
    })
    .map_err(Ok)?;
    run.check("kappa_bound", &kappa_input - &bound >= kappa_certified, || {
        "kappa_certified exceeds kappa_input - recomputed bound".into()
    })
    .map_err(Ok)?;
    run.check("kappa_positive", kappa_certified.is_positive(), || "kappa_certified is not positive".into())
        .map_err(Ok)?;
    Ok(kappa_certified)
}

/// Every square of the full identity `Δ² − κ_c Δ = Σ`, with the residual
/// absorbed explicitly. For accepted certificates the sum reproduces the
/// left-hand side exactly.
pub fn expand_identity(spec: &GroupSpec, file: &CertificateFile, ball_cap: usize) -> Result<Vec<Square>> {
    let cert = file.decode(spec)?;
    let eta = compute_residual(spec, &cert.mu, &cert.kappa_input, &cert.witnesses)?;
    let table = OrderUnitTable::build(spec, &cert.mu, table_radius(cert.radius), ball_cap)?;
    let bound = residual_bound(spec, &eta, &table)?;
    let slack = &cert.residual_bound - &bound;
    if slack.is_negative() {
        return Err(Error::Validation("claimed residual bound is below the recomputed one".into()));
    }
    let mut squares: Vec<Square> =
        cert.witnesses.iter().map(|w| Square { weight: w.weight.clone(), xi: w.xi.clone() }).collect();
    squares.extend(absorption_squares(spec, &eta, &table)?);
    if !slack.is_zero() {
        squares.extend(
            laplacian_squares(spec, &cert.mu).into_iter().map(|sq| Square { weight: sq.weight * &slack, xi: sq.xi }),
        );
    }
    Ok(squares)
}

/// Checks `Σ squares == Δ² − κ_c Δ` with every weight non-negative and
/// every ξ in the augmentation ideal.
pub fn check_expansion(spec: &GroupSpec, file: &CertificateFile, ball_cap: usize) -> Result<bool> {
    let cert = file.decode(spec)?;
    let squares = expand_identity(spec, file, ball_cap)?;
    if squares.iter().any(|s| s.weight.is_negative() || !s.xi.augmentation().is_zero()) {
        return Ok(false);
    }
    Ok(sum_of_squares(spec, &squares)? == kazhdan_target(spec, &cert.mu, &cert.kappa_certified)?)
}
