//! From a numeric Gram matrix to an exact certificate, and back to an
//! exact verdict.
//!
//! The pipeline is `rationalize_and_factor` → `compute_residual` →
//! `residual_bound`. Whatever the rounded witnesses miss is the residual
//! η; since Δ is an order unit of Σ²I[Γ], `B·Δ + η` is itself a sum of
//! squares for the explicit B returned by [`residual_bound`], so
//! `Δ² − (κ − B)Δ = Σ rᵢξᵢ*ξᵢ + (η + BΔ)` certifies κ − B.

mod certificate;
mod order_unit;
mod verify;

pub use certificate::{Certificate, CertificateFile, Metadata, Witness, CERTIFICATE_VERSION};
pub use order_unit::{laplacian_squares, sum_of_squares, Derivation, OrderUnitCoefficient, OrderUnitTable, Square};
pub use verify::{check_expansion, expand_identity, verify, verify_text, Verdict, VerificationReport};

use num_traits::{Signed, Zero};

use crate::algebra::{ExactElement, Measure};
use crate::error::{Error, Result};
use crate::group::{Ball, GroupElement, GroupSpec};
use crate::linalg::{ldlt, min_eigenvalue, ones_complement_basis, LdltOutcome, RatMatrix};
use crate::rational::{best_approximation, round_up, Rational};
use crate::sos::{kazhdan_target, GramMatrix};

/// Exact factorization of a rounded Gram matrix.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub witnesses: Vec<Witness>,
    /// Multiple of `I − J/n` added to repair negative pivots (zero if none).
    pub shift: Rational,
    /// The exact matrix that was factored.
    pub matrix: RatMatrix,
}

/// Exact LDLᵀ of a rational Gram matrix over `basis`; fails on any negative pivot.
pub fn factor_exact(q: &RatMatrix, basis: &[GroupElement]) -> Result<Vec<Witness>> {
    match ldlt(q) {
        LdltOutcome::Psd(pivots) => Ok(pivots
            .into_iter()
            .map(|p| Witness { weight: p.d, xi: ExactElement::from_vector(basis, &p.l) })
            .collect()),
        LdltOutcome::Indefinite { step } => {
            Err(Error::Factorization(format!("matrix is not positive semidefinite (elimination step {step})")))
        }
    }
}

/// Rounds a numeric Gram matrix to rationals, projects it exactly onto
/// `Q·1 = 0`, and factors it; negative pivots are repaired once by a
/// shift along `I − J/n`.
pub fn rationalize_and_factor(q: &GramMatrix, basis: &[GroupElement], denom_cap: u64) -> Result<Factorization> {
    let n = q.dim();
    if basis.len() != n {
        return Err(Error::Usage(format!("basis has {} elements for a {n}×{n} matrix", basis.len())));
    }
    let mut rounded = RatMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v = best_approximation(0.5 * (q.0[(i, j)] + q.0[(j, i)]), denom_cap)?;
            rounded.set(i, j, v.clone());
            rounded.set(j, i, v);
        }
    }
    let projected = rounded.project_zero_row_sums();
    if let Ok(witnesses) = factor_exact(&projected, basis) {
        return Ok(Factorization { witnesses, shift: Rational::zero(), matrix: projected });
    }

    let v = ones_complement_basis(n);
    let restricted = v.transpose() * projected.to_float() * &v;
    let deficit = (-min_eigenvalue(&restricted)).max(0.0);
    let shift = round_up(2.0 * deficit + 1e-12, denom_cap)?;
    let nn = Rational::from_integer((n as i64).into());
    let shifted = RatMatrix::from_fn(n, |i, j| {
        let p = if i == j { Rational::from_integer(1.into()) } else { Rational::zero() } - Rational::from_integer(1.into()) / &nn;
        projected.get(i, j) + &shift * p
    });
    match factor_exact(&shifted, basis) {
        Ok(witnesses) => Ok(Factorization { witnesses, shift, matrix: shifted }),
        Err(_) => Err(Error::Factorization(format!(
            "rounded matrix stays indefinite after a shift of {shift}; use a smaller tol or a larger denom_cap"
        ))),
    }
}

/// `η = Δ² − κΔ − Σ rᵢξᵢ*ξᵢ`.
pub fn compute_residual(spec: &GroupSpec, mu: &Measure, kappa: &Rational, witnesses: &[Witness]) -> Result<ExactElement> {
    for (i, w) in witnesses.iter().enumerate() {
        if !w.xi.augmentation().is_zero() {
            return Err(Error::Validation(format!("certificate malformed: witness {i} is not in the augmentation ideal")));
        }
    }
    let mut eta = kazhdan_target(spec, mu, kappa)?;
    for w in witnesses {
        eta = eta.sub(&w.xi.hermitian_square(spec)?.scale(&w.weight));
    }
    if !eta.augmentation().is_zero() || !eta.is_hermitian(spec)? {
        return Err(Error::Internal("residual is not a hermitian element of the augmentation ideal".into()));
    }
    Ok(eta)
}

/// Writes a hermitian η with zero augmentation as `Σ_x a_x (x + x⁻¹ − 2)`,
/// one representative x per pair {x, x⁻¹}, x ≠ 1.
pub fn decompose_residual(spec: &GroupSpec, eta: &ExactElement) -> Result<Vec<(GroupElement, Rational)>> {
    if !eta.is_hermitian(spec)? || !eta.augmentation().is_zero() {
        return Err(Error::Validation("residual must be hermitian with zero augmentation".into()));
    }
    let identity = spec.identity();
    let half = Rational::new(1.into(), 2.into());
    let mut terms = Vec::new();
    let mut total = Rational::zero();
    for (x, c) in eta.iter() {
        if *x == identity {
            continue;
        }
        let inv = spec.inverse(x)?;
        if inv < *x {
            continue;
        }
        let a = if inv == *x { c * &half } else { c.clone() };
        total += &a;
        terms.push((x.clone(), a));
    }
    if eta.coeff(&identity) != -(total * Rational::from_integer(2.into())) {
        return Err(Error::Internal("identity coefficient inconsistent with the pair decomposition".into()));
    }
    Ok(terms)
}

/// Picks the cheaper of `c(x)`, `c(x⁻¹)`; both bound the same square.
fn cheapest(spec: &GroupSpec, table: &OrderUnitTable, x: &GroupElement) -> Result<(GroupElement, Rational)> {
    let inv = spec.inverse(x)?;
    let mut options: Vec<(GroupElement, Rational)> = [x.clone(), inv]
        .into_iter()
        .filter_map(|g| table.coeff(&g).cloned().map(|c| (g, c)))
        .collect();
    options.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    options.into_iter().next().ok_or_else(|| Error::Unreachable {
        element: spec.key(x),
        radius: table.radius(),
    })
}

/// `B = Σ_x |a_x|·c(x)`, so that `B·Δ + η ∈ Σ²I[Γ]`.
pub fn residual_bound(spec: &GroupSpec, eta: &ExactElement, table: &OrderUnitTable) -> Result<Rational> {
    let mut bound = Rational::zero();
    for (x, a) in decompose_residual(spec, eta)? {
        let (_, c) = cheapest(spec, table, &x)?;
        bound += a.abs() * c;
    }
    Ok(bound)
}

/// Explicit squares summing to `B·Δ + η`.
pub fn absorption_squares(spec: &GroupSpec, eta: &ExactElement, table: &OrderUnitTable) -> Result<Vec<Square>> {
    let one = ExactElement::one(spec);
    let lap_squares = laplacian_squares(spec, table.measure());
    let mut out = Vec::new();
    for (x, a) in decompose_residual(spec, eta)? {
        let (y, c) = cheapest(spec, table, &x)?;
        // η ∋ −a·(1−y)*(1−y)
        if a.is_positive() {
            // a·(c(y)Δ − (1−y)*(1−y))
            out.extend(table.expansion(spec, &y)?.into_iter().map(|sq| Square { weight: &sq.weight * &a, xi: sq.xi }));
        } else {
            // |a|·c(y)·Δ + |a|·(1−y)*(1−y)
            let abs = a.abs();
            let scale = &abs * &c;
            out.extend(lap_squares.iter().map(|sq| Square { weight: &sq.weight * &scale, xi: sq.xi.clone() }));
            out.push(Square { weight: abs, xi: one.sub(&ExactElement::basis(y)) });
        }
    }
    Ok(out)
}

/// Radius of the order-unit table needed for residuals of witnesses
/// supported in a ball of the given radius.
pub fn table_radius(ball_radius: usize) -> usize {
    2 * ball_radius.max(1)
}

/// Diagnostics for a rejected certification attempt.
#[derive(Clone, Debug, PartialEq)]
pub struct Rejection {
    pub kappa_input: Rational,
    pub residual_bound: Rational,
    pub residual_l1: Rational,
    pub kappa_certified: Rational,
    pub suggestion: String,
}

#[derive(Clone, Debug)]
pub enum CertifyOutcome {
    Accepted(Certificate),
    Rejected(Rejection),
}

/// Inputs describing the numeric solution to certify.
#[derive(Clone, Debug)]
pub struct SolverOutput<'a> {
    pub ball: &'a Ball,
    pub q: &'a GramMatrix,
    pub iterations: usize,
}

/// Rounds, factors, and absorbs the residual; accepts iff `κ − B > 0`.
pub fn certify(
    spec: &GroupSpec,
    mu: &Measure,
    kappa_input: &Rational,
    output: SolverOutput<'_>,
    denom_cap: u64,
    ball_cap: usize,
) -> Result<CertifyOutcome> {
    let fact = rationalize_and_factor(output.q, output.ball.elements(), denom_cap)?;
    let mut metadata = Metadata::new("sdp");
    metadata.solver_iterations = output.iterations;
    metadata.denom_cap = denom_cap;
    metadata.pivot_shift = fact.shift.clone();
    assemble(spec, mu, output.ball, kappa_input, fact.witnesses, metadata, ball_cap)
}

/// Builds a certificate from exact witnesses (residual absorption included).
pub fn assemble(
    spec: &GroupSpec,
    mu: &Measure,
    ball: &Ball,
    kappa_input: &Rational,
    witnesses: Vec<Witness>,
    metadata: Metadata,
    ball_cap: usize,
) -> Result<CertifyOutcome> {
    let eta = compute_residual(spec, mu, kappa_input, &witnesses)?;
    let table = OrderUnitTable::build(spec, mu, table_radius(ball.radius()), ball_cap)?;
    let bound = residual_bound(spec, &eta, &table)?;
    let kappa_certified = kappa_input - &bound;
    if !kappa_certified.is_positive() {
        return Ok(CertifyOutcome::Rejected(Rejection {
            kappa_input: kappa_input.clone(),
            residual_l1: eta.l1_norm(),
            residual_bound: bound,
            kappa_certified,
            suggestion: "no certificate at this radius; tighten tol, raise denom_cap, lower kappa, or enlarge the radius"
                .into(),
        }));
    }
    Ok(CertifyOutcome::Accepted(Certificate {
        spec_digest: spec.digest().to_string(),
        mu: mu.clone(),
        radius: ball.radius(),
        ball_digest: ball.ordering_digest(),
        kappa_input: kappa_input.clone(),
        witnesses,
        residual_bound: bound,
        kappa_certified,
        metadata,
    }))
}
