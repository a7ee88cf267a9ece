//! Brute-force ground truth on finite groups via the left regular
//! representation.

use nalgebra::DMatrix;
use num_traits::{One, Zero};

use crate::algebra::{ExactElement, Measure};
use crate::error::{Error, Result};
use crate::group::{Ball, Family, GroupElement, GroupSpec};
use crate::linalg::{ldlt, min_eigenvalue, LdltOutcome, RatMatrix};
use crate::rational::{best_approximation, Rational};
use crate::sos::{GramProblem, SolveOutcome, SolverOptions, solve_feasibility};

/// π(g)δ_h = δ_{gh} on ℓ²(Γ).
#[derive(Clone, Debug)]
pub struct RegularRep {
    ball: Ball,
    /// `products[i * n + j]` is the index of `g_i g_j`.
    products: Vec<usize>,
}

impl RegularRep {
    pub fn new(spec: &GroupSpec, cap: usize) -> Result<Self> {
        if spec.family() == Family::FreeGroup {
            return Err(Error::Validation("the regular representation needs a finite group".into()));
        }
        let ball = spec.saturated_ball(&spec.generator_elements(), cap)?;
        if let Some(order) = spec.order() {
            if order != ball.len() {
                return Err(Error::Internal(format!("enumerated {} elements of a group of order {order}", ball.len())));
            }
        }
        let n = ball.len();
        let mut products = Vec::with_capacity(n * n);
        for g in ball.elements() {
            for h in ball.elements() {
                let gh = spec.multiply(g, h)?;
                products.push(ball.index_of(&gh).ok_or_else(|| Error::Internal("product left the group".into()))?);
            }
        }
        Ok(Self { ball, products })
    }

    pub fn dim(&self) -> usize {
        self.ball.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        self.ball.elements()
    }

    /// Saturated ball: every element of the group.
    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    fn index(&self, g: &GroupElement) -> Result<usize> {
        self.ball.index_of(g).ok_or_else(|| Error::Validation(format!("{g} is not in the group")))
    }

    /// π(a) as an exact matrix.
    pub fn matrix(&self, a: &ExactElement) -> Result<RatMatrix> {
        let n = self.dim();
        let mut m = RatMatrix::zeros(n);
        for (g, c) in a.iter() {
            let i = self.index(g)?;
            for h in 0..n {
                let row = self.products[i * n + h];
                let v = m.get(row, h) + c;
                m.set(row, h, v);
            }
        }
        Ok(m)
    }

    /// Permutation matrix of a single element.
    pub fn permutation(&self, g: &GroupElement) -> Result<RatMatrix> {
        self.matrix(&ExactElement::basis(g.clone()))
    }
}

/// `I − J/n`: projection onto the complement of constants.
fn nonconstant_projection(n: usize) -> RatMatrix {
    let inv = Rational::new(1.into(), (n as i64).into());
    RatMatrix::from_fn(n, |i, j| if i == j { Rational::one() - &inv } else { -inv.clone() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapBracket {
    pub lower: Rational,
    pub upper: Rational,
    pub estimate: f64,
}

impl GapBracket {
    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lower <= x && x <= &self.upper
    }
}

/// Smallest eigenvalue of π(Δ) on the complement of constants, bracketed
/// by exact PSD tests of `π(Δ) − t(I − P₀)`.
pub fn spectral_gap_exact(spec: &GroupSpec, mu: &Measure, cap: usize) -> Result<GapBracket> {
    let rep = RegularRep::new(spec, cap)?;
    let n = rep.dim();
    if n < 2 {
        return Err(Error::Validation("the trivial group has no spectral gap".into()));
    }
    let lap = rep.matrix(&mu.laplacian(spec)?)?;
    let estimate = min_eigenvalue(&(lap.to_float() + DMatrix::from_element(n, n, 3.0 / n as f64)));
    let proj = nonconstant_projection(n);

    // (PSD?, rank) of π(Δ) − t(I − P₀); constants are always in the kernel.
    let test = |t: &Rational| {
        let shifted = RatMatrix::from_fn(n, |i, j| lap.get(i, j) - t * proj.get(i, j));
        match ldlt(&shifted) {
            LdltOutcome::Psd(pivots) => (true, pivots.len()),
            LdltOutcome::Indefinite { .. } => (false, n),
        }
    };

    let guess = best_approximation(estimate, 1000)?;
    if let (true, rank) = test(&guess) {
        if rank < n - 1 {
            return Ok(GapBracket { lower: guess.clone(), upper: guess, estimate });
        }
    }
    let deltas = [1e-9, 1e-7, 1e-5, 1e-3, 1e-1];
    let mut lower = Rational::zero();
    for d in deltas {
        let t = best_approximation(estimate - d, 1_000_000_000)?;
        if test(&t).0 {
            lower = t;
            break;
        }
    }
    let mut upper = Rational::from_integer(3.into());
    for d in deltas {
        let t = best_approximation(estimate + d, 1_000_000_000)?;
        if !test(&t).0 {
            upper = t;
            break;
        }
    }
    Ok(GapBracket { lower, upper, estimate })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositivityReport {
    /// π(ξ) ⪰ 0, decided exactly.
    pub regular_psd: bool,
    pub min_eigenvalue: f64,
    /// The Gram SDP for ξ + ε·1 over the whole group reached tolerance.
    pub gram_feasible: bool,
    /// psd ⇒ feasible, and feasible ⇒ λ_min(π(ξ)) ≥ −ε (up to solver tolerance).
    pub agrees: bool,
}

/// Compares regular-representation positivity of ξ with solvability of the
/// unconstrained Gram problem for ξ + ε·1.
pub fn positivstellensatz_check(spec: &GroupSpec, xi: &ExactElement, eps: &Rational, cap: usize) -> Result<PositivityReport> {
    if !xi.is_hermitian(spec)? {
        return Err(Error::Validation("element is not hermitian".into()));
    }
    let rep = RegularRep::new(spec, cap)?;
    let pi = rep.matrix(xi)?;
    let regular_psd = ldlt(&pi).is_psd();
    let min_eig = min_eigenvalue(&pi.to_float());

    let target = xi.add(&ExactElement::one(spec).scale(eps));
    let problem = GramProblem::new(spec, rep.ball(), target, false)?;
    let solver_tol = 1e-8;
    let opts = SolverOptions { tol: solver_tol, ..SolverOptions::default() };
    let gram_feasible = matches!(solve_feasibility(&problem, &opts)?, SolveOutcome::Feasible { .. });

    let eps_f = crate::rational::to_f64(eps);
    let agrees = (!regular_psd || gram_feasible) && (!gram_feasible || min_eig >= -eps_f - solver_tol);
    Ok(PositivityReport { regular_psd, min_eigenvalue: min_eig, gram_feasible, agrees })
}
