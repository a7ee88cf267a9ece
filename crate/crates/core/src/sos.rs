//! The Gram-matrix feasibility problem `Δ² − κΔ ∈ Σ²I[Γ]` over a Cayley
//! ball, and a numerical solver for it.
//!
//! A symmetric matrix Q indexed by ball elements `x_1..x_n` encodes
//! `Σ_{i,j} Q_ij · x_i⁻¹x_j`; if `Q = Σ_k d_k l_k l_kᵀ` then this equals
//! `Σ_k d_k ξ_k*ξ_k` with `ξ_k = Σ_i l_k(i) x_i`. The problem asks for a PSD
//! Q whose pair sums match the target coefficient of every group element,
//! and (in ideal mode) with `Q·1 = 0`, which puts every `ξ_k` in the
//! augmentation ideal.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{ExactElement, Measure};
use crate::error::{Error, Result};
use crate::group::{element_key, Ball, GroupElement, GroupSpec};
use crate::linalg::{ones_complement_basis, sym_eigen, RatMatrix};
use crate::rational::{format_rational, to_f64, Rational};

/// One linear constraint: the pair sum of Q over `pairs` equals `target`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub key: GroupElement,
    pub pairs: Vec<(usize, usize)>,
    pub target: Rational,
}

#[derive(Clone, Debug)]
pub struct GramProblem {
    ball: Ball,
    target: ExactElement,
    kappa: Option<Rational>,
    constraints: Vec<Constraint>,
    constraint_index: HashMap<GroupElement, usize>,
    ideal: bool,
}

impl GramProblem {
    /// Gram problem for an arbitrary hermitian target over the ball.
    /// With `ideal`, solutions must also satisfy `Q·1 = 0`.
    pub fn new(spec: &GroupSpec, ball: &Ball, target: ExactElement, ideal: bool) -> Result<Self> {
        let products = ball.pair_products(spec)?;
        let n = ball.len();
        let mut constraints: Vec<Constraint> = products
            .keys
            .iter()
            .map(|g| Constraint { key: g.clone(), pairs: Vec::new(), target: target.coeff(g) })
            .collect();
        for i in 0..n {
            for j in 0..n {
                constraints[products.pair_key[i * n + j]].pairs.push((i, j));
            }
        }
        let missing: Vec<String> =
            target.support().filter(|g| !products.key_index.contains_key(*g)).map(element_key).collect();
        if !missing.is_empty() {
            return Err(Error::StructuralInfeasibility { missing });
        }
        Ok(Self {
            ball: ball.clone(),
            target,
            kappa: None,
            constraints,
            constraint_index: products.key_index,
            ideal,
        })
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn basis(&self) -> &[GroupElement] {
        self.ball.elements()
    }

    pub fn dim(&self) -> usize {
        self.ball.len()
    }

    pub fn target(&self) -> &ExactElement {
        &self.target
    }

    pub fn kappa(&self) -> Option<&Rational> {
        self.kappa.as_ref()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint_for(&self, g: &GroupElement) -> Option<&Constraint> {
        self.constraint_index.get(g).map(|&i| &self.constraints[i])
    }

    pub fn ideal(&self) -> bool {
        self.ideal
    }

    /// Per-constraint `pair sum − target` for an exact matrix.
    pub fn exact_violations(&self, q: &RatMatrix) -> Vec<Rational> {
        self.constraints
            .iter()
            .map(|c| c.pairs.iter().map(|&(i, j)| q.get(i, j)).sum::<Rational>() - &c.target)
            .collect()
    }

    /// `Σ_{i,j} Q_ij · x_i⁻¹x_j` computed through the group algebra.
    pub fn reconstruct(&self, spec: &GroupSpec, q: &RatMatrix) -> Result<ExactElement> {
        ExactElement::from_gram(spec, self.basis(), |i, j| q.get(i, j).clone())
    }

    /// Constraint records `(element-key, pairs, "p/q")`, one JSON object per line.
    pub fn dump(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            key: String,
            pairs: &'a [(usize, usize)],
            target: String,
        }
        let mut out = String::new();
        for c in &self.constraints {
            let rec = Record { key: element_key(&c.key), pairs: &c.pairs, target: format_rational(&c.target) };
            out.push_str(&serde_json::to_string(&rec).expect("record serializes"));
            out.push('\n');
        }
        out
    }
}

/// `Δ_μ² − κΔ_μ`.
pub fn kazhdan_target(spec: &GroupSpec, mu: &Measure, kappa: &Rational) -> Result<ExactElement> {
    let lap = mu.laplacian(spec)?;
    Ok(lap.product(spec, &lap)?.sub(&lap.scale(kappa)))
}

/// The problem `Δ_μ² − κΔ_μ = Σ Q_ij x_i⁻¹x_j`, `Q ⪰ 0`, `Q·1 = 0` over `ball`.
pub fn build_problem(spec: &GroupSpec, ball: &Ball, mu: &Measure, kappa: &Rational) -> Result<GramProblem> {
    let mut problem = GramProblem::new(spec, ball, kazhdan_target(spec, mu, kappa)?, true)?;
    problem.kappa = Some(kappa.clone());
    Ok(problem)
}

/// Numeric Gram matrix returned by a solver.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix(pub DMatrix<f64>);

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        crate::linalg::min_eigenvalue(&self.0)
    }

    /// `‖Q·1‖∞`.
    pub fn row_sum_violation(&self) -> f64 {
        self.0.row_iter().map(|r| r.sum().abs()).fold(0.0, f64::max)
    }

    pub fn affine_violation(&self, problem: &GramProblem) -> f64 {
        problem
            .constraints()
            .iter()
            .map(|c| (c.pairs.iter().map(|&(i, j)| self.0[(i, j)]).sum::<f64>() - to_f64(&c.target)).abs())
            .fold(0.0, f64::max)
    }

    /// Exact Gram matrix of `ξ*ξ` for a vector over the ball basis.
    pub fn outer(v: &[f64]) -> Self {
        let v = DVector::from_column_slice(v);
        GramMatrix(&v * v.transpose())
    }
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iters: usize,
    /// Iterations between progress checks.
    pub stall_window: usize,
    /// Minimum relative decrease of the violation per window.
    pub stall_improvement: f64,
    /// Width at which κ bisection stops.
    pub bisect_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iters: 20_000, stall_window: 200, stall_improvement: 0.01, bisect_tol: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub affine_violation: f64,
    pub min_eigenvalue: f64,
    pub row_sum_violation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    Feasible { q: GramMatrix, stats: SolveStats },
    /// No point meeting the tolerances was found; never a proof of infeasibility.
    Stalled { stats: SolveStats, reason: String },
}

impl SolveOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SolveOutcome::Feasible { .. })
    }

    pub fn stats(&self) -> &SolveStats {
        match self {
            SolveOutcome::Feasible { stats, .. } | SolveOutcome::Stalled { stats, .. } => stats,
        }
    }
}

/// Seam for swapping in other SDP back ends.
pub trait GramSolver {
    fn solve(&self, problem: &GramProblem, opts: &SolverOptions, warm: Option<&GramMatrix>) -> Result<SolveOutcome>;
}

/// Alternating projections between the affine constraint set and the PSD
/// cone, in coordinates `Q = V R Vᵀ` where V spans the complement of the
/// ones vector (ideal mode) or is the identity. PSD projection clips the
/// eigenvalues of R; the affine projection uses a precomputed pseudo-inverse.
#[derive(Clone, Debug, Default)]
pub struct AlternatingProjections;

struct Coordinates {
    v: DMatrix<f64>,
    k: usize,
    /// `(a, b)` with `a <= b` for each coordinate of the scaled half-vectorization.
    slots: Vec<(usize, usize)>,
    /// Constraint matrix in those coordinates.
    m: DMatrix<f64>,
    b: DVector<f64>,
}

impl Coordinates {
    fn new(problem: &GramProblem) -> Self {
        let n = problem.dim();
        let v = if problem.ideal() { ones_complement_basis(n) } else { DMatrix::identity(n, n) };
        let k = v.ncols();
        let slots: Vec<(usize, usize)> = (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect();
        let sqrt2 = std::f64::consts::SQRT_2;
        let mut m = DMatrix::zeros(problem.constraints().len(), slots.len());
        for (row, c) in problem.constraints().iter().enumerate() {
            // W = Vᵀ E V where E is the 0/1 indicator of the constraint's pairs
            let mut w = DMatrix::<f64>::zeros(k, k);
            for &(i, j) in &c.pairs {
                for a in 0..k {
                    let via = v[(i, a)];
                    if via == 0.0 {
                        continue;
                    }
                    for b in 0..k {
                        w[(a, b)] += via * v[(j, b)];
                    }
                }
            }
            for (col, &(a, b)) in slots.iter().enumerate() {
                m[(row, col)] = if a == b { w[(a, a)] } else { (w[(a, b)] + w[(b, a)]) / sqrt2 };
            }
        }
        let b = DVector::from_iterator(problem.constraints().len(), problem.constraints().iter().map(|c| to_f64(&c.target)));
        Self { v, k, slots, m, b }
    }

    fn to_matrix(&self, r: &DVector<f64>) -> DMatrix<f64> {
        let mut mat = DMatrix::zeros(self.k, self.k);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (idx, &(a, b)) in self.slots.iter().enumerate() {
            if a == b {
                mat[(a, a)] = r[idx];
            } else {
                mat[(a, b)] = r[idx] * s;
                mat[(b, a)] = r[idx] * s;
            }
        }
        mat
    }

    fn to_vector(&self, mat: &DMatrix<f64>) -> DVector<f64> {
        let sqrt2 = std::f64::consts::SQRT_2;
        DVector::from_iterator(
            self.slots.len(),
            self.slots.iter().map(|&(a, b)| if a == b { mat[(a, a)] } else { 0.5 * (mat[(a, b)] + mat[(b, a)]) * sqrt2 }),
        )
    }

    fn psd_project(&self, r: &DVector<f64>) -> (DVector<f64>, f64) {
        if self.k == 0 {
            return (r.clone(), 0.0);
        }
        let (values, vectors) = sym_eigen(&self.to_matrix(r));
        let clipped = DMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&l| l.max(0.0))));
        let mat = &vectors * clipped * vectors.transpose();
        (self.to_vector(&mat), values[0])
    }

    fn gram(&self, r: &DVector<f64>) -> DMatrix<f64> {
        let q = &self.v * self.to_matrix(r) * self.v.transpose();
        (&q + q.transpose()) * 0.5
    }
}

impl GramSolver for AlternatingProjections {
    fn solve(&self, problem: &GramProblem, opts: &SolverOptions, warm: Option<&GramMatrix>) -> Result<SolveOutcome> {
        if opts.tol.is_nan() || opts.tol <= 0.0 {
            return Err(Error::Validation("solver tolerance must be positive".into()));
        }
        let co = Coordinates::new(problem);
        let d = co.slots.len();
        let stats = |iterations, affine_violation, min_eigenvalue| SolveStats {
            iterations,
            affine_violation,
            min_eigenvalue,
            row_sum_violation: 0.0,
        };

        let svd = co.m.clone().svd(true, true);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let pinv = svd
            .pseudo_inverse(smax * 1e-12 + f64::MIN_POSITIVE)
            .map_err(|e| Error::Numeric(format!("pseudo-inverse failed: {e}")))?;
        let r0 = &pinv * &co.b;
        let affine_gap = (&co.m * &r0 - &co.b).amax();
        if affine_gap > opts.tol {
            return Ok(SolveOutcome::Stalled {
                stats: stats(0, affine_gap, f64::NAN),
                reason: "affine constraints are inconsistent".into(),
            });
        }
        let proj = DMatrix::<f64>::identity(d, d) - &pinv * &co.m;

        let mut x = match warm {
            Some(q) if q.dim() == problem.dim() => co.to_vector(&(co.v.transpose() * &q.0 * &co.v)),
            _ => DVector::zeros(d),
        };
        let mut window_start = f64::INFINITY;
        let mut best = f64::INFINITY;
        let mut last_min_eig = f64::NAN;
        for it in 1..=opts.max_iters {
            let a = &proj * &x + &r0;
            let (p, min_eig) = co.psd_project(&a);
            last_min_eig = min_eig;
            let violation = (&co.m * &p - &co.b).amax();
            if !violation.is_finite() {
                return Err(Error::Numeric(format!("non-finite iterate at iteration {it}")));
            }
            best = best.min(violation);
            if violation <= opts.tol {
                let q = GramMatrix(co.gram(&p));
                let stats = SolveStats {
                    iterations: it,
                    affine_violation: q.affine_violation(problem),
                    min_eigenvalue: q.min_eigenvalue(),
                    row_sum_violation: q.row_sum_violation(),
                };
                return Ok(SolveOutcome::Feasible { q, stats });
            }
            if it % opts.stall_window == 0 {
                if best > window_start * (1.0 - opts.stall_improvement) {
                    return Ok(SolveOutcome::Stalled {
                        stats: stats(it, best, min_eig),
                        reason: format!("no progress over {} iterations", opts.stall_window),
                    });
                }
                window_start = best;
            }
            x = p;
        }
        Ok(SolveOutcome::Stalled {
            stats: stats(opts.max_iters, best, last_min_eig),
            reason: "iteration limit reached".into(),
        })
    }
}

pub fn solve_feasibility(problem: &GramProblem, opts: &SolverOptions) -> Result<SolveOutcome> {
    AlternatingProjections.solve(problem, opts, None)
}

/// Result of bisection on κ.
#[derive(Clone, Debug)]
pub struct KappaSearch {
    /// Largest κ found feasible; a dyadic rational so the matching Gram
    /// matrix targets it exactly.
    pub kappa: Rational,
    pub q: GramMatrix,
    pub stats: SolveStats,
    /// `(κ, feasible)` for every probe, in order.
    pub probes: Vec<(Rational, bool)>,
}

impl KappaSearch {
    pub fn kappa_f64(&self) -> f64 {
        to_f64(&self.kappa)
    }
}

/// Bisection for the largest feasible κ in `[0, 2]`.
///
/// The spectrum of Δ lies in `[0, 2]` because `Σμ(x)x` has norm at most
/// `Σμ(x) = 1` in every unitary representation, so κ > 2 is never feasible.
pub fn maximize_kappa(spec: &GroupSpec, ball: &Ball, mu: &Measure, opts: &SolverOptions) -> Result<KappaSearch> {
    maximize_kappa_with(&AlternatingProjections, spec, ball, mu, opts)
}

pub fn maximize_kappa_with(
    solver: &dyn GramSolver,
    spec: &GroupSpec,
    ball: &Ball,
    mu: &Measure,
    opts: &SolverOptions,
) -> Result<KappaSearch> {
    let total: Rational = mu.iter().map(|(_, w)| w.clone()).sum();
    if !total.is_one() {
        return Err(Error::Validation("measure mass must be 1 for the [0, 2] bisection range".into()));
    }
    let lap = mu.laplacian(spec)?;

    // κ = 0 is witnessed by ξ = Δ itself whenever Δ is supported in the ball.
    let mut lo = Rational::zero();
    let mut best: Option<(GramMatrix, SolveStats)> = None;
    if lap.support().all(|g| ball.contains(g)) {
        let v: Vec<f64> = ball.elements().iter().map(|g| to_f64(&lap.coeff(g))).collect();
        let q = GramMatrix::outer(&v);
        let problem = build_problem(spec, ball, mu, &lo)?;
        let stats = SolveStats {
            iterations: 0,
            affine_violation: q.affine_violation(&problem),
            min_eigenvalue: q.min_eigenvalue(),
            row_sum_violation: q.row_sum_violation(),
        };
        best = Some((q, stats));
    }
    let mut probes = Vec::new();
    if best.is_none() {
        match solver.solve(&build_problem(spec, ball, mu, &lo)?, opts, None)? {
            SolveOutcome::Feasible { q, stats } => best = Some((q, stats)),
            SolveOutcome::Stalled { reason, .. } => {
                return Err(Error::Numeric(format!("no Gram matrix found even at kappa = 0: {reason}")))
            }
        }
        probes.push((lo.clone(), true));
    }

    let mut hi = Rational::from_integer(2.into());
    let two_feasible = solver.solve(&build_problem(spec, ball, mu, &hi)?, opts, None)?;
    probes.push((hi.clone(), two_feasible.is_feasible()));
    if let SolveOutcome::Feasible { q, stats } = two_feasible {
        return Ok(KappaSearch { kappa: hi, q, stats, probes });
    }
    let half = Rational::new(1.into(), 2.into());
    while to_f64(&(&hi - &lo)) > opts.bisect_tol {
        let mid = (&lo + &hi) * &half;
        let warm = best.as_ref().map(|(q, _)| q);
        let outcome = solver.solve(&build_problem(spec, ball, mu, &mid)?, opts, warm)?;
        let feasible = outcome.is_feasible();
        probes.push((mid.clone(), feasible));
        log::info!(
            "bisect kappa={:.9} feasible={} iterations={}",
            to_f64(&mid),
            feasible,
            outcome.stats().iterations
        );
        match outcome {
            SolveOutcome::Feasible { q, stats } => {
                best = Some((q, stats));
                lo = mid;
            }
            SolveOutcome::Stalled { .. } => hi = mid,
        }
    }
    let (q, stats) = best.expect("kappa = 0 is always recorded");
    Ok(KappaSearch { kappa: lo, q, stats, probes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{cyclic, free_group};
    use crate::rational::{from_f64, int, rat};

    fn setup(spec: &GroupSpec, radius: usize) -> (Ball, Measure) {
        let mu = Measure::uniform_on_generators(spec).unwrap();
        let ball = spec.enumerate_ball(&mu.support(), radius, 10_000).unwrap();
        (ball, mu)
    }

    #[test]
    fn z3_problem_shape() {
        let z3 = cyclic(3);
        let (ball, mu) = setup(&z3, 1);
        let p = build_problem(&z3, &ball, &mu, &rat(7, 5)).unwrap();
        assert_eq!(p.dim(), 3);
        assert_eq!(p.constraints().len(), 3);
        let total: usize = p.constraints().iter().map(|c| c.pairs.len()).sum();
        assert_eq!(total, 9);
    }

    #[test]
    fn z2_problem_shape() {
        let z2 = cyclic(2);
        let (ball, mu) = setup(&z2, 1);
        let p = build_problem(&z2, &ball, &mu, &int(1)).unwrap();
        assert_eq!(p.dim(), 2);
        let keys: Vec<_> = p.constraints().iter().map(|c| c.key.clone()).collect();
        assert_eq!(keys, vec![GroupElement::Table(0), GroupElement::Table(1)]);
    }

    #[test]
    fn free_group_radius_one_keys() {
        let f = free_group(2);
        let (ball, mu) = setup(&f, 1);
        let p = build_problem(&f, &ball, &mu, &rat(1, 10)).unwrap();
        let big = f.enumerate_ball(&mu.support(), 2, 100).unwrap();
        assert_eq!(p.constraints().len(), 17);
        for c in p.constraints() {
            assert!(big.contains(&c.key));
        }
        // every pair appears in exactly one constraint
        let mut seen = [0; 25];
        for c in p.constraints() {
            for &(i, j) in &c.pairs {
                seen[i * 5 + j] += 1;
            }
        }
        assert!(seen.iter().all(|&s| s == 1));
    }

    #[test]
    fn uncovered_target_is_structurally_infeasible() {
        let f = free_group(2);
        let (_, mu) = setup(&f, 1);
        let tiny = f.enumerate_ball(&mu.support(), 0, 10).unwrap();
        let err = build_problem(&f, &tiny, &mu, &rat(1, 10)).unwrap_err();
        match err {
            Error::StructuralInfeasibility { missing } => assert!(missing.contains(&"w:aa".to_string())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn z3_feasible_below_gap() {
        let z3 = cyclic(3);
        let (ball, mu) = setup(&z3, 1);
        let p = build_problem(&z3, &ball, &mu, &rat(7, 5)).unwrap();
        match solve_feasibility(&p, &SolverOptions::default()).unwrap() {
            SolveOutcome::Feasible { q, stats } => {
                assert!(stats.affine_violation <= 1e-8);
                assert!(q.min_eigenvalue() >= -1e-9);
                assert!(q.row_sum_violation() <= 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn z3_stalls_above_gap() {
        let z3 = cyclic(3);
        let (ball, mu) = setup(&z3, 1);
        let p = build_problem(&z3, &ball, &mu, &rat(8, 5)).unwrap();
        assert!(!solve_feasibility(&p, &SolverOptions::default()).unwrap().is_feasible());
    }

    #[test]
    fn kappa_zero_is_feasible() {
        for spec in [cyclic(3), free_group(2)] {
            let (ball, mu) = setup(&spec, 1);
            let p = build_problem(&spec, &ball, &mu, &int(0)).unwrap();
            let lap = mu.laplacian(&spec).unwrap();
            let v: Vec<Rational> = ball.elements().iter().map(|g| lap.coeff(g)).collect();
            let q = RatMatrix::from_fn(ball.len(), |i, j| &v[i] * &v[j]);
            assert!(p.exact_violations(&q).iter().all(Zero::is_zero));
            assert!(q.row_sums().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn maximize_examples() {
        let opts = SolverOptions::default();
        let z2 = cyclic(2);
        let (ball, mu) = setup(&z2, 1);
        let k = maximize_kappa(&z2, &ball, &mu, &opts).unwrap();
        assert!((k.kappa_f64() - 2.0).abs() <= opts.bisect_tol, "{}", k.kappa_f64());

        let z3 = cyclic(3);
        let (ball, mu) = setup(&z3, 2);
        let k = maximize_kappa(&z3, &ball, &mu, &opts).unwrap();
        assert!((k.kappa_f64() - 1.5).abs() <= 0.02, "{}", k.kappa_f64());
    }

    #[test]
    fn feasible_set_is_downward_closed() {
        let z3 = cyclic(3);
        let (ball, mu) = setup(&z3, 2);
        let opts = SolverOptions::default();
        let feasible = |k: f64| {
            let p = build_problem(&z3, &ball, &mu, &from_f64(k).unwrap()).unwrap();
            solve_feasibility(&p, &opts).unwrap().is_feasible()
        };
        assert!(feasible(1.45));
        for k in [1.0, 0.5, 0.1] {
            assert!(feasible(k), "kappa {k}");
        }
    }

    #[test]
    fn reconstruction_matches_violations() {
        // Σ Q_ij x_i⁻¹x_j − target = Σ_g violation(g)·g for arbitrary rational Q
        let f = free_group(2);
        let (ball, mu) = setup(&f, 1);
        let p = build_problem(&f, &ball, &mu, &rat(1, 3)).unwrap();
        let q = RatMatrix::from_fn(ball.len(), |i, j| rat(((i * 7 + j * 3) % 5) as i64 - 2, (1 + i + j) as i64));
        let lhs = p.reconstruct(&f, &q).unwrap().sub(p.target());
        let viol = p.exact_violations(&q);
        let rhs = ExactElement::from_terms(p.constraints().iter().zip(viol).map(|(c, v)| (c.key.clone(), v)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn dump_lists_every_constraint() {
        let z3 = cyclic(3);
        let (ball, mu) = setup(&z3, 1);
        let p = build_problem(&z3, &ball, &mu, &rat(7, 5)).unwrap();
        let dump = p.dump();
        assert_eq!(dump.lines().count(), 3);
        assert!(dump.lines().next().unwrap().starts_with(r#"{"key":"t:0","pairs":[[0,0],[1,1],[2,2]],"target":"#));
    }
}
