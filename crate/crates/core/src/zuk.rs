//! Link-graph spectral criterion.
//!
//! For a symmetric generating set S ∌ 1, the link graph has vertex set S
//! and an edge x → y whenever x⁻¹y ∈ S. With μ(x) = deg(x)/|E| and Λ the
//! μ-weighted graph Laplacian, a spectral gap λ > 1/2 gives an explicit
//! Gram matrix `Q = λ⁻¹Λ + μμᵀ − diag(μ)` over S with
//! `Σ Q_{x,y} x⁻¹y = Δ² − (2 − λ⁻¹)Δ`. Q is PSD iff λ̂ ≤ λ, so an exact
//! LDLᵀ of Q certifies the gap and the certificate at once.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};

use crate::algebra::{ExactElement, Measure};
use crate::certifier::{assemble, factor_exact, Certificate, CertifyOutcome, Metadata};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::linalg::{is_psd, sym_eigen, RatMatrix};
use crate::rational::{best_approximation, format_rational, Rational};
use crate::sos::kazhdan_target;

pub const LINK_WITHOUT_EDGES: &str = "link graph has no edges";

#[derive(Clone, Debug)]
pub struct LinkGraph {
    vertices: Vec<GroupElement>,
    /// Ordered pairs (x, y) as vertex indices; symmetric, no loops.
    edges: Vec<(usize, usize)>,
    degrees: Vec<usize>,
    connected: bool,
}

impl LinkGraph {
    /// Link graph of a symmetric set S ∌ 1.
    pub fn build(spec: &GroupSpec, set: &[GroupElement]) -> Result<Self> {
        let mut vertices = set.to_vec();
        vertices.sort();
        vertices.dedup();
        if vertices.is_empty() {
            return Err(Error::Validation("empty generating set".into()));
        }
        if vertices.contains(&spec.identity()) {
            return Err(Error::Validation("the identity lies in the generating set".into()));
        }
        for x in &vertices {
            if vertices.binary_search(&spec.inverse(x)?).is_err() {
                return Err(Error::Validation(format!("generating set is not symmetric at {}", spec.key(x))));
            }
        }
        let inverses = vertices.iter().map(|x| spec.inverse(x)).collect::<Result<Vec<_>>>()?;
        let mut edges = Vec::new();
        for (i, xi) in inverses.iter().enumerate() {
            for (j, y) in vertices.iter().enumerate() {
                if i != j && vertices.binary_search(&spec.multiply(xi, y)?).is_ok() {
                    edges.push((i, j));
                }
            }
        }
        Self::assemble(vertices, edges)
    }

    /// Abstract graph on `n` vertices from undirected edges; vertices are
    /// labelled by `GroupElement::Table(i)`.
    pub fn from_edges(n: usize, undirected: &[(usize, usize)]) -> Result<Self> {
        let mut edges = Vec::new();
        for &(a, b) in undirected {
            if a == b || a >= n || b >= n {
                return Err(Error::Validation(format!("bad edge ({a}, {b})")));
            }
            edges.push((a, b));
            edges.push((b, a));
        }
        edges.sort();
        edges.dedup();
        Self::assemble((0..n).map(GroupElement::Table).collect(), edges)
    }

    fn assemble(vertices: Vec<GroupElement>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::Validation(LINK_WITHOUT_EDGES.into()));
        }
        let n = vertices.len();
        let mut degrees = vec![0; n];
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            degrees[a] += 1;
            adjacency[a].push(b);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        let connected = seen.iter().all(|&s| s);
        Ok(Self { vertices, edges, degrees, connected })
    }

    pub fn vertices(&self) -> &[GroupElement] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    fn edge_count(&self) -> Rational {
        Rational::from_integer(self.edges.len().into())
    }

    /// μ(x) = deg(x)/|E| per vertex.
    pub fn weights(&self) -> Vec<Rational> {
        let e = self.edge_count();
        self.degrees.iter().map(|&d| Rational::from_integer(d.into()) / &e).collect()
    }

    /// The vertex weights as a measure on Γ (vertices of degree 0 dropped).
    pub fn measure(&self, spec: &GroupSpec) -> Result<Measure> {
        Measure::new(
            spec,
            self.vertices.iter().cloned().zip(self.weights()).filter(|(_, w)| w.is_positive()),
        )
    }

    /// Λ with Λ_xx = μ(x), Λ_xy = −1/|E| on edges; Λ·1 = 0.
    pub fn laplacian(&self) -> RatMatrix {
        let n = self.vertices.len();
        let mut m = RatMatrix::zeros(n);
        for (i, w) in self.weights().into_iter().enumerate() {
            m.set(i, i, w);
        }
        let off = -Rational::one() / self.edge_count();
        for &(a, b) in &self.edges {
            m.set(a, b, off.clone());
        }
        m
    }

    /// Human-readable vertex/edge/weight listing.
    pub fn describe(&self, spec: Option<&GroupSpec>) -> String {
        let name = |g: &GroupElement| spec.map(|s| s.key(g)).unwrap_or_else(|| crate::group::element_key(g));
        let mut out = format!(
            "vertices {}\nordered edges {}\nconnected {}\n",
            self.vertices.len(),
            self.edges.len(),
            self.connected
        );
        for (i, (g, w)) in self.vertices.iter().zip(self.weights()).enumerate() {
            out.push_str(&format!("vertex {} degree {} mu {}\n", name(g), self.degrees[i], format_rational(&w)));
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("edge {} {}\n", name(&self.vertices[a]), name(&self.vertices[b])));
        }
        out
    }
}

/// Smallest nonzero eigenvalue of Λ on the μ-weighted space, and a rational
/// λ̂ ≤ λ for which the Gram matrix passes the exact PSD check.
pub fn spectral_gap(link: &LinkGraph) -> Result<(f64, Rational)> {
    if !link.connected {
        return Err(Error::Validation("link graph is disconnected; zero eigenvalue is not simple".into()));
    }
    let n = link.vertices.len();
    let lap = link.laplacian().to_float();
    let scale: Vec<f64> = link.weights().iter().map(|w| 1.0 / crate::rational::to_f64(w).sqrt()).collect();
    let sym = DMatrix::from_fn(n, n, |i, j| scale[i] * lap[(i, j)] * scale[j]);
    let values = sym_eigen(&sym).0;
    let gap = values.get(1).copied().ok_or_else(|| Error::Validation("link graph has a single vertex".into()))?;

    let mut candidates = vec![best_approximation(gap, 1000)?];
    for k in [9, 7, 5, 3] {
        let shrink = 1.0 - 10f64.powi(-k);
        candidates.push(best_approximation(gap * shrink, 10u64.pow(k as u32 + 2))?);
    }
    for lambda in candidates {
        if lambda.is_positive() && is_psd(&gram_matrix(link, &lambda)) {
            return Ok((gap, lambda));
        }
    }
    Err(Error::Numeric(format!("no rational lower bound found for the gap {gap}")))
}

/// `Q = λ̂⁻¹Λ + μμᵀ − diag(μ)`, indexed by the link vertices.
pub fn gram_matrix(link: &LinkGraph, lambda: &Rational) -> RatMatrix {
    let lap = link.laplacian();
    let mu = link.weights();
    let inv = lambda.recip();
    RatMatrix::from_fn(link.vertices.len(), |i, j| {
        let mut v = &inv * lap.get(i, j) + &mu[i] * &mu[j];
        if i == j {
            v -= &mu[i];
        }
        v
    })
}

/// κ = 2 − λ̂⁻¹.
pub fn kappa_for(lambda: &Rational) -> Rational {
    Rational::from_integer(2.into()) - lambda.recip()
}

/// `Σ Q_{x,y} x⁻¹y`.
pub fn gram_element(spec: &GroupSpec, link: &LinkGraph, lambda: &Rational) -> Result<ExactElement> {
    let q = gram_matrix(link, lambda);
    ExactElement::from_gram(spec, &link.vertices, |i, j| q.get(i, j).clone())
}

/// Checks `Σ Q_{x,y} x⁻¹y = Δ² − (2 − λ̂⁻¹)Δ` exactly; holds for every λ̂ ≠ 0.
pub fn identity_holds(spec: &GroupSpec, link: &LinkGraph, lambda: &Rational) -> Result<bool> {
    let mu = link.measure(spec)?;
    Ok(gram_element(spec, link, lambda)? == kazhdan_target(spec, &mu, &kappa_for(lambda))?)
}

/// Exact certificate with κ_input = 2 − λ̂⁻¹ and zero residual.
pub fn zuk_certificate(spec: &GroupSpec, link: &LinkGraph, lambda: &Rational, ball_cap: usize) -> Result<Certificate> {
    if lambda * Rational::from_integer(2.into()) <= Rational::one() {
        return Err(Error::Validation(format!(
            "lambda_hat {} does not exceed 1/2; the criterion gives nothing",
            format_rational(lambda)
        )));
    }
    if !identity_holds(spec, link, lambda)? {
        return Err(Error::Internal("link Gram identity failed".into()));
    }
    let q = gram_matrix(link, lambda);
    let witnesses = factor_exact(&q, &link.vertices).map_err(|_| {
        Error::Factorization(format!(
            "Gram matrix is not PSD at lambda_hat {}; the gap is smaller, retry with a smaller value",
            format_rational(lambda)
        ))
    })?;
    let mu = link.measure(spec)?;
    let ball = spec.enumerate_ball(&mu.support(), 1, ball_cap)?;
    let kappa = kappa_for(lambda);
    match assemble(spec, &mu, &ball, &kappa, witnesses, Metadata::new("zuk"), ball_cap)? {
        CertifyOutcome::Accepted(cert) if cert.residual_bound.is_zero() => Ok(cert),
        CertifyOutcome::Accepted(_) => Err(Error::Internal("link certificate left a nonzero residual".into())),
        CertifyOutcome::Rejected(r) => Err(Error::Internal(format!("link certificate rejected: {r:?}"))),
    }
}
