//! Sparse arithmetic in the group algebra, exact (ℚ) or floating point.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::group::{element_key, Ball, GroupElement, GroupSpec};
use crate::rational::{format_rational, parse_rational, Rational};

/// Coefficient field of an [`AlgebraElement`].
pub trait Scalar:
    Clone + PartialEq + Debug + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}

impl Scalar for Rational {}
impl Scalar for f64 {}

/// A finitely supported function Γ → S. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct AlgebraElement<S> {
    terms: BTreeMap<GroupElement, S>,
}

pub type ExactElement = AlgebraElement<Rational>;

impl<S: Scalar> AlgebraElement<S> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    /// The group element `g` viewed as a basis vector.
    pub fn basis(g: GroupElement) -> Self {
        Self::from_terms([(g, S::one())])
    }

    pub fn one(spec: &GroupSpec) -> Self {
        Self::basis(spec.identity())
    }

    /// Sums coefficients of repeated elements and drops zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (GroupElement, S)>) -> Self {
        let mut out = Self::zero();
        for (g, c) in terms {
            out.add_term(g, c);
        }
        out
    }

    pub fn add_term(&mut self, g: GroupElement, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(g) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn coeff(&self, g: &GroupElement) -> S {
        self.terms.get(g).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.terms.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, &S)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_terms(self.terms.iter().map(|(g, v)| (g.clone(), v.clone() * c.clone())))
    }

    /// Sum of all coefficients; the element lies in the augmentation ideal iff this is 0.
    pub fn augmentation(&self) -> S {
        self.terms.values().fold(S::zero(), |acc, c| acc + c.clone())
    }

    /// `ξ*(x) = ξ(x⁻¹)`.
    pub fn star(&self, spec: &GroupSpec) -> Result<Self> {
        let mut out = Self::zero();
        for (g, c) in &self.terms {
            out.add_term(spec.inverse(g)?, c.clone());
        }
        Ok(out)
    }

    /// Convolution: `(ξη)(g) = Σ_x ξ(x) η(x⁻¹g)`.
    pub fn product(&self, spec: &GroupSpec, other: &Self) -> Result<Self> {
        let mut out = Self::zero();
        for (x, a) in &self.terms {
            for (y, b) in &other.terms {
                out.add_term(spec.multiply(x, y)?, a.clone() * b.clone());
            }
        }
        Ok(out)
    }

    /// `ξ*ξ`.
    pub fn hermitian_square(&self, spec: &GroupSpec) -> Result<Self> {
        self.star(spec)?.product(spec, self)
    }

    pub fn is_hermitian(&self, spec: &GroupSpec) -> Result<bool> {
        Ok(self.star(spec)? == *self)
    }

    /// `Σ_i c_i b_i` for a basis list and coefficient vector.
    pub fn from_vector(basis: &[GroupElement], coeffs: &[S]) -> Self {
        Self::from_terms(basis.iter().cloned().zip(coeffs.iter().cloned()))
    }

    /// The element `Σ_{i,j} Q_ij · b_i⁻¹ b_j` encoded by a Gram matrix over `basis`.
    pub fn from_gram(spec: &GroupSpec, basis: &[GroupElement], entry: impl Fn(usize, usize) -> S) -> Result<Self> {
        let inverses = basis.iter().map(|g| spec.inverse(g)).collect::<Result<Vec<_>>>()?;
        let mut out = Self::zero();
        for (i, inv) in inverses.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let q = entry(i, j);
                if !q.is_zero() {
                    out.add_term(spec.multiply(inv, b)?, q);
                }
            }
        }
        Ok(out)
    }
}

impl ExactElement {
    pub fn l1_norm(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |acc, c| acc + c.abs())
    }

    pub fn to_float(&self) -> AlgebraElement<f64> {
        AlgebraElement::from_terms(self.terms.iter().map(|(g, c)| (g.clone(), crate::rational::to_f64(c))))
    }

    /// `(element-key, "p/q")` pairs, in ball order when a ball is given
    /// (elements outside it follow in canonical order), else canonical order.
    pub fn to_pairs(&self, ball: Option<&Ball>) -> Vec<(String, String)> {
        let mut entries: Vec<(&GroupElement, &Rational)> = self.terms.iter().collect();
        if let Some(ball) = ball {
            entries.sort_by_key(|(g, _)| ball.index_of(g).unwrap_or(usize::MAX));
        }
        entries.into_iter().map(|(g, c)| (element_key(g), format_rational(c))).collect()
    }

    pub fn from_pairs(spec: &GroupSpec, pairs: &[(String, String)]) -> Result<Self> {
        let mut out = Self::zero();
        for (k, v) in pairs {
            let g = spec.parse_key(k)?;
            if out.terms.contains_key(&g) {
                return Err(Error::Malformed(format!("duplicate element key {k}")));
            }
            let c = parse_rational(v)?;
            if c.is_zero() {
                return Err(Error::Malformed(format!("explicit zero coefficient for {k}")));
            }
            out.terms.insert(g, c);
        }
        Ok(out)
    }
}

/// A finitely supported symmetric probability measure with the identity
/// outside its support.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    weights: BTreeMap<GroupElement, Rational>,
}

impl Measure {
    pub fn new(spec: &GroupSpec, weights: impl IntoIterator<Item = (GroupElement, Rational)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (g, w) in weights {
            spec.check(&g)?;
            if !w.is_positive() {
                return Err(Error::Validation(format!("measure weight at {g} is not positive")));
            }
            if map.insert(g.clone(), w).is_some() {
                return Err(Error::Validation(format!("measure lists {g} twice")));
            }
        }
        if map.is_empty() {
            return Err(Error::Validation("measure has empty support".into()));
        }
        if map.contains_key(&spec.identity()) {
            return Err(Error::Validation("identity lies in the measure support".into()));
        }
        let total: Rational = map.values().fold(Rational::zero(), |a, w| a + w);
        if !total.is_one() {
            return Err(Error::Validation(format!("measure weights sum to {total}, not 1")));
        }
        for (g, w) in &map {
            if map.get(&spec.inverse(g)?) != Some(w) {
                return Err(Error::Validation(format!("measure is not symmetric at {g}")));
            }
        }
        Ok(Self { weights: map })
    }

    /// Uniform measure on a symmetric set (duplicates ignored).
    pub fn uniform(spec: &GroupSpec, support: &[GroupElement]) -> Result<Self> {
        let mut set: Vec<GroupElement> = support.to_vec();
        set.sort();
        set.dedup();
        let w = Rational::new(1.into(), (set.len().max(1) as i64).into());
        Self::new(spec, set.into_iter().map(|g| (g, w.clone())))
    }

    /// Uniform on the spec's symmetric generating set.
    pub fn uniform_on_generators(spec: &GroupSpec) -> Result<Self> {
        Self::uniform(spec, &spec.generator_elements())
    }

    pub fn weight(&self, g: &GroupElement) -> Rational {
        self.weights.get(g).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> Vec<GroupElement> {
        self.weights.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, &Rational)> {
        self.weights.iter()
    }

    pub fn to_pairs(&self) -> Vec<(String, String)> {
        self.weights.iter().map(|(g, w)| (element_key(g), format_rational(w))).collect()
    }

    pub fn from_pairs(spec: &GroupSpec, pairs: &[(String, String)]) -> Result<Self> {
        let weights = pairs
            .iter()
            .map(|(k, v)| Ok((spec.parse_key(k)?, parse_rational(v)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(spec, weights)
    }

    /// `Δ_μ = 1 − Σ μ(x) x`, cross-checked against `½ Σ μ(x)(1−x)*(1−x)`.
    pub fn laplacian(&self, spec: &GroupSpec) -> Result<ExactElement> {
        let one = ExactElement::one(spec);
        let walk = ExactElement::from_terms(self.weights.iter().map(|(g, w)| (g.clone(), w.clone())));
        let direct = one.sub(&walk);

        let half = Rational::new(1.into(), 2.into());
        let mut squares = ExactElement::zero();
        for (g, w) in &self.weights {
            let d = one.sub(&ExactElement::basis(g.clone()));
            squares = squares.add(&d.hermitian_square(spec)?.scale(&(w * &half)));
        }
        if squares != direct {
            return Err(Error::Internal("the two Laplacian formulas disagree".into()));
        }
        Ok(direct)
    }
}
