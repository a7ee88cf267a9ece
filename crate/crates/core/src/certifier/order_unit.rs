//! Explicit order-unit constants for the Laplacian.
//!
//! For every x in a ball (word length taken in supp μ) we store c(x) with
//! `c(x)·Δ − (1−x)*(1−x) ∈ Σ²I[Γ]`, plus the recipe that writes the
//! difference as a nonnegative combination of hermitian squares:
//!
//! * generator s: `c(s) = 2/μ(s)` and the difference is
//!   `Σ_{t≠s} (μ(t)/μ(s)) (1−t)*(1−t)`;
//! * x = y·s with `|y| = |x| − 1`: `c(x) = 2c(y) + 2c(s)`, using
//!   `2a*a + 2b*b − (a+b)*(a+b) = (a−b)*(a−b)` for `a = 1−y`, `b = y(1−s)`.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use crate::algebra::{ExactElement, Measure};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::rational::{int, Rational};

/// `weight · ξ*ξ` with `weight ≥ 0` and `ξ` in the augmentation ideal.
#[derive(Clone, Debug, PartialEq)]
pub struct Square {
    pub weight: Rational,
    pub xi: ExactElement,
}

/// `Σ weight·ξ*ξ` over a list of squares.
pub fn sum_of_squares(spec: &GroupSpec, squares: &[Square]) -> Result<ExactElement> {
    let mut total = ExactElement::zero();
    for sq in squares {
        total = total.add(&sq.xi.hermitian_square(spec)?.scale(&sq.weight));
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Derivation {
    Identity,
    Generator,
    /// `x = prefix · generator`.
    Split { prefix: GroupElement, generator: GroupElement },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderUnitCoefficient {
    pub element: GroupElement,
    pub coeff: Rational,
    pub derivation: Derivation,
}

/// Order-unit coefficients for every element of a ball in supp μ.
#[derive(Clone, Debug)]
pub struct OrderUnitTable {
    mu: Measure,
    radius: usize,
    entries: HashMap<GroupElement, OrderUnitCoefficient>,
}

impl OrderUnitTable {
    pub fn build(spec: &GroupSpec, mu: &Measure, radius: usize, cap: usize) -> Result<Self> {
        let ball = spec.enumerate_ball(&mu.support(), radius, cap)?;
        let mut entries: HashMap<GroupElement, OrderUnitCoefficient> = HashMap::with_capacity(ball.len());
        let two = int(2);
        for (i, x) in ball.elements().iter().enumerate() {
            let entry = match ball.split(i) {
                None => OrderUnitCoefficient { element: x.clone(), coeff: Rational::zero(), derivation: Derivation::Identity },
                Some((p, s)) if ball.word_length(i) == 1 => {
                    debug_assert_eq!(p, 0);
                    OrderUnitCoefficient { element: x.clone(), coeff: &two / mu.weight(s), derivation: Derivation::Generator }
                }
                Some((p, s)) => {
                    let prefix = ball.element(p).clone();
                    let coeff = &two * &entries[&prefix].coeff + &two * &entries[s].coeff;
                    OrderUnitCoefficient {
                        element: x.clone(),
                        coeff,
                        derivation: Derivation::Split { prefix, generator: s.clone() },
                    }
                }
            };
            entries.insert(x.clone(), entry);
        }
        Ok(Self { mu: mu.clone(), radius, entries })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn measure(&self) -> &Measure {
        &self.mu
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, x: &GroupElement) -> Option<&OrderUnitCoefficient> {
        self.entries.get(x)
    }

    pub fn coeff(&self, x: &GroupElement) -> Option<&Rational> {
        self.entries.get(x).map(|e| &e.coeff)
    }

    pub fn elements(&self) -> impl Iterator<Item = &GroupElement> {
        self.entries.keys()
    }

    /// Squares summing to `c(x)·Δ − (1−x)*(1−x)`.
    pub fn expansion(&self, spec: &GroupSpec, x: &GroupElement) -> Result<Vec<Square>> {
        let entry = self.entries.get(x).ok_or_else(|| Error::Unreachable {
            element: spec.key(x),
            radius: self.radius,
        })?;
        let one = ExactElement::one(spec);
        let diff = |g: &GroupElement| one.sub(&ExactElement::basis(g.clone()));
        match &entry.derivation {
            Derivation::Identity => Ok(Vec::new()),
            Derivation::Generator => {
                let ws = self.mu.weight(x);
                Ok(self
                    .mu
                    .iter()
                    .filter(|(t, _)| *t != x)
                    .map(|(t, wt)| Square { weight: wt / &ws, xi: diff(t) })
                    .collect())
            }
            Derivation::Split { prefix, generator } => {
                let two = int(2);
                let mut out = Vec::new();
                for part in [prefix, generator] {
                    out.extend(
                        self.expansion(spec, part)?
                            .into_iter()
                            .map(|sq| Square { weight: &sq.weight * &two, xi: sq.xi }),
                    );
                }
                // (1−y) − y(1−s) = 1 − 2y + ys
                let y = ExactElement::basis(prefix.clone());
                let cross = one.sub(&y.scale(&two)).add(&ExactElement::basis(x.clone()));
                out.push(Square { weight: int(1), xi: cross });
                Ok(out)
            }
        }
    }

    /// The element the expansion of `x` must reproduce: `c(x)·Δ − (1−x)*(1−x)`.
    pub fn claimed(&self, spec: &GroupSpec, x: &GroupElement) -> Result<ExactElement> {
        let c = self.coeff(x).ok_or_else(|| Error::Unreachable { element: spec.key(x), radius: self.radius })?;
        let lap = self.mu.laplacian(spec)?;
        let d = ExactElement::one(spec).sub(&ExactElement::basis(x.clone()));
        Ok(lap.scale(c).sub(&d.hermitian_square(spec)?))
    }

    /// Re-expands the stored recipe for `x` and checks it exactly.
    pub fn verify_expansion(&self, spec: &GroupSpec, x: &GroupElement) -> Result<bool> {
        let squares = self.expansion(spec, x)?;
        let well_formed = squares.iter().all(|sq| !sq.weight.is_negative() && sq.xi.augmentation().is_zero());
        Ok(well_formed && sum_of_squares(spec, &squares)? == self.claimed(spec, x)?)
    }
}

/// `Δ = Σ_t (μ(t)/2)(1−t)*(1−t)` as squares.
pub fn laplacian_squares(spec: &GroupSpec, mu: &Measure) -> Vec<Square> {
    let one = ExactElement::one(spec);
    let half = Rational::new(1.into(), 2.into());
    mu.iter()
        .map(|(t, w)| Square { weight: w * &half, xi: one.sub(&ExactElement::basis(t.clone())) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{cyclic, free_group, heisenberg};

    #[test]
    fn identity_has_zero_coefficient() {
        let z3 = cyclic(3);
        let mu = Measure::uniform_on_generators(&z3).unwrap();
        let table = OrderUnitTable::build(&z3, &mu, 2, 100).unwrap();
        assert_eq!(table.coeff(&z3.identity()), Some(&int(0)));
        assert!(table.expansion(&z3, &z3.identity()).unwrap().is_empty());
    }

    #[test]
    fn z3_generator_coefficient() {
        let z3 = cyclic(3);
        let mu = Measure::uniform_on_generators(&z3).unwrap();
        let table = OrderUnitTable::build(&z3, &mu, 1, 100).unwrap();
        let s = GroupElement::Table(1);
        assert_eq!(table.coeff(&s), Some(&int(4)));
        // 4Δ − (1−s)*(1−s) = (1−s²)*(1−s²) for uniform μ on {s, s²}
        let squares = table.expansion(&z3, &s).unwrap();
        assert_eq!(squares.len(), 1);
        assert_eq!(squares[0].weight, int(1));
        assert!(table.verify_expansion(&z3, &s).unwrap());
    }

    #[test]
    fn free_group_length_two() {
        let f = free_group(2);
        let mu = Measure::uniform_on_generators(&f).unwrap();
        let table = OrderUnitTable::build(&f, &mu, 2, 100).unwrap();
        let ab = f.parse_key("w:ab").unwrap();
        assert_eq!(table.coeff(&f.parse_key("w:a").unwrap()), Some(&int(8)));
        assert_eq!(table.coeff(&ab), Some(&int(32)));
        assert!(table.verify_expansion(&f, &ab).unwrap());
    }

    #[test]
    fn doubling_rule_holds_along_tree() {
        let h = heisenberg();
        let mu = Measure::uniform_on_generators(&h).unwrap();
        let table = OrderUnitTable::build(&h, &mu, 3, 1000).unwrap();
        for x in table.elements() {
            let e = table.get(x).unwrap();
            if let Derivation::Split { prefix, generator } = &e.derivation {
                assert_eq!(e.coeff, int(2) * table.coeff(prefix).unwrap() + int(2) * table.coeff(generator).unwrap());
            }
        }
    }

    #[test]
    fn laplacian_squares_sum_to_laplacian() {
        let f = free_group(2);
        let mu = Measure::uniform_on_generators(&f).unwrap();
        let total = sum_of_squares(&f, &laplacian_squares(&f, &mu)).unwrap();
        assert_eq!(total, mu.laplacian(&f).unwrap());
    }
}
