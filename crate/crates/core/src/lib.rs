//! Exact sum-of-squares certificates for Kazhdan's property (T).
//!
//! A group Γ with a finitely supported symmetric probability measure μ has
//! property (T) iff `Δ² − κΔ` is a sum of hermitian squares in ℝ[Γ] for
//! some κ > 0, where `Δ = 1 − Σ μ(x) x`. This crate searches for such an
//! identity over a Cayley ball with a Gram-matrix SDP, rounds it to exact
//! rationals, and verifies the result in pure rational arithmetic.

pub mod algebra;
pub mod catalog;
pub mod certifier;
pub mod cli;
pub mod error;
pub mod group;
pub mod linalg;
pub mod oracle;
pub mod rational;
pub mod sos;
pub mod zuk;

pub use error::{Error, Result};
pub use group::{Ball, Family, GroupElement, GroupSpec, Presentation};
pub use rational::Rational;
