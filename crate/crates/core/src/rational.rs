//! Rational scalars: `"p/q"` text form and bounded-denominator rounding.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Formats as `"p/q"` with a positive denominator, always including the slash.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Malformed(format!("not a rational: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

pub fn to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        // Huge numerators/denominators: scale both down before dividing.
        _ => {
            let bits = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> bits as usize).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> bits as usize).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::Numeric(format!("non-finite value {x}")))
}

/// Best rational approximation of `x` with denominator at most `max_denom`,
/// via continued fractions with semiconvergents.
pub fn best_approximation(x: f64, max_denom: u64) -> Result<Rational> {
    let exact = from_f64(x)?;
    Ok(best_approximation_of(&exact, max_denom))
}

pub fn best_approximation_of(x: &Rational, max_denom: u64) -> Rational {
    let cap = BigInt::from(max_denom.max(1));
    if x.denom() <= &cap {
        return x.clone();
    }
    // Convergents h/k of the continued fraction of x.
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    loop {
        let (a, rem) = num.div_mod_floor(&den);
        let k_next = &a * &k + &k_prev;
        if k_next > cap {
            // Largest semiconvergent that still fits.
            let t = (&cap - &k_prev) / &k;
            let semi = Rational::new(&t * &h + &h_prev, &t * &k + &k_prev);
            let conv = Rational::new(h.clone(), k.clone());
            return if (x - &semi).abs() < (x - &conv).abs() { semi } else { conv };
        }
        let h_next = &a * &h + &h_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        if rem.is_zero() {
            return Rational::new(h, k);
        }
        num = std::mem::replace(&mut den, rem);
    }
}

/// A rational `>= x` within `1/max_denom` of it.
pub fn round_up(x: f64, max_denom: u64) -> Result<Rational> {
    let exact = from_f64(x)?;
    let approx = best_approximation_of(&exact, max_denom);
    if approx >= exact {
        Ok(approx)
    } else {
        Ok(approx + Rational::new(BigInt::one(), BigInt::from(max_denom.max(1))))
    }
}
