//! Cameron–Martin: `E exp(−λ∫₀¹ B_s² ds) = (cosh √(2λ))^{−1/2}`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::forest::{rat, rational_to_f64, Rational};

/// `q₁ … q_{n_max}` from `q₁ = 1`, `qₙ = 2/(2n−1)·Σ_{i=1}^{n−1} q_i q_{n−i}`.
pub fn cameron_martin_q(n_max: usize) -> Result<BTreeMap<usize, Rational>> {
    if n_max < 1 {
        return Err(Error::InvalidArgument(
            "cameron_martin_q needs n_max ≥ 1".into(),
        ));
    }
    let mut q: BTreeMap<usize, Rational> = BTreeMap::new();
    q.insert(1, rat(1, 1));
    for n in 2..=n_max {
        let mut s = Rational::zero();
        for i in 1..n {
            s += &q[&i] * &q[&(n - i)];
        }
        q.insert(n, s * rat(2, 2 * n as i64 - 1));
    }
    Ok(q)
}

/// Coefficients of `λⁿ` in the cgf: `qₙ/(2n)·(−1)ⁿ`.
pub fn cameron_martin_cgf_coefficients(n_max: usize) -> Result<BTreeMap<usize, Rational>> {
    Ok(cameron_martin_q(n_max)?
        .into_iter()
        .map(|(n, q)| {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            (n, q * rat(sign, 2 * n as i64))
        })
        .collect())
}

/// Radius of convergence of the cgf series in λ: `cosh √(2λ)` vanishes at `λ = −π²/8`.
pub const CAMERON_MARTIN_RADIUS: f64 = std::f64::consts::PI * std::f64::consts::PI / 8.0;

/// Partial sum of `log E exp(−λ∫₀¹ B² ds)` through order `n_max`.
pub fn cameron_martin_cgf(lambda: f64, n_max: usize) -> Result<f64> {
    if lambda.abs() >= CAMERON_MARTIN_RADIUS {
        return Err(Error::Domain(format!(
            "|λ| = {} is outside the convergence radius π²/8",
            lambda.abs()
        )));
    }
    Ok(cameron_martin_cgf_coefficients(n_max)?
        .iter()
        .map(|(n, c)| rational_to_f64(c) * lambda.powi(*n as i32))
        .sum())
}

/// Closed form `−½ log cosh √(2λ)` for `λ ≥ 0`.
pub fn cameron_martin_closed_form(lambda: f64) -> Result<f64> {
    if lambda < 0.0 {
        return Err(Error::InvalidArgument(format!("λ = {lambda} < 0")));
    }
    Ok(-0.5 * (2.0 * lambda).sqrt().cosh().ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_q_values() {
        let q = cameron_martin_q(3).unwrap();
        assert_eq!(q[&1], rat(1, 1));
        assert_eq!(q[&2], rat(2, 3));
        assert_eq!(q[&3], rat(8, 15));
    }

    #[test]
    fn cgf_leading_terms() {
        let c = cameron_martin_cgf_coefficients(3).unwrap();
        assert_eq!(c[&1], rat(-1, 2));
        assert_eq!(c[&2], rat(1, 6));
        assert_eq!(c[&3], rat(-4, 45));
    }

    #[test]
    fn numeric_cgf() {
        let v = cameron_martin_cgf(0.3, 40).unwrap();
        assert!((v - cameron_martin_closed_form(0.3).unwrap()).abs() < 1e-12);
        assert!(cameron_martin_cgf(2.0, 10).is_err());
    }
}
