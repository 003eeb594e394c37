//! Lévy area `𝒜 = ∫X dY − Y dX` of a planar Brownian motion.
//!
//! The family `J^k_t(T) = (T−t)^k/k + ½(X_t²+Y_t²)(T−t)^{k−1}` is closed under
//! the diamond product: `J^j ⋄ J^k = 2/(j+k−1)·J^{j+k}`, `𝒜 ⋄ 𝒜 = 2J²` and
//! `𝒜 ⋄ J^k = 0`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use num_traits::{FromPrimitive, Zero};

use crate::error::{Error, Result};
use crate::forest::{rat, rational_to_f64, LeafLabel, Rational};

use super::{LinearModel, ModelAlgebra};

/// `leaf·𝒜 + Σ_k coeffs[k]·J^k` with exact rational coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LevyState {
    pub leaf: Rational,
    pub coeffs: BTreeMap<u32, Rational>,
}

impl LevyState {
    pub fn area() -> Self {
        LevyState {
            leaf: rat(1, 1),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn j(k: u32) -> Self {
        LevyState {
            leaf: Rational::zero(),
            coeffs: BTreeMap::from([(k, rat(1, 1))]),
        }
    }

    fn add_scaled(&mut self, alpha: &Rational, other: &LevyState) {
        self.leaf += alpha * &other.leaf;
        for (k, c) in &other.coeffs {
            let e = self.coeffs.entry(*k).or_insert_with(Rational::zero);
            *e += alpha * c;
            if e.is_zero() {
                self.coeffs.remove(k);
            }
        }
    }
}

/// Evaluation point for the Lévy-area model: time `t`, horizon `T` and the
/// current values `X_t`, `Y_t`, `𝒜_t`.
#[derive(Debug, Clone, Copy)]
pub struct LevyArea {
    pub t: f64,
    pub horizon: f64,
    pub x: f64,
    pub y: f64,
    pub area: f64,
}

impl LevyArea {
    pub fn at_origin(horizon: f64) -> Self {
        LevyArea {
            t: 0.0,
            horizon,
            x: 0.0,
            y: 0.0,
            area: 0.0,
        }
    }

    /// `J^k_t(T)`
    pub fn j_value(&self, k: u32) -> f64 {
        let tau = self.horizon - self.t;
        let k = k as i32;
        tau.powi(k) / k as f64 + 0.5 * (self.x * self.x + self.y * self.y) * tau.powi(k - 1)
    }
}

impl ModelAlgebra for LevyArea {
    type State = LevyState;

    fn leaf(&self, label: &LeafLabel) -> Result<LevyState> {
        match label.as_str() {
            "Y" | "A" => Ok(LevyState::area()),
            other => Err(Error::UnsupportedLabel(format!(
                "Lévy-area model has no leaf `{other}`"
            ))),
        }
    }

    fn diamond(&self, lhs: &LevyState, rhs: &LevyState) -> Result<LevyState> {
        let mut out = LevyState::default();
        let ll = &lhs.leaf * &rhs.leaf;
        if !ll.is_zero() {
            out.coeffs.insert(2, ll * rat(2, 1));
        }
        for (j, cj) in &lhs.coeffs {
            for (k, ck) in &rhs.coeffs {
                let w = rat(2, i64::from(j + k - 1)) * cj * ck;
                out.add_scaled(&w, &LevyState::j(j + k));
            }
        }
        Ok(out)
    }

    fn value(&self, state: &LevyState) -> Result<f64> {
        let mut v = rational_to_f64(&state.leaf) * self.area;
        for (k, c) in &state.coeffs {
            v += rational_to_f64(c) * self.j_value(*k);
        }
        Ok(v)
    }
}

impl LinearModel for LevyArea {
    fn zero(&self) -> LevyState {
        LevyState::default()
    }

    fn axpy(&self, alpha: f64, x: &LevyState, y: &LevyState) -> LevyState {
        let a = Rational::from_f64(alpha).expect("finite scale");
        let mut out = y.clone();
        out.add_scaled(&a, x);
        out
    }
}

/// `α₂ … α_{n_max}` from `αₙ = (1/(n−1))·Σ_{j=2}^{n−2} α_j α_{n−j}`, `α₂ = 1`.
pub fn levy_alpha(n_max: usize) -> Result<BTreeMap<usize, Rational>> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("levy_alpha needs n_max ≥ 2".into()));
    }
    let mut a: BTreeMap<usize, Rational> = BTreeMap::new();
    a.insert(2, rat(1, 1));
    for n in 3..=n_max {
        let mut s = Rational::zero();
        for j in 2..=n - 2 {
            s += &a[&j] * &a[&(n - j)];
        }
        a.insert(n, s / Rational::from_integer((n as i64 - 1).into()));
    }
    Ok(a)
}

/// Partial sum `Σ_{n ≤ n_max} αₙ Tⁿ/n` of `log E₀ e^{𝒜_T} = −log cos T`.
pub fn levy_cgf(horizon: f64, n_max: usize) -> Result<f64> {
    if horizon.abs() >= FRAC_PI_2 {
        return Err(Error::Domain(format!(
            "|T| = {} is outside the convergence domain |T| < π/2",
            horizon.abs()
        )));
    }
    if n_max < 2 {
        return Ok(0.0);
    }
    let alpha = levy_alpha(n_max)?;
    Ok(alpha
        .iter()
        .map(|(n, a)| rational_to_f64(a) * horizon.powi(*n as i32) / *n as f64)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::k_recursion_states;

    #[test]
    fn alpha_values() {
        let a = levy_alpha(8).unwrap();
        assert_eq!(a[&2], rat(1, 1));
        assert_eq!(a[&3], rat(0, 1));
        assert_eq!(a[&4], rat(1, 3));
        assert_eq!(a[&6], rat(2, 15));
        assert_eq!(a[&8], rat(17, 315));
        assert!(levy_alpha(1).is_err());
    }

    #[test]
    fn j_product_rule() {
        let m = LevyArea {
            t: 0.3,
            horizon: 1.1,
            x: 0.4,
            y: -1.2,
            area: 0.1,
        };
        let d = m.diamond(&LevyState::j(2), &LevyState::j(3)).unwrap();
        let lhs = m.value(&d).unwrap();
        let rhs = 0.5 * m.j_value(5);
        assert!((lhs - rhs).abs() < 1e-14);
        let aa = m.diamond(&LevyState::area(), &LevyState::area()).unwrap();
        assert_eq!(aa, LevyState { leaf: rat(0, 1), coeffs: BTreeMap::from([(2, rat(2, 1))]) });
        let aj = m.diamond(&LevyState::area(), &LevyState::j(4)).unwrap();
        assert_eq!(aj, LevyState::default());
    }

    #[test]
    fn recursion_reproduces_alpha() {
        let m = LevyArea::at_origin(1.0);
        let y = LeafLabel::new("Y").unwrap();
        let ks = k_recursion_states(&m, &y, 9).unwrap();
        let a = levy_alpha(9).unwrap();
        for n in 2..=9 {
            let expected = if a[&n].is_zero() {
                LevyState::default()
            } else {
                LevyState {
                    leaf: rat(0, 1),
                    coeffs: BTreeMap::from([(n as u32, a[&n].clone())]),
                }
            };
            assert_eq!(ks[n - 1], expected, "order {n}");
        }
    }

    #[test]
    fn cgf_matches_log_cos() {
        let v = levy_cgf(0.5, 20).unwrap();
        assert!((v + f64::cos(0.5).ln()).abs() < 1e-8);
        assert_eq!(levy_cgf(0.0, 20).unwrap(), 0.0);
        assert!(matches!(levy_cgf(1.6, 10), Err(Error::Domain(_))));
    }
}
