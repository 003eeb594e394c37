//! Brownian motion with drift and Brownian motion stopped at ±1.

use crate::error::{Error, Result};
use crate::forest::LeafLabel;

use super::{k_recursion_values, LinearModel, ModelAlgebra};

/// `A_t = σB_t + μt`, evaluated at `(t, T)` given the current value `A_t`.
#[derive(Debug, Clone, Copy)]
pub struct BrownianDrift {
    pub sigma: f64,
    pub mu: f64,
    pub t: f64,
    pub horizon: f64,
    pub a_t: f64,
}

/// Deterministic integrand against `dB` plus the value at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftState {
    pub integrand: f64,
    pub value: f64,
}

impl ModelAlgebra for BrownianDrift {
    type State = DriftState;

    fn leaf(&self, _label: &LeafLabel) -> Result<DriftState> {
        Ok(DriftState {
            integrand: self.sigma,
            value: self.a_t + self.mu * (self.horizon - self.t),
        })
    }

    fn diamond(&self, lhs: &DriftState, rhs: &DriftState) -> Result<DriftState> {
        // ⟨σ₁B, σ₂B⟩ is deterministic, so the product has no martingale part.
        Ok(DriftState {
            integrand: 0.0,
            value: lhs.integrand * rhs.integrand * (self.horizon - self.t),
        })
    }

    fn value(&self, state: &DriftState) -> Result<f64> {
        Ok(state.value)
    }
}

impl LinearModel for BrownianDrift {
    fn zero(&self) -> DriftState {
        DriftState {
            integrand: 0.0,
            value: 0.0,
        }
    }

    fn axpy(&self, alpha: f64, x: &DriftState, y: &DriftState) -> DriftState {
        DriftState {
            integrand: alpha * x.integrand + y.integrand,
            value: alpha * x.value + y.value,
        }
    }
}

/// `[𝕂¹, …, 𝕂ⁿ]` for Brownian motion with drift.
///
/// The n-th conditional cumulant of `A_T` is `n!·𝕂ⁿ`.
pub fn brownian_drift_cumulants(
    sigma: f64,
    mu: f64,
    t: f64,
    horizon: f64,
    a_t: f64,
    n: usize,
) -> Result<Vec<f64>> {
    if horizon < t {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} precedes evaluation time {t}"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidArgument("need at least one order".into()));
    }
    let model = BrownianDrift {
        sigma,
        mu,
        t,
        horizon,
        a_t,
    };
    k_recursion_values(&model, &LeafLabel::new("Y")?, n)
}

/// Conditional cgf of `B_τ`, Brownian motion stopped at ±1, given `B^τ_t = b`:
/// `log(½[(1+b)eˣ + (1−b)e⁻ˣ])`.
pub fn stopped_bm_cgf(b: f64, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&b) {
        return Err(Error::InvalidArgument(format!(
            "stopped value {b} outside [-1, 1]"
        )));
    }
    // Factor out the dominant exponential to avoid overflow for large |x|.
    let (p, q) = ((1.0 + b) / 2.0, (1.0 - b) / 2.0);
    if x >= 0.0 {
        Ok(x + (p + q * (-2.0 * x).exp()).ln())
    } else {
        Ok(-x + (q + p * (2.0 * x).exp()).ln())
    }
}
