use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Forward-variance kernel `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `κ(τ) = ν e^{−λτ}` (classical Heston).
    Exponential { nu: f64, lambda: f64 },
    /// `κ(τ) = ν τ^{α−1}/Γ(α)` (rough Heston, `α = H + ½`).
    PowerLaw { nu: f64, alpha: f64 },
}

impl KernelSpec {
    pub fn exponential(nu: f64, lambda: f64) -> Result<Self> {
        if !(nu > 0.0 && lambda > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "exponential kernel needs ν > 0 and λ > 0, got ν={nu}, λ={lambda}"
            )));
        }
        Ok(KernelSpec::Exponential { nu, lambda })
    }

    pub fn power_law(nu: f64, alpha: f64) -> Result<Self> {
        if !(nu > 0.0 && alpha > 0.5 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "power-law kernel needs ν > 0 and α ∈ (½, 1), got ν={nu}, α={alpha}"
            )));
        }
        Ok(KernelSpec::PowerLaw { nu, alpha })
    }

    pub fn nu(&self) -> f64 {
        match *self {
            KernelSpec::Exponential { nu, .. } | KernelSpec::PowerLaw { nu, .. } => nu,
        }
    }

    /// `κ(τ)`; infinite at 0 for the power law.
    pub fn eval(&self, tau: f64) -> f64 {
        match *self {
            KernelSpec::Exponential { nu, lambda } => nu * (-lambda * tau).exp(),
            KernelSpec::PowerLaw { nu, alpha } => nu * tau.powf(alpha - 1.0) / gamma(alpha),
        }
    }

    /// `∫_a^b κ(u) du` and `∫_a^b u κ(u) du` in closed form.
    pub fn moments(&self, a: f64, b: f64) -> (f64, f64) {
        match *self {
            KernelSpec::Exponential { nu, lambda } => {
                let w = b - a;
                let x = lambda * w;
                let ea = (-lambda * a).exp();
                // 1 − e^{−x} and 1 − e^{−x}(1 + x), both cancellation-free.
                let e1 = -(-x).exp_m1();
                let e2 = one_minus_exp_poly(x);
                let m0 = nu * ea * e1 / lambda;
                let m1 = nu * ea * (a * e1 / lambda + e2 / (lambda * lambda));
                (m0, m1)
            }
            KernelSpec::PowerLaw { nu, alpha } => {
                let m0 = nu / gamma(alpha + 1.0) * (b.powf(alpha) - a.powf(alpha));
                let m1 = nu / (gamma(alpha) * (alpha + 1.0))
                    * (b.powf(alpha + 1.0) - a.powf(alpha + 1.0));
                (m0, m1)
            }
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Exponential { nu, lambda } => write!(f, "exp(ν={nu}, λ={lambda})"),
            KernelSpec::PowerLaw { nu, alpha } => write!(f, "power(ν={nu}, α={alpha})"),
        }
    }
}

/// `1 − e^{−x}(1 + x)`
fn one_minus_exp_poly(x: f64) -> f64 {
    if x > 0.1 {
        return 1.0 - (-x).exp() * (1.0 + x);
    }
    // Σ_{n≥2} (−1)^n (n−1) xⁿ/n!
    let mut term = x * x / 2.0;
    let mut sum = 0.0;
    for n in 2..30 {
        sum += term * (n as f64 - 1.0);
        term *= -x / (n as f64 + 1.0);
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `κ̄(τ) = ∫_τ^{τ+Δ} κ(u) du`.
pub fn kappa_bar(k: &KernelSpec, tau: f64, delta: f64) -> f64 {
    match *k {
        KernelSpec::Exponential { nu, lambda } => {
            nu / lambda * (-lambda * tau).exp() * -(-lambda * delta).exp_m1()
        }
        KernelSpec::PowerLaw { nu, alpha } => {
            nu / gamma(alpha + 1.0) * ((tau + delta).powf(alpha) - tau.powf(alpha))
        }
    }
}
