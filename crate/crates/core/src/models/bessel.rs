//! Squared Bessel processes `dX = 2√X dB + δ dt` and their Laplace functionals.
//!
//! `log E_t exp(−λ∫_t^T μ(s) X_s ds) = ½X_t ψ(t) + ½∫_t^T δ(r)ψ(r) dr` where
//! `ψ = Σ_m (−λ)^m Γ_{2m}`, `Γ₂(s) = 2∫_s^T μ` and `−Γ̇ₙ = Σ Γ_j Γ_{n−j}`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Weight `μ` on `[t, T]` multiplying `X` inside the Laplace functional.
#[derive(Clone)]
pub enum BesselWeight {
    Constant(f64),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Unit point mass at `T`, giving the Laplace transform of `X_T`.
    TerminalDirac,
}

impl fmt::Debug for BesselWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BesselWeight::Constant(c) => write!(f, "Constant({c})"),
            BesselWeight::Function(_) => f.write_str("Function(..)"),
            BesselWeight::TerminalDirac => f.write_str("TerminalDirac"),
        }
    }
}

/// `Γ₂, Γ₄, …` sampled on a uniform grid over `[t, T]`.
///
/// Γₙ(T) = 0 for every n, except that for [`BesselWeight::TerminalDirac`]
/// `Γ₂` is stored with its left limit 2 at `T`, the exact limit of smooth
/// weights concentrating at the terminal time.
#[derive(Debug, Clone)]
pub struct BesselGamma {
    times: Vec<f64>,
    gammas: BTreeMap<usize, Vec<f64>>,
}

impl BesselGamma {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Γₙ on the grid; `None` for odd n or n beyond the computed order.
    pub fn gamma(&self, n: usize) -> Option<&[f64]> {
        self.gammas.get(&n).map(Vec::as_slice)
    }

    pub fn n_max(&self) -> usize {
        self.gammas.keys().next_back().copied().unwrap_or(0)
    }

    fn step(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    /// Partial sum `Σ_{2m ≤ order} (−λ)^m Γ_{2m}` on the grid.
    pub fn psi(&self, lambda: f64, order: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.times.len()];
        for (&n, g) in self.gammas.range(..=order) {
            let w = (-lambda).powi((n / 2) as i32);
            for (o, v) in out.iter_mut().zip(g) {
                *o += w * v;
            }
        }
        out
    }

    /// `L_m = ½x·ψ_m(t) + ½∫δψ_m` for each partial sum `ψ_m` through `Γ_{2m}`, m = 1, 2, ….
    pub fn log_laplace_partial_sums(&self, lambda: f64, x: f64, delta: &dyn Fn(f64) -> f64) -> Vec<f64> {
        let h = self.step();
        let d: Vec<f64> = self.times.iter().map(|&r| delta(r)).collect();
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.gammas.len());
        for (&n, g) in &self.gammas {
            let w = (-lambda).powi((n / 2) as i32);
            let integral = trapezoid(h, g.iter().zip(&d).map(|(a, b)| a * b));
            acc += w * (0.5 * x * g[0] + 0.5 * integral);
            out.push(acc);
        }
        out
    }
}

fn trapezoid(h: f64, values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    if v.len() < 2 {
        return 0.0;
    }
    h * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[v.len() - 1]))
}

/// Builds `Γ₂ … Γ_{n_max}` by backward composite-trapezoid quadrature on `grid` cells.
pub fn bessel_gamma(
    n_max: usize,
    weight: &BesselWeight,
    t: f64,
    horizon: f64,
    grid: usize,
) -> Result<BesselGamma> {
    if n_max < 2 || n_max % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "n_max = {n_max} must be even and ≥ 2"
        )));
    }
    if grid < 1 || horizon <= t {
        return Err(Error::InvalidArgument(
            "need T > t and at least one grid cell".into(),
        ));
    }
    let h = (horizon - t) / grid as f64;
    let times: Vec<f64> = (0..=grid).map(|k| t + k as f64 * h).collect();

    let g2: Vec<f64> = match weight {
        BesselWeight::Constant(c) => {
            if *c < 0.0 {
                return Err(Error::InvalidArgument(format!("negative μ = {c}")));
            }
            times.iter().map(|&s| 2.0 * c * (horizon - s)).collect()
        }
        BesselWeight::TerminalDirac => vec![2.0; grid + 1],
        BesselWeight::Function(f) => {
            let mu: Vec<f64> = times.iter().map(|&s| f(s)).collect();
            if let Some(bad) = mu.iter().find(|&&m| m < 0.0 || !m.is_finite()) {
                return Err(Error::InvalidArgument(format!("negative or non-finite μ = {bad}")));
            }
            backward_integral(h, &mu, 2.0)
        }
    };

    let mut gammas: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    gammas.insert(2, g2);
    for n in (4..=n_max).step_by(2) {
        let mut rhs = vec![0.0; grid + 1];
        for j in (2..=n - 2).step_by(2) {
            let (a, b) = (&gammas[&j], &gammas[&(n - j)]);
            for (r, (x, y)) in rhs.iter_mut().zip(a.iter().zip(b)) {
                *r += x * y;
            }
        }
        gammas.insert(n, backward_integral(h, &rhs, 1.0));
    }
    Ok(BesselGamma { times, gammas })
}

/// `scale·∫_s^T f` at every node, by cumulative trapezoid from the right end.
fn backward_integral(h: f64, f: &[f64], scale: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    for k in (0..n - 1).rev() {
        out[k] = out[k + 1] + scale * 0.5 * h * (f[k] + f[k + 1]);
    }
    out
}

/// Closed form `E exp(−λX_T) = (1+2λT)^{−δ/2} exp(−λx/(1+2λT))` for BESQ(δ) from `x`.
pub fn bessel_laplace(x: f64, delta: f64, lambda: f64, horizon: f64) -> Result<f64> {
    if lambda < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "λ = {lambda} < 0 is on the transform side, not covered"
        )));
    }
    if x < 0.0 || delta < 0.0 || horizon < 0.0 {
        return Err(Error::InvalidArgument(
            "x, δ and T must be non-negative".into(),
        ));
    }
    let d = 1.0 + 2.0 * lambda * horizon;
    Ok(d.powf(-delta / 2.0) * (-lambda * x / d).exp())
}

/// Settings for [`bessel_series_log_laplace`].
#[derive(Debug, Clone, Copy)]
pub struct BesselSeriesOptions {
    pub n_max: usize,
    /// Cells of the coarsest grid; two refinements (×2, ×4) feed Romberg extrapolation.
    pub grid: usize,
}

impl Default for BesselSeriesOptions {
    fn default() -> Self {
        BesselSeriesOptions {
            n_max: 48,
            grid: 512,
        }
    }
}

/// `log E_t exp(−λ∫μX)` from the ψ-series with constant dimension δ.
///
/// The trapezoid error of every partial sum is removed by Romberg
/// extrapolation over three nested grids, and the partial sums are then
/// accelerated with Wynn's ε-algorithm, which also sums the series on the
/// boundary of its disc of convergence (e.g. `2λT = 1` for the Dirac weight).
pub fn bessel_series_log_laplace(
    weight: &BesselWeight,
    x: f64,
    delta: f64,
    lambda: f64,
    t: f64,
    horizon: f64,
    opts: BesselSeriesOptions,
) -> Result<f64> {
    if lambda < 0.0 || x < 0.0 || delta < 0.0 {
        return Err(Error::InvalidArgument(
            "x, δ and λ must be non-negative".into(),
        ));
    }
    let d = |_: f64| delta;
    let levels: Vec<Vec<f64>> = [1, 2, 4]
        .iter()
        .map(|m| {
            bessel_gamma(opts.n_max, weight, t, horizon, opts.grid * m)
                .map(|g| g.log_laplace_partial_sums(lambda, x, &d))
        })
        .collect::<Result<_>>()?;
    let sums: Vec<f64> = (0..levels[0].len())
        .map(|i| {
            let (a, b, c) = (levels[0][i], levels[1][i], levels[2][i]);
            let r1 = (4.0 * b - a) / 3.0;
            let r2 = (4.0 * c - b) / 3.0;
            (16.0 * r2 - r1) / 15.0
        })
        .collect();
    wynn_epsilon(&sums)
}

/// Limit estimate of a sequence by Wynn's ε-algorithm.
///
/// Returns the even-column entry whose difference from its predecessor in
/// the same column is smallest.
pub fn wynn_epsilon(seq: &[f64]) -> Result<f64> {
    let n = seq.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty sequence".into()));
    }
    let mut best = seq[n - 1];
    let mut best_err = if n > 1 { (seq[n - 1] - seq[n - 2]).abs() } else { f64::INFINITY };
    if best_err == 0.0 {
        return Ok(best);
    }
    // prev = column k−1, cur = column k.
    let mut prev: Vec<f64> = vec![0.0; n + 1];
    let mut cur: Vec<f64> = seq.to_vec();
    let mut k = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff == 0.0 || !diff.is_finite() {
                return Ok(if k % 2 == 0 { cur[i + 1] } else { best });
            }
            next.push(prev[i + 1] + 1.0 / diff);
        }
        k += 1;
        if k % 2 == 0 && next.len() > 1 {
            let l = next.len();
            let err = (next[l - 1] - next[l - 2]).abs();
            if err.is_finite() && err < best_err {
                best_err = err;
                best = next[l - 1];
            }
        }
        prev = cur;
        cur = next;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_values_vanish() {
        let g = bessel_gamma(8, &BesselWeight::Constant(1.0), 0.0, 1.0, 64).unwrap();
        for n in (2..=8).step_by(2) {
            assert_eq!(*g.gamma(n).unwrap().last().unwrap(), 0.0);
        }
        assert!(g.gamma(3).is_none());
        assert_eq!(g.n_max(), 8);
    }

    #[test]
    fn dirac_gammas_are_powers() {
        let g = bessel_gamma(6, &BesselWeight::TerminalDirac, 0.0, 2.0, 16).unwrap();
        // Γ₄ = 4(T−s), Γ₆ = 8(T−s)²; both integrands are at most linear, so trapezoid is exact.
        let g4 = g.gamma(4).unwrap();
        let g6 = g.gamma(6).unwrap();
        for (k, &s) in g.times().iter().enumerate() {
            assert!((g4[k] - 4.0 * (2.0 - s)).abs() < 1e-12);
            assert!((g6[k] - 8.0 * (2.0 - s).powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form() {
        assert_eq!(bessel_laplace(1.3, 2.0, 0.0, 1.0).unwrap(), 1.0);
        assert!((bessel_laplace(0.0, 2.0, 1.0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(bessel_laplace(0.0, 2.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn series_matches_closed_form_on_radius() {
        for delta in [0.0, 1.0, 2.0] {
            for lambda in [0.1, 0.5] {
                let x = 0.7;
                let s = bessel_series_log_laplace(
                    &BesselWeight::TerminalDirac,
                    x,
                    delta,
                    lambda,
                    0.0,
                    1.0,
                    BesselSeriesOptions::default(),
                )
                .unwrap();
                let c = bessel_laplace(x, delta, lambda, 1.0).unwrap().ln();
                assert!((s - c).abs() < 1e-8, "δ={delta} λ={lambda}: {s} vs {c}");
            }
        }
    }

    #[test]
    fn wynn_on_geometric_and_alternating() {
        let geo: Vec<f64> = (1..10).map(|n| (0..n).map(|k| (-1f64).powi(k)).sum()).collect();
        assert!((wynn_epsilon(&geo).unwrap() - 0.5).abs() < 1e-12);
        let alt: Vec<f64> = (1..25)
            .map(|n| (1..=n).map(|k| (-1f64).powi(k + 1) / k as f64).sum())
            .collect();
        assert!((wynn_epsilon(&alt).unwrap() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn negative_weight_rejected() {
        assert!(bessel_gamma(4, &BesselWeight::Constant(-1.0), 0.0, 1.0, 8).is_err());
        let f = BesselWeight::Function(Arc::new(|s: f64| s - 0.5));
        assert!(bessel_gamma(4, &f, 0.0, 1.0, 8).is_err());
    }
}
