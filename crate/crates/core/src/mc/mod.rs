//! Monte Carlo simulators and cumulant estimators used as statistical ground
//! truth for the exact models.

mod estimators;
mod rng;

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::chaos::Chaos2Kernel;

pub use estimators::{
    empirical_cumulants, empirical_cumulants_with, empirical_mgf, pairwise_sum, CumulantEstimate,
    CumulantOptions, EstimateMethod, MgfEstimate,
};
pub use rng::{path_rng, with_thread_cap, THREADS_ENV};

/// Simulated model and its parameters.
#[derive(Debug, Clone)]
pub enum SimModel {
    /// `A = a0 + σB + μt`, sampled exactly.
    BrownianDrift { sigma: f64, mu: f64, a0: f64 },
    /// `𝒜 = ∫X dY − Y dX` from the origin, Euler (left-point) sums.
    LevyArea,
    /// Squared Bessel process of dimension δ from `x0`, sampled exactly.
    Besq { x0: f64, delta: f64 },
    /// Heston with flat initial forward variance `xi0`:
    /// `dv = λ(ξ₀ − v)dt + ν√v dW`, `dX = −½v dt + √v dZ`, `d⟨Z,W⟩ = ρ dt`.
    /// Euler with full truncation. Columns `X`, `QV = ∫v`, `ZETA = ζ_T(T)`.
    Heston {
        xi0: f64,
        nu: f64,
        lambda: f64,
        rho: f64,
        delta: f64,
    },
    /// Brownian motion from `b0` stopped on leaving `(−1, 1)`, observed at `T`.
    StoppedBm { b0: f64 },
    /// `Σ_{i<j} F_ij ΔB_i ΔB_j` on the kernel's own grid.
    Chaos2 { kernel: Chaos2Kernel },
}

impl SimModel {
    pub fn name(&self) -> &'static str {
        match self {
            SimModel::BrownianDrift { .. } => "bm-drift",
            SimModel::LevyArea => "levy-area",
            SimModel::Besq { .. } => "besq",
            SimModel::Heston { .. } => "heston",
            SimModel::StoppedBm { .. } => "stopped-bm",
            SimModel::Chaos2 { .. } => "chaos2",
        }
    }

    fn columns(&self) -> Vec<&'static str> {
        match self {
            SimModel::BrownianDrift { .. } | SimModel::LevyArea => vec!["A"],
            SimModel::Besq { .. } => vec!["X"],
            SimModel::Heston { .. } => vec!["X", "QV", "ZETA"],
            SimModel::StoppedBm { .. } => vec!["B", "STOPPED"],
            SimModel::Chaos2 { .. } => vec!["A"],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub model: SimModel,
    pub n_paths: usize,
    pub n_steps: usize,
    pub horizon: f64,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n_paths < 100 {
            return bad(format!("n_paths = {} < 100", self.n_paths));
        }
        if self.n_steps < 1 {
            return bad("n_steps must be ≥ 1".into());
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon {} must be positive", self.horizon));
        }
        match &self.model {
            SimModel::BrownianDrift { sigma, mu, a0 } => {
                if ![sigma, mu, a0].iter().all(|v| v.is_finite()) {
                    return bad("non-finite drift parameters".into());
                }
            }
            SimModel::LevyArea => {}
            SimModel::Besq { x0, delta } => {
                if *x0 < 0.0 || *delta < 0.0 {
                    return bad(format!("BESQ needs x0 ≥ 0 and δ ≥ 0, got {x0}, {delta}"));
                }
            }
            SimModel::Heston {
                xi0,
                nu,
                lambda,
                rho,
                delta,
            } => {
                if *xi0 < 0.0 {
                    return bad(format!("negative initial variance {xi0}"));
                }
                if *nu <= 0.0 || *lambda <= 0.0 || *delta <= 0.0 || !(-1.0..=1.0).contains(rho) {
                    return bad("Heston needs ν, λ, Δ > 0 and ρ ∈ [-1, 1]".into());
                }
            }
            SimModel::StoppedBm { b0 } => {
                if !(-1.0..=1.0).contains(b0) {
                    return bad(format!("b0 = {b0} outside [-1, 1]"));
                }
            }
            SimModel::Chaos2 { kernel } => {
                if kernel.cells() != self.n_steps
                    || (kernel.horizon() - self.horizon).abs() > 1e-12 * self.horizon
                {
                    return Err(Error::GridMismatch(format!(
                        "kernel grid {} cells on [0, {}] vs {} steps on [0, {}]",
                        kernel.cells(),
                        kernel.horizon(),
                        self.n_steps,
                        self.horizon
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Terminal functionals, one column per named quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    names: Vec<&'static str>,
    columns: Vec<Vec<f64>>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl Samples {
    pub fn new(names: Vec<&'static str>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len()
            || columns.is_empty()
            || columns.iter().any(|c| c.len() != columns[0].len())
        {
            return Err(Error::InvalidArgument("ragged sample columns".into()));
        }
        Ok(Samples {
            names,
            columns,
            diagnostics: BTreeMap::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> &[&'static str] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| *n == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn require(&self, name: &str) -> Result<&[f64]> {
        self.column(name).ok_or_else(|| {
            Error::InvalidArgument(format!("samples have no column `{name}`"))
        })
    }

    pub fn column_at(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    /// The first (primary) column.
    pub fn primary(&self) -> &[f64] {
        &self.columns[0]
    }
}

/// Simulates `cfg.n_paths` independent paths. Path `i` draws only from
/// stream `i` of the seeded generator, so results are bit-identical for any
/// thread count.
pub fn simulate(cfg: &SimConfig) -> Result<Samples> {
    cfg.validate()?;
    let names = cfg.model.columns();
    let width = names.len();
    let rows: Vec<[f64; 3]> = with_thread_cap(|| {
        (0..cfg.n_paths)
            .into_par_iter()
            .map(|i| {
                let mut rng = path_rng(cfg.seed, i as u64);
                simulate_path(cfg, &mut rng)
            })
            .collect()
    });
    let columns: Vec<Vec<f64>> = (0..width)
        .map(|c| rows.iter().map(|r| r[c]).collect())
        .collect();
    let mut samples = Samples::new(names, columns)?;
    if let SimModel::StoppedBm { .. } = cfg.model {
        let stopped = pairwise_sum(samples.require("STOPPED")?) / cfg.n_paths as f64;
        samples
            .diagnostics
            .insert("stopped_fraction".into(), stopped);
    }
    samples
        .diagnostics
        .insert("paths".into(), cfg.n_paths as f64);
    samples
        .diagnostics
        .insert("steps".into(), cfg.n_steps as f64);
    Ok(samples)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn simulate_path(cfg: &SimConfig, rng: &mut ChaCha8Rng) -> [f64; 3] {
    let t = cfg.horizon;
    let n = cfg.n_steps;
    let dt = t / n as f64;
    let sdt = dt.sqrt();
    match &cfg.model {
        SimModel::BrownianDrift { sigma, mu, a0 } => {
            [a0 + mu * t + sigma * t.sqrt() * normal(rng), 0.0, 0.0]
        }
        SimModel::LevyArea => {
            let (mut x, mut y, mut a) = (0.0, 0.0, 0.0);
            for _ in 0..n {
                let dx = sdt * normal(rng);
                let dy = sdt * normal(rng);
                a += x * dy - y * dx;
                x += dx;
                y += dy;
            }
            [a, 0.0, 0.0]
        }
        SimModel::Besq { x0, delta } => {
            // X_T/T is noncentral χ² with δ degrees of freedom and
            // non-centrality x0/T: a Poisson(x0/(2T)) mixture of central χ².
            let k = if *x0 > 0.0 {
                Poisson::new(x0 / (2.0 * t)).expect("positive mean").sample(rng)
            } else {
                0.0
            };
            let dof = delta + 2.0 * k;
            let chi2 = if dof > 0.0 {
                Gamma::new(dof / 2.0, 2.0).expect("positive shape").sample(rng)
            } else {
                0.0
            };
            [t * chi2, 0.0, 0.0]
        }
        SimModel::Heston {
            xi0,
            nu,
            lambda,
            rho,
            delta,
        } => {
            let rbar = (1.0 - rho * rho).max(0.0).sqrt();
            let (mut x, mut v, mut qv) = (0.0, *xi0, 0.0);
            for _ in 0..n {
                let vp = v.max(0.0);
                let z1 = normal(rng);
                let z2 = normal(rng);
                let sv = (vp * dt).sqrt();
                x += -0.5 * vp * dt + sv * z1;
                qv += vp * dt;
                v += lambda * (xi0 - vp) * dt + nu * sv * (rho * z1 + rbar * z2);
            }
            let vt = v.max(0.0);
            let zeta = xi0 * delta + (vt - xi0) * (-(-lambda * delta).exp_m1()) / lambda;
            [x, qv, zeta]
        }
        SimModel::StoppedBm { b0 } => {
            let mut b = *b0;
            if b.abs() >= 1.0 {
                return [b.signum(), 1.0, 0.0];
            }
            for _ in 0..n {
                let next = b + sdt * normal(rng);
                if next >= 1.0 {
                    return [1.0, 1.0, 0.0];
                }
                if next <= -1.0 {
                    return [-1.0, 1.0, 0.0];
                }
                // Brownian-bridge probability of touching a barrier inside the step.
                let p_up = (-2.0 * (1.0 - b) * (1.0 - next) / dt).exp();
                let p_dn = (-2.0 * (1.0 + b) * (1.0 + next) / dt).exp();
                let u: f64 = rng.random();
                if u < p_up {
                    return [1.0, 1.0, 0.0];
                }
                if u < p_up + p_dn {
                    return [-1.0, 1.0, 0.0];
                }
                b = next;
            }
            [b, 0.0, 0.0]
        }
        SimModel::Chaos2 { kernel } => {
            let f = kernel.matrix();
            let m = kernel.cells();
            let db: Vec<f64> = (0..m).map(|_| sdt * normal(rng)).collect();
            let mut acc = 0.0;
            for j in 1..m {
                let mut inner = 0.0;
                for i in 0..j {
                    inner += f[(i, j)] * db[i];
                }
                acc += inner * db[j];
            }
            [acc, 0.0, 0.0]
        }
    }
}
