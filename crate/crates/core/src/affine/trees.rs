use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expansion::spx_g_expansion;
use crate::forest::{LeafLabel, Tree};
use crate::models::{ModelAlgebra, TreeEvaluator};

use super::curve::ForwardVarianceCurve;
use super::grid::{ConvolutionWeights, TauGrid};
use super::kernel::{kappa_bar, KernelSpec};

/// Model constants shared by tree evaluation and the Riccati solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineSetup {
    pub kernel: KernelSpec,
    /// Correlation between the price and variance drivers.
    pub rho: f64,
    /// Window length Δ of `ζ_t(T) = ∫_T^{T+Δ} ξ_t(u) du`.
    pub delta: f64,
}

impl AffineSetup {
    pub fn new(kernel: KernelSpec, rho: f64, delta: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&rho) {
            return Err(Error::InvalidArgument(format!("ρ = {rho} outside [-1, 1]")));
        }
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument(format!("Δ = {delta} must be positive")));
        }
        Ok(AffineSetup { kernel, rho, delta })
    }
}

/// Where a tree is evaluated: `ξ_t(·)`, the time `t`, horizon `T` and the
/// current values `X_t`, `ζ_t(T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePoint {
    pub curve: ForwardVarianceCurve,
    pub t: f64,
    pub horizon: f64,
    pub x_t: f64,
    pub zeta_t: f64,
}

/// `τ ↦ h(τ)` on a uniform grid, so that a tree's value is `∫_t^T ξ_t(u) h(T−u) du`.
#[derive(Debug, Clone, PartialEq)]
pub struct HFunction {
    pub grid: TauGrid,
    pub values: Vec<f64>,
}

impl HFunction {
    /// `∫_0^{T−t} ξ_t(T−τ) h(τ) dτ`
    pub fn integrate(&self, curve: &ForwardVarianceCurve, t: f64, horizon: f64) -> Result<f64> {
        self.grid
            .trapezoid_to(&self.values, horizon - t, |tau| curve.at(horizon - tau))
    }

    pub fn l1_norm(&self) -> f64 {
        self.grid
            .trapezoid_to(&self.values.iter().map(|v| v.abs()).collect::<Vec<_>>(), self.grid.horizon, |_| 1.0)
            .unwrap_or(f64::INFINITY)
    }
}

/// State of a leaf or tree: its integrands against the price driver (`p`) and
/// the variance driver (`q`), both as functions of `τ = T − s`.
#[derive(Debug, Clone)]
pub enum AffineState {
    X,
    Zeta,
    Tree { h: Arc<Vec<f64>>, q: Arc<Vec<f64>> },
}

/// Diamond-tree calculus of an affine forward-variance model on a τ-grid.
#[derive(Debug, Clone)]
pub struct AffineTrees {
    setup: AffineSetup,
    grid: TauGrid,
    weights: ConvolutionWeights,
    zeta_q: Arc<Vec<f64>>,
    point: Option<AffinePoint>,
}

impl AffineTrees {
    pub fn new(setup: AffineSetup, grid: TauGrid) -> Self {
        let weights = ConvolutionWeights::new(&setup.kernel, &grid);
        let zeta_q = Arc::new(
            grid.nodes()
                .iter()
                .map(|&tau| kappa_bar(&setup.kernel, tau, setup.delta))
                .collect(),
        );
        AffineTrees {
            setup,
            grid,
            weights,
            zeta_q,
            point: None,
        }
    }

    pub fn at(mut self, point: AffinePoint) -> Self {
        self.point = Some(point);
        self
    }

    fn integrands<'a>(&'a self, s: &'a AffineState) -> (f64, Option<&'a [f64]>) {
        match s {
            AffineState::X => (1.0, None),
            AffineState::Zeta => (0.0, Some(self.zeta_q.as_slice())),
            AffineState::Tree { q, .. } => (0.0, Some(q.as_slice())),
        }
    }
}

impl ModelAlgebra for AffineTrees {
    type State = AffineState;

    fn leaf(&self, label: &LeafLabel) -> Result<AffineState> {
        match label.as_str() {
            "X" => Ok(AffineState::X),
            "Z" => Ok(AffineState::Zeta),
            other => Err(Error::UnsupportedLabel(format!(
                "affine trees take leaves X and Z (for ζ), got `{other}`"
            ))),
        }
    }

    fn diamond(&self, lhs: &AffineState, rhs: &AffineState) -> Result<AffineState> {
        let (p1, q1) = self.integrands(lhs);
        let (p2, q2) = self.integrands(rhs);
        let rho = self.setup.rho;
        let n = self.grid.steps + 1;
        let h: Vec<f64> = (0..n)
            .map(|k| {
                let a = q1.map_or(0.0, |q| q[k]);
                let b = q2.map_or(0.0, |q| q[k]);
                p1 * p2 + a * b + rho * (p1 * b + p2 * a)
            })
            .collect();
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("tree integrand h is not finite".into()));
        }
        let q = self.weights.convolve(&h);
        Ok(AffineState::Tree {
            h: Arc::new(h),
            q: Arc::new(q),
        })
    }

    fn value(&self, state: &AffineState) -> Result<f64> {
        let p = self.point.as_ref().ok_or_else(|| {
            Error::InvalidArgument("affine tree model has no evaluation point".into())
        })?;
        match state {
            AffineState::X => Ok(p.x_t),
            AffineState::Zeta => Ok(p.zeta_t),
            AffineState::Tree { h, .. } => HFunction {
                grid: self.grid,
                values: h.to_vec(),
            }
            .integrate(&p.curve, p.t, p.horizon),
        }
    }
}

/// `h` for a tree with at least two leaves from `{X, Z}`.
pub fn tree_h(tree: &Tree, setup: &AffineSetup, grid: &TauGrid) -> Result<HFunction> {
    if tree.is_leaf() {
        return Err(Error::InvalidArgument(
            "tree_h needs a tree with at least two leaves".into(),
        ));
    }
    let model = AffineTrees::new(*setup, *grid);
    match TreeEvaluator::new(&model).state(tree)? {
        AffineState::Tree { h, .. } => Ok(HFunction {
            grid: *grid,
            values: h.to_vec(),
        }),
        _ => unreachable!("inner nodes always carry h"),
    }
}

/// Values of `𝔾²…𝔾^{max_order}` of the SPX expansion at `(a, b, c)`.
pub fn spx_expansion_terms(
    max_order: usize,
    setup: &AffineSetup,
    point: &AffinePoint,
    (a, b, c): (f64, f64, f64),
    steps: usize,
) -> Result<Vec<f64>> {
    if max_order < 2 {
        return Err(Error::InvalidArgument("expansion order must be ≥ 2".into()));
    }
    let expansion = spx_g_expansion(max_order)?;
    let grid = TauGrid::new(point.horizon - point.t, steps)?;
    let model = AffineTrees::new(*setup, grid).at(point.clone());
    let mut eval = TreeEvaluator::new(&model);
    let bindings = BTreeMap::from([
        ("a".to_string(), a),
        ("b".to_string(), b),
        ("c".to_string(), c),
    ]);
    (2..=max_order)
        .map(|k| eval.forest_value(expansion.order(k).expect("order was expanded"), &bindings))
        .collect()
}

/// Truncated exponent `Σ_{k=2}^{order} 𝔾ᵏ_t(T; a, b, c)`.
pub fn spx_expansion_value(
    order: usize,
    setup: &AffineSetup,
    point: &AffinePoint,
    abc: (f64, f64, f64),
    steps: usize,
) -> Result<f64> {
    Ok(spx_expansion_terms(order, setup, point, abc, steps)?.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::leaf;
    use statrs::function::gamma::gamma;

    fn x() -> Tree {
        leaf("X")
    }

    #[test]
    fn xx_is_one() {
        let s = AffineSetup::new(KernelSpec::exponential(0.3, 1.0).unwrap(), -0.7, 0.1).unwrap();
        let g = TauGrid::new(1.0, 16).unwrap();
        let h = tree_h(&Tree::join(&x(), &x()), &s, &g).unwrap();
        assert!(h.values.iter().all(|&v| v == 1.0));
        assert!(tree_h(&x(), &s, &g).is_err());
        assert!(tree_h(&leaf("Y"), &s, &g).is_err());
    }

    #[test]
    fn heston_three_leaves() {
        let (nu, lambda, rho) = (0.3, 1.5, -0.7);
        let s = AffineSetup::new(KernelSpec::exponential(nu, lambda).unwrap(), rho, 0.1).unwrap();
        let g = TauGrid::new(1.0, 64).unwrap();
        let t = Tree::join(&x(), &Tree::join(&x(), &x()));
        let h = tree_h(&t, &s, &g).unwrap();
        for (k, tau) in g.nodes().into_iter().enumerate() {
            let want = rho * nu / lambda * (1.0 - (-lambda * tau).exp());
            assert!((h.values[k] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn rough_heston_balanced_four() {
        let (nu, alpha) = (0.3, 0.7);
        let s = AffineSetup::new(KernelSpec::power_law(nu, alpha).unwrap(), -0.7, 0.1).unwrap();
        let g = TauGrid::new(1.0, 64).unwrap();
        let c = Tree::join(&x(), &x());
        let h = tree_h(&Tree::join(&c, &c), &s, &g).unwrap();
        for (k, tau) in g.nodes().into_iter().enumerate() {
            let want = nu * nu / gamma(1.0 + alpha).powi(2) * tau.powf(2.0 * alpha);
            assert!((h.values[k] - want).abs() < 1e-13);
        }
    }

    #[test]
    fn zeta_base_cases() {
        let k = KernelSpec::exponential(0.3, 1.0).unwrap();
        let s = AffineSetup::new(k, -0.5, 0.25).unwrap();
        let g = TauGrid::new(1.0, 8).unwrap();
        let z = leaf("Z");
        let xz = tree_h(&Tree::join(&x(), &z), &s, &g).unwrap();
        let zz = tree_h(&Tree::join(&z, &z), &s, &g).unwrap();
        for (i, tau) in g.nodes().into_iter().enumerate() {
            let kb = kappa_bar(&k, tau, 0.25);
            assert!((xz.values[i] + 0.5 * kb).abs() < 1e-15);
            assert!((zz.values[i] - kb * kb).abs() < 1e-15);
        }
    }

    #[test]
    fn order_two_expansion() {
        let s = AffineSetup::new(KernelSpec::exponential(0.3, 1.0).unwrap(), -0.7, 0.1).unwrap();
        let p = AffinePoint {
            curve: ForwardVarianceCurve::flat(0.04).unwrap(),
            t: 0.0,
            horizon: 0.5,
            x_t: 0.0,
            zeta_t: 0.0,
        };
        let (a, b) = (0.25, 0.1);
        let v = spx_expansion_value(2, &s, &p, (a, b, 0.0), 32).unwrap();
        let want = (0.5 * a * (a - 1.0) + b) * 0.04 * 0.5;
        assert!((v - want).abs() < 1e-15);
        let terms = spx_expansion_terms(6, &s, &p, (1.0, 0.0, 0.0), 32).unwrap();
        assert!(terms.iter().all(|&v| v == 0.0));
    }
}
