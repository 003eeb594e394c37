use gauss_quad::GaussLegendre;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

use super::curve::ForwardVarianceCurve;
use super::grid::{ConvolutionWeights, TauGrid};
use super::kernel::{kappa_bar, KernelSpec};
use super::trees::AffineSetup;

/// Solver controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// `|g|` above this aborts: the parameters are not small enough.
    pub blow_up: f64,
}

impl Default for RiccatiOptions {
    fn default() -> Self {
        RiccatiOptions {
            tolerance: 1e-12,
            max_iterations: 50,
            blow_up: 1e3,
        }
    }
}

/// Solution `g(τ; a, b, c, Δ)` of the convolution Riccati equation on a τ-grid.
#[derive(Debug, Clone)]
pub struct RiccatiSolution {
    pub grid: TauGrid,
    pub g: Vec<f64>,
    pub setup: AffineSetup,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub options: RiccatiOptions,
}

impl RiccatiSolution {
    fn constant(&self) -> f64 {
        riccati_constant(self.setup.rho, self.a, self.b)
    }

    /// Right-hand side of the equation given `(κ⋆g)(τ)`.
    fn rhs(&self, tau: f64, conv: f64) -> f64 {
        let s = self.setup;
        let inner = s.rho * self.a + self.c * kappa_bar(&s.kernel, tau, s.delta) + conv;
        self.constant() + 0.5 * inner * inner
    }

    /// Boundary value `b + ½a(a−1) + ρac·κ̄(0) + ½c²κ̄(0)²`.
    pub fn boundary_value(&self) -> f64 {
        let kb = kappa_bar(&self.setup.kernel, 0.0, self.setup.delta);
        self.b + 0.5 * self.a * (self.a - 1.0) + self.setup.rho * self.a * self.c * kb
            + 0.5 * self.c * self.c * kb * kb
    }

    /// Linear interpolation of `g`.
    pub fn g_at(&self, tau: f64) -> f64 {
        let dt = self.grid.step();
        let k = ((tau / dt).floor() as usize).min(self.grid.steps - 1);
        let w = (tau - self.grid.node(k)) / dt;
        self.g[k] + w * (self.g[k + 1] - self.g[k])
    }

    /// Largest equation residual over (up to) 257 evenly spaced grid points,
    /// recomputing `κ⋆g` for the interpolated `g` by cellwise Gauss–Legendre
    /// quadrature; the power-law singularity is removed by substituting `v = u^α`.
    pub fn residual(&self) -> f64 {
        let quad = GaussLegendre::new(16).expect("degree ≥ 2");
        let stride = (self.grid.steps / 256).max(1);
        let dt = self.grid.step();
        let mut worst: f64 = 0.0;
        for j in (0..=self.grid.steps).step_by(stride) {
            let tj = self.grid.node(j);
            let mut conv = 0.0;
            for d in 1..=j {
                let (u0, u1) = ((d - 1) as f64 * dt, d as f64 * dt);
                conv += match self.setup.kernel {
                    KernelSpec::Exponential { .. } => quad.integrate(u0, u1, |u| {
                        self.setup.kernel.eval(u) * self.g_at(tj - u)
                    }),
                    KernelSpec::PowerLaw { nu, alpha } => {
                        let c = nu / gamma(alpha + 1.0);
                        c * quad.integrate(u0.powf(alpha), u1.powf(alpha), |v| {
                            let u = v.powf(1.0 / alpha).clamp(u0, u1);
                            self.g_at(tj - u)
                        })
                    }
                };
            }
            worst = worst.max((self.g[j] - self.rhs(tj, conv)).abs());
        }
        worst
    }
}

fn riccati_constant(rho: f64, a: f64, b: f64) -> f64 {
    b - 0.5 * a + 0.5 * (1.0 - rho * rho) * a * a
}

/// Solves `g = b − ½a + ½(1−ρ²)a² + ½[ρa + cκ̄ + κ⋆g]²` on `[0, horizon]`.
///
/// Product integration with `g` piecewise linear; each step is a scalar
/// quadratic in `g_j`, solved by safeguarded Newton from a linear
/// extrapolation of the two previous values.
pub fn solve_riccati(
    setup: &AffineSetup,
    (a, b, c): (f64, f64, f64),
    horizon: f64,
    steps: usize,
    options: RiccatiOptions,
) -> Result<RiccatiSolution> {
    if steps < 8 {
        return Err(Error::InvalidArgument(format!("steps = {steps} < 8")));
    }
    let grid = TauGrid::new(horizon, steps)?;
    let weights = ConvolutionWeights::new(&setup.kernel, &grid);
    let diag = weights.diagonal();
    let konst = riccati_constant(setup.rho, a, b);
    let mut g = vec![0.0; steps + 1];
    for j in 0..=steps {
        let tau = grid.node(j);
        let p = setup.rho * a + c * kappa_bar(&setup.kernel, tau, setup.delta)
            + if j == 0 { 0.0 } else { weights.history(&g, j) };
        let f = |x: f64| {
            let inner = p + if j == 0 { 0.0 } else { diag * x };
            x - konst - 0.5 * inner * inner
        };
        let df = |x: f64| 1.0 - if j == 0 { 0.0 } else { diag * (p + diag * x) };
        let mut x = match j {
            0 => konst + 0.5 * p * p,
            1 => g[0],
            _ => 2.0 * g[j - 1] - g[j - 2],
        };
        if j > 0 {
            x = newton(f, df, x, j, &options)?;
        }
        if !x.is_finite() || x.abs() > options.blow_up {
            return Err(Error::Domain(format!(
                "|g| exceeded {} at step {j}: (a, b, c) not small enough",
                options.blow_up
            )));
        }
        g[j] = x;
    }
    Ok(RiccatiSolution {
        grid,
        g,
        setup: *setup,
        a,
        b,
        c,
        options,
    })
}

fn newton(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    mut x: f64,
    step: usize,
    options: &RiccatiOptions,
) -> Result<f64> {
    let mut fx = f(x);
    for _ in 0..options.max_iterations {
        let d = df(x);
        if d.abs() < 1e-14 {
            return Err(Error::Convergence {
                step,
                reason: "vanishing derivative in the scalar solve".into(),
            });
        }
        let mut dx = fx / d;
        let mut trial = x - dx;
        let mut ft = f(trial);
        let mut halvings = 0;
        while !(ft.abs() <= fx.abs()) && halvings < 30 {
            dx *= 0.5;
            trial = x - dx;
            ft = f(trial);
            halvings += 1;
        }
        x = trial;
        fx = ft;
        if dx.abs() <= options.tolerance * x.abs().max(1.0) {
            return Ok(x);
        }
    }
    Err(Error::Convergence {
        step,
        reason: format!("no convergence in {} iterations", options.max_iterations),
    })
}

/// Log joint MGF `a·X_t + c·ζ_t(T) + ∫_t^T ξ_t(u) g(T−u) du`.
pub fn mgf_value(
    sol: &RiccatiSolution,
    x_t: f64,
    curve: &ForwardVarianceCurve,
    zeta_t: f64,
    t: f64,
    horizon: f64,
) -> Result<f64> {
    let tau = horizon - t;
    if tau < 0.0 || tau > sol.grid.horizon * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "T − t = {tau} exceeds the solution horizon {}",
            sol.grid.horizon
        )));
    }
    let integral = sol
        .grid
        .trapezoid_to(&sol.g, tau, |s| curve.at(horizon - s))?;
    Ok(sol.a * x_t + sol.c * zeta_t + integral)
}
