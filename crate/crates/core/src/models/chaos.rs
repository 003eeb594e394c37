//! Second Wiener–Itô chaos `A_T = ∫∫_{w<v≤T} f(w,v) dB_w dB_v`, discretized on
//! a uniform grid with left-point quadrature on the simplex.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::forest::LeafLabel;

use super::{factorial, k_recursion_states, LinearModel, ModelAlgebra};

/// Samples `F[i][j] = f(w_i, v_j)` at left grid points `w_i = i·h`, kept for `i < j` only.
#[derive(Debug, Clone, PartialEq)]
pub struct Chaos2Kernel {
    matrix: DMatrix<f64>,
    horizon: f64,
}

impl Chaos2Kernel {
    pub fn from_fn(horizon: f64, cells: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if cells < 2 || horizon <= 0.0 {
            return Err(Error::InvalidArgument(
                "need T > 0 and at least two grid cells".into(),
            ));
        }
        let h = horizon / cells as f64;
        let matrix = DMatrix::from_fn(cells, cells, |i, j| {
            if i < j {
                f(i as f64 * h, j as f64 * h)
            } else {
                0.0
            }
        });
        Chaos2Kernel::from_matrix(horizon, matrix)
    }

    /// Entries on or below the diagonal are discarded.
    pub fn from_matrix(horizon: f64, mut matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() < 2 {
            return Err(Error::InvalidArgument(
                "kernel matrix must be square with at least two cells".into(),
            ));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite kernel value".into()));
        }
        mask_strict_upper(&mut matrix);
        Ok(Chaos2Kernel { matrix, horizon })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn cells(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.cells() as f64
    }
}

fn mask_strict_upper(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in j..n {
            m[(i, j)] = 0.0;
        }
    }
}

/// Kernel of the martingale part plus the value at time 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Chaos2State {
    pub kernel: DMatrix<f64>,
    pub scalar: f64,
    pub horizon: f64,
}

impl Chaos2State {
    pub fn from_kernel(k: &Chaos2Kernel) -> Self {
        Chaos2State {
            kernel: k.matrix.clone(),
            scalar: 0.0,
            horizon: k.horizon,
        }
    }

    pub fn cells(&self) -> usize {
        self.kernel.nrows()
    }

    fn step(&self) -> f64 {
        self.horizon / self.cells() as f64
    }
}

/// Diamond of two second-chaos states at time 0.
///
/// Kernel: `(f ⊗̃₁ g)(w,u) = ∫_u^T [f(w,s)g(u,s) + g(w,s)f(u,s)] ds` on `w < u`;
/// scalar: `⟨f, g⟩_Δ`.
pub fn chaos2_diamond(s1: &Chaos2State, s2: &Chaos2State) -> Result<Chaos2State> {
    if s1.cells() != s2.cells() || (s1.horizon - s2.horizon).abs() > 1e-12 * s1.horizon.abs() {
        return Err(Error::GridMismatch(format!(
            "{} cells on [0, {}] vs {} cells on [0, {}]",
            s1.cells(),
            s1.horizon,
            s2.cells(),
            s2.horizon
        )));
    }
    let h = s1.step();
    let (f, g) = (&s1.kernel, &s2.kernel);
    let fg = f * g.transpose();
    let mut kernel = (&fg + fg.transpose()) * h;
    mask_strict_upper(&mut kernel);
    let scalar = f.component_mul(g).sum() * h * h;
    Ok(Chaos2State {
        kernel,
        scalar,
        horizon: s1.horizon,
    })
}

/// Model algebra generated by a single second-chaos leaf.
#[derive(Debug, Clone)]
pub struct SecondChaos {
    pub kernel: Chaos2Kernel,
}

impl ModelAlgebra for SecondChaos {
    type State = Chaos2State;

    fn leaf(&self, _label: &LeafLabel) -> Result<Chaos2State> {
        Ok(Chaos2State::from_kernel(&self.kernel))
    }

    fn diamond(&self, lhs: &Chaos2State, rhs: &Chaos2State) -> Result<Chaos2State> {
        chaos2_diamond(lhs, rhs)
    }

    fn value(&self, state: &Chaos2State) -> Result<f64> {
        Ok(state.scalar)
    }
}

impl LinearModel for SecondChaos {
    fn zero(&self) -> Chaos2State {
        let n = self.kernel.cells();
        Chaos2State {
            kernel: DMatrix::zeros(n, n),
            scalar: 0.0,
            horizon: self.kernel.horizon,
        }
    }

    fn axpy(&self, alpha: f64, x: &Chaos2State, y: &Chaos2State) -> Chaos2State {
        Chaos2State {
            kernel: &x.kernel * alpha + &y.kernel,
            scalar: alpha * x.scalar + y.scalar,
            horizon: y.horizon,
        }
    }
}

/// Cumulants `κ₁ … κ_{n_max}` of `A_T`, with `κₙ = n!·(scalar of 𝕂ⁿ)`.
pub fn chaos2_cumulants(f: &Chaos2Kernel, n_max: usize) -> Result<Vec<f64>> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("chaos2_cumulants needs n_max ≥ 2".into()));
    }
    let model = SecondChaos { kernel: f.clone() };
    let states = k_recursion_states(&model, &LeafLabel::new("Y")?, n_max)?;
    Ok(states
        .iter()
        .enumerate()
        .map(|(i, s)| factorial(i + 1) * s.scalar)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_kernel_diamond() {
        let m = 200;
        let k = Chaos2Kernel::from_fn(1.0, m, |_, _| 1.0).unwrap();
        let s = Chaos2State::from_kernel(&k);
        let d = chaos2_diamond(&s, &s).unwrap();
        let h = 1.0 / m as f64;
        // Left-point sum over the strict simplex: ½(1 − h).
        assert!((d.scalar - 0.5 * (1.0 - h)).abs() < 1e-12);
        // Kernel 2(1 − max(r,s)) up to O(h).
        for (i, j) in [(10, 50), (0, 199), (120, 121)] {
            let exact = 2.0 * (1.0 - j as f64 * h);
            assert!((d.kernel[(i, j)] - exact).abs() < 3.0 * h);
            assert_eq!(d.kernel[(j, i)], 0.0);
        }
    }

    #[test]
    fn zero_kernel() {
        let k = Chaos2Kernel::from_fn(1.0, 16, |_, _| 0.0).unwrap();
        let s = Chaos2State::from_kernel(&k);
        let d = chaos2_diamond(&s, &s).unwrap();
        assert_eq!(d.scalar, 0.0);
        assert!(d.kernel.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn grid_mismatch() {
        let a = Chaos2State::from_kernel(&Chaos2Kernel::from_fn(1.0, 8, |_, _| 1.0).unwrap());
        let b = Chaos2State::from_kernel(&Chaos2Kernel::from_fn(1.0, 16, |_, _| 1.0).unwrap());
        assert!(matches!(chaos2_diamond(&a, &b), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn constant_kernel_cumulants_converge() {
        let k = Chaos2Kernel::from_fn(1.0, 400, |_, _| 1.0).unwrap();
        let c = chaos2_cumulants(&k, 4).unwrap();
        assert_eq!(c[0], 0.0);
        for (got, want) in c[1..].iter().zip([0.5, 1.0, 3.0]) {
            assert!((got - want).abs() < 0.05 * want, "{got} vs {want}");
        }
    }

    #[test]
    fn kappa2_is_squared_norm() {
        let k = Chaos2Kernel::from_fn(2.0, 64, |w, v| w - 2.0 * v + 0.3).unwrap();
        let c = chaos2_cumulants(&k, 2).unwrap();
        let h = k.step();
        let norm: f64 = k.matrix().iter().map(|v| v * v).sum::<f64>() * h * h;
        assert!((c[1] - norm).abs() < 1e-12);
    }
}
