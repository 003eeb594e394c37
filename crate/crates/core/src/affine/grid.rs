use crate::error::{Error, Result};

use super::kernel::KernelSpec;

/// Uniform grid `τ_k = k·Δτ`, `k = 0..=steps`, on `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauGrid {
    pub horizon: f64,
    pub steps: usize,
}

impl TauGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) || steps < 1 {
            return Err(Error::InvalidArgument(format!(
                "grid needs a positive horizon and steps ≥ 1, got {horizon}, {steps}"
            )));
        }
        Ok(TauGrid { horizon, steps })
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        k as f64 * self.step()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.node(k)).collect()
    }

    /// `∫_0^upto w(τ) f(τ) dτ` by the trapezoid rule on the grid, where `f` is
    /// given at the nodes; a partial last cell is handled by linear interpolation.
    pub fn trapezoid_to(&self, f: &[f64], upto: f64, mut w: impl FnMut(f64) -> f64) -> Result<f64> {
        let dt = self.step();
        if upto > self.horizon * (1.0 + 1e-12) || upto < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "integration bound {upto} outside the grid [0, {}]",
                self.horizon
            )));
        }
        let upto = upto.min(self.horizon);
        let full = ((upto / dt) * (1.0 + 1e-14)).floor() as usize;
        let full = full.min(self.steps);
        let mut acc = 0.0;
        let mut prev = w(0.0) * f[0];
        for k in 1..=full {
            let cur = w(self.node(k)) * f[k];
            acc += 0.5 * dt * (prev + cur);
            prev = cur;
        }
        let rest = upto - self.node(full);
        if full < self.steps && rest > 1e-14 * dt {
            let s = rest / dt;
            let fe = f[full] + s * (f[full + 1] - f[full]);
            acc += 0.5 * rest * (prev + w(upto) * fe);
        }
        Ok(acc)
    }
}

/// Product-integration weights for `(κ⋆h)(τ_j) = ∫_0^{τ_j} κ(τ_j − σ) h(σ) dσ`
/// with `h` piecewise linear on the grid:
/// `(κ⋆h)(τ_j) = Σ_{k<j} lo[j−k]·h_k + hi[j−k]·h_{k+1}`.
#[derive(Debug, Clone)]
pub struct ConvolutionWeights {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl ConvolutionWeights {
    pub fn new(kernel: &KernelSpec, grid: &TauGrid) -> Self {
        let dt = grid.step();
        let mut lo = vec![0.0; grid.steps + 1];
        let mut hi = vec![0.0; grid.steps + 1];
        for d in 1..=grid.steps {
            let (a, b) = ((d - 1) as f64 * dt, d as f64 * dt);
            let (m0, m1) = kernel.moments(a, b);
            // On the cell, h(τ_j − u) = h_k + (h_{k+1} − h_k)(b − u)/Δτ.
            let w_hi = (b * m0 - m1) / dt;
            hi[d] = w_hi;
            lo[d] = m0 - w_hi;
        }
        ConvolutionWeights { lo, hi }
    }

    /// Weight of `h_j` in `(κ⋆h)(τ_j)`.
    pub fn diagonal(&self) -> f64 {
        self.hi.get(1).copied().unwrap_or(0.0)
    }

    /// `(κ⋆h)(τ_j)` without the `h_j` term.
    pub fn history(&self, h: &[f64], j: usize) -> f64 {
        let mut s = 0.0;
        for k in 0..j {
            s += self.lo[j - k] * h[k];
            if k + 1 < j {
                s += self.hi[j - k] * h[k + 1];
            }
        }
        s
    }

    /// `(κ⋆h)` at every node.
    pub fn convolve(&self, h: &[f64]) -> Vec<f64> {
        (0..h.len())
            .map(|j| {
                if j == 0 {
                    0.0
                } else {
                    self.history(h, j) + self.diagonal() * h[j]
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convolution_of_constant_is_kernel_integral() {
        let k = KernelSpec::power_law(0.5, 0.7).unwrap();
        let g = TauGrid::new(1.0, 50).unwrap();
        let w = ConvolutionWeights::new(&k, &g);
        let c = w.convolve(&vec![1.0; 51]);
        for (j, v) in c.iter().enumerate() {
            let exact = k.moments(0.0, g.node(j)).0;
            assert!((v - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn convolution_of_linear_is_exact() {
        let k = KernelSpec::exponential(0.8, 1.5).unwrap();
        let g = TauGrid::new(2.0, 40).unwrap();
        let w = ConvolutionWeights::new(&k, &g);
        let h: Vec<f64> = g.nodes().iter().map(|t| 1.0 + 3.0 * t).collect();
        let c = w.convolve(&h);
        for (j, v) in c.iter().enumerate() {
            let tj = g.node(j);
            // ∫_0^τ κ(u)(1 + 3(τ − u)) du
            let (m0, m1) = k.moments(0.0, tj);
            let exact = (1.0 + 3.0 * tj) * m0 - 3.0 * m1;
            assert!((v - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn trapezoid_partial_cell() {
        let g = TauGrid::new(1.0, 10).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|t| 2.0 * t).collect();
        let v = g.trapezoid_to(&f, 0.55, |_| 1.0).unwrap();
        assert!((v - 0.55 * 0.55).abs() < 1e-14);
        assert!(g.trapezoid_to(&f, 1.5, |_| 1.0).is_err());
    }
}
