//! Closed "model algebras": concrete semimartingale families in which the
//! diamond product of two members is again a member, so forests produced by
//! [`crate::expansion`] can be evaluated exactly or on a grid.

pub mod bessel;
pub mod brownian;
pub mod cameron_martin;
pub mod chaos;
pub mod levy;
pub mod signature;

use std::collections::{BTreeMap, HashMap};

use crate::error::Result;
use crate::forest::{Forest, LeafLabel, Tree};

/// A family of processes closed under the diamond product.
///
/// `value` evaluates a state at the evaluation point `(t, T, F_t-data)` the
/// model instance was built for.
pub trait ModelAlgebra {
    type State: Clone;

    fn leaf(&self, label: &LeafLabel) -> Result<Self::State>;

    fn diamond(&self, lhs: &Self::State, rhs: &Self::State) -> Result<Self::State>;

    fn value(&self, state: &Self::State) -> Result<f64>;
}

/// Model algebras whose states form a vector space.
pub trait LinearModel: ModelAlgebra {
    fn zero(&self) -> Self::State;

    /// `alpha·x + y`
    fn axpy(&self, alpha: f64, x: &Self::State, y: &Self::State) -> Self::State;
}

/// Evaluates trees in a model, memoizing every subtree.
pub struct TreeEvaluator<'m, M: ModelAlgebra> {
    model: &'m M,
    cache: HashMap<Tree, M::State>,
}

impl<'m, M: ModelAlgebra> TreeEvaluator<'m, M> {
    pub fn new(model: &'m M) -> Self {
        TreeEvaluator {
            model,
            cache: HashMap::new(),
        }
    }

    pub fn state(&mut self, tree: &Tree) -> Result<M::State> {
        if let Some(s) = self.cache.get(tree) {
            return Ok(s.clone());
        }
        let s = match tree.children() {
            None => self.model.leaf(tree.label().expect("leaf has a label"))?,
            Some((l, r)) => {
                let ls = self.state(l)?;
                let rs = self.state(r)?;
                self.model.diamond(&ls, &rs)?
            }
        };
        self.cache.insert(tree.clone(), s.clone());
        Ok(s)
    }

    pub fn tree_value(&mut self, tree: &Tree) -> Result<f64> {
        let s = self.state(tree)?;
        self.model.value(&s)
    }

    /// `Σ coeff(tree)·value(tree)` with the coefficients evaluated at `bindings`.
    pub fn forest_value(&mut self, forest: &Forest, bindings: &BTreeMap<String, f64>) -> Result<f64> {
        let mut acc = 0.0;
        for (t, c) in forest.terms() {
            acc += c.eval(bindings)? * self.tree_value(t)?;
        }
        Ok(acc)
    }
}

/// Runs the cumulant recursion directly on model states, starting from the
/// leaf `label`: returns the states of 𝕂¹..𝕂ⁿ.
pub fn k_recursion_states<M: LinearModel>(
    model: &M,
    label: &LeafLabel,
    n_max: usize,
) -> Result<Vec<M::State>> {
    let mut k = vec![model.leaf(label)?];
    for n in 2..=n_max {
        let mut next = model.zero();
        for i in 1..n {
            let j = n - i;
            if i > j {
                break;
            }
            let prod = model.diamond(&k[i - 1], &k[j - 1])?;
            let w = if i == j { 0.5 } else { 1.0 };
            next = model.axpy(w, &prod, &next);
        }
        k.push(next);
    }
    Ok(k)
}

/// Values of 𝕂¹..𝕂ⁿ in `model`.
pub fn k_recursion_values<M: LinearModel>(
    model: &M,
    label: &LeafLabel,
    n_max: usize,
) -> Result<Vec<f64>> {
    k_recursion_states(model, label, n_max)?
        .iter()
        .map(|s| model.value(s))
        .collect()
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
