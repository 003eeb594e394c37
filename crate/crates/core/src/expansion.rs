//! Cumulant (𝕂) and generalized forest (𝔾) expansions generated by their
//! quadratic diamond recursions, plus forest reordering between them.
//!
//! All forests live in [`Forest`] with exact polynomial coefficients in the
//! formal symbols. Conventions for leaves:
//!
//! * univariate 𝕂 and 𝔾 use a single leaf `Y`;
//! * the 2-variate 𝕂 expansion feeding [`reorder`] uses `Y` (weight `a`) and
//!   `Q` (the quadratic-variation leaf, weight `b`);
//! * the SPX/realized-variance/VIX expansion uses `X` (log-price) and `Z` (ζ).

use std::collections::BTreeMap;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{leaf, rat, Forest, LeafLabel, Poly, Rational, Tree};

/// Default ceiling on the recursion depth.
pub const DEFAULT_ORDER_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpansionKind {
    /// Cumulant recursion, orders start at 1.
    K,
    /// Generalized forest recursion in `(a, b)`, orders start at 2.
    G,
    /// Three-parameter `(a, b, c)` forest recursion over leaves `X`, `Z`.
    SpxG,
}

impl std::str::FromStr for ExpansionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "K" => Ok(ExpansionKind::K),
            "G" => Ok(ExpansionKind::G),
            "SPXG" | "SPX-G" | "SPX_G" => Ok(ExpansionKind::SpxG),
            _ => Err(Error::InvalidArgument(format!("unknown expansion kind `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionResult {
    pub kind: ExpansionKind,
    pub alphabet: Vec<LeafLabel>,
    /// Order of `orders[0]`: 1 for 𝕂, 2 for 𝔾.
    pub first_order: usize,
    pub orders: Vec<Forest>,
}

impl ExpansionResult {
    pub fn max_order(&self) -> usize {
        self.first_order + self.orders.len() - 1
    }

    pub fn order(&self, n: usize) -> Option<&Forest> {
        n.checked_sub(self.first_order)
            .and_then(|i| self.orders.get(i))
    }

    /// `(order, forest)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &Forest)> {
        self.orders
            .iter()
            .enumerate()
            .map(move |(i, f)| (self.first_order + i, f))
    }

    pub fn symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = self.orders.iter().flat_map(|f| f.symbols()).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn is_identically_zero(&self) -> bool {
        self.orders.iter().all(Forest::is_zero)
    }
}

/// A request for one of the built-in expansions.
#[derive(Debug, Clone)]
pub struct ExpansionRequest {
    pub kind: ExpansionKind,
    pub max_order: usize,
    pub order_cap: usize,
}

impl ExpansionRequest {
    pub fn new(kind: ExpansionKind, max_order: usize) -> Self {
        ExpansionRequest {
            kind,
            max_order,
            order_cap: DEFAULT_ORDER_CAP,
        }
    }

    pub fn with_order_cap(mut self, cap: usize) -> Self {
        self.order_cap = cap;
        self
    }

    pub fn run(&self) -> Result<ExpansionResult> {
        if self.max_order > self.order_cap {
            return Err(Error::InvalidArgument(format!(
                "order {} exceeds the configured cap {}",
                self.max_order, self.order_cap
            )));
        }
        match self.kind {
            ExpansionKind::K => k_expansion_univariate(self.max_order),
            ExpansionKind::G => g_expansion(self.max_order),
            ExpansionKind::SpxG => spx_g_expansion(self.max_order),
        }
    }
}

fn label(name: &str) -> LeafLabel {
    LeafLabel::new(name).expect("built-in label")
}

fn half() -> Poly {
    Poly::constant(rat(1, 2))
}

/// ½ Σ_{k=lo}^{n-lo} F^k ⋄ F^{n-k}, using commutativity to halve the work.
fn half_convolution(forests: &BTreeMap<usize, Forest>, n: usize, lo: usize) -> Forest {
    let mut out = Forest::zero();
    if n < 2 * lo {
        return out;
    }
    for k in lo..=(n - lo) {
        let j = n - k;
        if k > j {
            break;
        }
        let prod = forests[&k].diamond(&forests[&j]);
        if k == j {
            out = out.add(&prod.scale(&half()));
        } else {
            out = out.add(&prod);
        }
    }
    out
}

/// Multivariate cumulant recursion over colored leaves.
///
/// `𝕂¹ = Σ weight·leaf`, `𝕂ⁿ⁺¹ = ½ Σ_{k=1}^{n} 𝕂ᵏ ⋄ 𝕂ⁿ⁺¹⁻ᵏ`. Contracting
/// against weights `z_i` yields `⟨z^{⊗n}, 𝕂^{(n)}⟩`.
pub fn k_expansion(max_order: usize, weights: &[(LeafLabel, Poly)]) -> Result<ExpansionResult> {
    if max_order < 1 {
        return Err(Error::InvalidArgument("max_order must be at least 1".into()));
    }
    if weights.is_empty() {
        return Err(Error::InvalidArgument("leaf alphabet is empty".into()));
    }
    let mut k: BTreeMap<usize, Forest> = BTreeMap::new();
    let mut first = Forest::zero();
    for (l, w) in weights {
        first.add_term(Tree::leaf(l.clone()), w.clone());
    }
    k.insert(1, first);
    for n in 2..=max_order {
        let next = half_convolution(&k, n, 1);
        k.insert(n, next);
    }
    Ok(ExpansionResult {
        kind: ExpansionKind::K,
        alphabet: weights.iter().map(|(l, _)| l.clone()).collect(),
        first_order: 1,
        orders: k.into_values().collect(),
    })
}

/// Univariate cumulant forests over the single leaf `Y` with unit weight.
pub fn k_expansion_univariate(max_order: usize) -> Result<ExpansionResult> {
    k_expansion(max_order, &[(label("Y"), Poly::one())])
}

/// The 2-variate 𝕂 expansion of `(Y_T, ⟨Y⟩_T)` with weights `a` on `Y` and `b` on `Q`.
pub fn two_variate_k_expansion(max_order: usize) -> Result<ExpansionResult> {
    k_expansion(
        max_order,
        &[
            (label("Y"), Poly::var("a")),
            (label("Q"), Poly::var("b")),
        ],
    )
}

/// Generalized forest recursion in `(a, b)`:
/// `𝔾² = (½a² + b)·(Y⋄Y)` and `𝔾ᵏ = ½ Σ_{j=2}^{k-2} 𝔾^{k-j}⋄𝔾^j + a·(Y ⋄ 𝔾^{k-1})`.
pub fn g_expansion(max_order: usize) -> Result<ExpansionResult> {
    if max_order < 2 {
        return Err(Error::InvalidArgument("max_order must be at least 2".into()));
    }
    let y = leaf("Y");
    let yf = Forest::single(y.clone(), Poly::one());
    let a = Poly::var("a");
    let g2_coeff = &(&half() * &a.pow(2)) + &Poly::var("b");
    let mut g: BTreeMap<usize, Forest> = BTreeMap::new();
    g.insert(2, Forest::single(Tree::join(&y, &y), g2_coeff));
    for k in 3..=max_order {
        let mut next = half_convolution(&g, k, 2);
        next = next.add(&yf.diamond(&g[&(k - 1)]).scale(&a));
        g.insert(k, next);
    }
    Ok(ExpansionResult {
        kind: ExpansionKind::G,
        alphabet: vec![label("Y")],
        first_order: 2,
        orders: g.into_values().collect(),
    })
}

/// Forest expansion of the joint exponent of log-price `X`, its quadratic
/// variation and the forward-variance functional ζ, in `(a, b, c)`:
///
/// `𝔾² = (½a(a−1)+b)·(X⋄X) + ac·(X⋄Z) + ½c²·(Z⋄Z)` and
/// `𝔾ᵏ = ½ Σ_{j=2}^{k-2} 𝔾^{k-j}⋄𝔾^j + a·(X⋄𝔾^{k-1}) + c·(Z⋄𝔾^{k-1})`.
pub fn spx_g_expansion(max_order: usize) -> Result<ExpansionResult> {
    if max_order < 2 {
        return Err(Error::InvalidArgument("max_order must be at least 2".into()));
    }
    let x = leaf("X");
    let z = leaf("Z");
    let a = Poly::var("a");
    let b = Poly::var("b");
    let c = Poly::var("c");
    let xf = Forest::single(x.clone(), Poly::one());
    let zf = Forest::single(z.clone(), Poly::one());

    let xx = &(&half() * &(&a * &(&a - &Poly::one()))) + &b;
    let mut g2 = Forest::single(Tree::join(&x, &x), xx);
    g2.add_term(Tree::join(&x, &z), &a * &c);
    g2.add_term(Tree::join(&z, &z), &half() * &c.pow(2));

    let mut g: BTreeMap<usize, Forest> = BTreeMap::new();
    g.insert(2, g2);
    for k in 3..=max_order {
        let prev = &g[&(k - 1)];
        let next = half_convolution(&g, k, 2)
            .add(&xf.diamond(prev).scale(&a))
            .add(&zf.diamond(prev).scale(&c));
        g.insert(k, next);
    }
    Ok(ExpansionResult {
        kind: ExpansionKind::SpxG,
        alphabet: vec![label("X"), label("Z")],
        first_order: 2,
        orders: g.into_values().collect(),
    })
}

/// Substitutes symbols by polynomials; forests that vanish stay as zero forests.
pub fn substitute(
    r: &ExpansionResult,
    bindings: &BTreeMap<String, Poly>,
) -> Result<ExpansionResult> {
    let known = r.symbols();
    if let Some(s) = bindings.keys().find(|s| !known.contains(s)) {
        return Err(Error::UnknownSymbol(s.clone()));
    }
    Ok(ExpansionResult {
        orders: r
            .orders
            .iter()
            .map(|f| f.map_coefficients(|p| p.substitute(bindings)))
            .collect(),
        ..r.clone()
    })
}

/// Binds every symbol to a rational constant; all coefficients become constants.
pub fn specialize(
    r: &ExpansionResult,
    bindings: &BTreeMap<String, Rational>,
) -> Result<ExpansionResult> {
    if let Some(s) = r.symbols().into_iter().find(|s| !bindings.contains_key(s)) {
        return Err(Error::UnboundSymbol(s));
    }
    let as_poly: BTreeMap<String, Poly> = bindings
        .iter()
        .filter(|(s, _)| r.symbols().contains(s))
        .map(|(s, v)| (s.clone(), Poly::constant(v.clone())))
        .collect();
    substitute(r, &as_poly)
}

/// Regroups the 2-variate 𝕂 expansion of `(Y_T, ⟨Y⟩_T)` by number of leaves.
///
/// Every `Q` leaf is replaced by the cherry `(Y,Y)` (only the martingale part
/// of `E_t⟨Y⟩_T` enters further diamonds), all orders are summed and the sum
/// is split by leaf count. Bucket `n` collects 𝕂-orders `⌈n/2⌉..=n`, so the
/// output is complete for leaf counts `2..=max_order` of the input and then
/// coincides with [`g_expansion`].
pub fn reorder(two_variate_k: &ExpansionResult) -> Result<ExpansionResult> {
    let y = label("Y");
    let q = label("Q");
    let ok = two_variate_k.kind == ExpansionKind::K
        && two_variate_k.alphabet.len() == 2
        && two_variate_k.alphabet.contains(&y)
        && two_variate_k.alphabet.contains(&q);
    if !ok {
        return Err(Error::InvalidArgument(
            "reorder expects a 𝕂 expansion over the alphabet {Y, Q}".into(),
        ));
    }
    let cherry = Tree::join(&leaf("Y"), &leaf("Y"));
    let mut total = Forest::zero();
    for f in &two_variate_k.orders {
        total = total.add(&f.substitute_leaf(&q, &cherry));
    }
    let graded = total.grade_by_leaves();
    let max = two_variate_k.max_order();
    if max < 2 {
        return Err(Error::InvalidArgument(
            "need 𝕂 orders up to at least 2 to reorder".into(),
        ));
    }
    let orders = (2..=max)
        .map(|n| graded.get(&n).cloned().unwrap_or_default())
        .collect();
    Ok(ExpansionResult {
        kind: ExpansionKind::G,
        alphabet: vec![y],
        first_order: 2,
        orders,
    })
}

/// Builds the 2-variate 𝕂 expansion deep enough and reorders it through `max_leaves`.
pub fn reorder_through(max_leaves: usize) -> Result<ExpansionResult> {
    reorder(&two_variate_k_expansion(max_leaves)?)
}

/// Forest of one entry of the symmetric cumulant tensor 𝕂^{(n);i_1..i_n}.
///
/// `weights` must be the per-label symbols used to build `k`; `multi_index`
/// counts how often each label occurs among `i_1..i_n`.
pub fn cumulant_tensor_entry(
    k: &Forest,
    weights: &[(LeafLabel, String)],
    multi_index: &BTreeMap<LeafLabel, u32>,
) -> Forest {
    let n: u32 = multi_index.values().sum();
    let mut monomial = Poly::one();
    let mut multinomial = factorial(n);
    for (l, sym) in weights {
        let e = multi_index.get(l).copied().unwrap_or(0);
        monomial = &monomial * &Poly::var(sym).pow(e);
        multinomial /= factorial(e);
    }
    let target = monomial
        .terms()
        .next()
        .map(|(m, _)| m.clone())
        .expect("monomial");
    let scale = Rational::one() / Rational::from_integer(multinomial.into());
    k.map_coefficients(|p| Poly::constant(p.coefficient(&target) * &scale))
}

fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        Tree::parse(s).unwrap()
    }

    #[test]
    fn k_rejects_bad_orders() {
        assert!(k_expansion_univariate(0).is_err());
        assert!(g_expansion(1).is_err());
        assert!(spx_g_expansion(1).is_err());
        assert!(k_expansion(3, &[]).is_err());
        assert!(ExpansionRequest::new(ExpansionKind::K, 13).run().is_err());
        assert!(ExpansionRequest::new(ExpansionKind::K, 13)
            .with_order_cap(13)
            .run()
            .is_ok());
    }

    #[test]
    fn k_first_orders() {
        let k = k_expansion_univariate(3).unwrap();
        assert_eq!(k.order(1).unwrap().coefficient(&t("Y")), Poly::one());
        assert_eq!(
            k.order(2).unwrap().coefficient(&t("(Y,Y)")),
            Poly::constant(rat(1, 2))
        );
        assert_eq!(
            k.order(3).unwrap().coefficient(&t("((Y,Y),Y)")),
            Poly::constant(rat(1, 2))
        );
    }

    #[test]
    fn substitute_b_zero_gives_scaled_cumulants() {
        let g = g_expansion(7).unwrap();
        let k = k_expansion_univariate(7).unwrap();
        let bound = substitute(&g, &[("b".to_string(), Poly::zero())].into()).unwrap();
        for n in 2..=7 {
            let scaled = k.order(n).unwrap().scale(&Poly::var("a").pow(n as u32));
            assert_eq!(bound.order(n).unwrap(), &scaled, "order {n}");
        }
    }

    #[test]
    fn a_zero_kills_g3() {
        let g = g_expansion(3).unwrap();
        let b: BTreeMap<String, Rational> =
            [("a".to_string(), rat(0, 1)), ("b".to_string(), rat(1, 3))].into();
        assert!(specialize(&g, &b).unwrap().order(3).unwrap().is_zero());
    }

    #[test]
    fn specialize_errors() {
        let g = g_expansion(3).unwrap();
        let partial: BTreeMap<String, Rational> = [("a".to_string(), rat(1, 1))].into();
        assert!(matches!(specialize(&g, &partial), Err(Error::UnboundSymbol(_))));
        let stray: BTreeMap<String, Poly> = [("q".to_string(), Poly::one())].into();
        assert!(matches!(substitute(&g, &stray), Err(Error::UnknownSymbol(_))));
    }

    #[test]
    fn reorder_rejects_wrong_alphabet() {
        let k = k_expansion_univariate(4).unwrap();
        assert!(reorder(&k).is_err());
    }

    #[test]
    fn tensor_entry_of_mixed_second_cumulant() {
        let weights = [
            (label("Y"), Poly::var("a")),
            (label("Q"), Poly::var("b")),
        ];
        let k = k_expansion(2, &weights).unwrap();
        let named = [(label("Y"), "a".to_string()), (label("Q"), "b".to_string())];
        let idx: BTreeMap<LeafLabel, u32> = [(label("Y"), 1), (label("Q"), 1)].into();
        let entry = cumulant_tensor_entry(k.order(2).unwrap(), &named, &idx);
        // ½(aY + bQ)⋄(aY + bQ) has a·b·(Q⋄Y); the symmetric entry halves it.
        assert_eq!(entry.coefficient(&t("(Q,Y)")), Poly::constant(rat(1, 2)));
    }
}
