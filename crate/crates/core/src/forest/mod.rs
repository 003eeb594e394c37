//! Binary trees with typed leaves, forests of such trees with polynomial
//! coefficients, and the root-joining diamond product on them.

mod poly;
mod tree;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use poly::{format_rational, parse_rational, rat, rational_to_f64, Monomial, Poly, Rational};
pub use tree::{leaf, LeafLabel, Tree};

use crate::error::Result;

/// Finite linear combination of trees with [`Poly`] coefficients.
///
/// Terms whose coefficient cancels to zero are removed immediately, so the
/// zero forest is exactly the forest with no terms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Forest {
    terms: BTreeMap<Tree, Poly>,
}

impl Forest {
    pub fn zero() -> Self {
        Forest::default()
    }

    pub fn single(tree: Tree, coeff: Poly) -> Self {
        let mut f = Forest::zero();
        f.add_term(tree, coeff);
        f
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Tree, &Poly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, tree: &Tree) -> Poly {
        self.terms.get(tree).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, tree: Tree, coeff: Poly) {
        if coeff.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&tree) {
            Some(old) => &old + &coeff,
            None => coeff,
        };
        if !sum.is_zero() {
            self.terms.insert(tree, sum);
        }
    }

    pub fn add(&self, other: &Forest) -> Forest {
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Poly) -> Forest {
        let mut out = Forest::zero();
        for (t, p) in &self.terms {
            out.add_term(t.clone(), p * c);
        }
        out
    }

    /// Bilinear extension of [`Tree::join`].
    pub fn diamond(&self, other: &Forest) -> Forest {
        let mut out = Forest::zero();
        for (t1, c1) in &self.terms {
            for (t2, c2) in &other.terms {
                out.add_term(Tree::join(t1, t2), c1 * c2);
            }
        }
        out
    }

    /// Splits the forest by number of leaves.
    pub fn grade_by_leaves(&self) -> BTreeMap<usize, Forest> {
        let mut out: BTreeMap<usize, Forest> = BTreeMap::new();
        for (t, c) in &self.terms {
            out.entry(t.leaf_count())
                .or_default()
                .add_term(t.clone(), c.clone());
        }
        out
    }

    pub fn substitute_leaf(&self, label: &LeafLabel, replacement: &Tree) -> Forest {
        let mut out = Forest::zero();
        for (t, c) in &self.terms {
            out.add_term(t.substitute(label, replacement), c.clone());
        }
        out
    }

    /// Applies `f` to every coefficient, dropping terms that become zero.
    pub fn map_coefficients(&self, mut f: impl FnMut(&Poly) -> Poly) -> Forest {
        let mut out = Forest::zero();
        for (t, c) in &self.terms {
            out.add_term(t.clone(), f(c));
        }
        out
    }

    pub fn symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = self.terms.values().flat_map(|p| p.symbols()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Human-readable form in diamond notation, one term per line.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(t, c)| format!("({c}) · {}", t.to_diamond_notation()))
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn to_json(&self) -> ForestJson {
        ForestJson {
            trees: self
                .terms
                .iter()
                .map(|(t, c)| TreeTermJson {
                    shape: t.serialize().to_string(),
                    coeff: poly_to_string(c),
                    leaves: t.leaf_count(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &ForestJson) -> Result<Forest> {
        let mut out = Forest::zero();
        for term in &json.trees {
            out.add_term(Tree::parse(&term.shape)?, Poly::parse(&term.coeff)?);
        }
        Ok(out)
    }
}

fn poly_to_string(p: &Poly) -> String {
    match p.as_constant() {
        Some(c) => format_rational(&c),
        None => p.to_string(),
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Wire form of a forest: `{"trees":[{"shape":"((Y,Y),Y)","coeff":"1/2","leaves":3}]}`.
///
/// Constant coefficients are written as `"p/q"`; symbolic ones in the
/// polynomial syntax accepted by [`Poly::parse`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestJson {
    pub trees: Vec<TreeTermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeTermJson {
    pub shape: String,
    pub coeff: String,
    #[serde(default)]
    pub leaves: usize,
}

/// Number of distinct shapes of commutative, non-associative binary trees with
/// `n` leaves (Wedderburn–Etherington numbers, starting 0, 1, 1, 1, 2, 3, 6).
pub fn wedderburn_etherington(n: usize) -> BigUint {
    let mut w: Vec<BigUint> = vec![BigUint::zero(); n.max(1) + 1];
    if n == 0 {
        return BigUint::zero();
    }
    w[1] = BigUint::one();
    for m in 2..=n {
        let mut acc = BigUint::zero();
        // Unordered pairs {i, m - i}: i < m - i, plus the symmetric pair when m is even.
        for i in 1..=(m - 1) / 2 {
            acc += &w[i] * &w[m - i];
        }
        if m % 2 == 0 {
            let h = &w[m / 2];
            acc += h * (h + BigUint::one()) / BigUint::from(2u32);
        }
        w[m] = acc;
    }
    w[n].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y() -> Tree {
        leaf("Y")
    }

    #[test]
    fn diamond_of_leaves_is_cherry() {
        let f = Forest::single(y(), Poly::one());
        let d = f.diamond(&f);
        assert_eq!(d.len(), 1);
        assert_eq!(d.coefficient(&Tree::join(&y(), &y())), Poly::one());
        assert!(f.diamond(&Forest::zero()).is_zero());
    }

    #[test]
    fn quarter_cherry_squared() {
        let cherry = Tree::join(&y(), &y());
        let half = Poly::constant(rat(1, 2));
        let f = Forest::single(cherry.clone(), half);
        let d = f.diamond(&f);
        assert_eq!(
            d.coefficient(&Tree::join(&cherry, &cherry)),
            Poly::constant(rat(1, 4))
        );
    }

    #[test]
    fn grading_partitions_forest() {
        let cherry = Tree::join(&y(), &y());
        let mut f = Forest::single(y(), Poly::var("a"));
        f.add_term(cherry.clone(), Poly::var("b"));
        f.add_term(Tree::join(&cherry, &y()), Poly::one());
        let g = f.grade_by_leaves();
        assert_eq!(g.keys().copied().collect::<Vec<_>>(), vec![1, 2, 3]);
        let total = g.values().fold(Forest::zero(), |acc, x| acc.add(x));
        assert_eq!(total, f);
        assert!(Forest::zero().grade_by_leaves().is_empty());
    }

    #[test]
    fn cancelling_terms_are_removed() {
        let mut f = Forest::single(y(), Poly::var("a"));
        f.add_term(y(), -&Poly::var("a"));
        assert!(f.is_zero());
    }

    #[test]
    fn we_numbers() {
        let got: Vec<u64> = (0..=11)
            .map(|n| wedderburn_etherington(n).try_into().unwrap())
            .collect();
        assert_eq!(got, vec![0, 1, 1, 1, 2, 3, 6, 11, 23, 46, 98, 207]);
    }

    #[test]
    fn json_round_trip() {
        let cherry = Tree::join(&y(), &y());
        let mut f = Forest::single(cherry.clone(), Poly::constant(rat(1, 8)));
        f.add_term(Tree::join(&cherry, &y()), Poly::parse("a*(1/2*a^2+b)").unwrap());
        let json = serde_json::to_string(&f.to_json()).unwrap();
        let back: ForestJson = serde_json::from_str(&json).unwrap();
        assert_eq!(Forest::from_json(&back).unwrap(), f);
        assert!(json.contains("\"shape\":\"(Y,Y)\",\"coeff\":\"1/8\""));
    }
}
