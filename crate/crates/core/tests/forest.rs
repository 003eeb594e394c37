use diamond_forests::forest::{leaf, rat, wedderburn_etherington, Forest, Poly, Tree};
use num_bigint::BigUint;
use proptest::prelude::*;

fn arb_tree() -> impl Strategy<Value = Tree> {
    let base = prop_oneof![Just(leaf("Y")), Just(leaf("Q")), Just(leaf("X"))];
    base.prop_recursive(5, 24, 2, |inner| {
        (inner.clone(), inner).prop_map(|(l, r)| Tree::join(&l, &r))
    })
}

fn arb_coeff() -> impl Strategy<Value = Poly> {
    (-6i64..=6, 1i64..=5, 0u32..=2).prop_map(|(n, d, p)| {
        let c = Poly::constant(rat(n, d));
        &c * &Poly::var("a").pow(p)
    })
}

fn arb_forest() -> impl Strategy<Value = Forest> {
    prop::collection::vec((arb_tree(), arb_coeff()), 0..5).prop_map(|terms| {
        let mut f = Forest::zero();
        for (t, c) in terms {
            f.add_term(t, c);
        }
        f
    })
}

proptest! {
    #[test]
    fn join_commutes(t1 in arb_tree(), t2 in arb_tree()) {
        let a = Tree::join(&t1, &t2);
        let b = Tree::join(&t2, &t1);
        prop_assert_eq!(a.serialize(), b.serialize());
        prop_assert_eq!(a.leaf_count(), t1.leaf_count() + t2.leaf_count());
    }

    #[test]
    fn serialization_round_trips(t in arb_tree()) {
        let back = Tree::parse(t.serialize()).unwrap();
        prop_assert_eq!(back.serialize(), t.serialize());
        prop_assert_eq!(back, t);
    }

    #[test]
    fn diamond_is_bilinear(f1 in arb_forest(), f2 in arb_forest(), g in arb_forest(), c in arb_coeff()) {
        prop_assert_eq!(f1.add(&f2).diamond(&g), f1.diamond(&g).add(&f2.diamond(&g)));
        prop_assert_eq!(f1.scale(&c).diamond(&g), f1.diamond(&g).scale(&c));
        prop_assert_eq!(f1.diamond(&g), g.diamond(&f1));
    }

    #[test]
    fn no_zero_terms_survive(f in arb_forest()) {
        let neg = f.scale(&Poly::constant(rat(-1, 1)));
        prop_assert!(f.add(&neg).is_zero());
        prop_assert!(f.terms().all(|(_, c)| !c.is_zero()));
    }

    #[test]
    fn json_round_trips(f in arb_forest()) {
        prop_assert_eq!(Forest::from_json(&f.to_json()).unwrap(), f);
    }
}

#[test]
fn join_is_not_associative() {
    let y = leaf("Y");
    let c = Tree::join(&y, &y);
    let balanced = Tree::join(&c, &c);
    let comb = Tree::join(&y, &Tree::join(&y, &c));
    assert_ne!(balanced, comb);
    assert_ne!(balanced.serialize(), comb.serialize());
}

/// Shapes with `n` leaves, built by brute force over all splits.
fn shapes(n: usize, memo: &mut Vec<Vec<Tree>>) -> Vec<Tree> {
    if let Some(s) = memo.get(n).filter(|s| !s.is_empty()) {
        return s.clone();
    }
    let mut out = Vec::new();
    if n == 1 {
        out.push(leaf("Y"));
    } else {
        for i in 1..n {
            for l in shapes(i, memo) {
                for r in shapes(n - i, memo) {
                    out.push(Tree::join(&l, &r));
                }
            }
        }
        out.sort();
        out.dedup();
    }
    while memo.len() <= n {
        memo.push(Vec::new());
    }
    memo[n] = out.clone();
    out
}

#[test]
fn wedderburn_etherington_matches_enumeration() {
    let mut memo = Vec::new();
    for n in 1..=10 {
        let count = shapes(n, &mut memo).len();
        assert_eq!(wedderburn_etherington(n), BigUint::from(count), "n = {n}");
    }
}
