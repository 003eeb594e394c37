use std::collections::BTreeMap;

use diamond_forests::expansion::{
    g_expansion, k_expansion_univariate, reorder_through, spx_g_expansion, substitute,
    two_variate_k_expansion, ExpansionKind, ExpansionRequest,
};
use diamond_forests::forest::{leaf, rat, LeafLabel, Poly, Rational, Tree};
use num_traits::Zero;

fn count_symmetric_nodes(t: &Tree) -> u32 {
    match t.children() {
        None => 0,
        Some((l, r)) => u32::from(l == r) + count_symmetric_nodes(l) + count_symmetric_nodes(r),
    }
}

fn all_shapes(n: usize) -> Vec<Tree> {
    if n == 1 {
        return vec![leaf("Y")];
    }
    let mut out = Vec::new();
    for i in 1..=n / 2 {
        for l in all_shapes(i) {
            for r in all_shapes(n - i) {
                out.push(Tree::join(&l, &r));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn catalan(n: u64) -> u64 {
    // C_n = binom(2n, n)/(n+1)
    let mut c = 1u64;
    for k in 0..n {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}

#[test]
fn k_coefficients_are_inverse_symmetry_factors() {
    let k = k_expansion_univariate(10).unwrap();
    for n in 1..=10 {
        let f = k.order(n).unwrap();
        let shapes = all_shapes(n);
        assert_eq!(f.len(), shapes.len(), "n = {n}");
        for t in shapes {
            let want = rat(1, 1 << count_symmetric_nodes(&t));
            assert_eq!(f.coefficient(&t).as_constant(), Some(want), "{t}");
        }
    }
}

#[test]
fn leaf_homogeneity() {
    let k = k_expansion_univariate(9).unwrap();
    for (n, f) in k.iter() {
        assert!(f.terms().all(|(t, _)| t.leaf_count() == n));
    }
    let g = g_expansion(9).unwrap();
    for (n, f) in g.iter() {
        assert!(f.terms().all(|(t, _)| t.leaf_count() == n));
    }
    let s = spx_g_expansion(7).unwrap();
    for (n, f) in s.iter() {
        assert!(f.terms().all(|(t, _)| t.leaf_count() == n));
    }
    let two = two_variate_k_expansion(6).unwrap();
    let q = LeafLabel::new("Q").unwrap();
    let y = LeafLabel::new("Y").unwrap();
    for (n, f) in two.iter() {
        for (t, c) in f.terms() {
            assert_eq!(t.count_label(&y) + t.count_label(&q), n);
            assert_eq!(c.terms().count(), 1);
        }
    }
}

#[test]
fn catalan_sums() {
    let k = k_expansion_univariate(9).unwrap();
    for n in 1..=8u64 {
        let f = k.order(n as usize + 1).unwrap();
        let total: Rational = f
            .terms()
            .map(|(_, c)| c.as_constant().unwrap() * rat(1 << n, 1))
            .fold(Rational::zero(), |a, b| a + b);
        assert!(total.is_integer());
        assert_eq!(total, rat(catalan(n) as i64, 1), "n = {n}");
    }
}

#[test]
fn exponential_martingale_kills_g() {
    let g = g_expansion(10).unwrap();
    let a = Poly::var("a");
    let b = (&a * &a).scale(&rat(-1, 2));
    let killed = substitute(&g, &BTreeMap::from([("b".to_string(), b)])).unwrap();
    assert!(killed.is_identically_zero());
    // a nearby binding does not vanish
    let b = (&a * &a).scale(&rat(-1, 3));
    let kept = substitute(&g, &BTreeMap::from([("b".to_string(), b)])).unwrap();
    assert!(kept.orders.iter().all(|f| !f.is_zero()));
}

#[test]
fn martingality_kills_spx_g() {
    let s = spx_g_expansion(8).unwrap();
    let one = |v: i64| Poly::constant(rat(v, 1));
    let bind = BTreeMap::from([
        ("a".to_string(), one(1)),
        ("b".to_string(), Poly::zero()),
        ("c".to_string(), Poly::zero()),
    ]);
    assert!(substitute(&s, &bind).unwrap().is_identically_zero());
}

#[test]
fn reorder_through_eight() {
    let r = reorder_through(8).unwrap();
    let g = g_expansion(8).unwrap();
    for n in 2..=8 {
        assert_eq!(r.order(n), g.order(n), "leaf count {n}");
    }
}

#[test]
fn g_at_b_zero_is_scaled_k() {
    let g = g_expansion(8).unwrap();
    let k = k_expansion_univariate(8).unwrap();
    let g0 = substitute(&g, &BTreeMap::from([("b".to_string(), Poly::zero())])).unwrap();
    for n in 2..=8 {
        let scaled = k.order(n).unwrap().scale(&Poly::var("a").pow(n as u32));
        assert_eq!(g0.order(n).unwrap(), &scaled);
    }
}

#[test]
fn request_respects_cap() {
    assert!(ExpansionRequest::new(ExpansionKind::K, 13).run().is_err());
    let r = ExpansionRequest::new(ExpansionKind::K, 13)
        .with_order_cap(13)
        .run()
        .unwrap();
    assert_eq!(r.max_order(), 13);
    assert!(r.order(13).unwrap().coefficient(&all_shapes(13)[0]).as_constant().is_some());
}
