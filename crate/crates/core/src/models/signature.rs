//! Iterated Itô (`B^w`) and Stratonovich (`B̂^w`) integrals of a
//! d-dimensional Brownian motion, and their diamond products.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::forest::{format_rational, rat, rational_to_f64, Rational};

/// Word over the alphabet `1..=9`, written as a digit string.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if let Some(bad) = letters.iter().find(|&&l| !(1..=9).contains(&l)) {
            return Err(Error::InvalidArgument(format!(
                "letter {bad} outside 1..=9"
            )));
        }
        Ok(Word(letters))
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&self, letter: u8) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }

    /// Last letter and the prefix before it.
    pub fn split_last(&self) -> Option<(Word, u8)> {
        self.0
            .split_last()
            .map(|(l, rest)| (Word(rest.to_vec()), *l))
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "∅" {
            return Ok(Word::empty());
        }
        let letters = s
            .chars()
            .map(|c| match c.to_digit(10) {
                Some(d) if d >= 1 => Ok(d as u8),
                _ => Err(Error::Parse(format!("bad letter `{c}` in word `{s}`"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Word(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("∅");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Shuffle product with multiplicities.
pub fn shuffle(a: &Word, b: &Word) -> BTreeMap<Word, u64> {
    let mut out = BTreeMap::new();
    let mut buf = Vec::with_capacity(a.len() + b.len());
    shuffle_into(&a.0, &b.0, &mut buf, &mut out);
    out
}

fn shuffle_into(a: &[u8], b: &[u8], buf: &mut Vec<u8>, out: &mut BTreeMap<Word, u64>) {
    if a.is_empty() || b.is_empty() {
        let mut w = buf.clone();
        w.extend_from_slice(a);
        w.extend_from_slice(b);
        *out.entry(Word(w)).or_insert(0) += 1;
        return;
    }
    buf.push(a[0]);
    shuffle_into(&a[1..], b, buf, out);
    buf.pop();
    buf.push(b[0]);
    shuffle_into(a, &b[1..], buf, out);
    buf.pop();
}

/// Expected Stratonovich signature of Brownian motion on `[0, 1]`, paired with `a`:
/// `1/(2^m m!)` when `a = i₁i₁…i_m i_m`, else 0.
pub fn fawcett_sigma(a: &Word) -> Rational {
    let l = &a.0;
    if l.len() % 2 == 1 || l.chunks(2).any(|p| p[0] != p[1]) {
        return Rational::zero();
    }
    let m = l.len() / 2;
    let mut denom = Rational::one();
    for k in 1..=m {
        denom *= rat(2 * k as i64, 1);
    }
    Rational::one() / denom
}

/// Monomial `Π B^w_t` (a sorted multiset of non-empty words) times `(T−t)^{p/2}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SigTerm {
    pub words: Vec<Word>,
    pub doubled_power: u32,
}

/// Rational linear combination of [`SigTerm`]s.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SigExpr {
    terms: BTreeMap<SigTerm, Rational>,
}

impl SigExpr {
    pub fn zero() -> Self {
        SigExpr::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SigTerm, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, words: &[&str], doubled_power: u32) -> Rational {
        let mut ws: Vec<Word> = words
            .iter()
            .map(|w| w.parse().expect("valid word"))
            .filter(|w: &Word| !w.is_empty())
            .collect();
        ws.sort();
        self.terms
            .get(&SigTerm {
                words: ws,
                doubled_power,
            })
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Adds `c · Π words · (T−t)^{doubled_power/2}`; empty words are dropped (`B^∅ = 1`).
    pub fn add_term(&mut self, words: Vec<Word>, doubled_power: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let mut ws: Vec<Word> = words.into_iter().filter(|w| !w.is_empty()).collect();
        ws.sort();
        let key = SigTerm {
            words: ws,
            doubled_power,
        };
        let e = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &SigExpr) -> SigExpr {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.words.clone(), k.doubled_power, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> SigExpr {
        let mut out = SigExpr::zero();
        for (k, v) in &self.terms {
            out.add_term(k.words.clone(), k.doubled_power, v * c);
        }
        out
    }

    /// `∫_t^T (·)(s) ds`, treating the expression as a function of `s − t`.
    pub fn integrate(&self) -> SigExpr {
        let mut out = SigExpr::zero();
        for (k, c) in &self.terms {
            let p = k.doubled_power;
            out.add_term(k.words.clone(), p + 2, c * rat(2, i64::from(p) + 2));
        }
        out
    }

    /// Evaluates at horizon distance `tau = T − t` with `B^w_t` supplied by `word_value`.
    pub fn eval(&self, tau: f64, mut word_value: impl FnMut(&Word) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                let m: f64 = k.words.iter().map(&mut word_value).product();
                rational_to_f64(c) * m * tau.powf(f64::from(k.doubled_power) / 2.0)
            })
            .sum()
    }

    /// True when every power of `(T−t)` is an integer.
    pub fn has_integer_powers(&self) -> bool {
        self.terms.keys().all(|k| k.doubled_power % 2 == 0)
    }
}

impl fmt::Display for SigExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let mut s = format_rational(c);
                for w in &k.words {
                    s.push_str(&format!("*B[{w}]"));
                }
                match k.doubled_power {
                    0 => {}
                    p if p % 2 == 0 => s.push_str(&format!("*(T-t)^{}", p / 2)),
                    p => s.push_str(&format!("*(T-t)^({p}/2)")),
                }
                s
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// `(B^{ai} ⋄ B^{bj})_t(T)` for iterated Itô integrals.
///
/// Uses `δ^{ij}[B^a_t B^b_t (T−t) + ∫_t^T (B^a ⋄ B^b)_t(s) ds]`, with any
/// diamond involving the constant `B^∅ = 1` equal to zero.
pub fn diamond_ito(a: &Word, i: u8, b: &Word, j: u8) -> SigExpr {
    if i != j {
        return SigExpr::zero();
    }
    let mut out = ito_words(a, b).integrate();
    out.add_term(vec![a.clone(), b.clone()], 2, Rational::one());
    out
}

fn ito_words(a: &Word, b: &Word) -> SigExpr {
    match (a.split_last(), b.split_last()) {
        (Some((a1, i)), Some((b1, j))) => diamond_ito(&a1, i, &b1, j),
        _ => SigExpr::zero(),
    }
}

/// `(B̂^{ai} ⋄ B̂^{bj})_t(T)` for iterated Stratonovich integrals.
///
/// Linearizes `B̂^a B̂^b = B̂^{a⧢b}` and uses the expected signature:
/// `δ^{ij} Σ_{w ∈ a⧢b} Σ_{w = w₁w₂} σ_{w₂} B̂^{w₁}_t (T−t)^{|w₂|/2+1}/(|w₂|/2+1)`.
pub fn diamond_strat(a: &Word, i: u8, b: &Word, j: u8) -> SigExpr {
    let mut out = SigExpr::zero();
    if i != j {
        return out;
    }
    for (w, mult) in shuffle(a, b) {
        for cut in 0..=w.len() {
            let (w1, w2) = w.0.split_at(cut);
            let sigma = fawcett_sigma(&Word(w2.to_vec()));
            if sigma.is_zero() {
                continue;
            }
            let p = w2.len() as u32 + 2;
            let c = sigma * rat(mult as i64, 1) * rat(2, i64::from(p));
            out.add_term(vec![Word(w1.to_vec())], p, c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn shuffle_examples() {
        let s = shuffle(&w("12"), &w("3"));
        assert_eq!(
            s,
            BTreeMap::from([(w("123"), 1), (w("132"), 1), (w("312"), 1)])
        );
        assert_eq!(shuffle(&w("1"), &w("1")), BTreeMap::from([(w("11"), 2)]));
        assert_eq!(shuffle(&w("21"), &Word::empty()), BTreeMap::from([(w("21"), 1)]));
        let total: u64 = shuffle(&w("123"), &w("45")).values().sum();
        assert_eq!(total, 10);
    }

    #[test]
    fn fawcett_values() {
        assert_eq!(fawcett_sigma(&Word::empty()), rat(1, 1));
        assert_eq!(fawcett_sigma(&w("11")), rat(1, 2));
        assert_eq!(fawcett_sigma(&w("12")), rat(0, 1));
        assert_eq!(fawcett_sigma(&w("1122")), rat(1, 8));
        assert_eq!(fawcett_sigma(&w("1221")), rat(0, 1));
        assert_eq!(fawcett_sigma(&w("1")), rat(0, 1));
    }

    #[test]
    fn ito_empty_words() {
        let e = Word::empty();
        let d = diamond_ito(&e, 1, &e, 1);
        assert_eq!(d.coefficient(&[], 2), rat(1, 1));
        assert_eq!(d.len(), 1);
        assert!(diamond_ito(&e, 1, &e, 2).is_zero());
        assert!(diamond_strat(&w("1"), 1, &w("2"), 2).is_zero());
    }

    #[test]
    fn ito_eleven_with_one() {
        // B^{111} ⋄ B^{11}: B^{11}B^1 (T−t) + ½B^1 (T−t)².
        let d = diamond_ito(&w("11"), 1, &w("1"), 1);
        assert_eq!(d.coefficient(&["11", "1"], 2), rat(1, 1));
        assert_eq!(d.coefficient(&["1"], 4), rat(1, 2));
        assert_eq!(d.len(), 2);
        assert!(d.has_integer_powers());
    }

    #[test]
    fn levy_area_consistency() {
        let a12 = |x: &Word, y: &Word| diamond_ito(x, 2, y, 2);
        let a21 = |x: &Word, y: &Word| diamond_ito(x, 1, y, 1);
        let (one, two) = (w("1"), w("2"));
        let s = a12(&one, &one)
            .add(&a21(&two, &two))
            .add(&diamond_ito(&one, 2, &two, 1).scale(&rat(-2, 1)))
            .scale(&rat(1, 2));
        assert_eq!(s.coefficient(&[], 4), rat(1, 2));
        assert_eq!(s.coefficient(&["1", "1"], 2), rat(1, 2));
        assert_eq!(s.coefficient(&["2", "2"], 2), rat(1, 2));
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn strat_empty_words() {
        let e = Word::empty();
        let d = diamond_strat(&e, 3, &e, 3);
        assert_eq!(d.coefficient(&[], 2), rat(1, 1));
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn strat_single_letters() {
        // ∫(x + W)² ds: x²(T−t) + ½(T−t)², written as 2B̂^{11}(T−t) + ½(T−t)².
        let d = diamond_strat(&w("1"), 2, &w("1"), 2);
        assert_eq!(d.coefficient(&["11"], 2), rat(2, 1));
        assert_eq!(d.coefficient(&[], 4), rat(1, 2));
        assert_eq!(d.len(), 2);
        // Odd words have σ = 0, so only whole powers survive.
        let d = diamond_strat(&w("12"), 1, &w("2"), 1);
        assert!(d.has_integer_powers());
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(w("∅"), Word::empty());
        assert_eq!(w("132").to_string(), "132");
        assert!("10".parse::<Word>().is_err());
        let d = diamond_ito(&w("1"), 1, &Word::empty(), 1);
        assert_eq!(d.to_string(), "1*B[1]*(T-t)^1");
    }
}
