//! The free Lie algebra on `H = span(a1, b1, ..., ag, bg)`, truncated at a
//! fixed degree and expressed on the Lyndon basis.
//!
//! Letters are encoded as `u8` with `a_i -> 2(i-1)` and `b_i -> 2(i-1)+1`, so
//! that the natural order of codes is `a1 < b1 < a2 < b2 < ...`. A Lyndon word
//! stands for its standard-factorization bracketing.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lincomb::LinComb;
use crate::linalg::{bernoulli_numbers, factorial, format_q, Q};

/// A word over the letter codes.
pub type Word = Vec<u8>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GenKind {
    A,
    B,
}

/// A basis element `a_i` or `b_i` of `H` (1-based index).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gen {
    pub kind: GenKind,
    pub index: usize,
}

impl Gen {
    pub fn a(index: usize) -> Self {
        Gen {
            kind: GenKind::A,
            index,
        }
    }

    pub fn b(index: usize) -> Self {
        Gen {
            kind: GenKind::B,
            index,
        }
    }

    pub fn letter(self) -> u8 {
        assert!(self.index >= 1, "generator indices start at 1");
        let base = 2 * (self.index - 1);
        (base + usize::from(self.kind == GenKind::B)) as u8
    }

    pub fn from_letter(l: u8) -> Self {
        let index = usize::from(l) / 2 + 1;
        if l.is_multiple_of(2) {
            Gen::a(index)
        } else {
            Gen::b(index)
        }
    }

    /// All `2g` generators in letter order.
    pub fn all(genus: usize) -> Vec<Gen> {
        (0..2 * genus).map(|l| Gen::from_letter(l as u8)).collect()
    }

    pub fn name(self) -> String {
        match self.kind {
            GenKind::A => format!("a{}", self.index),
            GenKind::B => format!("b{}", self.index),
        }
    }

    /// Parses `"a3"` or `"b1"`.
    pub fn parse(s: &str) -> Option<Gen> {
        let s = s.trim();
        let kind = match s.chars().next()? {
            'a' => GenKind::A,
            'b' => GenKind::B,
            _ => return None,
        };
        let index: usize = s[1..].parse().ok()?;
        (index >= 1).then_some(Gen { kind, index })
    }
}

impl PartialOrd for Gen {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Gen {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letter().cmp(&other.letter())
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

pub fn letter_name(l: u8) -> String {
    Gen::from_letter(l).name()
}

/// Basis order on words: shorter first, then lexicographic.
pub fn basis_cmp(u: &[u8], v: &[u8]) -> Ordering {
    u.len().cmp(&v.len()).then_with(|| u.cmp(v))
}

pub fn is_lyndon(w: &[u8]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

/// Splits a Lyndon word of length >= 2 as `w = u v` with `v` the longest
/// proper Lyndon suffix. Returns the split position.
pub fn standard_factorization(w: &[u8]) -> usize {
    debug_assert!(w.len() >= 2);
    (1..w.len())
        .find(|&i| is_lyndon(&w[i..]))
        .expect("every word of length >= 2 has a Lyndon suffix")
}

/// All Lyndon words of length `n` over `alphabet` letters, in lexicographic order.
pub fn lyndon_words(alphabet: usize, n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if alphabet == 0 || n == 0 {
        return out;
    }
    let top = (alphabet - 1) as u8;
    let mut w: Word = vec![0];
    while !w.is_empty() {
        if w.len() == n {
            out.push(w.clone());
        }
        let m = w.len();
        while w.len() < n {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&top) {
            w.pop();
        }
        if let Some(last) = w.last_mut() {
            *last += 1;
        }
    }
    out
}

/// Lyndon basis of the degree-`degree` part of the free Lie algebra of genus `genus`.
pub fn lyndon_basis(genus: usize, degree: usize) -> Vec<Word> {
    lyndon_words(2 * genus, degree)
}

fn mobius(n: usize) -> i128 {
    let mut n = n;
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Number of Lyndon words of length `degree` over `alphabet_size` letters.
pub fn witt_dim(alphabet_size: usize, degree: usize) -> usize {
    if degree == 0 {
        return 0;
    }
    let total: i128 = (1..=degree)
        .filter(|e| degree.is_multiple_of(*e))
        .map(|e| mobius(e) * (alphabet_size as i128).pow((degree / e) as u32))
        .sum();
    (total / degree as i128) as usize
}

/// Renders the standard bracketing of a Lyndon word, e.g. `[a1,[a1,b1]]`.
pub fn bracketing_string(w: &[u8]) -> String {
    if w.len() == 1 {
        return letter_name(w[0]);
    }
    let i = standard_factorization(w);
    format!("[{},{}]", bracketing_string(&w[..i]), bracketing_string(&w[i..]))
}

/// Position lookup for an ordered list of basis words.
#[derive(Clone, Debug, Default)]
pub struct BasisIndex {
    words: Vec<Word>,
    pos: HashMap<Word, usize>,
}

impl BasisIndex {
    pub fn new(words: Vec<Word>) -> Self {
        let pos = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        BasisIndex { words, pos }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index(&self, w: &[u8]) -> Option<usize> {
        self.pos.get(w).copied()
    }

    pub fn word(&self, i: usize) -> &Word {
        &self.words[i]
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }
}

type Bracketed = Rc<LinComb<Word>>;

thread_local! {
    static BRACKET_MEMO: RefCell<HashMap<(Word, Word), Bracketed>> = RefCell::new(HashMap::new());
}

/// `[P_u, P_v]` expanded on the Lyndon basis, for Lyndon words `u`, `v`.
/// No truncation is applied.
pub(crate) fn bracket_lyndon(u: &[u8], v: &[u8]) -> Bracketed {
    let key = (u.to_vec(), v.to_vec());
    if let Some(hit) = BRACKET_MEMO.with(|m| m.borrow().get(&key).cloned()) {
        return hit;
    }
    let value = Rc::new(compute_bracket(u, v));
    BRACKET_MEMO.with(|m| m.borrow_mut().insert(key, value.clone()));
    value
}

fn compute_bracket(u: &[u8], v: &[u8]) -> LinComb<Word> {
    match u.cmp(v) {
        Ordering::Equal => LinComb::new(),
        Ordering::Greater => bracket_lyndon(v, u).negated(),
        Ordering::Less => {
            let split = if u.len() == 1 {
                None
            } else {
                Some(standard_factorization(u))
            };
            match split {
                Some(i) if &u[i..] < v => {
                    // [[u1,u2],v] = [u1,[u2,v]] - [u2,[u1,v]]
                    let (u1, u2) = (&u[..i], &u[i..]);
                    let mut out = LinComb::new();
                    for (w, c) in bracket_lyndon(u2, v).iter() {
                        out.add_scaled(&bracket_lyndon(u1, w), c);
                    }
                    for (w, c) in bracket_lyndon(u1, v).iter() {
                        out.add_scaled(&bracket_lyndon(u2, w), &-c.clone());
                    }
                    out
                }
                _ => LinComb::basis([u, v].concat()),
            }
        }
    }
}

/// Bracket of two coordinate maps, dropping terms above `max_degree`.
pub(crate) fn bracket_terms(x: &LinComb<Word>, y: &LinComb<Word>, max_degree: usize) -> LinComb<Word> {
    let mut out = LinComb::new();
    for (u, c) in x.iter() {
        for (v, d) in y.iter() {
            if u.len() + v.len() <= max_degree {
                out.add_scaled(&bracket_lyndon(u, v), &(c * d));
            }
        }
    }
    out
}

/// An element of the free Lie algebra modulo degree `> max_degree`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LieSeries {
    genus: usize,
    max_degree: usize,
    terms: LinComb<Word>,
}

impl LieSeries {
    pub fn zero(genus: usize, max_degree: usize) -> Self {
        LieSeries {
            genus,
            max_degree,
            terms: LinComb::new(),
        }
    }

    pub fn generator(genus: usize, max_degree: usize, g: Gen) -> Self {
        assert!(g.index <= genus, "generator {g} outside genus {genus}");
        Self::letter(genus, max_degree, g.letter())
    }

    pub fn letter(genus: usize, max_degree: usize, l: u8) -> Self {
        assert!((l as usize) < 2 * genus, "letter {l} outside genus {genus}");
        let mut s = Self::zero(genus, max_degree);
        if max_degree >= 1 {
            s.terms.add_term(vec![l], Q::one());
        }
        s
    }

    /// Basis element for a Lyndon word.
    pub fn lyndon(genus: usize, max_degree: usize, word: &[u8]) -> Result<Self> {
        Self::from_terms(genus, max_degree, [(word.to_vec(), Q::one())])
    }

    /// Builds a series from Lyndon-word coordinates; terms above `max_degree` are dropped.
    pub fn from_terms(
        genus: usize,
        max_degree: usize,
        terms: impl IntoIterator<Item = (Word, Q)>,
    ) -> Result<Self> {
        let mut s = Self::zero(genus, max_degree);
        for (w, c) in terms {
            if !is_lyndon(&w) {
                return Err(Error::Domain(format!("word {w:?} is not a Lyndon word")));
            }
            if let Some(&l) = w.iter().find(|&&l| l as usize >= 2 * genus) {
                return Err(Error::ContextMismatch(format!(
                    "letter {} outside genus {genus}",
                    letter_name(l)
                )));
            }
            if w.len() <= max_degree {
                s.terms.add_term(w, c);
            }
        }
        Ok(s)
    }

    pub(crate) fn from_lincomb(genus: usize, max_degree: usize, terms: LinComb<Word>) -> Self {
        LieSeries {
            genus,
            max_degree,
            terms: terms.filtered(|w| w.len() <= max_degree),
        }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn terms(&self) -> &LinComb<Word> {
        &self.terms
    }

    pub fn coeff(&self, word: &[u8]) -> Q {
        self.terms.get(&word.to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    /// Terms sorted by basis order (degree, then lexicographic).
    pub fn sorted_terms(&self) -> Vec<(&Word, &Q)> {
        self.terms.iter().sorted_by(|a, b| basis_cmp(a.0, b.0)).collect()
    }

    pub fn degree_part(&self, d: usize) -> Self {
        LieSeries {
            genus: self.genus,
            max_degree: self.max_degree,
            terms: self.terms.filtered(|w| w.len() == d),
        }
    }

    /// Part of degree in `lo..=hi`.
    pub fn degree_range(&self, lo: usize, hi: usize) -> Self {
        LieSeries {
            genus: self.genus,
            max_degree: self.max_degree,
            terms: self.terms.filtered(|w| (lo..=hi).contains(&w.len())),
        }
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(Vec::len).min()
    }

    /// Same element viewed modulo degree `> n`. Raising the bound keeps the
    /// stored terms unchanged.
    pub fn with_max_degree(&self, n: usize) -> Self {
        Self::from_lincomb(self.genus, n, self.terms.clone())
    }

    pub fn same_context(&self, other: &Self) -> Result<()> {
        if self.genus != other.genus || self.max_degree != other.max_degree {
            return Err(Error::ContextMismatch(format!(
                "(genus {}, degree {}) vs (genus {}, degree {})",
                self.genus, self.max_degree, other.genus, other.max_degree
            )));
        }
        Ok(())
    }

    pub fn scale(&self, c: &Q) -> Self {
        LieSeries {
            genus: self.genus,
            max_degree: self.max_degree,
            terms: self.terms.scaled(c),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        let mut terms = self.terms.clone();
        terms.add_assign(&other.terms);
        Ok(LieSeries { terms, ..self.clone_context() })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    fn clone_context(&self) -> Self {
        Self::zero(self.genus, self.max_degree)
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Self, c: &Q) {
        self.same_context(other).expect("LieSeries context mismatch");
        self.terms.add_scaled(&other.terms, c);
    }

    /// Random element with `terms` basis terms of degrees in `lo..=hi` and
    /// small integer coefficients.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        genus: usize,
        max_degree: usize,
        lo: usize,
        hi: usize,
        terms: usize,
    ) -> Self {
        let mut s = Self::zero(genus, max_degree);
        let hi = hi.min(max_degree);
        if genus == 0 || lo > hi {
            return s;
        }
        for _ in 0..terms {
            let d = rng.gen_range(lo..=hi);
            let basis = lyndon_basis(genus, d);
            let w = basis[rng.gen_range(0..basis.len())].clone();
            let c = rng.gen_range(-3i64..=3);
            s.terms.add_term(w, Q::from_integer(c.into()));
        }
        s
    }
}

impl fmt::Debug for LieSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LieSeries(g={}, N={}; {self})", self.genus, self.max_degree)
    }
}

impl fmt::Display for LieSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts = self
            .sorted_terms()
            .into_iter()
            .map(|(w, c)| format!("({}) {}", format_q(c), bracketing_string(w)));
        f.write_str(&parts.format(" + ").to_string())
    }
}

impl std::ops::Add<&LieSeries> for &LieSeries {
    type Output = LieSeries;

    /// # Panics
    /// On mismatched genus or truncation degree.
    fn add(self, rhs: &LieSeries) -> LieSeries {
        self.try_add(rhs).expect("LieSeries context mismatch")
    }
}

impl std::ops::Sub<&LieSeries> for &LieSeries {
    type Output = LieSeries;

    /// # Panics
    /// On mismatched genus or truncation degree.
    fn sub(self, rhs: &LieSeries) -> LieSeries {
        self.try_sub(rhs).expect("LieSeries context mismatch")
    }
}

impl std::ops::Neg for &LieSeries {
    type Output = LieSeries;

    fn neg(self) -> LieSeries {
        LieSeries {
            genus: self.genus,
            max_degree: self.max_degree,
            terms: self.terms.negated(),
        }
    }
}

/// `[x, y]` on the Lyndon basis, truncated at the common degree bound.
pub fn bracket(x: &LieSeries, y: &LieSeries) -> Result<LieSeries> {
    x.same_context(y)?;
    Ok(LieSeries {
        genus: x.genus,
        max_degree: x.max_degree,
        terms: bracket_terms(&x.terms, &y.terms, x.max_degree),
    })
}

/// Infallible bracket for internal use once contexts are known to agree.
pub(crate) fn br(x: &LieSeries, y: &LieSeries) -> LieSeries {
    bracket(x, y).expect("LieSeries context mismatch")
}

/// Baker-Campbell-Hausdorff product `log(exp(x) exp(y))`, truncated.
///
/// Computed with the Lie-side recursion
/// `(n+1) Z_{n+1} = 1/2 [x-y, Z_n] + sum_{p>=1, 2p<=n} B_{2p}/(2p)!
///   sum_{k_1+..+k_{2p}=n} [Z_{k_1},[...,[Z_{k_{2p}}, x+y]...]]`
/// where `Z_n` collects the BCH terms of total length `n` in `x` and `y`.
/// [`crate::tensor::bch_via_tensor`] computes the same value through the
/// tensor algebra.
pub fn bch(x: &LieSeries, y: &LieSeries) -> Result<LieSeries> {
    x.same_context(y)?;
    if let Some(d) = x.min_degree().into_iter().chain(y.min_degree()).min() {
        if d == 0 {
            return Err(Error::Precondition("BCH arguments need zero constant term".into()));
        }
    }
    let n_max = x.max_degree;
    let bern = bernoulli_numbers(n_max);
    let sum = x + y;
    let diff = x - y;
    let mut z: Vec<LieSeries> = vec![LieSeries::zero(x.genus, n_max), sum.clone()];
    let half = Q::new(1.into(), 2.into());
    for n in 1..n_max {
        let mut next = br(&diff, &z[n]).scale(&half);
        for p in 1..=n / 2 {
            let coeff = &bern[2 * p] / Q::from_integer(factorial(2 * p));
            if coeff.is_zero() {
                continue;
            }
            // compositions of n into 2p positive parts, innermost bracket with x+y
            for comp in compositions(n, 2 * p) {
                let mut acc = sum.clone();
                for &k in comp.iter().rev() {
                    acc = br(&z[k], &acc);
                    if acc.is_zero() {
                        break;
                    }
                }
                next.add_scaled(&acc, &coeff);
            }
        }
        z.push(next.scale(&Q::from_integer((n as i64 + 1).into()).recip()));
    }
    let mut out = LieSeries::zero(x.genus, n_max);
    for zn in &z {
        out.add_scaled(zn, &Q::one());
    }
    Ok(out)
}

/// All ordered tuples of `parts` positive integers summing to `n`.
fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=n.saturating_sub(parts - 1) {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}
