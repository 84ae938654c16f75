//! Truncated tensor algebra `T(H)/T_{>N}` with its Hopf structure, and
//! expansions of the free group evaluated on words.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_lie::{
    basis_cmp, bch, bracket_terms, letter_name, standard_factorization, Gen, LieSeries, Word,
};
use crate::lincomb::LinComb;
use crate::linalg::{format_q, Q};

/// An element of the tensor algebra modulo words longer than `max_degree`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TensorSeries {
    genus: usize,
    max_degree: usize,
    terms: LinComb<Word>,
}

impl TensorSeries {
    pub fn zero(genus: usize, max_degree: usize) -> Self {
        TensorSeries {
            genus,
            max_degree,
            terms: LinComb::new(),
        }
    }

    pub fn one(genus: usize, max_degree: usize) -> Self {
        Self::scalar(genus, max_degree, Q::one())
    }

    pub fn scalar(genus: usize, max_degree: usize, c: Q) -> Self {
        TensorSeries {
            genus,
            max_degree,
            terms: LinComb::single(Vec::new(), c),
        }
    }

    pub fn letter(genus: usize, max_degree: usize, l: u8) -> Self {
        assert!((l as usize) < 2 * genus, "letter {l} outside genus {genus}");
        Self::from_lincomb(genus, max_degree, LinComb::basis(vec![l]))
    }

    pub fn generator(genus: usize, max_degree: usize, g: Gen) -> Self {
        Self::letter(genus, max_degree, g.letter())
    }

    /// Builds a series from word coordinates; words above `max_degree` are dropped.
    pub fn from_terms(
        genus: usize,
        max_degree: usize,
        terms: impl IntoIterator<Item = (Word, Q)>,
    ) -> Result<Self> {
        let mut s = Self::zero(genus, max_degree);
        for (w, c) in terms {
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
        TensorSeries {
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

    pub fn coeff(&self, w: &[u8]) -> Q {
        self.terms.get(&w.to_vec())
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&[])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    pub fn sorted_terms(&self) -> Vec<(&Word, &Q)> {
        self.terms.iter().sorted_by(|a, b| basis_cmp(a.0, b.0)).collect()
    }

    pub fn degree_part(&self, d: usize) -> Self {
        TensorSeries {
            terms: self.terms.filtered(|w| w.len() == d),
            ..self.context()
        }
    }

    /// Lowest degree carrying a nonzero coefficient.
    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(Vec::len).min()
    }

    pub fn with_max_degree(&self, n: usize) -> Self {
        Self::from_lincomb(self.genus, n, self.terms.clone())
    }

    fn context(&self) -> Self {
        Self::zero(self.genus, self.max_degree)
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
        TensorSeries {
            terms: self.terms.scaled(c),
            ..self.context()
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        let mut terms = self.terms.clone();
        terms.add_assign(&other.terms);
        Ok(TensorSeries {
            terms,
            ..self.context()
        })
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Q) {
        self.same_context(other).expect("TensorSeries context mismatch");
        self.terms.add_scaled(&other.terms, c);
    }

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
            let w: Word = (0..d).map(|_| rng.gen_range(0..2 * genus) as u8).collect();
            s.terms.add_term(w, Q::from_integer(rng.gen_range(-3i64..=3).into()));
        }
        s
    }
}

impl fmt::Debug for TensorSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TensorSeries(g={}, N={}; {self})", self.genus, self.max_degree)
    }
}

impl fmt::Display for TensorSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts = self.sorted_terms().into_iter().map(|(w, c)| {
            if w.is_empty() {
                format!("({})", format_q(c))
            } else {
                format!("({}) {}", format_q(c), w.iter().map(|&l| letter_name(l)).join(" "))
            }
        });
        f.write_str(&parts.format(" + ").to_string())
    }
}

impl std::ops::Add<&TensorSeries> for &TensorSeries {
    type Output = TensorSeries;

    /// # Panics
    /// On mismatched genus or truncation degree.
    fn add(self, rhs: &TensorSeries) -> TensorSeries {
        self.try_add(rhs).expect("TensorSeries context mismatch")
    }
}

impl std::ops::Sub<&TensorSeries> for &TensorSeries {
    type Output = TensorSeries;

    /// # Panics
    /// On mismatched genus or truncation degree.
    fn sub(self, rhs: &TensorSeries) -> TensorSeries {
        self.try_add(&-rhs).expect("TensorSeries context mismatch")
    }
}

impl std::ops::Neg for &TensorSeries {
    type Output = TensorSeries;

    fn neg(self) -> TensorSeries {
        self.scale(&-Q::one())
    }
}

impl std::ops::Mul<&TensorSeries> for &TensorSeries {
    type Output = TensorSeries;

    /// # Panics
    /// On mismatched genus or truncation degree.
    fn mul(self, rhs: &TensorSeries) -> TensorSeries {
        mul(self, rhs).expect("TensorSeries context mismatch")
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl std::ops::$tr<TensorSeries> for TensorSeries {
            type Output = TensorSeries;

            fn $m(self, rhs: TensorSeries) -> TensorSeries {
                std::ops::$tr::$m(&self, &rhs)
            }
        }
    )*};
}

owned_ops!(Add add, Sub sub, Mul mul);

/// Concatenation product, truncated.
pub fn mul(x: &TensorSeries, y: &TensorSeries) -> Result<TensorSeries> {
    x.same_context(y)?;
    let n = x.max_degree;
    let mut out = LinComb::new();
    for (u, c) in x.terms.iter() {
        for (v, d) in y.terms.iter() {
            if u.len() + v.len() <= n {
                out.add_term([u.as_slice(), v.as_slice()].concat(), c * d);
            }
        }
    }
    Ok(TensorSeries {
        terms: out,
        ..x.context()
    })
}

/// `sum_n x^n / n!` for `x` with zero constant term.
pub fn exp(x: &TensorSeries) -> Result<TensorSeries> {
    if !x.constant_term().is_zero() {
        return Err(Error::Precondition("exp needs a zero constant term".into()));
    }
    let mut out = TensorSeries::one(x.genus, x.max_degree);
    let mut power = out.clone();
    for n in 1..=x.max_degree {
        power = (&power * x).scale(&Q::from_integer((n as i64).into()).recip());
        if power.is_zero() {
            break;
        }
        out = &out + &power;
    }
    Ok(out)
}

/// `sum_n (-1)^(n+1) (x-1)^n / n` for `x` with constant term 1.
pub fn log(x: &TensorSeries) -> Result<TensorSeries> {
    if !x.constant_term().is_one() {
        return Err(Error::Precondition("log needs constant term 1".into()));
    }
    let u = x - &TensorSeries::one(x.genus, x.max_degree);
    let mut out = TensorSeries::zero(x.genus, x.max_degree);
    let mut power = TensorSeries::one(x.genus, x.max_degree);
    for n in 1..=x.max_degree {
        power = &power * &u;
        if power.is_zero() {
            break;
        }
        let sign = if n % 2 == 1 { 1 } else { -1 };
        out.add_scaled(&power, &Q::new(sign.into(), (n as i64).into()));
    }
    Ok(out)
}

/// Multiplicative inverse of a series with nonzero constant term, via the
/// geometric series of `1 + u` after normalizing the constant.
pub fn inverse(x: &TensorSeries) -> Result<TensorSeries> {
    let c = x.constant_term();
    if c.is_zero() {
        return Err(Error::Precondition("series with zero constant term is not invertible".into()));
    }
    let cinv = c.recip();
    let u = &x.scale(&cinv) - &TensorSeries::one(x.genus, x.max_degree);
    let neg_u = -&u;
    let mut out = TensorSeries::one(x.genus, x.max_degree);
    let mut power = out.clone();
    for _ in 1..=x.max_degree {
        power = &power * &neg_u;
        if power.is_zero() {
            break;
        }
        out = &out + &power;
    }
    Ok(out.scale(&cinv))
}

/// `Delta(w) = sum_S w|_S (x) w|_{S^c}` over subsets of letter positions.
fn coproduct(x: &TensorSeries) -> LinComb<(Word, Word)> {
    let mut out = LinComb::new();
    for (w, c) in x.terms.iter() {
        let n = w.len();
        for mask in 0u32..(1u32 << n) {
            let (mut left, mut right) = (Vec::new(), Vec::new());
            for (i, &l) in w.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    left.push(l);
                } else {
                    right.push(l);
                }
            }
            out.add_term((left, right), c.clone());
        }
    }
    out
}

/// Whether `Delta(x) = x (x) x` modulo total degree `> N` (and `x` has constant term 1).
pub fn is_grouplike(x: &TensorSeries) -> bool {
    if !x.constant_term().is_one() {
        return false;
    }
    let n = x.max_degree;
    let mut diff = coproduct(x);
    for (u, c) in x.terms.iter() {
        for (v, d) in x.terms.iter() {
            if u.len() + v.len() <= n {
                diff.add_term((u.clone(), v.clone()), -(c * d));
            }
        }
    }
    diff.is_zero()
}

/// Whether `Delta(x) = x (x) 1 + 1 (x) x`.
pub fn is_primitive(x: &TensorSeries) -> bool {
    if !x.constant_term().is_zero() {
        return false;
    }
    coproduct(x)
        .iter()
        .all(|((l, r), _)| l.is_empty() || r.is_empty())
}

thread_local! {
    static EMBED_MEMO: RefCell<HashMap<Word, Rc<LinComb<Word>>>> = RefCell::new(HashMap::new());
}

/// Tensor expansion of the bracketed Lyndon word `w`.
fn embed_word(w: &[u8]) -> Rc<LinComb<Word>> {
    if let Some(hit) = EMBED_MEMO.with(|m| m.borrow().get(w).cloned()) {
        return hit;
    }
    let value = if w.len() == 1 {
        LinComb::basis(w.to_vec())
    } else {
        let i = standard_factorization(w);
        let (pu, pv) = (embed_word(&w[..i]), embed_word(&w[i..]));
        let mut out = LinComb::new();
        for (a, c) in pu.iter() {
            for (b, d) in pv.iter() {
                let cd = c * d;
                out.add_term([a.as_slice(), b.as_slice()].concat(), cd.clone());
                out.add_term([b.as_slice(), a.as_slice()].concat(), -cd);
            }
        }
        out
    };
    let value = Rc::new(value);
    EMBED_MEMO.with(|m| m.borrow_mut().insert(w.to_vec(), value.clone()));
    value
}

/// The inclusion of Lie elements as primitive tensors.
pub fn embed_lie(x: &LieSeries) -> TensorSeries {
    let mut out = LinComb::new();
    for (w, c) in x.terms().iter() {
        out.add_scaled(&embed_word(w), c);
    }
    TensorSeries::from_lincomb(x.genus(), x.max_degree(), out)
}

/// Inverse of [`embed_lie`] on primitive elements, through the Dynkin idempotent
/// `w1...wn -> (1/n) [..[w1,w2],..,wn]`.
pub fn project_lie(x: &TensorSeries) -> Result<LieSeries> {
    if !is_primitive(x) {
        return Err(Error::Domain("project_lie needs a primitive tensor".into()));
    }
    let unbounded = usize::MAX;
    let mut left_normed: HashMap<Word, LinComb<Word>> = HashMap::new();
    let mut out = LinComb::new();
    for (w, c) in x.terms.iter().sorted_by(|a, b| a.0.cmp(b.0)) {
        // lexicographic order visits prefixes before extensions
        for k in 1..=w.len() {
            if left_normed.contains_key(&w[..k]) {
                continue;
            }
            let value = if k == 1 {
                LinComb::basis(vec![w[0]])
            } else {
                let prev = &left_normed[&w[..k - 1]];
                bracket_terms(prev, &LinComb::basis(vec![w[k - 1]]), unbounded)
            };
            left_normed.insert(w[..k].to_vec(), value);
        }
        let factor = c / Q::from_integer((w.len() as i64).into());
        out.add_scaled(&left_normed[w.as_slice()], &factor);
    }
    Ok(LieSeries::from_lincomb(x.genus, x.max_degree, out))
}

/// `project_lie(log(exp(x) exp(y)))`, the tensor-algebra route to BCH.
pub fn bch_via_tensor(x: &LieSeries, y: &LieSeries) -> Result<LieSeries> {
    x.same_context(y)?;
    let ex = exp(&embed_lie(x))?;
    let ey = exp(&embed_lie(y))?;
    project_lie(&log(&mul(&ex, &ey)?)?)
}

/// Agreement of the Lie-side and tensor-side BCH.
pub fn bch_agrees(x: &LieSeries, y: &LieSeries) -> Result<bool> {
    Ok(bch(x, y)? == bch_via_tensor(x, y)?)
}

/// A freely reduced word in the free group on `a_i, b_i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeGroupWord {
    letters: Vec<(Gen, i8)>,
}

impl FreeGroupWord {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds and freely reduces a word; exponents must be `1` or `-1`.
    pub fn new(letters: impl IntoIterator<Item = (Gen, i8)>) -> Self {
        let mut w = Self::identity();
        for (g, e) in letters {
            assert!(e == 1 || e == -1, "exponent must be 1 or -1");
            w.push(g, e);
        }
        w
    }

    fn push(&mut self, g: Gen, e: i8) {
        if self.letters.last() == Some(&(g, -e)) {
            self.letters.pop();
        } else {
            self.letters.push((g, e));
        }
    }

    pub fn letters(&self) -> &[(Gen, i8)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        FreeGroupWord {
            letters: self.letters.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut w = self.clone();
        for &(g, e) in &other.letters {
            w.push(g, e);
        }
        w
    }
}

impl fmt::Display for FreeGroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        let parts = self.letters.iter().map(|(g, e)| {
            if *e == 1 {
                g.name()
            } else {
                format!("{}^-1", g.name())
            }
        });
        f.write_str(&parts.format(" ").to_string())
    }
}

/// A monoid map from the free group, given by the images of the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionMap {
    genus: usize,
    max_degree: usize,
    images: Vec<TensorSeries>,
}

impl ExpansionMap {
    /// `images` are indexed by letter code (`a1, b1, a2, ...`).
    pub fn new(genus: usize, max_degree: usize, images: Vec<TensorSeries>) -> Result<Self> {
        if images.len() != 2 * genus {
            return Err(Error::DimensionMismatch {
                expected: 2 * genus,
                found: images.len(),
            });
        }
        for img in &images {
            if img.genus != genus || img.max_degree != max_degree {
                return Err(Error::ContextMismatch(format!(
                    "image in (genus {}, degree {}) for expansion in (genus {genus}, degree {max_degree})",
                    img.genus, img.max_degree
                )));
            }
        }
        Ok(ExpansionMap {
            genus,
            max_degree,
            images,
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn image(&self, g: Gen) -> &TensorSeries {
        &self.images[g.letter() as usize]
    }

    pub fn images(&self) -> &[TensorSeries] {
        &self.images
    }

    /// The same map with every image re-truncated at degree `n`.
    pub fn with_max_degree(&self, n: usize) -> Self {
        ExpansionMap {
            genus: self.genus,
            max_degree: n,
            images: self.images.iter().map(|x| x.with_max_degree(n)).collect(),
        }
    }
}

/// The Magnus expansion `h -> 1 + h`.
pub fn magnus_expansion(genus: usize, max_degree: usize) -> ExpansionMap {
    let images = (0..2 * genus as u8)
        .map(|l| {
            let one = TensorSeries::one(genus, max_degree);
            &one + &TensorSeries::letter(genus, max_degree, l)
        })
        .collect();
    ExpansionMap {
        genus,
        max_degree,
        images,
    }
}

/// The group-like expansion `h -> exp(h)` attached to the basis.
pub fn basis_expansion(genus: usize, max_degree: usize) -> ExpansionMap {
    let images = (0..2 * genus as u8)
        .map(|l| exp(&TensorSeries::letter(genus, max_degree, l)).expect("letters have no constant term"))
        .collect();
    ExpansionMap {
        genus,
        max_degree,
        images,
    }
}

/// Image of a free-group word: the product of generator images and their inverses.
pub fn evaluate_expansion(theta: &ExpansionMap, w: &FreeGroupWord) -> Result<TensorSeries> {
    let mut out = TensorSeries::one(theta.genus, theta.max_degree);
    let mut inverses: HashMap<Gen, TensorSeries> = HashMap::new();
    for &(g, e) in w.letters() {
        if g.index > theta.genus {
            return Err(Error::ContextMismatch(format!("{g} outside genus {}", theta.genus)));
        }
        let factor = if e == 1 {
            theta.image(g).clone()
        } else {
            match inverses.get(&g) {
                Some(inv) => inv.clone(),
                None => {
                    let inv = inverse(theta.image(g))?;
                    inverses.insert(g, inv.clone());
                    inv
                }
            }
        };
        out = &out * &factor;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub is_expansion: bool,
    pub is_grouplike: bool,
}

/// Checks `theta(h) = 1 + h + (deg >= 2)` and group-likeness on each generator.
pub fn check_expansion(theta: &ExpansionMap) -> ExpansionReport {
    let is_expansion = theta.images.iter().enumerate().all(|(l, img)| {
        img.constant_term().is_one()
            && img.degree_part(1) == TensorSeries::letter(theta.genus, theta.max_degree, l as u8)
    });
    let is_grouplike = theta.images.iter().all(is_grouplike);
    ExpansionReport {
        is_expansion,
        is_grouplike,
    }
}
