//! Finite formal linear combinations with rational coefficients.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::linalg::Q;

/// A finitely supported map `K -> Q` that never stores zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinComb<K: Ord> {
    terms: BTreeMap<K, Q>,
}

impl<K: Ord> Default for LinComb<K> {
    fn default() -> Self {
        LinComb {
            terms: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(key: K, coeff: Q) -> Self {
        let mut c = Self::new();
        c.add_term(key, coeff);
        c
    }

    pub fn basis(key: K) -> Self {
        Self::single(key, Q::one())
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

    pub fn get(&self, key: &K) -> Q {
        self.terms.get(key).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Q)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, key: K, coeff: Q) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &Self, factor: &Q) {
        if factor.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * factor);
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.add_scaled(other, &Q::one());
    }

    pub fn sub_assign(&mut self, other: &Self) {
        self.add_scaled(other, &-Q::one());
    }

    pub fn scaled(&self, factor: &Q) -> Self {
        if factor.is_zero() {
            return Self::new();
        }
        LinComb {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * factor)).collect(),
        }
    }

    pub fn negated(&self) -> Self {
        LinComb {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }

    /// Keeps only the terms whose key satisfies `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&K) -> bool) -> Self {
        LinComb {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> K2) -> LinComb<K2> {
        let mut out = LinComb::new();
        for (k, v) in &self.terms {
            out.add_term(f(k), v.clone());
        }
        out
    }
}

impl<K: Ord + Clone> FromIterator<(K, Q)> for LinComb<K> {
    fn from_iter<I: IntoIterator<Item = (K, Q)>>(iter: I) -> Self {
        let mut c = LinComb::new();
        for (k, v) in iter {
            c.add_term(k, v);
        }
        c
    }
}

impl<K: Ord> IntoIterator for LinComb<K> {
    type Item = (K, Q);
    type IntoIter = std::collections::btree_map::IntoIter<K, Q>;

    fn into_iter(self) -> Self::IntoIter {
        self.terms.into_iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    #[test]
    fn cancellation_removes_keys() {
        let mut c = LinComb::single("x", q(2));
        c.add_term("x", q(-2));
        assert!(c.is_zero());
        c.add_term("y", q(0));
        assert!(c.is_zero());
    }

    #[test]
    fn scaled_and_filtered() {
        let c: LinComb<u32> = [(1, q(1)), (2, q(3))].into_iter().collect();
        assert_eq!(c.scaled(&q(2)).get(&2), q(6));
        assert_eq!(c.filtered(|k| *k > 1).len(), 1);
        assert!(c.scaled(&q(0)).is_zero());
    }
}
