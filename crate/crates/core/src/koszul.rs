//! Koszul complex `(Lambda L, d)` of the free nilpotent Lie algebra
//! `L / L_{>k}`, with homology computed blockwise per total degree.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::free_lie::{basis_cmp, bracket_lyndon, bracketing_string, lyndon_basis, LieSeries, Word};
use crate::jacobi::{caterpillars, fission, TreeCombo};
use crate::lincomb::LinComb;
use crate::linalg::{format_q, kernel_basis, rank, rref, LinearSystem, MatrixQ, SparseVec, Q};

/// A wedge monomial: Lyndon words in strictly increasing basis order.
pub type Wedge = Vec<Word>;

/// Sorts a monomial into basis order. Returns `None` when a factor repeats,
/// otherwise the sorted monomial and the sign of the permutation.
pub fn normalize_wedge(mut mono: Wedge) -> Option<(Wedge, bool)> {
    let mut negative = false;
    // insertion sort, counting transpositions
    for i in 1..mono.len() {
        let mut j = i;
        while j > 0 {
            match basis_cmp(&mono[j - 1], &mono[j]) {
                Ordering::Greater => {
                    mono.swap(j - 1, j);
                    negative = !negative;
                    j -= 1;
                }
                Ordering::Equal => return None,
                Ordering::Less => break,
            }
        }
    }
    Some((mono, negative))
}

/// An element of `Lambda^n` of the free Lie algebra, optionally reduced
/// modulo `L_{>class}`.
#[derive(Clone, PartialEq, Eq)]
pub struct WedgeChain {
    genus: usize,
    class: Option<usize>,
    arity: usize,
    terms: LinComb<Wedge>,
}

impl WedgeChain {
    pub fn zero(genus: usize, class: Option<usize>, arity: usize) -> Self {
        WedgeChain {
            genus,
            class,
            arity,
            terms: LinComb::new(),
        }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn class(&self) -> Option<usize> {
        self.class
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &LinComb<Wedge> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    fn admits(&self, w: &Word) -> bool {
        self.class.is_none_or(|k| w.len() <= k)
    }

    /// Adds `c * (f_1 ^ ... ^ f_n)` for basis words, normalizing order and sign.
    pub fn add_monomial(&mut self, mono: Wedge, c: Q) {
        assert_eq!(mono.len(), self.arity, "wedge arity mismatch");
        if c.is_zero() || !mono.iter().all(|w| self.admits(w)) {
            return;
        }
        if let Some((sorted, negative)) = normalize_wedge(mono) {
            self.terms.add_term(sorted, if negative { -c } else { c });
        }
    }

    /// `x_1 ^ ... ^ x_n`, expanded multilinearly.
    pub fn wedge(genus: usize, class: Option<usize>, factors: &[LieSeries]) -> Self {
        let mut out = Self::zero(genus, class, factors.len());
        let lists: Vec<Vec<(&Word, &Q)>> = factors.iter().map(|f| f.terms().iter().collect()).collect();
        for combo in lists.iter().map(|l| l.iter()).multi_cartesian_product() {
            let mono: Wedge = combo.iter().map(|(w, _)| (*w).clone()).collect();
            let c = combo.iter().fold(Q::from_integer(1.into()), |acc, (_, c)| acc * *c);
            out.add_monomial(mono, c);
        }
        if factors.is_empty() {
            out.add_monomial(Vec::new(), Q::from_integer(1.into()));
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.genus != other.genus || self.class != other.class || self.arity != other.arity {
            return Err(Error::ContextMismatch("wedge chains of different contexts".into()));
        }
        let mut terms = self.terms.clone();
        terms.add_assign(&other.terms);
        Ok(WedgeChain { terms, ..self.clone() })
    }

    pub fn scale(&self, c: &Q) -> Self {
        WedgeChain {
            terms: self.terms.scaled(c),
            ..self.clone()
        }
    }

    /// Image in `Lambda(L / L_{>k})`.
    pub fn reduce(&self, k: usize) -> Self {
        let mut out = Self::zero(self.genus, Some(k), self.arity);
        for (m, c) in self.terms.iter() {
            out.add_monomial(m.clone(), c.clone());
        }
        out
    }

    /// Part of total degree `d`.
    pub fn degree_part(&self, d: usize) -> Self {
        WedgeChain {
            terms: self.terms.filtered(|m| total_degree(m) == d),
            ..self.clone()
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.terms.keys().map(|m| total_degree(m)).sorted().dedup().collect()
    }
}

impl std::ops::Add<&WedgeChain> for &WedgeChain {
    type Output = WedgeChain;

    /// # Panics
    /// On mismatched contexts.
    fn add(self, rhs: &WedgeChain) -> WedgeChain {
        self.try_add(rhs).expect("WedgeChain context mismatch")
    }
}

impl std::ops::Sub<&WedgeChain> for &WedgeChain {
    type Output = WedgeChain;

    /// # Panics
    /// On mismatched contexts.
    fn sub(self, rhs: &WedgeChain) -> WedgeChain {
        self.try_add(&rhs.scale(&-Q::from_integer(1.into())))
            .expect("WedgeChain context mismatch")
    }
}

impl fmt::Debug for WedgeChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WedgeChain(n={}, class={:?}; {self})", self.arity, self.class)
    }
}

impl fmt::Display for WedgeChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts = self.terms.iter().map(|(m, c)| {
            format!("({}) {}", format_q(c), m.iter().map(|w| bracketing_string(w)).join(" ^ "))
        });
        f.write_str(&parts.format(" + ").to_string())
    }
}

pub fn total_degree(m: &[Word]) -> usize {
    m.iter().map(Vec::len).sum()
}

/// `d(g_1 ^ ... ^ g_n) = sum_{i<j} (-1)^(i+j) [g_i, g_j] ^ g_1 ^ ..^ g_i^ ..^ g_j^ .. ^ g_n`.
pub fn boundary(c: &WedgeChain) -> WedgeChain {
    let mut out = WedgeChain::zero(c.genus, c.class, c.arity.saturating_sub(1));
    if c.arity < 2 {
        return out;
    }
    for (m, coeff) in c.terms.iter() {
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                let sign_c = if (i + j) % 2 == 0 { coeff.clone() } else { -coeff.clone() };
                let rest: Vec<&Word> = m
                    .iter()
                    .enumerate()
                    .filter(|&(t, _)| t != i && t != j)
                    .map(|(_, w)| w)
                    .collect();
                for (w, bc) in bracket_lyndon(&m[i], &m[j]).iter() {
                    let mut mono = Vec::with_capacity(m.len() - 1);
                    mono.push(w.clone());
                    mono.extend(rest.iter().map(|w| (*w).clone()));
                    out.add_monomial(mono, bc * &sign_c);
                }
            }
        }
    }
    out
}

/// A class in `H_3(L / L_{>k})`, stored as coordinates per total degree in the
/// fixed quotient basis of that degree. Zero blocks are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyClass {
    pub genus: usize,
    pub class: usize,
    pub coords: BTreeMap<usize, Vec<Q>>,
}

impl HomologyClass {
    pub fn zero(genus: usize, class: usize) -> Self {
        HomologyClass {
            genus,
            class,
            coords: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    fn insert(&mut self, d: usize, v: Vec<Q>) {
        if v.iter().all(Zero::is_zero) {
            self.coords.remove(&d);
        } else {
            self.coords.insert(d, v);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.genus != other.genus || self.class != other.class {
            return Err(Error::ContextMismatch("homology classes of different complexes".into()));
        }
        let mut out = self.clone();
        for (&d, v) in &other.coords {
            let sum = match self.coords.get(&d) {
                Some(u) => u.iter().zip(v).map(|(a, b)| a + b).collect(),
                None => v.clone(),
            };
            out.insert(d, sum);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        HomologyClass {
            coords: self
                .coords
                .iter()
                .map(|(&d, v)| (d, v.iter().map(|x| -x).collect()))
                .collect(),
            ..self.clone()
        }
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts = self
            .coords
            .iter()
            .map(|(d, v)| format!("degree {d}: [{}]", v.iter().map(format_q).join(", ")));
        f.write_str(&parts.format("; ").to_string())
    }
}

struct ChainBasis {
    monos: Vec<Wedge>,
    index: HashMap<Wedge, usize>,
}

struct H3Block {
    boundary_cols: usize,
    dim: usize,
    system: LinearSystem,
}

/// The Koszul complex of `L / L_{>k}` with per-degree blocks cached.
pub struct KoszulComplex {
    genus: usize,
    class: usize,
    gens: Vec<Word>,
    bases: Mutex<HashMap<(usize, usize), Arc<ChainBasis>>>,
    h3: Mutex<HashMap<usize, Arc<H3Block>>>,
    d3_solvers: Mutex<HashMap<usize, Arc<LinearSystem>>>,
}

impl fmt::Debug for KoszulComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KoszulComplex(genus={}, class={})", self.genus, self.class)
    }
}

type Registry = HashMap<(usize, usize), Arc<KoszulComplex>>;

fn registry() -> &'static Mutex<Registry> {
    static REGISTRY: OnceLock<Mutex<Registry>> = OnceLock::new();
    REGISTRY.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached<K: std::hash::Hash + Eq + Clone, V>(
    map: &Mutex<HashMap<K, Arc<V>>>,
    key: K,
    build: impl FnOnce() -> V,
) -> Arc<V> {
    if let Some(v) = map.lock().expect("cache lock").get(&key) {
        return v.clone();
    }
    let value = Arc::new(build());
    map.lock()
        .expect("cache lock")
        .entry(key)
        .or_insert(value)
        .clone()
}

impl KoszulComplex {
    pub fn new(genus: usize, class: usize) -> Self {
        let gens = (1..=class).flat_map(|d| lyndon_basis(genus, d)).collect();
        KoszulComplex {
            genus,
            class,
            gens,
            bases: Mutex::new(HashMap::new()),
            h3: Mutex::new(HashMap::new()),
            d3_solvers: Mutex::new(HashMap::new()),
        }
    }

    /// Process-wide shared instance for `(genus, class)`.
    pub fn shared(genus: usize, class: usize) -> Arc<KoszulComplex> {
        cached(registry(), (genus, class), || KoszulComplex::new(genus, class))
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn class(&self) -> usize {
        self.class
    }

    fn basis(&self, n: usize, d: usize) -> Arc<ChainBasis> {
        cached(&self.bases, (n, d), || {
            let mut monos = Vec::new();
            let mut current = Vec::new();
            self.enumerate(n, d, 0, &mut current, &mut monos);
            let index = monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
            ChainBasis { monos, index }
        })
    }

    fn enumerate(&self, n: usize, d: usize, start: usize, current: &mut Wedge, out: &mut Vec<Wedge>) {
        if n == 0 {
            if d == 0 {
                out.push(current.clone());
            }
            return;
        }
        for i in start..self.gens.len() {
            let w = &self.gens[i];
            // generators are sorted by degree, so later ones are at least as long
            if w.len() * n > d {
                break;
            }
            current.push(w.clone());
            self.enumerate(n - 1, d - w.len(), i + 1, current, out);
            current.pop();
        }
    }

    /// Dimension of `Lambda^n` in total degree `d`.
    pub fn chain_dim(&self, n: usize, d: usize) -> usize {
        self.basis(n, d).monos.len()
    }

    fn to_vector(&self, c: &WedgeChain, d: usize) -> Result<SparseVec> {
        let basis = self.basis(c.arity, d);
        let mut v = SparseVec::new();
        for (m, coeff) in c.terms.iter() {
            if total_degree(m) != d {
                continue;
            }
            let i = basis.index.get(m).ok_or_else(|| {
                Error::ContextMismatch(format!("monomial outside the class-{} complex", self.class))
            })?;
            v.insert(*i, coeff.clone());
        }
        Ok(v)
    }

    /// Columns of `d_n` from degree-`d` `n`-chains to `(n-1)`-chains.
    fn boundary_columns(&self, n: usize, d: usize) -> Vec<SparseVec> {
        let src = self.basis(n, d);
        if n < 2 {
            return vec![SparseVec::new(); src.monos.len()];
        }
        src.monos
            .iter()
            .map(|m| {
                let mut single = WedgeChain::zero(self.genus, Some(self.class), n);
                single.add_monomial(m.clone(), Q::from_integer(1.into()));
                self.to_vector(&boundary(&single), d)
                    .expect("boundary stays in the complex")
            })
            .collect()
    }

    /// Matrix of `d_n` from degree-`d` `n`-chains to `(n-1)`-chains.
    pub fn boundary_matrix(&self, n: usize, d: usize) -> MatrixQ {
        let rows = self.chain_dim(n.saturating_sub(1), d);
        MatrixQ::from_columns(rows, &self.boundary_columns(n, d))
    }

    /// Degree-wise dimensions of `H_n`, omitting zero entries.
    pub fn homology_dims(&self, n: usize) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for d in n.max(1)..=n * self.class {
            let dim = self.chain_dim(n, d);
            if dim == 0 {
                continue;
            }
            let r_out = if n >= 2 { rank(&self.boundary_matrix(n, d)) } else { 0 };
            let r_in = rank(&self.boundary_matrix(n + 1, d));
            let h = dim - r_out - r_in;
            if h > 0 {
                out.insert(d, h);
            }
        }
        out
    }

    fn h3_block(&self, d: usize) -> Arc<H3Block> {
        cached(&self.h3, d, || {
            let mut columns = self.boundary_columns(4, d);
            let boundary_cols = columns.len();
            let kernel = kernel_basis(&self.boundary_matrix(3, d));
            let rows = self.chain_dim(3, d);
            let kernel_cols: Vec<SparseVec> = kernel
                .into_iter()
                .map(|v| v.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
                .collect();
            let mut all = columns.clone();
            all.extend(kernel_cols.iter().cloned());
            let reduced = rref(&MatrixQ::from_columns(rows, &all));
            let reps: Vec<SparseVec> = reduced
                .pivot_cols
                .iter()
                .filter(|&&p| p >= boundary_cols)
                .map(|&p| kernel_cols[p - boundary_cols].clone())
                .collect();
            let dim = reps.len();
            columns.extend(reps);
            H3Block {
                boundary_cols,
                dim,
                system: LinearSystem::new(&MatrixQ::from_columns(rows, &columns)),
            }
        })
    }

    /// Dimension of `H_3` in degree `d`.
    pub fn h3_dim(&self, d: usize) -> usize {
        self.h3_block(d).dim
    }

    /// Canonical class of a 3-cycle.
    pub fn class_of(&self, z: &WedgeChain) -> Result<HomologyClass> {
        if z.arity != 3 {
            return Err(Error::Precondition(format!("expected a 3-chain, found arity {}", z.arity)));
        }
        if z.genus != self.genus || z.class != Some(self.class) {
            return Err(Error::ContextMismatch(format!(
                "chain in (genus {}, class {:?}) for complex (genus {}, class {})",
                z.genus, z.class, self.genus, self.class
            )));
        }
        if !boundary(z).is_zero() {
            return Err(Error::Domain("class_of needs a cycle".into()));
        }
        let mut out = HomologyClass::zero(self.genus, self.class);
        for d in z.degrees() {
            let block = self.h3_block(d);
            if block.dim == 0 {
                continue;
            }
            let v = self.to_vector(&z.degree_part(d), d)?;
            let x = block
                .system
                .solve_sparse(&v)?
                .ok_or_else(|| Error::Invariant(format!("cycle not in ker/im span in degree {d}")))?;
            let coords = (0..block.dim)
                .map(|i| x.get(&(block.boundary_cols + i)).cloned().unwrap_or_else(Q::zero))
                .collect();
            out.insert(d, coords);
        }
        Ok(out)
    }

    /// A 3-chain `t` with `d_3 t = c` in degree `d`, if one exists.
    pub fn solve_d3(&self, c: &WedgeChain, d: usize) -> Result<Option<WedgeChain>> {
        let solver = cached(&self.d3_solvers, d, || LinearSystem::new(&self.boundary_matrix(3, d)));
        let v = self.to_vector(&c.degree_part(d), d)?;
        let basis = self.basis(3, d);
        Ok(solver.solve_sparse(&v)?.map(|x| {
            let mut t = WedgeChain::zero(self.genus, Some(self.class), 3);
            for (i, coeff) in x {
                t.add_monomial(basis.monos[i].clone(), coeff);
            }
            t
        }))
    }
}

/// Degree-wise dimensions of `H_n(L / L_{>k})`, nonzero entries only.
pub fn homology_dims(genus: usize, k: usize, n: usize) -> Result<BTreeMap<usize, usize>> {
    if k == 0 {
        return Err(Error::Precondition("nilpotency class must be at least 1".into()));
    }
    if !(1..=3).contains(&n) {
        return Err(Error::Precondition("homology degree n must be 1, 2 or 3".into()));
    }
    Ok(KoszulComplex::shared(genus, k).homology_dims(n))
}

/// Class of a 3-cycle in `H_3(L / L_{>k})`.
pub fn class_of(z: &WedgeChain, k: usize) -> Result<HomologyClass> {
    KoszulComplex::shared(z.genus, k).class_of(z)
}

/// `Phi(c)`: the class of the reduced fission of tree combinations of degrees in `k..2k`.
pub fn capital_phi(c: &TreeCombo, k: usize) -> Result<HomologyClass> {
    if let Some(d) = c.degrees().into_iter().find(|&d| d < k || d >= 2 * k) {
        return Err(Error::Domain(format!("tree of degree {d} outside {k}..{}", 2 * k)));
    }
    let z = fission(c)?.reduce(k);
    class_of(&z, k)
}

/// Rank of `Phi` on `T_k + ... + T_{2k-1}` and the total dimension of `H_3`.
pub fn phi_rank(genus: usize, k: usize) -> Result<(usize, usize)> {
    let complex = KoszulComplex::shared(genus, k);
    let h3_total: usize = complex.homology_dims(3).values().sum();
    let mut total_rank = 0;
    for d in k..2 * k {
        let dim = complex.h3_dim(d + 2);
        if dim == 0 {
            continue;
        }
        let columns: Vec<SparseVec> = caterpillars(genus, d)
            .into_iter()
            .map(|t| {
                let class = capital_phi(&TreeCombo::from_tree(genus, t), k)?;
                Ok(class
                    .coords
                    .get(&(d + 2))
                    .map(|v| v.iter().cloned().enumerate().filter(|(_, x)| !x.is_zero()).collect())
                    .unwrap_or_default())
            })
            .collect::<Result<_>>()?;
        total_rank += rank(&MatrixQ::from_columns(dim, &columns));
    }
    Ok((total_rank, h3_total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_lie::br;
    use crate::linalg::q;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g(genus: usize, l: u8) -> LieSeries {
        LieSeries::letter(genus, 8, l)
    }

    #[test]
    fn boundary_examples() {
        let c = WedgeChain::wedge(1, None, &[g(1, 0), g(1, 1)]);
        let b = boundary(&c);
        assert_eq!(b.arity(), 1);
        assert_eq!(b.terms().get(&vec![vec![0, 1]]), q(-1));
        assert!(boundary(&WedgeChain::wedge(1, None, &[g(1, 0)])).is_zero());
    }

    #[test]
    fn boundary_of_three_generators() {
        // d(x^y^z) = -[x,y]^z + [x,z]^y - [y,z]^x
        let (x, y, z) = (g(2, 0), g(2, 1), g(2, 2));
        let lhs = boundary(&WedgeChain::wedge(2, None, &[x.clone(), y.clone(), z.clone()]));
        let w = |p: &LieSeries, r: &LieSeries| WedgeChain::wedge(2, None, &[p.clone(), r.clone()]);
        let rhs = &(&w(&br(&x, &z), &y) - &w(&br(&x, &y), &z)) - &w(&br(&y, &z), &x);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn wedge_signs() {
        let (x, y) = (g(1, 0), g(1, 1));
        let xy = WedgeChain::wedge(1, None, &[x.clone(), y.clone()]);
        let yx = WedgeChain::wedge(1, None, &[y, x.clone()]);
        assert_eq!(xy, yx.scale(&q(-1)));
        assert!(WedgeChain::wedge(1, None, &[x.clone(), x]).is_zero());
    }

    #[test]
    fn low_homology() {
        assert_eq!(homology_dims(2, 2, 1).unwrap(), BTreeMap::from([(1, 4)]));
        assert_eq!(homology_dims(1, 2, 2).unwrap(), BTreeMap::from([(3, 2)]));
        assert_eq!(homology_dims(1, 2, 3).unwrap(), BTreeMap::from([(4, 1)]));
        assert!(homology_dims(1, 0, 3).is_err());
        assert!(homology_dims(1, 2, 4).is_err());
    }

    #[test]
    fn boundaries_have_zero_class() {
        let complex = KoszulComplex::shared(1, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let factors: Vec<LieSeries> = (0..4).map(|_| LieSeries::random(&mut rng, 1, 2, 1, 2, 3)).collect();
        let w = WedgeChain::wedge(1, Some(2), &factors);
        let z = boundary(&w);
        assert!(complex.class_of(&z).unwrap().is_zero());
    }

    #[test]
    fn nonzero_class_at_genus_one() {
        let complex = KoszulComplex::shared(1, 2);
        let kernel = kernel_basis(&complex.boundary_matrix(3, 4));
        let basis = complex.basis(3, 4);
        let found = kernel.iter().any(|v| {
            let mut z = WedgeChain::zero(1, Some(2), 3);
            for (i, c) in v.iter().enumerate() {
                z.add_monomial(basis.monos[i].clone(), c.clone());
            }
            !complex.class_of(&z).unwrap().is_zero()
        });
        assert!(found);
    }

    #[test]
    fn class_rejects_non_cycles() {
        let z = WedgeChain::wedge(2, Some(2), &[g(2, 0), g(2, 1), g(2, 2)]);
        assert!(!boundary(&z).is_zero());
        assert!(class_of(&z, 2).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn boundary_squares_to_zero(seed in any::<u64>(), n in 2usize..=5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let factors: Vec<LieSeries> = (0..n).map(|_| LieSeries::random(&mut rng, 2, 4, 1, 3, 3)).collect();
            let c = WedgeChain::wedge(2, Some(4), &factors);
            prop_assert!(boundary(&boundary(&c)).is_zero());
        }

        #[test]
        fn class_is_well_defined(seed in any::<u64>()) {
            let complex = KoszulComplex::shared(1, 2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let kernel = kernel_basis(&complex.boundary_matrix(3, 4));
            let basis = complex.basis(3, 4);
            let mut z = WedgeChain::zero(1, Some(2), 3);
            for v in &kernel {
                let c = Q::from_integer(rng.gen_range(-2i64..=2).into());
                for (i, x) in v.iter().enumerate() {
                    z.add_monomial(basis.monos[i].clone(), x * &c);
                }
            }
            let factors: Vec<LieSeries> = (0..4).map(|_| LieSeries::random(&mut rng, 1, 2, 1, 2, 3)).collect();
            let w = boundary(&WedgeChain::wedge(1, Some(2), &factors));
            prop_assert_eq!(complex.class_of(&z).unwrap(), complex.class_of(&(&z + &w)).unwrap());
        }
    }

}
