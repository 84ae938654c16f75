//! Tree-shaped `H`-colored Jacobi diagrams.
//!
//! A diagram is stored planted at one of its leaves: a root color plus a
//! rooted binary tree whose node `(p, q)` stands for a trivalent vertex with
//! cyclic order (edge towards the root, `p`, `q`). Every diagram is kept in a
//! canonical planting (minimal over all leaves, children sorted at each node),
//! with the sign of the reorderings carried by the coefficient. AS is thereby
//! built into the keys; IHX is decided through `eta`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;
use num_traits::One;
use rand::Rng;

use crate::error::{Error, Result};
use crate::free_lie::{bracket_lyndon, bracket_terms, letter_name, lyndon_basis, BasisIndex, Gen, LieSeries, Word};
use crate::koszul::WedgeChain;
use crate::lincomb::LinComb;
use crate::linalg::{format_q, parse_q, rank, LinearSystem, MatrixQ, SparseVec, Q};

/// A planar rooted binary tree with colored leaves.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rooted {
    Leaf(u8),
    Node(Box<Rooted>, Box<Rooted>),
}

impl Rooted {
    pub fn leaf(l: u8) -> Self {
        Rooted::Leaf(l)
    }

    pub fn node(p: Rooted, q: Rooted) -> Self {
        Rooted::Node(Box::new(p), Box::new(q))
    }

    /// Number of internal nodes.
    pub fn degree(&self) -> usize {
        match self {
            Rooted::Leaf(_) => 0,
            Rooted::Node(p, q) => 1 + p.degree() + q.degree(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.degree() + 1
    }

    fn max_letter(&self) -> u8 {
        match self {
            Rooted::Leaf(l) => *l,
            Rooted::Node(p, q) => p.max_letter().max(q.max_letter()),
        }
    }

    /// The iterated bracket read off the tree, on the Lyndon basis.
    pub fn comm_terms(&self) -> LinComb<Word> {
        match self {
            Rooted::Leaf(l) => LinComb::basis(vec![*l]),
            Rooted::Node(p, q) => bracket_terms(&p.comm_terms(), &q.comm_terms(), usize::MAX),
        }
    }

    pub fn comm(&self, genus: usize) -> LieSeries {
        LieSeries::from_lincomb(genus, self.leaf_count(), self.comm_terms())
    }

    /// Sorts children at every node. `None` when two sibling subtrees coincide.
    fn canonical(&self) -> Option<(Rooted, bool)> {
        match self {
            Rooted::Leaf(_) => Some((self.clone(), false)),
            Rooted::Node(p, q) => {
                let (p, sp) = p.canonical()?;
                let (q, sq) = q.canonical()?;
                match p.cmp(&q) {
                    std::cmp::Ordering::Less => Some((Rooted::node(p, q), sp ^ sq)),
                    std::cmp::Ordering::Greater => Some((Rooted::node(q, p), !(sp ^ sq))),
                    std::cmp::Ordering::Equal => None,
                }
            }
        }
    }
}

impl fmt::Display for Rooted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rooted::Leaf(l) => f.write_str(&letter_name(*l)),
            Rooted::Node(p, q) => write!(f, "({p} {q})"),
        }
    }
}

/// Unrooted view: vertex 0 is the planting leaf; internal vertices list their
/// neighbours in cyclic order.
struct TreeGraph {
    color: Vec<Option<u8>>,
    adj: Vec<Vec<usize>>,
}

impl TreeGraph {
    fn planted(root: u8, body: &Rooted) -> Self {
        let mut g = TreeGraph {
            color: vec![Some(root)],
            adj: vec![Vec::new()],
        };
        let top = g.attach(body, 0);
        g.adj[0].push(top);
        g
    }

    fn attach(&mut self, r: &Rooted, parent: usize) -> usize {
        let v = self.color.len();
        self.color.push(None);
        self.adj.push(vec![parent]);
        match r {
            Rooted::Leaf(l) => self.color[v] = Some(*l),
            Rooted::Node(p, q) => {
                let pv = self.attach(p, v);
                let qv = self.attach(q, v);
                self.adj[v].push(pv);
                self.adj[v].push(qv);
            }
        }
        v
    }

    fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.color.len()).filter(|&v| self.color[v].is_some())
    }

    fn internal(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.color.len()).filter(|&v| self.color[v].is_none())
    }

    /// The part of the tree behind `to`, seen from `from`.
    fn subtree(&self, from: usize, to: usize) -> Rooted {
        match self.color[to] {
            Some(l) => Rooted::Leaf(l),
            None => {
                let nb = &self.adj[to];
                let i = nb.iter().position(|&x| x == from).expect("adjacent vertices");
                let p = nb[(i + 1) % 3];
                let q = nb[(i + 2) % 3];
                Rooted::node(self.subtree(to, p), self.subtree(to, q))
            }
        }
    }

    fn at_leaf(&self, leaf: usize) -> Rooted {
        self.subtree(leaf, self.adj[leaf][0])
    }
}

/// A diagram in canonical planting.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeDiagram {
    root: u8,
    body: Rooted,
}

impl TreeDiagram {
    /// Canonical form of the diagram planted at a leaf colored `root`.
    /// Returns `None` when the diagram vanishes by AS, otherwise the canonical
    /// diagram and whether the input equals its negative.
    pub fn canonicalize(root: u8, body: Rooted) -> Option<(TreeDiagram, bool)> {
        let graph = TreeGraph::planted(root, &body);
        let mut best: Option<(TreeDiagram, bool)> = None;
        let mut conflict = false;
        for leaf in graph.leaves() {
            let (b, neg) = graph.at_leaf(leaf).canonical()?;
            let cand = TreeDiagram {
                root: graph.color[leaf].expect("leaf"),
                body: b,
            };
            match &best {
                Some((t, s)) if *t == cand => conflict |= *s != neg,
                Some((t, _)) if *t < cand => {}
                _ => {
                    best = Some((cand, neg));
                    conflict = false;
                }
            }
        }
        if conflict {
            None
        } else {
            best
        }
    }

    pub fn root(&self) -> u8 {
        self.root
    }

    pub fn body(&self) -> &Rooted {
        &self.body
    }

    /// Number of trivalent vertices.
    pub fn degree(&self) -> usize {
        self.body.degree()
    }

    pub fn is_strut(&self) -> bool {
        self.degree() == 0
    }

    pub fn max_letter(&self) -> u8 {
        self.root.max(self.body.max_letter())
    }

    fn graph(&self) -> TreeGraph {
        TreeGraph::planted(self.root, &self.body)
    }

    /// Leaf colors, in the vertex order used by [`TreeDiagram::comm_at`].
    pub fn leaf_colors(&self) -> Vec<u8> {
        let g = self.graph();
        g.leaves().map(|v| g.color[v].expect("leaf")).collect()
    }

    /// The bracket of the tree rooted at its `leaf`-th leaf (in [`TreeDiagram::leaf_colors`] order).
    pub fn comm_at(&self, leaf: usize, genus: usize) -> Result<LieSeries> {
        let g = self.graph();
        let v = g
            .leaves()
            .nth(leaf)
            .ok_or_else(|| Error::Precondition(format!("tree has no leaf number {leaf}")))?;
        Ok(g.at_leaf(v).comm(genus))
    }

    /// Parses `(r A B)` or `(r A)` where subtrees are generator names or `(P Q)`.
    pub fn parse_planted(s: &str) -> Result<(u8, Rooted)> {
        let tokens: Vec<String> = s
            .replace('(', " ( ")
            .replace(')', " ) ")
            .split_whitespace()
            .map(str::to_string)
            .collect();
        let mut pos = 0;
        let sexp = parse_sexp(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::parse("tree", "trailing input after tree"));
        }
        let items = match sexp {
            Sexp::List(items) => items,
            Sexp::Atom(_) => return Err(Error::parse("tree", "a tree must be a parenthesized list")),
        };
        let root = match items.first() {
            Some(Sexp::Atom(a)) => parse_color(a)?,
            _ => return Err(Error::parse("tree", "a tree starts with its root leaf color")),
        };
        let body = match &items[1..] {
            [x] => to_rooted(x)?,
            [x, y] => Rooted::node(to_rooted(x)?, to_rooted(y)?),
            _ => return Err(Error::parse("tree", "expected (root subtree) or (root left right)")),
        };
        Ok((root, body))
    }
}

impl fmt::Display for TreeDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.body {
            Rooted::Leaf(l) => write!(f, "({} {})", letter_name(self.root), letter_name(*l)),
            Rooted::Node(p, q) => write!(f, "({} {p} {q})", letter_name(self.root)),
        }
    }
}

enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn parse_sexp(tokens: &[String], pos: &mut usize) -> Result<Sexp> {
    let tok = tokens
        .get(*pos)
        .ok_or_else(|| Error::parse("tree", "unexpected end of input"))?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    Some(")") => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(parse_sexp(tokens, pos)?),
                    None => return Err(Error::parse("tree", "unbalanced parentheses")),
                }
            }
        }
        ")" => Err(Error::parse("tree", "unexpected ')'")),
        atom => Ok(Sexp::Atom(atom.to_string())),
    }
}

fn parse_color(a: &str) -> Result<u8> {
    Gen::parse(a)
        .map(Gen::letter)
        .ok_or_else(|| Error::parse("tree", format!("unknown generator `{a}`")))
}

fn to_rooted(s: &Sexp) -> Result<Rooted> {
    match s {
        Sexp::Atom(a) => Ok(Rooted::Leaf(parse_color(a)?)),
        Sexp::List(items) => match items.as_slice() {
            [p, q] => Ok(Rooted::node(to_rooted(p)?, to_rooted(q)?)),
            _ => Err(Error::parse("tree", "an inner vertex must have exactly two subtrees")),
        },
    }
}

/// A rational combination of canonical diagrams.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeCombo {
    genus: usize,
    terms: LinComb<TreeDiagram>,
}

impl TreeCombo {
    pub fn zero(genus: usize) -> Self {
        TreeCombo {
            genus,
            terms: LinComb::new(),
        }
    }

    pub fn from_tree(genus: usize, t: TreeDiagram) -> Self {
        let mut c = Self::zero(genus);
        c.add_diagram(t, Q::one());
        c
    }

    /// The single diagram planted at `root`; zero if it vanishes by AS.
    pub fn planted(genus: usize, root: u8, body: Rooted) -> Self {
        let mut c = Self::zero(genus);
        c.add_planted(root, body, Q::one());
        c
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn terms(&self) -> &LinComb<TreeDiagram> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn add_diagram(&mut self, t: TreeDiagram, c: Q) {
        assert!((t.max_letter() as usize) < 2 * self.genus, "tree color outside genus {}", self.genus);
        self.terms.add_term(t, c);
    }

    pub fn add_planted(&mut self, root: u8, body: Rooted, c: Q) {
        if let Some((t, neg)) = TreeDiagram::canonicalize(root, body) {
            self.add_diagram(t, if neg { -c } else { c });
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.genus != other.genus {
            return Err(Error::ContextMismatch("tree combinations of different genus".into()));
        }
        let mut terms = self.terms.clone();
        terms.add_assign(&other.terms);
        Ok(TreeCombo { genus: self.genus, terms })
    }

    pub fn scale(&self, c: &Q) -> Self {
        TreeCombo {
            genus: self.genus,
            terms: self.terms.scaled(c),
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.terms.keys().map(TreeDiagram::degree).sorted().dedup().collect()
    }

    pub fn degree_part(&self, d: usize) -> Self {
        TreeCombo {
            genus: self.genus,
            terms: self.terms.filtered(|t| t.degree() == d),
        }
    }
}

impl fmt::Display for TreeCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts = self.terms.iter().map(|(t, c)| format!("({}) {t}", format_q(c)));
        f.write_str(&parts.format(" + ").to_string())
    }
}

/// An element of `H (x) L`, keyed by (letter, Lyndon word).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HLieTensor {
    genus: usize,
    terms: LinComb<(u8, Word)>,
}

impl HLieTensor {
    pub fn zero(genus: usize) -> Self {
        HLieTensor {
            genus,
            terms: LinComb::new(),
        }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn terms(&self) -> &LinComb<(u8, Word)> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    /// Adds `c * (h (x) x)`.
    pub fn add_tensor(&mut self, h: u8, x: &LinComb<Word>, c: &Q) {
        for (w, v) in x.iter() {
            self.terms.add_term((h, w.clone()), v * c);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.genus != other.genus {
            return Err(Error::ContextMismatch("tensors of different genus".into()));
        }
        let mut terms = self.terms.clone();
        terms.add_assign(&other.terms);
        Ok(HLieTensor { genus: self.genus, terms })
    }

    pub fn scale(&self, c: &Q) -> Self {
        HLieTensor {
            genus: self.genus,
            terms: self.terms.scaled(c),
        }
    }

    /// Component `X_h` with `x = sum_h h (x) X_h`.
    pub fn component(&self, h: u8) -> LinComb<Word> {
        self.terms
            .iter()
            .filter(|((l, _), _)| *l == h)
            .map(|((_, w), c)| (w.clone(), c.clone()))
            .collect()
    }

    /// Part whose Lie factor has degree `j + 1` (tree degree `j`).
    pub fn tree_degree_part(&self, j: usize) -> Self {
        HLieTensor {
            genus: self.genus,
            terms: self.terms.filtered(|(_, w)| w.len() == j + 1),
        }
    }

    /// Tree degrees present (Lie degree minus one).
    pub fn tree_degrees(&self) -> Vec<usize> {
        self.terms.keys().map(|(_, w)| w.len() - 1).sorted().dedup().collect()
    }

    /// `sum_h [h, X_h]`.
    pub fn bracket_contraction(&self) -> LinComb<Word> {
        let mut out = LinComb::new();
        for ((h, w), c) in self.terms.iter() {
            out.add_scaled(&bracket_lyndon(&[*h], w), c);
        }
        out
    }
}

impl fmt::Display for HLieTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts = self.terms.iter().map(|((h, w), c)| {
            format!(
                "({}) {} (x) {}",
                format_q(c),
                letter_name(*h),
                crate::free_lie::bracketing_string(w)
            )
        });
        f.write_str(&parts.format(" + ").to_string())
    }
}

/// `phi(c) = sum_T c_T sum_v comm(v->n0) ^ comm(v->n1) ^ comm(v->n2)` over the
/// trivalent vertices `v` with cyclically ordered neighbours `(n0, n1, n2)`.
pub fn fission(c: &TreeCombo) -> Result<WedgeChain> {
    let mut out = WedgeChain::zero(c.genus, None, 3);
    for (t, coeff) in c.terms.iter() {
        if t.is_strut() {
            return Err(Error::Domain("fission is undefined on struts".into()));
        }
        let g = t.graph();
        for v in g.internal() {
            let factors: Vec<LieSeries> = g.adj[v].iter().map(|&n| g.subtree(v, n).comm(c.genus)).collect();
            out = &out + &WedgeChain::wedge(c.genus, None, &factors).scale(coeff);
        }
    }
    Ok(out)
}

/// `sum_v col(v) ^ comm(T_v)` over the leaves.
pub fn leaf_wedge_sum(c: &TreeCombo) -> WedgeChain {
    let mut out = WedgeChain::zero(c.genus, None, 2);
    for (t, coeff) in c.terms.iter() {
        let g = t.graph();
        for v in g.leaves() {
            let col = LieSeries::letter(c.genus, 1, g.color[v].expect("leaf"));
            let rest = g.at_leaf(v).comm(c.genus);
            out = &out + &WedgeChain::wedge(c.genus, None, &[col, rest]).scale(coeff);
        }
    }
    out
}

/// `eta(c) = sum_v col(v) (x) comm(T_v)` over the leaves.
pub fn eta(c: &TreeCombo) -> HLieTensor {
    let mut out = HLieTensor::zero(c.genus);
    for (t, coeff) in c.terms.iter() {
        let g = t.graph();
        for v in g.leaves() {
            out.add_tensor(g.color[v].expect("leaf"), &g.at_leaf(v).comm_terms(), coeff);
        }
    }
    out
}

/// Equality modulo AS and IHX, decided by `eta`.
pub fn tree_equal(x: &TreeCombo, y: &TreeCombo) -> bool {
    x.genus == y.genus && eta(x) == eta(y)
}

/// `T(x, y | z, w)`: the two-vertex tree with vertices `(x, y, e)` and `(e, z, w)`.
pub fn h_tree(genus: usize, x: u8, y: u8, z: u8, w: u8) -> TreeCombo {
    let body = Rooted::node(Rooted::leaf(y), Rooted::node(Rooted::leaf(z), Rooted::leaf(w)));
    TreeCombo::planted(genus, x, body)
}

/// The IHX combination `-T(gh|kl) + T(gk|hl) - T(gl|hk)`, whose fission is `d_4(g^h^k^l)`.
pub fn ihx_combination(genus: usize, g: u8, h: u8, k: u8, l: u8) -> TreeCombo {
    let mut out = h_tree(genus, g, k, h, l);
    out = out.add(&h_tree(genus, g, h, k, l).scale(&-Q::one())).expect("same genus");
    out.add(&h_tree(genus, g, l, h, k).scale(&-Q::one())).expect("same genus")
}

/// Caterpillars `x0 - ((..((x1 x2) x3)..) x_{d+1})` with `x1 < x2` and
/// `x0 < x_{d+1}`, a spanning family of degree-`d` diagrams.
pub fn caterpillars(genus: usize, d: usize) -> Vec<TreeDiagram> {
    let letters = 2 * genus as u8;
    let mut out = BTreeSet::new();
    if d == 0 {
        return Vec::new();
    }
    for colors in (0..d + 2).map(|_| 0..letters).multi_cartesian_product() {
        if colors[1] >= colors[2] || colors[0] >= colors[d + 1] {
            continue;
        }
        let mut body = Rooted::leaf(colors[1]);
        for &c in &colors[2..] {
            body = Rooted::node(body, Rooted::leaf(c));
        }
        if let Some((t, _)) = TreeDiagram::canonicalize(colors[0], body) {
            out.insert(t);
        }
    }
    out.into_iter().collect()
}

fn bracket_columns(genus: usize, d: usize, words: &BasisIndex, targets: &BasisIndex) -> Vec<SparseVec> {
    let mut cols = Vec::with_capacity(2 * genus * words.len());
    for h in 0..2 * genus as u8 {
        for w in words.words() {
            cols.push(
                bracket_lyndon(&[h], w)
                    .iter()
                    .map(|(v, c)| (targets.index(v).expect("homogeneous bracket"), c.clone()))
                    .collect(),
            );
        }
    }
    debug_assert!(d >= 1);
    cols
}

/// `dim T_d = dim ker([-,-]: H (x) L_{d+1} -> L_{d+2})`, by rank.
pub fn tree_space_dim(genus: usize, d: usize) -> usize {
    let words = BasisIndex::new(lyndon_basis(genus, d + 1));
    let targets = BasisIndex::new(lyndon_basis(genus, d + 2));
    let cols = bracket_columns(genus, d, &words, &targets);
    let r = rank(&MatrixQ::from_columns(targets.len(), &cols));
    2 * genus * words.len() - r
}

struct EtaSystem {
    trees: Vec<TreeDiagram>,
    words: BasisIndex,
    system: LinearSystem,
}

type EtaCache = HashMap<(usize, usize), Arc<EtaSystem>>;

fn eta_vector(x: &HLieTensor, words: &BasisIndex) -> Option<SparseVec> {
    let mut v = SparseVec::new();
    for ((h, w), c) in x.terms.iter() {
        let i = words.index(w)?;
        v.insert(*h as usize * words.len() + i, c.clone());
    }
    Some(v)
}

fn eta_system(genus: usize, d: usize) -> Result<Arc<EtaSystem>> {
    static CACHE: OnceLock<Mutex<EtaCache>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().expect("cache lock").get(&(genus, d)) {
        return Ok(s.clone());
    }
    let trees = caterpillars(genus, d);
    let words = BasisIndex::new(lyndon_basis(genus, d + 1));
    let cols: Vec<SparseVec> = trees
        .iter()
        .map(|t| eta_vector(&eta(&TreeCombo::from_tree(genus, t.clone())), &words).expect("eta is homogeneous"))
        .collect();
    let system = LinearSystem::new(&MatrixQ::from_columns(2 * genus * words.len(), &cols));
    let expected = tree_space_dim(genus, d);
    if system.rank() != expected {
        return Err(Error::Invariant(format!(
            "caterpillars span rank {} but dim T_{d} = {expected}",
            system.rank()
        )));
    }
    let s = Arc::new(EtaSystem { trees, words, system });
    cache.lock().expect("cache lock").insert((genus, d), s.clone());
    Ok(s)
}

/// A tree combination of degree `d` with `eta(c) = x`, on caterpillar trees.
pub fn eta_inverse(x: &HLieTensor, d: usize) -> Result<TreeCombo> {
    if d == 0 {
        return Err(Error::Precondition("eta_inverse needs tree degree >= 1".into()));
    }
    if x.terms.keys().any(|(_, w)| w.len() != d + 1) {
        return Err(Error::Domain(format!("tensor is not homogeneous of tree degree {d}")));
    }
    if !x.bracket_contraction().is_zero() {
        return Err(Error::Domain("tensor is not in the kernel of the bracket".into()));
    }
    let sys = eta_system(x.genus, d)?;
    let v = eta_vector(x, &sys.words).expect("checked homogeneous");
    let sol = sys
        .system
        .solve_sparse(&v)?
        .ok_or_else(|| Error::Invariant("bracket-kernel element outside the eta image".into()))?;
    let mut out = TreeCombo::zero(x.genus);
    for (i, c) in sol {
        out.add_diagram(sys.trees[i].clone(), c);
    }
    Ok(out)
}

fn random_rooted<R: Rng + ?Sized>(rng: &mut R, letters: u8, nodes: usize) -> Rooted {
    if nodes == 0 {
        return Rooted::leaf(rng.gen_range(0..letters));
    }
    let left = rng.gen_range(0..nodes);
    Rooted::node(
        random_rooted(rng, letters, left),
        random_rooted(rng, letters, nodes - 1 - left),
    )
}

const RANDOM_TREE_ATTEMPTS: usize = 1000;

/// A random diagram of degree `d` that does not vanish by AS.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, genus: usize, d: usize) -> Result<TreeDiagram> {
    if genus == 0 {
        return Err(Error::Precondition("random trees need genus >= 1".into()));
    }
    let letters = 2 * genus as u8;
    for _ in 0..RANDOM_TREE_ATTEMPTS {
        let root = rng.gen_range(0..letters);
        let body = random_rooted(rng, letters, d);
        if let Some((t, _)) = TreeDiagram::canonicalize(root, body) {
            return Ok(t);
        }
    }
    Err(Error::Domain(format!(
        "no nonvanishing tree of degree {d} found in genus {genus}"
    )))
}

/// Dimension check helper: `dim D_d = 2g * witt(2g, d-1) - witt(2g, d)`.
pub fn d_space_dim(genus: usize, d: usize) -> usize {
    use crate::free_lie::witt_dim;
    (2 * genus * witt_dim(2 * genus, d - 1)).saturating_sub(witt_dim(2 * genus, d))
}

/// Parses a tree document: one `coeff (tree)` per line; blank lines and `#` comments ignored.
pub fn parse_tree_document(genus: usize, text: &str) -> Result<TreeCombo> {
    let mut out = TreeCombo::zero(genus);
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (coeff, tree) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::parse(format!("line {}", lineno + 1), "expected `coeff (tree)`"))?;
        let c = parse_q(coeff)
            .ok_or_else(|| Error::parse(format!("line {}.coeff", lineno + 1), format!("bad rational `{coeff}`")))?;
        let (root, body) = TreeDiagram::parse_planted(tree).map_err(|e| match e {
            Error::Parse { message, .. } => Error::parse(format!("line {}.tree", lineno + 1), message),
            other => other,
        })?;
        let max = root.max(body.max_letter());
        if max as usize >= 2 * genus {
            return Err(Error::parse(
                format!("line {}.tree", lineno + 1),
                format!("color {} outside genus {genus}", letter_name(max)),
            ));
        }
        out.add_planted(root, body, c);
    }
    Ok(out)
}

/// Renders a tree combination in the document format read by [`parse_tree_document`].
pub fn format_tree_document(c: &TreeCombo) -> String {
    c.terms
        .iter()
        .map(|(t, q)| format!("{} {t}\n", format_q(q)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_lie::br;
    use crate::koszul::boundary;
    use crate::linalg::q;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn leaf(l: u8) -> Rooted {
        Rooted::leaf(l)
    }

    fn node(p: Rooted, q: Rooted) -> Rooted {
        Rooted::node(p, q)
    }

    fn lie(genus: usize, l: u8) -> LieSeries {
        LieSeries::letter(genus, 6, l)
    }

    #[test]
    fn comm_of_caterpillar() {
        // rooted at r with subtrees g1 and ((g2 g3) g4): [g1,[[g2,g3],g4]]
        let genus = 3;
        let body = node(leaf(0), node(node(leaf(1), leaf(2)), leaf(3)));
        let expected = br(&lie(genus, 0), &br(&br(&lie(genus, 1), &lie(genus, 2)), &lie(genus, 3)));
        assert_eq!(body.comm_terms(), *expected.terms());
        assert_eq!(leaf(2).comm(genus), LieSeries::letter(genus, 1, 2));
    }

    #[test]
    fn y_diagram_comm_and_eta() {
        let genus = 2;
        let t = TreeCombo::planted(genus, 0, node(leaf(1), leaf(2)));
        let (tree, _) = t.terms().iter().next().map(|(t, c)| (t.clone(), c.clone())).unwrap();
        let colors = tree.leaf_colors();
        assert_eq!(colors.len(), 3);
        let (x, y, z) = (lie(genus, 0), lie(genus, 1), lie(genus, 2));
        let mut expected = HLieTensor::zero(genus);
        expected.add_tensor(0, br(&y, &z).terms(), &q(1));
        expected.add_tensor(1, br(&z, &x).terms(), &q(1));
        expected.add_tensor(2, br(&x, &y).terms(), &q(1));
        assert_eq!(eta(&t), expected);
        assert!(eta(&t).bracket_contraction().is_zero());
        let c0 = TreeDiagram::canonicalize(0, node(leaf(1), leaf(2))).unwrap().0;
        assert_eq!(c0.comm_at(0, genus).unwrap().terms(), br(&y, &z).terms());
        assert!(c0.comm_at(5, genus).is_err());
    }

    #[test]
    fn as_relation() {
        let genus = 2;
        let t = TreeCombo::planted(genus, 0, node(leaf(1), node(leaf(2), leaf(3))));
        let flipped = TreeCombo::planted(genus, 0, node(node(leaf(2), leaf(3)), leaf(1)));
        assert!(t.add(&flipped).unwrap().is_zero());
        assert!(tree_equal(&t, &flipped.scale(&q(-1))));
        assert!(eta(&t.add(&flipped).unwrap()).is_zero());
        assert!(TreeCombo::planted(genus, 0, node(leaf(1), leaf(1))).is_zero());
    }

    #[test]
    fn replanting_is_invariant() {
        let genus = 2;
        let t = TreeCombo::planted(genus, 3, node(node(leaf(0), leaf(1)), leaf(2)));
        // same diagram planted at leaf 0: vertex (0, 1, e), then (e, 2, 3)
        let u = TreeCombo::planted(genus, 0, node(leaf(1), node(leaf(2), leaf(3))));
        assert_eq!(t, u);
    }

    #[test]
    fn ihx_relation() {
        let genus = 2;
        let (i, hh, x) = (h_tree(genus, 0, 1, 2, 3), h_tree(genus, 0, 2, 3, 1), h_tree(genus, 0, 3, 1, 2));
        // I = H - X in the form T(x,y|z,w) + cyclic permutations of (y, z, w) = 0
        let sum = i.add(&hh).unwrap().add(&x).unwrap();
        assert!(!sum.is_zero());
        assert!(eta(&sum).is_zero());
    }

    #[test]
    fn fission_of_degree_three_example() {
        // tree with vertices (g1 g2 e1), (e1 g3 e2), (e2 g4 g5), rooted at g5 side
        let genus = 3;
        let (g1, g2, g3, g4, g5) = (0u8, 1, 2, 3, 4);
        let body = node(node(node(leaf(g1), leaf(g2)), leaf(g3)), leaf(g4));
        let t = TreeCombo::planted(genus, g5, body);
        let l = |x| lie(genus, x);
        let w = |a: LieSeries, b: LieSeries, c: LieSeries| WedgeChain::wedge(genus, None, &[a, b, c]);
        let expected = &(&w(l(g1), l(g2), br(&l(g3), &br(&l(g4), &l(g5))))
            + &w(l(g3), br(&l(g4), &l(g5)), br(&l(g1), &l(g2))))
            + &w(l(g5), br(&br(&l(g1), &l(g2)), &l(g3)), l(g4));
        assert_eq!(fission(&t).unwrap(), expected);
    }

    #[test]
    fn random_tree_gives_up_when_all_trees_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(random_tree(&mut rng, 1, 1).is_err());
        assert!(random_tree(&mut rng, 0, 2).is_err());
        assert_eq!(random_tree(&mut rng, 1, 2).unwrap().degree(), 2);
    }

    #[test]
    fn fission_rejects_struts() {
        let s = TreeCombo::planted(1, 0, leaf(1));
        assert!(fission(&s).is_err());
    }

    #[test]
    fn ihx_fission_is_boundary() {
        let genus = 2;
        let gens: Vec<LieSeries> = (0..4).map(|l| lie(genus, l)).collect();
        let lhs = fission(&ihx_combination(genus, 0, 1, 2, 3)).unwrap();
        let rhs = boundary(&WedgeChain::wedge(genus, None, &gens));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn tree_dims() {
        assert_eq!(tree_space_dim(1, 2), 1);
        assert_eq!(tree_space_dim(1, 3), 0);
        assert_eq!(tree_space_dim(2, 2), 20);
        assert_eq!(tree_space_dim(2, 3), 36);
        for (g, d) in [(1, 2), (1, 3), (2, 1), (2, 2), (2, 3)] {
            assert_eq!(tree_space_dim(g, d), d_space_dim(g, d + 2));
        }
    }

    #[test]
    fn eta_inverse_round_trips() {
        let genus = 2;
        let y = TreeCombo::planted(genus, 0, node(leaf(1), leaf(2)));
        let back = eta_inverse(&eta(&y), 1).unwrap();
        assert!(tree_equal(&back, &y));
        let mut bad = HLieTensor::zero(genus);
        bad.add_tensor(0, &LinComb::basis(vec![1, 2]), &q(1));
        assert!(matches!(eta_inverse(&bad, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn document_round_trip() {
        let genus = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut c = TreeCombo::zero(genus);
        for d in 0..4 {
            c.add_diagram(random_tree(&mut rng, genus, d).unwrap(), q(d as i64 + 1));
        }
        let text = format_tree_document(&c);
        assert_eq!(parse_tree_document(genus, &text).unwrap(), c);
        assert!(parse_tree_document(1, "1 (a1 (b1 a2))").is_err());
        let err = parse_tree_document(2, "x (a1 b1)").unwrap_err();
        assert!(err.to_string().contains("line 1.coeff"));
        let e2 = parse_tree_document(2, "1 (a1 (b1 a2 b2))").unwrap_err();
        assert!(e2.to_string().contains("line 1.tree"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn d3_of_fission_is_leaf_sum(seed in any::<u64>(), genus in 1usize..=2, d in 1usize..=5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let Ok(t) = random_tree(&mut rng, genus, d) else { return Ok(()) };
            let t = TreeCombo::from_tree(genus, t);
            prop_assert_eq!(boundary(&fission(&t).unwrap()), leaf_wedge_sum(&t));
        }

        #[test]
        fn eta_lands_in_bracket_kernel(seed in any::<u64>(), d in 0usize..=5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = TreeCombo::from_tree(2, random_tree(&mut rng, 2, d).unwrap());
            prop_assert!(eta(&t).bracket_contraction().is_zero());
        }

        #[test]
        fn eta_inverse_recovers_trees(seed in any::<u64>(), d in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = TreeCombo::from_tree(2, random_tree(&mut rng, 2, d).unwrap());
            let back = eta_inverse(&eta(&t), d).unwrap();
            prop_assert!(tree_equal(&back, &t));
        }

        #[test]
        fn fission_is_additive_in_leaf_colors(seed in any::<u64>(), d in 1usize..=4) {
            // a leaf colored x + y splits the tree into the x- and y-colored trees
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_tree(&mut rng, 2, d).unwrap();
            let (x, y) = (rng.gen_range(0..4u8), rng.gen_range(0..4u8));
            let tx = TreeCombo::planted(2, x, t.body().clone());
            let ty = TreeCombo::planted(2, y, t.body().clone());
            let sum = tx.add(&ty).unwrap();
            prop_assert_eq!(fission(&sum).unwrap(), &fission(&tx).unwrap() + &fission(&ty).unwrap());
        }
    }
}
