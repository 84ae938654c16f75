//! Exact rational linear algebra.
//!
//! Matrices are stored as sparse rows of [`Q`] entries. Elimination always
//! picks the leftmost remaining column and, within it, the first row (in the
//! current row order) holding a nonzero entry, so every echelon form, pivot
//! list and particular solution produced here is reproducible.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type Q = BigRational;

/// Sparse vector keyed by coordinate index.
pub type SparseVec = BTreeMap<usize, Q>;

type Row = Vec<(usize, Q)>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Q::new(n, d))
}

/// Renders a rational as `"p/q"`, or `"p"` when integral.
pub fn format_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Sparse rational matrix. No zero entries are stored.
#[derive(Clone, PartialEq, Eq)]
pub struct MatrixQ {
    rows: usize,
    cols: usize,
    data: Vec<Row>,
}

impl fmt::Debug for MatrixQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixQ {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format_q(&self.get(r, c))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl MatrixQ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatrixQ {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].push((i, Q::one()));
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Q>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged dense matrix");
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| (c, v.clone()))
                    .collect()
            })
            .collect();
        MatrixQ {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect();
        Self::from_dense(&dense)
    }

    /// Builds a `rows x columns.len()` matrix from sparse column vectors.
    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            for (&r, v) in col {
                assert!(r < rows, "row index {r} out of range {rows}");
                if !v.is_zero() {
                    m.data[r].push((c, v.clone()));
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        match self.data[r].binary_search_by_key(&c, |(k, _)| *k) {
            Ok(i) => self.data[r][i].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn row(&self, r: usize) -> &[(usize, Q)] {
        &self.data[r]
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c)).collect())
            .collect()
    }

    pub fn mul_vec(&self, x: &[Q]) -> Vec<Q> {
        assert_eq!(x.len(), self.cols);
        self.data
            .iter()
            .map(|row| {
                row.iter()
                    .fold(Q::zero(), |acc, (c, v)| acc + v * &x[*c])
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                t.data[*c].push((r, v.clone()));
            }
        }
        t
    }
}

/// Output of [`rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
    pub reduced: MatrixQ,
}

fn lead(row: &Row) -> Option<usize> {
    row.first().map(|(c, _)| *c)
}

fn coeff_at(row: &Row, c: usize) -> Option<&Q> {
    row.binary_search_by_key(&c, |(k, _)| *k).ok().map(|i| &row[i].1)
}

/// `target -= factor * source`.
fn axpy(target: &Row, factor: &Q, source: &Row) -> Row {
    let mut out = Vec::with_capacity(target.len() + source.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < source.len() {
        let ci = target.get(i).map(|e| e.0);
        let cj = source.get(j).map(|e| e.0);
        match (ci, cj) {
            (Some(a), Some(b)) if a == b => {
                let v = &target[i].1 - factor * &source[j].1;
                if !v.is_zero() {
                    out.push((a, v));
                }
                i += 1;
                j += 1;
            }
            (Some(a), Some(b)) if a < b => {
                out.push(target[i].clone());
                i += 1;
            }
            (Some(_), None) => {
                out.push(target[i].clone());
                i += 1;
            }
            (_, Some(b)) => {
                out.push((b, -(factor * &source[j].1)));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// In-place reduction to reduced row echelon form. Only columns below
/// `pivot_limit` are eligible as pivots; entries to the right are carried
/// along (used for augmented systems). Returns the pivot columns.
fn reduce_rows(rows: &mut [Row], pivot_limit: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut top = 0;
    while top < rows.len() {
        let mut best: Option<(usize, usize)> = None;
        for (idx, row) in rows.iter().enumerate().skip(top) {
            if let Some(c) = lead(row) {
                if c < pivot_limit && best.is_none_or(|(bc, _)| c < bc) {
                    best = Some((c, idx));
                }
            }
        }
        let Some((col, idx)) = best else { break };
        rows.swap(top, idx);
        let inv = rows[top][0].1.recip();
        if !inv.is_one() {
            for e in rows[top].iter_mut() {
                e.1 = &e.1 * &inv;
            }
        }
        let pivot_row = std::mem::take(&mut rows[top]);
        for row in rows.iter_mut().skip(top + 1) {
            if lead(row) == Some(col) {
                let f = row[0].1.clone();
                *row = axpy(row, &f, &pivot_row);
            }
        }
        rows[top] = pivot_row;
        pivots.push(col);
        top += 1;
    }
    // back substitution
    for (i, &col) in pivots.iter().enumerate().rev() {
        let pivot_row = std::mem::take(&mut rows[i]);
        for row in rows.iter_mut().take(i) {
            if let Some(f) = coeff_at(row, col).cloned() {
                *row = axpy(row, &f, &pivot_row);
            }
        }
        rows[i] = pivot_row;
    }
    pivots
}

/// Reduced row echelon form.
pub fn rref(m: &MatrixQ) -> Rref {
    let mut rows = m.data.clone();
    let pivot_cols = reduce_rows(&mut rows, m.cols);
    // zero rows sink to the bottom in the order they were left
    let (mut nonzero, zero): (Vec<Row>, Vec<Row>) = rows.into_iter().partition(|r| !r.is_empty());
    nonzero.extend(zero);
    Rref {
        rank: pivot_cols.len(),
        pivot_cols,
        reduced: MatrixQ {
            rows: m.rows,
            cols: m.cols,
            data: nonzero,
        },
    }
}

pub fn rank(m: &MatrixQ) -> usize {
    rref(m).rank
}

/// Particular solution of `a x = b` with every free variable set to zero,
/// or `None` when the system is inconsistent.
pub fn solve(a: &MatrixQ, b: &[Q]) -> Result<Option<Vec<Q>>> {
    if a.rows != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.rows,
            found: b.len(),
        });
    }
    let mut rows: Vec<Row> = a
        .data
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            if !bi.is_zero() {
                r.push((a.cols, bi.clone()));
            }
            r
        })
        .collect();
    let pivots = reduce_rows(&mut rows, a.cols + 1);
    if pivots.last() == Some(&a.cols) {
        return Ok(None);
    }
    let mut x = vec![Q::zero(); a.cols];
    for (i, &c) in pivots.iter().enumerate() {
        if let Some(v) = coeff_at(&rows[i], a.cols) {
            x[c] = v.clone();
        }
    }
    Ok(Some(x))
}

/// Basis of the null space: one vector per free column (ascending), with a 1
/// in that column and zeros in the other free columns.
pub fn kernel_basis(a: &MatrixQ) -> Vec<Vec<Q>> {
    let r = rref(a);
    let mut is_pivot = vec![false; a.cols];
    for &c in &r.pivot_cols {
        is_pivot[c] = true;
    }
    (0..a.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Q::zero(); a.cols];
            v[f] = Q::one();
            for (i, &pc) in r.pivot_cols.iter().enumerate() {
                if let Some(e) = coeff_at(&r.reduced.data[i], f) {
                    v[pc] = -e.clone();
                }
            }
            v
        })
        .collect()
}

/// A factored linear system for repeated right-hand sides.
///
/// Stores the row transform `E` with `E a = rref(a)`, so each solve is a
/// sparse product. Solutions agree exactly with [`solve`].
#[derive(Clone, Debug)]
pub struct LinearSystem {
    rows: usize,
    cols: usize,
    pivot_cols: Vec<usize>,
    transform: Vec<Row>,
}

impl LinearSystem {
    pub fn new(a: &MatrixQ) -> Self {
        let mut rows: Vec<Row> = a
            .data
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.push((a.cols + i, Q::one()));
                r
            })
            .collect();
        let pivot_cols = reduce_rows(&mut rows, a.cols);
        let transform = rows
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .filter(|(c, _)| *c >= a.cols)
                    .map(|(c, v)| (c - a.cols, v))
                    .collect()
            })
            .collect();
        LinearSystem {
            rows: a.rows,
            cols: a.cols,
            pivot_cols,
            transform,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }

    pub fn pivot_cols(&self) -> &[usize] {
        &self.pivot_cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn apply_transform(&self, i: usize, b: &SparseVec) -> Q {
        self.transform[i]
            .iter()
            .filter_map(|(j, e)| b.get(j).map(|bj| e * bj))
            .fold(Q::zero(), |acc, v| acc + v)
    }

    /// Sparse right-hand side variant of [`solve`].
    pub fn solve_sparse(&self, b: &SparseVec) -> Result<Option<SparseVec>> {
        if let Some((&last, _)) = b.iter().next_back() {
            if last >= self.rows {
                return Err(Error::DimensionMismatch {
                    expected: self.rows,
                    found: last + 1,
                });
            }
        }
        for i in self.rank()..self.rows {
            if !self.apply_transform(i, b).is_zero() {
                return Ok(None);
            }
        }
        let mut x = SparseVec::new();
        for (i, &c) in self.pivot_cols.iter().enumerate() {
            let v = self.apply_transform(i, b);
            if !v.is_zero() {
                x.insert(c, v);
            }
        }
        Ok(Some(x))
    }

    pub fn solve(&self, b: &[Q]) -> Result<Option<Vec<Q>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: b.len(),
            });
        }
        let sparse: SparseVec = b
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, v.clone()))
            .collect();
        Ok(self.solve_sparse(&sparse)?.map(|x| {
            let mut dense = vec![Q::zero(); self.cols];
            for (c, v) in x {
                dense[c] = v;
            }
            dense
        }))
    }
}

/// Exact Bernoulli numbers `B_0..=B_n` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<Q> {
    let mut b = vec![Q::one()];
    for m in 1..=n {
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = Q::zero();
        let mut binom = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            acc += Q::from_integer(binom.clone()) * bj;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / Q::from_integer(BigInt::from(m + 1)));
    }
    b
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn is_negative(x: &Q) -> bool {
    x.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn qv(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn rref_identity_and_zero() {
        let r = rref(&MatrixQ::identity(2));
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivot_cols, vec![0, 1]);
        let r = rref(&MatrixQ::zeros(3, 3));
        assert_eq!(r.rank, 0);
        assert!(r.pivot_cols.is_empty());
    }

    #[test]
    fn rref_rank_one() {
        let m = MatrixQ::from_i64(&[&[1, 2], &[2, 4]]);
        let r = rref(&m);
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivot_cols, vec![0]);
        assert_eq!(r.reduced.to_dense(), vec![qv(&[1, 2]), qv(&[0, 0])]);
    }

    #[test]
    fn rref_fractional_pivots() {
        let m = MatrixQ::from_i64(&[&[0, 2, 4], &[3, 0, 3], &[3, 2, 7]]);
        let r = rref(&m);
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivot_cols, vec![0, 1]);
        assert_eq!(
            r.reduced.to_dense(),
            vec![qv(&[1, 0, 1]), qv(&[0, 1, 2]), qv(&[0, 0, 0])]
        );
    }

    #[test]
    fn solve_cases() {
        let b = qv(&[3, -5]);
        assert_eq!(solve(&MatrixQ::identity(2), &b).unwrap(), Some(b.clone()));
        let a = MatrixQ::from_i64(&[&[1, 1]]);
        assert_eq!(solve(&a, &qv(&[2])).unwrap(), Some(qv(&[2, 0])));
        let a = MatrixQ::from_i64(&[&[0]]);
        assert_eq!(solve(&a, &qv(&[1])).unwrap(), None);
    }

    #[test]
    fn solve_dimension_mismatch() {
        let a = MatrixQ::from_i64(&[&[1, 1]]);
        assert_eq!(
            solve(&a, &qv(&[1, 2])),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        );
    }

    #[test]
    fn kernel_cases() {
        assert!(kernel_basis(&MatrixQ::identity(3)).is_empty());
        assert_eq!(kernel_basis(&MatrixQ::zeros(1, 3)).len(), 3);
        let k = kernel_basis(&MatrixQ::from_i64(&[&[1, 1]]));
        assert_eq!(k, vec![qv(&[-1, 1])]);
    }

    #[test]
    fn bernoulli() {
        let b = bernoulli_numbers(8);
        assert_eq!(b[1], q_frac(-1, 2));
        assert_eq!(b[2], q_frac(1, 6));
        assert_eq!(b[3], q(0));
        assert_eq!(b[4], q_frac(-1, 30));
        assert_eq!(b[6], q_frac(1, 42));
        assert_eq!(b[8], q_frac(-1, 30));
    }

    #[test]
    fn rational_text() {
        assert_eq!(parse_q("-3/6"), Some(q_frac(-1, 2)));
        assert_eq!(parse_q("7"), Some(q(7)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(parse_q("x"), None);
        assert_eq!(format_q(&q_frac(2, -4)), "-1/2");
        assert_eq!(format_q(&q(5)), "5");
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-3i64..=3, c), r))
    }

    fn to_matrix(rows: &[Vec<i64>]) -> MatrixQ {
        MatrixQ::from_dense(&rows.iter().map(|r| qv(r)).collect::<Vec<_>>())
    }

    proptest! {
        #[test]
        fn rank_plus_nullity(rows in small_matrix()) {
            let m = to_matrix(&rows);
            let kernel = kernel_basis(&m);
            prop_assert_eq!(rank(&m) + kernel.len(), m.cols());
            for v in &kernel {
                prop_assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
            }
        }

        #[test]
        fn rref_is_idempotent(rows in small_matrix()) {
            let r = rref(&to_matrix(&rows));
            let again = rref(&r.reduced);
            prop_assert_eq!(again.reduced, r.reduced.clone());
            prop_assert_eq!(rank(&r.reduced.transpose()), r.rank);
        }

        #[test]
        fn solutions_solve(rows in small_matrix(), x in prop::collection::vec(-4i64..=4, 6)) {
            let m = to_matrix(&rows);
            let x = qv(&x[..m.cols()]);
            let b = m.mul_vec(&x);
            let sol = solve(&m, &b).unwrap().expect("consistent by construction");
            prop_assert_eq!(m.mul_vec(&sol), b.clone());
            let sys = LinearSystem::new(&m);
            prop_assert_eq!(m.mul_vec(&sys.solve(&b).unwrap().unwrap()), b);
        }
    }
}
