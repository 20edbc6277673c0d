//! Dense exact linear algebra over the rationals.
//!
//! The rational routines are the reference path. [`IntegerEchelon`] is a
//! fraction-free incremental row reduction over `i128` that reports overflow
//! instead of wrapping; callers fall back to the rational path when it does.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{FenceError, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(FenceError::DimensionMismatch {
                expected: cols,
                got: bad.len(),
            });
        }
        let nrows = rows.len();
        Ok(RatMatrix {
            rows: nrows,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Rational>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(FenceError::DimensionMismatch {
                expected: rows,
                got: bad.len(),
            });
        }
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rat(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.cols {
            return Err(FenceError::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// Reduced row echelon form and pivot columns. Pivots are the first
    /// nonzero entry in column order.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                if !m[(r, j)].is_zero() {
                    let v = &m[(r, j)] * &inv;
                    m[(r, j)] = v;
                }
            }
            let pivot_row: Vec<(usize, Rational)> = (c..m.cols)
                .filter(|&j| !m[(r, j)].is_zero())
                .map(|j| (j, m[(r, j)].clone()))
                .collect();
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for (j, v) in &pivot_row {
                    let updated = &m[(i, *j)] - &factor * v;
                    m[(i, *j)] = updated;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

pub fn rank(m: &RatMatrix) -> usize {
    m.rref().1.len()
}

/// One solution of `M x = b` with free variables set to zero, or `None`
/// when the system is inconsistent.
pub fn solve(m: &RatMatrix, b: &[Rational]) -> Result<Option<Vec<Rational>>> {
    if b.len() != m.rows {
        return Err(FenceError::DimensionMismatch {
            expected: m.rows,
            got: b.len(),
        });
    }
    let mut aug = RatMatrix::zeros(m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, m.cols)] = b[i].clone();
    }
    let (r, pivots) = aug.rref();
    if pivots.last() == Some(&m.cols) {
        return Ok(None);
    }
    let mut x = vec![Rational::zero(); m.cols];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = r[(row, m.cols)].clone();
    }
    Ok(Some(x))
}

pub fn nullspace_basis(m: &RatMatrix) -> Vec<Vec<Rational>> {
    let (r, pivots) = m.rref();
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); m.cols];
            v[f] = Rational::one();
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = -r[(row, f)].clone();
            }
            v
        })
        .collect()
}

fn check_ambient(u: &[Vec<Rational>], w: &[Vec<Rational>]) -> Result<usize> {
    let dim = u.iter().chain(w).map(Vec::len).next().unwrap_or(0);
    if let Some(bad) = u.iter().chain(w).find(|v| v.len() != dim) {
        return Err(FenceError::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    Ok(dim)
}

fn span_rank(vectors: &[Vec<Rational>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    rank(&RatMatrix::from_rows(vectors.to_vec()).expect("checked lengths"))
}

/// `dim(U ∩ W) = dim U + dim W − dim(U + W)` for spanning sets of U and W.
pub fn subspace_intersection_dim(u: &[Vec<Rational>], w: &[Vec<Rational>]) -> Result<usize> {
    check_ambient(u, w)?;
    let both: Vec<Vec<Rational>> = u.iter().chain(w).cloned().collect();
    Ok(span_rank(u) + span_rank(w) - span_rank(&both))
}

/// Same dimension computed from the kernel of `[U | −W]`: every kernel
/// vector `(a, b)` yields `U a ∈ U ∩ W`, and these images span the
/// intersection.
pub fn subspace_intersection_dim_via_kernel(
    u: &[Vec<Rational>],
    w: &[Vec<Rational>],
) -> Result<usize> {
    let dim = check_ambient(u, w)?;
    if u.is_empty() || w.is_empty() {
        return Ok(0);
    }
    let mut cols: Vec<Vec<Rational>> = u.to_vec();
    cols.extend(w.iter().map(|v| v.iter().map(|x| -x.clone()).collect()));
    let m = RatMatrix::from_columns(&cols)?;
    let images: Vec<Vec<Rational>> = nullspace_basis(&m)
        .into_iter()
        .map(|kv| {
            (0..dim)
                .map(|i| {
                    u.iter()
                        .zip(&kv)
                        .fold(Rational::zero(), |acc, (vec, a)| acc + &vec[i] * a)
                })
                .collect()
        })
        .collect();
    Ok(span_rank(&images))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overflow;

/// Incremental fraction-free row echelon form over `i128`.
#[derive(Debug, Clone)]
pub struct IntegerEchelon {
    width: usize,
    rows: Vec<(usize, Vec<i128>)>,
}

impl IntegerEchelon {
    pub fn new(width: usize) -> Self {
        IntegerEchelon {
            width,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.width
    }

    /// Adds a row; returns whether it increased the rank.
    pub fn insert(&mut self, row: &[i64]) -> Result<bool, Overflow> {
        debug_assert_eq!(row.len(), self.width);
        let mut v: Vec<i128> = row.iter().map(|&x| x as i128).collect();
        for (pivot, basis) in &self.rows {
            let a = v[*pivot];
            if a == 0 {
                continue;
            }
            let b = basis[*pivot];
            let g = a.gcd(&b);
            let (fa, fb) = (b / g, a / g);
            for (x, y) in v.iter_mut().zip(basis) {
                let lhs = x.checked_mul(fa).ok_or(Overflow)?;
                let rhs = y.checked_mul(fb).ok_or(Overflow)?;
                *x = lhs.checked_sub(rhs).ok_or(Overflow)?;
            }
            normalize(&mut v);
        }
        let Some(pivot) = v.iter().position(|&x| x != 0) else {
            return Ok(false);
        };
        if v[pivot] < 0 {
            for x in &mut v {
                *x = -*x;
            }
        }
        let at = self.rows.partition_point(|(p, _)| *p < pivot);
        self.rows.insert(at, (pivot, v));
        Ok(true)
    }
}

fn normalize(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

/// Exact rank of an integer matrix given by rows.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let mut ech = IntegerEchelon::new(width);
    for row in rows {
        match ech.insert(row) {
            Ok(_) if ech.is_full() => return ech.rank(),
            Ok(_) => {}
            Err(Overflow) => {
                return rank(&RatMatrix::from_int_rows(rows).expect("rectangular rows"));
            }
        }
    }
    ech.rank()
}

/// Rank of the rows restricted to the selected columns.
pub fn integer_rank_of_columns(rows: &[Vec<i64>], columns: &[usize]) -> usize {
    let picked: Vec<Vec<i64>> = rows
        .iter()
        .map(|r| columns.iter().map(|&c| r[c]).collect())
        .collect();
    integer_rank(&picked)
}

pub fn to_i64(q: &Rational) -> Option<i64> {
    use num_traits::ToPrimitive;
    q.is_integer().then(|| q.to_integer().to_i64()).flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_int_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_rank() {
        assert_eq!(rank(&RatMatrix::identity(3)), 3);
    }

    #[test]
    fn inconsistent_system() {
        let a = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve(&a, &[rat(1), rat(3)]).unwrap(), None);
        assert!(solve(&a, &[rat(1)]).is_err());
    }

    #[test]
    fn particular_solution_zeroes_free_variables() {
        let a = m(&[&[1, 2, 3]]);
        let x = solve(&a, &[rat(6)]).unwrap().unwrap();
        assert_eq!(x, vec![rat(6), rat(0), rat(0)]);
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace_basis(&a);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(a.mul_vec(v).unwrap().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn ragged_rows_rejected() {
        let rows = vec![vec![rat(1)], vec![rat(1), rat(2)]];
        assert!(matches!(
            RatMatrix::from_rows(rows),
            Err(FenceError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn integer_rank_overflow_falls_back() {
        let big = i64::MAX / 3;
        let rows = vec![vec![big, big - 1, 7], vec![big - 5, big, 11], vec![3, big, big - 2]];
        assert_eq!(integer_rank(&rows), rank(&RatMatrix::from_int_rows(&rows).unwrap()));
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(-3i64..=3, c), r)
        })
    }

    proptest! {
        #[test]
        fn rank_is_transpose_invariant(rows in small_matrix()) {
            let a = RatMatrix::from_int_rows(&rows).unwrap();
            prop_assert_eq!(rank(&a), rank(&a.transpose()));
            prop_assert_eq!(rank(&a), integer_rank(&rows));
        }

        #[test]
        fn solutions_satisfy_system(rows in small_matrix(), seed in prop::collection::vec(-4i64..=4, 6)) {
            let a = RatMatrix::from_int_rows(&rows).unwrap();
            let b: Vec<Rational> = (0..a.rows()).map(|i| rat(seed[i])).collect();
            if let Some(x) = solve(&a, &b).unwrap() {
                prop_assert_eq!(a.mul_vec(&x).unwrap(), b);
            }
        }

        #[test]
        fn intersection_dim_two_ways(
            u in prop::collection::vec(prop::collection::vec(-2i64..=2, 5), 0..4),
            w in prop::collection::vec(prop::collection::vec(-2i64..=2, 5), 0..4),
        ) {
            let conv = |vs: &[Vec<i64>]| vs.iter().map(|v| v.iter().map(|&x| ratio(x, 2)).collect()).collect::<Vec<Vec<Rational>>>();
            let (u, w) = (conv(&u), conv(&w));
            prop_assert_eq!(
                subspace_intersection_dim(&u, &w).unwrap(),
                subspace_intersection_dim_via_kernel(&u, &w).unwrap()
            );
        }
    }
}
