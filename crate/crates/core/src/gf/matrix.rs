//! Dense row-major matrices over a [`Field`] and Gaussian elimination.
//!
//! Pivoting always takes the first nonzero entry (top-down) of the leftmost
//! remaining column, so elimination output is a pure function of the input.

use std::fmt;

use super::field::{Fe, Field};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Fe>) -> Self {
        assert_eq!(rows * cols, data.len(), "entry count must be rows*cols");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Fe::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Fe(1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Fe>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        Matrix::new(r, c, data)
    }

    /// Matrix whose columns are the given vectors (all of length `n`).
    pub fn from_columns(n: usize, cols: &[Vec<Fe>]) -> Self {
        let mut m = Matrix::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n);
            for (i, &x) in c.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    pub fn from_ints(f: &Field, rows: &[Vec<i64>]) -> Self {
        let r: Vec<Vec<Fe>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| f.from_int(x)).collect())
            .collect();
        Matrix::from_rows(&r)
    }

    pub fn diagonal(entries: &[Fe]) -> Self {
        let mut m = Matrix::zeros(entries.len(), entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Fe] {
        &self.data
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [Fe] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Fe> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Fe>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn mul(&self, f: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                axpy(f, dst, src, a);
            }
        }
        out
    }

    pub fn mul_vec(&self, f: &Field, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Fe::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    pub fn add(&self, f: &Field, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Matrix::new(self.rows, self.cols, data)
    }

    pub fn sub(&self, f: &Field, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Matrix::new(self.rows, self.cols, data)
    }

    pub fn scale(&self, f: &Field, c: Fe) -> Matrix {
        let data = self.data.iter().map(|&a| f.mul(a, c)).collect();
        Matrix::new(self.rows, self.cols, data)
    }

    pub fn map(&self, op: impl Fn(Fe) -> Fe) -> Matrix {
        Matrix::new(self.rows, self.cols, self.data.iter().map(|&a| op(a)).collect())
    }

    pub fn pow(&self, f: &Field, mut e: u64) -> Matrix {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(f, &base);
            }
        }
        acc
    }

    pub fn inverse(&self, f: &Field) -> Option<Matrix> {
        assert!(self.is_square());
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(n));
        let ech = rref(f, &aug);
        if ech.pivots.len() < n || ech.pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for r in 0..n {
            inv.row_mut(r).copy_from_slice(&ech.matrix.row(r)[n..]);
        }
        Some(inv)
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Matrix::new(self.rows, cols, data)
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix::new(self.rows + other.rows, self.cols, data)
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m[(r, c)] = self[(r, c)];
            }
        }
        for r in 0..other.rows {
            for c in 0..other.cols {
                m[(self.rows + r, self.cols + c)] = other[(r, c)];
            }
        }
        m
    }

    /// Kronecker product.
    pub fn kron(&self, f: &Field, other: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m[(i * other.rows + k, j * other.cols + l)] = f.mul(a, other[(k, l)]);
                    }
                }
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        Matrix::new(idx.len(), self.cols, data)
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                m[(r, j)] = self[(r, c)];
            }
        }
        m
    }

    /// Row-major flattening.
    pub fn flatten(&self) -> Vec<Fe> {
        self.data.clone()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Fe;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Fe {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Fe {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// `dst += a * src`.
#[inline]
pub fn axpy(f: &Field, dst: &mut [Fe], src: &[Fe], a: Fe) {
    if a.is_zero() {
        return;
    }
    if f.m() == 1 {
        let p = f.p() as u64;
        let a = a.0 as u64;
        for (d, s) in dst.iter_mut().zip(src) {
            if s.0 != 0 {
                d.0 = ((d.0 as u64 + a * s.0 as u64) % p) as u32;
            }
        }
    } else {
        for (d, s) in dst.iter_mut().zip(src) {
            if s.0 != 0 {
                *d = f.add(*d, f.mul(a, *s));
            }
        }
    }
}

/// Reduced row echelon form with pivot columns in increasing order.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

pub fn rref(f: &Field, m: &Matrix) -> Echelon {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let (rows, cols) = (a.rows, a.cols);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        if pr != r {
            for k in 0..cols {
                a.data.swap(pr * cols + k, r * cols + k);
            }
        }
        let inv = f.inv(a[(r, c)]).unwrap();
        for k in c..cols {
            a[(r, k)] = f.mul(a[(r, k)], inv);
        }
        let pivot_row: Vec<Fe> = a.row(r)[c..].to_vec();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = a[(i, c)];
            if factor.is_zero() {
                continue;
            }
            let neg = f.neg(factor);
            let row = &mut a.data[i * cols + c..(i + 1) * cols];
            axpy(f, row, &pivot_row, neg);
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { matrix: a, pivots }
}

pub fn rank(f: &Field, m: &Matrix) -> usize {
    rref(f, m).pivots.len()
}

/// Columns span `{v : m v = 0}`; one column per free variable, in order.
pub fn kernel(f: &Field, m: &Matrix) -> Matrix {
    let ech = rref(f, m);
    kernel_from_echelon(f, &ech, m.cols)
}

fn kernel_from_echelon(f: &Field, ech: &Echelon, cols: usize) -> Matrix {
    let mut is_pivot = vec![false; cols];
    for &c in &ech.pivots {
        is_pivot[c] = true;
    }
    let free: Vec<usize> = (0..cols).filter(|&c| !is_pivot[c]).collect();
    let mut k = Matrix::zeros(cols, free.len());
    for (j, &fc) in free.iter().enumerate() {
        k[(fc, j)] = f.one();
        for (r, &pc) in ech.pivots.iter().enumerate() {
            k[(pc, j)] = f.neg(ech.matrix[(r, fc)]);
        }
    }
    k
}

/// Outcome of [`rank_kernel_solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    NotRequested,
    NoSolution,
    Found(Matrix),
}

#[derive(Clone, Debug)]
pub struct RankKernelSolve {
    pub rank: usize,
    pub kernel: Matrix,
    pub solution: Solution,
}

/// Rank, kernel basis, and (optionally) one solution of `m X = rhs`.
pub fn rank_kernel_solve(f: &Field, m: &Matrix, rhs: Option<&Matrix>) -> RankKernelSolve {
    let ech = rref(f, m);
    let kernel = kernel_from_echelon(f, &ech, m.cols);
    let solution = match rhs {
        None => Solution::NotRequested,
        Some(b) => match solve(f, m, b) {
            Some(x) => Solution::Found(x),
            None => Solution::NoSolution,
        },
    };
    RankKernelSolve {
        rank: ech.pivots.len(),
        kernel,
        solution,
    }
}

/// One solution of `m X = rhs`, or `None` when the system is inconsistent.
pub fn solve(f: &Field, m: &Matrix, rhs: &Matrix) -> Option<Matrix> {
    assert_eq!(m.rows, rhs.rows, "rhs row count must match");
    let n = m.cols;
    let aug = m.hstack(rhs);
    let ech = rref(f, &aug);
    if ech.pivots.iter().any(|&c| c >= n) {
        return None;
    }
    let mut x = Matrix::zeros(n, rhs.cols);
    for (r, &pc) in ech.pivots.iter().enumerate() {
        for j in 0..rhs.cols {
            x[(pc, j)] = ech.matrix[(r, n + j)];
        }
    }
    Some(x)
}

/// Echelonized basis (as rows) of the span of the given vectors.
pub fn span_basis(f: &Field, n: usize, vectors: &[Vec<Fe>]) -> Vec<Vec<Fe>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_rows(vectors);
    debug_assert_eq!(m.cols, n);
    let ech = rref(f, &m);
    (0..ech.pivots.len())
        .map(|r| ech.matrix.row(r).to_vec())
        .collect()
}

/// Indices of a maximal linearly independent prefix-greedy subset.
pub fn independent_subset(f: &Field, vectors: &[Vec<Fe>]) -> Vec<usize> {
    if vectors.is_empty() {
        return Vec::new();
    }
    // Column pivots of the matrix with the vectors as columns.
    let n = vectors[0].len();
    let m = Matrix::from_columns(n, vectors);
    rref(f, &m).pivots
}

/// Coordinates with respect to a fixed full-column-rank basis, computed from a
/// precomputed left inverse.
#[derive(Clone, Debug)]
pub struct CoordSolver {
    basis: Matrix,
    rows: Vec<usize>,
    left_inv: Matrix,
}

impl CoordSolver {
    /// `basis` holds the basis vectors as columns. Returns `None` if they are
    /// dependent.
    pub fn new(f: &Field, basis: Matrix) -> Option<CoordSolver> {
        let k = basis.cols;
        if k == 0 {
            return Some(CoordSolver {
                basis,
                rows: Vec::new(),
                left_inv: Matrix::zeros(0, 0),
            });
        }
        let rows = rref(f, &basis.transpose()).pivots;
        if rows.len() < k {
            return None;
        }
        let square = basis.select_rows(&rows);
        let left_inv = square.inverse(f)?;
        Some(CoordSolver {
            basis,
            rows,
            left_inv,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.cols
    }

    /// Coordinates of `v`, assuming `v` lies in the span.
    pub fn coords_unchecked(&self, f: &Field, v: &[Fe]) -> Vec<Fe> {
        let sel: Vec<Fe> = self.rows.iter().map(|&r| v[r]).collect();
        self.left_inv.mul_vec(f, &sel)
    }

    /// Coordinates of `v`, or `None` if it is outside the span.
    pub fn coords(&self, f: &Field, v: &[Fe]) -> Option<Vec<Fe>> {
        let c = self.coords_unchecked(f, v);
        let back = self.basis.mul_vec(f, &c);
        (back == v).then_some(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_full_rank() {
        let f = Field::prime(2).unwrap();
        let r = rank_kernel_solve(&f, &Matrix::identity(3), None);
        assert_eq!(r.rank, 3);
        assert_eq!(r.kernel.cols(), 0);
    }

    #[test]
    fn equal_rows_kernel() {
        let f = Field::prime(2).unwrap();
        let m = Matrix::from_ints(&f, &[vec![1, 1], vec![1, 1]]);
        let r = rank_kernel_solve(&f, &m, None);
        assert_eq!(r.rank, 1);
        assert_eq!(r.kernel.columns(), vec![vec![Fe(1), Fe(1)]]);
    }

    #[test]
    fn nilpotent_kernel() {
        let f = Field::prime(3).unwrap();
        let m = Matrix::from_ints(&f, &[vec![0, 1], vec![0, 0]]);
        let k = kernel(&f, &m);
        assert_eq!(k.columns(), vec![vec![Fe(1), Fe(0)]]);
    }

    #[test]
    fn inconsistent_system_is_flagged() {
        let f = Field::prime(3).unwrap();
        let m = Matrix::from_ints(&f, &[vec![1, 1], vec![1, 1]]);
        let b = Matrix::from_ints(&f, &[vec![1], vec![2]]);
        let r = rank_kernel_solve(&f, &m, Some(&b));
        assert_eq!(r.solution, Solution::NoSolution);
        let b = Matrix::from_ints(&f, &[vec![2], vec![2]]);
        match rank_kernel_solve(&f, &m, Some(&b)).solution {
            Solution::Found(x) => assert_eq!(m.mul(&f, &x), b),
            other => panic!("expected solution, got {other:?}"),
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let f = Field::prime(5).unwrap();
        let m = Matrix::from_ints(&f, &[vec![1, 2], vec![3, 4]]);
        let inv = m.inverse(&f).unwrap();
        assert_eq!(m.mul(&f, &inv), Matrix::identity(2));
        let sing = Matrix::from_ints(&f, &[vec![1, 2], vec![2, 4]]);
        assert!(sing.inverse(&f).is_none());
    }

    #[test]
    fn coord_solver() {
        let f = Field::prime(3).unwrap();
        let basis = Matrix::from_ints(&f, &[vec![1, 0], vec![1, 1], vec![0, 2]]);
        let cs = CoordSolver::new(&f, basis).unwrap();
        let v = vec![Fe(2), Fe(0), Fe(2)];
        assert_eq!(cs.coords(&f, &v), Some(vec![Fe(2), Fe(1)]));
        assert_eq!(cs.coords(&f, &[Fe(1), Fe(0), Fe(0)]), None);
    }
}
