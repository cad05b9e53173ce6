//! Dense complex matrices and the elimination kernels everything else is
//! built from.
//!
//! Storage is row-major `Complex64`. Empty shapes (`0×k`, `k×0`) are legal and
//! behave as algebraic zeros, which keeps rank-0 factors uniform.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default relative tolerance for rank and singularity decisions.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Shorthand for a complex scalar.
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting wrong lengths and
    /// non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DataLength {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols.max(1),
                col: k % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows. All rows must share a length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != cols) {
            return Err(Error::DataLength {
                rows: r,
                cols,
                len: bad.len(),
            });
        }
        Self::from_vec(r, cols, rows.iter().flatten().copied().collect())
    }

    /// Real-valued convenience constructor.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| c(x, 0.0)).collect())
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Row-major entries.
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    fn same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.shape() == other.shape() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "add")?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "sub")?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                op: "mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> Self {
        let mut out = self.transpose();
        out.data.iter_mut().for_each(|z| *z = z.conj());
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `self^k` with `self^0 = I`.
    pub fn pow(&self, k: usize) -> Result<Self> {
        let n = self.require_square()?;
        let mut result = Self::identity(n);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// Copies the `nr×nc` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "block out of range");
        let mut out = Self::zeros(nr, nc);
        for i in 0..nr {
            out.data[i * nc..(i + 1) * nc]
                .copy_from_slice(&self.data[(r0 + i) * self.cols + c0..(r0 + i) * self.cols + c0 + nc]);
        }
        out
    }

    /// Assembles `[[tl, tr], [bl, br]]`.
    pub fn from_blocks(tl: &Self, tr: &Self, bl: &Self, br: &Self) -> Result<Self> {
        if tl.rows != tr.rows || bl.rows != br.rows || tl.cols != bl.cols || tr.cols != br.cols {
            return Err(Error::ShapeMismatch {
                op: "from_blocks",
                left: (tl.rows + bl.rows, tl.cols + tr.cols),
                right: (tr.rows + br.rows, bl.cols + br.cols),
            });
        }
        let (rows, cols) = (tl.rows + bl.rows, tl.cols + tr.cols);
        let mut out = Self::zeros(rows, cols);
        for (blk, r0, c0) in [(tl, 0, 0), (tr, 0, tl.cols), (bl, tl.rows, 0), (br, tl.rows, tl.cols)] {
            for i in 0..blk.rows {
                for j in 0..blk.cols {
                    out.data[(r0 + i) * cols + c0 + j] = blk.get(i, j);
                }
            }
        }
        Ok(out)
    }

    /// Splits a `2n×2n` matrix into its four `n×n` blocks.
    pub fn quarters(&self) -> [Self; 4] {
        let n = self.rows / 2;
        assert!(
            self.rows == 2 * n && self.cols == 2 * n,
            "quarters needs an even square matrix"
        );
        [
            self.block(0, 0, n, n),
            self.block(0, n, n, n),
            self.block(n, 0, n, n),
            self.block(n, n, n, n),
        ]
    }

    /// Frobenius distance `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "distance of different shapes");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖self − reference‖ / max(‖reference‖, 1)`.
    pub fn relative_distance(&self, reference: &Self) -> f64 {
        self.distance(reference) / reference.frobenius_norm().max(1.0)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

// Operator forms panic on shape mismatch; the `try_*` methods report it.

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).expect("matrix add")
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).expect("matrix sub")
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix mul")
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(c(-1.0, 0.0))
    }
}

impl Add for Matrix {
    type Output = Matrix;
    fn add(self, rhs: Matrix) -> Matrix {
        &self + &rhs
    }
}

impl Sub for Matrix {
    type Output = Matrix;
    fn sub(self, rhs: Matrix) -> Matrix {
        &self - &rhs
    }
}

impl Mul for Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Matrix) -> Matrix {
        &self * &rhs
    }
}

impl Neg for Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        -&self
    }
}

/// Product of a chain of factors, left to right.
pub fn product(factors: &[&Matrix]) -> Matrix {
    let (first, rest) = factors.split_first().expect("empty product");
    rest.iter().fold((*first).clone(), |acc, f| &acc * f)
}

/// Gaussian elimination with complete pivoting, stopped once the largest
/// remaining entry falls to the cutoff.
///
/// Produces `P·A·Q = L·U` restricted to the leading `rank` pivots.
struct CompletePivotLu {
    /// Working copy; after elimination holds L (strictly below) and U.
    lu: Matrix,
    row_perm: Vec<usize>,
    col_perm: Vec<usize>,
    rank: usize,
    largest_pivot: f64,
}

impl CompletePivotLu {
    fn factor(a: &Matrix, tol: f64, floor: f64) -> Self {
        let (m, n) = a.shape();
        let mut lu = a.clone();
        let mut row_perm: Vec<usize> = (0..m).collect();
        let mut col_perm: Vec<usize> = (0..n).collect();
        let mut rank = 0;
        let mut largest_pivot = 0.0;
        let mut cutoff = 0.0;

        for k in 0..m.min(n) {
            let (mut pi, mut pj, mut best) = (k, k, -1.0);
            for i in k..m {
                for j in k..n {
                    let v = lu.get(i, j).norm();
                    if v > best {
                        best = v;
                        pi = i;
                        pj = j;
                    }
                }
            }
            if k == 0 {
                largest_pivot = best;
                cutoff = tol * best.max(floor);
            }
            if best <= cutoff || best == 0.0 {
                break;
            }
            if pi != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, pi * n + j);
                }
                row_perm.swap(k, pi);
            }
            if pj != k {
                for i in 0..m {
                    lu.data.swap(i * n + k, i * n + pj);
                }
                col_perm.swap(k, pj);
            }
            let pivot = lu.get(k, k);
            for i in k + 1..m {
                let factor = lu.get(i, k) / pivot;
                lu.set(i, k, factor);
                if factor == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let v = lu.get(i, j) - factor * lu.get(k, j);
                    lu.set(i, j, v);
                }
            }
            rank += 1;
        }
        Self {
            lu,
            row_perm,
            col_perm,
            rank,
            largest_pivot,
        }
    }

    /// `P^T·L[:, :r]`, an `m×r` matrix of full column rank.
    fn left(&self) -> Matrix {
        let (m, r) = (self.lu.rows, self.rank);
        let mut out = Matrix::zeros(m, r);
        for (i, &orig) in self.row_perm.iter().enumerate() {
            for j in 0..r.min(i + 1) {
                let v = if i == j { ONE } else { self.lu.get(i, j) };
                out.set(orig, j, v);
            }
        }
        out
    }

    /// `U[:r, :]·Q^T`, an `r×n` matrix of full row rank.
    fn right(&self) -> Matrix {
        let (n, r) = (self.lu.cols, self.rank);
        let mut out = Matrix::zeros(r, n);
        for i in 0..r {
            for (j, &orig) in self.col_perm.iter().enumerate().skip(i) {
                out.set(i, orig, self.lu.get(i, j));
            }
        }
        out
    }
}

/// Full-rank factorization `a ≈ left·right`.
#[derive(Clone, Debug)]
pub struct RankFactorization {
    pub left: Matrix,
    pub right: Matrix,
    pub rank: usize,
    pub tolerance_used: f64,
    /// Largest pivot magnitude, i.e. the largest entry modulus of the input.
    pub largest_pivot: f64,
}

impl RankFactorization {
    pub fn reconstruct(&self) -> Matrix {
        &self.left * &self.right
    }
}

/// Full-rank factorization with the numerical rank decided by pivots above
/// `tol × largest pivot`.
pub fn rank_factorize(a: &Matrix, tol: f64) -> Result<RankFactorization> {
    rank_factorize_with_floor(a, tol, 0.0)
}

/// As [`rank_factorize`], but pivots are compared against
/// `tol × max(largest pivot, floor)`. A positive floor lets a caller treat a
/// matrix that is pure rounding noise relative to some outer scale as zero.
pub fn rank_factorize_with_floor(a: &Matrix, tol: f64, floor: f64) -> Result<RankFactorization> {
    check_tol(tol)?;
    let lu = CompletePivotLu::factor(a, tol, floor);
    Ok(RankFactorization {
        left: lu.left(),
        right: lu.right(),
        rank: lu.rank,
        tolerance_used: tol,
        largest_pivot: lu.largest_pivot,
    })
}

pub fn numerical_rank(a: &Matrix, tol: f64) -> usize {
    CompletePivotLu::factor(a, tol, 0.0).rank
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::BadTolerance(tol))
    }
}

/// Solves `a·x = b` for square `a`. Fails when `a` is singular at
/// [`DEFAULT_TOL`] relative to its largest entry.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    solve_with_tol(a, b, DEFAULT_TOL)
}

pub fn solve_with_tol(a: &Matrix, b: &Matrix, tol: f64) -> Result<Matrix> {
    check_tol(tol)?;
    let n = a.require_square()?;
    if b.rows != n {
        return Err(Error::ShapeMismatch {
            op: "solve",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let lu = CompletePivotLu::factor(a, tol, 0.0);
    if lu.rank < n {
        let pivot = if n == 0 {
            0.0
        } else {
            lu.lu.get(lu.rank, lu.rank).norm()
        };
        return Err(Error::Singular { step: lu.rank, pivot });
    }
    let m = b.cols;
    // y = P b
    let mut y = Matrix::zeros(n, m);
    for (i, &orig) in lu.row_perm.iter().enumerate() {
        for j in 0..m {
            y.set(i, j, b.get(orig, j));
        }
    }
    // forward substitution with unit L
    for i in 0..n {
        for k in 0..i {
            let l = lu.lu.get(i, k);
            if l == ZERO {
                continue;
            }
            for j in 0..m {
                let v = y.get(i, j) - l * y.get(k, j);
                y.set(i, j, v);
            }
        }
    }
    // back substitution with U
    for i in (0..n).rev() {
        for k in i + 1..n {
            let u = lu.lu.get(i, k);
            if u == ZERO {
                continue;
            }
            for j in 0..m {
                let v = y.get(i, j) - u * y.get(k, j);
                y.set(i, j, v);
            }
        }
        let d = lu.lu.get(i, i);
        for j in 0..m {
            let v = y.get(i, j) / d;
            y.set(i, j, v);
        }
    }
    // x = Q y
    let mut x = Matrix::zeros(n, m);
    for (i, &orig) in lu.col_perm.iter().enumerate() {
        for j in 0..m {
            x.set(orig, j, y.get(i, j));
        }
    }
    Ok(x)
}

pub fn invert(a: &Matrix) -> Result<Matrix> {
    let n = a.require_square()?;
    solve(a, &Matrix::identity(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, data: &[f64]) -> Matrix {
        Matrix::from_real(rows, cols, data).unwrap()
    }

    #[test]
    fn add_identities() {
        let z = Matrix::zeros(2, 2);
        assert_eq!(&z + &z, z);
        let a = m(2, 2, &[1.0, -2.0, 3.5, 4.0]);
        assert_eq!(&a + &(-&a), z);
        let s = Matrix::from_vec(1, 1, vec![ONE]).unwrap() + Matrix::from_vec(1, 1, vec![c(0.0, 1.0)]).unwrap();
        assert_eq!(s.get(0, 0), c(1.0, 1.0));
    }

    #[test]
    fn shape_errors() {
        let a = Matrix::zeros(2, 3);
        let b = Matrix::zeros(2, 2);
        assert!(matches!(a.try_add(&b), Err(Error::ShapeMismatch { .. })));
        assert!(matches!(
            b.try_mul(&Matrix::zeros(3, 3)),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(a.pow(2), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(
            Matrix::from_vec(1, 2, vec![ONE, c(f64::NAN, 0.0)]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(Matrix::from_vec(1, 1, vec![c(0.0, f64::INFINITY)]).is_err());
        assert!(Matrix::from_vec(2, 2, vec![ONE]).is_err());
    }

    #[test]
    fn products() {
        let a = m(3, 3, &[1.0, 2.0, 3.0, 0.0, -1.0, 4.0, 2.0, 2.0, 0.5]);
        assert_eq!(&Matrix::identity(3) * &a, a);
        assert_eq!(&a * &Matrix::zeros(3, 3), Matrix::zeros(3, 3));
        let n = m(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(&n * &n, Matrix::zeros(2, 2));
    }

    #[test]
    fn transposes() {
        let i3 = Matrix::identity(3);
        assert_eq!(i3.transpose(), i3);
        let a = Matrix::from_rows(&[vec![c(0.0, 1.0), c(0.0, 1.0)], vec![ZERO, ZERO]]).unwrap();
        let at = Matrix::from_rows(&[vec![c(0.0, 1.0), ZERO], vec![c(0.0, 1.0), ZERO]]).unwrap();
        assert_eq!(a.transpose(), at);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.conj_transpose().get(1, 0), c(0.0, -1.0));
    }

    #[test]
    fn norms() {
        assert_eq!(Matrix::zeros(3, 2).frobenius_norm(), 0.0);
        assert_eq!(Matrix::identity(4).frobenius_norm(), 2.0);
        let a = Matrix::from_rows(&[vec![c(3.0, 0.0), c(0.0, 4.0)]]).unwrap();
        assert_eq!(a.frobenius_norm(), 5.0);
    }

    #[test]
    fn rank_factorization_cases() {
        let z = rank_factorize(&Matrix::zeros(3, 3), 1e-10).unwrap();
        assert_eq!(z.rank, 0);
        assert_eq!(z.left.shape(), (3, 0));
        assert_eq!(z.right.shape(), (0, 3));
        assert_eq!(z.reconstruct(), Matrix::zeros(3, 3));

        assert_eq!(rank_factorize(&Matrix::identity(3), 1e-10).unwrap().rank, 3);

        let a = m(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let f = rank_factorize(&a, 1e-10).unwrap();
        assert_eq!(f.rank, 1);
        assert!(f.reconstruct().distance(&a) <= 1e-12);
        assert!(rank_factorize(&a, 0.0).is_err());
    }

    #[test]
    fn floor_suppresses_noise() {
        let noise = m(2, 2, &[1e-17, 0.0, 0.0, 2e-17]);
        assert_eq!(rank_factorize(&noise, 1e-10).unwrap().rank, 2);
        assert_eq!(rank_factorize_with_floor(&noise, 1e-10, 1.0).unwrap().rank, 0);
    }

    #[test]
    fn inverses() {
        assert_eq!(invert(&Matrix::identity(3)).unwrap(), Matrix::identity(3));
        let d = Matrix::diag(&[c(2.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(invert(&d).unwrap(), Matrix::diag(&[c(0.5, 0.0), c(0.25, 0.0)]));
        assert!(matches!(
            invert(&m(2, 2, &[0.0, 1.0, 0.0, 0.0])),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn powers() {
        let a = m(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(a.pow(0).unwrap(), Matrix::identity(2));
        assert_eq!(a.pow(1).unwrap(), a);
        assert_eq!(a.pow(3).unwrap(), &(&a * &a) * &a);
        let n = m(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(n.pow(2).unwrap(), Matrix::zeros(2, 2));
    }

    #[test]
    fn blocks_round_trip() {
        let a = m(4, 4, &(0..16).map(f64::from).collect::<Vec<_>>());
        let [tl, tr, bl, br] = a.quarters();
        assert_eq!(Matrix::from_blocks(&tl, &tr, &bl, &br).unwrap(), a);
        assert!(Matrix::from_blocks(&tl, &Matrix::zeros(3, 2), &bl, &br).is_err());
    }

    #[test]
    fn empty_shapes_are_zeros() {
        let left = Matrix::zeros(3, 0);
        let right = Matrix::zeros(0, 2);
        assert_eq!(&left * &right, Matrix::zeros(3, 2));
        assert_eq!(Matrix::identity(0).pow(3).unwrap(), Matrix::identity(0));
    }
}

/// Wire form: `{"rows": r, "cols": c, "data": [[[re, im], ...], ...]}`.
#[derive(serde::Serialize, serde::Deserialize)]
struct Wire {
    rows: usize,
    cols: usize,
    data: Vec<Vec<[f64; 2]>>,
}

impl serde::Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let data = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let z = self.get(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        Wire {
            rows: self.rows,
            cols: self.cols,
            data,
        }
        .serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = Wire::deserialize(d)?;
        if w.data.len() != w.rows || w.data.iter().any(|r| r.len() != w.cols) {
            return Err(D::Error::custom(format!(
                "data does not match declared shape {}x{}",
                w.rows, w.cols
            )));
        }
        let data: Vec<C64> = w.data.iter().flatten().map(|p| C64::new(p[0], p[1])).collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(D::Error::custom("non-finite entry"));
        }
        Ok(Matrix {
            rows: w.rows,
            cols: w.cols,
            data,
        })
    }
}
