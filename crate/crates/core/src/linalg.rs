//! Dense complex linear algebra kernel.
//!
//! Everything here works on small dense matrices (n up to a few hundred):
//! a cyclic Jacobi eigensolver for Hermitian matrices, a one-sided Jacobi
//! singular value routine, spectral powers of SPD matrices and an LU solver.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Sweep budget for the Jacobi iterations.
pub const MAX_SWEEPS: usize = 100;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {}x{} matrix, found {}",
                rows * cols,
                rows,
                cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

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
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Result<Self> {
        if let Some(bad) = columns.iter().position(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch(format!(
                "column {bad} has length {}, expected {rows}",
                columns[bad].len()
            )));
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
    }

    /// A single row vector (1 x n).
    pub fn row_vector(v: &[C64]) -> Self {
        Self {
            rows: 1,
            cols: v.len(),
            data: v.to_vec(),
        }
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "vector length must equal column count");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Computes `self* x` without forming the adjoint.
    pub fn adjoint_mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.rows, "vector length must equal row count");
        let mut out = vec![ZERO; self.cols];
        for (i, xi) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * xi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Computes `self* · other`.
    pub fn adjoint_matmul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "row counts must agree");
        let mut out = Self::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let arow = self.row(k);
            let brow = other.row(k);
            for (i, a) in arow.iter().enumerate() {
                let a = a.conj();
                if a == ZERO {
                    continue;
                }
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(brow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack<'a>(cols: usize, blocks: impl IntoIterator<Item = &'a ComplexMatrix>) -> Self {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack blocks must share a column count");
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Self { rows, cols, data }
    }

    /// Rows `start..start+count` as a new matrix.
    pub fn row_block(&self, start: usize, count: usize) -> Self {
        Self {
            rows: count,
            cols: self.cols,
            data: self.data[start * self.cols..(start + count) * self.cols].to_vec(),
        }
    }

    /// Frobenius norm of `self - self*`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Averages `self` with its adjoint.
    pub fn hermitian_part(&self) -> Self {
        let n = self.rows;
        Self::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shapes must agree");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shapes must agree");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl std::ops::AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.shape(), rhs.shape(), "shapes must agree");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

// Vector helpers. Inner products are linear in the first argument.

pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm_sqr(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(x: &[C64]) -> f64 {
    norm_sqr(x).sqrt()
}

pub fn sub_vec(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn add_vec(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn scale_vec(x: &[C64], c: C64) -> Vec<C64> {
    x.iter().map(|a| a * c).collect()
}

/// Spectral decomposition `M = V diag(λ) V*` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

impl HermEig {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `V diag(f(λ)) V*`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += a * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|x| x)
    }
}

/// Applies the unitary plane rotation `[[c, s e^{iφ}], [-s e^{-iφ}, c]]` that
/// annihilates the (p, q) entry of the 2x2 Hermitian matrix `[[app, apq], [conj(apq), aqq]]`.
/// Returns (c, s·e^{iφ}).
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> (f64, C64) {
    let mag = apq.norm();
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.0
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    (c, phase * s)
}

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
pub fn herm_eig(m: &ComplexMatrix) -> Result<HermEig> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let scale = m.frobenius_norm().max(1.0);
    let defect = m.hermitian_defect();
    if defect > 1e-12 * scale {
        return Err(Error::NotHermitian { asymmetry: defect });
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n);
    let fro = a.frobenius_norm();

    let off = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[(i, j)].norm_sqr();
            }
        }
        (2.0 * s).sqrt()
    };

    let mut converged = n <= 1 || fro == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let (c, se) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                let sc = se.conj();
                // A <- A U on columns p, q
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * sc;
                    a[(k, q)] = akp * se + akq * c;
                }
                // A <- U* A on rows p, q
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * se;
                    a[(q, k)] = apk * sc + aqk * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * sc;
                    v[(k, q)] = vkp * se + vkq * c;
                }
            }
        }
        let o = off(&a);
        converged = o == 0.0 || o <= 1e-15 * fro;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Exponents supported by [`spd_power`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpdPower {
    Inverse,
    Sqrt,
    InvSqrt,
}

impl SpdPower {
    fn apply(self, x: f64) -> f64 {
        match self {
            SpdPower::Inverse => 1.0 / x,
            SpdPower::Sqrt => x.sqrt(),
            SpdPower::InvSqrt => 1.0 / x.sqrt(),
        }
    }
}

/// `V diag(λ^p) V*` for a Hermitian positive definite matrix.
///
/// `rank_tol` is relative to the largest eigenvalue.
pub fn spd_power(m: &ComplexMatrix, p: SpdPower, rank_tol: f64) -> Result<ComplexMatrix> {
    let eig = herm_eig(m)?;
    spd_power_from_eig(&eig, p, rank_tol)
}

pub fn spd_power_from_eig(eig: &HermEig, p: SpdPower, rank_tol: f64) -> Result<ComplexMatrix> {
    let lmin = eig.min();
    if eig.eigenvalues.is_empty() {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    if lmin <= rank_tol * eig.max().abs() || lmin <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: lmin,
        });
    }
    Ok(eig.apply_fn(|x| p.apply(x)))
}

/// Singular values in descending order, by one-sided Jacobi.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    // Work on the orientation with fewer columns.
    let mut a = if m.rows >= m.cols {
        m.clone()
    } else {
        m.adjoint()
    };
    let (rows, cols) = a.shape();
    if cols == 0 {
        return Vec::new();
    }
    let col_dot = |a: &ComplexMatrix, p: usize, q: usize| -> C64 {
        (0..rows).map(|k| a[(k, p)].conj() * a[(k, q)]).sum()
    };
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = col_dot(&a, p, p).re;
                let beta = col_dot(&a, q, q).re;
                let gamma = col_dot(&a, p, q);
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let (c, se) = jacobi_rotation(alpha, beta, gamma);
                let sc = se.conj();
                for k in 0..rows {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * sc;
                    a[(k, q)] = akp * se + akq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..cols).map(|j| col_dot(&a, j, j).re.sqrt()).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Number of singular values above `tol · σ_max`.
pub fn numerical_rank(m: &ComplexMatrix, tol: f64) -> usize {
    let sv = singular_values(m);
    let Some(&smax) = sv.first() else {
        return 0;
    };
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * smax).count()
}

/// Solves `A X = B` by LU factorization with partial pivoting.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || a.rows != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot solve {}x{} system with {}x{} right-hand side",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let n = a.rows;
    let mut lu = a.clone();
    let mut x = b.clone();
    let scale = a.max_abs();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm()))
            .expect("non-empty pivot range");
        if lu[(piv, k)].norm() <= f64::EPSILON * scale * n as f64 || scale == 0.0 {
            return Err(Error::Singular);
        }
        if piv != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            for j in 0..x.cols {
                let t = x[(k, j)];
                x[(k, j)] = x[(piv, j)];
                x[(piv, j)] = t;
            }
        }
        let d = lu[(k, k)];
        for i in (k + 1)..n {
            let f = lu[(i, k)] / d;
            if f == ZERO {
                continue;
            }
            for j in k..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= f * u;
            }
            for j in 0..x.cols {
                let u = x[(k, j)];
                x[(i, j)] -= f * u;
            }
        }
    }
    for j in 0..x.cols {
        for i in (0..n).rev() {
            let mut s = x[(i, j)];
            for k in (i + 1)..n {
                s -= lu[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = s / lu[(i, i)];
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(r, c, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        random_matrix(rng, n, n).hermitian_part()
    }

    fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let a = random_matrix(rng, n, n);
        &a.adjoint_matmul(&a) + &ComplexMatrix::identity(n).scale_real(0.1)
    }

    fn rel_err(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        (a - b).frobenius_norm() / b.frobenius_norm().max(1.0)
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let e = herm_eig(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0, 1.0]);
        let e = herm_eig(&ComplexMatrix::from_real_diag(&[1.0, 2.0, 1.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0, 2.0]);
    }

    #[test]
    fn eig_random_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1, 2, 5, 8, 16] {
            let m = random_hermitian(&mut rng, n);
            let e = herm_eig(&m).unwrap();
            let scale = m.frobenius_norm().max(1.0);
            assert!((&e.reconstruct() - &m).frobenius_norm() <= 1e-10 * scale);
            let v = &e.eigenvectors;
            let mv = m.matmul(v);
            let vl = v.matmul(&ComplexMatrix::from_real_diag(&e.eigenvalues));
            assert!((&mv - &vl).frobenius_norm() <= 1e-10 * scale);
            let vv = v.adjoint_matmul(v);
            assert!((&vv - &ComplexMatrix::identity(n)).frobenius_norm() <= 1e-10);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            let tr = m.trace().re;
            let sum: f64 = e.eigenvalues.iter().sum();
            assert!((tr - sum).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian { .. })));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(herm_eig(&r), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn eig_unitary_conjugation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = random_hermitian(&mut rng, 7);
        let q = herm_eig(&random_hermitian(&mut rng, 7)).unwrap().eigenvectors;
        let conj = q.matmul(&m).matmul(&q.adjoint());
        let a = herm_eig(&m).unwrap().eigenvalues;
        let b = herm_eig(&conj.hermitian_part()).unwrap().eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn spd_power_examples() {
        let i = ComplexMatrix::identity(3);
        assert!(rel_err(&spd_power(&i, SpdPower::Inverse, 1e-10).unwrap(), &i) < 1e-15);
        let d = ComplexMatrix::from_real_diag(&[4.0, 9.0]);
        let r = spd_power(&d, SpdPower::Sqrt, 1e-10).unwrap();
        assert!(rel_err(&r, &ComplexMatrix::from_real_diag(&[2.0, 3.0])) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_spd(&mut rng, 6);
        let r = spd_power(&m, SpdPower::InvSqrt, 1e-10).unwrap();
        let prod = r.matmul(&r).matmul(&m);
        assert!(rel_err(&prod, &ComplexMatrix::identity(6)) <= 1e-9);
    }

    #[test]
    fn spd_sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=16 {
            let m = random_spd(&mut rng, n);
            let r = spd_power(&m, SpdPower::Sqrt, 1e-10).unwrap();
            assert!(rel_err(&r.matmul(&r), &m) <= 1e-10, "n = {n}");
        }
    }

    #[test]
    fn spd_power_rejects_singular() {
        let d = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        assert!(matches!(
            spd_power(&d, SpdPower::Inverse, 1e-10),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&ComplexMatrix::zeros(3, 4), 1e-10), 0);
        assert_eq!(numerical_rank(&ComplexMatrix::identity(5), 1e-10), 5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_matrix(&mut rng, 6, 1);
        let v = random_matrix(&mut rng, 1, 4);
        assert_eq!(numerical_rank(&u.matmul(&v), 1e-10), 1);
        let a = random_matrix(&mut rng, 7, 3);
        let b = random_matrix(&mut rng, 3, 9);
        assert_eq!(numerical_rank(&a.matmul(&b), 1e-10), 3);
    }

    #[test]
    fn singular_values_match_eigenvalues_of_gram() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_matrix(&mut rng, 5, 3);
        let sv = singular_values(&a);
        let e = herm_eig(&a.adjoint_matmul(&a)).unwrap();
        for (s, l) in sv.iter().zip(e.eigenvalues.iter().rev()) {
            assert!((s * s - l).abs() <= 1e-12 * e.max());
        }
        assert_eq!(singular_values(&a.adjoint()).len(), 3);
    }

    #[test]
    fn lu_solve_recovers_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 8, 8);
        let x = random_matrix(&mut rng, 8, 2);
        let b = a.matmul(&x);
        let got = solve(&a, &b).unwrap();
        assert!(rel_err(&got, &x) < 1e-10);
        assert_eq!(solve(&ComplexMatrix::zeros(2, 2), &ComplexMatrix::zeros(2, 1)), Err(Error::Singular));
    }

    #[test]
    fn constructor_validates() {
        assert!(ComplexMatrix::new(2, 2, vec![ZERO; 3]).is_err());
        let bad = vec![ZERO, C64::new(f64::NAN, 0.0)];
        assert_eq!(ComplexMatrix::new(1, 2, bad), Err(Error::NonFinite { row: 0, col: 1 }));
    }
}
