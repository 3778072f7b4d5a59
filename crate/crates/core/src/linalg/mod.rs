//! Dense complex linear algebra: matrices, QR, Hessenberg reduction,
//! Schur decomposition via shifted QR, triangular eigenvectors, LU and
//! Cholesky solves. Everything operates on plain row-major buffers of
//! `Complex64`; no external linear algebra backend.

mod qr;
mod schur;
mod solve;

pub use qr::{hessenberg, qr};
pub use schur::{schur, schur_with, triangular_eigenvectors, SchurForm};
pub use solve::{cholesky, inverse, solve};

use num_complex::Complex64;

use crate::{Error, Result};

/// Dense rectangular complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} shape does not hold {} entries",
                data.len()
            )));
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(rows * cols, data.len());
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![Complex64::ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_raw(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    fn ix(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.rows && j < self.cols);
        i * self.cols + j
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Plain transpose, no conjugation.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                let lhs_row = i * rhs.cols;
                let rhs_row = k * rhs.cols;
                for j in 0..rhs.cols {
                    out.data[lhs_row + j] += a * rhs.data[rhs_row + j];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Self::from_raw(self.rows, self.cols, data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value estimated by power iteration on A*A.
    /// Deterministic start vector; converges from below.
    pub fn spectral_norm_est(&self, iters: usize) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let mut v = vec![Complex64::new(1.0 / (self.cols as f64).sqrt(), 0.0); self.cols];
        let adj = self.adjoint();
        let mut sigma = 0.0;
        for _ in 0..iters {
            let w = self.mul_vec(&v);
            sigma = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if sigma == 0.0 {
                return 0.0;
            }
            let mut z = adj.mul_vec(&w);
            let zn = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if zn == 0.0 {
                return sigma;
            }
            for c in &mut z {
                *c /= zn;
            }
            v = z;
        }
        sigma
    }

    /// ‖U*U − I‖_F, the departure from unitarity.
    pub fn unitarity_residual(&self) -> f64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                // (U*U)[i][j] = sum_k conj(U[k][i]) U[k][j]
                let mut s = Complex64::ZERO;
                for k in 0..n {
                    s += self[(k, i)].conj() * self[(k, j)];
                }
                if i == j {
                    s -= Complex64::ONE;
                }
                sum += s.norm_sqr();
            }
        }
        sum.sqrt()
    }

    pub fn is_upper_triangular(&self) -> bool {
        for i in 1..self.rows {
            for j in 0..i.min(self.cols) {
                if self[(i, j)] != Complex64::ZERO {
                    return false;
                }
            }
        }
        true
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[self.ix(i, j)]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        let k = self.ix(i, j);
        &mut self.data[k]
    }
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self[(i, j)];
                write!(f, "{:>9.3e}{:+.3e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Ordered list of eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("spectrum"));
        }
        if !values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty spectra
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Smallest pairwise eigenvalue distance; +inf for a single eigenvalue.
    pub fn min_gap(&self) -> f64 {
        let n = self.values.len();
        let mut gap = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                gap = gap.min((self.values[i] - self.values[j]).norm());
            }
        }
        gap
    }

    /// New spectrum with element `i` moved to the front, the rest keeping
    /// their relative order.
    pub fn rotated_front(&self, i: usize) -> Self {
        assert!(i < self.values.len());
        let mut values = Vec::with_capacity(self.values.len());
        values.push(self.values[i]);
        values.extend(self.values.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, z)| *z));
        Self { values }
    }
}

impl std::ops::Index<usize> for Spectrum {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.values[i]
    }
}
