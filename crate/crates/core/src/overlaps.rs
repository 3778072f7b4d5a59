//! Left/right eigenvector overlap matrices from sampled matrices, and the
//! first-row overlap pair from triangular matrices via the column recurrence.

use num_complex::Complex64;

use crate::linalg::{schur, solve, triangular_eigenvectors, ComplexMatrix, Spectrum};
use crate::{Error, Result};

/// Gram-product overlaps O_ij = (L_i L_j*)(R_j* R_i) under the
/// biorthogonality normalization L_i R_j = delta_ij. The diagonal is real
/// with O_ii >= 1, each row sums to 1, and O_ij = conj(O_ji).
#[derive(Clone, Debug)]
pub struct OverlapMatrix {
    entries: ComplexMatrix,
    spectrum: Spectrum,
}

impl OverlapMatrix {
    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn row_sum(&self, i: usize) -> Complex64 {
        (0..self.dim()).map(|j| self.entries[(i, j)]).sum()
    }

    /// Largest |O_ij| of row i; the natural scale for its float error.
    pub fn row_scale(&self, i: usize) -> f64 {
        (0..self.dim())
            .map(|j| self.entries[(i, j)].norm())
            .fold(1.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for OverlapMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.entries[idx]
    }
}

/// Full overlap matrix of a square matrix with simple spectrum: Schur form,
/// eigenvector matrix P = U Y, then O_ij = (P^{-1} P^{-*})_ij (P* P)_ji.
pub fn overlap_matrix(g: &ComplexMatrix) -> Result<OverlapMatrix> {
    let form = schur(g)?;
    let gap = form.eigenvalues.min_gap();
    let threshold = 1e-10 * g.frobenius_norm();
    if gap <= threshold {
        return Err(Error::DegenerateSpectrum { gap, threshold });
    }
    let y = triangular_eigenvectors(&form.t)?;
    let p = form.u.mul(&y);
    let pinv = solve(&p, &ComplexMatrix::identity(p.rows()))?;
    let left_gram = pinv.mul(&pinv.adjoint());
    let right_gram = p.adjoint().mul(&p);
    let n = p.rows();
    let mut entries = ComplexMatrix::from_fn(n, n, |i, j| left_gram[(i, j)] * right_gram[(j, i)]);
    for i in 0..n {
        let d = entries[(i, i)];
        debug_assert!(d.im.abs() <= 1e-10 * d.re.max(1.0), "diagonal overlap drifted complex");
        entries[(i, i)] = Complex64::new(d.re, 0.0);
    }
    Ok(OverlapMatrix { entries, spectrum: form.eigenvalues })
}

/// O_11 and O_12 of an upper-triangular matrix through the growing-column
/// recurrence: b_1 = 1, b_j = (sum_{i<j} b_i t[i][j]) / (l_1 - l_j), and
/// d_1 = 0, d_2 = 1, d_j = (sum_{i<j} d_i t[i][j]) / (l_2 - l_j). Then
/// O_11 = sum |b_i|^2 and O_12 = -conj(b_2) * sum b_i conj(d_i).
pub fn overlap_pair_recurrence(t: &ComplexMatrix) -> Result<(f64, Complex64)> {
    assert!(t.is_square(), "recurrence needs a square triangular matrix");
    debug_assert!(t.is_upper_triangular());
    let n = t.rows();
    if n == 1 {
        return Ok((1.0, Complex64::ZERO));
    }
    let diag = t.diag();
    let threshold = 1e-12 * t.frobenius_norm();
    for j in 1..n {
        let gap = (diag[0] - diag[j]).norm();
        if gap <= threshold {
            return Err(Error::DegenerateSpectrum { gap, threshold });
        }
    }
    for j in 2..n {
        let gap = (diag[1] - diag[j]).norm();
        if gap <= threshold {
            return Err(Error::DegenerateSpectrum { gap, threshold });
        }
    }

    let mut b = Vec::with_capacity(n);
    b.push(Complex64::ONE);
    for j in 1..n {
        let s: Complex64 = (0..j).map(|i| b[i] * t[(i, j)]).sum();
        b.push(s / (diag[0] - diag[j]));
    }
    let mut d = Vec::with_capacity(n);
    d.push(Complex64::ZERO);
    d.push(Complex64::ONE);
    for j in 2..n {
        let s: Complex64 = (0..j).map(|i| d[i] * t[(i, j)]).sum();
        d.push(s / (diag[1] - diag[j]));
    }

    let o11 = b.iter().map(|z| z.norm_sqr()).sum();
    let cross: Complex64 = b.iter().zip(&d).map(|(bi, di)| bi * di.conj()).sum();
    let o12 = -b[1].conj() * cross;
    Ok((o11, o12))
}

/// Both sides of the trace identity tr(G G*) = sum_ij l_i conj(l_j) O_ij.
pub fn mixed_trace(g: &ComplexMatrix, o: &OverlapMatrix) -> (f64, f64) {
    let lhs: f64 = g.data().iter().map(|z| z.norm_sqr()).sum();
    let n = o.dim();
    let mut rhs = Complex64::ZERO;
    for i in 0..n {
        for j in 0..n {
            rhs += o.spectrum()[i] * o.spectrum()[j].conj() * o[(i, j)];
        }
    }
    debug_assert!(rhs.im.abs() <= 1e-8 * lhs, "trace identity drifted complex");
    (lhs, rhs.re)
}
