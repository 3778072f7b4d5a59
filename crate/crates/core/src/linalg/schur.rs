use num_complex::Complex64;

use super::{hessenberg, ComplexMatrix, Spectrum};
use crate::{Error, Result};

/// Unitary triangularization a = u·t·u*.
#[derive(Clone, Debug)]
pub struct SchurForm {
    pub u: ComplexMatrix,
    pub t: ComplexMatrix,
    pub eigenvalues: Spectrum,
}

/// Complex Givens rotation G = [[c, s], [-conj(s), c]] with real c,
/// chosen so that G·(a, b) = (r, 0).
#[inline]
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, Complex64::ZERO);
    }
    let r = na.hypot(nb);
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

/// Eigenvalue of the trailing 2x2 block closest to its bottom-right entry
/// (Wilkinson shift).
fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let m = (a + d) * 0.5;
    let disc = (m * m - (a * d - b * c)).sqrt();
    let e1 = m + disc;
    let e2 = m - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Schur decomposition with default deflation tolerance 1e-13 and sweep
/// budget 30·N.
pub fn schur(a: &ComplexMatrix) -> Result<SchurForm> {
    schur_with(a, 1e-13, 30 * a.rows().max(1))
}

/// Schur decomposition by Hessenberg reduction followed by shifted QR with
/// Givens rotations. A subdiagonal entry deflates when
/// |t[i+1][i]| <= tol·(|t[i][i]| + |t[i+1][i+1]|), falling back to
/// tol·‖a‖_F when that diagonal scale underflows.
pub fn schur_with(a: &ComplexMatrix, tol: f64, max_sweeps: usize) -> Result<SchurForm> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "schur expects a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    assert!(tol > 0.0, "deflation tolerance must be positive");
    let n = a.rows();
    let anorm = a.frobenius_norm();
    let (mut h, mut u) = hessenberg(a)?;

    if n <= 1 || anorm == 0.0 {
        let eigenvalues = Spectrum::new(h.diag())?;
        return Ok(SchurForm { u, t: h, eigenvalues });
    }

    let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(n);
    let mut sweeps = 0usize;
    let mut stall = 0usize;
    let mut hi = n - 1;

    while hi > 0 {
        // deflation scan: active block is lo..=hi
        let mut lo = hi;
        while lo > 0 {
            let scale = {
                let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
                if s > 0.0 {
                    s
                } else {
                    anorm
                }
            };
            if h[(lo, lo - 1)].norm() <= tol * scale {
                h[(lo, lo - 1)] = Complex64::ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            stall = 0;
            continue;
        }

        sweeps += 1;
        stall += 1;
        if sweeps > max_sweeps {
            return Err(Error::NonConvergence { sweeps: max_sweeps });
        }
        // an occasional ad-hoc shift breaks symmetric stalls
        let shift = if stall % 12 == 0 {
            h[(hi, hi)] + Complex64::new(1.5, 0.5) * h[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(&h, hi)
        };

        for i in lo..=hi {
            let v = h[(i, i)] - shift;
            h[(i, i)] = v;
        }
        // left rotations: triangularize the shifted block
        rotations.clear();
        for i in lo..hi {
            let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
            for j in i..n {
                let x = h[(i, j)];
                let y = h[(i + 1, j)];
                h[(i, j)] = c * x + s * y;
                h[(i + 1, j)] = -s.conj() * x + c * y;
            }
            h[(i + 1, i)] = Complex64::ZERO;
            rotations.push((c, s));
        }
        // right rotations: restore Hessenberg form, accumulate u
        for (idx, &(c, s)) in rotations.iter().enumerate() {
            let i = lo + idx;
            let sc = s.conj();
            for r in 0..=(i + 1).min(hi) {
                let x = h[(r, i)];
                let y = h[(r, i + 1)];
                h[(r, i)] = c * x + sc * y;
                h[(r, i + 1)] = -s * x + c * y;
            }
            for r in 0..n {
                let x = u[(r, i)];
                let y = u[(r, i + 1)];
                u[(r, i)] = c * x + sc * y;
                u[(r, i + 1)] = -s * x + c * y;
            }
        }
        for i in lo..=hi {
            let v = h[(i, i)] + shift;
            h[(i, i)] = v;
        }
    }

    let eigenvalues = Spectrum::new(h.diag())?;
    Ok(SchurForm { u, t: h, eigenvalues })
}

impl SchurForm {
    /// ‖a − u·t·u*‖_F for the matrix this form was computed from.
    pub fn reconstruction_residual(&self, a: &ComplexMatrix) -> f64 {
        self.u.mul(&self.t).mul(&self.u.adjoint()).sub(a).frobenius_norm()
    }
}

/// Eigenvectors of an upper-triangular matrix by back-substitution.
/// Column j of the result satisfies t·y_j = λ_j·y_j with y_j[j] = 1; the
/// returned matrix is unit upper triangular.
pub fn triangular_eigenvectors(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    assert!(t.is_square(), "triangular eigenvectors need a square input");
    debug_assert!(t.is_upper_triangular());
    let n = t.rows();
    let tnorm = t.frobenius_norm();
    let diag = t.diag();
    let threshold = 1e-12 * tnorm;
    for i in 0..n {
        for j in i + 1..n {
            let gap = (diag[i] - diag[j]).norm();
            if gap <= threshold {
                return Err(Error::DegenerateSpectrum { gap, threshold });
            }
        }
    }

    let mut y = ComplexMatrix::identity(n);
    for j in 1..n {
        for i in (0..j).rev() {
            let mut s = Complex64::ZERO;
            for k in i + 1..=j {
                s += t[(i, k)] * y[(k, j)];
            }
            y[(i, j)] = -s / (diag[i] - diag[j]);
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::RngStream;
    use crate::ensembles::{sample_ginibre, sample_spherical};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn schur_of_scalar() {
        let a = ComplexMatrix::new(1, 1, vec![c(2.0, -3.0)]).unwrap();
        let f = schur(&a).unwrap();
        assert_eq!(f.t[(0, 0)], c(2.0, -3.0));
        assert_eq!(f.u[(0, 0)], Complex64::ONE);
    }

    #[test]
    fn schur_of_rotation_block_finds_plus_minus_i() {
        let a = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let f = schur(&a).unwrap();
        let mut eigs: Vec<Complex64> = f.eigenvalues.values().to_vec();
        eigs.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((eigs[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((eigs[1] - c(0.0, 1.0)).norm() < 1e-12);
        assert!(f.reconstruction_residual(&a) < 1e-12);
    }

    #[test]
    fn schur_residuals_on_random_draws() {
        for (seed, n) in [(1u64, 4usize), (2, 16), (3, 32)] {
            let mut rng = RngStream::new(seed, 100);
            let a = sample_ginibre(n, &mut rng);
            let f = schur(&a).unwrap();
            assert!(f.reconstruction_residual(&a) <= 1e-10 * a.frobenius_norm());
            assert!(f.u.unitarity_residual() <= 1e-12 * (n as f64).sqrt());
            assert!(f.t.is_upper_triangular());
            for i in 0..n {
                assert_eq!(f.eigenvalues[i], f.t[(i, i)]);
            }
        }
    }

    #[test]
    fn schur_residuals_on_heavy_tailed_draws() {
        let mut worst = 0.0f64;
        for rep in 0..100 {
            let mut rng = RngStream::new(9, rep);
            let a = sample_spherical(32, &mut rng).unwrap();
            let f = schur(&a).unwrap();
            worst = worst.max(f.reconstruction_residual(&a) / a.frobenius_norm());
        }
        assert!(worst <= 1e-10, "worst relative residual {worst}");
    }

    #[test]
    fn spectrum_matches_characteristic_polynomial_roots() {
        // det(A - λI) evaluated at each reported eigenvalue should vanish
        // relative to the Hadamard bound of the shifted matrix.
        let mut rng = RngStream::new(5, 0);
        let a = sample_ginibre(6, &mut rng);
        let f = schur(&a).unwrap();
        for &lam in f.eigenvalues.values() {
            let n = a.rows();
            let mut shifted = a.clone();
            for i in 0..n {
                shifted[(i, i)] -= lam;
            }
            // determinant via the same LU the solver uses would be overkill;
            // product of QR diagonal works as a magnitude oracle
            let (_, r) = super::super::qr(&shifted).unwrap();
            let det_mag: f64 = (0..n).map(|i| r[(i, i)].norm()).product();
            let scale: f64 = (0..n)
                .map(|i| shifted.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
                .product();
            assert!(det_mag <= 1e-9 * scale.max(1e-300), "det {det_mag} scale {scale}");
        }
    }

    #[test]
    fn triangular_eigenvectors_hand_case() {
        let t = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let y = triangular_eigenvectors(&t).unwrap();
        assert_eq!(y[(0, 0)], Complex64::ONE);
        assert_eq!(y[(0, 1)], Complex64::ONE);
        assert_eq!(y[(1, 1)], Complex64::ONE);
    }

    #[test]
    fn triangular_eigenvectors_residual_oracle() {
        let mut rng = RngStream::new(11, 0);
        let a = sample_ginibre(16, &mut rng);
        let f = schur(&a).unwrap();
        let y = triangular_eigenvectors(&f.t).unwrap();
        let tnorm = f.t.frobenius_norm();
        for j in 0..16 {
            let lam = f.eigenvalues[j];
            let mut resid = 0.0f64;
            let mut ynorm = 0.0f64;
            for i in 0..16 {
                let mut row = Complex64::ZERO;
                for k in 0..16 {
                    row += f.t[(i, k)] * y[(k, j)];
                }
                row -= lam * y[(i, j)];
                resid += row.norm_sqr();
                ynorm += y[(i, j)].norm_sqr();
            }
            assert!(resid.sqrt() <= 1e-10 * tnorm * ynorm.sqrt());
        }
    }

    #[test]
    fn triangular_eigenvectors_rejects_near_degenerate_diagonal() {
        let t = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0 + 1e-15, 0.0)]).unwrap();
        assert!(matches!(
            triangular_eigenvectors(&t),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn diagonal_input_gives_identity_eigenvectors() {
        let t = ComplexMatrix::new(2, 2, vec![c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(5.0, 0.0)]).unwrap();
        let y = triangular_eigenvectors(&t).unwrap();
        assert!(y.sub(&ComplexMatrix::identity(2)).frobenius_norm() == 0.0);
    }
}
