use num_complex::Complex64;

use super::ComplexMatrix;
use crate::{Error, Result};

/// Householder reflector for the vector `x`: returns `v` (unit norm) such
/// that (I - 2vv*)x = alpha·e1, together with alpha. `None` when x is
/// already a multiple of e1 to working precision.
fn reflector(x: &[Complex64]) -> Option<(Vec<Complex64>, Complex64)> {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    let phase = if x[0].norm() > 0.0 {
        x[0] / x[0].norm()
    } else {
        Complex64::ONE
    };
    let alpha = -phase * norm;
    let mut v: Vec<Complex64> = x.to_vec();
    v[0] -= alpha;
    let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if vnorm <= norm * 1e-300 {
        return None;
    }
    for z in &mut v {
        *z /= vnorm;
    }
    Some((v, alpha))
}

/// Applies (I - 2vv*) from the left to the block [r0.., c0..] of `m`,
/// where v spans rows r0..r0+v.len().
fn reflect_left(m: &mut ComplexMatrix, v: &[Complex64], r0: usize, c0: usize) {
    let cols = m.cols();
    for j in c0..cols {
        let mut dot = Complex64::ZERO;
        for (k, vk) in v.iter().enumerate() {
            dot += vk.conj() * m[(r0 + k, j)];
        }
        let dot2 = dot * 2.0;
        for (k, vk) in v.iter().enumerate() {
            let val = m[(r0 + k, j)] - dot2 * vk;
            m[(r0 + k, j)] = val;
        }
    }
}

/// Applies (I - 2vv*) from the right to the block [r0.., c0..] of `m`,
/// where v spans columns c0..c0+v.len().
fn reflect_right(m: &mut ComplexMatrix, v: &[Complex64], r0: usize, c0: usize) {
    let rows = m.rows();
    for i in r0..rows {
        let mut dot = Complex64::ZERO;
        for (k, vk) in v.iter().enumerate() {
            dot += m[(i, c0 + k)] * vk;
        }
        let dot2 = dot * 2.0;
        for (k, vk) in v.iter().enumerate() {
            let val = m[(i, c0 + k)] - dot2 * vk.conj();
            m[(i, c0 + k)] = val;
        }
    }
}

/// Householder QR of a square matrix: a = q·r with q unitary and r upper
/// triangular with real non-negative diagonal (diagonal phases absorbed
/// into q).
pub fn qr(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "qr expects a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut r = a.clone();
    let mut q = ComplexMatrix::identity(n);

    let mut col = vec![Complex64::ZERO; n];
    for k in 0..n {
        col.clear();
        for i in k..n {
            col.push(r[(i, k)]);
        }
        if let Some((v, alpha)) = reflector(&col) {
            reflect_left(&mut r, &v, k, k);
            reflect_right(&mut q, &v, 0, k);
            // the reflector maps the pivot column to alpha·e1 exactly
            r[(k, k)] = alpha;
            for i in k + 1..n {
                r[(i, k)] = Complex64::ZERO;
            }
        } else {
            for i in k + 1..n {
                r[(i, k)] = Complex64::ZERO;
            }
        }
    }

    // absorb diagonal phases so diag(r) is real and non-negative
    for k in 0..n {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            let pc = phase.conj();
            for j in k..n {
                let val = pc * r[(k, j)];
                r[(k, j)] = val;
            }
            r[(k, k)] = Complex64::new(r[(k, k)].re.abs(), 0.0);
            for i in 0..n {
                let val = q[(i, k)] * phase;
                q[(i, k)] = val;
            }
        }
    }
    Ok((q, r))
}

/// Unitary reduction to upper Hessenberg form: a = u·h·u*.
pub fn hessenberg(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "hessenberg expects a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut h = a.clone();
    let mut u = ComplexMatrix::identity(n);
    if n < 3 {
        return Ok((h, u));
    }

    let mut col = Vec::with_capacity(n);
    for k in 0..n - 2 {
        col.clear();
        for i in k + 1..n {
            col.push(h[(i, k)]);
        }
        if let Some((v, alpha)) = reflector(&col) {
            reflect_left(&mut h, &v, k + 1, k);
            reflect_right(&mut h, &v, 0, k + 1);
            reflect_right(&mut u, &v, 0, k + 1);
            h[(k + 1, k)] = alpha;
            for i in k + 2..n {
                h[(i, k)] = Complex64::ZERO;
            }
        }
    }
    Ok((h, u))
}
