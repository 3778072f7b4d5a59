//! Samplers conditioned on a prescribed spectrum: the column-by-column
//! triangular construction, the product-of-independent-factors shortcut for
//! O_11, and the origin-conditioned scaled-overlap sampler.

use num_complex::Complex64;

use crate::distributions::{sample_beta, sample_v, sample_w, sample_x, sample_y, RngStream};
use crate::ensembles::EnsembleSpec;
use crate::linalg::{cholesky, ComplexMatrix, Spectrum};
use crate::{Error, Result};

/// Upper-triangular draw whose diagonal is the prescribed spectrum, in order.
#[derive(Clone, Debug)]
pub struct ConditionalSchurDraw {
    pub t: ComplexMatrix,
    pub ensemble: EnsembleSpec,
}

fn supported(spec: EnsembleSpec) -> Result<()> {
    spec.validate()?;
    match spec {
        EnsembleSpec::Spherical { .. } | EnsembleSpec::TruncatedUnitary { .. } => Ok(()),
        EnsembleSpec::Ginibre { .. } => Err(Error::UnsupportedEnsemble(
            "conditional sampling covers the spherical and truncated-unitary laws".into(),
        )),
    }
}

fn check_shape(lambda: &Spectrum, spec: EnsembleSpec) -> Result<()> {
    supported(spec)?;
    if lambda.len() != spec.dim() {
        return Err(Error::DimensionMismatch(format!(
            "spectrum has {} values but the ensemble is {}-dimensional",
            lambda.len(),
            spec.dim()
        )));
    }
    if matches!(spec, EnsembleSpec::TruncatedUnitary { .. })
        && lambda.values().iter().any(|l| l.norm_sqr() >= 1.0)
    {
        return Err(Error::ParameterOutOfRange(
            "truncated-unitary spectra must lie strictly inside the unit disk".into(),
        ));
    }
    Ok(())
}

/// Triangular factor conditioned on the diagonal: column n (1-based) is
/// u_n = A v where A A* = s^2 (I +- B), B the Gram matrix of the leading
/// block, s^2 = 1 +- |l_n|^2, and v follows the heavy-tailed plane law with
/// exponent N+n (spherical) or the ball law with exponent M-n (truncated
/// unitary). Any A with A A* = S^2 induces the right law because the vector
/// laws are rotation invariant.
pub fn conditional_schur(
    lambda: &Spectrum,
    spec: EnsembleSpec,
    rng: &mut RngStream,
) -> Result<ConditionalSchurDraw> {
    check_shape(lambda, spec)?;
    if lambda.len() > 1 && lambda.min_gap() == 0.0 {
        return Err(Error::DegenerateSpectrum { gap: 0.0, threshold: 0.0 });
    }
    let n = lambda.len();
    let mut t = ComplexMatrix::zeros(n, n);
    t[(0, 0)] = lambda[0];

    for col in 1..n {
        let lam = lambda[col];
        let (scale, sign) = match spec {
            EnsembleSpec::Spherical { .. } => (1.0 + lam.norm_sqr(), 1.0),
            EnsembleSpec::TruncatedUnitary { .. } => (1.0 - lam.norm_sqr(), -1.0),
            EnsembleSpec::Ginibre { .. } => unreachable!(),
        };
        // S^2 = scale * (I + sign * T_c T_c*) over the leading col x col block
        let mut s2 = ComplexMatrix::from_fn(col, col, |i, j| {
            let mut g = Complex64::ZERO;
            for k in i.max(j)..col {
                g += t[(i, k)] * t[(j, k)].conj();
            }
            g * (sign * scale)
        });
        for i in 0..col {
            s2[(i, i)] += scale;
        }
        let a = cholesky(&s2)?;
        let v = match spec {
            EnsembleSpec::Spherical { n } => sample_v(col, n + col + 1, rng)?,
            EnsembleSpec::TruncatedUnitary { m, .. } => sample_w(col, m - col - 1, rng),
            EnsembleSpec::Ginibre { .. } => unreachable!(),
        };
        for i in 0..col {
            let mut u = Complex64::ZERO;
            for k in 0..=i {
                u += a[(i, k)] * v[k];
            }
            t[(i, col)] = u;
        }
        t[(col, col)] = lam;
    }
    Ok(ConditionalSchurDraw { t, ensemble: spec })
}

/// One draw of the diagonal overlap O_11 as the product of independent
/// factors 1 + c_k xi_k, with c_k = (1 +- |l_1|^2)(1 +- |l_k|^2)/|l_1 - l_k|^2
/// and xi_k heavy-tailed (spherical) or beta (truncated unitary).
pub fn decompose_ov11_sample(
    lambda: &Spectrum,
    spec: EnsembleSpec,
    rng: &mut RngStream,
) -> Result<f64> {
    check_shape(lambda, spec)?;
    let n = lambda.len();
    let l1 = lambda[0];
    let mut product = 1.0f64;
    for k in 1..n {
        let gap = (l1 - lambda[k]).norm_sqr();
        if gap < 1e-28 {
            return Err(Error::DegenerateSpectrum { gap: gap.sqrt(), threshold: 1e-14 });
        }
        let (c, xi) = match spec {
            EnsembleSpec::Spherical { n } => (
                (1.0 + l1.norm_sqr()) * (1.0 + lambda[k].norm_sqr()) / gap,
                sample_x(n as u32, rng),
            ),
            EnsembleSpec::TruncatedUnitary { m, .. } => (
                (1.0 - l1.norm_sqr()) * (1.0 - lambda[k].norm_sqr()) / gap,
                sample_y(m as u32, rng),
            ),
            EnsembleSpec::Ginibre { .. } => unreachable!(),
        };
        product *= 1.0 + c * xi;
    }
    Ok(product)
}

/// One draw of O_11/N conditioned on a zero eigenvalue, as a product of N-1
/// independent factors built from beta and factor-law draws. Converges in
/// law to the inverse-gamma-2 distribution as N grows.
pub fn origin_limit_sample(spec: EnsembleSpec, rng: &mut RngStream) -> Result<f64> {
    supported(spec)?;
    let n = spec.dim();
    let mut product = 1.0f64;
    match spec {
        EnsembleSpec::Spherical { .. } => {
            for k in 2..=n {
                let b = sample_beta(k as f64, (n + 1 - k) as f64, rng);
                product *= 1.0 + sample_x(n as u32, rng) / b;
            }
        }
        EnsembleSpec::TruncatedUnitary { m, .. } => {
            for k in 2..=n {
                let b = sample_beta(k as f64, m as f64, rng);
                product *= 1.0 + (1.0 / b - 1.0) * sample_y(m as u32, rng);
            }
        }
        EnsembleSpec::Ginibre { .. } => unreachable!(),
    }
    Ok(product / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::overlaps::overlap_pair_recurrence;
    use crate::stats::{ks_two_sample, MomentAccumulator};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spectrum(values: &[Complex64]) -> Spectrum {
        Spectrum::new(values.to_vec()).unwrap()
    }

    fn lam4() -> Spectrum {
        spectrum(&[c(0.31, 0.42), c(-0.55, 0.12), c(0.07, -0.61), c(-0.28, -0.33)])
    }

    #[test]
    fn rejects_unsupported_and_misshapen_inputs() {
        let mut rng = RngStream::new(71, 0);
        let lam = spectrum(&[c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            conditional_schur(&lam, EnsembleSpec::Ginibre { n: 2 }, &mut rng),
            Err(Error::UnsupportedEnsemble(_))
        ));
        assert!(conditional_schur(&lam, EnsembleSpec::Spherical { n: 3 }, &mut rng).is_err());
        // unit-disk requirement for truncations
        assert!(conditional_schur(&lam, EnsembleSpec::TruncatedUnitary { n: 2, m: 4 }, &mut rng).is_err());
    }

    #[test]
    fn diagonal_is_prescribed_exactly() {
        let mut rng = RngStream::new(72, 0);
        let lam = lam4();
        let draw = conditional_schur(&lam, EnsembleSpec::Spherical { n: 4 }, &mut rng).unwrap();
        for i in 0..4 {
            assert_eq!(draw.t[(i, i)], lam[i]);
        }
        assert!(draw.t.is_upper_triangular());
    }

    #[test]
    fn spherical_first_entry_second_moment() {
        // |T_12|^2 for the pair (0, 1) has mean (1+0)(1+1) E[X_2] = 1
        let mut rng = RngStream::new(73, 0);
        let lam = spectrum(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let spec = EnsembleSpec::Spherical { n: 2 };
        let mut acc = MomentAccumulator::new();
        for _ in 0..200_000 {
            let draw = conditional_schur(&lam, spec, &mut rng).unwrap();
            acc.push(draw.t[(0, 1)].norm_sqr());
        }
        assert!((acc.mean() - 1.0).abs() <= 4.0 * acc.standard_error(), "mean {}", acc.mean());
    }

    #[test]
    fn tue_first_entry_second_moment() {
        // |T_12|^2 for the pair (0, 0.5) at depth 4 has mean (1)(0.75)/4
        let mut rng = RngStream::new(74, 0);
        let lam = spectrum(&[c(0.0, 0.0), c(0.5, 0.0)]);
        let spec = EnsembleSpec::TruncatedUnitary { n: 2, m: 4 };
        let mut acc = MomentAccumulator::new();
        for _ in 0..200_000 {
            let draw = conditional_schur(&lam, spec, &mut rng).unwrap();
            acc.push(draw.t[(0, 1)].norm_sqr());
        }
        assert!((acc.mean() - 0.1875).abs() <= 4.0 * acc.standard_error(), "mean {}", acc.mean());
    }

    #[test]
    fn tue_draws_are_strict_contractions() {
        let mut rng = RngStream::new(75, 0);
        let lam = lam4();
        let spec = EnsembleSpec::TruncatedUnitary { n: 4, m: 7 };
        for _ in 0..2000 {
            let draw = conditional_schur(&lam, spec, &mut rng).unwrap();
            assert!(draw.t.spectral_norm_est(40) <= 1.0 + 1e-12);
            // exact support statement: I - T T* stays positive definite
            let mut h = ComplexMatrix::identity(4).sub(&draw.t.mul(&draw.t.adjoint()));
            // symmetrize float dust before factoring
            for i in 0..4 {
                for j in 0..i {
                    let avg = 0.5 * (h[(i, j)] + h[(j, i)].conj());
                    h[(i, j)] = avg;
                    h[(j, i)] = avg.conj();
                }
            }
            assert!(cholesky(&h).is_ok());
        }
    }

    #[test]
    fn decomposition_matches_construction_in_law() {
        // the central distributional identity at a small size: O_11 of the
        // constructed triangle vs the independent-factor product
        let mut rng = RngStream::new(76, 0);
        for spec in [
            EnsembleSpec::Spherical { n: 4 },
            EnsembleSpec::TruncatedUnitary { n: 4, m: 6 },
        ] {
            let lam = lam4();
            let via_schur: Vec<f64> = (0..4000)
                .map(|_| {
                    let draw = conditional_schur(&lam, spec, &mut rng).unwrap();
                    overlap_pair_recurrence(&draw.t).unwrap().0
                })
                .collect();
            let via_factors: Vec<f64> = (0..4000)
                .map(|_| decompose_ov11_sample(&lam, spec, &mut rng).unwrap())
                .collect();
            let v = ks_two_sample(&via_schur, &via_factors, 0.001).unwrap();
            assert!(v.pass, "{}: D = {} critical {}", spec.label(), v.statistic, v.critical);
        }
    }

    #[test]
    fn decompose_means_at_size_two() {
        let mut rng = RngStream::new(77, 0);
        let mut acc = MomentAccumulator::new();
        let lam = spectrum(&[c(0.0, 0.0), c(1.0, 0.0)]);
        for _ in 0..1_000_000 {
            acc.push(decompose_ov11_sample(&lam, EnsembleSpec::Spherical { n: 2 }, &mut rng).unwrap());
        }
        assert!((acc.mean() - 2.0).abs() <= 4.0 * acc.standard_error(), "mean {}", acc.mean());

        let mut acc = MomentAccumulator::new();
        let lam = spectrum(&[c(0.0, 0.0), c(0.5, 0.0)]);
        for _ in 0..200_000 {
            acc.push(
                decompose_ov11_sample(&lam, EnsembleSpec::TruncatedUnitary { n: 2, m: 4 }, &mut rng)
                    .unwrap(),
            );
        }
        assert!((acc.mean() - 1.75).abs() <= 4.0 * acc.standard_error(), "mean {}", acc.mean());
    }

    #[test]
    fn single_eigenvalue_cases() {
        let mut rng = RngStream::new(78, 0);
        let lam = spectrum(&[c(0.3, 0.1)]);
        let spec = EnsembleSpec::Spherical { n: 1 };
        assert_eq!(decompose_ov11_sample(&lam, spec, &mut rng).unwrap(), 1.0);
        assert_eq!(origin_limit_sample(spec, &mut rng).unwrap(), 1.0);
    }

    #[test]
    fn repeated_eigenvalues_are_rejected() {
        let mut rng = RngStream::new(79, 0);
        let lam = spectrum(&[c(0.4, 0.0), c(0.4, 0.0)]);
        assert!(matches!(
            decompose_ov11_sample(&lam, EnsembleSpec::Spherical { n: 2 }, &mut rng),
            Err(Error::DegenerateSpectrum { .. })
        ));
        assert!(matches!(
            conditional_schur(&lam, EnsembleSpec::Spherical { n: 2 }, &mut rng),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn origin_factor_means() {
        // factor k of the origin-conditioned product has mean k/(k-1); the
        // variance is finite from k = 3 on
        let mut rng = RngStream::new(80, 0);
        let n = 6usize;
        let m = 9usize;
        for k in [3usize, 4] {
            let mut sph = MomentAccumulator::new();
            let mut tue = MomentAccumulator::new();
            for _ in 0..200_000 {
                let b = sample_beta(k as f64, (n + 1 - k) as f64, &mut rng);
                sph.push(1.0 + sample_x(n as u32, &mut rng) / b);
                let b = sample_beta(k as f64, m as f64, &mut rng);
                tue.push(1.0 + (1.0 / b - 1.0) * sample_y(m as u32, &mut rng));
            }
            let want = k as f64 / (k - 1) as f64;
            assert!((sph.mean() - want).abs() <= 4.0 * sph.standard_error(), "sph k={k}: {}", sph.mean());
            assert!((tue.mean() - want).abs() <= 4.0 * tue.standard_error(), "tue k={k}: {}", tue.mean());
        }
    }

}
