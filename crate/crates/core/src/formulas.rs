//! Closed-form quenched expectations for the diagonal overlap, the adjacent
//! off-diagonal overlap, and the mixed trace, plus the inverse-gamma-2 limit
//! CDF and the radial invariance probe.
//!
//! The off-diagonal and truncated-unitary trace formulas each ship in two
//! variants. The default variants are the ones that agree with Monte Carlo
//! over conditional draws; the alternates reproduce older printed forms that
//! carry a normalization slip, retained so reports can show the discrepancy
//! instead of hiding it.

use num_complex::Complex64;
use num_rational::Ratio;

use crate::ensembles::EnsembleSpec;
use crate::linalg::Spectrum;
use crate::{Error, Result};

/// Product accumulator split into a mantissa and a log-scale carry so that
/// long products and near-collision factors (anything past ~1e8) never
/// overflow.
#[derive(Clone, Copy, Debug)]
struct ScaledProduct {
    log: f64,
    mant: Complex64,
}

impl ScaledProduct {
    fn one() -> Self {
        Self { log: 0.0, mant: Complex64::ONE }
    }

    fn mul_real(&mut self, f: f64) {
        self.mul(Complex64::new(f, 0.0));
    }

    fn mul(&mut self, f: Complex64) {
        self.mant *= f;
        let a = self.mant.norm();
        if a > 1e100 || (a > 0.0 && a < 1e-100) {
            self.log += a.ln();
            self.mant /= a;
        }
    }

    fn value(&self) -> Complex64 {
        self.mant * self.log.exp()
    }

    fn value_real(&self) -> f64 {
        self.value().re
    }
}

fn check_spectrum(lambda: &Spectrum, spec: EnsembleSpec) -> Result<()> {
    spec.validate()?;
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

fn gap_or_degenerate(a: Complex64, b: Complex64) -> Result<f64> {
    let gap = (a - b).norm();
    if gap <= 1e-14 {
        return Err(Error::DegenerateSpectrum { gap, threshold: 1e-14 });
    }
    Ok(gap)
}

/// Expected diagonal overlap of the eigenvalue listed first, given the whole
/// spectrum: a product over the other eigenvalues of 1 + num_k/(q |l1-l_k|^2)
/// with (num_k, q) fixed by the ensemble.
pub fn quenched_ov11(lambda: &Spectrum, spec: EnsembleSpec) -> Result<f64> {
    check_spectrum(lambda, spec)?;
    let l1 = lambda[0];
    let mut product = ScaledProduct::one();
    for k in 1..lambda.len() {
        let gap = gap_or_degenerate(l1, lambda[k])?;
        let gap2 = gap * gap;
        let factor = match spec {
            EnsembleSpec::Ginibre { n } => 1.0 + 1.0 / (n as f64 * gap2),
            EnsembleSpec::Spherical { n } => {
                1.0 + (1.0 + l1.norm_sqr()) * (1.0 + lambda[k].norm_sqr()) / (n as f64 * gap2)
            }
            EnsembleSpec::TruncatedUnitary { m, .. } => {
                1.0 + (1.0 - l1.norm_sqr()) * (1.0 - lambda[k].norm_sqr()) / (m as f64 * gap2)
            }
        };
        product.mul_real(factor);
    }
    Ok(product.value_real())
}

/// Expected off-diagonal overlap of the first two listed eigenvalues. The
/// default lead factor carries the same (1 +- |l|^2) weights as the diagonal
/// law; `use_printed_lead` switches to the bare -1/(q |l1-l2|^2) lead, which
/// disagrees with conditional Monte Carlo for the spherical and
/// truncated-unitary ensembles and is kept for discrepancy reporting. The
/// Ginibre lead is identical either way.
pub fn quenched_ov12(
    lambda: &Spectrum,
    spec: EnsembleSpec,
    use_printed_lead: bool,
) -> Result<Complex64> {
    check_spectrum(lambda, spec)?;
    if lambda.len() < 2 {
        return Err(Error::ParameterOutOfRange(
            "off-diagonal overlap needs at least two eigenvalues".into(),
        ));
    }
    let (l1, l2) = (lambda[0], lambda[1]);
    let gap12 = gap_or_degenerate(l1, l2)?;
    let q = match spec {
        EnsembleSpec::Ginibre { n } | EnsembleSpec::Spherical { n } => n as f64,
        EnsembleSpec::TruncatedUnitary { m, .. } => m as f64,
    };
    let lead_weight = match spec {
        EnsembleSpec::Ginibre { .. } => 1.0,
        _ if use_printed_lead => 1.0,
        EnsembleSpec::Spherical { .. } => (1.0 + l1.norm_sqr()) * (1.0 + l2.norm_sqr()),
        EnsembleSpec::TruncatedUnitary { .. } => (1.0 - l1.norm_sqr()) * (1.0 - l2.norm_sqr()),
    };
    let mut product = ScaledProduct::one();
    product.mul_real(-lead_weight / (q * gap12 * gap12));
    for k in 2..lambda.len() {
        gap_or_degenerate(l1, lambda[k])?;
        gap_or_degenerate(l2, lambda[k])?;
        let denom = q * (l1 - lambda[k]) * (l2 - lambda[k]).conj();
        let numer = match spec {
            EnsembleSpec::Ginibre { .. } => Complex64::ONE,
            EnsembleSpec::Spherical { .. } => {
                (Complex64::ONE + l1 * l2.conj()) * (1.0 + lambda[k].norm_sqr())
            }
            EnsembleSpec::TruncatedUnitary { .. } => {
                (Complex64::ONE - l1 * l2.conj()) * (1.0 - lambda[k].norm_sqr())
            }
        };
        product.mul(Complex64::ONE + numer / denom);
    }
    Ok(product.value())
}

/// Expected value of tr(G G*)/N given the spectrum. The truncated-unitary
/// cell defaults to the telescoped recursion solution; `use_printed_tue`
/// evaluates the older printed closed form, which goes negative for spectra
/// near the unit circle and is kept as a discrepancy witness.
pub fn quenched_trace(lambda: &Spectrum, spec: EnsembleSpec, use_printed_tue: bool) -> Result<f64> {
    check_spectrum(lambda, spec)?;
    let n = lambda.len() as f64;
    Ok(match spec {
        EnsembleSpec::Ginibre { .. } => {
            let sum: f64 = lambda.values().iter().map(|l| l.norm_sqr()).sum();
            sum / n + (n - 1.0) / (2.0 * n)
        }
        EnsembleSpec::Spherical { .. } => {
            let mut product = ScaledProduct::one();
            for l in lambda.values() {
                product.mul_real(1.0 + (1.0 + l.norm_sqr()) / n);
            }
            product.value_real() - 2.0
        }
        EnsembleSpec::TruncatedUnitary { m, .. } => {
            let mf = m as f64;
            if use_printed_tue {
                let mut product = ScaledProduct::one();
                for l in lambda.values() {
                    product.mul_real(1.0 + (1.0 - l.norm_sqr()) / mf);
                }
                product.value_real() - (1.0 + n / mf)
            } else {
                let mut product = ScaledProduct::one();
                for l in lambda.values() {
                    product.mul_real(1.0 - (1.0 - l.norm_sqr()) / mf);
                }
                (mf / n) * product.value_real() - mf / n + 1.0
            }
        }
    })
}

/// Limit CDF of the origin-conditioned scaled diagonal overlap:
/// F(x) = (1 + 1/x) exp(-1/x) on the positive half-line.
pub fn inv_gamma2_cdf(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::NonPositiveArgument(x));
    }
    let s = 1.0 / x;
    Ok((1.0 + s) * (-s).exp())
}

/// Median of the inverse-gamma-2 law, by bisection on (1+s)e^{-s} = 1/2.
pub fn inv_gamma2_median() -> f64 {
    let (mut lo, mut hi) = (1e-6f64, 1e6f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if inv_gamma2_cdf(mid).expect("positive argument") < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Expected per-factor mean of the origin-conditioned product, exact in
/// rationals: k/(k-1) for factor k of either ensemble. The pieces are the
/// factor-law means 1/n resp. 1/m and the inverse-beta moment
/// (a+b-1)/(a-1), so the telescoped product over k = 2..=N is exactly N.
pub fn origin_factor_mean(spec: EnsembleSpec, k: usize) -> Result<Ratio<i64>> {
    spec.validate()?;
    let n = spec.dim();
    if k < 2 || k > n {
        return Err(Error::ParameterOutOfRange(format!(
            "factor index must satisfy 2 <= k <= {n}, got {k}"
        )));
    }
    let one = Ratio::from_integer(1i64);
    Ok(match spec {
        EnsembleSpec::Spherical { n } => {
            let mean_x = Ratio::new(1i64, n as i64);
            let mean_inv_beta = Ratio::new(n as i64, k as i64 - 1);
            one + mean_x * mean_inv_beta
        }
        EnsembleSpec::TruncatedUnitary { m, .. } => {
            let mean_y = Ratio::new(1i64, m as i64);
            let mean_inv_beta_minus_one = Ratio::new(m as i64, k as i64 - 1);
            one + mean_y * mean_inv_beta_minus_one
        }
        EnsembleSpec::Ginibre { .. } => {
            return Err(Error::UnsupportedEnsemble(
                "origin factors are defined for the spherical and truncated-unitary laws".into(),
            ))
        }
    })
}

/// Radial band of the complex plane, lo <= |z| < hi.
#[derive(Clone, Copy, Debug)]
pub struct RadiusBand {
    pub lo: f64,
    pub hi: f64,
}

impl RadiusBand {
    pub fn contains(&self, r: f64) -> bool {
        self.lo <= r && r < self.hi
    }
}

/// Median of quenched diagonal overlaps over all eigenvalues falling in one
/// band.
#[derive(Clone, Copy, Debug)]
pub struct BandMedian {
    pub band: RadiusBand,
    pub count: usize,
    pub median: f64,
}

/// For every spectrum and every eigenvalue landing in a band, evaluate the
/// quenched diagonal overlap with that eigenvalue rotated to the front, and
/// report the per-band median. Medians, not means: the cross-spectrum
/// distribution of the quenched product has log-divergent variance from
/// near-collisions.
pub fn quenched_invariance_probe(
    spectra: &[Spectrum],
    spec: EnsembleSpec,
    bands: &[RadiusBand],
) -> Result<Vec<BandMedian>> {
    if spectra.is_empty() || bands.is_empty() {
        return Err(Error::EmptyInput("quenched_invariance_probe"));
    }
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); bands.len()];
    for s in spectra {
        for i in 0..s.len() {
            let r = s[i].norm();
            for (bi, band) in bands.iter().enumerate() {
                if band.contains(r) {
                    let rotated = s.rotated_front(i);
                    buckets[bi].push(quenched_ov11(&rotated, spec)?);
                }
            }
        }
    }
    bands
        .iter()
        .zip(buckets)
        .map(|(band, values)| {
            let median = crate::stats::median(&values)
                .ok_or(Error::EmptyInput("band holds no eigenvalues"))?;
            Ok(BandMedian { band: *band, count: values.len(), median })
        })
        .collect()
}
