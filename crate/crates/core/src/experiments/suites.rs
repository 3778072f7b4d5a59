//! The shipped verification suites. Each returns the list of checks for one
//! experiment; tolerances are pinned here, not configurable, so a green
//! report means the same thing on every machine.

use num_complex::Complex64;
use num_rational::Ratio;

use super::{edge_spectrum, par_replicas, reference_spectrum, CheckResult, EnsembleTag, VerifyConfig};
use crate::conditional::{conditional_schur, decompose_ov11_sample, origin_limit_sample};
use crate::distributions::{
    complex_gaussian, sample_beta, sample_v, sample_w, sample_x, sample_y, RngStream,
};
use crate::ensembles::{kostlan_radii, sample_matrix, EnsembleSpec};
use crate::formulas::{
    inv_gamma2_cdf, origin_factor_mean, quenched_invariance_probe, quenched_ov11, quenched_ov12,
    quenched_trace, RadiusBand,
};
use crate::linalg::{schur, ComplexMatrix, Spectrum};
use crate::overlaps::{mixed_trace, overlap_matrix, overlap_pair_recurrence};
use crate::stats::{ks_one_sample, ks_two_sample, MomentAccumulator};
use crate::{Error, Result};

const SCHUR: u16 = 1;
const IDENTITIES: u16 = 2;
const QUENCHED_OV11: u16 = 3;
const QUENCHED_OV12: u16 = 4;
const QUENCHED_TRACE: u16 = 5;
const DECOMPOSITION: u16 = 6;
const KOSTLAN: u16 = 7;
const LIMIT_LAW: u16 = 8;
const INTEGRALS: u16 = 9;
const INVARIANCE: u16 = 10;

fn tag_case(tag: EnsembleTag) -> u16 {
    match tag {
        EnsembleTag::Cge => 0,
        EnsembleTag::Sph => 1,
        EnsembleTag::Tue => 2,
    }
}

fn fold_mean(values: impl IntoIterator<Item = f64>) -> MomentAccumulator {
    let mut acc = MomentAccumulator::new();
    for v in values {
        acc.push(v);
    }
    acc
}

/// Triangular Ginibre draw conditioned on its diagonal: the strictly upper
/// entries of the Schur factor are i.i.d. CN(0, 1/N) independent of the
/// diagonal, so conditioning just prescribes the diagonal.
fn ginibre_conditional_t(lambda: &Spectrum, rng: &mut RngStream) -> ComplexMatrix {
    let n = lambda.len();
    let var = 1.0 / n as f64;
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            lambda[i]
        } else if i < j {
            complex_gaussian(var, rng)
        } else {
            Complex64::ZERO
        }
    })
}

fn conditional_draw(
    tag: EnsembleTag,
    lambda: &Spectrum,
    spec: EnsembleSpec,
    rng: &mut RngStream,
) -> Result<ComplexMatrix> {
    match tag {
        EnsembleTag::Cge => Ok(ginibre_conditional_t(lambda, rng)),
        _ => Ok(conditional_schur(lambda, spec, rng)?.t),
    }
}

pub(super) fn run_schur(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let sizes = cfg.n.map(|n| vec![n]).unwrap_or_else(|| vec![4, 16, 32]);
    let draws = cfg.replicas.unwrap_or(200);
    let mut checks = Vec::new();
    for (si, &n) in sizes.iter().enumerate() {
        for tag in cfg.tags() {
            let spec = tag.spec(n, cfg.m.unwrap_or(n));
            let case = (si as u16) * 3 + tag_case(tag);
            let metrics = par_replicas(cfg, SCHUR, case, draws, |_, rng| {
                let a = sample_matrix(spec, rng)?;
                let form = schur(&a)?;
                let rel = form.reconstruction_residual(&a) / a.frobenius_norm();
                Ok((rel, form.u.unitarity_residual()))
            })?;
            let worst_rel = metrics.iter().map(|m| m.0).fold(0.0, f64::max);
            let worst_unit = metrics.iter().map(|m| m.1).fold(0.0, f64::max);
            let note = format!("{draws} draws");
            checks.push(
                CheckResult::bounded(&format!("reconstruction-n{n}"), Some(tag.label()), worst_rel, 1e-10)
                    .with_note(&note),
            );
            checks.push(
                CheckResult::bounded(
                    &format!("unitarity-n{n}"),
                    Some(tag.label()),
                    worst_unit,
                    1e-12 * (n as f64).sqrt(),
                )
                .with_note(&note),
            );
        }
    }
    Ok(checks)
}

pub(super) fn run_identities(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let sizes = cfg.n.map(|n| vec![n]).unwrap_or_else(|| vec![4, 8, 16, 32]);
    let draws = cfg.replicas.unwrap_or(42);
    let mut checks = Vec::new();
    for tag in cfg.tags() {
        let mut worst_row = 0.0f64;
        let mut min_diag = f64::INFINITY;
        let mut worst_pair = 0.0f64;
        let mut worst_trace = 0.0f64;
        for (si, &n) in sizes.iter().enumerate() {
            let spec = tag.spec(n, cfg.m.unwrap_or(n));
            let case = (si as u16) * 3 + tag_case(tag);
            let metrics = par_replicas(cfg, IDENTITIES, case, draws, |_, rng| {
                let a = sample_matrix(spec, rng)?;
                let o = overlap_matrix(&a)?;
                let mut row = 0.0f64;
                let mut diag = f64::INFINITY;
                let mut pair = 0.0f64;
                for i in 0..n {
                    let s = o.row_sum(i);
                    row = row.max((s - Complex64::ONE).norm() / o.row_scale(i));
                    diag = diag.min(o[(i, i)].re);
                    for j in i + 1..n {
                        let dev = (o[(i, j)] - o[(j, i)].conj()).norm();
                        pair = pair.max(dev / o[(i, j)].norm().max(1.0));
                    }
                }
                let (lhs, rhs) = mixed_trace(&a, &o);
                let trace = (lhs - rhs).abs() / lhs.max(1e-300);
                Ok((row, diag, pair, trace))
            })?;
            for (row, diag, pair, trace) in metrics {
                worst_row = worst_row.max(row);
                min_diag = min_diag.min(diag);
                worst_pair = worst_pair.max(pair);
                worst_trace = worst_trace.max(trace);
            }
        }
        let note = format!("{} draws per size, sizes {:?}", draws, sizes);
        let label = Some(tag.label());
        checks.push(CheckResult::bounded("row-sum-residual", label, worst_row, 1e-8).with_note(&note));
        checks.push(
            CheckResult::bounded("diagonal-floor", label, (1.0 - min_diag).max(0.0), 1e-10)
                .with_note(&note),
        );
        checks.push(CheckResult::bounded("hermitian-pairing", label, worst_pair, 1e-10).with_note(&note));
        checks.push(CheckResult::bounded("mixed-trace-residual", label, worst_trace, 1e-8).with_note(&note));
    }
    Ok(checks)
}

pub(super) fn run_quenched_ov11(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let n = cfg.n.unwrap_or(8);
    let m = cfg.m.unwrap_or(2 * n);
    let reps = cfg.replicas.unwrap_or(200_000);
    let lam = reference_spectrum(n)?;
    let mut checks = Vec::new();
    for tag in cfg.tags() {
        let spec = tag.spec(n, m);
        let reference = quenched_ov11(&lam, spec)?;
        let values = par_replicas(cfg, QUENCHED_OV11, tag_case(tag), reps, |_, rng| {
            let t = conditional_draw(tag, &lam, spec, rng)?;
            Ok(overlap_pair_recurrence(&t)?.0)
        })?;
        let acc = fold_mean(values);
        checks.push(
            CheckResult::mean_within(
                "ov11-mean",
                Some(tag.label()),
                acc.mean(),
                acc.standard_error(),
                reference,
                4.0,
            )
            .with_note(&format!("n={n} replicas={reps}")),
        );
    }
    Ok(checks)
}

pub(super) fn run_quenched_ov12(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let reps = cfg.replicas.unwrap_or(1_000_000);
    let mut checks = Vec::new();
    for tag in cfg.tags() {
        // the Ginibre cross-check pins the three-point hand value -7/18
        let (lam, n) = match tag {
            EnsembleTag::Cge => {
                let lam = Spectrum::new(vec![
                    Complex64::ZERO,
                    Complex64::ONE,
                    Complex64::new(2.0, 0.0),
                ])?;
                (lam, 3)
            }
            _ => {
                let n = cfg.n.unwrap_or(6);
                (reference_spectrum(n)?, n)
            }
        };
        let m = cfg.m.unwrap_or(2 * n);
        let spec = tag.spec(n, m);
        let corrected = quenched_ov12(&lam, spec, false)?;
        let values = par_replicas(cfg, QUENCHED_OV12, tag_case(tag), reps, |_, rng| {
            let t = conditional_draw(tag, &lam, spec, rng)?;
            Ok(overlap_pair_recurrence(&t)?.1)
        })?;
        let re = fold_mean(values.iter().map(|v| v.re));
        let im = fold_mean(values.iter().map(|v| v.im));
        let label = Some(tag.label());
        let note = format!("n={n} replicas={reps}");
        checks.push(
            CheckResult::mean_within("ov12-re", label, re.mean(), re.standard_error(), corrected.re, 4.0)
                .with_note(&note),
        );
        checks.push(
            CheckResult::mean_within("ov12-im", label, im.mean(), im.standard_error(), corrected.im, 4.0)
                .with_note(&note),
        );
        if !matches!(tag, EnsembleTag::Cge) {
            // the lead factor as printed drops the (1 +- |l|^2) weights; the
            // simulation must sit far from it
            let printed = quenched_ov12(&lam, spec, true)?;
            let d_re = (re.mean() - printed.re).abs() / re.standard_error();
            let d_im = (im.mean() - printed.im).abs() / im.standard_error();
            let departure = d_re.max(d_im);
            let mut check = CheckResult::flag(
                "ov12-printed-lead-departs",
                label,
                departure >= 10.0,
                &format!("printed lead sits {departure:.1} SE from the simulation; corrected lead is the default"),
            );
            check.statistic = Some(departure);
            check.critical = Some(10.0);
            checks.push(check);
        }
    }
    Ok(checks)
}

pub(super) fn run_quenched_trace(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let reps = cfg.replicas.unwrap_or(200_000);
    let mut checks = Vec::new();
    for tag in cfg.tags() {
        let n = cfg.n.unwrap_or(8);
        // the truncated-unitary cell probes the near-circle regime where the
        // printed closed form breaks down
        let lam = match tag {
            EnsembleTag::Tue if n == 8 => edge_spectrum(),
            _ => reference_spectrum(n)?,
        };
        let m = cfg.m.unwrap_or(2 * n);
        let spec = tag.spec(n, m);
        let reference = quenched_trace(&lam, spec, false)?;
        let values = par_replicas(cfg, QUENCHED_TRACE, tag_case(tag), reps, |_, rng| {
            let t = conditional_draw(tag, &lam, spec, rng)?;
            Ok(t.data().iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64)
        })?;
        let acc = fold_mean(values);
        let label = Some(tag.label());
        let max_abs = lam.values().iter().map(|l| l.norm()).fold(0.0, f64::max);
        let note = format!("n={n} replicas={reps} max|lambda|={max_abs:.2}");
        checks.push(
            CheckResult::mean_within(
                "trace-mean",
                label,
                acc.mean(),
                acc.standard_error(),
                reference,
                4.0,
            )
            .with_note(&note),
        );
        if matches!(tag, EnsembleTag::Tue) && max_abs >= 0.9 {
            let printed = quenched_trace(&lam, spec, true)?;
            checks.push(
                CheckResult::mean_departs(
                    "trace-printed-departs",
                    label,
                    acc.mean(),
                    acc.standard_error(),
                    printed,
                    10.0,
                )
                .with_note("printed truncated-unitary closed form; kept as a discrepancy witness"),
            );
        }
    }
    Ok(checks)
}

pub(super) fn run_decomposition_ks(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let n = cfg.n.unwrap_or(8);
    let m = cfg.m.unwrap_or(2 * n);
    let reps = cfg.replicas.unwrap_or(10_000);
    let lam = reference_spectrum(n)?;
    let tags: Vec<EnsembleTag> = cfg
        .tags()
        .into_iter()
        .filter(|t| !matches!(t, EnsembleTag::Cge))
        .collect();
    if tags.is_empty() {
        return Err(Error::InvalidConfig(
            "the decomposition holds for the spherical and truncated-unitary laws".into(),
        ));
    }
    let mut checks = Vec::new();
    for tag in tags {
        let spec = tag.spec(n, m);
        let case = tag_case(tag) * 2;
        let direct = par_replicas(cfg, DECOMPOSITION, case, reps, |_, rng| {
            let t = conditional_schur(&lam, spec, rng)?.t;
            Ok(overlap_pair_recurrence(&t)?.0)
        })?;
        let factored = par_replicas(cfg, DECOMPOSITION, case + 1, reps, |_, rng| {
            decompose_ov11_sample(&lam, spec, rng)
        })?;
        let verdict = ks_two_sample(&direct, &factored, cfg.alpha)?;
        checks.push(
            CheckResult::ks("ov11-decomposition", Some(tag.label()), &verdict)
                .with_note(&format!("n={n}, {reps}+{reps} draws")),
        );
    }
    Ok(checks)
}

pub(super) fn run_kostlan(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let n = cfg.n.unwrap_or(16);
    let m = cfg.m.unwrap_or(24);
    let reps = cfg.replicas.unwrap_or(4000);
    let mut checks = Vec::new();
    for tag in cfg.tags() {
        let spec = tag.spec(n, m);
        // any symmetric functional of the squared moduli separates the laws;
        // these grow with the radius in a numerically stable way
        let stat = move |gammas: &[f64]| -> f64 {
            match tag {
                EnsembleTag::Tue => -gammas.iter().map(|g| (1.0 - g).ln()).sum::<f64>(),
                _ => gammas.iter().map(|g| (1.0 + g).ln()).sum::<f64>(),
            }
        };
        let case = tag_case(tag) * 2;
        let direct = par_replicas(cfg, KOSTLAN, case, reps, |_, rng| {
            let a = sample_matrix(spec, rng)?;
            let gammas: Vec<f64> =
                schur(&a)?.eigenvalues.values().iter().map(|l| l.norm_sqr()).collect();
            Ok(stat(&gammas))
        })?;
        let radial = par_replicas(cfg, KOSTLAN, case + 1, reps, |_, rng| {
            Ok(stat(&kostlan_radii(spec, false, rng)?))
        })?;
        let verdict = ks_two_sample(&direct, &radial, cfg.alpha)?;
        checks.push(
            CheckResult::ks("kostlan-radial-match", Some(tag.label()), &verdict)
                .with_note(&format!("n={n}, {reps}+{reps} spectra")),
        );
    }
    Ok(checks)
}

pub(super) fn run_limit_law(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let sizes = cfg.n.map(|n| vec![n]).unwrap_or_else(|| vec![100, 200, 400]);
    let reps = cfg.replicas.unwrap_or(10_000);
    let tags: Vec<EnsembleTag> = cfg
        .tags()
        .into_iter()
        .filter(|t| !matches!(t, EnsembleTag::Cge))
        .collect();
    if tags.is_empty() {
        return Err(Error::InvalidConfig(
            "the origin limit law covers the spherical and truncated-unitary laws".into(),
        ));
    }
    // the threshold check runs at the release sample count; the monotonicity
    // sequence needs its own schedule, because at 1e4 the finite-size drift
    // of D sits below the KS noise floor of ~0.0086 and the ordering would be
    // a coin flip. The true distances here decay to ~2e-3 at n = 400, so the
    // estimator noise (~0.86/sqrt(reps)) must shrink with n: sample counts
    // grow 3x per size step.
    let mono_base = cfg.replicas.unwrap_or(200_000);
    let mut checks = Vec::new();
    for tag in tags {
        let label = Some(tag.label());
        let mut distances = Vec::new();
        for (si, &n) in sizes.iter().enumerate() {
            let spec = tag.spec(n, cfg.m.unwrap_or(n));
            let case = (si as u16) * 4 + tag_case(tag);
            let mono_reps = mono_base * 3u64.pow(si as u32);
            let samples = par_replicas(cfg, LIMIT_LAW, case, mono_reps, |_, rng| {
                origin_limit_sample(spec, rng)
            })?;
            let verdict =
                ks_one_sample(&samples, |x| inv_gamma2_cdf(x).unwrap_or(0.0), cfg.alpha)?;
            distances.push((n, mono_reps, verdict.statistic));
        }
        let trail = distances
            .iter()
            .map(|(n, reps, d)| format!("n={n}: D={d:.4} ({reps} samples)"))
            .collect::<Vec<_>>()
            .join("; ");
        let &(n_last, ..) = distances.last().expect("at least one size");
        let spec = tag.spec(n_last, cfg.m.unwrap_or(n_last));
        let final_case = (sizes.len() as u16) * 4 + tag_case(tag);
        let final_samples = par_replicas(cfg, LIMIT_LAW, final_case, reps, |_, rng| {
            origin_limit_sample(spec, rng)
        })?;
        let final_verdict =
            ks_one_sample(&final_samples, |x| inv_gamma2_cdf(x).unwrap_or(0.0), cfg.alpha)?;
        checks.push(
            CheckResult::bounded("limit-ks-final", label, final_verdict.statistic, 0.03)
                .with_note(&format!("{reps} samples at n={n_last}")),
        );
        if distances.len() > 1 {
            let monotone = distances.windows(2).all(|w| w[1].2 < w[0].2);
            checks.push(CheckResult::flag(
                "limit-ks-monotone",
                label,
                monotone,
                &format!("distance to the limit law must shrink with n; {trail}"),
            ));
        }

        // exact factor means: the product over k of k/(k-1) telescopes to n
        let mut telescoped = true;
        for n in 2..=12usize {
            let spec = tag.spec(n, n);
            let product: Ratio<i64> =
                (2..=n).map(|k| origin_factor_mean(spec, k).unwrap()).product();
            telescoped &= product == Ratio::from_integer(n as i64);
        }
        checks.push(CheckResult::flag(
            "factor-telescoping",
            label,
            telescoped,
            "product of expected factors equals n exactly in rationals, n <= 12",
        ));

        // per-factor Monte Carlo means; k >= 3 keeps the factor variance
        // finite for the heavy-tailed spherical case
        let (nfac, mfac) = (12usize, 12usize);
        let fac_reps = cfg.replicas.unwrap_or(200_000);
        for k in 3..=10usize {
            let case = 16 + ((k - 3) as u16) * 4 + tag_case(tag);
            let samples = par_replicas(cfg, LIMIT_LAW, case, fac_reps, |_, rng| {
                Ok(match tag {
                    EnsembleTag::Sph => {
                        1.0 + sample_x(nfac as u32, rng)
                            / sample_beta(k as f64, (nfac + 1 - k) as f64, rng)
                    }
                    EnsembleTag::Tue => {
                        1.0 + (1.0 / sample_beta(k as f64, mfac as f64, rng) - 1.0)
                            * sample_y(mfac as u32, rng)
                    }
                    EnsembleTag::Cge => unreachable!("filtered above"),
                })
            })?;
            let acc = fold_mean(samples);
            let reference = k as f64 / (k as f64 - 1.0);
            checks.push(
                CheckResult::mean_within(
                    &format!("factor-mean-k{k}"),
                    label,
                    acc.mean(),
                    acc.standard_error(),
                    reference,
                    4.0,
                )
                .with_note(&format!("{fac_reps} draws at n=m=12")),
            );
        }
    }
    Ok(checks)
}

pub(super) fn run_integrals(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();

    // C_{1,2} = pi: integral of (1+|z|^2)^{-2} over the plane, estimated on
    // the disk of radius 20 (truncation bias 1/401, far under the 1% gate)
    let chunks = 512u64;
    let per_chunk = cfg.replicas.unwrap_or(60_000);
    let radius = 20.0f64;
    let area = std::f64::consts::PI * radius * radius;
    let accs = par_replicas(cfg, INTEGRALS, 0, chunks, |_, rng| {
        let mut acc = MomentAccumulator::new();
        for _ in 0..per_chunk {
            let r = radius * rng.uniform_open01().sqrt();
            let w = 1.0 + r * r;
            acc.push(area / (w * w));
        }
        Ok(acc)
    })?;
    let merged = accs
        .iter()
        .fold(MomentAccumulator::new(), |a, b| crate::stats::merge_moments(&a, b));
    let mut check = CheckResult::bounded(
        "plane-weight-constant",
        None,
        (merged.mean() - std::f64::consts::PI).abs() / std::f64::consts::PI,
        0.01,
    );
    check.estimate = Some(merged.mean());
    check.se = Some(merged.standard_error());
    check.reference = Some(std::f64::consts::PI);
    checks.push(check.with_note(&format!("{} uniform draws on the disk of radius 20", chunks * per_chunk)));

    // D_{2,1} = pi^2/6: integral of (1 - ||v||^2) over the unit ball of C^2;
    // the integrand is radial, so sampling the radial law r^4 ~ U suffices
    let ball_chunks = 64u64;
    let ball_per_chunk = cfg.replicas.unwrap_or(6_250);
    let volume = std::f64::consts::PI * std::f64::consts::PI / 2.0;
    let accs = par_replicas(cfg, INTEGRALS, 1, ball_chunks, |_, rng| {
        let mut acc = MomentAccumulator::new();
        for _ in 0..ball_per_chunk {
            let r2 = rng.uniform_open01().sqrt();
            acc.push(volume * (1.0 - r2));
        }
        Ok(acc)
    })?;
    let merged = accs
        .iter()
        .fold(MomentAccumulator::new(), |a, b| crate::stats::merge_moments(&a, b));
    let reference = std::f64::consts::PI * std::f64::consts::PI / 6.0;
    let mut check = CheckResult::bounded(
        "ball-weight-constant",
        None,
        (merged.mean() - reference).abs() / reference,
        0.01,
    );
    check.estimate = Some(merged.mean());
    check.se = Some(merged.standard_error());
    check.reference = Some(reference);
    checks.push(check.with_note(&format!("{} radial draws on the unit ball of C^2", ball_chunks * ball_per_chunk)));

    // projection lemmas at n = 3, p = 8: for any fixed matrix S and vector a,
    // |a* S v|^2 / ||S* a||^2 follows the factor law X_4 (plane case) and
    // Y_12 (ball case)
    let mut setup = RngStream::new(cfg.seed, super::stream_key(INTEGRALS, 2, 0));
    let a: Vec<Complex64> = (0..3).map(|_| complex_gaussian(1.0, &mut setup)).collect();
    let b = ComplexMatrix::from_fn(3, 3, |_, _| complex_gaussian(1.0, &mut setup));
    let mut s = b.mul(&b.adjoint());
    for i in 0..3 {
        s[(i, i)] += Complex64::ONE;
    }
    let sa = s.adjoint().mul_vec(&a);
    let sa_norm2: f64 = sa.iter().map(|z| z.norm_sqr()).sum();
    let reps = cfg.replicas.unwrap_or(10_000);
    let project = move |u: &[Complex64]| -> f64 {
        let dot: Complex64 = sa.iter().zip(u).map(|(x, y)| x.conj() * y).sum();
        dot.norm_sqr() / sa_norm2
    };

    let plane = par_replicas(cfg, INTEGRALS, 3, reps, |_, rng| Ok(project(&sample_v(3, 8, rng)?)))?;
    let plane_law = par_replicas(cfg, INTEGRALS, 4, reps, |_, rng| Ok(sample_x(4, rng)))?;
    let verdict = ks_two_sample(&plane, &plane_law, cfg.alpha)?;
    checks.push(
        CheckResult::ks("plane-projection-law", None, &verdict)
            .with_note("fixed random S and a; |a*Sv|^2 against the heavy-tailed factor law"),
    );

    let ball = par_replicas(cfg, INTEGRALS, 5, reps, |_, rng| Ok(project(&sample_w(3, 8, rng))))?;
    let ball_law = par_replicas(cfg, INTEGRALS, 6, reps, |_, rng| Ok(sample_y(12, rng)))?;
    let verdict = ks_two_sample(&ball, &ball_law, cfg.alpha)?;
    checks.push(
        CheckResult::ks("ball-projection-law", None, &verdict)
            .with_note("fixed random S and a; |a*Sw|^2 against the beta factor law"),
    );

    Ok(checks)
}

pub(super) fn run_invariance(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let n = cfg.n.unwrap_or(100);
    let count = cfg.replicas.unwrap_or(500);
    let bands = [RadiusBand { lo: 0.0, hi: 0.3 }, RadiusBand { lo: 0.9, hi: 1.5 }];
    let tags: Vec<EnsembleTag> = cfg
        .tags()
        .into_iter()
        .filter(|t| !matches!(t, EnsembleTag::Tue))
        .collect();
    if tags.is_empty() {
        return Err(Error::InvalidConfig(
            "the invariance probe runs on the spherical law with a Ginibre control".into(),
        ));
    }
    let mut checks = Vec::new();
    for tag in tags {
        let spec = tag.spec(n, cfg.m.unwrap_or(n));
        let spectra = par_replicas(cfg, INVARIANCE, tag_case(tag), count, |_, rng| {
            let a = sample_matrix(spec, rng)?;
            Ok(schur(&a)?.eigenvalues)
        })?;
        let medians = quenched_invariance_probe(&spectra, spec, &bands)?;
        let inner = &medians[0];
        let outer = &medians[1];
        let rel = (inner.median - outer.median).abs() / outer.median;
        let note = format!(
            "inner |z|<0.3 median {:.3} over {} values; outer 0.9<|z|<1.5 median {:.3} over {} values",
            inner.median, inner.count, outer.median, outer.count
        );
        match tag {
            EnsembleTag::Sph => {
                checks.push(
                    CheckResult::bounded("band-median-agreement", Some("sph"), rel, 0.05)
                        .with_note(&note),
                );
            }
            EnsembleTag::Cge => {
                // the control must separate: a flat profile here would mean
                // the probe is insensitive, not that Ginibre is invariant
                let mut check = CheckResult::flag(
                    "band-median-control-separates",
                    Some("cge"),
                    rel > 0.10,
                    &note,
                );
                check.statistic = Some(rel);
                check.critical = Some(0.10);
                checks.push(check);
            }
            EnsembleTag::Tue => unreachable!("filtered above"),
        }
    }
    Ok(checks)
}
