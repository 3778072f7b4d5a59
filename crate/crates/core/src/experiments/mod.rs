//! Verification experiments and the replica plumbing behind the command-line
//! front end.
//!
//! Reproducibility contract: every replica draws from its own counter-based
//! stream keyed by (suite, case, replica), replicas are collected in index
//! order, and all reductions run sequentially over that order. Reports are
//! therefore byte-identical across thread counts for a fixed seed.

pub mod report;
mod suites;

pub use report::{CheckResult, ExperimentReport};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::distributions::RngStream;
use crate::ensembles::{
    sample_matrix, stereo_project, EnsembleSpec, SpherePoint,
};
use crate::linalg::{schur, Spectrum};
use crate::overlaps::overlap_matrix;
use crate::stats::{ks_one_sample, median, KsVerdict};
use crate::{Error, Result};

/// Seed used when neither the command line nor the environment supplies one.
/// Pinned so that released verification suites are reproducible runs, not
/// moving targets.
pub const DEFAULT_SEED: u64 = 20260818;

/// Significance level shared by every distributional check.
pub const DEFAULT_ALPHA: f64 = 1e-3;

/// Ensemble selector as spelled on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnsembleTag {
    Cge,
    Sph,
    Tue,
}

impl EnsembleTag {
    pub fn label(self) -> &'static str {
        match self {
            EnsembleTag::Cge => "cge",
            EnsembleTag::Sph => "sph",
            EnsembleTag::Tue => "tue",
        }
    }

    pub fn spec(self, n: usize, m: usize) -> EnsembleSpec {
        match self {
            EnsembleTag::Cge => EnsembleSpec::Ginibre { n },
            EnsembleTag::Sph => EnsembleSpec::Spherical { n },
            EnsembleTag::Tue => EnsembleSpec::TruncatedUnitary { n, m },
        }
    }
}

impl std::str::FromStr for EnsembleTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cge" => Ok(EnsembleTag::Cge),
            "sph" => Ok(EnsembleTag::Sph),
            "tue" => Ok(EnsembleTag::Tue),
            other => Err(Error::UnsupportedEnsemble(other.to_string())),
        }
    }
}

/// Knobs shared by all experiments. `None` fields fall back to per-suite
/// defaults sized for the release gate.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub alpha: f64,
    pub threads: usize,
    pub ensemble: Option<EnsembleTag>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub replicas: Option<u64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            alpha: DEFAULT_ALPHA,
            threads: 1,
            ensemble: None,
            n: None,
            m: None,
            replicas: None,
        }
    }
}

impl VerifyConfig {
    pub(crate) fn tags(&self) -> Vec<EnsembleTag> {
        match self.ensemble {
            Some(t) => vec![t],
            None => vec![EnsembleTag::Cge, EnsembleTag::Sph, EnsembleTag::Tue],
        }
    }
}

/// Stream key layout: suite in the top 16 bits, case in the next 16, replica
/// in the low 32. Distinct (suite, case) pairs can never collide even when
/// replica counts grow.
pub fn stream_key(suite: u16, case: u16, replica: u64) -> u64 {
    debug_assert!(replica < (1u64 << 32), "replica index exceeds the stream layout");
    ((suite as u64) << 48) | ((case as u64) << 32) | replica
}

/// Run `f` once per replica on its own stream, collecting results in replica
/// order regardless of thread count.
pub(crate) fn par_replicas<T, F>(
    cfg: &VerifyConfig,
    suite: u16,
    case: u16,
    replicas: u64,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut RngStream) -> Result<T> + Sync,
{
    let run = |r: u64| {
        let mut rng = RngStream::new(cfg.seed, stream_key(suite, case, r));
        f(r, &mut rng)
    };
    if cfg.threads <= 1 {
        (0..replicas).map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        pool.install(|| (0..replicas).into_par_iter().map(run).collect())
    }
}

const SPECTRUM_TABLE: [(f64, f64); 16] = [
    (0.31, 0.42),
    (-0.55, 0.12),
    (0.07, -0.61),
    (-0.28, -0.33),
    (0.64, 0.05),
    (-0.11, 0.66),
    (0.45, -0.38),
    (-0.62, -0.49),
    (0.02, 0.14),
    (-0.39, 0.47),
    (0.71, -0.18),
    (-0.70, 0.31),
    (0.24, -0.19),
    (0.52, 0.58),
    (-0.05, -0.44),
    (-0.33, 0.08),
];

/// Frozen well-separated spectrum inside the unit disk, usable by every
/// ensemble. Supports n up to 16.
pub fn reference_spectrum(n: usize) -> Result<Spectrum> {
    if n == 0 || n > SPECTRUM_TABLE.len() {
        return Err(Error::InvalidConfig(format!(
            "reference spectrum supports 1..={} eigenvalues, got {n}",
            SPECTRUM_TABLE.len()
        )));
    }
    Spectrum::new(
        SPECTRUM_TABLE[..n]
            .iter()
            .map(|&(re, im)| Complex64::new(re, im))
            .collect(),
    )
}

/// Frozen spectrum with one eigenvalue near the unit circle: the regime where
/// the retained printed truncated-unitary trace form breaks down.
pub fn edge_spectrum() -> Spectrum {
    let pts = [
        (0.95, 0.0),
        (-0.55, 0.12),
        (0.07, -0.61),
        (-0.28, -0.33),
        (0.30, 0.42),
        (-0.11, 0.66),
        (0.45, -0.38),
        (-0.62, -0.49),
    ];
    Spectrum::new(pts.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
        .expect("frozen spectrum is finite and nonempty")
}

/// Names of the shipped experiments, in suite-id order.
pub fn experiment_names() -> &'static [&'static str] {
    &[
        "schur",
        "identities",
        "quenched-ov11",
        "quenched-ov12",
        "quenched-trace",
        "decomposition-ks",
        "kostlan",
        "limit-law",
        "integrals",
        "invariance",
    ]
}

/// Run one named experiment and gather its checks into a report.
pub fn run_experiment(name: &str, cfg: &VerifyConfig) -> Result<ExperimentReport> {
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "alpha must lie in (0, 1), got {}",
            cfg.alpha
        )));
    }
    let checks = match name {
        "schur" => suites::run_schur(cfg)?,
        "identities" => suites::run_identities(cfg)?,
        "quenched-ov11" => suites::run_quenched_ov11(cfg)?,
        "quenched-ov12" => suites::run_quenched_ov12(cfg)?,
        "quenched-trace" => suites::run_quenched_trace(cfg)?,
        "decomposition-ks" => suites::run_decomposition_ks(cfg)?,
        "kostlan" => suites::run_kostlan(cfg)?,
        "limit-law" => suites::run_limit_law(cfg)?,
        "integrals" => suites::run_integrals(cfg)?,
        "invariance" => suites::run_invariance(cfg)?,
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown experiment {other:?}; available: {}",
                experiment_names().join(", ")
            )))
        }
    };
    Ok(ExperimentReport::new(name, cfg.seed, cfg.alpha, checks))
}

/// One eigenvalue of one replica, optionally lifted to the sphere.
#[derive(Clone, Copy, Debug)]
pub struct CloudPoint {
    pub replica: u64,
    pub index: usize,
    pub value: Complex64,
    pub sphere: Option<SpherePoint>,
}

const CLOUD_SUITE: u16 = 11;
const HIST_SUITE: u16 = 12;

fn case_of(spec: EnsembleSpec) -> u16 {
    match spec {
        EnsembleSpec::Ginibre { .. } => 0,
        EnsembleSpec::Spherical { .. } => 1,
        EnsembleSpec::TruncatedUnitary { .. } => 2,
    }
}

/// Eigenvalue clouds for the `sample` command: one spectrum per replica, in
/// Schur order.
pub fn eigenvalue_cloud(
    spec: EnsembleSpec,
    replicas: u64,
    seed: u64,
    threads: usize,
    sphere: bool,
) -> Result<Vec<CloudPoint>> {
    spec.validate()?;
    let cfg = VerifyConfig { seed, threads, ..VerifyConfig::default() };
    let per_replica = par_replicas(&cfg, CLOUD_SUITE, case_of(spec), replicas, |r, rng| {
        let a = sample_matrix(spec, rng)?;
        let form = schur(&a)?;
        let points = form
            .eigenvalues
            .values()
            .iter()
            .enumerate()
            .map(|(i, &l)| CloudPoint {
                replica: r,
                index: i,
                value: l,
                sphere: sphere.then(|| stereo_project(l)),
            })
            .collect::<Vec<_>>();
        Ok(points)
    })?;
    Ok(per_replica.into_iter().flatten().collect())
}

/// One diagonal-overlap observation for the `overlap-hist` command.
#[derive(Clone, Copy, Debug)]
pub struct OverlapHistRow {
    pub replica: u64,
    pub value: Complex64,
    pub o_scaled: f64,
}

/// Summary emitted alongside the per-eigenvalue rows.
#[derive(Clone, Debug, serde::Serialize)]
pub struct OverlapHistSummary {
    pub schema: u32,
    pub ensemble: String,
    pub n: usize,
    pub m: Option<usize>,
    pub replicas: u64,
    pub window: f64,
    pub rows: usize,
    pub skipped: u64,
    pub median: f64,
    pub ks: KsVerdict,
}

/// Diagonal overlaps of all eigenvalues with |lambda| < window, scaled by
/// 1/N, across independent replicas. Replicas whose spectra are too clustered
/// to resolve are counted in `skipped` rather than aborting the run. The
/// summary holds the window median and a KS comparison against the
/// inverse-gamma-2 limit law (informational at moderate N, where finite-size
/// deviations are real).
pub fn overlap_histogram(
    spec: EnsembleSpec,
    replicas: u64,
    seed: u64,
    threads: usize,
    window: f64,
    alpha: f64,
) -> Result<(Vec<OverlapHistRow>, OverlapHistSummary)> {
    spec.validate()?;
    if !(window > 0.0) || !window.is_finite() {
        return Err(Error::InvalidConfig(format!("window must be positive, got {window}")));
    }
    let n = spec.dim();
    let cfg = VerifyConfig { seed, threads, ..VerifyConfig::default() };
    let per_replica = par_replicas(&cfg, HIST_SUITE, case_of(spec), replicas, |r, rng| {
        let a = sample_matrix(spec, rng)?;
        let overlaps = match overlap_matrix(&a) {
            Ok(o) => o,
            Err(Error::DegenerateSpectrum { .. }) | Err(Error::NonConvergence { .. }) => {
                return Ok(None)
            }
            Err(e) => return Err(e),
        };
        let mut rows = Vec::new();
        for i in 0..overlaps.dim() {
            let l = overlaps.spectrum()[i];
            if l.norm() < window {
                rows.push(OverlapHistRow {
                    replica: r,
                    value: l,
                    o_scaled: overlaps[(i, i)].re / n as f64,
                });
            }
        }
        Ok(Some(rows))
    })?;

    let mut rows = Vec::new();
    let mut skipped = 0u64;
    for item in per_replica {
        match item {
            Some(mut r) => rows.append(&mut r),
            None => skipped += 1,
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("no eigenvalues fell inside the window"));
    }
    let values: Vec<f64> = rows.iter().map(|r| r.o_scaled).collect();
    let med = median(&values).expect("nonempty window");
    let ks = ks_one_sample(&values, |x| crate::formulas::inv_gamma2_cdf(x).unwrap_or(0.0), alpha)?;
    let summary = OverlapHistSummary {
        schema: 1,
        ensemble: spec.label().to_string(),
        n,
        m: match spec {
            EnsembleSpec::TruncatedUnitary { m, .. } => Some(m),
            _ => None,
        },
        replicas,
        window,
        rows: rows.len(),
        skipped,
        median: med,
        ks,
    };
    Ok((rows, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_keys_separate_suites_cases_and_replicas() {
        let a = stream_key(1, 0, 0);
        let b = stream_key(1, 1, 0);
        let c = stream_key(2, 0, 0);
        let d = stream_key(1, 0, 1);
        let keys = [a, b, c, d];
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                assert_ne!(keys[i], keys[j]);
            }
        }
        assert_eq!(stream_key(0, 0, 5), 5);
        assert_eq!(stream_key(1, 0, 0), 1 << 48);
    }

    #[test]
    fn par_replicas_is_thread_count_invariant() {
        let single = VerifyConfig { threads: 1, ..VerifyConfig::default() };
        let multi = VerifyConfig { threads: 4, ..VerifyConfig::default() };
        let job = |_r: u64, rng: &mut RngStream| Ok(rng.uniform_open01());
        let a = par_replicas(&single, 9, 9, 64, job).unwrap();
        let b = par_replicas(&multi, 9, 9, 64, job).unwrap();
        assert_eq!(a, b);
        // distinct replicas see distinct streams
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn reference_spectra_are_well_separated_and_in_disk() {
        for n in [1, 6, 8, 16] {
            let s = reference_spectrum(n).unwrap();
            assert_eq!(s.len(), n);
            if n > 1 {
                assert!(s.min_gap() > 0.05, "n={n} gap {}", s.min_gap());
            }
            assert!(s.values().iter().all(|l| l.norm() < 1.0));
        }
        assert!(reference_spectrum(0).is_err());
        assert!(reference_spectrum(17).is_err());
        let edge = edge_spectrum();
        assert_eq!(edge.len(), 8);
        assert!(edge.min_gap() > 0.05);
        assert!((edge[0].re - 0.95).abs() < 1e-15);
    }

    #[test]
    fn unknown_experiment_is_rejected_with_the_menu() {
        let err = run_experiment("nope", &VerifyConfig::default()).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("nope") && msg.contains("kostlan"), "{msg}");
    }

    #[test]
    fn eigenvalue_cloud_shapes_and_determinism() {
        let spec = EnsembleSpec::Ginibre { n: 6 };
        let a = eigenvalue_cloud(spec, 3, 11, 1, true).unwrap();
        let b = eigenvalue_cloud(spec, 3, 11, 2, true).unwrap();
        assert_eq!(a.len(), 18);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.replica, y.replica);
            assert_eq!(x.index, y.index);
            assert_eq!(x.value, y.value);
            let (sx, sy) = (x.sphere.unwrap(), y.sphere.unwrap());
            assert_eq!((sx.x, sx.y, sx.z), (sy.x, sy.y, sy.z));
        }
        let flat = eigenvalue_cloud(spec, 1, 11, 1, false).unwrap();
        assert!(flat.iter().all(|p| p.sphere.is_none()));
    }

    #[test]
    fn histogram_scaling_matches_a_direct_recomputation() {
        // rebuild the replica stream by hand and recompute O_ii/n directly
        let spec = EnsembleSpec::Ginibre { n: 2 };
        let (rows, summary) = overlap_histogram(spec, 1, 5, 1, 50.0, 1e-3).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(summary.skipped, 0);
        let mut rng = RngStream::new(5, stream_key(HIST_SUITE, 0, 0));
        let a = sample_matrix(spec, &mut rng).unwrap();
        let o = overlap_matrix(&a).unwrap();
        for (i, row) in rows.iter().enumerate() {
            assert!((row.o_scaled - o[(i, i)].re / 2.0).abs() < 1e-12);
            assert_eq!(row.value, o.spectrum()[i]);
        }
    }

    #[test]
    fn overlap_histogram_windows_and_errors() {
        let spec = EnsembleSpec::Spherical { n: 12 };
        let (rows, summary) = overlap_histogram(spec, 4, 3, 1, 0.9, 1e-3).unwrap();
        assert!(!rows.is_empty());
        assert_eq!(summary.rows, rows.len());
        assert!(rows.iter().all(|r| r.value.norm() < 0.9));
        assert!(rows.iter().all(|r| r.o_scaled > 0.0));
        assert_eq!(summary.ensemble, "sph");
        assert!(summary.median > 0.0);

        // a window that excludes everything is a usage error
        assert!(matches!(
            overlap_histogram(spec, 2, 3, 1, 1e-9, 1e-3),
            Err(Error::EmptyInput(_))
        ));
        assert!(overlap_histogram(spec, 2, 3, 1, -1.0, 1e-3).is_err());
    }
}
