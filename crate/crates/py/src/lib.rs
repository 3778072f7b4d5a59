//! Python bindings. Everything is a stateless function: randomness comes in
//! through an explicit (seed, stream) pair, matrices cross the boundary as
//! row-major lists of lists of complex numbers, and core errors surface as
//! ValueError with the library's message text.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use overlap_lab_core::conditional;
use overlap_lab_core::distributions::RngStream;
use overlap_lab_core::ensembles::{self, EnsembleSpec};
use overlap_lab_core::experiments::{
    run_experiment as run_experiment_core, EnsembleTag, VerifyConfig, DEFAULT_ALPHA, DEFAULT_SEED,
};
use overlap_lab_core::formulas;
use overlap_lab_core::linalg::{schur as schur_core, ComplexMatrix, Spectrum};
use overlap_lab_core::overlaps;
use overlap_lab_core::stats;

fn err(e: overlap_lab_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_spec(ensemble: &str, n: usize, m: Option<usize>) -> PyResult<EnsembleSpec> {
    let spec = match ensemble {
        "cge" => EnsembleSpec::Ginibre { n },
        "sph" => EnsembleSpec::Spherical { n },
        "tue" => EnsembleSpec::TruncatedUnitary { n, m: m.unwrap_or(n) },
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown ensemble {other:?}; expected one of cge, sph, tue"
            )))
        }
    };
    spec.validate().map_err(err)?;
    Ok(spec)
}

fn to_matrix(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    let r = rows.len();
    let c = rows.first().map(Vec::len).unwrap_or(0);
    if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(PyValueError::new_err("matrix must be a non-empty rectangular list of lists"));
    }
    ComplexMatrix::new(r, c, rows.into_iter().flatten().collect()).map_err(err)
}

fn from_matrix(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn spectrum(lambdas: Vec<Complex64>) -> PyResult<Spectrum> {
    Spectrum::new(lambdas).map_err(err)
}

/// Eigenvalues of one matrix draw, in Schur deflation order.
#[pyfunction]
#[pyo3(signature = (ensemble, n, m=None, seed=0, stream=0))]
fn sample_eigenvalues(
    ensemble: &str,
    n: usize,
    m: Option<usize>,
    seed: u64,
    stream: u64,
) -> PyResult<Vec<Complex64>> {
    let spec = parse_spec(ensemble, n, m)?;
    let mut rng = RngStream::new(seed, stream);
    let a = ensembles::sample_matrix(spec, &mut rng).map_err(err)?;
    let form = schur_core(&a).map_err(err)?;
    Ok(form.eigenvalues.values().to_vec())
}

/// One raw matrix draw as row-major nested lists.
#[pyfunction]
#[pyo3(signature = (ensemble, n, m=None, seed=0, stream=0))]
fn sample_matrix(
    ensemble: &str,
    n: usize,
    m: Option<usize>,
    seed: u64,
    stream: u64,
) -> PyResult<Vec<Vec<Complex64>>> {
    let spec = parse_spec(ensemble, n, m)?;
    let mut rng = RngStream::new(seed, stream);
    let a = ensembles::sample_matrix(spec, &mut rng).map_err(err)?;
    Ok(from_matrix(&a))
}

/// Unitary triangularization a = u t u*; returns (u, t, eigenvalues).
#[pyfunction]
fn schur_decompose(
    a: Vec<Vec<Complex64>>,
) -> PyResult<(Vec<Vec<Complex64>>, Vec<Vec<Complex64>>, Vec<Complex64>)> {
    let a = to_matrix(a)?;
    let form = schur_core(&a).map_err(err)?;
    Ok((from_matrix(&form.u), from_matrix(&form.t), form.eigenvalues.values().to_vec()))
}

/// Full eigenvector overlap matrix O_ij of a square matrix.
#[pyfunction]
fn overlap_matrix(a: Vec<Vec<Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
    let a = to_matrix(a)?;
    let o = overlaps::overlap_matrix(&a).map_err(err)?;
    Ok(from_matrix(o.entries()))
}

/// Diagonal overlaps O_ii (squared eigenvalue condition numbers).
#[pyfunction]
fn overlap_diagonal(a: Vec<Vec<Complex64>>) -> PyResult<Vec<f64>> {
    let a = to_matrix(a)?;
    let o = overlaps::overlap_matrix(&a).map_err(err)?;
    Ok(o.entries().diag().iter().map(|z| z.re).collect())
}

/// (O_11, O_12) of an upper-triangular matrix via the column recurrence.
#[pyfunction]
fn overlap_pair_from_t(t: Vec<Vec<Complex64>>) -> PyResult<(f64, Complex64)> {
    let t = to_matrix(t)?;
    overlaps::overlap_pair_recurrence(&t).map_err(err)
}

/// Both sides of the mixed-trace identity sum_ij O_ij lam_i conj(lam_j)
/// = sum |a_ij|^2 for one matrix; they agree up to roundoff.
#[pyfunction]
fn mixed_trace_sides(a: Vec<Vec<Complex64>>) -> PyResult<(f64, f64)> {
    let a = to_matrix(a)?;
    let o = overlaps::overlap_matrix(&a).map_err(err)?;
    Ok(overlaps::mixed_trace(&a, &o))
}

/// Triangular factor drawn conditionally on a prescribed spectrum.
#[pyfunction]
#[pyo3(signature = (ensemble, lambdas, m=None, seed=0, stream=0))]
fn conditional_schur_t(
    ensemble: &str,
    lambdas: Vec<Complex64>,
    m: Option<usize>,
    seed: u64,
    stream: u64,
) -> PyResult<Vec<Vec<Complex64>>> {
    let spec = parse_spec(ensemble, lambdas.len(), m)?;
    let lam = spectrum(lambdas)?;
    let mut rng = RngStream::new(seed, stream);
    let draw = conditional::conditional_schur(&lam, spec, &mut rng).map_err(err)?;
    Ok(from_matrix(&draw.t))
}

/// One sample of O_11 conditioned on the spectrum, drawn from the
/// product-of-independent-factors decomposition.
#[pyfunction]
#[pyo3(signature = (ensemble, lambdas, m=None, seed=0, stream=0))]
fn decompose_ov11(
    ensemble: &str,
    lambdas: Vec<Complex64>,
    m: Option<usize>,
    seed: u64,
    stream: u64,
) -> PyResult<f64> {
    let spec = parse_spec(ensemble, lambdas.len(), m)?;
    let lam = spectrum(lambdas)?;
    let mut rng = RngStream::new(seed, stream);
    conditional::decompose_ov11_sample(&lam, spec, &mut rng).map_err(err)
}

/// One sample of O_11/n conditioned on an eigenvalue at the origin.
#[pyfunction]
#[pyo3(signature = (ensemble, n, m=None, seed=0, stream=0))]
fn origin_limit_sample(
    ensemble: &str,
    n: usize,
    m: Option<usize>,
    seed: u64,
    stream: u64,
) -> PyResult<f64> {
    let spec = parse_spec(ensemble, n, m)?;
    let mut rng = RngStream::new(seed, stream);
    conditional::origin_limit_sample(spec, &mut rng).map_err(err)
}

/// Closed-form conditional expectation of O_11 given the spectrum.
#[pyfunction]
#[pyo3(signature = (ensemble, lambdas, m=None))]
fn quenched_ov11(ensemble: &str, lambdas: Vec<Complex64>, m: Option<usize>) -> PyResult<f64> {
    let spec = parse_spec(ensemble, lambdas.len(), m)?;
    formulas::quenched_ov11(&spectrum(lambdas)?, spec).map_err(err)
}

/// Closed-form conditional expectation of O_12 given the spectrum.
/// `printed_lead` switches the leading factor to the variant that drops the
/// radial corrections; the two differ off the Ginibre case.
#[pyfunction]
#[pyo3(signature = (ensemble, lambdas, m=None, printed_lead=false))]
fn quenched_ov12(
    ensemble: &str,
    lambdas: Vec<Complex64>,
    m: Option<usize>,
    printed_lead: bool,
) -> PyResult<Complex64> {
    let spec = parse_spec(ensemble, lambdas.len(), m)?;
    formulas::quenched_ov12(&spectrum(lambdas)?, spec, printed_lead).map_err(err)
}

/// Closed-form conditional expectation of the squared Frobenius norm scaled
/// by 1/n. `printed_tue` selects the truncated-unitary variant that breaks
/// down near the unit circle; it is kept for comparison.
#[pyfunction]
#[pyo3(signature = (ensemble, lambdas, m=None, printed_tue=false))]
fn quenched_trace(
    ensemble: &str,
    lambdas: Vec<Complex64>,
    m: Option<usize>,
    printed_tue: bool,
) -> PyResult<f64> {
    let spec = parse_spec(ensemble, lambdas.len(), m)?;
    formulas::quenched_trace(&spectrum(lambdas)?, spec, printed_tue).map_err(err)
}

/// CDF (1 + 1/x) exp(-1/x) of the heavy-tail limit of O_11/n at the origin.
#[pyfunction]
fn inv_gamma2_cdf(x: f64) -> PyResult<f64> {
    formulas::inv_gamma2_cdf(x).map_err(err)
}

#[pyfunction]
fn inv_gamma2_median() -> f64 {
    formulas::inv_gamma2_median()
}

/// Exact mean of the k-th factor in the origin decomposition, as a
/// (numerator, denominator) pair.
#[pyfunction]
#[pyo3(signature = (ensemble, n, k, m=None))]
fn origin_factor_mean(ensemble: &str, n: usize, k: usize, m: Option<usize>) -> PyResult<(i64, i64)> {
    let spec = parse_spec(ensemble, n, m)?;
    let ratio = formulas::origin_factor_mean(spec, k).map_err(err)?;
    Ok((*ratio.numer(), *ratio.denom()))
}

/// Squared eigenvalue moduli drawn as independent radial laws; set
/// `conditioned` to pin the smallest one to the origin.
#[pyfunction]
#[pyo3(signature = (ensemble, n, m=None, conditioned=false, seed=0, stream=0))]
fn kostlan_radii(
    ensemble: &str,
    n: usize,
    m: Option<usize>,
    conditioned: bool,
    seed: u64,
    stream: u64,
) -> PyResult<Vec<f64>> {
    let spec = parse_spec(ensemble, n, m)?;
    let mut rng = RngStream::new(seed, stream);
    ensembles::kostlan_radii(spec, conditioned, &mut rng).map_err(err)
}

/// One-sample KS test against the origin limit law.
/// Returns (statistic, critical, pass).
#[pyfunction]
#[pyo3(signature = (samples, alpha=1e-3))]
fn ks_against_limit_law(samples: Vec<f64>, alpha: f64) -> PyResult<(f64, f64, bool)> {
    let v = stats::ks_one_sample(&samples, |x| formulas::inv_gamma2_cdf(x).unwrap_or(0.0), alpha)
        .map_err(err)?;
    Ok((v.statistic, v.critical, v.pass))
}

/// Two-sample KS test. Returns (statistic, critical, pass).
#[pyfunction]
#[pyo3(signature = (a, b, alpha=1e-3))]
fn ks_two_sample(a: Vec<f64>, b: Vec<f64>, alpha: f64) -> PyResult<(f64, f64, bool)> {
    let v = stats::ks_two_sample(&a, &b, alpha).map_err(err)?;
    Ok((v.statistic, v.critical, v.pass))
}

/// Stereographic image (x, y, z) of a plane point on the unit sphere.
#[pyfunction]
fn stereo_project(z: Complex64) -> (f64, f64, f64) {
    let p = ensembles::stereo_project(z);
    (p.x, p.y, p.z)
}

#[pyfunction]
fn experiment_names() -> Vec<&'static str> {
    overlap_lab_core::experiments::experiment_names().to_vec()
}

/// Run one named verification suite; returns the JSON report text.
#[pyfunction]
#[pyo3(signature = (name, seed=None, alpha=None, ensemble=None, n=None, m=None, replicas=None, threads=1))]
#[allow(clippy::too_many_arguments)]
fn run_experiment(
    name: &str,
    seed: Option<u64>,
    alpha: Option<f64>,
    ensemble: Option<&str>,
    n: Option<usize>,
    m: Option<usize>,
    replicas: Option<u64>,
    threads: usize,
) -> PyResult<String> {
    let tag = match ensemble {
        Some(e) => Some(e.parse::<EnsembleTag>().map_err(err)?),
        None => None,
    };
    let cfg = VerifyConfig {
        seed: seed.unwrap_or(DEFAULT_SEED),
        alpha: alpha.unwrap_or(DEFAULT_ALPHA),
        threads,
        ensemble: tag,
        n,
        m,
        replicas,
    };
    Ok(run_experiment_core(name, &cfg).map_err(err)?.to_json())
}

#[pymodule]
fn overlap_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    m.add("DEFAULT_ALPHA", DEFAULT_ALPHA)?;
    m.add_function(wrap_pyfunction!(sample_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(sample_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(schur_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(overlap_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(overlap_diagonal, m)?)?;
    m.add_function(wrap_pyfunction!(overlap_pair_from_t, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_trace_sides, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_schur_t, m)?)?;
    m.add_function(wrap_pyfunction!(decompose_ov11, m)?)?;
    m.add_function(wrap_pyfunction!(origin_limit_sample, m)?)?;
    m.add_function(wrap_pyfunction!(quenched_ov11, m)?)?;
    m.add_function(wrap_pyfunction!(quenched_ov12, m)?)?;
    m.add_function(wrap_pyfunction!(quenched_trace, m)?)?;
    m.add_function(wrap_pyfunction!(inv_gamma2_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(inv_gamma2_median, m)?)?;
    m.add_function(wrap_pyfunction!(origin_factor_mean, m)?)?;
    m.add_function(wrap_pyfunction!(kostlan_radii, m)?)?;
    m.add_function(wrap_pyfunction!(ks_against_limit_law, m)?)?;
    m.add_function(wrap_pyfunction!(ks_two_sample, m)?)?;
    m.add_function(wrap_pyfunction!(stereo_project, m)?)?;
    m.add_function(wrap_pyfunction!(experiment_names, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
