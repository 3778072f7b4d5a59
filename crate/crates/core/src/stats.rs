//! Streaming moments with parallel-mergeable state and Kolmogorov-Smirnov
//! verdicts on materialized samples.

use crate::{Error, Result};

/// Welford accumulator. `m2` is the running sum of squared deviations, so the
/// sample variance is m2/(count-1). An optional value store supports
/// quantiles; merging concatenates stores.
#[derive(Clone, Debug, Default)]
pub struct MomentAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
    store: Option<Vec<f64>>,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_store() -> Self {
        Self { store: Some(Vec::new()), ..Self::default() }
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        if let Some(store) = &mut self.store {
            store.push(x);
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sum_squared_deviations(&self) -> f64 {
        self.m2
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        self.m2 / (self.count - 1) as f64
    }

    pub fn standard_error(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        (self.m2 / (self.count as f64 * (self.count - 1) as f64)).sqrt()
    }

    pub fn median(&self) -> Option<f64> {
        self.store.as_deref().and_then(median)
    }
}

/// Chan parallel combination of two accumulators; exact when either side is
/// empty, associative up to rounding otherwise.
pub fn merge_moments(a: &MomentAccumulator, b: &MomentAccumulator) -> MomentAccumulator {
    if a.count == 0 {
        return b.clone();
    }
    if b.count == 0 {
        return a.clone();
    }
    let count = a.count + b.count;
    let delta = b.mean - a.mean;
    let nb_over_n = b.count as f64 / count as f64;
    let mean = a.mean + delta * nb_over_n;
    let m2 = a.m2 + b.m2 + delta * delta * (a.count as f64) * nb_over_n;
    let store = match (&a.store, &b.store) {
        (Some(sa), Some(sb)) => {
            let mut s = Vec::with_capacity(sa.len() + sb.len());
            s.extend_from_slice(sa);
            s.extend_from_slice(sb);
            Some(s)
        }
        (Some(sa), None) => Some(sa.clone()),
        (None, Some(sb)) => Some(sb.clone()),
        (None, None) => None,
    };
    MomentAccumulator { count, mean, m2, store }
}

/// Middle order statistic; mean of the two middles for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    let n = sorted.len();
    Some(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    })
}

/// Kolmogorov-Smirnov outcome at significance alpha. `m` is zero for
/// one-sample tests.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct KsVerdict {
    pub statistic: f64,
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub critical: f64,
    pub pass: bool,
}

/// Asymptotic critical coefficient c(alpha) = sqrt(-ln(alpha/2)/2).
fn ks_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// Sup distance between the empirical CDF and a reference CDF, evaluated with
/// both one-sided gaps at every sorted sample point.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, alpha: f64) -> Result<KsVerdict> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("ks_one_sample"));
    }
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must be in (0,1)");
    let n = samples.len();
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        debug_assert!((-1e-12..=1.0 + 1e-12).contains(&f), "cdf out of range: {f}");
        d = d.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f);
    }
    let critical = ks_coefficient(alpha) / nf.sqrt();
    Ok(KsVerdict { statistic: d, n, m: 0, alpha, critical, pass: d <= critical })
}

/// Two-sample sup distance over the merged order, advancing through tied
/// values on both sides before measuring the gap.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<KsVerdict> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("ks_two_sample"));
    }
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must be in (0,1)");
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    sb.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    let (n, m) = (sa.len(), sb.len());
    let (nf, mf) = (n as f64, m as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n || j < m {
        let v = match (sa.get(i), sb.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < n && sa[i] == v {
            i += 1;
        }
        while j < m && sb[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / nf - j as f64 / mf).abs());
    }
    let critical = ks_coefficient(alpha) * ((nf + mf) / (nf * mf)).sqrt();
    Ok(KsVerdict { statistic: d, n, m, alpha, critical, pass: d <= critical })
}
