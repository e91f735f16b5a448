//! Goodness-of-fit and moment machinery.
//!
//! The normal CDF is `Φ(z) = erfc(-z / √2) / 2` with `erfc` from `libm`
//! (the FreeBSD msun rational approximations, accurate to about one ulp).
//! Kolmogorov-Smirnov tests use the asymptotic critical value
//! `c(α) = sqrt(-ln(α / 2) / 2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of one check. `pass` holds iff `statistic < threshold`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub alpha: f64,
    pub pass: bool,
    pub sample_sizes: (usize, usize),
}

impl TestReport {
    pub fn new(
        name: impl Into<String>,
        statistic: f64,
        threshold: f64,
        alpha: f64,
        sample_sizes: (usize, usize),
    ) -> Self {
        Self {
            name: name.into(),
            statistic,
            threshold,
            alpha,
            pass: statistic < threshold,
            sample_sizes,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
    pub se_variance: f64,
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Upper tail `1 - Φ(z)` without cancellation.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

pub fn ks_critical_value(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::invalid("sample contains NaN"));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// One-sample KS distance of `xs` from `N(mean, variance)`.
pub fn ks_statistic_normal(xs: &[f64], mean: f64, variance: f64) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::invalid("empty sample"));
    }
    if variance.is_nan() || variance <= 0.0 {
        return Err(Error::invalid(format!(
            "variance must be positive, got {variance}"
        )));
    }
    let xs = sorted(xs)?;
    let sd = variance.sqrt();
    let n = xs.len() as f64;
    Ok(xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf((x - mean) / sd);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max))
}

pub fn ks_one_sample_normal(
    name: impl Into<String>,
    xs: &[f64],
    mean: f64,
    variance: f64,
    alpha: f64,
) -> Result<TestReport> {
    check_alpha(alpha)?;
    let d = ks_statistic_normal(xs, mean, variance)?;
    let threshold = ks_critical_value(alpha) / (xs.len() as f64).sqrt();
    Ok(TestReport::new(name, d, threshold, alpha, (xs.len(), 0)))
}

/// Two-sample KS distance. Both empirical CDFs are evaluated just after each
/// distinct merged value, so ties move both steps together.
pub fn ks_statistic_two_sample(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::invalid("empty sample"));
    }
    let xs = sorted(xs)?;
    let ys = sorted(ys)?;
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xs.len() || j < ys.len() {
        let v = match (xs.get(i), ys.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

pub fn ks_two_sample(
    name: impl Into<String>,
    xs: &[f64],
    ys: &[f64],
    alpha: f64,
) -> Result<TestReport> {
    check_alpha(alpha)?;
    let d = ks_statistic_two_sample(xs, ys)?;
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let threshold = ks_critical_value(alpha) * ((n + m) / (n * m)).sqrt();
    Ok(TestReport::new(
        name,
        d,
        threshold,
        alpha,
        (xs.len(), ys.len()),
    ))
}

/// Mean and unbiased variance by Welford's single-pass update.
pub fn moment_summary(xs: &[f64]) -> Result<MomentSummary> {
    if xs.len() < 2 {
        return Err(Error::invalid("need at least two values"));
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &x) in xs.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    let count = xs.len();
    let variance = (m2 / (count - 1) as f64).max(0.0);
    Ok(MomentSummary {
        count,
        mean,
        variance,
        se_mean: (variance / count as f64).sqrt(),
        se_variance: variance * (2.0 / (count - 1) as f64).sqrt(),
    })
}
