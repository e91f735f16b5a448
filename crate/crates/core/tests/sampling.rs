//! Sampled-law checks on the path generators.

use excursion_lab::stats::{ks_critical_value, moment_summary};
use excursion_lab::{sample_brownian_bridge, sample_excursion, RngStream};
use rand::{Rng, SeedableRng};

/// Values at `t = k / n_steps` over `count` independent streams.
fn marginals(count: u64, k: usize, f: impl Fn(RngStream) -> Vec<f64>) -> Vec<f64> {
    (0..count).map(|s| f(RngStream::new(1234, s))[k]).collect()
}

#[test]
fn bridge_marginal_has_variance_t_one_minus_t() {
    let n = 1024;
    let cols: Vec<usize> = (0..=n).step_by(16).collect();
    let paths: Vec<Vec<f64>> = (0..100_000)
        .map(|s| {
            let p = sample_brownian_bridge(n, RngStream::new(99, s)).unwrap();
            cols.iter().map(|&k| p.values()[k]).collect()
        })
        .collect();
    let mid: Vec<f64> = paths.iter().map(|p| p[cols.len() / 2]).collect();
    let m = moment_summary(&mid).unwrap();
    assert!((m.variance - 0.25).abs() < 3.0 * m.se_variance, "{m:?}");

    for (j, &k) in cols.iter().enumerate() {
        let xs: Vec<f64> = paths.iter().map(|p| p[j]).collect();
        if k == 0 || k == n {
            assert!(xs.iter().all(|&x| x == 0.0));
        } else {
            let m = moment_summary(&xs).unwrap();
            assert!(
                m.mean.abs() < 4.0 * m.se_mean,
                "t={} {m:?}",
                k as f64 / n as f64
            );
        }
    }
}

/// Mean of the norm of three independent `N(0, 1/4)` draws, sampled with
/// Box-Muller on an unrelated generator.
fn norm_of_three_oracle(count: usize) -> (f64, f64) {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let mut gauss = || {
        let u: f64 = 1.0 - rng.random::<f64>();
        let v: f64 = rng.random();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    };
    let xs: Vec<f64> = (0..count)
        .map(|_| {
            let (a, b, c) = (0.5 * gauss(), 0.5 * gauss(), 0.5 * gauss());
            (a * a + b * b + c * c).sqrt()
        })
        .collect();
    let m = moment_summary(&xs).unwrap();
    (m.mean, m.se_mean)
}

#[test]
fn excursion_midpoint_mean() {
    let target = (2.0 / std::f64::consts::PI).sqrt();
    let (oracle, oracle_se) = norm_of_three_oracle(1_000_000);
    assert!((oracle - target).abs() < 4.0 * oracle_se, "oracle {oracle}");

    let n = 4096;
    let mid = marginals(100_000, n / 2, |s| {
        sample_excursion(n, s).unwrap().into_values()
    });
    let m = moment_summary(&mid).unwrap();
    assert!((m.mean - target).abs() < 3.0 * m.se_mean, "{m:?}");
    assert!((m.mean - oracle).abs() < 4.0 * (m.se_mean.powi(2) + oracle_se.powi(2)).sqrt());
}

/// Maxwell CDF for scale 1/2 by composite Simpson on the density.
fn maxwell_cdf(x: f64) -> f64 {
    let pdf = |r: f64| (2.0 / std::f64::consts::PI).sqrt() * r * r * (-r * r / 0.5).exp() / 0.125;
    let n = 2000;
    let h = x / n as f64;
    let inner: f64 = (1..n)
        .map(|i| pdf(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (pdf(0.0) + inner + pdf(x)) * h / 3.0
}

#[test]
fn excursion_midpoint_is_maxwell() {
    assert!((maxwell_cdf(8.0) - 1.0).abs() < 1e-10);
    let n = 1024;
    let mut mid = marginals(20_000, n / 2, |s| {
        sample_excursion(n, s).unwrap().into_values()
    });
    mid.sort_by(f64::total_cmp);
    let len = mid.len() as f64;
    let d = mid
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = maxwell_cdf(x);
            (f - i as f64 / len).max((i + 1) as f64 / len - f)
        })
        .fold(0.0, f64::max);
    assert!(d < ks_critical_value(0.001) / len.sqrt(), "D = {d}");
}

#[test]
fn excursion_is_pinned_and_nonnegative() {
    for s in 0..200 {
        let p = sample_excursion(2 + (s as usize % 7), RngStream::new(3, s)).unwrap();
        let v = p.values();
        assert_eq!(v[0], 0.0);
        assert_eq!(v[v.len() - 1], 0.0);
        assert!(v.iter().all(|&x| x >= 0.0));
    }
}
