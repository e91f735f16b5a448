//! Paths on a uniform grid over `[0, 1]` and their samplers.

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// A continuous path on `[0, 1]` known at `t_k = k / n_steps`, with
/// piecewise-linear interpolation between grid points.
#[derive(Clone, Debug, PartialEq)]
pub struct PathGrid {
    values: Vec<f64>,
}

impl PathGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::invalid("a path needs at least two grid values"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("path values must be finite"));
        }
        Ok(Self { values })
    }

    /// Samples `f` at every grid time.
    pub fn from_fn(n_steps: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::invalid("n_steps must be positive"));
        }
        let values = (0..=n_steps)
            .map(|k| f(k as f64 / n_steps as f64))
            .collect();
        Self::new(values)
    }

    /// The symmetric tent `1 - |2t - 1|`.
    pub fn tent(n_steps: usize) -> Result<Self> {
        if !n_steps.is_multiple_of(2) {
            return Err(Error::invalid("tent path needs an even n_steps"));
        }
        let half = n_steps / 2;
        Self::new(
            (0..=n_steps)
                .map(|k| (half - k.abs_diff(half)) as f64 / half as f64)
                .collect(),
        )
    }

    pub fn zeros(n_steps: usize) -> Result<Self> {
        Self::new(vec![0.0; n_steps + 1])
    }

    pub fn n_steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.n_steps() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Linear interpolation at time `t`, clamped to `[0, 1]`.
    pub fn value_at(&self, t: f64) -> f64 {
        let n = self.n_steps();
        let pos = t.clamp(0.0, 1.0) * n as f64;
        let k = (pos.floor() as usize).min(n - 1);
        let frac = pos - k as f64;
        if frac == 0.0 {
            return self.values[k];
        }
        self.values[k] + frac * (self.values[k + 1] - self.values[k])
    }

    /// Iterator over grid cells as `(t_start, left value, right value)`.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let dt = self.dt();
        self.values
            .windows(2)
            .enumerate()
            .map(move |(k, w)| (k as f64 * dt, w[0], w[1]))
    }
}

fn check_steps(n_steps: usize) -> Result<()> {
    if n_steps < 2 {
        return Err(Error::invalid(format!(
            "n_steps must be >= 2, got {n_steps}"
        )));
    }
    Ok(())
}

/// Writes a standard Brownian bridge from 0 to 0 into `out` (length
/// `n_steps + 1`): cumulative Gaussian increments of variance `1/n_steps`
/// give `B`, then `B_t - t B_1` pins the right end.
fn fill_bridge(stream: RngStream, out: &mut [f64]) {
    let n = out.len() - 1;
    let sd = (1.0 / n as f64).sqrt();
    let mut gen = stream.generator();
    out[0] = 0.0;
    let mut acc = 0.0;
    for v in out[1..].iter_mut() {
        acc += sd * gen.next_gaussian();
        *v = acc;
    }
    let end = out[n];
    for (k, v) in out.iter_mut().enumerate() {
        *v -= (k as f64 / n as f64) * end;
    }
    out[n] = 0.0;
}

pub fn sample_brownian_bridge(n_steps: usize, stream: RngStream) -> Result<PathGrid> {
    check_steps(n_steps)?;
    let mut values = vec![0.0; n_steps + 1];
    fill_bridge(stream, &mut values);
    Ok(PathGrid { values })
}

/// Samples a normalized Brownian excursion as the Euclidean norm of three
/// independent Brownian bridges drawn from `stream.component(0..3)`.
pub fn sample_excursion(n_steps: usize, stream: RngStream) -> Result<PathGrid> {
    check_steps(n_steps)?;
    let mut values = vec![0.0; n_steps + 1];
    let mut scratch = vec![0.0; n_steps + 1];
    for c in 0..3 {
        fill_bridge(stream.component(c), &mut scratch);
        for (v, b) in values.iter_mut().zip(&scratch) {
            *v += b * b;
        }
    }
    for v in values.iter_mut() {
        *v = v.sqrt();
    }
    values[0] = 0.0;
    values[n_steps] = 0.0;
    Ok(PathGrid { values })
}
