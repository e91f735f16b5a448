//! Occupation measure of a piecewise-linear path over level bands.
//!
//! Local time `l` is piecewise constant on the bands `[i h, (i + 1) h)`; the
//! cumulative occupation `H(x)` (time spent at or below `x`) is piecewise
//! linear with knots at the band edges, except that the top knot is placed
//! at the path maximum `M` instead of the upper edge of the last band.

use crate::error::{Error, Result};
use crate::path::PathGrid;

#[derive(Clone, Debug, PartialEq)]
pub struct OccupationProfile {
    bin_width: f64,
    occupation: Vec<f64>,
    local_time: Vec<f64>,
    h_edges: Vec<f64>,
    path_max: f64,
}

/// Maximum of the piecewise-linear path (attained on the grid).
pub fn path_max(path: &PathGrid) -> f64 {
    path.values()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Builds the occupation profile of `path` with band width `h`.
///
/// Each grid cell contributes the exact time its linear segment spends in
/// each band; a flat segment puts its whole duration in the band containing
/// its level.
pub fn occupation_profile(path: &PathGrid, h: f64) -> Result<OccupationProfile> {
    if h.is_nan() || h <= 0.0 || h.is_infinite() {
        return Err(Error::invalid(format!(
            "bin width must be positive, got {h}"
        )));
    }
    if let Some(v) = path.values().iter().find(|v| **v < 0.0) {
        return Err(Error::invalid(format!("path has a negative value {v}")));
    }
    let max = path_max(path);
    let mut n_bins = (max / h).floor() as usize + 1;
    while n_bins as f64 * h <= max {
        n_bins += 1;
    }
    let bin_of = |x: f64| ((x / h).floor() as usize).min(n_bins - 1);

    let dt = path.dt();
    let mut occupation = vec![0.0; n_bins];
    for w in path.values().windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            occupation[bin_of(a)] += dt;
            continue;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (first, last) = (bin_of(lo), bin_of(hi));
        if first == last {
            occupation[first] += dt;
            continue;
        }
        let span = hi - lo;
        let mut prev = 0.0;
        for (i, occ) in occupation.iter_mut().enumerate().take(last).skip(first) {
            let frac = (((i + 1) as f64 * h - lo) / span).clamp(prev, 1.0);
            *occ += dt * (frac - prev);
            prev = frac;
        }
        occupation[last] += dt * (1.0 - prev);
    }

    let local_time = occupation.iter().map(|o| o / h).collect();
    let mut h_edges = Vec::with_capacity(n_bins + 1);
    let mut acc = 0.0;
    h_edges.push(0.0);
    for o in &occupation {
        acc += o;
        h_edges.push(acc);
    }
    Ok(OccupationProfile {
        bin_width: h,
        occupation,
        local_time,
        h_edges,
        path_max: max,
    })
}

impl OccupationProfile {
    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn n_bins(&self) -> usize {
        self.occupation.len()
    }

    /// Time spent in each band.
    pub fn occupation(&self) -> &[f64] {
        &self.occupation
    }

    pub fn local_time(&self) -> &[f64] {
        &self.local_time
    }

    /// Cumulative occupation at the band edges `i h`, `i = 0..=n_bins`.
    pub fn h_edges(&self) -> &[f64] {
        &self.h_edges
    }

    pub fn path_max(&self) -> f64 {
        self.path_max
    }

    pub fn total_time(&self) -> f64 {
        self.h_edges[self.n_bins()]
    }

    /// Knot `j` of the piecewise-linear `H`: band edges `0..n_bins`, then the
    /// path maximum carrying the total time.
    fn knot(&self, j: usize) -> (f64, f64) {
        if j < self.n_bins() {
            (j as f64 * self.bin_width, self.h_edges[j])
        } else {
            (self.path_max, self.total_time())
        }
    }

    /// Level segment of band `i` used for `H` interpolation, with `H` at
    /// both ends. The last band is cut at the path maximum.
    pub(crate) fn band_segment(&self, i: usize) -> (f64, f64, f64) {
        let (x0, h0) = self.knot(i);
        let (x1, h1) = self.knot(i + 1);
        (x1 - x0, h0, h1)
    }

    /// `H(x)`: time spent at or below level `x`.
    pub fn cumulative(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.path_max {
            return self.total_time();
        }
        let i = ((x / self.bin_width).floor() as usize).min(self.n_bins() - 1);
        let (x0, h0) = self.knot(i);
        let (x1, h1) = self.knot(i + 1);
        if x1 <= x0 {
            return h1;
        }
        h0 + (h1 - h0) * ((x - x0) / (x1 - x0)).clamp(0.0, 1.0)
    }

    /// Piecewise-constant local time at level `x`; zero above the last band.
    pub fn local_time_at(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let i = (x / self.bin_width).floor() as usize;
        self.local_time.get(i).copied().unwrap_or(0.0)
    }

    /// Generalized inverse `inf { x >= 0 : H(x) >= t }` of the
    /// piecewise-linear `H`.
    pub fn h_inverse(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::invalid(format!("t must lie in [0, 1], got {t}")));
        }
        Ok(self.h_inverse_unchecked(t))
    }

    fn h_inverse_unchecked(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        // H_edges is sorted, so this finds the first knot with H >= t
        let j = self.h_edges[..self.n_bins()].partition_point(|&v| v < t);
        let j = if j < self.n_bins() {
            j
        } else if self.total_time() >= t {
            self.n_bins()
        } else {
            // t exceeds the accumulated total by rounding only
            return self.path_max;
        };
        let (x0, h0) = self.knot(j - 1);
        let (x1, h1) = self.knot(j);
        x0 + (t - h0) / (h1 - h0) * (x1 - x0)
    }

    /// The time-changed path `t -> l(H^{-1}(t)) / 2` on a uniform grid.
    pub fn jeulin_path(&self, n_steps: usize) -> Result<PathGrid> {
        PathGrid::from_fn(n_steps, |t| self.jeulin_value(t))
    }

    /// `½ l(H^{-1}(t))`, reading `l` on the band whose `H` range
    /// `(H_i, H_{i+1}]` contains `t` (band 0 at `t = 0`).
    pub fn jeulin_value(&self, t: f64) -> f64 {
        let n = self.n_bins();
        let i = if t <= 0.0 {
            0
        } else {
            self.h_edges[1..].partition_point(|&v| v < t).min(n - 1)
        };
        0.5 * self.local_time[i]
    }
}
