//! Scalar functionals of excursion paths and their occupation profiles.
//!
//! Path integrals are evaluated cell by cell in closed form for the
//! piecewise-linear interpolant. Integrands containing `1/r` blow up at the
//! endpoints of an excursion; there the two boundary cells use the local
//! model `r_t = r_Δ sqrt(t / Δ)` (mirrored at `t = 1`), which is exact for
//! `2 sqrt(t (1 - t))` to leading order and matches the square-root escape of
//! the Bessel-3 bridge from zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::occupation::{path_max, OccupationProfile};
use crate::path::PathGrid;

/// Direction of a polynomial weight: `(1 - t)^n` or its time reversal `t^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Forward,
    Reversed,
}

const MAX_TERMS: usize = 256;

/// `1 / (i + 1)` for the series in [`reciprocal_moments`].
static RECIP: [f64; MAX_TERMS + 64] = {
    let mut t = [0.0; MAX_TERMS + 64];
    let mut i = 0;
    while i < t.len() {
        t[i] = 1.0 / (i as f64 + 1.0);
        i += 1;
    }
    t
};

/// `out[j] = ∫_0^1 s^j / (a + b s) ds` for `a > 0`, `a + b > 0`.
fn reciprocal_moments(a: f64, b: f64, out: &mut [f64]) {
    let eps = b / a;
    if eps.abs() <= 0.5 && out.len() < 64 {
        let mut powers = [0.0; MAX_TERMS];
        let mut p: f64 = 1.0;
        let mut len = 0;
        while len < MAX_TERMS {
            powers[len] = p;
            len += 1;
            if p.abs() < 1e-18 {
                break;
            }
            p *= -eps;
        }
        for (j, m) in out.iter_mut().enumerate() {
            let mut sum = 0.0;
            for (k, pk) in powers[..len].iter().enumerate().rev() {
                sum += pk * RECIP[j + k];
            }
            *m = sum / a;
        }
    } else {
        out[0] = eps.ln_1p() / b;
        for j in 1..out.len() {
            out[j] = (1.0 / j as f64 - a * out[j - 1]) / b;
        }
    }
}

/// Coefficients `q` with `w(t0 + dt s) = Σ q_j s^j`, where `w` is
/// `(1 - t)^n` (forward) or `t^n` (reversed).
fn cell_weight(orientation: Orientation, n: u32, t0: f64, dt: f64, q: &mut [f64]) {
    let n = n as usize;
    let (base, step) = match orientation {
        Orientation::Forward => (1.0 - t0, -dt),
        Orientation::Reversed => (t0, dt),
    };
    let mut binom = 1.0;
    let mut step_pow = 1.0;
    for (j, qj) in q.iter_mut().enumerate().take(n + 1) {
        *qj = binom * base.powi((n - j) as i32) * step_pow;
        binom = binom * (n - j) as f64 / (j + 1) as f64;
        step_pow *= step;
    }
}

fn check_order(n: u32, min: u32) -> Result<()> {
    if n < min {
        return Err(Error::invalid(format!("order must be >= {min}, got {n}")));
    }
    Ok(())
}

fn check_excursion_like(path: &PathGrid) -> Result<()> {
    let v = path.values();
    let n = path.n_steps();
    if n < 2 {
        return Err(Error::invalid("need at least two grid cells"));
    }
    if v[0] < 0.0 || v[n] < 0.0 {
        return Err(Error::Domain("negative endpoint value".into()));
    }
    if let Some(k) = (1..n).find(|&k| v[k] <= 0.0) {
        return Err(Error::Domain(format!(
            "1/r undefined: value {} at interior grid point {k}",
            v[k]
        )));
    }
    Ok(())
}

/// `∫_0^1 w(t) / r_t dt` for several weights in one pass over the path.
///
/// Interior cells (and boundary cells whose endpoint value is positive) are
/// integrated exactly against the linear interpolant. A boundary cell that
/// touches zero uses the square-root model.
pub fn inverse_integrals(path: &PathGrid, weights: &[(Orientation, u32)]) -> Result<Vec<f64>> {
    check_excursion_like(path)?;
    let v = path.values();
    let n_cells = path.n_steps();
    let dt = path.dt();
    let max_deg = weights.iter().map(|w| w.1 as usize).max().unwrap_or(0);
    let mut moments = vec![0.0; max_deg + 1];
    let mut q = vec![0.0; max_deg + 1];
    let mut sums = vec![0.0; weights.len()];

    // B(j + 1, 1/2), for the cell that ends at zero
    let mut beta = vec![2.0; max_deg + 1];
    for j in 1..=max_deg {
        beta[j] = beta[j - 1] * j as f64 / (j as f64 + 0.5);
    }

    for k in 0..n_cells {
        let t0 = k as f64 * dt;
        let (r0, r1) = (v[k], v[k + 1]);
        if k == 0 && r0 == 0.0 {
            // r ≈ r1 sqrt(s): ∫ s^j / sqrt(s) ds = 1 / (j + 1/2)
            for (acc, &(o, deg)) in sums.iter_mut().zip(weights) {
                cell_weight(o, deg, t0, dt, &mut q);
                let s: f64 = (0..=deg as usize).map(|j| q[j] / (j as f64 + 0.5)).sum();
                *acc += dt / r1 * s;
            }
        } else if k == n_cells - 1 && r1 == 0.0 {
            // r ≈ r0 sqrt(1 - s): ∫ s^j / sqrt(1 - s) ds = B(j + 1, 1/2)
            for (acc, &(o, deg)) in sums.iter_mut().zip(weights) {
                cell_weight(o, deg, t0, dt, &mut q);
                let s: f64 = (0..=deg as usize).map(|j| q[j] * beta[j]).sum();
                *acc += dt / r0 * s;
            }
        } else {
            reciprocal_moments(r0, r1 - r0, &mut moments);
            for (acc, &(o, deg)) in sums.iter_mut().zip(weights) {
                cell_weight(o, deg, t0, dt, &mut q);
                let s: f64 = (0..=deg as usize).map(|j| q[j] * moments[j]).sum();
                *acc += dt * s;
            }
        }
    }
    Ok(sums)
}

/// `∫_0^1 (1 - t)^n / r_t dt` (forward) or `∫_0^1 t^n / r_t dt` (reversed).
///
/// Only meaningful for paths with square-root behaviour at zero endpoints;
/// for a path that leaves zero linearly (e.g. the tent) the value grows like
/// `log(n_steps)` under grid refinement.
pub fn inverse_integral(path: &PathGrid, n: u32, orientation: Orientation) -> Result<f64> {
    Ok(inverse_integrals(path, &[(orientation, n)])?[0])
}

/// `∫_0^1 (1 - t)^{n-1} f_t dt` for each `n` in `orders`, exact for the
/// piecewise-linear interpolant of `path`.
pub fn weighted_integrals(path: &PathGrid, orders: &[u32]) -> Result<Vec<f64>> {
    for &n in orders {
        check_order(n, 1)?;
    }
    let dt = path.dt();
    let max_deg = orders.iter().map(|&n| n as usize - 1).max().unwrap_or(0);
    let mut q = vec![0.0; max_deg + 1];
    let mut sums = vec![0.0; orders.len()];
    for (t0, r0, r1) in path.cells() {
        let d = r1 - r0;
        for (acc, &n) in sums.iter_mut().zip(orders) {
            let deg = n as usize - 1;
            cell_weight(Orientation::Forward, n - 1, t0, dt, &mut q);
            let s: f64 = (0..=deg)
                .map(|j| q[j] * (r0 * RECIP[j] + d * RECIP[j + 1]))
                .sum();
            *acc += dt * s;
        }
    }
    Ok(sums)
}

/// `∫_0^1 (1 - t)^{n-1} r_t dt`; `n = 1` is the area under the path.
pub fn weighted_area(path: &PathGrid, n: u32) -> Result<f64> {
    Ok(weighted_integrals(path, &[n])?[0])
}

/// `∫_0^1 (1 - t)^{n-1} W_t dt` for a Brownian path from
/// [`brownian_from_excursion`].
pub fn weighted_bm_integral(w_path: &PathGrid, n: u32) -> Result<f64> {
    weighted_area(w_path, n)
}

/// Integral of `u^n` over a segment on which `u` runs linearly from `ua` to
/// `ub`, divided by the segment length.
fn mean_power(ua: f64, ub: f64, n: u32) -> f64 {
    let mut sum = 0.0;
    let mut pa = 1.0;
    for j in 0..=n {
        sum += pa * ub.powi((n - j) as i32);
        pa *= ua;
    }
    sum / (n as f64 + 1.0)
}

/// `∫ (1 - H(x))^{n-1} l_x^2 dx`; `n = 1` is the squared local time
/// integral. The weight is averaged exactly over each band under the
/// piecewise-linear `H`.
pub fn l2_integral(profile: &OccupationProfile, n: u32) -> Result<f64> {
    check_order(n, 1)?;
    let h = profile.bin_width();
    Ok(profile
        .local_time()
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let weight = if n == 1 {
                1.0
            } else {
                let (_, h0, h1) = profile.band_segment(i);
                mean_power(1.0 - h0, 1.0 - h1, n - 1)
            };
            weight * l * l * h
        })
        .sum())
}

/// `∫_{[0,1]^n} min(r_{t_1}, ..., r_{t_n}) dt`, evaluated as
/// `∫_0^M (1 - H(x))^n dx` with exact per-band integration of the linear `H`.
pub fn min_functional(profile: &OccupationProfile, n: u32) -> Result<f64> {
    check_order(n, 1)?;
    Ok((0..profile.n_bins())
        .map(|i| {
            let (width, h0, h1) = profile.band_segment(i);
            width * mean_power(1.0 - h0, 1.0 - h1, n)
        })
        .sum())
}

/// Default sub-grid size of [`min_bruteforce`] for order `n`.
///
/// The midpoint error falls like `n_sub^-2` once the sub-grid resolves the
/// path's own cells, so these suit paths of a few hundred steps. Order 3
/// costs `512^3` evaluations.
pub fn default_bruteforce_grid(path: &PathGrid, n: u32) -> usize {
    match n {
        1 => 16 * path.n_steps(),
        2 => 2048,
        _ => 512,
    }
}

/// Midpoint-rule evaluation of `∫_{[0,1]^n} min(r_{t_1}, ..., r_{t_n})` by
/// direct enumeration of an `n_sub^n` grid. Test oracle for
/// [`min_functional`].
pub fn min_bruteforce(path: &PathGrid, n: u32) -> Result<f64> {
    min_bruteforce_with(path, n, default_bruteforce_grid(path, n))
}

pub fn min_bruteforce_with(path: &PathGrid, n: u32, n_sub: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("order must be >= 1"));
    }
    if n > 3 {
        return Err(Error::Unsupported(format!(
            "brute-force min functional supports n <= 3, got {n}"
        )));
    }
    if n_sub == 0 {
        return Err(Error::invalid("sub-grid must be nonempty"));
    }
    let mids: Vec<f64> = (0..n_sub)
        .map(|i| path.value_at((i as f64 + 0.5) / n_sub as f64))
        .collect();
    let m = n_sub as f64;
    let total = match n {
        1 => mids.iter().sum::<f64>() / m,
        2 => {
            let mut s = 0.0;
            for &a in &mids {
                for &b in &mids {
                    s += a.min(b);
                }
            }
            s / (m * m)
        }
        _ => {
            let mut s = 0.0;
            for &a in &mids {
                for &b in &mids {
                    let ab = a.min(b);
                    for &c in &mids {
                        s += ab.min(c);
                    }
                }
            }
            s / (m * m * m)
        }
    };
    Ok(total)
}

/// `X = ∫ r dt - ½ ∫ l² dx` for a path and the profile of the same path.
pub fn gs_statistic(path: &PathGrid, profile: &OccupationProfile) -> f64 {
    let area = weighted_area(path, 1).expect("order 1 is valid");
    let l2 = l2_integral(profile, 1).expect("order 1 is valid");
    area - 0.5 * l2
}

/// `2 ∫ min(r_{t_1..t_n}) - (n + 1)/2 ∫ (1 - H)^{n-1} l² dx`.
pub fn prop_statistic(path: &PathGrid, profile: &OccupationProfile, n: u32) -> Result<f64> {
    let _ = path;
    Ok(2.0 * min_functional(profile, n)? - 0.5 * (n as f64 + 1.0) * l2_integral(profile, n)?)
}

/// The Brownian motion `W_t = r_t - ∫_0^t ds / r_s + ∫_0^t r_s / (1 - s) ds`
/// on the grid of `path`.
///
/// The first integral uses the cell scheme of [`inverse_integral`]. The
/// second is exact for linear `r` on every cell but the last, where
/// `r ≈ r_{1-Δ} sqrt((1 - t) / Δ)` gives `2 r_{1-Δ}`.
pub fn brownian_from_excursion(path: &PathGrid) -> Result<PathGrid> {
    check_excursion_like(path)?;
    let v = path.values();
    let n = path.n_steps();
    if v[0] != 0.0 || v[n] != 0.0 {
        return Err(Error::Domain(
            "excursion must vanish at both endpoints".into(),
        ));
    }
    let dt = path.dt();
    let mut w = Vec::with_capacity(n + 1);
    w.push(0.0);
    let mut drift_down = 0.0;
    let mut drift_up = 0.0;
    let mut moments = [0.0; 2];
    for k in 0..n {
        let (r0, r1) = (v[k], v[k + 1]);
        if k == 0 {
            drift_down += 2.0 * dt / r1;
        } else if k == n - 1 {
            drift_down += 2.0 * dt / r0;
        } else {
            reciprocal_moments(r0, r1 - r0, &mut moments[..1]);
            drift_down += dt * moments[0];
        }
        if k == n - 1 {
            drift_up += 2.0 * r0;
        } else {
            // 1 - t = c - Δ s on the cell
            let c = (n - k) as f64 * dt;
            reciprocal_moments(c, -dt, &mut moments);
            drift_up += dt * (r0 * moments[0] + (r1 - r0) * moments[1]);
        }
        w.push(r1 - drift_down + drift_up);
    }
    PathGrid::new(w)
}

/// `∫_0^1 (1 - t)^{n-1} W_t dt` for each `n` in `orders`, integrating the
/// continuous within-cell form of `W` (linear `r`, and the drift integrals
/// under the same cell models as [`brownian_from_excursion`]) exactly.
///
/// Unlike [`weighted_bm_integral`], which sees only the grid values of `W`,
/// this agrees with the right-hand side assembled from [`weighted_area`] and
/// [`inverse_integral`] up to the last-cell difference between the linear and
/// square-root models of `r`.
pub fn brownian_weighted_integrals(path: &PathGrid, orders: &[u32]) -> Result<Vec<f64>> {
    for &n in orders {
        check_order(n, 1)?;
    }
    check_excursion_like(path)?;
    let v = path.values();
    let n = path.n_steps();
    if v[0] != 0.0 || v[n] != 0.0 {
        return Err(Error::Domain(
            "excursion must vanish at both endpoints".into(),
        ));
    }
    let dt = path.dt();
    let max_deg = orders.iter().map(|&k| k as usize - 1).max().unwrap_or(0);
    // moments up to degree max_deg + 2 (one for the inner primitive, one for r's slope)
    let len = max_deg + 3;
    let mut beta = vec![2.0; len];
    for j in 1..len {
        beta[j] = beta[j - 1] * j as f64 / (j as f64 + 0.5);
    }
    let mut down_m = vec![0.0; len];
    let mut up_m = vec![0.0; len];
    let mut recip = vec![0.0; len];
    let mut q = vec![0.0; max_deg + 1];
    let mut sums = vec![0.0; orders.len()];
    let (mut drift_down, mut drift_up) = (0.0, 0.0);

    for k in 0..n {
        let t0 = k as f64 * dt;
        let (r0, r1) = (v[k], v[k + 1]);
        let d = r1 - r0;
        // down_m[i] = ∫ σ^i ĝ(σ) dσ for ĝ = 1/r on the cell
        if k == 0 {
            for (i, m) in down_m.iter_mut().enumerate() {
                *m = 1.0 / (r1 * (i as f64 + 0.5));
            }
        } else if k == n - 1 {
            for (m, b) in down_m.iter_mut().zip(&beta) {
                *m = b / r0;
            }
        } else {
            reciprocal_moments(r0, d, &mut down_m);
        }
        // up_m[i] for ĝ = r / (1 - t)
        if k == n - 1 {
            for (m, b) in up_m.iter_mut().zip(&beta) {
                *m = r0 / dt * b;
            }
        } else {
            let c = (n - k) as f64 * dt;
            reciprocal_moments(c, -dt, &mut recip);
            for i in 0..len - 1 {
                up_m[i] = r0 * recip[i] + d * recip[i + 1];
            }
            up_m[len - 1] = f64::NAN;
        }

        for (acc, &order) in sums.iter_mut().zip(orders) {
            let deg = order as usize - 1;
            cell_weight(Orientation::Forward, order - 1, t0, dt, &mut q);
            let mut plain = 0.0;
            let mut r_part = 0.0;
            let mut inner_down = 0.0;
            let mut inner_up = 0.0;
            for j in 0..=deg {
                plain += q[j] * RECIP[j];
                r_part += q[j] * (r0 * RECIP[j] + d * RECIP[j + 1]);
                // ∫_0^1 ĝ(σ) ∫_σ^1 σ'^j dσ' dσ = (M_0 - M_{j+1}) / (j + 1)
                inner_down += q[j] * RECIP[j] * (down_m[0] - down_m[j + 1]);
                inner_up += q[j] * RECIP[j] * (up_m[0] - up_m[j + 1]);
            }
            *acc += dt * r_part
                + dt * plain * (drift_up - drift_down)
                + dt * dt * (inner_up - inner_down);
        }
        drift_down += dt * down_m[0];
        drift_up += dt * up_m[0];
    }
    Ok(sums)
}

/// `|lhs - rhs|` relative to the largest magnitude among `lhs` and the terms
/// summed into `rhs`.
pub fn relative_residual(lhs: f64, rhs_terms: &[f64]) -> f64 {
    let rhs: f64 = rhs_terms.iter().sum();
    let scale = rhs_terms.iter().fold(lhs.abs(), |m, t| m.max(t.abs()));
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

/// Every scalar functional of one excursion path.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalSample {
    pub area: f64,
    pub l2_half: f64,
    pub x_stat: f64,
    /// `∫ (1 - t)^n / r_t dt` by `n`.
    pub inv_forward: BTreeMap<u32, f64>,
    /// `∫ t^n / r_t dt` by `n`.
    pub inv_reversed: BTreeMap<u32, f64>,
    pub min_n: BTreeMap<u32, f64>,
    pub prop_stat: BTreeMap<u32, f64>,
    /// `∫ (1 - t)^{n-1} r_t dt` by `n`.
    pub area_weighted: BTreeMap<u32, f64>,
    pub w_one: f64,
    /// `∫ (1 - t)^{n-1} W_t dt` by `n`, from the grid values of `W`.
    pub w_area_weighted: BTreeMap<u32, f64>,
    /// The same integrals over the within-cell model of `W`
    /// ([`brownian_weighted_integrals`]).
    pub w_model_weighted: BTreeMap<u32, f64>,
    pub max_r: f64,
}

impl FunctionalSample {
    /// Computes all functionals of `path` for the given orders. Inverse
    /// integrals are always produced for forward exponents `0, 1, 2` and
    /// reversed exponents `1, 2` in addition to `orders`.
    pub fn compute(path: &PathGrid, profile: &OccupationProfile, orders: &[u32]) -> Result<Self> {
        for &n in orders {
            check_order(n, 1)?;
        }
        let mut fwd: Vec<u32> = vec![0, 1, 2];
        let mut rev: Vec<u32> = vec![1, 2];
        fwd.extend(orders);
        rev.extend(orders);
        fwd.sort_unstable();
        fwd.dedup();
        rev.sort_unstable();
        rev.dedup();
        let weights: Vec<(Orientation, u32)> = fwd
            .iter()
            .map(|&n| (Orientation::Forward, n))
            .chain(rev.iter().map(|&n| (Orientation::Reversed, n)))
            .collect();
        let inv = inverse_integrals(path, &weights)?;
        let inv_forward: BTreeMap<u32, f64> =
            fwd.iter().copied().zip(inv.iter().copied()).collect();
        let inv_reversed: BTreeMap<u32, f64> = rev
            .iter()
            .copied()
            .zip(inv[fwd.len()..].iter().copied())
            .collect();

        let mut area_orders: Vec<u32> = vec![1];
        area_orders.extend(orders);
        area_orders.sort_unstable();
        area_orders.dedup();
        let areas = weighted_integrals(path, &area_orders)?;
        let area_weighted: BTreeMap<u32, f64> = area_orders
            .iter()
            .copied()
            .zip(areas.iter().copied())
            .collect();
        let area = area_weighted[&1];

        let l2_half = 0.5 * l2_integral(profile, 1)?;
        let mut min_n = BTreeMap::new();
        let mut prop_stat = BTreeMap::new();
        for &n in orders {
            let m = min_functional(profile, n)?;
            min_n.insert(n, m);
            prop_stat.insert(
                n,
                2.0 * m - 0.5 * (n as f64 + 1.0) * l2_integral(profile, n)?,
            );
        }

        let w = brownian_from_excursion(path)?;
        let w_one = *w.values().last().expect("nonempty");
        let w_integrals = weighted_integrals(&w, &area_orders)?;
        let w_area_weighted = area_orders.iter().copied().zip(w_integrals).collect();
        let w_model = brownian_weighted_integrals(path, &area_orders)?;
        let w_model_weighted = area_orders.iter().copied().zip(w_model).collect();

        Ok(Self {
            area,
            l2_half,
            x_stat: area - l2_half,
            inv_forward,
            inv_reversed,
            min_n,
            prop_stat,
            area_weighted,
            w_one,
            w_area_weighted,
            w_model_weighted,
            max_r: path_max(path),
        })
    }

    pub fn inv(&self, orientation: Orientation, n: u32) -> Option<f64> {
        match orientation {
            Orientation::Forward => self.inv_forward.get(&n).copied(),
            Orientation::Reversed => self.inv_reversed.get(&n).copied(),
        }
    }

    /// `½ ∫ W dt`.
    pub fn w_half_area(&self) -> f64 {
        0.5 * self.w_area_weighted[&1]
    }

    /// Relative residual of `½ ∫ W = ∫ r - ½ ∫ (1 - t) / r` on this path,
    /// with the left side from the within-cell model of `W`.
    pub fn area_residual(&self) -> f64 {
        let lhs = 0.5 * self.w_model_weighted[&1];
        relative_residual(lhs, &[self.area, -0.5 * self.inv_forward[&1]])
    }

    /// Relative residual of
    /// `∫ (1-t)^{n-1} W = (n+1)/n ∫ (1-t)^{n-1} r - (1/n) ∫ (1-t)^n / r`.
    pub fn weighted_residual(&self, n: u32) -> Option<f64> {
        let lhs = *self.w_model_weighted.get(&n)?;
        let nf = n as f64;
        let area = *self.area_weighted.get(&n)?;
        let inv = *self.inv_forward.get(&n)?;
        Some(relative_residual(lhs, &[(nf + 1.0) / nf * area, -inv / nf]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::occupation::occupation_profile;
    use crate::path::sample_excursion;
    use crate::rng::RngStream;
    use std::f64::consts::PI;

    fn tent() -> (PathGrid, OccupationProfile) {
        let p = PathGrid::tent(1024).unwrap();
        let prof = occupation_profile(&p, 1.0 / 64.0).unwrap();
        (p, prof)
    }

    fn semicircle(n: usize) -> PathGrid {
        PathGrid::from_fn(n, |t| 2.0 * (t * (1.0 - t)).sqrt()).unwrap()
    }

    /// Composite Gauss-Legendre on each cell; reference for the closed forms.
    fn gauss_cell_integral(path: &PathGrid, f: impl Fn(f64, f64) -> f64) -> f64 {
        const X: [f64; 5] = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683,
            0.0,
            0.538_469_310_105_683,
            0.906_179_845_938_664,
        ];
        const W: [f64; 5] = [
            0.236_926_885_056_189,
            0.478_628_670_499_366,
            0.568_888_888_888_889,
            0.478_628_670_499_366,
            0.236_926_885_056_189,
        ];
        let dt = path.dt();
        path.cells()
            .map(|(t0, a, b)| {
                X.iter()
                    .zip(&W)
                    .map(|(x, w)| {
                        let s = 0.5 * (x + 1.0);
                        w * 0.5 * dt * f(t0 + s * dt, a + s * (b - a))
                    })
                    .sum::<f64>()
            })
            .sum()
    }

    #[test]
    fn reciprocal_moments_both_branches() {
        for &(a, b) in &[
            (1.0, 0.1),
            (1.0, -0.4),
            (0.3, 2.0),
            (2.0, -1.5),
            (1.0, 0.0),
            (0.5, 0.26),
        ] {
            let mut m = [0.0; 5];
            reciprocal_moments(a, b, &mut m);
            for (j, mj) in m.iter().enumerate() {
                // Simpson with many panels
                let n = 20_000;
                let h = 1.0 / n as f64;
                let f = |s: f64| s.powi(j as i32) / (a + b * s);
                let mut acc = f(0.0) + f(1.0);
                for i in 1..n {
                    acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                let reference = acc * h / 3.0;
                assert!((mj - reference).abs() < 1e-10, "a={a} b={b} j={j}");
            }
        }
    }

    #[test]
    fn tent_weighted_areas() {
        let (p, _) = tent();
        assert!((weighted_area(&p, 1).unwrap() - 0.5).abs() < 1e-12);
        assert!((weighted_area(&p, 2).unwrap() - 0.25).abs() < 1e-12);
        let z = PathGrid::zeros(10).unwrap();
        assert_eq!(weighted_area(&z, 3).unwrap(), 0.0);
        assert!(matches!(
            weighted_area(&p, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn weighted_area_matches_quadrature() {
        let e = sample_excursion(300, RngStream::new(4, 4)).unwrap();
        for n in 1..=5u32 {
            let exact = weighted_area(&e, n).unwrap();
            let gauss = gauss_cell_integral(&e, |t, r| (1.0 - t).powi(n as i32 - 1) * r);
            assert!((exact - gauss).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn inverse_integral_interior_matches_quadrature() {
        // a path bounded away from zero has no singular cells
        let p = PathGrid::from_fn(200, |t| 1.0 + 0.5 * (7.0 * t).sin()).unwrap();
        for &o in &[Orientation::Forward, Orientation::Reversed] {
            for n in 0..4u32 {
                let exact = inverse_integral(&p, n, o).unwrap();
                let gauss = gauss_cell_integral(&p, |t, r| {
                    let w = match o {
                        Orientation::Forward => 1.0 - t,
                        Orientation::Reversed => t,
                    };
                    w.powi(n as i32) / r
                });
                assert!((exact - gauss).abs() < 1e-12, "{o:?} n={n}");
            }
        }
    }

    #[test]
    fn semicircle_inverse_integral() {
        let p = semicircle(1 << 16);
        let v = inverse_integral(&p, 0, Orientation::Forward).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-3, "{v}");
        // time symmetric path: forward and reversed weights agree
        let f = inverse_integral(&p, 2, Orientation::Forward).unwrap();
        let r = inverse_integral(&p, 2, Orientation::Reversed).unwrap();
        assert!((f - r).abs() < 1e-10);
    }

    #[test]
    fn tent_inverse_integral_grows_with_refinement() {
        let coarse =
            inverse_integral(&PathGrid::tent(64).unwrap(), 0, Orientation::Forward).unwrap();
        let fine =
            inverse_integral(&PathGrid::tent(4096).unwrap(), 0, Orientation::Forward).unwrap();
        // ∫ dt / (2t) near each end: the gap grows like ln(4096 / 64)
        assert!(fine - coarse > 0.9 * (64.0f64).ln());
    }

    #[test]
    fn inverse_integral_domain_errors() {
        let p = PathGrid::new(vec![0.0, 0.5, 0.0, 0.5, 0.0]).unwrap();
        assert!(matches!(
            inverse_integral(&p, 0, Orientation::Forward),
            Err(Error::Domain(_))
        ));
        assert!(matches!(brownian_from_excursion(&p), Err(Error::Domain(_))));
    }

    #[test]
    fn tent_local_time_functionals() {
        let (_, prof) = tent();
        assert!((l2_integral(&prof, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((l2_integral(&prof, 2).unwrap() - 0.5).abs() < 1e-12);
        assert!((min_functional(&prof, 1).unwrap() - 0.5).abs() < 1e-12);
        assert!((min_functional(&prof, 2).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(l2_integral(&prof, 0).is_err());
        assert!(min_functional(&prof, 0).is_err());
    }

    #[test]
    fn tent_statistics() {
        let (p, prof) = tent();
        assert!(gs_statistic(&p, &prof).abs() < 1e-12);
        let s2 = prop_statistic(&p, &prof, 2).unwrap();
        assert!((s2 + 1.0 / 12.0).abs() < 1e-12);
        assert!(prop_statistic(&p, &prof, 0).is_err());
    }

    #[test]
    fn bruteforce_fixtures() {
        let t = PathGrid::tent(1024).unwrap();
        assert!((min_bruteforce_with(&t, 2, 2048).unwrap() - 1.0 / 3.0).abs() < 1e-4);
        let e = sample_excursion(1000, RngStream::new(2, 9)).unwrap();
        let area = weighted_area(&e, 1).unwrap();
        assert!((min_bruteforce(&e, 1).unwrap() - area).abs() < 1e-6);
        let z = PathGrid::zeros(64).unwrap();
        for n in 1..=3 {
            assert_eq!(min_bruteforce(&z, n).unwrap(), 0.0);
        }
        assert!(matches!(min_bruteforce(&t, 4), Err(Error::Unsupported(_))));
        assert!(min_bruteforce(&t, 0).is_err());
    }

    #[test]
    fn semicircle_brownian_endpoint() {
        let p = semicircle(1 << 16);
        let w = brownian_from_excursion(&p).unwrap();
        assert_eq!(w.values()[0], 0.0);
        let w1 = *w.values().last().unwrap();
        assert!((w1 - PI / 2.0).abs() < 1e-3, "{w1}");
    }

    #[test]
    fn model_integral_tracks_grid_integral() {
        let e = sample_excursion(8192, RngStream::new(42, 5)).unwrap();
        let w = brownian_from_excursion(&e).unwrap();
        let model = brownian_weighted_integrals(&e, &[1, 2, 3]).unwrap();
        for (i, n) in [1u32, 2, 3].into_iter().enumerate() {
            let grid = weighted_bm_integral(&w, n).unwrap();
            // the two differ only by within-cell interpolation of W
            assert!((model[i] - grid).abs() < 1e-4, "n={n}");
        }
        assert!(brownian_weighted_integrals(&e, &[0]).is_err());
    }

    #[test]
    fn weighted_bm_integral_cases() {
        let z = PathGrid::zeros(8).unwrap();
        assert_eq!(weighted_bm_integral(&z, 2).unwrap(), 0.0);
        let w = PathGrid::new(vec![0.0, -0.3, 0.2, 0.9, -0.1]).unwrap();
        let trap: f64 = w.values().windows(2).map(|c| 0.125 * (c[0] + c[1])).sum();
        assert!((weighted_bm_integral(&w, 1).unwrap() - trap).abs() < 1e-12);
        assert!(weighted_bm_integral(&w, 0).is_err());
    }

    #[test]
    fn sample_record_consistency() {
        let orders = [1, 2, 3];
        for k in 0..10 {
            let e = sample_excursion(16384, RngStream::new(42, k)).unwrap();
            let prof = occupation_profile(&e, 1.0 / 128.0).unwrap();
            let s = FunctionalSample::compute(&e, &prof, &orders).unwrap();
            assert_eq!(s.x_stat, s.area - s.l2_half);
            assert!((s.prop_stat[&1] - 2.0 * s.x_stat).abs() < 1e-3);
            assert!((s.min_n[&1] - s.area).abs() < 1e-3);
            assert!(s.min_n[&1] >= s.min_n[&2] && s.min_n[&2] >= s.min_n[&3]);
            assert!(
                s.area_residual() < 1e-6,
                "area residual {}",
                s.area_residual()
            );
            for n in orders {
                assert!(s.weighted_residual(n).unwrap() < 1e-6);
            }
            assert_eq!(s.inv(Orientation::Forward, 0), Some(s.inv_forward[&0]));
        }
    }
}
