use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use rayon::prelude::*;

use super::{fmt_real, ExperimentConfig};
use crate::error::Result;
use crate::functionals::{
    brownian_weighted_integrals, gs_statistic, inverse_integral, relative_residual, weighted_area,
    Orientation,
};
use crate::occupation::occupation_profile;
use crate::path::{sample_excursion, PathGrid};
use crate::rng::RngStream;
use crate::stats::moment_summary;

pub const STEP_COUNTS: [usize; 4] = [1 << 10, 1 << 12, 1 << 14, 1 << 16];
pub const BIN_WIDTHS: [f64; 4] = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0];

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n_steps: usize,
    pub bin_width: f64,
    pub paths: usize,
    pub mean_x: f64,
    pub var_x: f64,
    pub abs_var_error: f64,
    pub max_area_residual: f64,
}

struct PathSample {
    /// `x[s][b]` for step count `STEP_COUNTS[s]` and band width `BIN_WIDTHS[b]`.
    x: [[f64; 4]; 4],
    area_res: [f64; 4],
}

/// Every cell sees the same excursion: the path is sampled on the finest grid
/// and the coarser grids are its subsamples, which are exact in law.
fn sample_nested(seed: u64, index: usize) -> Result<PathSample> {
    let finest = STEP_COUNTS[STEP_COUNTS.len() - 1];
    let fine = sample_excursion(finest, RngStream::new(seed, index as u64))?;
    let mut out = PathSample {
        x: [[0.0; 4]; 4],
        area_res: [0.0; 4],
    };
    for (s, &n_steps) in STEP_COUNTS.iter().enumerate() {
        let stride = finest / n_steps;
        let path = PathGrid::new(fine.values().iter().step_by(stride).copied().collect())?;
        for (b, &h) in BIN_WIDTHS.iter().enumerate() {
            out.x[s][b] = gs_statistic(&path, &occupation_profile(&path, h)?);
        }
        let area = weighted_area(&path, 1)?;
        let inv = inverse_integral(&path, 1, Orientation::Forward)?;
        let lhs = 0.5 * brownian_weighted_integrals(&path, &[1])?[0];
        out.area_res[s] = relative_residual(lhs, &[area, -0.5 * inv]);
    }
    Ok(out)
}

/// Sweeps grid resolution against band width over one nested ensemble.
pub fn run_convergence(config: &ExperimentConfig) -> Result<Vec<ConvergenceRow>> {
    config.validate()?;
    let samples: Vec<PathSample> = (0..config.paths)
        .into_par_iter()
        .map(|k| sample_nested(config.seed, k))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(16);
    for (s, &n_steps) in STEP_COUNTS.iter().enumerate() {
        let area_res = samples.iter().map(|p| p.area_res[s]).fold(0.0, f64::max);
        for (b, &h) in BIN_WIDTHS.iter().enumerate() {
            let xs: Vec<f64> = samples.iter().map(|p| p.x[s][b]).collect();
            let (mean_x, var_x) = if xs.len() >= 2 {
                let m = moment_summary(&xs)?;
                (m.mean, m.variance)
            } else {
                (xs[0], f64::NAN)
            };
            rows.push(ConvergenceRow {
                n_steps,
                bin_width: h,
                paths: config.paths,
                mean_x,
                var_x,
                abs_var_error: (var_x - 1.0 / 12.0).abs(),
                max_area_residual: area_res,
            });
        }
    }
    Ok(rows)
}

pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], mut out: W) -> Result<()> {
    writeln!(
        out,
        "n_steps,bin_width,paths,mean_x,var_x,abs_var_error,max_area_residual"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n_steps,
            fmt_real(r.bin_width),
            r.paths,
            fmt_real(r.mean_x),
            fmt_real(r.var_x),
            fmt_real(r.abs_var_error),
            fmt_real(r.max_area_residual)
        )?;
    }
    out.flush()?;
    Ok(())
}

impl ExperimentConfig {
    pub fn convergence_file(&self) -> PathBuf {
        self.output_dir.join("convergence.csv")
    }
}

pub fn write_convergence_file(
    config: &ExperimentConfig,
    rows: &[ConvergenceRow],
) -> Result<PathBuf> {
    std::fs::create_dir_all(&config.output_dir)?;
    let file = config.convergence_file();
    write_convergence_csv(rows, BufWriter::new(File::create(&file)?))?;
    Ok(file)
}
