use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use rayon::prelude::*;

use super::{fmt_real, ExperimentConfig};
use crate::error::Result;
use crate::functionals::FunctionalSample;
use crate::occupation::occupation_profile;
use crate::path::sample_excursion;
use crate::rng::RngStream;

/// Everything the suite needs from one sampled excursion.
#[derive(Clone, Debug, PartialEq)]
pub struct PathRecord {
    pub index: usize,
    pub sample: FunctionalSample,
    /// `½ l(H^{-1}(t))` at each configured marginal time.
    pub jeulin_marginals: Vec<f64>,
    /// `r_t` at each configured marginal time.
    pub excursion_marginals: Vec<f64>,
}

pub fn simulate_path(config: &ExperimentConfig, index: usize) -> Result<PathRecord> {
    let path = sample_excursion(config.n_steps, RngStream::new(config.seed, index as u64))?;
    let profile = occupation_profile(&path, config.bin_width)?;
    let sample = FunctionalSample::compute(&path, &profile, &config.orders)?;
    Ok(PathRecord {
        index,
        sample,
        jeulin_marginals: config
            .marginal_times
            .iter()
            .map(|&t| profile.jeulin_value(t))
            .collect(),
        excursion_marginals: config
            .marginal_times
            .iter()
            .map(|&t| path.value_at(t))
            .collect(),
    })
}

/// Simulates every path of the configuration. Records come back in path
/// index order whatever the size of the worker pool.
pub fn run_ensemble(config: &ExperimentConfig) -> Result<Vec<PathRecord>> {
    config.validate()?;
    (0..config.paths)
        .into_par_iter()
        .map(|k| simulate_path(config, k))
        .collect()
}

pub fn csv_header(orders: &[u32]) -> String {
    let mut cols = vec!["path_index", "area", "l2_half", "x_stat", "w1"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    cols.extend(orders.iter().map(|n| format!("min_{n}")));
    cols.extend(orders.iter().map(|n| format!("prop_{n}")));
    for c in [
        "inv_fwd_0",
        "inv_fwd_1",
        "inv_fwd_2",
        "inv_rev_1",
        "inv_rev_2",
        "max_r",
    ] {
        cols.push(c.into());
    }
    cols.join(",")
}

pub fn write_csv<W: Write>(records: &[PathRecord], orders: &[u32], mut out: W) -> Result<()> {
    writeln!(out, "{}", csv_header(orders))?;
    for r in records {
        let s = &r.sample;
        let mut fields = vec![r.index.to_string()];
        let mut push = |x: f64| fields.push(fmt_real(x));
        push(s.area);
        push(s.l2_half);
        push(s.x_stat);
        push(s.w_one);
        for n in orders {
            push(s.min_n[n]);
        }
        for n in orders {
            push(s.prop_stat[n]);
        }
        for n in [0, 1, 2] {
            push(s.inv_forward[&n]);
        }
        for n in [1, 2] {
            push(s.inv_reversed[&n]);
        }
        push(s.max_r);
        writeln!(out, "{}", fields.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Runs the ensemble and writes `functionals.csv` into the output directory.
pub fn run_simulate(config: &ExperimentConfig) -> Result<(Vec<PathRecord>, PathBuf)> {
    let records = run_ensemble(config)?;
    std::fs::create_dir_all(&config.output_dir)?;
    let file = config.output_dir.join("functionals.csv");
    write_csv(
        &records,
        &config.orders,
        BufWriter::new(File::create(&file)?),
    )?;
    Ok((records, file))
}
