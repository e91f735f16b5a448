use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{run_ensemble, ExperimentConfig, PathRecord};
use crate::error::{Error, Result};
use crate::functionals::Orientation;
use crate::stats::{
    ks_one_sample_normal, ks_two_sample, moment_summary, MomentSummary, TestReport,
};

pub const X_MEAN_TOL: f64 = 0.005;
pub const X_VAR_TOL: f64 = 0.005;
pub const PROP_MEAN_TOL: f64 = 0.01;
pub const PROP_VAR_REL_TOL: f64 = 0.05;
pub const W_HALF_AREA_VAR_TOL: f64 = 0.005;
pub const W_WEIGHTED_VAR_REL_TOL: f64 = 0.05;
pub const RESIDUAL_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedMoment {
    pub name: String,
    #[serde(flatten)]
    pub summary: MomentSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentitySuiteReport {
    pub config: ExperimentConfig,
    pub tests: Vec<TestReport>,
    pub moments: Vec<NamedMoment>,
    pub overall_pass: bool,
}

impl IdentitySuiteReport {
    pub fn test(&self, name: &str) -> Option<&TestReport> {
        self.tests.iter().find(|t| t.name == name)
    }

    pub fn moment(&self, name: &str) -> Option<&MomentSummary> {
        self.moments
            .iter()
            .find(|m| m.name == name)
            .map(|m| &m.summary)
    }

    pub fn failures(&self) -> impl Iterator<Item = &TestReport> {
        self.tests.iter().filter(|t| !t.pass)
    }
}

/// Tolerance check recorded alongside the KS tests. `alpha` is zero because
/// the threshold is a fixed band, not a significance level.
fn band(name: String, deviation: f64, tolerance: f64, n: usize) -> TestReport {
    TestReport::new(name, deviation, tolerance, 0.0, (n, 0))
}

struct SuiteBuilder<'a> {
    config: &'a ExperimentConfig,
    tests: Vec<TestReport>,
    moments: Vec<NamedMoment>,
}

impl SuiteBuilder<'_> {
    fn moment(&mut self, name: &str, xs: &[f64]) -> Result<MomentSummary> {
        let m = moment_summary(xs)?;
        self.moments.push(NamedMoment {
            name: name.into(),
            summary: m.clone(),
        });
        Ok(m)
    }

    /// One-sample KS against `N(0, variance)` plus bands on mean and variance.
    fn gaussian(
        &mut self,
        name: &str,
        xs: &[f64],
        variance: f64,
        mean_tol: f64,
        var_tol: f64,
        relative_var: bool,
    ) -> Result<()> {
        let alpha = self.config.alpha;
        self.tests.push(ks_one_sample_normal(
            format!("ks_normal:{name}"),
            xs,
            0.0,
            variance,
            alpha,
        )?);
        let m = self.moment(name, xs)?;
        self.tests.push(band(
            format!("mean:{name}"),
            m.mean.abs(),
            mean_tol,
            xs.len(),
        ));
        let dev = (m.variance - variance).abs();
        let dev = if relative_var { dev / variance } else { dev };
        self.tests
            .push(band(format!("variance:{name}"), dev, var_tol, xs.len()));
        Ok(())
    }

    fn two_sample(&mut self, name: String, xs: &[f64], ys: &[f64]) -> Result<()> {
        self.tests.push(ks_two_sample(
            format!("ks_two_sample:{name}"),
            xs,
            ys,
            self.config.alpha,
        )?);
        Ok(())
    }
}

type Field = dyn Fn(&PathRecord) -> f64;

/// Builds the identity suite from simulated records. Two-sample tests always
/// take the left operand from the first half of the ensemble and the right
/// operand from the second half.
pub fn suite_from_records(
    config: &ExperimentConfig,
    records: &[PathRecord],
) -> Result<IdentitySuiteReport> {
    if records.len() < 4 {
        return Err(Error::invalid("the identity suite needs at least 4 paths"));
    }
    let mut b = SuiteBuilder {
        config,
        tests: Vec::new(),
        moments: Vec::new(),
    };
    let all = |f: &dyn Fn(&PathRecord) -> f64| records.iter().map(f).collect::<Vec<f64>>();
    let (first, second) = records.split_at(records.len() / 2);
    let half =
        |rs: &[PathRecord], f: &dyn Fn(&PathRecord) -> f64| rs.iter().map(f).collect::<Vec<f64>>();

    // X = area - ½∫l² ~ N(0, 1/12)
    b.gaussian(
        "x_stat",
        &all(&|r| r.sample.x_stat),
        1.0 / 12.0,
        X_MEAN_TOL,
        X_VAR_TOL,
        false,
    )?;

    for &n in &config.orders {
        let v = 1.0 / (2.0 * n as f64 + 1.0);
        let xs = all(&|r| r.sample.prop_stat[&n]);
        b.gaussian(
            &format!("prop_{n}"),
            &xs,
            v,
            PROP_MEAN_TOL,
            PROP_VAR_REL_TOL,
            true,
        )?;
    }

    // area, ½∫l², ½∫(1-t)/r, ½∫t/r share one law
    let family: [(&str, &Field); 4] = [
        ("area", &|r| r.sample.area),
        ("l2_half", &|r| r.sample.l2_half),
        ("half_inv_fwd_1", &|r| 0.5 * r.sample.inv_forward[&1]),
        ("half_inv_rev_1", &|r| 0.5 * r.sample.inv_reversed[&1]),
    ];
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            let (na, fa) = family[i];
            let (nb, fb) = family[j];
            b.two_sample(format!("{na}~{nb}"), &half(first, fa), &half(second, fb))?;
        }
    }

    b.two_sample(
        "max_r~half_inv_fwd_0".into(),
        &half(first, &|r| r.sample.max_r),
        &half(second, &|r| 0.5 * r.sample.inv_forward[&0]),
    )?;

    for &n in &config.orders {
        let mins = half(first, &|r| r.sample.min_n[&n]);
        for (o, tag) in [
            (Orientation::Forward, "fwd"),
            (Orientation::Reversed, "rev"),
        ] {
            let inv = half(second, &|r| {
                0.5 * r.sample.inv(o, n).expect("computed for every order")
            });
            b.two_sample(format!("min_{n}~half_inv_{tag}_{n}"), &mins, &inv)?;
        }
    }

    for (i, t) in config.marginal_times.iter().enumerate() {
        b.two_sample(
            format!("jeulin_t{t}~excursion_t{t}"),
            &half(first, &|r| r.jeulin_marginals[i]),
            &half(second, &|r| r.excursion_marginals[i]),
        )?;
    }

    let w1 = all(&|r| r.sample.w_one);
    b.tests.push(ks_one_sample_normal(
        "ks_normal:w1",
        &w1,
        0.0,
        1.0,
        config.alpha,
    )?);
    b.moment("w1", &w1)?;
    let w_half = all(&|r| r.sample.w_half_area());
    let m = b.moment("w_half_area", &w_half)?;
    b.tests.push(band(
        "variance:w_half_area".into(),
        (m.variance - 1.0 / 12.0).abs(),
        W_HALF_AREA_VAR_TOL,
        w_half.len(),
    ));
    for &n in config.orders.iter().filter(|&&n| n > 1) {
        let nf = n as f64;
        let target = 1.0 / (nf * nf * (2.0 * nf + 1.0));
        let xs = all(&|r| r.sample.w_area_weighted[&n]);
        let m = b.moment(&format!("w_weighted_{n}"), &xs)?;
        b.tests.push(band(
            format!("variance:w_weighted_{n}"),
            (m.variance - target).abs() / target,
            W_WEIGHTED_VAR_REL_TOL,
            xs.len(),
        ));
    }

    let area_res = records
        .iter()
        .map(|r| r.sample.area_residual())
        .fold(0.0, f64::max);
    b.tests.push(band(
        "residual:w_area".into(),
        area_res,
        RESIDUAL_TOL,
        records.len(),
    ));
    for &n in &config.orders {
        let worst = records
            .iter()
            .map(|r| {
                r.sample
                    .weighted_residual(n)
                    .expect("computed for every order")
            })
            .fold(0.0, f64::max);
        b.tests.push(band(
            format!("residual:w_weighted_n{n}"),
            worst,
            RESIDUAL_TOL,
            records.len(),
        ));
    }

    let overall_pass = b.tests.iter().all(|t| t.pass);
    Ok(IdentitySuiteReport {
        config: config.clone(),
        tests: b.tests,
        moments: b.moments,
        overall_pass,
    })
}

pub fn run_verify(config: &ExperimentConfig) -> Result<IdentitySuiteReport> {
    let records = run_ensemble(config)?;
    suite_from_records(config, &records)
}

/// Writes `report.json` into the output directory.
pub fn write_report(report: &IdentitySuiteReport) -> Result<PathBuf> {
    std::fs::create_dir_all(&report.config.output_dir)?;
    let file = report.config.output_dir.join("report.json");
    let mut out = BufWriter::new(File::create(&file)?);
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(file)
}
