use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use excursion_lab::experiments::{
    run_convergence, run_simulate, run_verify, write_convergence_file, write_report,
    ExperimentConfig,
};
use excursion_lab::Error;

#[derive(Parser)]
#[command(
    name = "excursion-lab",
    version,
    about = "Monte Carlo checks of Brownian excursion identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample excursions and write every functional to functionals.csv
    Simulate(RunArgs),
    /// Run the identity suite and write report.json
    Verify(RunArgs),
    /// Sweep grid resolution against band width and write convergence.csv
    Convergence(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    /// Band width for local time, e.g. 0.0078125 or 1/128
    #[arg(long, value_parser = parse_real)]
    bin_width: Option<f64>,
    #[arg(long, env = "EXCURSION_SEED")]
    seed: Option<u64>,
    /// Comma-separated orders, e.g. 1,2,3
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<u32>>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with ExperimentConfig fields; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (defaults to all cores)
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_real(s: &str) -> Result<f64, String> {
    let parsed = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|e| format!("{e}"))?;
            let den: f64 = den.trim().parse().map_err(|e| format!("{e}"))?;
            num / den
        }
        None => s.trim().parse().map_err(|e| format!("{e}"))?,
    };
    if parsed.is_finite() {
        Ok(parsed)
    } else {
        Err(format!("not a finite number: {s}"))
    }
}

impl RunArgs {
    fn resolve(&self) -> Result<ExperimentConfig, Error> {
        let mut c = match &self.config {
            Some(file) => ExperimentConfig::from_json_file(file)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.paths {
            c.paths = v;
        }
        if let Some(v) = self.steps {
            c.n_steps = v;
        }
        if let Some(v) = self.bin_width {
            c.bin_width = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.orders {
            c.orders = v.clone();
        }
        if let Some(v) = self.alpha {
            c.alpha = v;
        }
        if let Some(v) = &self.out {
            c.output_dir = v.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::Config(_) => 2,
        Error::Io(_) => 3,
        Error::Domain(_) | Error::Unsupported(_) => 1,
    }
}

fn run(command: &Command) -> Result<bool, Error> {
    let args = match command {
        Command::Simulate(a) | Command::Verify(a) | Command::Convergence(a) => a,
    };
    let config = args.resolve()?;
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    match command {
        Command::Simulate(_) => {
            let (records, file) = run_simulate(&config)?;
            println!("wrote {} paths to {}", records.len(), file.display());
            Ok(true)
        }
        Command::Verify(_) => {
            let report = run_verify(&config)?;
            for t in &report.tests {
                println!(
                    "{} {:<40} statistic={:.6e} threshold={:.6e}",
                    if t.pass { "PASS" } else { "FAIL" },
                    t.name,
                    t.statistic,
                    t.threshold
                );
            }
            let file = write_report(&report)?;
            println!(
                "overall: {} ({})",
                if report.overall_pass { "PASS" } else { "FAIL" },
                file.display()
            );
            Ok(report.overall_pass)
        }
        Command::Convergence(_) => {
            let rows = run_convergence(&config)?;
            for r in &rows {
                println!(
                    "steps={:<6} bin_width=1/{:<4} var(X)={:.5} |var-1/12|={:.5} area_residual={:.3e}",
                    r.n_steps,
                    (1.0 / r.bin_width).round(),
                    r.var_x,
                    r.abs_var_error,
                    r.max_area_residual
                );
            }
            let file = write_convergence_file(&config, &rows)?;
            println!("wrote {}", file.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
