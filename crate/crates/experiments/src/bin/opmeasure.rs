use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use opmeasure_core::estimate::{EstimatorConfig, DEFAULT_PINV_RTOL};
use opmeasure_core::{Error, Result, SimulationConfig};
use opmeasure_experiments::figures::{export_figure_data, DEFAULT_CURVES};
use opmeasure_experiments::output::{write_run, RunManifest};
use opmeasure_experiments::selftest::run_selftest;
use opmeasure_experiments::sweep::DEFAULT_RIDGE_LAMBDA;
use opmeasure_experiments::{exit_code, StudyRegistry, SweepResult};

#[derive(Parser)]
#[command(name = "opmeasure", version, about = "Operator regression simulation studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Refine the grid: DiscErr, OpErr, ISE and RMSE versus p.
    GridSweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated grid sizes.
        #[arg(long, value_delimiter = ',')]
        p_values: Option<Vec<u64>>,
    },
    /// Grow the sample at fixed p: OpErr and RMSE versus n.
    SampleSweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated training sample sizes.
        #[arg(long, value_delimiter = ',')]
        n_values: Option<Vec<u64>>,
    },
    /// OLS against ridge on the same datasets across grid sizes.
    Conditioning {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        p_values: Option<Vec<u64>>,
    },
    /// Export beta_true.csv, beta_hat.csv, curves.csv and the dataset.
    Figures {
        #[command(flatten)]
        common: Common,
        /// Number of test curves to export.
        #[arg(long, default_value_t = DEFAULT_CURVES)]
        curves: usize,
    },
    /// Rerun the exactness checks and a 1-rep grid sweep twice and diff the outputs.
    Selftest {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorName {
    Ols,
    Ridge,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    n_test: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Signal-to-noise ratio; `inf` for noiseless responses.
    #[arg(long)]
    snr: Option<f64>,
    #[arg(long)]
    p_ref: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "ols")]
    estimator: EstimatorName,
    #[arg(long, default_value_t = DEFAULT_RIDGE_LAMBDA)]
    lambda: f64,
    #[arg(long, default_value_t = DEFAULT_PINV_RTOL)]
    pinv_rtol: f64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn config(&self) -> SimulationConfig {
        let d = SimulationConfig::default();
        let estimator = match self.estimator {
            EstimatorName::Ols => EstimatorConfig::ols(),
            EstimatorName::Ridge => EstimatorConfig::ridge(self.lambda),
        }
        .with_rtol(self.pinv_rtol);
        SimulationConfig {
            p: self.p.unwrap_or(d.p),
            q: self.q,
            n: self.n.unwrap_or(d.n),
            n_test: self.n_test.unwrap_or(d.n_test),
            k: self.k.unwrap_or(d.k),
            snr: self.snr.unwrap_or(d.snr),
            p_ref: self.p_ref.unwrap_or(d.p_ref),
            reps: self.reps.unwrap_or(d.reps),
            base_seed: self.seed.unwrap_or(d.base_seed),
            estimator,
            beta: d.beta,
        }
    }

    fn init_threads(&self) -> Result<()> {
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(Error::Config("--threads must be positive".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        }
        Ok(())
    }
}

fn print_sweep(res: &SweepResult) {
    println!(
        "{:>8} {:>8} {:>10} {:>12} {:>12} {:>12} {:>12} {:>12} {:>8}",
        res.sweep_var, "est", "lambda", "disc_err", "op_err", "ise", "rmse", "cond", "rank"
    );
    for a in &res.aggregates {
        println!(
            "{:>8} {:>8} {:>10.1e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>8.2}",
            a.sweep_value,
            a.estimator,
            a.lambda,
            a.disc_err,
            a.op_err,
            a.ise,
            a.rmse,
            a.cond_number,
            a.effective_rank
        );
    }
    for (k, v) in &res.diagnostics {
        println!("{k} = {v:.6}");
    }
}

fn run_study(name: &str, common: &Common, values: Option<Vec<u64>>) -> Result<()> {
    common.init_threads()?;
    let config = common.config();
    let (plan, res) = StudyRegistry::builtin().run(name, config, values)?;
    let manifest = RunManifest::new(&res, &plan.config, &plan.values, &plan.estimators);
    write_run(&common.out, &res, &manifest)?;
    print_sweep(&res);
    info!("wrote {} rows to {}", res.rows.len(), common.out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GridSweep { common, p_values } => run_study("grid-sweep", &common, p_values),
        Command::SampleSweep { common, n_values } => run_study("sample-sweep", &common, n_values),
        Command::Conditioning { common, p_values } => run_study("conditioning", &common, p_values),
        Command::Figures { common, curves } => {
            common.init_threads()?;
            let m = export_figure_data(&common.config(), &common.out, curves)?;
            println!(
                "wrote figure data to {} (sigma = {:.6}, effective rank = {})",
                common.out.display(),
                m.sigma,
                m.effective_rank
            );
            Ok(())
        }
        Command::Selftest { common } => {
            common.init_threads()?;
            let report = run_selftest(&common.config(), Path::new(&common.out))?;
            println!("exactness max |diff| = {:e}", report.exactness_max_abs_diff);
            println!("case reduction mismatches = {}", report.reduction_mismatches);
            for f in &report.files {
                println!("{:<16} {}", f.file, if f.identical { "identical" } else { "DIFFERS" });
            }
            if report.passed() {
                println!("selftest passed");
                Ok(())
            } else {
                Err(Error::Numerical("selftest failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
