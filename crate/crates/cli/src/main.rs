//! `hcrpla`: single-point analysis, parameter sweeps, grid optimization and
//! Monte Carlo validation for hybrid challenge-response authentication.

mod analyze;
mod error;
mod optimize;
mod output;
mod simulate;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hcrpla::chsec::ThresholdRule;
use hcrpla::hybrid::AnalysisOptions;

use crate::error::{CliError, CliResult};
use crate::output::{emit, json_bytes, load_params, read_text};

#[derive(Debug, Parser)]
#[command(name = "hcrpla", version, about = "Hybrid challenge-response physical layer authentication calculator")]
struct Cli {
    /// Only report errors.
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON parameter file (sweep spec for `sweep`).
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use the exact chi-square threshold instead of Q^-1(p).
    #[arg(long)]
    exact_threshold: bool,
}

impl Common {
    fn options(&self) -> AnalysisOptions {
        let threshold = if self.exact_threshold { ThresholdRule::ExactChiSquare } else { ThresholdRule::Asymptotic };
        AnalysisOptions { threshold, ..AnalysisOptions::default() }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Channel geometry, rates and all three mechanisms at one point.
    Analyze(Common),
    /// One CSV row per swept value and mechanism.
    Sweep(Common),
    /// Monte Carlo validation of false alarm, attack success and pilot estimation.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, env = "CRPLA_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = simulate::Check::All)]
        check: simulate::Check,
    },
    /// Grid search over pilot count and h_min.
    Optimize {
        #[command(flatten)]
        common: Common,
        /// Also write every grid cell to this CSV file.
        #[arg(long)]
        grid_csv: Option<PathBuf>,
        /// Restrict the pilot counts searched (comma separated).
        #[arg(long, value_delimiter = ',')]
        pilot_counts: Option<Vec<u32>>,
        /// Restrict the h_min values searched (comma separated).
        #[arg(long, value_delimiter = ',')]
        h_min_values: Option<Vec<f64>>,
    },
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Analyze(c) => {
            let params = load_params(&c.config)?;
            let report = analyze::analyze(&params, &c.options())?;
            emit(c.out.as_deref(), &json_bytes(&report))
        }
        Command::Sweep(c) => {
            let spec = sweep::SweepSpec::from_json(&read_text(&c.config)?).map_err(|e| usage(&c.config, e))?;
            let rows = sweep::run(&spec, &c.options())?;
            emit(c.out.as_deref(), &sweep::to_csv(spec.variable, &rows)?)
        }
        Command::Simulate { common: c, trials, seed, check } => {
            if trials == 0 {
                return Err(CliError::Usage("--trials must be at least 1".into()));
            }
            if trials < 2 && matches!(check, simulate::Check::All | simulate::Check::Pilot) {
                return Err(CliError::Usage("pilot moments need --trials of at least 2".into()));
            }
            let params = load_params(&c.config)?;
            let rows = simulate::run(&params, c.options().threshold, check, trials, seed)?;
            emit(c.out.as_deref(), simulate::render(&rows, seed).as_bytes())?;
            match simulate::first_problem(&rows) {
                None => Ok(()),
                Some(row) => Err(CliError::Validation(format!(
                    "{} is {:?}: estimate {} against reference {}",
                    row.check, row.status, row.estimate, row.reference
                ))),
            }
        }
        Command::Optimize { common: c, grid_csv, pilot_counts, h_min_values } => {
            let params = load_params(&c.config)?;
            let grid = optimize::grid(&params, pilot_counts, h_min_values);
            let (report, cells) = optimize::run(&params, &grid, &c.options())?;
            if let Some(path) = grid_csv {
                emit(Some(&path), &optimize::cells_csv(params.n(), &cells)?)?;
            }
            emit(c.out.as_deref(), &json_bytes(&report))
        }
    }
}

fn usage(path: &Path, message: String) -> CliError {
    CliError::Usage(format!("{}: {message}", path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = if cli.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        pool = pool.num_threads(jobs as usize);
    }
    let pool = match pool.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: worker pool: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
