//! `dgumbel` command-line tool.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 I/O failure, 4 estimation
//! method not applicable to the data.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dgumbel::estimation::{
    diagnostic_csv, fit_mle, fit_moments, fit_proportions, fit_survreg, FitConfig, FitResult,
    Method, Sample,
};
use dgumbel::fmt::sig;
use dgumbel::gof::ks_test;
use dgumbel::moments::{moment_grid, moment_grid_csv, moment_summary_with};
use dgumbel::sampling::{self, GENERATOR};
use dgumbel::simulation::{default_grid, run_grid, table_csv, SimCell, SimReport};
use dgumbel::{data, Execution, Params};

#[derive(Parser)]
#[command(
    name = "dgumbel",
    version,
    about = "Discrete Gumbel distribution DGUD(alpha, p) on the integers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for every random stream used by the command.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the main output here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    p: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<Params, CliError> {
        Ok(Params::new(self.alpha, self.p)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Mle,
    Moments,
    Proportions,
    Survreg,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Mle => Method::Mle,
            MethodArg::Moments => Method::Moments,
            MethodArg::Proportions => Method::Proportions,
            MethodArg::Survreg => Method::Survreg,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate pmf, cdf, survival and hazard.
    Eval {
        #[command(flatten)]
        params: ParamArgs,
        /// Comma-separated points.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with_all = ["from", "to"])]
        y: Vec<i64>,
        #[arg(long, allow_negative_numbers = true, requires = "to")]
        from: Option<i64>,
        #[arg(long, allow_negative_numbers = true, requires = "from")]
        to: Option<i64>,
        #[command(flatten)]
        common: Common,
    },
    /// Draw a seeded sample, one integer per line.
    Sample {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Moment and shape summary.
    Moments {
        #[command(flatten)]
        params: ParamArgs,
        /// Total tail mass left out of the summation range.
        #[arg(long, default_value_t = dgumbel::DEFAULT_EPS_TAIL)]
        eps_tail: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Estimate the parameters from a data file.
    Fit {
        /// Integers one per line; `#` comments and a `y` header are allowed.
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value = "mle")]
        method: MethodArg,
        /// Also write the linearized survival points (`y,z,z_fit`).
        #[arg(long)]
        diagnostic: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Kolmogorov-Smirnov test against given or fitted parameters.
    Gof {
        #[arg(long)]
        data: PathBuf,
        #[arg(
            long,
            allow_negative_numbers = true,
            requires = "p",
            conflicts_with = "fit"
        )]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires = "alpha")]
        p: Option<f64>,
        /// Fit the parameters first with this method.
        #[arg(long, value_enum)]
        fit: Option<MethodArg>,
        /// Write `|ecdf - cdf|` at each distinct value (`y,abs_diff`).
        #[arg(long)]
        curve: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo study of the maximum likelihood estimator.
    Simulate {
        #[arg(long, allow_negative_numbers = true, requires_all = ["p", "k"], conflicts_with = "full_grid")]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        p: Option<f64>,
        /// Sample sizes, comma-separated.
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        /// All 27 cells alpha in {0.05, 1, 5}, p in {0.25, 0.5, 0.75}, k in {25, 50, 100}.
        #[arg(long)]
        full_grid: bool,
        /// Per-replication JSON lines.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Run on the calling thread only.
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Mean and variance over a parameter grid.
    Grid {
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.5,1,2,5,10")]
        alphas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.25,0.5,0.75,0.9")]
        ps: Vec<f64>,
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Io(String),
    Inapplicable(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
            CliError::Inapplicable(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Io(m) | CliError::Inapplicable(m) => m,
        }
    }
}

impl From<dgumbel::Error> for CliError {
    fn from(e: dgumbel::Error) -> Self {
        if e.is_method_inapplicable() {
            CliError::Inapplicable(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

fn header(seed: u64) -> String {
    format!(
        "# dgumbel {} seed={} generator={}\n",
        env!("CARGO_PKG_VERSION"),
        seed,
        GENERATOR
    )
}

fn emit(path: Option<&Path>, seed: u64, body: &str) -> Result<(), CliError> {
    let text = header(seed) + body;
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("standard output: {e}")))
        }
    }
}

fn load_sample(path: &Path) -> Result<Sample, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let parsed = data::parse_data(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    if !parsed.floored_lines.is_empty() {
        eprintln!(
            "warning: {}: {} non-integer value(s) floored (first at line {})",
            path.display(),
            parsed.floored_lines.len(),
            parsed.floored_lines[0]
        );
    }
    Ok(Sample::new(parsed.values)?)
}

fn fit_with(sample: &Sample, method: Method) -> Result<FitResult, CliError> {
    let config = FitConfig::default();
    let fit = match method {
        Method::Mle => fit_mle(sample, &config)?,
        Method::Moments => fit_moments(sample, &config)?,
        Method::Proportions => fit_proportions(sample)?,
        Method::Survreg => fit_survreg(sample)?.0,
    };
    if !fit.converged {
        eprintln!("warning: fit did not converge: {}", fit.notes);
    }
    Ok(fit)
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eval {
            params,
            y,
            from,
            to,
            common,
        } => {
            let d = params.params()?;
            let ys: Vec<i64> = match (from, to) {
                (Some(a), Some(b)) if a <= b => (a..=b).collect(),
                (Some(a), Some(b)) => {
                    return Err(CliError::Validation(format!("--from {a} exceeds --to {b}")))
                }
                _ if !y.is_empty() => y,
                _ => return Err(CliError::Validation("give --y or --from/--to".into())),
            };
            let mut body = String::from("y,pmf,cdf,survival,hazard\n");
            for y in ys {
                let _ = writeln!(
                    body,
                    "{y},{},{},{},{}",
                    sig(d.pmf(y)),
                    sig(d.cdf(y)),
                    sig(d.survival(y)),
                    sig(d.hazard(y))
                );
            }
            emit(common.output.as_deref(), common.seed, &body)
        }
        Command::Sample { params, n, common } => {
            let d = params.params()?;
            let xs = sampling::sample(&d, n, common.seed)?;
            let mut body = String::with_capacity(4 * n);
            for x in &xs {
                let _ = writeln!(body, "{x}");
            }
            emit(common.output.as_deref(), common.seed, &body)?;
            let s = Sample::new(xs)?;
            let c = s.counts();
            eprintln!(
                "n={} n_neg={} n_zero={} n_pos={} min={} max={} mean={}",
                s.n(),
                c.neg,
                c.zero,
                c.pos,
                s.min(),
                s.max(),
                sig(s.mean())
            );
            Ok(())
        }
        Command::Moments {
            params,
            eps_tail,
            common,
        } => {
            let d = params.params()?;
            let m = moment_summary_with(&d, eps_tail)?;
            let body = format!(
                "mean={}\nvariance={}\nmu3={}\nmu4={}\nhsk={}\nkurtosis_beta2={}\nmode={}\nsupport_lo={}\nsupport_hi={}\ntail_mass={}\n",
                sig(m.mean),
                sig(m.variance),
                sig(m.mu3),
                sig(m.mu4),
                sig(m.hsk),
                sig(m.kurtosis_beta2),
                m.mode,
                m.truncation.lo,
                m.truncation.hi,
                sig(m.tail_mass_bound)
            );
            emit(common.output.as_deref(), common.seed, &body)
        }
        Command::Fit {
            data,
            method,
            diagnostic,
            common,
        } => {
            let sample = load_sample(&data)?;
            let fit = fit_with(&sample, method.into())?;
            if let Some(path) = diagnostic {
                emit(
                    Some(&path),
                    common.seed,
                    &diagnostic_csv(&sample, &fit.params),
                )?;
            }
            emit(common.output.as_deref(), common.seed, &fit.to_record())
        }
        Command::Gof {
            data,
            alpha,
            p,
            fit,
            curve,
            common,
        } => {
            let sample = load_sample(&data)?;
            let mut body = String::new();
            let params = match (alpha, p, fit) {
                (Some(a), Some(p), None) => Params::new(a, p)?,
                (None, None, Some(m)) => {
                    let f = fit_with(&sample, m.into())?;
                    body.push_str(&f.to_record());
                    f.params
                }
                _ => {
                    return Err(CliError::Validation(
                        "give either --alpha and --p, or --fit METHOD".into(),
                    ))
                }
            };
            let report = ks_test(&sample, &params);
            body.push_str(&report.to_record());
            if let Some(path) = curve {
                emit(Some(&path), common.seed, &report.abs_diff_csv())?;
            }
            emit(common.output.as_deref(), common.seed, &body)
        }
        Command::Simulate {
            alpha,
            p,
            k,
            reps,
            full_grid,
            log,
            sequential,
            common,
        } => {
            let cells = if full_grid {
                default_grid(reps, common.seed)?
            } else {
                let (Some(a), Some(p)) = (alpha, p) else {
                    return Err(CliError::Validation(
                        "give --alpha, --p and --k, or --full-grid".into(),
                    ));
                };
                if k.is_empty() {
                    return Err(CliError::Validation(
                        "--k needs at least one sample size".into(),
                    ));
                }
                let d = Params::new(a, p)?;
                k.iter()
                    .enumerate()
                    .map(|(i, &k)| SimCell::new(d, k, reps, common.seed ^ i as u64))
                    .collect::<Result<Vec<_>, _>>()?
            };
            let start = Instant::now();
            let reports = run_grid(&cells, execution(sequential))?;
            let secs = start.elapsed().as_secs_f64();
            if let Some(path) = log {
                write_log(&path, &reports)?;
            }
            emit(common.output.as_deref(), common.seed, &table_csv(&reports))?;
            let failed: usize = reports.iter().map(|r| r.n_failed).sum();
            eprintln!(
                "cells={} wall_time_s={secs:.3} n_failed={failed}",
                reports.len()
            );
            Ok(())
        }
        Command::Grid {
            alphas,
            ps,
            sequential,
            common,
        } => {
            let rows = moment_grid(&alphas, &ps, execution(sequential))?;
            emit(
                common.output.as_deref(),
                common.seed,
                &moment_grid_csv(&rows),
            )
        }
    }
}

fn write_log(path: &Path, reports: &[SimReport]) -> Result<(), CliError> {
    let mut text = String::new();
    for r in reports {
        for rep in &r.replications {
            let line = serde_json::json!({
                "alpha": r.cell.true_params.alpha(),
                "p": r.cell.true_params.p(),
                "k": r.cell.sample_size,
                "cell_seed": r.cell.seed,
                "replication": rep,
            });
            text.push_str(&line.to_string());
            text.push('\n');
        }
    }
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
