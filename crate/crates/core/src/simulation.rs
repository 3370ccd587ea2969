//! Monte Carlo study of the maximum likelihood estimator.
//!
//! Each replication draws `⌊X⌋` for `X ~ EV(μ, σ)` with the cell's true
//! parameters, fits by maximum likelihood, and records the estimates with
//! their observed-information standard errors. Replication `r` of a cell with
//! seed `s` always uses stream `r` of generator `s`, so reports do not depend
//! on scheduling.

use serde::{Deserialize, Serialize};

use crate::estimation::{fit_mle, FitConfig, Sample};
use crate::sampling::{floor_of_continuous_with, generator};
use crate::{fmt, par, Error, Params, Result};

/// How data-parallel loops are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Execution {
    /// Rayon thread pool (sequential when built without the `parallel` feature).
    #[default]
    Parallel,
    Sequential,
}

/// 1.96 on each side of the estimate.
pub const CI_WIDTH_FACTOR: f64 = 2.0 * 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimCell {
    pub true_params: Params,
    pub sample_size: usize,
    pub replications: usize,
    pub seed: u64,
}

impl SimCell {
    pub fn new(
        true_params: Params,
        sample_size: usize,
        replications: usize,
        seed: u64,
    ) -> Result<Self> {
        if sample_size < 2 {
            return Err(Error::InvalidArgument(format!(
                "sample size must be >= 2 (got {sample_size})"
            )));
        }
        if replications == 0 {
            return Err(Error::InvalidArgument("replications must be >= 1".into()));
        }
        Ok(Self {
            true_params,
            sample_size,
            replications,
            seed,
        })
    }
}

/// Outcome of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub index: usize,
    pub alpha_hat: f64,
    pub p_hat: f64,
    pub se_alpha: Option<f64>,
    pub se_p: Option<f64>,
    pub cov_alpha_p: Option<f64>,
    pub loglik: f64,
    pub converged: bool,
}

impl Replication {
    fn has_se(&self) -> bool {
        self.converged
            && matches!((self.se_alpha, self.se_p), (Some(a), Some(b)) if a.is_finite() && b.is_finite())
    }
}

/// Aggregates for one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub truth: f64,
    /// Mean of the estimates over converged replications.
    pub mean_estimate: f64,
    /// `mean(θ̂ - θ)`.
    pub mean_bias: f64,
    /// Monte Carlo standard error of `mean_estimate`.
    pub mc_se: f64,
    /// Arithmetic mean of the standard errors.
    pub mean_se: f64,
    /// `sqrt(mean(SE²))`, the root-mean-square standard error.
    pub rms_se: f64,
    /// Mean Wald interval width, `3.92 · mean_se`.
    pub avg_ci_width: f64,
    /// Fraction of intervals `θ̂ ± 1.96·SE` containing `θ`.
    pub coverage_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub cell: SimCell,
    pub alpha: ParamSummary,
    pub p: ParamSummary,
    pub mean_cov_alpha_p: f64,
    /// Replications that did not converge or have no standard errors.
    pub n_failed: usize,
    /// Converged replications, used for the estimate and bias means.
    pub n_converged: usize,
    /// Converged replications with standard errors, used for SE, AW and CR.
    pub n_with_se: usize,
    pub replications: Vec<Replication>,
}

pub fn run_cell(cell: &SimCell) -> SimReport {
    run_cell_with(cell, Execution::Parallel)
}

pub fn run_cell_with(cell: &SimCell, exec: Execution) -> SimReport {
    let config = FitConfig::default();
    let truth = cell.true_params;
    let (mu, sigma) = (truth.mu(), truth.sigma());
    let reps = par::map_indexed(cell.replications, exec, |r| {
        let mut rng = generator(cell.seed, r as u64);
        let data = floor_of_continuous_with(mu, sigma, cell.sample_size, &mut rng);
        let fit = Sample::new(data).and_then(|s| fit_mle(&s, &config));
        match fit {
            Ok(f) => Replication {
                index: r,
                alpha_hat: f.params.alpha(),
                p_hat: f.params.p(),
                se_alpha: f.se_alpha,
                se_p: f.se_p,
                cov_alpha_p: f.cov_alpha_p,
                loglik: f.loglik,
                converged: f.converged,
            },
            Err(_) => Replication {
                index: r,
                alpha_hat: f64::NAN,
                p_hat: f64::NAN,
                se_alpha: None,
                se_p: None,
                cov_alpha_p: None,
                loglik: f64::NAN,
                converged: false,
            },
        }
    });
    aggregate(*cell, reps)
}

fn aggregate(cell: SimCell, reps: Vec<Replication>) -> SimReport {
    let converged: Vec<&Replication> = reps.iter().filter(|r| r.converged).collect();
    let with_se: Vec<&Replication> = converged.iter().copied().filter(|r| r.has_se()).collect();
    let summarize = |truth: f64, est: fn(&Replication) -> f64, se: fn(&Replication) -> f64| {
        let estimates: Vec<f64> = converged.iter().map(|r| est(r)).collect();
        let ses: Vec<f64> = with_se.iter().map(|r| se(r)).collect();
        let mean_estimate = mean(&estimates);
        let mc_se = if estimates.len() > 1 {
            let m = mean_estimate;
            let var = estimates.iter().map(|x| (x - m).powi(2)).sum::<f64>()
                / (estimates.len() - 1) as f64;
            (var / estimates.len() as f64).sqrt()
        } else {
            f64::NAN
        };
        let mean_se = mean(&ses);
        let covered = with_se
            .iter()
            .filter(|r| (est(r) - truth).abs() <= 1.96 * se(r))
            .count();
        ParamSummary {
            truth,
            mean_estimate,
            mean_bias: mean_estimate - truth,
            mc_se,
            mean_se,
            rms_se: mean(&ses.iter().map(|s| s * s).collect::<Vec<_>>()).sqrt(),
            avg_ci_width: CI_WIDTH_FACTOR * mean_se,
            coverage_rate: if with_se.is_empty() {
                f64::NAN
            } else {
                covered as f64 / with_se.len() as f64
            },
        }
    };
    let alpha = summarize(
        cell.true_params.alpha(),
        |r| r.alpha_hat,
        |r| r.se_alpha.unwrap_or(f64::NAN),
    );
    let p = summarize(
        cell.true_params.p(),
        |r| r.p_hat,
        |r| r.se_p.unwrap_or(f64::NAN),
    );
    let covs: Vec<f64> = with_se.iter().filter_map(|r| r.cov_alpha_p).collect();
    SimReport {
        cell,
        alpha,
        p,
        mean_cov_alpha_p: mean(&covs),
        n_failed: reps.len() - with_se.len(),
        n_converged: converged.len(),
        n_with_se: with_se.len(),
        replications: reps,
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// The 27 cells `α ∈ {0.05, 1, 5} × p ∈ {0.25, 0.5, 0.75} × k ∈ {25, 50, 100}`
/// in table order, with cell `i` seeded `master_seed ^ i`.
pub fn default_grid(replications: usize, master_seed: u64) -> Result<Vec<SimCell>> {
    let mut cells = Vec::with_capacity(27);
    for alpha in [0.05, 1.0, 5.0] {
        for p in [0.25, 0.5, 0.75] {
            for k in [25, 50, 100] {
                let i = cells.len() as u64;
                cells.push(SimCell::new(
                    Params::new(alpha, p)?,
                    k,
                    replications,
                    master_seed ^ i,
                )?);
            }
        }
    }
    Ok(cells)
}

/// Runs each cell in turn; replications inside a cell follow `exec`.
pub fn run_grid(cells: &[SimCell], exec: Execution) -> Result<Vec<SimReport>> {
    if cells.is_empty() {
        return Err(Error::InvalidArgument("simulation grid is empty".into()));
    }
    Ok(cells.iter().map(|c| run_cell_with(c, exec)).collect())
}

pub const TABLE_HEADER: &str =
    "alpha,p,n,E(alpha_hat),Bias(alpha_hat),E[SE(alpha_hat)],AW(alpha),CR(alpha),\
E(p_hat),Bias(p_hat),E[SE(p_hat)],AW(p),CR(p),E[Cov(alpha_hat,p_hat)]";

/// Simulation table, one row per report. `E[SE]` is the root-mean-square
/// standard error; `AW` is the mean interval width.
pub fn table_csv(reports: &[SimReport]) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in reports {
        let cols = |s: &ParamSummary| {
            [
                s.mean_estimate,
                s.mean_bias,
                s.rms_se,
                s.avg_ci_width,
                s.coverage_rate,
            ]
            .map(fmt::sig)
            .join(",")
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt::sig(r.cell.true_params.alpha()),
            fmt::sig(r.cell.true_params.p()),
            r.cell.sample_size,
            cols(&r.alpha),
            cols(&r.p),
            fmt::sig(r.mean_cov_alpha_p),
        ));
    }
    out
}
