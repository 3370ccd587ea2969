//! Parameter estimation for `DGUD(α, p)`.
//!
//! Four estimators are provided: maximum likelihood ([`fit_mle`]), method of
//! moments ([`fit_moments`]), method of proportions ([`fit_proportions`]) and
//! least squares on the linearised survival function ([`fit_survreg`]). When
//! `α` is known, [`estimate_p_known_alpha`] recovers `p` alone from the
//! empirical survival function.
//!
//! The numerical estimators search over `θ = (ln α, logit p)`, which maps the
//! parameter space onto the plane.

mod mle;
mod moments;
mod optimize;
mod proportions;
mod survreg;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{fmt as numfmt, Error, Params, Result};

pub use mle::{fit_mle, observed_information, ObservedInformation};
pub use moments::{fit_moments, fit_moments_from_raw, moment_objective};
pub use optimize::{nelder_mead, Minimum};
pub use proportions::{fit_proportions, fit_proportions_from};
pub use survreg::{
    diagnostic_csv, diagnostic_points, estimate_p_from_survival, estimate_p_known_alpha,
    fit_survreg, survival_regression, DiagnosticLine, SurvivalPoint,
};

/// Observed integer data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    values: Vec<i64>,
    sorted_unique: Vec<(i64, usize)>,
    cumulative: Vec<usize>,
    counts: SignCounts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignCounts {
    pub neg: usize,
    pub zero: usize,
    pub pos: usize,
}

impl Sample {
    pub fn new(values: Vec<i64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument(
                "sample must contain at least one value".into(),
            ));
        }
        let mut sorted = values.clone();
        sorted.sort_unstable();
        let mut sorted_unique: Vec<(i64, usize)> = Vec::new();
        for y in sorted {
            match sorted_unique.last_mut() {
                Some((v, m)) if *v == y => *m += 1,
                _ => sorted_unique.push((y, 1)),
            }
        }
        let cumulative = sorted_unique
            .iter()
            .scan(0usize, |acc, &(_, m)| {
                *acc += m;
                Some(*acc)
            })
            .collect();
        let counts = SignCounts {
            neg: values.iter().filter(|&&y| y < 0).count(),
            zero: values.iter().filter(|&&y| y == 0).count(),
            pos: values.iter().filter(|&&y| y > 0).count(),
        };
        Ok(Self {
            values,
            sorted_unique,
            cumulative,
            counts,
        })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Observations in their original order.
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Distinct values in ascending order with their multiplicities.
    pub fn sorted_unique(&self) -> &[(i64, usize)] {
        &self.sorted_unique
    }

    pub fn counts(&self) -> SignCounts {
        self.counts
    }

    pub fn min(&self) -> i64 {
        self.sorted_unique[0].0
    }

    pub fn max(&self) -> i64 {
        self.sorted_unique[self.sorted_unique.len() - 1].0
    }

    /// `#{y_i ≤ y}`.
    pub fn count_at_most(&self, y: i64) -> usize {
        let idx = self.sorted_unique.partition_point(|&(v, _)| v <= y);
        if idx == 0 {
            0
        } else {
            self.cumulative[idx - 1]
        }
    }

    /// `#{y_i ≥ y}`.
    pub fn count_at_least(&self, y: i64) -> usize {
        self.n() - self.count_at_most(y - 1)
    }

    /// `(1/n) Σ y_i^r`.
    pub fn raw_moment(&self, r: u32) -> f64 {
        let n = self.n() as f64;
        self.sorted_unique
            .iter()
            .map(|&(y, m)| m as f64 * (y as f64).powi(r as i32))
            .sum::<f64>()
            / n
    }

    pub fn mean(&self) -> f64 {
        self.raw_moment(1)
    }

    /// Second central moment with divisor `n`, accumulated about the mean.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.sorted_unique
            .iter()
            .map(|&(y, m)| m as f64 * (y as f64 - mean).powi(2))
            .sum::<f64>()
            / self.n() as f64
    }

    /// Sample median (lower middle value for even `n`).
    pub fn median(&self) -> i64 {
        let target = self.n().div_ceil(2);
        let idx = self.cumulative.partition_point(|&c| c < target);
        self.sorted_unique[idx].0
    }
}

/// `Σ ln f(y_i)`, evaluated once per distinct value.
pub fn loglik(params: &Params, sample: &Sample) -> f64 {
    sample
        .sorted_unique()
        .iter()
        .map(|&(y, m)| m as f64 * params.ln_pmf(y))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mle,
    Moments,
    Proportions,
    Survreg,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Mle => "mle",
            Method::Moments => "moments",
            Method::Proportions => "proportions",
            Method::Survreg => "survreg",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mle" => Ok(Method::Mle),
            "moments" => Ok(Method::Moments),
            "proportions" => Ok(Method::Proportions),
            "survreg" => Ok(Method::Survreg),
            other => Err(Error::InvalidArgument(format!(
                "unknown method `{other}` (expected mle, moments, proportions or survreg)"
            ))),
        }
    }
}

/// Settings for the simplex searches behind [`fit_mle`] and [`fit_moments`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Iteration cap for each simplex run.
    pub max_iter: usize,
    /// Convergence threshold on the simplex diameter in `(ln α, logit p)`.
    pub tol: f64,
    /// Number of grid points best-ranked by the objective that seed runs.
    pub grid_starts: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            tol: 1e-8,
            grid_starts: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: Params,
    pub method: Method,
    pub loglik: f64,
    pub se_alpha: Option<f64>,
    pub se_p: Option<f64>,
    pub cov_alpha_p: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub notes: String,
}

impl FitResult {
    pub(crate) fn closed_form(params: Params, method: Method, sample: &Sample) -> Self {
        Self {
            params,
            method,
            loglik: loglik(&params, sample),
            se_alpha: None,
            se_p: None,
            cov_alpha_p: None,
            converged: true,
            iterations: 0,
            notes: String::new(),
        }
    }

    /// Flat `key=value` record, one field per line.
    pub fn to_record(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("method={}\n", self.method));
        out.push_str(&format!("alpha={}\n", numfmt::sig(self.params.alpha())));
        out.push_str(&format!("p={}\n", numfmt::sig(self.params.p())));
        out.push_str(&format!("loglik={}\n", numfmt::sig(self.loglik)));
        out.push_str(&format!("se_alpha={}\n", numfmt::sig_opt(self.se_alpha)));
        out.push_str(&format!("se_p={}\n", numfmt::sig_opt(self.se_p)));
        out.push_str(&format!("cov={}\n", numfmt::sig_opt(self.cov_alpha_p)));
        out.push_str(&format!("converged={}\n", self.converged));
        out.push_str(&format!("iterations={}\n", self.iterations));
        if !self.notes.is_empty() {
            out.push_str(&format!("notes={}\n", self.notes));
        }
        out
    }
}

/// Bounds of the search box in `θ = (ln α, logit p)`.
pub(crate) const LN_ALPHA_BOUND: f64 = 60.0;
pub(crate) const LOGIT_P_BOUND: f64 = 30.0;

pub(crate) fn to_theta(params: &Params) -> [f64; 2] {
    let p = params.p();
    [params.alpha().ln(), (p / (1.0 - p)).ln()]
}

/// Inverse of [`to_theta`]; `None` outside the search box.
pub(crate) fn from_theta(theta: [f64; 2]) -> Option<Params> {
    let [a, b] = theta;
    if !(a.abs() <= LN_ALPHA_BOUND && b.abs() <= LOGIT_P_BOUND) {
        return None;
    }
    let p = 1.0 / (1.0 + (-b).exp());
    Params::new(a.exp(), p).ok()
}

pub(crate) fn near_boundary(theta: [f64; 2]) -> bool {
    theta[0].abs() > LN_ALPHA_BOUND - 1e-3 || theta[1].abs() > LOGIT_P_BOUND - 1e-3
}

/// Starting point from the moment approximations
/// `E Y ≈ μ + γσ - 1/2` and `Var Y ≈ π²σ²/6 + 1/8`.
pub(crate) fn approximate_moment_start(mean: f64, variance: f64) -> Option<Params> {
    let excess = (variance - 0.125).max(0.05);
    let sigma = (6.0 * excess).sqrt() / std::f64::consts::PI;
    let mu = mean + 0.5 - crate::moments::EULER_GAMMA_6 * sigma;
    Params::from_mu_sigma(mu, sigma).ok()
}

/// Coarse 5 × 5 grid in θ around a location/scale guess from the sample:
/// logit p spans ±2 around the scale guess and, for each p, ln α spans ±2
/// around the value that matches the sample median.
pub(crate) fn start_grid(sample: &Sample) -> Vec<[f64; 2]> {
    let sigma0 = (6.0 * sample.variance().max(0.05)).sqrt() / std::f64::consts::PI;
    let p0 = (-1.0 / sigma0).exp().clamp(1e-6, 1.0 - 1e-12);
    let logit0 = (p0 / (1.0 - p0)).ln();
    let median = sample.median() as f64;
    let offsets = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let mut grid = Vec::with_capacity(25);
    for db in offsets {
        let b = (logit0 + db).clamp(-LOGIT_P_BOUND + 1.0, LOGIT_P_BOUND - 1.0);
        let p = 1.0 / (1.0 + (-b).exp());
        let sigma = -1.0 / p.ln();
        // median ≈ μ - σ ln ln 2 - 1/2
        let mu = median + 0.5 + sigma * std::f64::consts::LN_2.ln();
        let a0 = mu / sigma;
        for da in offsets {
            let a = (a0 + da).clamp(-LN_ALPHA_BOUND + 1.0, LN_ALPHA_BOUND - 1.0);
            grid.push([a, b]);
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_summary_counts() {
        let s = Sample::new(vec![3, -1, 0, 0, 2, -5, 0]).unwrap();
        assert_eq!(s.n(), 7);
        assert_eq!(
            s.counts(),
            SignCounts {
                neg: 2,
                zero: 3,
                pos: 2
            }
        );
        assert_eq!(
            s.sorted_unique(),
            &[(-5, 1), (-1, 1), (0, 3), (2, 1), (3, 1)]
        );
        assert_eq!(s.min(), -5);
        assert_eq!(s.max(), 3);
        assert_eq!(s.count_at_most(0), 5);
        assert_eq!(s.count_at_most(-6), 0);
        assert_eq!(s.count_at_most(10), 7);
        assert_eq!(s.count_at_least(1), 2);
        assert_eq!(s.count_at_least(-5), 7);
        assert_eq!(s.median(), 0);
        assert!(Sample::new(vec![]).is_err());
    }

    #[test]
    fn loglik_single_observation() {
        let d = Params::new(1.0, 0.5).unwrap();
        let s = Sample::new(vec![0]).unwrap();
        assert!((loglik(&d, &s) - d.pmf(0).ln()).abs() < 1e-15);
        assert!((loglik(&d, &s) + 1.432752129567189).abs() < 1e-14);
    }

    #[test]
    fn loglik_uses_multiplicities() {
        let d = Params::new(2.0, 0.7).unwrap();
        let vals = vec![1, 1, 1, 4, -2, 0, 1];
        let direct: f64 = vals.iter().map(|&y| d.pmf(y).ln()).sum();
        let s = Sample::new(vals).unwrap();
        assert!((loglik(&d, &s) - direct).abs() < 1e-12);
    }

    #[test]
    fn method_parsing() {
        for m in [
            Method::Mle,
            Method::Moments,
            Method::Proportions,
            Method::Survreg,
        ] {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("bayes".parse::<Method>().is_err());
    }

    #[test]
    fn theta_round_trip() {
        let d = Params::new(3.5, 0.8).unwrap();
        let back = from_theta(to_theta(&d)).unwrap();
        assert!((back.alpha() - 3.5).abs() < 1e-13);
        assert!((back.p() - 0.8).abs() < 1e-15);
        assert!(from_theta([61.0, 0.0]).is_none());
        assert!(from_theta([0.0, f64::NAN]).is_none());
    }

    #[test]
    fn record_format() {
        let d = Params::new(1.0, 0.5).unwrap();
        let s = Sample::new(vec![0, 1, -1]).unwrap();
        let r = FitResult::closed_form(d, Method::Proportions, &s).to_record();
        assert!(r.starts_with("method=proportions\nalpha=1\np=0.5\n"));
        assert!(r.contains("se_alpha=NA\n"));
        assert!(r.contains("converged=true\n"));
    }
}
