//! Moments, skewness and kurtosis, tail behaviour and shape checks.
//!
//! There is no closed form for the moments, so everything here is a
//! truncated sum over an [`IntSupport`] chosen from exact tail quantiles.
//! Because `⌊X⌋ = X - U` with `U ∈ [0, 1)`, the mean always sits in
//! `[E X - 1, E X]` with `E X = μ + γσ`.

use serde::{Deserialize, Serialize};

use crate::numeric::{sum_smallest_first, CompensatedSum};
use crate::par::map_indexed;
use crate::simulation::Execution;
use crate::{fmt, Error, IntSupport, Params, Result, DEFAULT_EPS_TAIL};

/// Euler–Mascheroni constant to the precision used for the mean bracket.
pub const EULER_GAMMA_6: f64 = 0.577216;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawMoment {
    pub value: f64,
    pub truncation: IntSupport,
}

/// `E(Y^r)` truncated to the support for `eps_tail`.
pub fn raw_moment(params: &Params, r: u32, eps_tail: f64) -> Result<RawMoment> {
    if r == 0 {
        return Err(Error::InvalidArgument("moment order r must be >= 1".into()));
    }
    if !(eps_tail > 0.0 && eps_tail < 1e-3) {
        return Err(Error::InvalidArgument(format!(
            "eps_tail must be in (0, 1e-3) (got {eps_tail})"
        )));
    }
    let truncation = params.support(eps_tail)?;
    let mut terms: Vec<f64> = truncation
        .iter()
        .map(|y| (y as f64).powi(r as i32) * params.pmf(y))
        .collect();
    Ok(RawMoment {
        value: sum_smallest_first(&mut terms),
        truncation,
    })
}

/// First two raw moments in one compensated pass, or `None` when the
/// truncation window would exceed `max_len` points.
pub(crate) fn raw_moments_12(params: &Params, eps_tail: f64, max_len: usize) -> Option<(f64, f64)> {
    let support = params.support(eps_tail).ok()?;
    if support.hi.checked_sub(support.lo)? as u64 >= max_len as u64 {
        return None;
    }
    let mut m1 = CompensatedSum::new();
    let mut m2 = CompensatedSum::new();
    for y in support.iter() {
        let f = params.pmf(y);
        let yf = y as f64;
        m1.add(yf * f);
        m2.add(yf * yf * f);
    }
    Some((m1.value(), m2.value()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
    /// Third central moment.
    pub mu3: f64,
    /// Fourth central moment.
    pub mu4: f64,
    /// Homogeneous skewness, see [`hsk`].
    pub hsk: f64,
    /// `μ₄ / μ₂²`.
    pub kurtosis_beta2: f64,
    pub mode: i64,
    pub truncation: IntSupport,
    /// Probability mass outside `truncation`.
    pub tail_mass_bound: f64,
}

pub fn moment_summary(params: &Params) -> MomentSummary {
    moment_summary_with(params, DEFAULT_EPS_TAIL).expect("default eps_tail is valid")
}

/// Moment summary with a caller-chosen truncation.
///
/// Powers are accumulated about the mode rather than zero, and each power
/// sum is added smallest terms first with compensation.
pub fn moment_summary_with(params: &Params, eps_tail: f64) -> Result<MomentSummary> {
    let truncation = params.support(eps_tail)?;
    let mode = params.mode();
    let pmf: Vec<f64> = truncation.iter().map(|y| params.pmf(y)).collect();

    let mut sums = [0.0f64; 5];
    for (k, s) in sums.iter_mut().enumerate() {
        let mut terms: Vec<f64> = truncation
            .iter()
            .zip(&pmf)
            .map(|(y, &f)| ((y - mode) as f64).powi(k as i32) * f)
            .collect();
        *s = sum_smallest_first(&mut terms);
    }
    let [_, e1, e2, e3, e4] = sums;
    let variance = (e2 - e1 * e1).max(0.0);
    let mu3 = e3 - 3.0 * e1 * e2 + 2.0 * e1.powi(3);
    let mu4 = (e4 - 4.0 * e1 * e3 + 6.0 * e1 * e1 * e2 - 3.0 * e1.powi(4)).max(0.0);

    let mode_index = (mode - truncation.lo) as usize;
    let hsk = hsk(&pmf, mode_index)?;

    Ok(MomentSummary {
        mean: mode as f64 + e1,
        variance,
        mu3,
        mu4,
        hsk,
        kurtosis_beta2: mu4 / (variance * variance),
        mode,
        truncation,
        tail_mass_bound: truncation.tail_mass(params),
    })
}

/// Homogeneous skewness of a unimodal pmf given as a sequence with its mode
/// at `mode_index`:
///
/// ```text
/// HSK = Σ_{y>0} [f(M+y) - f(M-y)] + f(M) · sign(Σ_{y>0} [f(M+y) - f(M-y)])
/// ```
///
/// with `sign(0) = 0`. Points beyond either end of the sequence count as 0.
pub fn hsk(pmf: &[f64], mode_index: usize) -> Result<f64> {
    let total: f64 = pmf.iter().sum();
    if total.is_nan() || (total - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(total));
    }
    let peak = pmf.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    match pmf.get(mode_index) {
        Some(&f) if f >= peak * (1.0 - 1e-12) => {}
        _ => {
            return Err(Error::InvalidArgument(format!(
                "mode_index {mode_index} is not an argmax of the sequence"
            )))
        }
    }
    let mut terms: Vec<f64> = (1..pmf.len())
        .map(|k| {
            let right = pmf.get(mode_index + k).copied().unwrap_or(0.0);
            let left = mode_index.checked_sub(k).map(|i| pmf[i]).unwrap_or(0.0);
            right - left
        })
        .collect();
    let tail_diff = sum_smallest_first(&mut terms);
    let sign = if tail_diff > 0.0 {
        1.0
    } else if tail_diff < 0.0 {
        -1.0
    } else {
        0.0
    };
    Ok((tail_diff + pmf[mode_index] * sign).clamp(-1.0, 1.0))
}

/// Outcome of a log-concavity scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogConcavity {
    pub holds: bool,
    /// First `y` with `f(y+1)² < f(y) f(y+2)` beyond the slack.
    pub first_violation: Option<i64>,
}

const LOG_CONCAVITY_SLACK: f64 = 1e-12;

/// Checks `f(y+1)² ≥ f(y) f(y+2)` for `y ∈ [lo, hi-2]`, with relative slack
/// `1e-12`. Evaluated on `ln f`, so the check stays meaningful where the pmf
/// underflows.
pub fn check_log_concavity(params: &Params, lo: i64, hi: i64) -> Result<LogConcavity> {
    if lo >= hi {
        return Err(Error::InvalidArgument(format!(
            "need lo < hi (got lo = {lo}, hi = {hi})"
        )));
    }
    let slack = LOG_CONCAVITY_SLACK;
    let mut prev2 = params.ln_pmf(lo);
    let mut prev1 = params.ln_pmf(lo + 1);
    for y in lo..=hi - 2 {
        let next = params.ln_pmf(y + 2);
        // 2 ln f(y+1) >= ln f(y) + ln f(y+2) + ln(1 - slack)
        if 2.0 * prev1 - prev2 - next < -slack {
            return Ok(LogConcavity {
                holds: false,
                first_violation: Some(y),
            });
        }
        prev2 = prev1;
        prev1 = next;
    }
    Ok(LogConcavity {
        holds: true,
        first_violation: None,
    })
}

/// Generic log-concavity check on a nonnegative sequence; the witness is the
/// sequence index `i` with `s[i+1]² < s[i] s[i+2] (1 - 1e-12)`.
pub fn is_log_concave(seq: &[f64]) -> LogConcavity {
    for (i, w) in seq.windows(3).enumerate() {
        if w[1] * w[1] < w[0] * w[2] * (1.0 - LOG_CONCAVITY_SLACK) {
            return LogConcavity {
                holds: false,
                first_violation: Some(i as i64),
            };
        }
    }
    LogConcavity {
        holds: true,
        first_violation: None,
    }
}

/// `f(y+1) / f(y)`. Tends to `p` as `y → +∞`.
pub fn tail_ratio(params: &Params, y: i64) -> f64 {
    (params.ln_pmf(y + 1) - params.ln_pmf(y)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub alpha: f64,
    pub p: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Mean and variance over `p_grid × alpha_grid`, rows ordered p-major.
pub fn moment_grid(alpha_grid: &[f64], p_grid: &[f64], exec: Execution) -> Result<Vec<MomentRow>> {
    if alpha_grid.is_empty() || p_grid.is_empty() {
        return Err(Error::InvalidArgument(
            "alpha and p grids must be nonempty".into(),
        ));
    }
    let mut cells = Vec::with_capacity(alpha_grid.len() * p_grid.len());
    for &p in p_grid {
        for &alpha in alpha_grid {
            cells.push(Params::new(alpha, p)?);
        }
    }
    Ok(map_indexed(cells.len(), exec, |i| {
        let d = cells[i];
        let s = moment_summary(&d);
        MomentRow {
            alpha: d.alpha(),
            p: d.p(),
            mean: s.mean,
            variance: s.variance,
        }
    }))
}

/// CSV rendering of [`moment_grid`]: header `alpha,p,mean,variance`.
pub fn moment_grid_csv(rows: &[MomentRow]) -> String {
    let mut out = String::from("alpha,p,mean,variance\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt::sig(r.alpha),
            fmt::sig(r.p),
            fmt::sig(r.mean),
            fmt::sig(r.variance)
        ));
    }
    out
}

/// Bracket `[E X - 1, E X]` for the mean, `E X = (ln α + γ) / ln(1/p)`.
pub fn mean_bracket(params: &Params) -> (f64, f64) {
    let hi = (params.alpha().ln() + EULER_GAMMA_6) / params.ln_inv_p();
    (hi - 1.0, hi)
}

/// `π²σ²/6` with `σ = 1/ln(1/p)`: the continuous variance and the lower end
/// of the variance bracket.
pub fn continuous_variance(params: &Params) -> f64 {
    std::f64::consts::PI.powi(2) / 6.0 * params.sigma().powi(2)
}
