use super::optimize::multi_start;
use super::{
    approximate_moment_start, from_theta, loglik, start_grid, to_theta, FitConfig, FitResult,
    Method, Sample,
};
use crate::moments::raw_moments_12;
use crate::{Error, Params, Result, DEFAULT_EPS_TAIL};

/// Truncation windows longer than this make the objective infinite.
const MAX_SUPPORT: usize = 4_000_000;

/// `(m̂₁(α,p) - m₁)² + (m̂₂(α,p) - m₂)²` with truncated theoretical raw
/// moments, or `+∞` when they cannot be evaluated.
pub fn moment_objective(params: &Params, m1: f64, m2: f64) -> f64 {
    match raw_moments_12(params, DEFAULT_EPS_TAIL, MAX_SUPPORT) {
        Some((t1, t2)) => (t1 - m1).powi(2) + (t2 - m2).powi(2),
        None => f64::INFINITY,
    }
}

/// Method of moments: minimizes [`moment_objective`] at the sample's first
/// two raw moments with the same search as [`super::fit_mle`]. No standard
/// errors are reported.
pub fn fit_moments(sample: &Sample, config: &FitConfig) -> Result<FitResult> {
    if sample.n() < 2 {
        return Err(Error::InsufficientData(
            "method of moments needs n >= 2".into(),
        ));
    }
    if sample.variance() <= 0.0 {
        return Err(Error::DegenerateSample(
            "sample variance is zero; moments do not identify (alpha, p)".into(),
        ));
    }
    let (m1, m2) = (sample.raw_moment(1), sample.raw_moment(2));
    let grid = start_grid(sample);
    let mut fit = fit_moments_inner(m1, m2, &grid, config)?;
    fit.loglik = loglik(&fit.params, sample);
    Ok(fit)
}

/// Method of moments from raw moments `m₁ = E Y`, `m₂ = E Y²` directly.
/// The reported log-likelihood is NaN since no sample is attached.
pub fn fit_moments_from_raw(m1: f64, m2: f64, config: &FitConfig) -> Result<FitResult> {
    let variance = m2 - m1 * m1;
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::DegenerateSample(format!(
            "raw moments imply variance {variance}"
        )));
    }
    let grid = synthetic_grid(m1, variance);
    fit_moments_inner(m1, m2, &grid, config)
}

fn fit_moments_inner(m1: f64, m2: f64, grid: &[[f64; 2]], config: &FitConfig) -> Result<FitResult> {
    let objective = |theta: &[f64; 2]| match from_theta(*theta) {
        Some(d) => moment_objective(&d, m1, m2),
        None => f64::INFINITY,
    };
    let mut starts = Vec::new();
    if let Some(d) = approximate_moment_start(m1, m2 - m1 * m1) {
        starts.push(to_theta(&d));
    }
    let mut ranked: Vec<([f64; 2], f64)> = grid
        .iter()
        .map(|t| (*t, objective(t)))
        .filter(|(_, v)| v.is_finite())
        .collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1));
    starts.extend(ranked.iter().take(config.grid_starts).map(|(t, _)| *t));

    let best = multi_start(&objective, &starts, config)
        .ok_or_else(|| Error::DegenerateSample("no feasible starting point".into()))?;
    let params = from_theta(best.x).expect("optimum lies inside the search box");
    let boundary = super::near_boundary(best.x);
    let mut notes = Vec::new();
    if !best.converged {
        notes.push("iteration limit reached".to_string());
    }
    if boundary {
        notes.push("optimum on search boundary".to_string());
    }
    notes.push(format!("objective={}", crate::fmt::sig(best.value)));
    Ok(FitResult {
        params,
        method: Method::Moments,
        loglik: f64::NAN,
        se_alpha: None,
        se_p: None,
        cov_alpha_p: None,
        converged: best.converged && !boundary,
        iterations: best.iterations,
        notes: notes.join("; "),
    })
}

/// Start grid for moment input without a sample: a 5 × 5 lattice around the
/// moment approximation.
fn synthetic_grid(mean: f64, variance: f64) -> Vec<[f64; 2]> {
    let center = approximate_moment_start(mean, variance)
        .map(|d| to_theta(&d))
        .unwrap_or([0.0, 0.0]);
    let offsets = [-2.0, -1.0, 0.0, 1.0, 2.0];
    offsets
        .iter()
        .flat_map(|&da| {
            offsets
                .iter()
                .map(move |&db| [center[0] + da, center[1] + db])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::fit_mle;
    use crate::sampling::sample;

    #[test]
    fn exact_moments_fixed_point() {
        let truth = Params::new(1.0, 0.5).unwrap();
        let (m1, m2) = raw_moments_12(&truth, DEFAULT_EPS_TAIL, MAX_SUPPORT).unwrap();
        let fit = fit_moments_from_raw(m1, m2, &FitConfig::default()).unwrap();
        assert!((fit.params.alpha() - 1.0).abs() < 1e-4, "{:?}", fit.params);
        assert!((fit.params.p() - 0.5).abs() < 1e-4, "{:?}", fit.params);
    }

    #[test]
    fn own_objective_not_worse_than_mle() {
        let truth = Params::new(5.0, 0.75).unwrap();
        let s = Sample::new(sample(&truth, 2_000, 5).unwrap()).unwrap();
        let config = FitConfig::default();
        let mom = fit_moments(&s, &config).unwrap();
        let mle = fit_mle(&s, &config).unwrap();
        let (m1, m2) = (s.raw_moment(1), s.raw_moment(2));
        assert!(moment_objective(&mom.params, m1, m2) <= moment_objective(&mle.params, m1, m2));
        assert!(mom.loglik <= mle.loglik + 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        let s = Sample::new(vec![2, 2, 2]).unwrap();
        assert!(matches!(
            fit_moments(&s, &FitConfig::default()),
            Err(Error::DegenerateSample(_))
        ));
        assert!(fit_moments_from_raw(1.0, 1.0, &FitConfig::default()).is_err());
        assert!(fit_moments(&Sample::new(vec![1]).unwrap(), &FitConfig::default()).is_err());
    }
}
