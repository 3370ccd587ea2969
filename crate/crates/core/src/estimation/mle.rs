use super::optimize::multi_start;
use super::{
    approximate_moment_start, fit_proportions, fit_survreg, from_theta, loglik, near_boundary,
    start_grid, to_theta, FitConfig, FitResult, Method, Sample,
};
use crate::{Error, Params, Result};

/// Maximum likelihood fit.
///
/// Minimizes `-log L` over `(ln α, logit p)` with the simplex search, started
/// from the proportions and survival-regression estimates (when those
/// apply), the moment approximation, and the best points of a coarse 5 × 5
/// grid. Standard errors come from the inverse observed information on the
/// `(α, p)` scale.
///
/// A fit that ends on the edge of the search box, or that hits the iteration
/// cap, is returned with `converged = false`; likelihoods whose supremum
/// is only approached at the boundary (e.g. samples taking one or two values)
/// end up there.
pub fn fit_mle(sample: &Sample, config: &FitConfig) -> Result<FitResult> {
    if sample.n() < 2 {
        return Err(Error::InsufficientData(
            "maximum likelihood needs n >= 2".into(),
        ));
    }
    let objective = |theta: &[f64; 2]| match from_theta(*theta) {
        Some(d) => -loglik(&d, sample),
        None => f64::INFINITY,
    };

    let starts = mle_starts(sample, config, &objective);
    let best = multi_start(&objective, &starts, config)
        .ok_or_else(|| Error::DegenerateSample("no feasible starting point".into()))?;
    let params = from_theta(best.x).expect("optimum lies inside the search box");

    let mut notes = Vec::new();
    let mut converged = best.converged && best.value.is_finite();
    if !best.converged {
        notes.push("iteration limit reached".to_string());
    }
    if sample.max() - sample.min() <= 1 {
        // any split of mass between two adjacent integers is the limit p -> 0
        // of the family, so the supremum is not attained
        converged = false;
        notes.push("no maximum: sample spans at most two adjacent values".to_string());
    } else if near_boundary(best.x) {
        converged = false;
        notes.push("optimum on search boundary".to_string());
    }

    let (se_alpha, se_p, cov_alpha_p) = match observed_information(&params, sample).covariance() {
        Some(cov) => (
            Some(cov[0][0].sqrt()),
            Some(cov[1][1].sqrt()),
            Some(cov[0][1]),
        ),
        None => {
            notes
                .push("observed information not positive definite; standard errors omitted".into());
            (None, None, None)
        }
    };

    Ok(FitResult {
        params,
        method: Method::Mle,
        loglik: -best.value,
        se_alpha,
        se_p,
        cov_alpha_p,
        converged,
        iterations: best.iterations,
        notes: notes.join("; "),
    })
}

fn mle_starts<F>(sample: &Sample, config: &FitConfig, objective: &F) -> Vec<[f64; 2]>
where
    F: Fn(&[f64; 2]) -> f64,
{
    let mut starts = Vec::new();
    if let Ok(fit) = fit_proportions(sample) {
        starts.push(to_theta(&fit.params));
    }
    if let Ok((fit, _)) = fit_survreg(sample) {
        starts.push(to_theta(&fit.params));
    }
    if let Some(d) = approximate_moment_start(sample.mean(), sample.variance()) {
        starts.push(to_theta(&d));
    }
    let mut grid: Vec<([f64; 2], f64)> = start_grid(sample)
        .into_iter()
        .map(|t| (t, objective(&t)))
        .filter(|(_, v)| v.is_finite())
        .collect();
    grid.sort_by(|a, b| a.1.total_cmp(&b.1));
    starts.extend(grid.iter().take(config.grid_starts).map(|(t, _)| *t));
    starts.retain(|t| t[0].is_finite() && t[1].is_finite());
    starts
}

/// Observed information `-∇² log L` on the `(α, p)` scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservedInformation {
    /// Row-major 2 × 2 matrix, index 0 = α, 1 = p.
    pub matrix: [[f64; 2]; 2],
}

impl ObservedInformation {
    /// Inverse of the information matrix, or `None` unless positive definite.
    pub fn covariance(&self) -> Option<[[f64; 2]; 2]> {
        let [[a, b], [_, d]] = self.matrix;
        let det = a * d - b * b;
        if !(a > 0.0 && d > 0.0 && det > 0.0 && det.is_finite()) {
            return None;
        }
        Some([[d / det, -b / det], [-b / det, a / det]])
    }
}

/// Central-difference Hessian of the log-likelihood with steps
/// `h = max(1e-5, 1e-5·|θ|)`, shrunk where needed to keep `α - h > 0` and
/// `p ± h` inside (0, 1).
pub fn observed_information(params: &Params, sample: &Sample) -> ObservedInformation {
    let (a, p) = (params.alpha(), params.p());
    let ha = (1e-5f64).max(1e-5 * a).min(0.5 * a);
    let hp = (1e-5f64).max(1e-5 * p).min(0.5 * p.min(1.0 - p));
    let ll = |da: f64, dp: f64| match Params::new(a + da, p + dp) {
        Ok(d) => loglik(&d, sample),
        Err(_) => f64::NAN,
    };
    let l0 = ll(0.0, 0.0);
    let h_aa = (ll(ha, 0.0) - 2.0 * l0 + ll(-ha, 0.0)) / (ha * ha);
    let h_pp = (ll(0.0, hp) - 2.0 * l0 + ll(0.0, -hp)) / (hp * hp);
    let h_ap = (ll(ha, hp) - ll(ha, -hp) - ll(-ha, hp) + ll(-ha, -hp)) / (4.0 * ha * hp);
    ObservedInformation {
        matrix: [[-h_aa, -h_ap], [-h_ap, -h_pp]],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::sample;

    #[test]
    fn recovers_generating_parameters() {
        let d = Params::new(1.0, 0.5).unwrap();
        let s = Sample::new(sample(&d, 10_000, 11).unwrap()).unwrap();
        let fit = fit_mle(&s, &FitConfig::default()).unwrap();
        assert!(fit.converged, "{}", fit.notes);
        assert!((fit.params.alpha() - 1.0).abs() < 0.1);
        assert!((fit.params.p() - 0.5).abs() < 0.02);
        let (sa, sp) = (fit.se_alpha.unwrap(), fit.se_p.unwrap());
        // standard errors shrink like 1/√n: at n = 100 they are
        // about 0.109 and 0.028
        assert!((sa * 10.0 - 0.109).abs() < 0.02, "se_alpha = {sa}");
        assert!((sp * 10.0 - 0.028).abs() < 0.005, "se_p = {sp}");
    }

    #[test]
    fn degenerate_sample_does_not_panic() {
        let s = Sample::new(vec![0, 0]).unwrap();
        let fit = fit_mle(&s, &FitConfig::default()).unwrap();
        assert!(!fit.converged);
        assert!(fit.loglik.is_finite());
    }

    #[test]
    fn two_adjacent_values_have_no_maximum() {
        let mut v = vec![0; 16];
        v.extend([1; 9]);
        let fit = fit_mle(&Sample::new(v).unwrap(), &FitConfig::default()).unwrap();
        assert!(!fit.converged, "{:?}", fit);
        // the supremum is the two-point empirical likelihood
        let bound = 16.0 * (16.0f64 / 25.0).ln() + 9.0 * (9.0f64 / 25.0).ln();
        assert!(fit.loglik <= bound + 1e-9 && fit.loglik > bound - 0.1);
    }

    #[test]
    fn rejects_single_observation() {
        let s = Sample::new(vec![3]).unwrap();
        assert!(fit_mle(&s, &FitConfig::default()).is_err());
    }

    #[test]
    fn information_is_symmetric_and_finite() {
        let d = Params::new(2.0, 0.6).unwrap();
        let s = Sample::new(vec![0, 1, 1, 2, 3, -1]).unwrap();
        let info = observed_information(&d, &s);
        assert_eq!(info.matrix[0][1], info.matrix[1][0]);
        assert!(info.matrix.iter().flatten().all(|v| v.is_finite()));
    }
}
