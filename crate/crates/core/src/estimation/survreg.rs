use serde::{Deserialize, Serialize};

use super::{FitResult, Method, Sample};
use crate::{fmt, Error, Params, Result};

/// A point of the empirical survival function with its regression weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalPoint {
    pub y: i64,
    pub survival: f64,
    pub weight: f64,
}

/// Empirical survival `Ŝ(y) = #{y_i ≥ y} / n` at each distinct sample value,
/// weighted by multiplicity. Points with `Ŝ ∈ {0, 1}` are dropped.
pub fn diagnostic_points(sample: &Sample) -> Vec<SurvivalPoint> {
    let n = sample.n() as f64;
    sample
        .sorted_unique()
        .iter()
        .filter_map(|&(y, m)| {
            let s = sample.count_at_least(y) as f64 / n;
            (s > 0.0 && s < 1.0).then_some(SurvivalPoint {
                y,
                survival: s,
                weight: m as f64,
            })
        })
        .collect()
}

/// `z = -ln(-ln(1 - S))`, linear in `y` under the model: `z = -ln α - y ln p`.
#[inline]
fn linearize(survival: f64) -> f64 {
    -(-(-survival).ln_1p()).ln()
}

/// Weighted least-squares line through the linearized survival points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticLine {
    /// `(y, z)` pairs in ascending `y`.
    pub points: Vec<(i64, f64)>,
    pub weights: Vec<f64>,
    /// `a = ln(1/α)`.
    pub intercept_a: f64,
    /// `b = ln(1/p)`.
    pub slope_b: f64,
    pub r_squared: f64,
}

impl DiagnosticLine {
    /// Estimates implied by the line: `α̂ = e^{-a}`, `p̂ = e^{-b}`.
    pub fn params(&self) -> Result<Params> {
        Params::new((-self.intercept_a).exp(), (-self.slope_b).exp())
    }

    /// CSV `y,z,z_fit` with the fitted line of this regression.
    pub fn to_csv(&self) -> String {
        self.csv_with_line(self.intercept_a, self.slope_b)
    }

    fn csv_with_line(&self, a: f64, b: f64) -> String {
        let mut out = String::from("y,z,z_fit\n");
        for &(y, z) in &self.points {
            out.push_str(&format!(
                "{},{},{}\n",
                y,
                fmt::sig(z),
                fmt::sig(a + b * y as f64)
            ));
        }
        out
    }
}

/// Diagnostic CSV `y,z,z_fit` for `sample`, with `z_fit` taken from
/// `params` (`a = -ln α`, `b = -ln p`) whatever method produced them.
pub fn diagnostic_csv(sample: &Sample, params: &Params) -> String {
    let mut out = String::from("y,z,z_fit\n");
    let (a, b) = (-params.alpha().ln(), params.ln_inv_p());
    for pt in diagnostic_points(sample) {
        out.push_str(&format!(
            "{},{},{}\n",
            pt.y,
            fmt::sig(linearize(pt.survival)),
            fmt::sig(a + b * pt.y as f64)
        ));
    }
    out
}

/// Weighted least squares of `z = -ln(-ln(1 - S))` on `y`.
pub fn survival_regression(points: &[SurvivalPoint]) -> Result<DiagnosticLine> {
    let usable: Vec<&SurvivalPoint> = points
        .iter()
        .filter(|pt| pt.survival > 0.0 && pt.survival < 1.0 && pt.weight > 0.0)
        .collect();
    if usable.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "survival regression needs at least 3 points with 0 < S < 1 (got {})",
            usable.len()
        )));
    }
    let xy: Vec<(i64, f64)> = usable
        .iter()
        .map(|pt| (pt.y, linearize(pt.survival)))
        .collect();
    let w: Vec<f64> = usable.iter().map(|pt| pt.weight).collect();
    let sw: f64 = w.iter().sum();
    let xbar = xy
        .iter()
        .zip(&w)
        .map(|(&(y, _), wi)| wi * y as f64)
        .sum::<f64>()
        / sw;
    let zbar = xy.iter().zip(&w).map(|(&(_, z), wi)| wi * z).sum::<f64>() / sw;
    let (mut sxx, mut sxz, mut szz) = (0.0, 0.0, 0.0);
    for (&(y, z), wi) in xy.iter().zip(&w) {
        let dx = y as f64 - xbar;
        let dz = z - zbar;
        sxx += wi * dx * dx;
        sxz += wi * dx * dz;
        szz += wi * dz * dz;
    }
    let slope_b = sxz / sxx;
    let intercept_a = zbar - slope_b * xbar;
    let r_squared = if szz > 0.0 {
        (sxz * sxz / (sxx * szz)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(DiagnosticLine {
        points: xy,
        weights: w,
        intercept_a,
        slope_b,
        r_squared,
    })
}

/// Regression estimator on the linearized empirical survival function.
///
/// Returns the line as a diagnostic: near-linear points support the model.
/// A non-positive slope (`p̂ ≥ 1`) is reported as
/// [`Error::InconsistentFit`] carrying the line.
pub fn fit_survreg(sample: &Sample) -> Result<(FitResult, DiagnosticLine)> {
    let line = survival_regression(&diagnostic_points(sample))?;
    if line.slope_b.is_nan() || line.slope_b <= 0.0 {
        return Err(Error::InconsistentFit(Box::new(line)));
    }
    let params = line
        .params()
        .map_err(|e| Error::InconsistentEstimate(e.to_string()))?;
    let mut fit = FitResult::closed_form(params, Method::Survreg, sample);
    fit.notes = format!("r_squared={}", fmt::sig(line.r_squared));
    Ok((fit, line))
}

/// Estimator of `p` when `α` is known.
///
/// Each usable point inverts `-ln(1 - Ŝ(y)) = α p^y` to
/// `ln p̂(y) = [ln(-ln(1 - Ŝ(y))) - ln α] / y`; points at `y = 0` carry no
/// information about `p` and are skipped. The per-point values are averaged
/// with multiplicity weights in log space.
pub fn estimate_p_known_alpha(sample: &Sample, alpha: f64) -> Result<f64> {
    estimate_p_from_survival(&diagnostic_points(sample), alpha)
}

pub fn estimate_p_from_survival(points: &[SurvivalPoint], alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let ln_alpha = alpha.ln();
    let (mut num, mut den) = (0.0, 0.0);
    for pt in points {
        let usable = pt.survival > 0.0 && pt.survival < 1.0 && pt.weight > 0.0;
        if pt.y == 0 || !usable {
            continue;
        }
        let ln_p = ((-(-pt.survival).ln_1p()).ln() - ln_alpha) / pt.y as f64;
        num += pt.weight * ln_p;
        den += pt.weight;
    }
    if den == 0.0 {
        return Err(Error::InsufficientData(
            "no point with y != 0 and 0 < S(y) < 1".into(),
        ));
    }
    let p = (num / den).exp();
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InconsistentEstimate(format!(
            "estimated p = {p} is outside (0, 1)"
        )));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::sample;

    fn exact_points(d: &Params, ys: impl Iterator<Item = i64>) -> Vec<SurvivalPoint> {
        ys.map(|y| SurvivalPoint {
            y,
            survival: d.survival(y),
            weight: 1.0,
        })
        .collect()
    }

    #[test]
    fn exact_survival_is_linear() {
        let d = Params::new(1.0, 0.5).unwrap();
        let line = survival_regression(&exact_points(&d, -2..=20)).unwrap();
        assert!(line.intercept_a.abs() < 1e-10);
        assert!((line.slope_b - 2f64.ln()).abs() < 1e-10);
        assert!((line.r_squared - 1.0).abs() < 1e-10);
    }

    #[test]
    fn excludes_boundary_survival_values() {
        let s = Sample::new(vec![0, 1, 1, 2, 5]).unwrap();
        let pts = diagnostic_points(&s);
        // the minimum has Ŝ = 1 and is dropped
        assert_eq!(pts.iter().map(|p| p.y).collect::<Vec<_>>(), vec![1, 2, 5]);
        assert!((pts[0].survival - 0.8).abs() < 1e-15);
        assert_eq!(pts[0].weight, 2.0);
    }

    #[test]
    fn insufficient_points() {
        let s = Sample::new(vec![0, 0, 1, 2]).unwrap();
        assert!(matches!(fit_survreg(&s), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn inconsistent_slope() {
        // survival increasing in y: slope negative
        let pts = vec![
            SurvivalPoint {
                y: 0,
                survival: 0.2,
                weight: 1.0,
            },
            SurvivalPoint {
                y: 1,
                survival: 0.5,
                weight: 1.0,
            },
            SurvivalPoint {
                y: 2,
                survival: 0.8,
                weight: 1.0,
            },
        ];
        let line = survival_regression(&pts).unwrap();
        assert!(line.slope_b < 0.0);
        assert!(line.params().is_err());
    }

    #[test]
    fn large_sample_linearity() {
        let d = Params::new(1.0, 0.5).unwrap();
        let s = Sample::new(sample(&d, 10_000, 21).unwrap()).unwrap();
        let (fit, line) = fit_survreg(&s).unwrap();
        assert!(line.r_squared > 0.98);
        assert!((fit.params.p() - 0.5).abs() < 0.05);
    }

    #[test]
    fn p_known_alpha_exact() {
        let d = Params::new(1.0, 0.5).unwrap();
        let p = estimate_p_from_survival(&exact_points(&d, -4..=10), 1.0).unwrap();
        assert!((p - 0.5).abs() < 1e-10);
    }

    #[test]
    fn p_known_alpha_zero_only() {
        let pts = vec![SurvivalPoint {
            y: 0,
            survival: 0.6,
            weight: 3.0,
        }];
        assert!(estimate_p_from_survival(&pts, 1.0).is_err());
        let pts = vec![
            SurvivalPoint {
                y: 0,
                survival: 0.6,
                weight: 3.0,
            },
            SurvivalPoint {
                y: 1,
                survival: 1.0 - (-0.5f64).exp(),
                weight: 1.0,
            },
        ];
        assert!((estimate_p_from_survival(&pts, 1.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let s = Sample::new(vec![0, 1, 1, 2, 3, 5]).unwrap();
        let (fit, line) = fit_survreg(&s).unwrap();
        let csv = line.to_csv();
        assert!(csv.starts_with("y,z,z_fit\n"));
        assert_eq!(csv.lines().count(), line.points.len() + 1);
        let other = diagnostic_csv(&s, &fit.params);
        assert_eq!(other.lines().count(), csv.lines().count());
    }
}
