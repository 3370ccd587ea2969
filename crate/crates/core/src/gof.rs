//! Kolmogorov–Smirnov goodness of fit for integer data.

use serde::{Deserialize, Serialize};

use crate::estimation::Sample;
use crate::numeric::kolmogorov_sf;
use crate::{fmt, Params};

/// Right-continuous empirical cdf `#{y_i ≤ y} / n`.
pub fn ecdf(sample: &Sample, y: i64) -> f64 {
    sample.count_at_most(y) as f64 / sample.n() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub ks_stat: f64,
    /// Asymptotic Kolmogorov tail probability at `√n·D`. For a discrete null
    /// this is a conservative (lower) bound on the p-value.
    pub pvalue_lower_bound: f64,
    pub n: usize,
    /// `|ecdf(y) - cdf(y)|` at each distinct sample value.
    pub abs_diff_points: Vec<(i64, f64)>,
    pub fitted: Params,
}

impl GofReport {
    /// Flat `key=value` lines.
    pub fn to_record(&self) -> String {
        format!(
            "ks_stat={}\npvalue_lower_bound={}\nn={}\nalpha={}\np={}\n",
            fmt::sig(self.ks_stat),
            fmt::sig(self.pvalue_lower_bound),
            self.n,
            fmt::sig(self.fitted.alpha()),
            fmt::sig(self.fitted.p()),
        )
    }

    /// CSV `y,abs_diff`.
    pub fn abs_diff_csv(&self) -> String {
        let mut out = String::from("y,abs_diff\n");
        for &(y, d) in &self.abs_diff_points {
            out.push_str(&format!("{},{}\n", y, fmt::sig(d)));
        }
        out
    }
}

/// Largest `|F_emp(y) - cdf(y)|` over the supplied step points.
///
/// `steps` lists `(y, F_emp(y))`; between steps the empirical function is
/// taken as constant, so each step is probed at `y` and at `y - 1`.
/// Both step functions only jump at integers, which makes this the exact
/// supremum over all of ℤ when `steps` holds every jump of `F_emp`.
pub fn ks_distance(steps: &[(i64, f64)], params: &Params) -> f64 {
    let mut d: f64 = 0.0;
    let mut below = 0.0;
    for &(y, f) in steps {
        d = d.max((f - params.cdf(y)).abs());
        d = d.max((below - params.cdf(y - 1)).abs());
        below = f;
    }
    d
}

/// Two-sided discrete KS test of `sample` against `params`.
pub fn ks_test(sample: &Sample, params: &Params) -> GofReport {
    let steps = ecdf_steps(sample);
    let ks_stat = ks_distance(&steps, params);
    let n = sample.n();
    let pvalue_lower_bound = kolmogorov_sf((n as f64).sqrt() * ks_stat).clamp(0.0, 1.0);
    GofReport {
        ks_stat,
        pvalue_lower_bound,
        n,
        abs_diff_points: abs_diff_curve(sample, params),
        fitted: *params,
    }
}

/// `|ecdf(y) - cdf(y)|` at each distinct sample value, ascending in `y`.
pub fn abs_diff_curve(sample: &Sample, params: &Params) -> Vec<(i64, f64)> {
    ecdf_steps(sample)
        .into_iter()
        .map(|(y, f)| (y, (f - params.cdf(y)).abs()))
        .collect()
}

/// Two-sample KS distance `sup_y |F_a(y) - F_b(y)|`.
pub fn two_sample_distance(a: &Sample, b: &Sample) -> f64 {
    let mut ys: Vec<i64> = a
        .sorted_unique()
        .iter()
        .chain(b.sorted_unique())
        .map(|&(y, _)| y)
        .collect();
    ys.sort_unstable();
    ys.dedup();
    ys.into_iter()
        .map(|y| (ecdf(a, y) - ecdf(b, y)).abs())
        .fold(0.0, f64::max)
}

fn ecdf_steps(sample: &Sample) -> Vec<(i64, f64)> {
    let n = sample.n() as f64;
    let mut acc = 0usize;
    sample
        .sorted_unique()
        .iter()
        .map(|&(y, m)| {
            acc += m;
            (y, acc as f64 / n)
        })
        .collect()
}
