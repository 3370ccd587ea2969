use super::{FitResult, Method, Sample};
use crate::{Error, Params, Result};

/// Method of proportions.
///
/// Equates the observed fractions of negative and positive values with
/// `e^{-α}` and `1 - e^{-αp}`, which solves to
/// `α̂ = ln(1/p̂₋)` and `p̂ = ln(1 - p̂₊) / ln p̂₋`.
pub fn fit_proportions(sample: &Sample) -> Result<FitResult> {
    let n = sample.n() as f64;
    let c = sample.counts();
    let params = fit_proportions_from(c.neg as f64 / n, c.pos as f64 / n)?;
    Ok(FitResult::closed_form(params, Method::Proportions, sample))
}

/// Closed-form inversion of the negative/positive proportions.
pub fn fit_proportions_from(p_neg: f64, p_pos: f64) -> Result<Params> {
    if !(p_neg > 0.0 && p_neg < 1.0) {
        return Err(Error::MethodInapplicable(format!(
            "proportion of negative values must be in (0, 1) (got {p_neg})"
        )));
    }
    if !(p_pos > 0.0 && p_pos < 1.0) {
        return Err(Error::MethodInapplicable(format!(
            "proportion of positive values must be in (0, 1) (got {p_pos})"
        )));
    }
    let alpha = -p_neg.ln();
    let p = (-p_pos).ln_1p() / p_neg.ln();
    Params::new(alpha, p).map_err(|_| {
        Error::InconsistentEstimate(format!(
            "proportions (neg = {p_neg}, pos = {p_pos}) give alpha = {alpha}, p = {p}"
        ))
    })
}
