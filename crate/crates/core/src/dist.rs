use serde::{Deserialize, Serialize};

use crate::numeric::{ln_one_minus_exp_neg_exp, one_minus_exp_neg};
use crate::{Error, Result};

/// Default tail tolerance for truncated summations over ℤ.
pub const DEFAULT_EPS_TAIL: f64 = 1e-12;

/// Parameters of `DGUD(α, p)`.
///
/// `α > 0` acts as a location parameter and `p ∈ (0, 1)` as a scale
/// parameter. They relate to the continuous Gumbel `EV(μ, σ)` through
/// `p = e^{-1/σ}` and `α = p^{-μ}`.
///
/// Most functions go through `t(y) = α p^y`, which is evaluated in log space
/// (`ln t(y) = ln α + y ln p`) so that neither tail overflows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct Params {
    alpha: f64,
    p: f64,
    ln_alpha: f64,
    ln_p: f64,
    ln_one_minus_p: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    alpha: f64,
    p: f64,
}

impl TryFrom<RawParams> for Params {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        Params::new(raw.alpha, raw.p)
    }
}

impl From<Params> for RawParams {
    fn from(d: Params) -> Self {
        RawParams {
            alpha: d.alpha,
            p: d.p,
        }
    }
}

impl Params {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidAlpha(alpha));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidP(p));
        }
        Ok(Self {
            alpha,
            p,
            ln_alpha: alpha.ln(),
            ln_p: p.ln(),
            ln_one_minus_p: (-p).ln_1p(),
        })
    }

    /// Parameters of `⌊X⌋` for `X ~ EV(μ, σ)`.
    pub fn from_mu_sigma(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidSigma(sigma));
        }
        if !mu.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "mu must be finite (got {mu})"
            )));
        }
        Self::new((mu / sigma).exp(), (-1.0 / sigma).exp())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `ln(1/p)`, the reciprocal of the continuous scale σ.
    pub fn ln_inv_p(&self) -> f64 {
        -self.ln_p
    }

    /// Continuous location `μ = ln α / ln(1/p)`.
    pub fn mu(&self) -> f64 {
        self.ln_alpha / -self.ln_p
    }

    /// Continuous scale `σ = 1 / ln(1/p)`.
    pub fn sigma(&self) -> f64 {
        1.0 / -self.ln_p
    }

    /// Parameters of `Y + c` when `Y` has these parameters: `α → α p^{-c}`.
    pub fn shifted(&self, c: i64) -> Result<Self> {
        Self::new((self.ln_alpha - c as f64 * self.ln_p).exp(), self.p)
    }

    #[inline]
    fn ln_t(&self, y: i64) -> f64 {
        self.ln_alpha + y as f64 * self.ln_p
    }

    /// `Pr(Y = y)`, evaluated as `e^{-αp^{y+1}} · (1 - e^{-αp^y(1-p)})`.
    ///
    /// Underflows to 0 far in the left tail; use [`Params::ln_pmf`] there.
    pub fn pmf(&self, y: i64) -> f64 {
        let cdf = self.cdf(y);
        if cdf == 0.0 {
            return 0.0;
        }
        cdf * one_minus_exp_neg((self.ln_t(y) + self.ln_one_minus_p).exp())
    }

    /// `ln Pr(Y = y) = -αp^{y+1} + ln(1 - e^{-αp^y(1-p)})`, finite for every
    /// representable `y`.
    pub fn ln_pmf(&self, y: i64) -> f64 {
        -self.ln_t(y + 1).exp() + ln_one_minus_exp_neg_exp(self.ln_t(y) + self.ln_one_minus_p)
    }

    /// `Pr(Y ≤ y) = e^{-αp^{y+1}}`. Values below the smallest normal `f64`
    /// saturate to 0.
    pub fn cdf(&self, y: i64) -> f64 {
        saturate(self.ln_cdf(y).exp())
    }

    pub fn ln_cdf(&self, y: i64) -> f64 {
        -self.ln_t(y + 1).exp()
    }

    /// `S(y) = Pr(Y ≥ y) = 1 - e^{-αp^y}`. Values below the smallest normal
    /// `f64` saturate to 0.
    pub fn survival(&self, y: i64) -> f64 {
        saturate(one_minus_exp_neg(self.ln_t(y).exp()))
    }

    pub fn ln_survival(&self, y: i64) -> f64 {
        ln_one_minus_exp_neg_exp(self.ln_t(y))
    }

    /// Survival function on the real line: `S(x) = 1 - e^{-αp^{⌊x⌋+1}}` for
    /// non-integer `x`, and [`Params::survival`] at integers.
    pub fn survival_at(&self, x: f64) -> f64 {
        let fl = x.floor();
        if fl == x {
            self.survival(fl as i64)
        } else {
            self.survival(fl as i64 + 1)
        }
    }

    /// Proportions of negative values, zeros and positive values:
    /// `(e^{-α}, e^{-αp} - e^{-α}, 1 - e^{-αp})`.
    pub fn proportions(&self) -> (f64, f64, f64) {
        (self.cdf(-1), self.pmf(0), self.survival(1))
    }

    /// `Pr(a < Y ≤ b) = e^{-αp^{b+1}} - e^{-αp^{a+1}}`.
    pub fn interval_prob(&self, a: i64, b: i64) -> Result<f64> {
        if a > b {
            return Err(Error::InvalidArgument(format!(
                "interval lower bound {a} exceeds upper bound {b}"
            )));
        }
        if a == b {
            return Ok(0.0);
        }
        // t(a+1) - t(b+1) = t(b+1) (p^{a-b} - 1)
        let gap = self.ln_t(b + 1).exp() * ((a - b) as f64 * self.ln_p).exp_m1();
        Ok(self.cdf(b) * one_minus_exp_neg(gap))
    }

    /// Smallest integer `y` with `F(y) ≥ u`, i.e. `F(y-1) < u ≤ F(y)`.
    ///
    /// Uses the closed form `⌈(ln(1/α) + ln ln(1/u)) / ln p - 1⌉`, then steps
    /// by one where rounding broke the bracket.
    pub fn quantile(&self, u: f64) -> Result<i64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "u must be in (0, 1) (got {u})"
            )));
        }
        Ok(self.quantile_unchecked(u))
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> i64 {
        let v = ((-u.ln()).ln() - self.ln_alpha) / self.ln_p - 1.0;
        // `as` saturates at the i64 range
        let mut y = v.ceil() as i64;
        for _ in 0..4 {
            if self.cdf(y) < u {
                y += 1;
            } else if self.cdf(y - 1) >= u {
                y -= 1;
            } else {
                break;
            }
        }
        y
    }

    /// Mode of the pmf.
    ///
    /// Starts at `⌊ln α / ln(1/p)⌋` and climbs to the neighbouring maximum;
    /// the formula alone is off by one for some parameter values. The pmf is
    /// log-concave, so the local maximum is global. On exact ties the
    /// smaller point is returned.
    pub fn mode(&self) -> i64 {
        let mut m = self.mu().floor() as i64;
        while self.ln_pmf(m + 1) > self.ln_pmf(m) {
            m += 1;
        }
        while self.ln_pmf(m - 1) >= self.ln_pmf(m) {
            m -= 1;
        }
        m
    }

    /// Failure rate `r(y) = Pr(Y = y) / S(y)`, computed in log space.
    ///
    /// Equal to `e^{-αp^{y+1}} (1 - e^{-α(1-p)p^y}) / (1 - e^{-αp^y})`. The
    /// closed form sometimes quoted for this ratio drops the leading
    /// `e^{-αp^{y+1}}` factor.
    pub fn hazard(&self, y: i64) -> f64 {
        (self.ln_pmf(y) - self.ln_survival(y)).exp()
    }

    /// Second failure rate `r*(y) = ln[S(y) / S(y+1)]`.
    pub fn second_failure_rate(&self, y: i64) -> f64 {
        self.ln_survival(y) - self.ln_survival(y + 1)
    }

    /// Truncation window `[lo, hi]` whose outside mass is at most `eps_tail`.
    pub fn support(&self, eps_tail: f64) -> Result<IntSupport> {
        IntSupport::for_params(self, eps_tail)
    }
}

#[inline]
fn saturate(v: f64) -> f64 {
    if v < f64::MIN_POSITIVE {
        0.0
    } else {
        v
    }
}

/// Inclusive integer window used to truncate sums over ℤ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntSupport {
    pub lo: i64,
    pub hi: i64,
}

impl IntSupport {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "support lower bound {lo} exceeds upper bound {hi}"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// `[F^{-1}(ε/2), F^{-1}(1 - ε/2)]`, leaving at most `ε` outside.
    pub fn for_params(params: &Params, eps_tail: f64) -> Result<Self> {
        if !(eps_tail > 0.0 && eps_tail < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "eps_tail must be in (0, 0.5) (got {eps_tail})"
            )));
        }
        let half = 0.5 * eps_tail;
        let lo = params.quantile_unchecked(half);
        let hi = params.quantile_unchecked(1.0 - half);
        Self::new(lo, hi)
    }

    /// Exact probability `Pr(Y < lo) + Pr(Y > hi)` under `params`.
    pub fn tail_mass(&self, params: &Params) -> f64 {
        params.cdf(self.lo - 1) + params.survival(self.hi + 1)
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }
}

/// Law of the maximum of independent `DGUD(α_i, p)` variables sharing `p`:
/// `DGUD(Σα_i, p)`.
pub fn max_closure(params: &[Params]) -> Result<Params> {
    let first = params
        .first()
        .ok_or_else(|| Error::InvalidArgument("max_closure needs at least one input".into()))?;
    let mut alpha = 0.0;
    for d in params {
        if (d.p - first.p).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "all inputs must share p (got {} and {})",
                first.p, d.p
            )));
        }
        alpha += d.alpha;
    }
    Params::new(alpha, first.p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(a: f64, p: f64) -> Params {
        Params::new(a, p).unwrap()
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert_eq!(Params::new(0.0, 0.5), Err(Error::InvalidAlpha(0.0)));
        assert_eq!(Params::new(-1.0, 0.5), Err(Error::InvalidAlpha(-1.0)));
        assert!(Params::new(f64::NAN, 0.5).is_err());
        assert_eq!(Params::new(1.0, 1.0), Err(Error::InvalidP(1.0)));
        assert_eq!(Params::new(1.0, 0.0), Err(Error::InvalidP(0.0)));
        assert!(Params::new(1.0, f64::NAN).is_err());
        assert_eq!(
            Params::from_mu_sigma(0.0, 0.0),
            Err(Error::InvalidSigma(0.0))
        );
    }

    #[test]
    fn mu_sigma_round_trip() {
        for (mu, sigma) in [
            (0.0, 1.0),
            (-3.5, 0.3),
            (12.0, 40.0),
            (2.25, 1.0 / 2f64.ln()),
        ] {
            let q = Params::from_mu_sigma(mu, sigma).unwrap();
            assert!((q.sigma() - sigma).abs() <= 1e-12 * sigma);
            assert!((q.mu() - mu).abs() <= 1e-12 * mu.abs().max(1.0));
        }
        let q = Params::from_mu_sigma(0.0, 1.0 / 2f64.ln()).unwrap();
        assert!((q.alpha() - 1.0).abs() < 1e-15);
        assert!((q.p() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pmf_examples() {
        let e = std::f64::consts::E;
        let v = d(1.0, 1.0 / e).pmf(0);
        assert!((v - ((-1.0 / e).exp() - (-1.0f64).exp())).abs() < 1e-15);
        assert!((v - 0.324321186383904).abs() < 1e-14);

        let q = d(0.05, 0.25);
        let v = q.pmf(-1);
        assert!((v - ((-0.05f64).exp() - (-0.2f64).exp())).abs() < 1e-15);
        assert!((v - (q.cdf(-1) - q.cdf(-2))).abs() < 1e-15);
        assert!((v - 0.132498671422732).abs() < 1e-14);
    }

    #[test]
    fn pmf_keeps_precision_in_right_tail() {
        // naive subtraction returns 0 here
        let q = d(1.0, 0.5);
        let y = 60;
        let naive = (-(0.5f64.powi(y + 1))).exp() - (-(0.5f64.powi(y))).exp();
        assert_eq!(naive, 0.0);
        let expected = 0.5f64.powi(61); // ≈ t(y)(1-p) to relative 1e-18
        assert!((q.pmf(y as i64) / expected - 1.0).abs() < 1e-15);
        assert!((q.ln_pmf(y as i64) - expected.ln()).abs() < 1e-14);
    }

    #[test]
    fn ln_pmf_finite_where_pmf_underflows() {
        let q = d(15.0, 0.5);
        assert_eq!(q.pmf(-80), 0.0);
        let l = q.ln_pmf(-80);
        assert!(l.is_finite() && l < -1e20);
    }

    #[test]
    fn cdf_examples() {
        assert!((d(1.0, 0.5).cdf(0) - (-0.5f64).exp()).abs() < 1e-16);
        for a in [0.05, 1.0, 5.0] {
            for p in [0.1, 0.5, 0.9] {
                assert!((d(a, p).cdf(-1) - (-a).exp()).abs() < 1e-16);
            }
        }
        let q = d(15.0, 0.5);
        assert_eq!(q.cdf(-80), 0.0);
        assert!(q.ln_cdf(-80) < -1e20);
    }

    #[test]
    fn survival_examples() {
        let q = d(1.0, 0.5);
        assert!((q.survival(0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((q.survival_at(0.5) - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
        assert_eq!(q.survival_at(0.5), q.survival(1));
        assert_eq!(q.survival_at(3.0), q.survival(3));
        assert!((q.survival_at(-0.5) - q.survival(0)).abs() < 1e-16);
        for a in [0.05, 1.0, 5.0] {
            assert_eq!(d(a, 0.25).survival(-1_000_000), 1.0);
        }
    }

    #[test]
    fn proportions_example() {
        let (neg, zero, pos) = d(1.0, 0.5).proportions();
        assert!((neg - 0.36788).abs() < 5e-6);
        assert!((zero - 0.23865).abs() < 5e-6);
        assert!((pos - 0.39347).abs() < 5e-6);
        assert!((neg + zero + pos - 1.0).abs() < 1e-14);

        let (neg, _, pos) = d(50.0, 0.5).proportions();
        assert!(neg < 1e-21);
        assert!(pos > 0.99);
    }

    #[test]
    fn interval_prob_examples() {
        let q = d(1.0, 0.5);
        assert!((q.interval_prob(-1, 0).unwrap() - q.pmf(0)).abs() < 1e-16);
        assert_eq!(q.interval_prob(3, 3).unwrap(), 0.0);
        assert!(q.interval_prob(1, 0).is_err());
        let brute: f64 = (-4..=5).map(|y| q.pmf(y)).sum();
        let v = q.interval_prob(-5, 5).unwrap();
        assert!((v - brute).abs() < 1e-14);
        assert!((v - (q.cdf(5) - q.cdf(-5))).abs() < 1e-15);
        assert!((v - 0.984496324470234).abs() < 1e-14);
    }

    #[test]
    fn quantile_examples() {
        let q = d(1.0, 0.5);
        assert_eq!(q.quantile(0.5).unwrap(), 0);
        // quartile constants
        assert!(((1.0f64 / 0.25).ln().ln() - 0.3266).abs() < 5e-5);
        assert!(((1.0f64 / 0.5).ln().ln() + 0.3665).abs() < 5e-5);
        assert!(((1.0f64 / 0.75).ln().ln() + 1.2458993237072).abs() < 1e-12);
        for u in [0.25f64, 0.75] {
            let closed = ((-u.ln()).ln() - 0.0) / 0.5f64.ln() - 1.0;
            assert_eq!(q.quantile(u).unwrap(), closed.ceil() as i64);
        }
        assert!(q.quantile(0.0).is_err());
        assert!(q.quantile(1.0).is_err());
        assert!(q.quantile(f64::NAN).is_err());
    }

    #[test]
    fn mode_examples() {
        for p in [0.1, 0.25, 0.5, 0.75, 0.9] {
            assert_eq!(d(1.0, p).mode(), 0);
        }
        assert_eq!(d(15.0, 0.5).mode(), 3);
        assert_eq!(d(0.05, 0.25).mode(), -3);
    }

    #[test]
    fn mode_formula_is_corrected_when_off_by_one() {
        // ⌊μ⌋ = -6 here but the pmf peaks at -5
        let q = d(0.02054405759957423, 0.4604113964297789);
        assert_eq!(q.mu().floor() as i64, -6);
        assert_eq!(q.mode(), -5);
        assert!(q.pmf(-5) > q.pmf(-6) && q.pmf(-5) > q.pmf(-4));
    }

    #[test]
    fn hazard_examples() {
        let q = d(1.0, 0.5);
        assert!((q.hazard(0) - q.pmf(0) / q.survival(0)).abs() < 1e-15);
        assert!((q.hazard(0) - 0.37754).abs() < 5e-6);
        // left tail: survival is 1, hazard equals the pmf
        let l = q.hazard(-40);
        assert_eq!(l, q.ln_pmf(-40).exp());
        assert!((q.hazard(-3) - q.pmf(-3) / q.survival(-3)).abs() < 1e-15);
        // right tail limit 1 - p
        assert!((q.hazard(60) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn second_failure_rate_examples() {
        let q = d(1.0, 0.5);
        let v = q.second_failure_rate(0);
        assert!((v - (q.survival(0) / q.survival(1)).ln()).abs() < 1e-15);
        assert!((v - 0.474076984180107).abs() < 1e-14);
        let (a, b) = (-4, 7);
        let sum: f64 = (a..b).map(|y| q.second_failure_rate(y)).sum();
        assert!((sum - (q.survival(a) / q.survival(b)).ln()).abs() < 1e-13);
        assert!((q.second_failure_rate(60) - 2f64.ln()).abs() < 1e-12);
        assert!((-50..50).all(|y| q.second_failure_rate(y) >= 0.0));
    }

    #[test]
    fn max_closure_examples() {
        let a = d(1.0, 0.5);
        let b = d(2.0, 0.5);
        let m = max_closure(&[a, b]).unwrap();
        assert_eq!(m, d(3.0, 0.5));
        for y in -10..=10 {
            assert!((a.cdf(y) * b.cdf(y) - m.cdf(y)).abs() <= 1e-12);
        }
        assert_eq!(max_closure(&[a]).unwrap(), a);
        let n = max_closure(&[a; 4]).unwrap();
        assert!((n.alpha() - 4.0).abs() < 1e-15);
        assert!(max_closure(&[a, d(1.0, 0.6)]).is_err());
        assert!(max_closure(&[]).is_err());
    }

    #[test]
    fn shift_action_on_alpha() {
        let q = d(1.7, 0.6);
        for c in [-3i64, 0, 2, 5] {
            let s = q.shifted(c).unwrap();
            for y in -10..10 {
                assert!((s.cdf(y + c) - q.cdf(y)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn support_tail_mass() {
        let q = d(1.0, 0.5);
        let s = q.support(1e-12).unwrap();
        assert!(s.lo < 0 && s.hi > 0);
        assert!(s.tail_mass(&q) <= 1e-12);
        assert!(q.support(0.0).is_err());
        assert!(IntSupport::new(2, 1).is_err());
    }
}
