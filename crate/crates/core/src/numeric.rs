//! Small numerical kernels shared by the distribution code.

/// `1 - e^{-x}` without cancellation for small `x`.
#[inline]
pub fn one_minus_exp_neg(x: f64) -> f64 {
    -(-x).exp_m1()
}

/// `ln(1 - e^{-x})` for `x > 0`, switching between the two stable branches
/// at `ln 2`.
#[inline]
pub fn ln_one_minus_exp_neg(x: f64) -> f64 {
    if x <= std::f64::consts::LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

/// `ln(1 - exp(-e^{ln_x}))`, taking `x` through its logarithm so results stay
/// finite when `x` itself underflows.
#[inline]
pub fn ln_one_minus_exp_neg_exp(ln_x: f64) -> f64 {
    if ln_x < -30.0 {
        // ln(1 - e^{-x}) = ln x - x/2 + O(x^2)
        ln_x - 0.5 * ln_x.exp()
    } else {
        ln_one_minus_exp_neg(ln_x.exp())
    }
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of the terms, smallest magnitude first.
pub fn sum_smallest_first(terms: &mut [f64]) -> f64 {
    terms.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut acc = CompensatedSum::new();
    for &t in terms.iter() {
        acc.add(t);
    }
    acc.value()
}

/// Survival function of the Kolmogorov distribution,
/// `Q(λ) = Pr(K > λ) = 2 Σ_{k≥1} (-1)^{k-1} e^{-2k²λ²}`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda.is_nan() {
        return f64::NAN;
    }
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-transformed series converges fast for small λ:
        // Pr(K ≤ λ) = √(2π)/λ Σ_{k≥1} exp(-(2k-1)² π² / (8λ²))
        let s = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for k in 1..=20 {
            let j = (2 * k - 1) as f64;
            cdf += (-j * j * s).exp();
        }
        cdf *= (2.0 * std::f64::consts::PI).sqrt() / lambda;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let mut sf = 0.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            if k % 2 == 1 {
                sf += term;
            } else {
                sf -= term;
            }
            if term < 1e-18 {
                break;
            }
        }
        (2.0 * sf).clamp(0.0, 1.0)
    }
}
