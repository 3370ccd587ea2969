//! Random variate generation.
//!
//! Every generator in the crate is ChaCha20 (`rand_chacha` 0.9) seeded with
//! [`SeedableRng::seed_from_u64`] and split into independent streams with
//! `set_stream`. ChaCha output is specified bit-for-bit, so a given
//! `(seed, stream)` pair produces the same draws on every platform.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::{Error, Params, Result};

/// Name and version of the uniform generator, stamped into output headers.
pub const GENERATOR: &str = "chacha20/rand_chacha-0.9";

/// Deterministic generator for `(seed, stream)`.
pub fn generator(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw on the open interval (0, 1).
#[inline]
pub fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

/// `n` draws from `params` by inverse transform through
/// [`Params::quantile`].
pub fn sample(params: &Params, n: usize, seed: u64) -> Result<Vec<i64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size n must be >= 1".into()));
    }
    let mut rng = generator(seed, 0);
    Ok(sample_with(params, n, &mut rng))
}

pub fn sample_with<R: Rng + ?Sized>(params: &Params, n: usize, rng: &mut R) -> Vec<i64> {
    (0..n)
        .map(|_| params.quantile_unchecked(open_unit(rng)))
        .collect()
}

/// `n` draws of `⌊X⌋` with `X ~ EV(μ, σ)` sampled as `μ - σ ln ln(1/u)`.
///
/// Shares no code with [`sample`] beyond the uniform source, which makes it
/// the independent route for checking the sampler.
pub fn floor_of_continuous(mu: f64, sigma: f64, n: usize, seed: u64) -> Result<Vec<i64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidSigma(sigma));
    }
    if !mu.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "mu must be finite (got {mu})"
        )));
    }
    let mut rng = generator(seed, 0);
    Ok(floor_of_continuous_with(mu, sigma, n, &mut rng))
}

pub fn floor_of_continuous_with<R: Rng + ?Sized>(
    mu: f64,
    sigma: f64,
    n: usize,
    rng: &mut R,
) -> Vec<i64> {
    (0..n)
        .map(|_| {
            let u = open_unit(rng);
            (mu - sigma * (-u.ln()).ln()).floor() as i64
        })
        .collect()
}
