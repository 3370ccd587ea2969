//! The discrete Gumbel distribution `DGUD(α, p)`.
//!
//! `Y = ⌊X⌋` for `X ~ EV(μ, σ)` with `p = e^{-1/σ}` and `α = p^{-μ}`, giving
//!
//! ```text
//! Pr(Y = y) = exp(-α p^{y+1}) - exp(-α p^y),   y ∈ ℤ, α > 0, 0 < p < 1
//! ```
//!
//! The crate provides exact distribution functions ([`Params`]), inverse
//! transform sampling ([`sampling`]), moments and shape measures
//! ([`moments`]), four estimators ([`estimation`]), a discrete
//! Kolmogorov–Smirnov test ([`gof`]) and a Monte Carlo harness for the
//! maximum likelihood estimator ([`simulation`]).
//!
//! ```
//! use dgumbel::Params;
//!
//! let d = Params::new(1.0, 0.5).unwrap();
//! assert!((d.cdf(0) - (-0.5f64).exp()).abs() < 1e-15);
//! assert_eq!(d.quantile(0.5).unwrap(), 0);
//! assert_eq!(d.mode(), 0);
//! ```
//!
//! With the default `parallel` feature, Monte Carlo replications and grid
//! evaluations run on the rayon thread pool. Output never depends on the
//! schedule: every replication owns its random stream and results are
//! assembled in index order.

pub mod data;
mod dist;
mod error;
pub mod estimation;
pub mod fmt;
pub mod gof;
pub mod moments;
pub mod numeric;
mod par;
pub mod sampling;
pub mod simulation;

pub use dist::{max_closure, IntSupport, Params, DEFAULT_EPS_TAIL};
pub use error::{Error, Result};
pub use estimation::{DiagnosticLine, FitConfig, FitResult, Method, Sample};
pub use gof::GofReport;
pub use moments::MomentSummary;
pub use simulation::{Execution, SimCell, SimReport};
