//! Fractional absolute moments `E|X - mu|^(1+lambda)`, `0 < lambda < 1`, of
//! heavy-tailed laws.
//!
//! The moments are obtained from the order-`1+lambda` fractional derivative of
//! a characteristic function (or Laplace transform) at zero, which turns them
//! into one-dimensional singular, possibly oscillatory, integrals. The crate
//! provides
//!
//! * [`specfun`]: gamma, beta and hypergeometric functions used by the closed forms,
//! * [`quad`]: semi-infinite quadrature tuned for `u^(-1-lambda)` singularities
//!   and `sin(mu u)` / `cos(mu u)` factors,
//! * [`transforms`]: generic evaluators working from any characteristic function
//!   or Laplace transform,
//! * [`distributions`]: stable, Pareto, geometric stable, Linnik, compound Poisson
//!   and subordinator families with closed-form fast paths,
//! * [`applications`]: prediction and regression estimation errors,
//! * [`oracle`]: independent reference values (Fourier inversion, direct density
//!   quadrature, Monte Carlo) used for validation.

pub mod applications;
pub mod distributions;
pub mod error;
pub mod oracle;
pub mod quad;
pub mod specfun;
pub mod transforms;

pub use error::{Error, Result};
