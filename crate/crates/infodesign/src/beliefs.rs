//! Posterior-belief algebra.
//!
//! Every public signal realization is summarized by the *basic posterior
//! belief* `mu`: the posterior a hypothetical seller holding the prior
//! `mu0 = E[theta]` would form. The update map `t(mu, theta)` then recovers
//! the posterior of every actual type `theta` from the same realization, and
//! the threshold type `theta_tilde(mu)` separates the types that price low
//! from those that price high.

use crate::error::{Error, Result};
use crate::model::MarketPrimitives;

/// Price chosen when the posterior sits exactly at `L/H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Indifferent sellers post the low price. This supports the efficient
    /// allocations used by the boundary constructions.
    #[default]
    Low,
    High,
}

fn check_prior(mu0: f64) -> Result<()> {
    if !(mu0 > 0.0 && mu0 < 1.0) {
        return Err(Error::DegeneratePrior(mu0));
    }
    Ok(())
}

/// Posterior of a type-`theta` seller after a realization with basic belief
/// `mu`:
///
/// `t(mu, theta) = theta*mu*(1-mu0) / (theta*mu*(1-mu0) + (1-theta)*(1-mu)*mu0)`
///
/// The 0/0 corner cases `(theta, mu) = (0, 1)` and `(1, 0)` resolve to
/// `theta` by continuity in `mu`.
pub fn posterior_update(mu: f64, theta: f64, mu0: f64) -> Result<f64> {
    check_prior(mu0)?;
    let num = theta * mu * (1.0 - mu0);
    let den = num + (1.0 - theta) * (1.0 - mu) * mu0;
    if den == 0.0 {
        return Ok(theta);
    }
    Ok(num / den)
}

/// The type indifferent between prices at basic belief `mu`, i.e. the unique
/// solution of `t(mu, theta) = L/H`. Decreasing in `mu`, with
/// `theta_tilde(0) = 1` and `theta_tilde(1) = 0`.
pub fn threshold_type(mu: f64, mkt: &MarketPrimitives, mu0: f64) -> Result<f64> {
    check_prior(mu0)?;
    let a = mu * (1.0 - mu0);
    let b = (1.0 - mu) * mu0;
    let num = mkt.low() * b;
    let den = num + mkt.spread() * a;
    if den == 0.0 {
        // Only reachable at mu = 1 (b = 0 with a > 0 handled above).
        return Ok(1.0);
    }
    Ok(num / den)
}

/// Optimal posted price given posterior `t` that the value is high.
pub fn optimal_price_binary(t: f64, mkt: &MarketPrimitives, tie_break: TieBreak) -> f64 {
    let ratio = mkt.ratio();
    if t > ratio || (t == ratio && tie_break == TieBreak::High) {
        mkt.high()
    } else {
        mkt.low()
    }
}
