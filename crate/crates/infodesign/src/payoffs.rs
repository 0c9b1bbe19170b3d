//! Baseline aggregates and the indirect payoff functions `U(mu)`, `Pi(mu)`.
//!
//! A realization with basic belief `mu` shifts the type distribution as well
//! as each type's posterior: conditional on the realization, the type density
//! is reweighted by `r(theta) = Pr(s|theta)/Pr(s) = theta*mu/mu0 +
//! (1-theta)*(1-mu)/(1-mu0)`. The product `t(mu,theta) * r(theta)` collapses
//! to `theta * mu / mu0`, so both conditional payoffs reduce to the partial
//! moments of `F` below the threshold type:
//!
//! `U(mu)  = (H-L) * (mu/mu0) * M1(theta_tilde)`
//! `Pi(mu) = L * [(mu/mu0) * M1 + ((1-mu)/(1-mu0)) * (M0 - M1)]
//!           + H * (mu/mu0) * (mu0 - M1)`
//!
//! with `M0 = F(theta_tilde)` and `M1` the partial first moment. Averaging
//! `(U(mu), Pi(mu))` over any Bayes-plausible belief split reproduces the
//! ex ante outcome of the inducing signal, which is what the surplus-set
//! solver exploits.

use crate::beliefs::{threshold_type, TieBreak};
use crate::dist::TypeDistribution;
use crate::error::Result;
use crate::model::{MarketPrimitives, OutcomeSet, WelfareOutcome};

/// Ex ante welfare anchors of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateBaselines {
    /// Profit under optimal uniform pricing with no additional data.
    pub pi_floor: f64,
    /// Maximum feasible total surplus.
    pub w_bar: f64,
    /// Buyer surplus with no additional data.
    pub u_noinfo: f64,
}

/// `pi_floor = int max(theta*H, L) dF`, `w_bar = int theta*H + (1-theta)*L dF`,
/// `u_noinfo = int_0^{L/H} theta*(H-L) dF`.
pub fn baselines(mkt: &MarketPrimitives, dist: &TypeDistribution) -> AggregateBaselines {
    let ratio = mkt.ratio();
    let mu0 = dist.mean();
    // Types at exactly L/H are indifferent; both prices give theta*H = L, so
    // the boundary flag does not change pi_floor. The Low tie aligns
    // u_noinfo with the tie-break convention.
    let m0 = dist.mass_below(ratio, true);
    let m1 = dist.first_moment_below(ratio, true);
    AggregateBaselines {
        pi_floor: mkt.low() * m0 + mkt.high() * (mu0 - m1),
        w_bar: mu0 * mkt.high() + (1.0 - mu0) * mkt.low(),
        u_noinfo: mkt.spread() * m1,
    }
}

/// Conditional buyer surplus after a realization with basic belief `mu`,
/// aggregated across seller types.
pub fn indirect_buyer_surplus(
    mu: f64,
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
) -> Result<f64> {
    indirect_buyer_surplus_with_tie(mu, mkt, dist, TieBreak::Low)
}

pub fn indirect_buyer_surplus_with_tie(
    mu: f64,
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
    tie: TieBreak,
) -> Result<f64> {
    let mu0 = dist.mean();
    let theta_tilde = threshold_type(mu, mkt, mu0)?;
    let m1 = dist.first_moment_below(theta_tilde, tie == TieBreak::Low);
    Ok(mkt.spread() * (mu / mu0) * m1)
}

/// Conditional seller profit after a realization with basic belief `mu`.
pub fn indirect_seller_profit(
    mu: f64,
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
) -> Result<f64> {
    indirect_seller_profit_with_tie(mu, mkt, dist, TieBreak::Low)
}

pub fn indirect_seller_profit_with_tie(
    mu: f64,
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
    tie: TieBreak,
) -> Result<f64> {
    let mu0 = dist.mean();
    let theta_tilde = threshold_type(mu, mkt, mu0)?;
    let inclusive = tie == TieBreak::Low;
    let m0 = dist.mass_below(theta_tilde, inclusive);
    let m1 = dist.first_moment_below(theta_tilde, inclusive);
    let low_region = (mu / mu0) * m1 + ((1.0 - mu) / (1.0 - mu0)) * (m0 - m1);
    let high_region = (mu / mu0) * (mu0 - m1);
    Ok(mkt.low() * low_region + mkt.high() * high_region)
}

/// Both conditional payoffs at once.
pub fn indirect_outcome(
    mu: f64,
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
) -> Result<WelfareOutcome> {
    Ok(WelfareOutcome {
        buyer_surplus: indirect_buyer_surplus(mu, mkt, dist)?,
        seller_profit: indirect_seller_profit(mu, mkt, dist)?,
    })
}

/// Outcomes under both tie-break conventions, with a flag marking whether an
/// atom of `F` sits exactly at the threshold type (where the conventions can
/// differ). For continuous distributions the two outcomes coincide.
pub fn indirect_outcome_interval(
    mu: f64,
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
) -> Result<(WelfareOutcome, WelfareOutcome, bool)> {
    let mu0 = dist.mean();
    let theta_tilde = threshold_type(mu, mkt, mu0)?;
    let low = WelfareOutcome {
        buyer_surplus: indirect_buyer_surplus_with_tie(mu, mkt, dist, TieBreak::Low)?,
        seller_profit: indirect_seller_profit_with_tie(mu, mkt, dist, TieBreak::Low)?,
    };
    let high = WelfareOutcome {
        buyer_surplus: indirect_buyer_surplus_with_tie(mu, mkt, dist, TieBreak::High)?,
        seller_profit: indirect_seller_profit_with_tie(mu, mkt, dist, TieBreak::High)?,
    };
    let atom_at_threshold =
        dist.mass_below(theta_tilde, true) != dist.mass_below(theta_tilde, false);
    Ok((low, high, atom_at_threshold))
}

/// Conditional total surplus `int [t*H + (1-t)*L] r dF` after a realization
/// with basic belief `mu`; feasibility bound for `U(mu) + Pi(mu)`.
pub fn conditional_total_surplus(
    mu: f64,
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
) -> f64 {
    let mu0 = dist.mean();
    // t*r = theta*mu/mu0 and (1-t)*r = (1-theta)*(1-mu)/(1-mu0).
    let m1 = dist.first_moment_below(1.0, true);
    mkt.high() * (mu / mu0) * m1 + mkt.low() * ((1.0 - mu) / (1.0 - mu0)) * (1.0 - m1)
}

/// Conditional mean of the sellers' posteriors after a realization with
/// basic belief `mu`; equals `mu` by the martingale property. Computed by
/// quadrature so tests can exercise the identity nontrivially.
pub fn conditional_mean_posterior(
    mu: f64,
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
) -> Result<f64> {
    let _ = mkt;
    let mu0 = dist.mean();
    dist.integrate(
        |theta| {
            let num = theta * mu * (1.0 - mu0);
            let den = num + (1.0 - theta) * (1.0 - mu) * mu0;
            let t = if den == 0.0 { theta } else { num / den };
            let r = theta * mu / mu0 + (1.0 - theta) * (1.0 - mu) / (1.0 - mu0);
            t * r
        },
        0.0,
        1.0,
    )
}

/// Feasible set when the seller's type is observable: the surplus triangle
/// with vertices `(0, w_bar)`, `(0, pi_floor)`, `(w_bar - pi_floor, pi_floor)`.
pub fn observable_triangle(mkt: &MarketPrimitives, dist: &TypeDistribution) -> OutcomeSet {
    let b = baselines(mkt, dist);
    let verts = vec![
        WelfareOutcome {
            buyer_surplus: 0.0,
            seller_profit: b.w_bar,
        },
        WelfareOutcome {
            buyer_surplus: 0.0,
            seller_profit: b.pi_floor,
        },
        WelfareOutcome {
            buyer_surplus: b.w_bar - b.pi_floor,
            seller_profit: b.pi_floor,
        },
    ];
    // Counterclockwise: top vertex, down the U=0 edge, out to the right.
    OutcomeSet::new(verts, dist.mean()).expect("triangle is convex by construction")
}
