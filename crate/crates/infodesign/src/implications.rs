//! Welfare implications built on the surplus-set solver: the seller-optimal
//! outcome constrained by buyer consent, the third-party-data comparison
//! between informed and uninformed sellers, rent bounds over efficient
//! signals, and the outcome sets selected by concrete communication
//! protocols.

use serde::Serialize;

use crate::dist::TypeDistribution;
use crate::error::{Error, Result};
use crate::model::{MarketPrimitives, OutcomeSet, WelfareOutcome};
use crate::payoffs::{baselines, indirect_outcome};
use crate::persuasion::{
    boundary_certificates, implementable_set, outcome_of_binary_signal, sample_graph,
    split_to_signal, support_value, BeliefSplit, SupportSolution,
};

/// Belief-grid and direction-count resolution for set computations.
#[derive(Debug, Clone, Copy)]
pub struct SetResolution {
    pub grid_size: usize,
    pub directions: usize,
}

impl Default for SetResolution {
    fn default() -> Self {
        Self {
            grid_size: 1001,
            directions: 360,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConstrainedOptimal {
    pub outcome: WelfareOutcome,
    pub certificate: BeliefSplit,
}

fn mix_outcome(a: &WelfareOutcome, b: &WelfareOutcome, w_b: f64) -> WelfareOutcome {
    WelfareOutcome {
        buyer_surplus: (1.0 - w_b) * a.buyer_surplus + w_b * b.buyer_surplus,
        seller_profit: (1.0 - w_b) * a.seller_profit + w_b * b.seller_profit,
    }
}

fn mix_splits(a: &BeliefSplit, b: &BeliefSplit, w_b: f64) -> Result<BeliefSplit> {
    let mut support = Vec::new();
    let mut weights = Vec::new();
    for (&mu, &w) in a.support().iter().zip(a.weights()) {
        support.push(mu);
        weights.push((1.0 - w_b) * w);
    }
    for (&mu, &w) in b.support().iter().zip(b.weights()) {
        support.push(mu);
        weights.push(w_b * w);
    }
    Ok(BeliefSplit::new(support, weights)?.simplify())
}

/// Maximizes seller profit over the implementable set subject to the buyer
/// weakly gaining relative to no data provision. Solved parametrically: the
/// support point of `Pi + rho*U` has buyer surplus nondecreasing in `rho`,
/// so a bisection on `rho` finds where the consent constraint starts to
/// bind; if the support point jumps across the constraint (a flat face), the
/// face endpoints are mixed to sit exactly at the constraint.
pub fn constrained_seller_optimal(
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
    res: SetResolution,
) -> Result<ConstrainedOptimal> {
    let u0 = baselines(mkt, dist).u_noinfo;
    let mu0 = dist.mean();
    let graph = sample_graph(mkt, dist, res.grid_size)?;
    let feasible = |s: &SupportSolution| s.outcome.buyer_surplus >= u0 - 1e-12;
    let solve = |rho: f64| support_value((rho, 1.0), mu0, &graph);

    let at_zero = solve(0.0)?;
    if feasible(&at_zero) {
        return Ok(ConstrainedOptimal {
            outcome: at_zero.outcome,
            certificate: at_zero.split,
        });
    }
    let mut hi = 1.0;
    while !feasible(&solve(hi)?) {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::InvalidConfig(
                "consent constraint unreachable on this grid".into(),
            ));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if feasible(&solve(mid)?) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let sol_hi = solve(hi)?;
    let sol_lo = solve(lo)?;
    let (u_lo, u_hi) = (sol_lo.outcome.buyer_surplus, sol_hi.outcome.buyer_surplus);
    // Continuous crossing, or the binding point is the feasible endpoint.
    if u_hi - u_lo <= 1e-12 || u_hi <= u0 + 1e-12 {
        return Ok(ConstrainedOptimal {
            outcome: sol_hi.outcome,
            certificate: sol_hi.split,
        });
    }
    // Flat face: along it profit trades one-for-rho against buyer surplus,
    // so the constrained optimum sits at U = u0 exactly.
    let gamma = ((u0 - u_lo) / (u_hi - u_lo)).clamp(0.0, 1.0);
    Ok(ConstrainedOptimal {
        outcome: mix_outcome(&sol_lo.outcome, &sol_hi.outcome, gamma),
        certificate: mix_splits(&sol_lo.split, &sol_hi.split, gamma)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// Private information lowers profit and raises buyer surplus.
    SellerWorseBuyerBetter,
    /// Private information raises profit and lowers buyer surplus.
    SellerBetterBuyerWorse,
    Boundary,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub uninformed: WelfareOutcome,
    pub informed: WelfareOutcome,
    pub regime: Regime,
}

/// Compares constrained seller-optimal outcomes between the informed seller
/// (type distribution `dist`) and the uninformed seller (type known to be
/// `E[theta]`). Strict regimes require `E[theta] != L/H`.
pub fn third_party_comparison(
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
    res: SetResolution,
) -> Result<ComparisonReport> {
    let mu0 = dist.mean();
    if (mu0 - mkt.ratio()).abs() <= 1e-12 {
        return Err(Error::BoundaryCase);
    }
    let uninformed_dist = TypeDistribution::point_mass(mu0)?;
    let uninformed = constrained_seller_optimal(mkt, &uninformed_dist, res)?.outcome;
    let informed = constrained_seller_optimal(mkt, dist, res)?.outcome;
    let dp = uninformed.seller_profit - informed.seller_profit;
    let du = uninformed.buyer_surplus - informed.buyer_surplus;
    let regime = if dp > 1e-9 && du < -1e-9 {
        Regime::SellerWorseBuyerBetter
    } else if dp < -1e-9 && du > 1e-9 {
        Regime::SellerBetterBuyerWorse
    } else {
        Regime::Boundary
    };
    Ok(ComparisonReport {
        uninformed,
        informed,
        regime,
    })
}

#[derive(Debug, Clone)]
pub struct RentReport {
    /// Smallest seller rent `Pi - pi_floor` among qualifying signals.
    pub min_rent: f64,
    pub witness_split: BeliefSplit,
    pub witness_outcome: WelfareOutcome,
    /// Number of enumerated signals meeting the efficiency cutoff.
    pub qualifying: usize,
}

/// Searches two-realization belief splits (plus full information) for
/// signals whose outcome is efficient up to `efficient_tolerance`, returning
/// the minimum seller rent among them. `grid_step` controls the belief grid;
/// `include_full_info` lets the caller exclude the fully informative signal.
pub fn efficiency_rent_check(
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
    efficient_tolerance: f64,
    grid_step: f64,
    include_full_info: bool,
) -> Result<RentReport> {
    if !(grid_step > 0.0 && grid_step < 1.0) {
        return Err(Error::InvalidConfig("grid_step must be in (0,1)".into()));
    }
    let b = baselines(mkt, dist);
    let mu0 = dist.mean();
    if !(mu0 > 0.0 && mu0 < 1.0) {
        return Err(Error::DegeneratePrior(mu0));
    }
    let n = (1.0 / grid_step).round() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let cache: Vec<WelfareOutcome> = grid
        .iter()
        .map(|&mu| indirect_outcome(mu, mkt, dist))
        .collect::<Result<Vec<_>>>()?;

    let mut best: Option<RentReport> = None;
    let mut qualifying = 0usize;
    let mut consider = |split: BeliefSplit, outcome: WelfareOutcome| {
        if outcome.total_surplus() < b.w_bar - efficient_tolerance {
            return;
        }
        qualifying += 1;
        let rent = outcome.seller_profit - b.pi_floor;
        if best.as_ref().is_none_or(|r| rent < r.min_rent) {
            best = Some(RentReport {
                min_rent: rent,
                witness_split: split,
                witness_outcome: outcome,
                qualifying: 0,
            });
        }
    };

    // Uninformative signal.
    consider(
        BeliefSplit::degenerate(mu0),
        indirect_outcome(mu0, mkt, dist)?,
    );
    if include_full_info {
        let split = BeliefSplit::new(vec![0.0, 1.0], vec![1.0 - mu0, mu0])?;
        let full = mix_outcome(&cache[0], &cache[n], mu0);
        consider(split, full);
    }
    for i in 0..grid.len() {
        if grid[i] >= mu0 {
            break;
        }
        for j in (i + 1)..grid.len() {
            if grid[j] <= mu0 {
                continue;
            }
            // Full information is handled (or excluded) above.
            if grid[i] == 0.0 && grid[j] == 1.0 {
                continue;
            }
            let w_hi = (mu0 - grid[i]) / (grid[j] - grid[i]);
            let outcome = mix_outcome(&cache[i], &cache[j], w_hi);
            let split = BeliefSplit::new(vec![grid[i], grid[j]], vec![1.0 - w_hi, w_hi])
                .expect("grid split is valid");
            consider(split, outcome);
        }
    }
    let mut report = best.ok_or(Error::NoEfficientSignalFound(efficient_tolerance))?;
    report.qualifying = qualifying;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    CheapTalk,
    VoluntaryDisclosure,
    RequestConsentInformed,
    RequestConsentUninformed,
}

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::CheapTalk => "cheap-talk",
            Protocol::VoluntaryDisclosure => "voluntary-disclosure",
            Protocol::RequestConsentInformed => "request-consent-informed",
            Protocol::RequestConsentUninformed => "request-consent-uninformed",
        }
    }
}

#[derive(Debug, Clone)]
pub enum ProtocolOutcome {
    /// A single equilibrium outcome.
    Point(WelfareOutcome),
    /// A one-parameter outcome family (a curve in the welfare plane).
    Curve(Vec<WelfareOutcome>),
    /// A two-dimensional outcome region.
    Set(OutcomeSet),
}

impl ProtocolOutcome {
    pub fn points(&self) -> Vec<WelfareOutcome> {
        match self {
            ProtocolOutcome::Point(p) => vec![*p],
            ProtocolOutcome::Curve(c) => c.clone(),
            ProtocolOutcome::Set(s) => s.vertices().to_vec(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub protocol: Protocol,
    pub outcome: ProtocolOutcome,
    pub warning: Option<String>,
}

/// Serializable view of a protocol outcome set.
#[derive(Debug, Clone, Serialize)]
pub struct ProtocolReport {
    pub protocol: String,
    pub points: Vec<WelfareOutcome>,
}

impl From<&ProtocolResult> for ProtocolReport {
    fn from(r: &ProtocolResult) -> Self {
        ProtocolReport {
            protocol: r.protocol.name().to_string(),
            points: r.outcome.points(),
        }
    }
}

/// Equilibrium outcome sets of the concrete communication protocols, from
/// their equilibrium characterizations: cheap talk collapses to the
/// no-information point; voluntary disclosure spans the low-value flagging
/// family; request-consent spans the whole implementable set when the buyer
/// is informed at the consent stage and its buyer-weakly-better part when he
/// is not.
pub fn protocol_outcomes(
    protocol: Protocol,
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
    res: SetResolution,
) -> Result<ProtocolResult> {
    let full_support = dist.is_full_support();
    let warning = if full_support {
        None
    } else {
        Some("characterization derived under full-support types".to_string())
    };
    let outcome = match protocol {
        Protocol::CheapTalk => {
            if !full_support {
                return Err(Error::NotFullSupport("cheap talk"));
            }
            ProtocolOutcome::Point(indirect_outcome(dist.mean(), mkt, dist)?)
        }
        Protocol::VoluntaryDisclosure => {
            let n = 200;
            let mut curve = Vec::with_capacity(n + 1);
            // Low-value flagging family, from uninformative to full info.
            for i in 0..=n {
                let alpha = 1.0 - i as f64 / n as f64;
                let sig = crate::model::BinarySignal::new(alpha, 1.0)?;
                curve.push(outcome_of_binary_signal(sig, mkt, dist)?);
            }
            ProtocolOutcome::Curve(curve)
        }
        Protocol::RequestConsentInformed => {
            ProtocolOutcome::Set(implementable_set(mkt, dist, res.grid_size, res.directions)?)
        }
        Protocol::RequestConsentUninformed => {
            let set = implementable_set(mkt, dist, res.grid_size, res.directions)?;
            let u0 = baselines(mkt, dist).u_noinfo;
            // A hair of slack keeps the no-information vertex when the
            // constraint binds everywhere.
            ProtocolOutcome::Set(set.clip_min_buyer_surplus(u0 - 1e-9)?)
        }
    };
    Ok(ProtocolResult {
        protocol,
        outcome,
        warning,
    })
}

/// Boundary certificates in the CSV export layout
/// `lambda_u,lambda_pi,U,Pi,mu1,w1,mu2,w2`.
pub fn boundary_export_rows(
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
    res: SetResolution,
) -> Result<Vec<[f64; 8]>> {
    let certs = boundary_certificates(mkt, dist, res.grid_size, res.directions)?;
    Ok(certs
        .iter()
        .map(|c| {
            let s = &c.solution;
            let (mu1, w1) = (s.split.support()[0], s.split.weights()[0]);
            let (mu2, w2) = if s.split.support_size() > 1 {
                (s.split.support()[1], s.split.weights()[1])
            } else {
                (f64::NAN, 0.0)
            };
            [
                c.lambda.0,
                c.lambda.1,
                s.outcome.buyer_surplus,
                s.outcome.seller_profit,
                mu1,
                w1,
                mu2,
                w2,
            ]
        })
        .collect())
}

/// Materializes a rent-check witness split as a signal.
pub fn witness_signal(split: &BeliefSplit, mu0: f64) -> Result<crate::model::FiniteSignal> {
    split_to_signal(split, mu0)
}
