//! Direct mechanisms and the public-signal equivalence construction.
//!
//! A direct mechanism assigns each reported type a two-realization signal
//! `(alpha(theta), beta(theta))` whose realizations double as obedient price
//! recommendations. Incentive compatibility of truthful reporting pins down
//! two structural properties (monotonicity and relative impact), and any
//! incentive-compatible mechanism can be replicated by a single public
//! signal whose conditional CDFs interpolate `alpha` and `beta`: pooling the
//! public realizations below and above a knot reproduces that knot's menu
//! item, and every type's best-response threshold sits at its own knot.

use crate::error::{Error, Result};
use crate::model::{FiniteSignal, MarketPrimitives, WelfareOutcome};

/// Tolerance on profit comparisons; profits are O(H), so this leaves ample
/// double-precision headroom.
pub const IC_TOL: f64 = 1e-9;

/// Tolerance on the structural (product-form) inequalities.
pub const STRUCT_TOL: f64 = 1e-12;

/// Menu of two-realization signals indexed by a finite type grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectMechanism {
    grid: Vec<f64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl DirectMechanism {
    pub fn new(grid: Vec<f64>, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::InvalidMechanism("empty type grid".into()));
        }
        if grid.len() != alpha.len() || grid.len() != beta.len() {
            return Err(Error::InvalidMechanism(format!(
                "length mismatch: {} types, {} alphas, {} betas",
                grid.len(),
                alpha.len(),
                beta.len()
            )));
        }
        for w in grid.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidMechanism(
                    "type grid must be strictly increasing".into(),
                ));
            }
        }
        if grid[0] < 0.0 || *grid.last().unwrap() > 1.0 {
            return Err(Error::InvalidMechanism("types must lie in [0,1]".into()));
        }
        for i in 0..grid.len() {
            let (a, b) = (alpha[i], beta[i]);
            if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || b < a {
                return Err(Error::InvalidMechanism(format!(
                    "item {i} needs 0 <= alpha <= beta <= 1, got ({a}, {b})"
                )));
            }
        }
        Ok(Self { grid, alpha, beta })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn item(&self, i: usize) -> (f64, f64) {
        (self.alpha[i], self.beta[i])
    }

    /// Parses the `theta,alpha,beta` CSV format (header required, rows sorted
    /// by theta).
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidMechanism("empty mechanism file".into()))?;
        if header.trim().to_lowercase() != "theta,alpha,beta" {
            return Err(Error::InvalidMechanism(format!(
                "expected header 'theta,alpha,beta', got '{header}'"
            )));
        }
        let mut grid = Vec::new();
        let mut alpha = Vec::new();
        let mut beta = Vec::new();
        for (n, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::InvalidMechanism(format!(
                    "row {}: expected 3 fields",
                    n + 1
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|_| {
                    Error::InvalidMechanism(format!("row {}: bad number '{s}'", n + 1))
                })
            };
            grid.push(parse(fields[0])?);
            alpha.push(parse(fields[1])?);
            beta.push(parse(fields[2])?);
        }
        Self::new(grid, alpha, beta)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,alpha,beta\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                self.grid[i], self.alpha[i], self.beta[i]
            ));
        }
        out
    }
}

/// Profit of a type-`theta` seller who reports the type at `report` and then
/// follows the recommendations:
/// `(1-alpha')L + theta*(alpha'*L + beta'*(H-L))`.
pub fn deviation_profit(
    theta: f64,
    report: usize,
    mech: &DirectMechanism,
    mkt: &MarketPrimitives,
) -> f64 {
    let (a, b) = mech.item(report);
    item_profit(theta, a, b, mkt)
}

/// Same profit expression for a free-standing item `(a, b)`.
pub fn item_profit(theta: f64, a: f64, b: f64, mkt: &MarketPrimitives) -> f64 {
    (1.0 - a) * mkt.low() + theta * (a * mkt.low() + b * mkt.spread())
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcReport {
    pub ok: bool,
    /// Largest misreport gain across ordered type pairs (can be negative).
    pub worst_violation: f64,
    /// `(theta, theta')` attaining the largest gain.
    pub witness: Option<(f64, f64)>,
}

/// Checks truthful reporting against all misreport-and-obey deviations.
pub fn check_ic(mech: &DirectMechanism, mkt: &MarketPrimitives) -> IcReport {
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for i in 0..mech.len() {
        let theta = mech.grid()[i];
        let own = deviation_profit(theta, i, mech, mkt);
        for j in 0..mech.len() {
            if i == j {
                continue;
            }
            let gain = deviation_profit(theta, j, mech, mkt) - own;
            if gain > worst {
                worst = gain;
                witness = Some((theta, mech.grid()[j]));
            }
        }
    }
    if mech.len() < 2 {
        worst = 0.0;
    }
    IcReport {
        ok: worst <= IC_TOL,
        worst_violation: worst,
        witness,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObedienceReport {
    pub ok: bool,
    pub worst_violation: f64,
    pub witness: Option<f64>,
}

/// Checks that each type prefers following its own recommendations to
/// ignoring them (pricing low always gives `L`, pricing high always gives
/// `theta*H`). Part of the direct-mechanism definition; pairwise IC alone
/// does not imply it.
pub fn check_obedience(mech: &DirectMechanism, mkt: &MarketPrimitives) -> ObedienceReport {
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for i in 0..mech.len() {
        let theta = mech.grid()[i];
        let own = deviation_profit(theta, i, mech, mkt);
        let gain = (mkt.low() - own).max(theta * mkt.high() - own);
        if gain > worst {
            worst = gain;
            witness = Some(theta);
        }
    }
    ObedienceReport {
        ok: worst <= IC_TOL,
        worst_violation: worst,
        witness,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructuralReport {
    pub monotone: bool,
    pub relative_impact: bool,
    /// Index where monotonicity first fails.
    pub monotone_witness: Option<usize>,
    /// Triple `(i, j, k)` violating relative impact.
    pub relative_impact_witness: Option<(usize, usize, usize)>,
}

impl StructuralReport {
    pub fn ok(&self) -> bool {
        self.monotone && self.relative_impact
    }
}

/// Checks the two allocation properties every incentive-compatible direct
/// mechanism satisfies: `alpha`, `beta` nondecreasing, and for i < j < k
/// `(beta_k - beta_j)(alpha_j - alpha_i) <= (beta_j - beta_i)(alpha_k - alpha_j)`.
pub fn check_structural(mech: &DirectMechanism) -> StructuralReport {
    let n = mech.len();
    let mut monotone = true;
    let mut monotone_witness = None;
    for i in 1..n {
        let (a0, b0) = mech.item(i - 1);
        let (a1, b1) = mech.item(i);
        if a1 < a0 - STRUCT_TOL || b1 < b0 - STRUCT_TOL {
            monotone = false;
            monotone_witness = Some(i);
            break;
        }
    }
    let mut relative_impact = true;
    let mut relative_impact_witness = None;
    'outer: for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let (ai, bi) = mech.item(i);
                let (aj, bj) = mech.item(j);
                let (ak, bk) = mech.item(k);
                if (bk - bj) * (aj - ai) > (bj - bi) * (ak - aj) + STRUCT_TOL {
                    relative_impact = false;
                    relative_impact_witness = Some((i, j, k));
                    break 'outer;
                }
            }
        }
    }
    StructuralReport {
        monotone,
        relative_impact,
        monotone_witness,
        relative_impact_witness,
    }
}

/// Public signal on the realization space `[0,1]`, stored as the atoms of a
/// pair of right-continuous step CDFs: `Pr(s <= knot_i | v=L)` interpolates
/// `alpha` and `Pr(s <= knot_i | v=H)` interpolates `beta`, with a terminal
/// jump to one at `s = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicSignalCdf {
    positions: Vec<f64>,
    cum_low: Vec<f64>,
    cum_high: Vec<f64>,
}

impl PublicSignalCdf {
    pub fn new(positions: Vec<f64>, cum_low: Vec<f64>, cum_high: Vec<f64>) -> Result<Self> {
        let n = positions.len();
        if n == 0 || cum_low.len() != n || cum_high.len() != n {
            return Err(Error::InvalidSignal("inconsistent CDF data".into()));
        }
        for w in positions.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidSignal(
                    "positions must be nondecreasing".into(),
                ));
            }
        }
        for cum in [&cum_low, &cum_high] {
            let mut prev = 0.0;
            for &c in cum.iter() {
                if c < prev - 1e-15 || c > 1.0 + 1e-12 {
                    return Err(Error::InvalidSignal(
                        "CDF must be nondecreasing into [0,1]".into(),
                    ));
                }
                prev = c;
            }
            if (cum.last().unwrap() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidSignal("CDF must terminate at 1".into()));
            }
        }
        let sig = Self {
            positions,
            cum_low,
            cum_high,
        };
        let v = sig.mlr_violation();
        if v > STRUCT_TOL {
            return Err(Error::InvalidSignal(format!(
                "monotone likelihood ratio violated by {v}"
            )));
        }
        Ok(sig)
    }

    pub fn realization_count(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Atom masses `(position, mass_low, mass_high)`.
    pub fn atoms(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.positions.len());
        let (mut pl, mut ph) = (0.0, 0.0);
        for i in 0..self.positions.len() {
            out.push((
                self.positions[i],
                self.cum_low[i] - pl,
                self.cum_high[i] - ph,
            ));
            pl = self.cum_low[i];
            ph = self.cum_high[i];
        }
        out
    }

    /// Worst violation of the likelihood-ratio ordering: earlier atoms must
    /// be weakly more indicative of the high value.
    pub fn mlr_violation(&self) -> f64 {
        let atoms = self.atoms();
        let mut worst = 0.0_f64;
        for i in 0..atoms.len() {
            for j in (i + 1)..atoms.len() {
                let (_, li, hi) = atoms[i];
                let (_, lj, hj) = atoms[j];
                worst = worst.max(hj * li - hi * lj);
            }
        }
        worst
    }

    /// `(alpha, beta)` profile of the cut that prices the first `cut`
    /// realizations high: the CDF values just after the cut.
    pub fn cut_profile(&self, cut: usize) -> (f64, f64) {
        if cut == 0 {
            (0.0, 0.0)
        } else {
            (self.cum_low[cut - 1], self.cum_high[cut - 1])
        }
    }

    /// Realization position of the last high-priced atom under `cut`
    /// (0 when the cut prices everything low).
    pub fn cut_position(&self, cut: usize) -> f64 {
        if cut == 0 {
            0.0
        } else {
            self.positions[cut - 1]
        }
    }

    /// View as a finite signal; row order (low value, high value), realization
    /// order by position.
    pub fn to_finite_signal(&self) -> FiniteSignal {
        let atoms = self.atoms();
        let low: Vec<f64> = atoms.iter().map(|a| a.1.max(0.0)).collect();
        let high: Vec<f64> = atoms.iter().map(|a| a.2.max(0.0)).collect();
        FiniteSignal::new(vec![low, high]).expect("cdf increments form a valid signal")
    }
}

/// Builds the public signal replicating an incentive-compatible mechanism:
/// CDF knots at the type grid with values `(alpha_i, beta_i)` and a terminal
/// jump to one at `s = 1`. Fails on mechanisms that are not incentive
/// compatible (structural failure cannot occur once IC holds, but is checked
/// anyway since inputs are floats).
pub fn build_public_signal(
    mech: &DirectMechanism,
    mkt: &MarketPrimitives,
) -> Result<PublicSignalCdf> {
    let ic = check_ic(mech, mkt);
    if !ic.ok {
        return Err(Error::NotIncentiveCompatible(format!(
            "misreport gain {} at {:?}",
            ic.worst_violation, ic.witness
        )));
    }
    let st = check_structural(mech);
    if !st.ok() {
        return Err(Error::NotIncentiveCompatible(
            "structural properties fail".into(),
        ));
    }
    let mut positions = mech.grid().to_vec();
    let mut cum_low = mech.alpha.clone();
    let mut cum_high = mech.beta.clone();
    positions.push(1.0);
    cum_low.push(1.0);
    cum_high.push(1.0);
    PublicSignalCdf::new(positions, cum_low, cum_high)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResponse {
    /// Number of leading realizations priced high.
    pub cut: usize,
    /// Position of the threshold realization (0 when everything is priced low).
    pub threshold: f64,
    /// Effective `(alpha, beta)` the cut induces.
    pub profile: (f64, f64),
    pub profit: f64,
}

/// Profit-maximizing threshold response of a type-`theta` seller to a public
/// signal: price high on the first `cut` realizations, low on the rest.
/// Under the likelihood-ratio ordering this spans all undominated responses.
/// Ties break toward the smaller cut, i.e. more low prices, consistent with
/// the low-price tie-break convention.
pub fn best_response_threshold(
    theta: f64,
    sig: &PublicSignalCdf,
    mkt: &MarketPrimitives,
) -> ThresholdResponse {
    let mut best = ThresholdResponse {
        cut: 0,
        threshold: 0.0,
        profile: (0.0, 0.0),
        profit: item_profit(theta, 0.0, 0.0, mkt),
    };
    for cut in 1..=sig.realization_count() {
        let (a, b) = sig.cut_profile(cut);
        let profit = item_profit(theta, a, b, mkt);
        if profit > best.profit {
            best = ThresholdResponse {
                cut,
                threshold: sig.cut_position(cut),
                profile: (a, b),
                profit,
            };
        }
    }
    best
}

/// Interim welfare of a type holding item `(a, b)` and obeying it: the buyer
/// gains `H - L` when the value is high and the recommendation is low.
pub fn interim_outcome(theta: f64, a: f64, b: f64, mkt: &MarketPrimitives) -> WelfareOutcome {
    WelfareOutcome {
        buyer_surplus: theta * (1.0 - b) * mkt.spread(),
        seller_profit: item_profit(theta, a, b, mkt),
    }
}

/// Ex ante outcome of a direct mechanism under type weights parallel to its
/// grid.
pub fn mechanism_outcome(
    mech: &DirectMechanism,
    weights: &[f64],
    mkt: &MarketPrimitives,
) -> Result<WelfareOutcome> {
    if weights.len() != mech.len() {
        return Err(Error::InvalidMechanism("weights do not match grid".into()));
    }
    let mut u = 0.0;
    let mut p = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        let (a, b) = mech.item(i);
        let o = interim_outcome(mech.grid()[i], a, b, mkt);
        u += w * o.buyer_surplus;
        p += w * o.seller_profit;
    }
    Ok(WelfareOutcome {
        buyer_surplus: u,
        seller_profit: p,
    })
}

/// Ex ante outcome when every type best-responds to the public signal with a
/// threshold rule.
pub fn public_response_outcome(
    sig: &PublicSignalCdf,
    types: &[f64],
    weights: &[f64],
    mkt: &MarketPrimitives,
) -> Result<WelfareOutcome> {
    if weights.len() != types.len() {
        return Err(Error::InvalidMechanism("weights do not match types".into()));
    }
    let mut u = 0.0;
    let mut p = 0.0;
    for (&theta, &w) in types.iter().zip(weights) {
        let resp = best_response_threshold(theta, sig, mkt);
        let o = interim_outcome(theta, resp.profile.0, resp.profile.1, mkt);
        u += w * o.buyer_surplus;
        p += w * o.seller_profit;
    }
    Ok(WelfareOutcome {
        buyer_surplus: u,
        seller_profit: p,
    })
}
