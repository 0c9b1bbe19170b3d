//! Market primitives, signals, and welfare-outcome types shared by all
//! modules. Everything here is immutable after construction and cheap to
//! clone; operations are pure.

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance used when validating probability normalization on construction.
/// Violating inputs are rejected, not renormalized.
pub const PROB_TOL: f64 = 1e-12;

/// Tolerance for the convexity check on outcome-set boundaries.
pub const CONVEXITY_TOL: f64 = 1e-9;

/// Binary buyer values `0 < L < H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketPrimitives {
    low: f64,
    high: f64,
}

impl MarketPrimitives {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low.is_finite() && high.is_finite()) || low <= 0.0 || high <= low {
            return Err(Error::InvalidMarket(format!(
                "need H > L > 0, got L={low}, H={high}"
            )));
        }
        Ok(Self { low, high })
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn high(&self) -> f64 {
        self.high
    }

    /// The pricing threshold `L/H`: a posterior above it makes the high price
    /// optimal.
    pub fn ratio(&self) -> f64 {
        self.low / self.high
    }

    /// The surplus at stake per high-value buyer, `H - L`.
    pub fn spread(&self) -> f64 {
        self.high - self.low
    }
}

/// Two-realization signal with `alpha = Pr(s_H | v=L)` and
/// `beta = Pr(s_H | v=H)`, normalized so `alpha <= beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinarySignal {
    alpha: f64,
    beta: f64,
}

impl BinarySignal {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let ok = alpha.is_finite()
            && beta.is_finite()
            && (0.0..=1.0).contains(&alpha)
            && (0.0..=1.0).contains(&beta)
            && alpha <= beta;
        if !ok {
            return Err(Error::InvalidSignal(format!(
                "need 0 <= alpha <= beta <= 1, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn uninformative() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
        }
    }

    pub fn fully_informative() -> Self {
        Self {
            alpha: 0.0,
            beta: 1.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `s_H` arises only under the high value.
    pub fn is_high_value_flagging(&self, tol: f64) -> bool {
        self.alpha <= tol
    }

    /// `s_L` arises only under the low value.
    pub fn is_low_value_flagging(&self, tol: f64) -> bool {
        self.beta >= 1.0 - tol
    }

    /// An uninformative signal leaves every posterior at the prior.
    pub fn is_uninformative(&self, tol: f64) -> bool {
        (self.beta - self.alpha).abs() <= tol
    }
}

/// Finite signal given by one likelihood row per value; row `v` lists
/// `Pr(s_k | v)` over the `k` realizations. Rows must sum to one within
/// [`PROB_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSignal {
    rows: Vec<Vec<f64>>,
}

impl FiniteSignal {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidSignal("signal needs at least one row and one realization".into()));
        }
        let k = rows[0].len();
        for (v, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidSignal(format!(
                    "row {v} has {} realizations, expected {k}",
                    row.len()
                )));
            }
            let mut sum = 0.0;
            for &p in row {
                if !(p.is_finite() && (-PROB_TOL..=1.0 + PROB_TOL).contains(&p)) {
                    return Err(Error::InvalidSignal(format!(
                        "row {v} entry {p} outside [0,1]"
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(Error::InvalidSignal(format!(
                    "row {v} sums to {sum}, expected 1 within {PROB_TOL:e}"
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn from_binary(sig: BinarySignal) -> Self {
        // Realization order: s_L, then s_H.
        Self {
            rows: vec![
                vec![1.0 - sig.alpha(), sig.alpha()],
                vec![1.0 - sig.beta(), sig.beta()],
            ],
        }
    }

    pub fn realization_count(&self) -> usize {
        self.rows[0].len()
    }

    pub fn value_count(&self) -> usize {
        self.rows.len()
    }

    pub fn likelihood(&self, value: usize, realization: usize) -> f64 {
        self.rows[value][realization]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Pools two realization columns into one; the result is a garbling of
    /// `self` and remains a valid signal.
    pub fn merge_realizations(&self, i: usize, j: usize) -> Result<Self> {
        if i == j || i >= self.realization_count() || j >= self.realization_count() {
            return Err(Error::InvalidSignal(format!(
                "cannot merge realizations {i} and {j}"
            )));
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = Vec::with_capacity(row.len() - 1);
                for (k, &p) in row.iter().enumerate() {
                    if k == hi {
                        continue;
                    }
                    out.push(if k == lo { p + row[hi] } else { p });
                }
                out
            })
            .collect();
        Self::new(rows)
    }
}

/// Ex ante (buyer surplus, seller profit) pair, in payoff units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WelfareOutcome {
    #[serde(rename = "U")]
    pub buyer_surplus: f64,
    #[serde(rename = "Pi")]
    pub seller_profit: f64,
}

impl WelfareOutcome {
    /// Payoffs are nonnegative in this model; a small negative slack is
    /// tolerated for intermediate floating-point noise.
    pub fn new(buyer_surplus: f64, seller_profit: f64) -> Result<Self> {
        if !(buyer_surplus.is_finite() && seller_profit.is_finite())
            || buyer_surplus < -1e-9
            || seller_profit < -1e-9
        {
            return Err(Error::InvalidOutcomeSet(format!(
                "payoffs must be nonnegative, got U={buyer_surplus}, Pi={seller_profit}"
            )));
        }
        Ok(Self {
            buyer_surplus,
            seller_profit,
        })
    }

    pub fn total_surplus(&self) -> f64 {
        self.buyer_surplus + self.seller_profit
    }

    pub fn distance(&self, other: &WelfareOutcome) -> f64 {
        let du = self.buyer_surplus - other.buyer_surplus;
        let dp = self.seller_profit - other.seller_profit;
        du.hypot(dp)
    }
}

/// 2D cross product of `b - a` and `c - a`; positive for a left turn.
pub fn cross(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let proj = (a.0 + t * dx, a.1 + t * dy);
    (p.0 - proj.0).hypot(p.1 - proj.1)
}

/// Convex planar welfare region given by a boundary polyline in
/// counterclockwise order, together with the prior it was sliced at.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSet {
    vertices: Vec<WelfareOutcome>,
    prior: f64,
}

impl OutcomeSet {
    /// Builds a set from boundary vertices. Degenerate sets (a point or a
    /// segment) are allowed; with three or more vertices the polyline must be
    /// convex and counterclockwise within [`CONVEXITY_TOL`].
    pub fn new(vertices: Vec<WelfareOutcome>, prior: f64) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidOutcomeSet("empty boundary".into()));
        }
        let n = vertices.len();
        if n >= 3 {
            let scale = vertices
                .iter()
                .map(|v| v.buyer_surplus.abs().max(v.seller_profit.abs()))
                .fold(1.0_f64, f64::max);
            for i in 0..n {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let c = vertices[(i + 2) % n];
                let x = cross(
                    (a.buyer_surplus, a.seller_profit),
                    (b.buyer_surplus, b.seller_profit),
                    (c.buyer_surplus, c.seller_profit),
                );
                if x < -CONVEXITY_TOL * scale.max(1.0) {
                    return Err(Error::InvalidOutcomeSet(format!(
                        "boundary not convex/counterclockwise at vertex {i} (cross={x})"
                    )));
                }
            }
        }
        Ok(Self { vertices, prior })
    }

    pub fn vertices(&self) -> &[WelfareOutcome] {
        &self.vertices
    }

    pub fn prior(&self) -> f64 {
        self.prior
    }

    /// Signed membership: nonnegative slack admits boundary points.
    pub fn contains(&self, p: &WelfareOutcome, slack: f64) -> bool {
        let pt = (p.buyer_surplus, p.seller_profit);
        match self.vertices.len() {
            1 => self.vertices[0].distance(p) <= slack,
            2 => {
                point_segment_distance(
                    pt,
                    (self.vertices[0].buyer_surplus, self.vertices[0].seller_profit),
                    (self.vertices[1].buyer_surplus, self.vertices[1].seller_profit),
                ) <= slack
            }
            n => {
                // Inside if on the left of every edge, up to slack scaled by
                // edge length (cross product is distance times length).
                for i in 0..n {
                    let a = self.vertices[i];
                    let b = self.vertices[(i + 1) % n];
                    let ax = (a.buyer_surplus, a.seller_profit);
                    let bx = (b.buyer_surplus, b.seller_profit);
                    let len = (bx.0 - ax.0).hypot(bx.1 - ax.1);
                    if len == 0.0 {
                        continue;
                    }
                    if cross(ax, bx, pt) < -slack * len {
                        return false;
                    }
                }
                true
            }
        }
    }

    /// Maximum of `lambda . (U, Pi)` over the vertex set.
    pub fn support_value(&self, lambda: (f64, f64)) -> f64 {
        self.vertices
            .iter()
            .map(|v| lambda.0 * v.buyer_surplus + lambda.1 * v.seller_profit)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Intersects the set with the half-plane `U >= cutoff`.
    pub fn clip_min_buyer_surplus(&self, cutoff: f64) -> Result<OutcomeSet> {
        let inside = |v: &WelfareOutcome| v.buyer_surplus >= cutoff;
        let n = self.vertices.len();
        if n == 1 {
            return if inside(&self.vertices[0]) {
                Ok(self.clone())
            } else {
                Err(Error::InvalidOutcomeSet("clip leaves the set empty".into()))
            };
        }
        let mut out: Vec<WelfareOutcome> = Vec::new();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let (ina, inb) = (inside(&a), inside(&b));
            if ina {
                out.push(a);
            }
            if ina != inb {
                let t = (cutoff - a.buyer_surplus) / (b.buyer_surplus - a.buyer_surplus);
                out.push(WelfareOutcome {
                    buyer_surplus: cutoff,
                    seller_profit: a.seller_profit + t * (b.seller_profit - a.seller_profit),
                });
            }
        }
        dedup_closed_polyline(&mut out, 1e-12);
        if out.is_empty() {
            return Err(Error::InvalidOutcomeSet("clip leaves the set empty".into()));
        }
        OutcomeSet::new(out, self.prior)
    }

    fn boundary_points(&self) -> Vec<(f64, f64)> {
        self.vertices
            .iter()
            .map(|v| (v.buyer_surplus, v.seller_profit))
            .collect()
    }

    /// Symmetric Hausdorff distance between the two boundary polylines.
    pub fn boundary_hausdorff(&self, other: &OutcomeSet) -> f64 {
        let a = self.boundary_points();
        let b = other.boundary_points();
        directed_hausdorff(&a, &b).max(directed_hausdorff(&b, &a))
    }
}

/// Largest distance from a point of `from` to the closed polyline `to`.
pub fn directed_hausdorff(from: &[(f64, f64)], to: &[(f64, f64)]) -> f64 {
    let mut worst = 0.0_f64;
    for &p in from {
        let mut best = f64::INFINITY;
        if to.len() == 1 {
            best = (p.0 - to[0].0).hypot(p.1 - to[0].1);
        } else {
            for i in 0..to.len() {
                let a = to[i];
                let b = to[(i + 1) % to.len()];
                best = best.min(point_segment_distance(p, a, b));
            }
        }
        worst = worst.max(best);
    }
    worst
}

/// Convex hull in counterclockwise order (Andrew's monotone chain).
/// Collinear points are dropped.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15);
    let n = pts.len();
    if n <= 2 {
        return pts;
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * n);
    for &p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev() {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

fn dedup_closed_polyline(points: &mut Vec<WelfareOutcome>, tol: f64) {
    points.dedup_by(|a, b| a.distance(b) <= tol);
    while points.len() > 1 && points[0].distance(points.last().unwrap()) <= tol {
        points.pop();
    }
}
