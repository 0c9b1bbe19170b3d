//! Closed forms for uniformly distributed seller types.
//!
//! A two-realization signal `(alpha, beta)` splits the uniform type space at
//! two cutoffs `x <= L/H <= y`: types below `x` price low after both
//! realizations, types above `y` price high after both, and types in between
//! follow the recommendations. The ex ante payoffs are polynomial in
//! `(x, y)`, the boundary of the surplus set solves in closed form (right
//! boundary: high-value flagging `x = 0`; left boundary: low-value flagging
//! `y = 1`), and the buyer-optimal point has flagging rate
//! `beta = (H-2L)/(H-L)` whenever `L/H < 1/2`. These formulas cross-validate
//! the generic solver.

use crate::error::{Error, Result};
use crate::model::{BinarySignal, MarketPrimitives, WelfareOutcome};

/// Response cutoffs of a binary signal under uniform types, with
/// `0 <= x <= L/H <= y <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffPair {
    x: f64,
    y: f64,
}

impl CutoffPair {
    pub fn new(x: f64, y: f64, mkt: &MarketPrimitives) -> Result<Self> {
        let r = mkt.ratio();
        if !(0.0 - 1e-12..=r + 1e-12).contains(&x) || !(r - 1e-12..=1.0 + 1e-12).contains(&y) {
            return Err(Error::InvalidConfig(format!(
                "cutoffs must satisfy 0 <= x <= L/H <= y <= 1, got ({x}, {y})"
            )));
        }
        Ok(Self {
            x: x.clamp(0.0, r),
            y: y.clamp(r, 1.0),
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// Inverts the cutoff map: `alpha = x(Hy-L)/(L(y-x))`,
/// `beta = (Hy-L)(1-x)/((y-x)(H-L))`. Degenerate cutoffs (`y = x`, only
/// possible at `L/H`) denote the uninformative signal.
pub fn cutoffs_to_signal(c: &CutoffPair, mkt: &MarketPrimitives) -> BinarySignal {
    let (l, h) = (mkt.low(), mkt.high());
    if c.y - c.x <= 1e-15 {
        return BinarySignal::uninformative();
    }
    let slope = h * c.y - l;
    let alpha = c.x * slope / (l * (c.y - c.x));
    let beta = slope * (1.0 - c.x) / ((c.y - c.x) * (h - l));
    BinarySignal::new(alpha.clamp(0.0, 1.0), beta.clamp(0.0, 1.0))
        .expect("valid cutoffs map into the signal square")
}

/// Cutoffs of a binary signal: `x = aL/(aL + b(H-L))`,
/// `y = (1-a)L/(H - aL - b(H-L))`, with the 0/0 endpoints resolved to the
/// stated limits (`x = 0` for the uninformative signal, `y = 1` for the
/// all-high signal).
pub fn signal_to_cutoffs(sig: &BinarySignal, mkt: &MarketPrimitives) -> CutoffPair {
    let (l, h) = (mkt.low(), mkt.high());
    let (a, b) = (sig.alpha(), sig.beta());
    let denom_x = a * l + b * (h - l);
    let x = if denom_x == 0.0 { 0.0 } else { a * l / denom_x };
    let denom_y = h - a * l - b * (h - l);
    let y = if denom_y <= 0.0 {
        1.0
    } else {
        (1.0 - a) * l / denom_y
    };
    CutoffPair::new(x.clamp(0.0, mkt.ratio()), y.clamp(mkt.ratio(), 1.0), mkt)
        .expect("cutoffs from a valid signal always order correctly")
}

/// Ex ante seller profit
/// `Pi(x,y) = Ly + (Hy-L)(y+x)/2 - (Hy-L)x + H(1-y^2)/2`.
pub fn profit_xy(c: &CutoffPair, mkt: &MarketPrimitives) -> f64 {
    let (l, h) = (mkt.low(), mkt.high());
    let slope = h * c.y - l;
    l * c.y + 0.5 * slope * (c.y + c.x) - slope * c.x + 0.5 * h * (1.0 - c.y * c.y)
}

/// Ex ante buyer surplus
/// `U(x,y) = (H-L)y^2/2 - (Hy-L)(1-x)(y+x)/2`.
pub fn surplus_xy(c: &CutoffPair, mkt: &MarketPrimitives) -> f64 {
    let (l, h) = (mkt.low(), mkt.high());
    let slope = h * c.y - l;
    0.5 * (h - l) * c.y * c.y - 0.5 * slope * (1.0 - c.x) * (c.y + c.x)
}

pub fn outcome_xy(c: &CutoffPair, mkt: &MarketPrimitives) -> WelfareOutcome {
    WelfareOutcome {
        buyer_surplus: surplus_xy(c, mkt),
        seller_profit: profit_xy(c, mkt),
    }
}

/// Right-boundary point for objective ratio `r = lambda_Pi / lambda_U` with
/// `lambda_U > 0`: high-value flagging with `y* = clamp((1+r)/2, L/H, 1)`.
pub fn right_boundary_point(r: f64, mkt: &MarketPrimitives) -> (CutoffPair, WelfareOutcome) {
    let y = (0.5 * (1.0 + r)).clamp(mkt.ratio(), 1.0);
    let c = CutoffPair::new(0.0, y, mkt).expect("clamped cutoffs are valid");
    let o = outcome_xy(&c, mkt);
    (c, o)
}

/// Left-boundary point for objective ratio `r = lambda_Pi / lambda_U` with
/// `lambda_U < 0`: low-value flagging with `x* = clamp(r/2, 0, L/H)`.
pub fn left_boundary_point(r: f64, mkt: &MarketPrimitives) -> (CutoffPair, WelfareOutcome) {
    let x = (0.5 * r).clamp(0.0, mkt.ratio());
    let c = CutoffPair::new(x, 1.0, mkt).expect("clamped cutoffs are valid");
    let o = outcome_xy(&c, mkt);
    (c, o)
}

/// Buyer-optimal signal and outcome: uninformative when `L/H >= 1/2`,
/// otherwise high-value flagging at rate `(H-2L)/(H-L)`.
pub fn buyer_optimal(mkt: &MarketPrimitives) -> (BinarySignal, WelfareOutcome) {
    if mkt.ratio() >= 0.5 {
        let c = CutoffPair::new(0.0, mkt.ratio(), mkt).unwrap();
        (BinarySignal::uninformative(), outcome_xy(&c, mkt))
    } else {
        let beta = (mkt.high() - 2.0 * mkt.low()) / mkt.spread();
        let c = CutoffPair::new(0.0, 0.5, mkt).unwrap();
        (
            BinarySignal::new(0.0, beta).expect("flagging rate lies in [0,1]"),
            outcome_xy(&c, mkt),
        )
    }
}

pub fn no_info_outcome(mkt: &MarketPrimitives) -> WelfareOutcome {
    let c = CutoffPair::new(0.0, mkt.ratio(), mkt).unwrap();
    outcome_xy(&c, mkt)
}

pub fn full_info_outcome(mkt: &MarketPrimitives) -> WelfareOutcome {
    let c = CutoffPair::new(0.0, 1.0, mkt).unwrap();
    outcome_xy(&c, mkt)
}

/// Closed-form boundary of the surplus set, counterclockwise: right boundary
/// from the no-information point up to full information, then the left
/// boundary back down.
pub fn boundary_polyline(mkt: &MarketPrimitives, points_per_side: usize) -> Vec<WelfareOutcome> {
    let n = points_per_side.max(2);
    let r = mkt.ratio();
    let mut out: Vec<WelfareOutcome> = Vec::with_capacity(2 * n);
    for i in 0..n {
        let y = r + (1.0 - r) * i as f64 / (n - 1) as f64;
        let c = CutoffPair::new(0.0, y, mkt).unwrap();
        out.push(outcome_xy(&c, mkt));
    }
    for i in 1..n {
        let x = r * i as f64 / (n - 1) as f64;
        let c = CutoffPair::new(x, 1.0, mkt).unwrap();
        out.push(outcome_xy(&c, mkt));
    }
    // The left sweep ends at the no-information point, which closes the loop.
    if out.len() > 1 && out[0].distance(out.last().unwrap()) < 1e-12 {
        out.pop();
    }
    out
}
