//! Seller-type distributions on `[0,1]`.
//!
//! Four representable kinds cover everything the solver needs: point masses,
//! finite atom lists, the uniform distribution, and piecewise-linear CDFs
//! (continuous densities that approximate smooth distributions). Partial
//! moments are available in closed form for every kind, so the indirect
//! payoff functions never rely on numerical quadrature; the generic
//! [`TypeDistribution::integrate`] kernel backs the few places that do
//! integrate arbitrary functions.

use crate::error::{Error, Result};
use crate::model::PROB_TOL;

#[derive(Debug, Clone, PartialEq)]
pub enum TypeDistribution {
    /// All mass on a single type.
    PointMass(f64),
    /// Finite atoms `(theta_i, w_i)` sorted by type, weights summing to one.
    DiscreteAtoms(Vec<(f64, f64)>),
    /// Uniform on `[0,1]`.
    Uniform01,
    /// Continuous CDF, linear between knots `(theta, F(theta))`; the first
    /// knot must be `(0, 0)` and the last `(1, 1)`.
    PiecewiseLinearCdf(Vec<(f64, f64)>),
}

impl TypeDistribution {
    pub fn point_mass(theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidDistribution(format!(
                "point mass at {theta} outside [0,1]"
            )));
        }
        Ok(Self::PointMass(theta))
    }

    pub fn discrete_atoms(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        let mut total = 0.0;
        for &(theta, w) in &atoms {
            if !(0.0..=1.0).contains(&theta) || !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "atom ({theta}, {w}) invalid"
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidDistribution(format!(
                "atom weights sum to {total}, expected 1 within {PROB_TOL:e}"
            )));
        }
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Ok(Self::DiscreteAtoms(atoms))
    }

    pub fn uniform01() -> Self {
        Self::Uniform01
    }

    pub fn piecewise_linear_cdf(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidDistribution("need at least two knots".into()));
        }
        let first = knots[0];
        let last = *knots.last().unwrap();
        if first != (0.0, 0.0) || (last.0 - 1.0).abs() > 0.0 || (last.1 - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidDistribution(
                "knots must start at (0,0) and end at (1,1)".into(),
            ));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 || w[1].1 < w[0].1 - PROB_TOL {
                return Err(Error::InvalidDistribution(
                    "knot positions must increase and CDF must be nondecreasing".into(),
                ));
            }
        }
        Ok(Self::PiecewiseLinearCdf(knots))
    }

    /// Prior mean `E[theta]`, exact per kind.
    pub fn mean(&self) -> f64 {
        match self {
            Self::PointMass(t) => *t,
            Self::DiscreteAtoms(atoms) => atoms.iter().map(|(t, w)| t * w).sum(),
            Self::Uniform01 => 0.5,
            Self::PiecewiseLinearCdf(knots) => {
                let mut m = 0.0;
                for w in knots.windows(2) {
                    let density = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                    m += density * (w[1].0 * w[1].0 - w[0].0 * w[0].0) / 2.0;
                }
                m
            }
        }
    }

    pub fn cdf(&self, theta: f64) -> f64 {
        self.mass_below(theta, true)
    }

    /// `F`-mass of `[0, b]` when `inclusive`, of `[0, b)` otherwise. The
    /// boundary flag only matters for atoms sitting exactly at `b`.
    pub fn mass_below(&self, b: f64, inclusive: bool) -> f64 {
        match self {
            Self::PointMass(t) => {
                if *t < b || (inclusive && *t == b) {
                    1.0
                } else {
                    0.0
                }
            }
            Self::DiscreteAtoms(atoms) => atoms
                .iter()
                .filter(|(t, _)| *t < b || (inclusive && *t == b))
                .map(|(_, w)| w)
                .sum(),
            Self::Uniform01 => b.clamp(0.0, 1.0),
            Self::PiecewiseLinearCdf(knots) => {
                if b <= 0.0 {
                    return 0.0;
                }
                if b >= 1.0 {
                    return 1.0;
                }
                let i = knots.partition_point(|k| k.0 <= b);
                let (a, fa) = knots[i - 1];
                let (c, fc) = knots[i];
                fa + (fc - fa) * (b - a) / (c - a)
            }
        }
    }

    /// Partial first moment: integral of `theta` over `[0, b]` (or `[0, b)`).
    pub fn first_moment_below(&self, b: f64, inclusive: bool) -> f64 {
        match self {
            Self::PointMass(t) => {
                if *t < b || (inclusive && *t == b) {
                    *t
                } else {
                    0.0
                }
            }
            Self::DiscreteAtoms(atoms) => atoms
                .iter()
                .filter(|(t, _)| *t < b || (inclusive && *t == b))
                .map(|(t, w)| t * w)
                .sum(),
            Self::Uniform01 => {
                let b = b.clamp(0.0, 1.0);
                b * b / 2.0
            }
            Self::PiecewiseLinearCdf(knots) => {
                let b = b.clamp(0.0, 1.0);
                let mut m = 0.0;
                for w in knots.windows(2) {
                    if b <= w[0].0 {
                        break;
                    }
                    let hi = b.min(w[1].0);
                    let density = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                    m += density * (hi * hi - w[0].0 * w[0].0) / 2.0;
                }
                m
            }
        }
    }

    /// Integrates `integrand` against `F` over the closed interval `[a, b]`.
    /// Exact summation for atoms; adaptive Gauss-Kronrod with absolute
    /// tolerance `1e-10` for the continuous kinds.
    pub fn integrate<G: Fn(f64) -> f64>(&self, integrand: G, a: f64, b: f64) -> Result<f64> {
        if a > b {
            return Err(Error::InvalidInterval { a, b });
        }
        let value = match self {
            Self::PointMass(t) => {
                if (a..=b).contains(t) {
                    integrand(*t)
                } else {
                    0.0
                }
            }
            Self::DiscreteAtoms(atoms) => atoms
                .iter()
                .filter(|(t, _)| (a..=b).contains(t))
                .map(|(t, w)| w * integrand(*t))
                .sum(),
            Self::Uniform01 => {
                let lo = a.max(0.0);
                let hi = b.min(1.0);
                if lo >= hi {
                    0.0
                } else {
                    adaptive_quadrature(&integrand, lo, hi, QUAD_TOL)
                }
            }
            Self::PiecewiseLinearCdf(knots) => {
                let mut total = 0.0;
                for w in knots.windows(2) {
                    let lo = a.max(w[0].0);
                    let hi = b.min(w[1].0);
                    if lo >= hi {
                        continue;
                    }
                    let density = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                    if density == 0.0 {
                        continue;
                    }
                    total += density * adaptive_quadrature(&integrand, lo, hi, QUAD_TOL);
                }
                total
            }
        };
        Ok(value)
    }

    /// Type positions carrying point mass; used to augment belief grids where
    /// the indirect payoffs kink.
    pub fn atom_positions(&self) -> Vec<f64> {
        match self {
            Self::PointMass(t) => vec![*t],
            Self::DiscreteAtoms(atoms) => atoms.iter().map(|(t, _)| *t).collect(),
            _ => Vec::new(),
        }
    }

    /// Positions where the density changes (continuous kinds only).
    pub fn kink_positions(&self) -> Vec<f64> {
        match self {
            Self::PiecewiseLinearCdf(knots) => knots.iter().map(|(t, _)| *t).collect(),
            _ => Vec::new(),
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self, Self::Uniform01 | Self::PiecewiseLinearCdf(_))
    }

    /// Full support on `[0,1]` in the sense the protocol characterizations
    /// need: positive density everywhere.
    pub fn is_full_support(&self) -> bool {
        match self {
            Self::Uniform01 => true,
            Self::PiecewiseLinearCdf(knots) => knots.windows(2).all(|w| w[1].1 > w[0].1),
            _ => false,
        }
    }

    /// Inverse-CDF sampling; `u` uniform on `[0,1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            Self::PointMass(t) => *t,
            Self::DiscreteAtoms(atoms) => {
                let mut acc = 0.0;
                for &(t, w) in atoms {
                    acc += w;
                    if u < acc {
                        return t;
                    }
                }
                atoms.last().unwrap().0
            }
            Self::Uniform01 => u,
            Self::PiecewiseLinearCdf(knots) => {
                for w in knots.windows(2) {
                    if u <= w[1].1 {
                        if w[1].1 == w[0].1 {
                            return w[0].0;
                        }
                        return w[0].0 + (w[1].0 - w[0].0) * (u - w[0].1) / (w[1].1 - w[0].1);
                    }
                }
                1.0
            }
        }
    }
}

const QUAD_TOL: f64 = 1e-10;

// Gauss-Kronrod 15-point rule with the embedded 7-point Gauss rule on [-1,1].
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

fn gauss_kronrod<G: Fn(f64) -> f64>(f: &G, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut kronrod = WGK[7] * f(mid);
    let mut gauss = WG[3] * f(mid);
    for i in 0..7 {
        let dx = half * XGK[i];
        let fsum = f(mid - dx) + f(mid + dx);
        kronrod += WGK[i] * fsum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

/// Adaptive bisection on the Gauss-Kronrod estimate; absolute tolerance is
/// distributed proportionally to subinterval length.
fn adaptive_quadrature<G: Fn(f64) -> f64>(f: &G, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse<G: Fn(f64) -> f64>(f: &G, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gauss_kronrod(f, a, b);
        if err <= tol || depth >= 48 {
            return value;
        }
        let mid = 0.5 * (a + b);
        recurse(f, a, mid, tol / 2.0, depth + 1) + recurse(f, mid, b, tol / 2.0, depth + 1)
    }
    recurse(f, a, b, tol, 0)
}
