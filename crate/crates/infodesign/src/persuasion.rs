//! Generic surplus-set solver.
//!
//! The set of implementable welfare outcomes is the prior slice of the
//! convex hull of the graph `mu -> (U(mu), Pi(mu))`: a public signal is a
//! Bayes-plausible distribution over basic beliefs, and its outcome is the
//! corresponding average of the graph points. The solver samples the graph
//! on a belief grid (augmented with the exact beliefs at which the threshold
//! type crosses atoms of `F`, where the payoffs kink), then sweeps support
//! directions; each direction reduces to concavifying a scalar function of
//! the belief, which an upper convex hull solves exactly on the grid and
//! which hands back an optimal split certificate with at most two support
//! points. Interior points are certified by mixing the no-information point
//! with a boundary certificate along a ray, for at most three support points.

use rayon::prelude::*;

use crate::dist::TypeDistribution;
use crate::error::{Error, Result};
use crate::model::{convex_hull, FiniteSignal, MarketPrimitives, OutcomeSet, WelfareOutcome};
use crate::payoffs::indirect_outcome;

/// Graph of the indirect payoffs on a strictly increasing belief grid.
#[derive(Debug, Clone)]
pub struct GraphSample {
    mus: Vec<f64>,
    points: Vec<WelfareOutcome>,
}

impl GraphSample {
    pub fn mus(&self) -> &[f64] {
        &self.mus
    }

    pub fn points(&self) -> &[WelfareOutcome] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.mus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mus.is_empty()
    }
}

/// Belief at which the threshold type crosses `theta`, i.e. the solution of
/// `threshold_type(mu) = theta`.
fn belief_at_threshold(theta: f64, mkt: &MarketPrimitives, mu0: f64) -> f64 {
    if theta <= 0.0 {
        return 1.0;
    }
    if theta >= 1.0 {
        return 0.0;
    }
    let q = mkt.low() * (1.0 - theta) * mu0 / (theta * (1.0 - mu0) * mkt.spread());
    q / (1.0 + q)
}

/// Evaluates `(U, Pi)` on a uniform belief grid of `n` points augmented with
/// the exact beliefs `{0, mu0, 1}` and the beliefs where the threshold type
/// crosses an atom or density kink of `F`.
pub fn sample_graph(
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
    grid_size: usize,
) -> Result<GraphSample> {
    if grid_size < 3 {
        return Err(Error::InvalidConfig("grid_size must be at least 3".into()));
    }
    let mu0 = dist.mean();
    if !(mu0 > 0.0 && mu0 < 1.0) {
        return Err(Error::DegeneratePrior(mu0));
    }
    let mut mus: Vec<f64> = (0..grid_size)
        .map(|i| i as f64 / (grid_size - 1) as f64)
        .collect();
    mus.push(mu0);
    for theta in dist
        .atom_positions()
        .into_iter()
        .chain(dist.kink_positions())
    {
        mus.push(belief_at_threshold(theta, mkt, mu0));
    }
    mus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    mus.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let points = mus
        .iter()
        .map(|&mu| indirect_outcome(mu, mkt, dist))
        .collect::<Result<Vec<_>>>()?;
    Ok(GraphSample { mus, points })
}

/// Distribution over basic beliefs; weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefSplit {
    support: Vec<f64>,
    weights: Vec<f64>,
}

impl BeliefSplit {
    pub fn new(support: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != weights.len() {
            return Err(Error::InvalidConfig(
                "split support/weights mismatch".into(),
            ));
        }
        let mut sum = 0.0;
        for (&mu, &w) in support.iter().zip(&weights) {
            if !(0.0..=1.0).contains(&mu) || !w.is_finite() || w < -1e-12 {
                return Err(Error::InvalidConfig(format!(
                    "invalid split point ({mu}, {w})"
                )));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!("split weights sum to {sum}")));
        }
        Ok(Self { support, weights })
    }

    pub fn degenerate(mu: f64) -> Self {
        Self {
            support: vec![mu],
            weights: vec![1.0],
        }
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    pub fn mean(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.weights)
            .map(|(mu, w)| mu * w)
            .sum()
    }

    /// Bayes plausibility: the split must average to the prior.
    pub fn is_plausible(&self, mu0: f64, tol: f64) -> bool {
        (self.mean() - mu0).abs() <= tol
    }

    /// Merges duplicate support points and drops zero weights.
    pub fn simplify(mut self) -> Self {
        let mut pairs: Vec<(f64, f64)> = self
            .support
            .drain(..)
            .zip(self.weights.drain(..))
            .filter(|(_, w)| *w > 1e-15)
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut support: Vec<f64> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for (mu, w) in pairs {
            if let Some(&last) = support.last() {
                if (mu - last).abs() < 1e-15 {
                    *weights.last_mut().unwrap() += w;
                    continue;
                }
            }
            support.push(mu);
            weights.push(w);
        }
        Self { support, weights }
    }
}

/// Optimal value and split for one support direction.
#[derive(Debug, Clone)]
pub struct SupportSolution {
    pub value: f64,
    pub split: BeliefSplit,
    pub outcome: WelfareOutcome,
}

/// Maximizes `lambda . (U, Pi)` over Bayes-plausible splits supported on the
/// graph grid: the concave envelope of the scalar objective evaluated at the
/// prior. The optimal split has at most two support points.
pub fn support_value(lambda: (f64, f64), mu0: f64, graph: &GraphSample) -> Result<SupportSolution> {
    if lambda.0 == 0.0 && lambda.1 == 0.0 {
        return Err(Error::InvalidConfig("direction must be nonzero".into()));
    }
    let g: Vec<f64> = graph
        .points
        .iter()
        .map(|p| lambda.0 * p.buyer_surplus + lambda.1 * p.seller_profit)
        .collect();
    // Upper hull of {(mu_i, g_i)}; mus are sorted, so one monotone pass.
    let mut hull: Vec<usize> = Vec::with_capacity(graph.len());
    for i in 0..graph.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Keep b only if it lies strictly above the chord from a to i.
            let lhs = (g[b] - g[a]) * (graph.mus[i] - graph.mus[a]);
            let rhs = (g[i] - g[a]) * (graph.mus[b] - graph.mus[a]);
            if lhs <= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    // Locate the envelope segment containing mu0.
    let seg = hull.partition_point(|&i| graph.mus[i] < mu0);
    let (lo, hi) = if seg == 0 {
        (hull[0], hull[0])
    } else if seg == hull.len() {
        (hull[hull.len() - 1], hull[hull.len() - 1])
    } else if (graph.mus[hull[seg]] - mu0).abs() < 1e-15 {
        (hull[seg], hull[seg])
    } else {
        (hull[seg - 1], hull[seg])
    };
    let (split, outcome, value) = if lo == hi {
        let p = graph.points[lo];
        (BeliefSplit::degenerate(graph.mus[lo]), p, g[lo])
    } else {
        let w_hi = (mu0 - graph.mus[lo]) / (graph.mus[hi] - graph.mus[lo]);
        let w_lo = 1.0 - w_hi;
        let (pl, ph) = (graph.points[lo], graph.points[hi]);
        let outcome = WelfareOutcome {
            buyer_surplus: w_lo * pl.buyer_surplus + w_hi * ph.buyer_surplus,
            seller_profit: w_lo * pl.seller_profit + w_hi * ph.seller_profit,
        };
        (
            BeliefSplit::new(vec![graph.mus[lo], graph.mus[hi]], vec![w_lo, w_hi])?.simplify(),
            outcome,
            w_lo * g[lo] + w_hi * g[hi],
        )
    };
    Ok(SupportSolution {
        value,
        split,
        outcome,
    })
}

/// Support solution together with its direction.
#[derive(Debug, Clone)]
pub struct BoundaryPoint {
    pub lambda: (f64, f64),
    pub solution: SupportSolution,
}

/// Sweeps `directions` unit vectors around the circle and solves the
/// supporting persuasion problem for each.
pub fn boundary_certificates(
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
    grid_size: usize,
    directions: usize,
) -> Result<Vec<BoundaryPoint>> {
    if directions < 8 {
        return Err(Error::InvalidConfig("need at least 8 directions".into()));
    }
    let graph = sample_graph(mkt, dist, grid_size)?;
    let mu0 = dist.mean();
    (0..directions)
        .into_par_iter()
        .map(|k| {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / directions as f64;
            let lambda = (phi.cos(), phi.sin());
            Ok(BoundaryPoint {
                lambda,
                solution: support_value(lambda, mu0, &graph)?,
            })
        })
        .collect()
}

/// The set of implementable outcomes: the prior slice of the hull of the
/// payoff graph, returned as a convex boundary polyline.
pub fn implementable_set(
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
    grid_size: usize,
    directions: usize,
) -> Result<OutcomeSet> {
    let certs = boundary_certificates(mkt, dist, grid_size, directions)?;
    let pts: Vec<(f64, f64)> = certs
        .iter()
        .map(|c| {
            (
                c.solution.outcome.buyer_surplus,
                c.solution.outcome.seller_profit,
            )
        })
        .collect();
    let hull = convex_hull(&pts);
    let vertices: Vec<WelfareOutcome> = if hull.len() >= 3 {
        hull.into_iter()
            .map(|(u, p)| WelfareOutcome {
                buyer_surplus: u,
                seller_profit: p,
            })
            .collect()
    } else {
        // Degenerate slice: fall back to the deduplicated sweep points.
        let mut v: Vec<WelfareOutcome> = Vec::new();
        for (u, p) in pts {
            let w = WelfareOutcome {
                buyer_surplus: u,
                seller_profit: p,
            };
            if v.iter().all(|x| x.distance(&w) > 1e-12) {
                v.push(w);
            }
        }
        v
    };
    OutcomeSet::new(vertices, dist.mean())
}

/// Signal inducing a Bayes-plausible split: realization `i` has likelihoods
/// `pi(s_i|H) = w_i mu_i / mu0` and `pi(s_i|L) = w_i (1-mu_i) / (1-mu0)`.
pub fn split_to_signal(split: &BeliefSplit, mu0: f64) -> Result<FiniteSignal> {
    if !(mu0 > 0.0 && mu0 < 1.0) {
        return Err(Error::DegeneratePrior(mu0));
    }
    if !split.is_plausible(mu0, 1e-9) {
        return Err(Error::NotBayesPlausible {
            mean: split.mean(),
            prior: mu0,
        });
    }
    let mut low: Vec<f64> = Vec::with_capacity(split.support_size());
    let mut high: Vec<f64> = Vec::with_capacity(split.support_size());
    for (&mu, &w) in split.support.iter().zip(&split.weights) {
        high.push(w * mu / mu0);
        low.push(w * (1.0 - mu) / (1.0 - mu0));
    }
    // Plausibility slack (up to 1e-9) leaks into the row sums; rescale so
    // the rows are exact probability vectors.
    for row in [&mut low, &mut high] {
        let sum: f64 = row.iter().sum();
        if sum > 0.0 {
            for p in row.iter_mut() {
                *p /= sum;
            }
        }
    }
    FiniteSignal::new(vec![low, high])
}

/// Ex ante outcome of a two-row public signal: each realization's basic
/// belief weighs the indirect payoffs by the realization probability under
/// the basic prior.
pub fn outcome_of_signal(
    sig: &FiniteSignal,
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
) -> Result<WelfareOutcome> {
    if sig.value_count() != 2 {
        return Err(Error::InvalidSignal(
            "outcome_of_signal expects one row per binary value".into(),
        ));
    }
    let mu0 = dist.mean();
    if !(mu0 > 0.0 && mu0 < 1.0) {
        return Err(Error::DegeneratePrior(mu0));
    }
    let mut u = 0.0;
    let mut p = 0.0;
    for s in 0..sig.realization_count() {
        let pl = sig.likelihood(0, s);
        let ph = sig.likelihood(1, s);
        let prob = (1.0 - mu0) * pl + mu0 * ph;
        if prob <= 0.0 {
            continue;
        }
        let mu = mu0 * ph / prob;
        let o = indirect_outcome(mu, mkt, dist)?;
        u += prob * o.buyer_surplus;
        p += prob * o.seller_profit;
    }
    Ok(WelfareOutcome {
        buyer_surplus: u,
        seller_profit: p,
    })
}

pub fn outcome_of_binary_signal(
    sig: crate::model::BinarySignal,
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
) -> Result<WelfareOutcome> {
    outcome_of_signal(&FiniteSignal::from_binary(sig), mkt, dist)
}

/// Split certificate for a requested point, together with the outcome the
/// split actually achieves.
#[derive(Debug, Clone)]
pub struct CertifiedPoint {
    pub split: BeliefSplit,
    pub achieved: WelfareOutcome,
}

/// Certifies an implementable point with a split of at most three support
/// points: boundary points keep their two-point certificates, and interior
/// points mix the no-information belief with the boundary certificate found
/// where the ray from the no-information outcome through the target exits
/// the set.
pub fn certify_point(
    target: &WelfareOutcome,
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
    grid_size: usize,
    directions: usize,
) -> Result<CertifiedPoint> {
    let mu0 = dist.mean();
    let graph = sample_graph(mkt, dist, grid_size)?;
    let noinfo = indirect_outcome(mu0, mkt, dist)?;
    if target.distance(&noinfo) <= 1e-12 {
        return Ok(CertifiedPoint {
            split: BeliefSplit::degenerate(mu0),
            achieved: noinfo,
        });
    }
    let certs = boundary_certificates(mkt, dist, grid_size, directions)?;
    // Exact matches first: the target may itself be a sweep point or sit on
    // a chord from the no-information point to one.
    for c in &certs {
        let b = c.solution.outcome;
        if target.distance(&b) <= 1e-9 {
            return Ok(CertifiedPoint {
                split: c.solution.split.clone(),
                achieved: b,
            });
        }
    }
    for c in &certs {
        if let Some(cert) = mix_toward(&noinfo, &c.solution, target, mu0, 1e-9) {
            return Ok(cert);
        }
    }
    // General position: bisect on the support direction until the boundary
    // point crosses the ray from the no-information outcome through the
    // target.
    let d = (
        target.buyer_surplus - noinfo.buyer_surplus,
        target.seller_profit - noinfo.seller_profit,
    );
    let side = |o: &WelfareOutcome| -> f64 {
        let e = (
            o.buyer_surplus - noinfo.buyer_surplus,
            o.seller_profit - noinfo.seller_profit,
        );
        d.0 * e.1 - d.1 * e.0
    };
    let forward = |o: &WelfareOutcome| -> f64 {
        (o.buyer_surplus - noinfo.buyer_surplus) * d.0
            + (o.seller_profit - noinfo.seller_profit) * d.1
    };
    let m = certs.len();
    let mut bracket = None;
    for k in 0..m {
        let a = &certs[k];
        let b = &certs[(k + 1) % m];
        let (sa, sb) = (side(&a.solution.outcome), side(&b.solution.outcome));
        if sa == 0.0 && forward(&a.solution.outcome) > 0.0 {
            bracket = Some((k as f64, k as f64));
            break;
        }
        if sa * sb < 0.0
            && (forward(&a.solution.outcome) > 0.0 || forward(&b.solution.outcome) > 0.0)
        {
            bracket = Some((k as f64, k as f64 + 1.0));
            break;
        }
    }
    let (mut lo, mut hi) =
        bracket.ok_or_else(|| Error::InvalidConfig("no boundary bracket found".into()))?;
    let solve_at = |t: f64| -> Result<SupportSolution> {
        let phi = 2.0 * std::f64::consts::PI * t / m as f64;
        support_value((phi.cos(), phi.sin()), mu0, &graph)
    };
    let side_lo = side(&solve_at(lo)?.outcome);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let s = side(&solve_at(mid)?.outcome);
        if s == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if s * side_lo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let boundary = solve_at(0.5 * (lo + hi))?;
    mix_toward(&noinfo, &boundary, target, mu0, f64::INFINITY)
        .ok_or_else(|| Error::InvalidConfig("certification failed".into()))
}

/// Projects `target` onto the segment from the no-information outcome to the
/// boundary solution and mixes the two certificates. Returns `None` when the
/// projection misses the target by more than `tol`.
fn mix_toward(
    noinfo: &WelfareOutcome,
    boundary: &SupportSolution,
    target: &WelfareOutcome,
    mu0: f64,
    tol: f64,
) -> Option<CertifiedPoint> {
    let b = boundary.outcome;
    let seg = (
        b.buyer_surplus - noinfo.buyer_surplus,
        b.seller_profit - noinfo.seller_profit,
    );
    let len2 = seg.0 * seg.0 + seg.1 * seg.1;
    if len2 == 0.0 {
        return None;
    }
    let t = (((target.buyer_surplus - noinfo.buyer_surplus) * seg.0
        + (target.seller_profit - noinfo.seller_profit) * seg.1)
        / len2)
        .clamp(0.0, 1.0);
    let achieved = WelfareOutcome {
        buyer_surplus: noinfo.buyer_surplus + t * seg.0,
        seller_profit: noinfo.seller_profit + t * seg.1,
    };
    if achieved.distance(target) > tol {
        return None;
    }
    let mut support = vec![mu0];
    let mut weights = vec![1.0 - t];
    for (&mu, &w) in boundary
        .split
        .support()
        .iter()
        .zip(boundary.split.weights())
    {
        support.push(mu);
        weights.push(t * w);
    }
    let split = BeliefSplit::new(support, weights).ok()?.simplify();
    Some(CertifiedPoint { split, achieved })
}
