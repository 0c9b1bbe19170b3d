//! Brute-force and Monte-Carlo cross-validation at desk scale.
//!
//! Everything here checks the analytic modules from the outside: exhaustive
//! sweeps over signal grids, enumeration of small incentive-compatible
//! menus (with incentive compatibility judged by decision values, since
//! enumerated signals need not be direct), and seeded simulation of the full
//! game. Randomness comes from a counter-based generator so runs are
//! bit-reproducible on any platform and trivially parallel.

use rayon::prelude::*;

use crate::beliefs::{optimal_price_binary, TieBreak};
use crate::dist::TypeDistribution;
use crate::error::{Error, Result};
use crate::mechanisms::{best_response_threshold, DirectMechanism, PublicSignalCdf};
use crate::model::{BinarySignal, FiniteSignal, MarketPrimitives, WelfareOutcome};
use crate::persuasion::outcome_of_signal;

/// Counter-based pseudo-random numbers (the splitmix64 finalizer applied to
/// `seed + (counter+1) * golden_gamma`). Stateless: draw `i` of a stream is
/// addressable directly, which makes parallel use and replay trivial.
pub mod rng {
    const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

    pub fn mix(seed: u64, counter: u64) -> u64 {
        let mut z = seed.wrapping_add(counter.wrapping_add(1).wrapping_mul(GAMMA));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53-bit resolution.
    pub fn unit(seed: u64, counter: u64) -> f64 {
        (mix(seed, counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Sweep and simulation configuration.
#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    /// Probability grid step for signal sweeps; must divide 1.
    pub grid_step: f64,
    /// Maximum realization count for enumerated public signals (2 or 3).
    pub realization_cap: usize,
    pub rng_seed: u64,
    pub sample_count: usize,
}

impl OracleConfig {
    pub fn new(
        grid_step: f64,
        realization_cap: usize,
        rng_seed: u64,
        sample_count: usize,
    ) -> Result<Self> {
        if !(grid_step > 0.0 && grid_step < 1.0) {
            return Err(Error::InvalidConfig("grid_step must lie in (0,1)".into()));
        }
        let n = 1.0 / grid_step;
        if (n - n.round()).abs() > 1e-9 {
            return Err(Error::InvalidConfig("grid_step must divide 1".into()));
        }
        if !(2..=3).contains(&realization_cap) {
            return Err(Error::InvalidConfig("realization_cap must be 2 or 3".into()));
        }
        Ok(Self {
            grid_step,
            realization_cap,
            rng_seed,
            sample_count,
        })
    }

    fn grid_points(&self) -> usize {
        (1.0 / self.grid_step).round() as usize + 1
    }
}

/// All grid binary signals with `beta >= alpha`, with their exact outcomes.
pub fn enumerate_binary_outcomes(
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
    cfg: &OracleConfig,
) -> Result<Vec<(BinarySignal, WelfareOutcome)>> {
    let n = cfg.grid_points();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        let alpha = i as f64 / (n - 1) as f64;
        for j in i..n {
            let beta = j as f64 / (n - 1) as f64;
            let sig = BinarySignal::new(alpha, beta)?;
            let o = crate::persuasion::outcome_of_binary_signal(sig, mkt, dist)?;
            out.push((sig, o));
        }
    }
    Ok(out)
}

/// Three-realization signals on a coarser grid (each likelihood row is a
/// grid composition of one).
pub fn enumerate_ternary_outcomes(
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
    cfg: &OracleConfig,
) -> Result<Vec<WelfareOutcome>> {
    if cfg.realization_cap < 3 {
        return Ok(Vec::new());
    }
    let n = ((0.5 / cfg.grid_step).round() as usize).max(2);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for a in 0..=n {
        for b in 0..=(n - a) {
            let c = n - a - b;
            rows.push(vec![
                a as f64 / n as f64,
                b as f64 / n as f64,
                c as f64 / n as f64,
            ]);
        }
    }
    let mut out = Vec::with_capacity(rows.len() * rows.len());
    for low in &rows {
        for high in &rows {
            let sig = FiniteSignal::new(vec![low.clone(), high.clone()])?;
            out.push(outcome_of_signal(&sig, mkt, dist)?);
        }
    }
    Ok(out)
}

/// Full sweep: binary grid plus coarser three-realization signals.
pub fn enumerate_public_outcomes(
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
    cfg: &OracleConfig,
) -> Result<Vec<WelfareOutcome>> {
    let mut out: Vec<WelfareOutcome> = enumerate_binary_outcomes(mkt, dist, cfg)?
        .into_iter()
        .map(|(_, o)| o)
        .collect();
    out.extend(enumerate_ternary_outcomes(mkt, dist, cfg)?);
    Ok(out)
}

/// Expected profit of a type responding optimally to a binary signal (its
/// decision value). Enumerated menus need not be direct mechanisms, so menu
/// incentive compatibility is judged by this value.
pub fn decision_value(theta: f64, sig: BinarySignal, mkt: &MarketPrimitives) -> f64 {
    let mut total = 0.0;
    for (pl, ph) in [
        (1.0 - sig.alpha(), 1.0 - sig.beta()),
        (sig.alpha(), sig.beta()),
    ] {
        let prob = (1.0 - theta) * pl + theta * ph;
        if prob <= 0.0 {
            continue;
        }
        let t = theta * ph / prob;
        let price = optimal_price_binary(t, mkt, TieBreak::Low);
        let profit = if price == mkt.high() {
            t * mkt.high()
        } else {
            mkt.low()
        };
        total += prob * profit;
    }
    total
}

/// Interim outcome of a type responding optimally to a binary signal.
fn response_outcome(theta: f64, sig: BinarySignal, mkt: &MarketPrimitives) -> WelfareOutcome {
    let mut u = 0.0;
    let mut p = 0.0;
    for (pl, ph) in [
        (1.0 - sig.alpha(), 1.0 - sig.beta()),
        (sig.alpha(), sig.beta()),
    ] {
        let prob = (1.0 - theta) * pl + theta * ph;
        if prob <= 0.0 {
            continue;
        }
        let t = theta * ph / prob;
        let price = optimal_price_binary(t, mkt, TieBreak::Low);
        if price == mkt.high() {
            p += prob * t * mkt.high();
        } else {
            p += prob * mkt.low();
            u += prob * t * mkt.spread();
        }
    }
    WelfareOutcome {
        buyer_surplus: u,
        seller_profit: p,
    }
}

/// Enumerates menus of grid binary signals for a discrete type distribution
/// with at most three atoms, keeping the menus in which every type weakly
/// prefers its own signal's decision value, and returns the outcome cloud.
pub fn enumerate_small_menus(
    mkt: &MarketPrimitives,
    atoms: &[(f64, f64)],
    cfg: &OracleConfig,
) -> Result<Vec<WelfareOutcome>> {
    let m = atoms.len();
    if m == 0 || m > 3 {
        return Err(Error::InvalidConfig(
            "menu enumeration supports 1..=3 types".into(),
        ));
    }
    let n = cfg.grid_points();
    let mut signals = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            signals.push(BinarySignal::new(
                i as f64 / (n - 1) as f64,
                j as f64 / (n - 1) as f64,
            )?);
        }
    }
    // Decision values and response outcomes per (type, signal).
    let values: Vec<Vec<f64>> = atoms
        .iter()
        .map(|&(theta, _)| {
            signals
                .iter()
                .map(|&s| decision_value(theta, s, mkt))
                .collect()
        })
        .collect();
    let outcomes: Vec<Vec<WelfareOutcome>> = atoms
        .iter()
        .map(|&(theta, _)| {
            signals
                .iter()
                .map(|&s| response_outcome(theta, s, mkt))
                .collect()
        })
        .collect();

    let k = signals.len();
    let combos: Vec<Vec<usize>> = match m {
        1 => (0..k).map(|a| vec![a]).collect(),
        2 => (0..k)
            .flat_map(|a| (0..k).map(move |b| vec![a, b]))
            .collect(),
        _ => (0..k)
            .flat_map(|a| (0..k).flat_map(move |b| (0..k).map(move |c| vec![a, b, c])))
            .collect(),
    };
    let cloud: Vec<WelfareOutcome> = combos
        .into_par_iter()
        .filter_map(|combo| {
            // IC: each type's own decision value beats every other item's.
            for i in 0..m {
                let own = values[i][combo[i]];
                for j in 0..m {
                    if values[i][combo[j]] > own + 1e-12 {
                        return None;
                    }
                }
            }
            let mut u = 0.0;
            let mut p = 0.0;
            for i in 0..m {
                let o = outcomes[i][combo[i]];
                u += atoms[i].1 * o.buyer_surplus;
                p += atoms[i].1 * o.seller_profit;
            }
            Some(WelfareOutcome {
                buyer_surplus: u,
                seller_profit: p,
            })
        })
        .collect();
    Ok(cloud)
}

#[derive(Debug, Clone, Copy)]
pub struct SimulationEstimate {
    pub outcome: WelfareOutcome,
    /// Standard errors of the two means.
    pub se_buyer: f64,
    pub se_seller: f64,
    pub draws: usize,
}

struct Accumulator {
    sum: f64,
    comp: f64,
    sum_sq: f64,
    comp_sq: f64,
}

impl Accumulator {
    fn new() -> Self {
        Self {
            sum: 0.0,
            comp: 0.0,
            sum_sq: 0.0,
            comp_sq: 0.0,
        }
    }

    // Kahan compensated addition keeps the reduction order-insensitive in
    // practice at 1e6 draws.
    fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
        let y2 = x * x - self.comp_sq;
        let t2 = self.sum_sq + y2;
        self.comp_sq = (t2 - self.sum_sq) - y2;
        self.sum_sq = t2;
    }

    fn merge(&mut self, other: &Accumulator) {
        self.add_raw(other.sum, other.sum_sq);
    }

    fn add_raw(&mut self, s: f64, s2: f64) {
        let y = s - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
        let y2 = s2 - self.comp_sq;
        let t2 = self.sum_sq + y2;
        self.comp_sq = (t2 - self.sum_sq) - y2;
        self.sum_sq = t2;
    }

    fn mean_se(&self, n: usize) -> (f64, f64) {
        let nf = n as f64;
        let mean = self.sum / nf;
        let var = (self.sum_sq / nf - mean * mean).max(0.0);
        (mean, (var / nf).sqrt())
    }
}

/// Simulates the full game under a public two-row signal: draw the type from
/// `F`, the value from the type, the realization from the signal, apply
/// optimal pricing, and average payoffs. Chunked so the reduction order is
/// fixed regardless of thread count.
pub fn simulate_game(
    sig: &FiniteSignal,
    mkt: &MarketPrimitives,
    dist: &TypeDistribution,
    cfg: &OracleConfig,
) -> Result<SimulationEstimate> {
    if sig.value_count() != 2 {
        return Err(Error::InvalidSignal("simulation expects binary values".into()));
    }
    if cfg.sample_count == 0 {
        return Err(Error::InvalidConfig("sample_count must be positive".into()));
    }
    let k = sig.realization_count();
    const CHUNK: usize = 1 << 14;
    let n = cfg.sample_count;
    let chunks: Vec<(usize, usize)> = (0..n)
        .step_by(CHUNK)
        .map(|start| (start, (start + CHUNK).min(n)))
        .collect();
    let partials: Vec<(f64, f64, f64, f64)> = chunks
        .par_iter()
        .map(|&(start, end)| {
            let mut u = Accumulator::new();
            let mut p = Accumulator::new();
            for i in start..end {
                let base = 3 * i as u64;
                let theta = dist.quantile(rng::unit(cfg.rng_seed, base));
                let high_value = rng::unit(cfg.rng_seed, base + 1) < theta;
                let row = usize::from(high_value);
                let mut draw = rng::unit(cfg.rng_seed, base + 2);
                let mut s = k - 1;
                for j in 0..k {
                    let q = sig.likelihood(row, j);
                    if draw < q {
                        s = j;
                        break;
                    }
                    draw -= q;
                }
                let pl = sig.likelihood(0, s);
                let ph = sig.likelihood(1, s);
                let prob = (1.0 - theta) * pl + theta * ph;
                let t = if prob > 0.0 { theta * ph / prob } else { theta };
                let price = optimal_price_binary(t, mkt, TieBreak::Low);
                let (du, dp) = if price == mkt.high() {
                    if high_value {
                        (0.0, mkt.high())
                    } else {
                        (0.0, 0.0)
                    }
                } else if high_value {
                    (mkt.spread(), mkt.low())
                } else {
                    (0.0, mkt.low())
                };
                u.add(du);
                p.add(dp);
            }
            (u.sum, u.sum_sq, p.sum, p.sum_sq)
        })
        .collect();
    let mut u = Accumulator::new();
    let mut p = Accumulator::new();
    for (su, squ, sp, sqp) in partials {
        u.merge(&Accumulator {
            sum: su,
            comp: 0.0,
            sum_sq: squ,
            comp_sq: 0.0,
        });
        p.merge(&Accumulator {
            sum: sp,
            comp: 0.0,
            sum_sq: sqp,
            comp_sq: 0.0,
        });
    }
    let (mu, se_u) = u.mean_se(n);
    let (mp, se_p) = p.mean_se(n);
    Ok(SimulationEstimate {
        outcome: WelfareOutcome {
            buyer_surplus: mu,
            seller_profit: mp,
        },
        se_buyer: se_u,
        se_seller: se_p,
        draws: n,
    })
}

/// Random incentive-compatible direct mechanism: draw a random public signal
/// with likelihood-ratio-ordered realizations and read off each grid type's
/// best threshold response. By the equivalence construction every
/// incentive-compatible mechanism arises this way, and the result is
/// incentive compatible and obedient by construction.
pub fn random_ic_mechanism(
    seed: u64,
    index: u64,
    max_types: usize,
    mkt: &MarketPrimitives,
) -> DirectMechanism {
    let base = index.wrapping_mul(1 << 16);
    let draw = |j: u64| rng::unit(seed, base + j);
    let m = 2 + (rng::mix(seed, base + 1000) as usize) % (max_types.max(2) - 1);
    let r = 2 + (rng::mix(seed, base + 1001) as usize) % 4;

    // Random masses via normalized exponentials, then realization order by
    // decreasing likelihood ratio to satisfy the MLR property.
    let mut low: Vec<f64> = (0..r).map(|j| -(1.0 - draw(j as u64)).ln()).collect();
    let mut high: Vec<f64> = (0..r)
        .map(|j| -(1.0 - draw(100 + j as u64)).ln())
        .collect();
    let (sl, sh) = (
        low.iter().sum::<f64>(),
        high.iter().sum::<f64>(),
    );
    for x in low.iter_mut() {
        *x /= sl;
    }
    for x in high.iter_mut() {
        *x /= sh;
    }
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| {
        let ra = if low[a] > 0.0 {
            high[a] / low[a]
        } else {
            f64::INFINITY
        };
        let rb = if low[b] > 0.0 {
            high[b] / low[b]
        } else {
            f64::INFINITY
        };
        rb.partial_cmp(&ra).unwrap()
    });
    let mut cum_low = Vec::with_capacity(r);
    let mut cum_high = Vec::with_capacity(r);
    let (mut al, mut ah) = (0.0, 0.0);
    for &j in &order {
        al = (al + low[j]).min(1.0);
        ah = (ah + high[j]).min(1.0);
        cum_low.push(al);
        cum_high.push(ah);
    }
    *cum_low.last_mut().unwrap() = 1.0;
    *cum_high.last_mut().unwrap() = 1.0;
    let positions: Vec<f64> = (0..r).map(|j| (j + 1) as f64 / (r + 1) as f64).collect();
    let sig = PublicSignalCdf::new(positions, cum_low, cum_high)
        .expect("ratio-sorted masses satisfy the MLR ordering");

    let mut grid: Vec<f64> = (0..m).map(|j| 0.02 + 0.96 * draw(200 + j as u64)).collect();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    while grid.len() < 2 {
        grid.push((grid[0] + 0.31) % 1.0);
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    let mut alpha = Vec::with_capacity(grid.len());
    let mut beta = Vec::with_capacity(grid.len());
    for &theta in &grid {
        let resp = best_response_threshold(theta, &sig, mkt);
        alpha.push(resp.profile.0);
        beta.push(resp.profile.1);
    }
    DirectMechanism::new(grid, alpha, beta).expect("best responses form a valid mechanism")
}

/// Unconstrained random mechanism (for rejection sampling): sorted grid,
/// independent items with `beta >= alpha`.
pub fn random_mechanism(
    seed: u64,
    index: u64,
    types: usize,
) -> DirectMechanism {
    let base = index.wrapping_mul(1 << 16).wrapping_add(0x5151_5151);
    let draw = |j: u64| rng::unit(seed, base + j);
    let mut grid: Vec<f64> = (0..types)
        .map(|j| 0.02 + 0.96 * draw(j as u64))
        .collect();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut alpha = Vec::with_capacity(grid.len());
    let mut beta = Vec::with_capacity(grid.len());
    for j in 0..grid.len() {
        let a = draw(100 + j as u64);
        let b = a + (1.0 - a) * draw(200 + j as u64);
        alpha.push(a);
        beta.push(b);
    }
    DirectMechanism::new(grid, alpha, beta).expect("sampled items are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::TypeDistribution as D;
    use crate::mechanisms::{check_ic, check_obedience};
    use crate::payoffs::observable_triangle;
    use crate::persuasion::implementable_set;

    fn mkt13() -> MarketPrimitives {
        MarketPrimitives::new(1.0, 3.0).unwrap()
    }

    #[test]
    fn rng_is_deterministic_and_uniform_ish() {
        assert_eq!(rng::mix(7, 0), rng::mix(7, 0));
        assert_ne!(rng::mix(7, 0), rng::mix(7, 1));
        assert_ne!(rng::mix(7, 0), rng::mix(8, 0));
        let mean: f64 = (0..10_000).map(|i| rng::unit(42, i)).sum::<f64>() / 10_000.0;
        assert!((mean - 0.5).abs() < 0.02);
    }

    #[test]
    fn binary_sweep_count_and_containment() {
        let m = mkt13();
        let d = D::uniform01();
        let cfg = OracleConfig::new(0.05, 2, 1, 100).unwrap();
        let cloud = enumerate_binary_outcomes(&m, &d, &cfg).unwrap();
        assert_eq!(cloud.len(), 231);

        // Dense sweep: the exact cloud points must sit inside the inner
        // polygon up to 1e-6, which needs sub-1e-6 sweep resolution.
        let set = implementable_set(&m, &d, 2001, 2880).unwrap();
        for (sig, o) in &cloud {
            assert!(
                set.contains(o, 1e-6),
                "binary signal ({}, {}) escapes the set: {o:?}",
                sig.alpha(),
                sig.beta()
            );
        }
        // The extremes are present.
        let full = WelfareOutcome::new(0.0, 2.0).unwrap();
        let none = WelfareOutcome::new(1.0 / 9.0, 5.0 / 3.0).unwrap();
        assert!(cloud.iter().any(|(_, o)| o.distance(&full) < 1e-12));
        assert!(cloud.iter().any(|(_, o)| o.distance(&none) < 1e-12));
    }

    #[test]
    fn ternary_sweep_stays_inside() {
        let m = mkt13();
        let d = D::uniform01();
        let cfg = OracleConfig::new(0.1, 3, 1, 100).unwrap();
        let set = implementable_set(&m, &d, 2001, 2880).unwrap();
        for o in enumerate_ternary_outcomes(&m, &d, &cfg).unwrap() {
            assert!(set.contains(&o, 1e-6), "ternary outcome escapes: {o:?}");
        }
    }

    #[test]
    fn point_mass_cloud_inside_observable_triangle() {
        let m = mkt13();
        let d = D::point_mass(0.6).unwrap();
        let cfg = OracleConfig::new(0.1, 2, 1, 100).unwrap();
        let triangle = observable_triangle(&m, &d);
        for (_, o) in enumerate_binary_outcomes(&m, &d, &cfg).unwrap() {
            assert!(triangle.contains(&o, 1e-9), "outside triangle: {o:?}");
        }
    }

    #[test]
    fn menus_of_identical_signals_match_public_points() {
        let m = mkt13();
        let atoms = [(0.2, 0.5), (0.8, 0.5)];
        let d = D::discrete_atoms(atoms.to_vec()).unwrap();
        let cfg = OracleConfig::new(0.25, 2, 1, 100).unwrap();
        let menus = enumerate_small_menus(&m, &atoms, &cfg).unwrap();
        // Every public signal shows up as the constant menu, whose outcome
        // must match the analytic public outcome exactly.
        for (sig, public) in enumerate_binary_outcomes(&m, &d, &cfg).unwrap() {
            let interim0 = response_outcome(0.2, sig, &m);
            let interim1 = response_outcome(0.8, sig, &m);
            let direct = WelfareOutcome {
                buyer_surplus: 0.5 * (interim0.buyer_surplus + interim1.buyer_surplus),
                seller_profit: 0.5 * (interim0.seller_profit + interim1.seller_profit),
            };
            assert!(direct.distance(&public) < 1e-12);
            assert!(menus.iter().any(|o| o.distance(&public) < 1e-12));
        }
    }

    #[test]
    fn ic_menu_cloud_inside_public_hull() {
        let m = mkt13();
        let atoms = [(0.2, 0.5), (0.8, 0.5)];
        let d = D::discrete_atoms(atoms.to_vec()).unwrap();
        let menu_cfg = OracleConfig::new(0.1, 2, 1, 100).unwrap();
        let hull_cfg = OracleConfig::new(0.02, 2, 1, 100).unwrap();
        let cloud = enumerate_small_menus(&m, &atoms, &menu_cfg).unwrap();
        assert!(!cloud.is_empty());
        let public: Vec<(f64, f64)> = enumerate_binary_outcomes(&m, &d, &hull_cfg)
            .unwrap()
            .into_iter()
            .map(|(_, o)| (o.buyer_surplus, o.seller_profit))
            .collect();
        let hull = crate::model::convex_hull(&public);
        let hull_set = crate::model::OutcomeSet::new(
            hull.into_iter()
                .map(|(u, p)| WelfareOutcome {
                    buyer_surplus: u,
                    seller_profit: p,
                })
                .collect(),
            d.mean(),
        )
        .unwrap();
        for o in &cloud {
            assert!(hull_set.contains(o, 0.02), "menu outcome escapes: {o:?}");
        }
    }

    #[test]
    fn no_ic_menu_reaches_the_buyer_optimal_corner() {
        // The motivating pair theta1 < L/H < theta2: efficiency for the high
        // type hands rents to the low type, so the observable-type
        // buyer-optimal corner is out of reach.
        let m = mkt13();
        let atoms = [(0.2, 0.5), (0.6, 0.5)];
        let cfg = OracleConfig::new(0.1, 2, 1, 100).unwrap();
        let cloud = enumerate_small_menus(&m, &atoms, &cfg).unwrap();
        // Corner (w_bar - pi_floor, pi_floor) = (0.4, 1.4).
        let corner = WelfareOutcome::new(0.4, 1.4).unwrap();
        let min_dist = cloud
            .iter()
            .map(|o| o.distance(&corner))
            .fold(f64::INFINITY, f64::min);
        assert!(min_dist > 0.02, "corner approached: {min_dist}");
    }

    #[test]
    fn simulation_matches_analytic_outcomes() {
        let m = mkt13();
        let d = D::uniform01();
        let cfg = OracleConfig::new(0.1, 2, 20_240_817, 1_000_000).unwrap();
        let cases = [
            (BinarySignal::uninformative(), (1.0 / 9.0, 5.0 / 3.0)),
            (BinarySignal::fully_informative(), (0.0, 2.0)),
            (BinarySignal::new(0.0, 0.5).unwrap(), (0.125, 1.75)),
        ];
        for (sig, (u, p)) in cases {
            let est = simulate_game(&FiniteSignal::from_binary(sig), &m, &d, &cfg).unwrap();
            assert!(
                (est.outcome.buyer_surplus - u).abs() <= 3.0 * est.se_buyer.max(1e-9),
                "U off: {} vs {u} (se {})",
                est.outcome.buyer_surplus,
                est.se_buyer
            );
            assert!(
                (est.outcome.seller_profit - p).abs() <= 3.0 * est.se_seller.max(1e-9),
                "Pi off: {} vs {p} (se {})",
                est.outcome.seller_profit,
                est.se_seller
            );
        }
    }

    #[test]
    fn simulation_agrees_across_distribution_kinds() {
        // Cross-checks the conditional payoff formulas on every kind of F,
        // not just the uniform benchmark.
        let m = mkt13();
        let cfg = OracleConfig::new(0.1, 2, 31_337, 400_000).unwrap();
        let dists = [
            D::discrete_atoms(vec![(0.2, 0.5), (0.8, 0.5)]).unwrap(),
            D::discrete_atoms(vec![(0.1, 0.25), (0.45, 0.5), (0.9, 0.25)]).unwrap(),
            D::piecewise_linear_cdf(vec![(0.0, 0.0), (0.3, 0.6), (1.0, 1.0)]).unwrap(),
            D::point_mass(0.6).unwrap(),
        ];
        let signals = [
            BinarySignal::new(0.1, 0.7).unwrap(),
            BinarySignal::new(0.0, 0.4).unwrap(),
            BinarySignal::new(0.3, 1.0).unwrap(),
        ];
        for d in &dists {
            for &sig in &signals {
                let analytic =
                    crate::persuasion::outcome_of_binary_signal(sig, &m, d).unwrap();
                let est = simulate_game(&FiniteSignal::from_binary(sig), &m, d, &cfg).unwrap();
                assert!(
                    (est.outcome.buyer_surplus - analytic.buyer_surplus).abs()
                        <= 4.0 * est.se_buyer.max(1e-9),
                    "U mismatch for {d:?} / ({}, {}): {} vs {}",
                    sig.alpha(),
                    sig.beta(),
                    est.outcome.buyer_surplus,
                    analytic.buyer_surplus
                );
                assert!(
                    (est.outcome.seller_profit - analytic.seller_profit).abs()
                        <= 4.0 * est.se_seller.max(1e-9),
                    "Pi mismatch for {d:?} / ({}, {}): {} vs {}",
                    sig.alpha(),
                    sig.beta(),
                    est.outcome.seller_profit,
                    analytic.seller_profit
                );
            }
        }
    }

    #[test]
    fn simulation_is_bit_deterministic() {
        let m = mkt13();
        let d = D::uniform01();
        let cfg = OracleConfig::new(0.1, 2, 99, 200_000).unwrap();
        let sig = FiniteSignal::from_binary(BinarySignal::new(0.2, 0.7).unwrap());
        let a = simulate_game(&sig, &m, &d, &cfg).unwrap();
        let b = simulate_game(&sig, &m, &d, &cfg).unwrap();
        assert_eq!(a.outcome.buyer_surplus.to_bits(), b.outcome.buyer_surplus.to_bits());
        assert_eq!(a.outcome.seller_profit.to_bits(), b.outcome.seller_profit.to_bits());
    }

    #[test]
    fn generated_mechanisms_are_ic_and_obedient() {
        let m = mkt13();
        for i in 0..200 {
            let mech = random_ic_mechanism(4242, i, 6, &m);
            assert!(check_ic(&mech, &m).ok, "mechanism {i} not IC");
            assert!(check_obedience(&mech, &m).ok, "mechanism {i} disobedient");
        }
    }
}
