//! Finite value grids with more than two values.
//!
//! With `n > 2` possible values the seller's type is a point of the value
//! simplex and public signals no longer span all implementable outcomes:
//! menus of type-specific signals can attain efficient outcomes that hold
//! every type to her no-data profit, while every efficient public signal
//! concedes a strictly positive rent. Everything here runs in exact rational
//! arithmetic so that the benchmark quantities (the outside options, the
//! minimized rent, the buyer surplus with no data) come out as exact
//! fractions; the minimized-rent signal solves a small linear program by
//! vertex enumeration.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

fn rat_int(num: i64) -> Rat {
    Rat::from_integer(BigInt::from(num))
}

/// Parses "p/q", integer, or decimal notation into an exact rational; plain
/// JSON numbers map through their exact binary value.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let n: i64 = num
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad rational '{text}'")))?;
        let d: i64 = den
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad rational '{text}'")))?;
        if d == 0 {
            return Err(Error::InvalidConfig(format!("zero denominator in '{text}'")));
        }
        return Ok(rat(n, d));
    }
    let x: f64 = text
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad number '{text}'")))?;
    Rat::from_float(x).ok_or_else(|| Error::InvalidConfig(format!("non-finite number '{text}'")))
}

fn rat_from_json(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat(s),
        Value::Number(n) => {
            let x = n
                .as_f64()
                .ok_or_else(|| Error::InvalidConfig("non-finite number".into()))?;
            Rat::from_float(x).ok_or_else(|| Error::InvalidConfig("non-finite number".into()))
        }
        _ => Err(Error::InvalidConfig("expected a number".into())),
    }
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Strictly increasing positive value grid `v_1 < ... < v_n`, `n >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiMarket {
    values: Vec<Rat>,
}

impl MultiMarket {
    pub fn new(values: Vec<Rat>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidMarket("need at least two values".into()));
        }
        if values[0] <= Rat::zero() {
            return Err(Error::InvalidMarket("values must be positive".into()));
        }
        for w in values.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidMarket("values must strictly increase".into()));
            }
        }
        Ok(Self { values })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| rat_int(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> &Rat {
        &self.values[i]
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }
}

/// Probability vector over the value grid; sums to one exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexType {
    probs: Vec<Rat>,
}

impl SimplexType {
    pub fn new(probs: Vec<Rat>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty type".into()));
        }
        let mut sum = Rat::zero();
        for p in &probs {
            if p < &Rat::zero() {
                return Err(Error::InvalidDistribution("negative probability".into()));
            }
            sum += p;
        }
        if !sum.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "type probabilities sum to {sum}, expected exactly 1"
            )));
        }
        Ok(Self { probs })
    }

    /// Builds from floats: the values convert exactly, a residual up to
    /// `1e-12` is absorbed into the largest component so the simplex sum is
    /// exact, and anything larger is rejected.
    pub fn from_f64s(probs: &[f64]) -> Result<Self> {
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "type probabilities sum to {sum}"
            )));
        }
        let mut rats: Vec<Rat> = probs
            .iter()
            .map(|&p| Rat::from_float(p).ok_or_else(|| {
                Error::InvalidDistribution("non-finite probability".into())
            }))
            .collect::<Result<Vec<_>>>()?;
        let total: Rat = rats.iter().fold(Rat::zero(), |acc, p| acc + p);
        let residual = Rat::one() - total;
        let argmax = (0..rats.len())
            .max_by(|&a, &b| rats[a].partial_cmp(&rats[b]).unwrap())
            .unwrap();
        rats[argmax] += residual;
        Self::new(rats)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn prob(&self, i: usize) -> &Rat {
        &self.probs[i]
    }

    pub fn probs(&self) -> &[Rat] {
        &self.probs
    }
}

/// Signal over a finite value grid, one likelihood row per value; rows sum
/// to one exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSignal {
    rows: Vec<Vec<Rat>>,
}

impl RationalSignal {
    pub fn new(rows: Vec<Vec<Rat>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidSignal("empty signal".into()));
        }
        let k = rows[0].len();
        for row in &rows {
            if row.len() != k {
                return Err(Error::InvalidSignal("ragged likelihood rows".into()));
            }
            let mut sum = Rat::zero();
            for p in row {
                if p < &Rat::zero() || p > &Rat::one() {
                    return Err(Error::InvalidSignal("likelihood outside [0,1]".into()));
                }
                sum += p;
            }
            if !sum.is_one() {
                return Err(Error::InvalidSignal(format!(
                    "likelihood row sums to {sum}, expected exactly 1"
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn uninformative(values: usize) -> Self {
        Self {
            rows: vec![vec![Rat::one()]; values],
        }
    }

    pub fn fully_informative(values: usize) -> Self {
        let rows = (0..values)
            .map(|v| {
                (0..values)
                    .map(|s| if s == v { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        Self { rows }
    }

    pub fn realization_count(&self) -> usize {
        self.rows[0].len()
    }

    pub fn value_count(&self) -> usize {
        self.rows.len()
    }

    pub fn likelihood(&self, value: usize, s: usize) -> &Rat {
        &self.rows[value][s]
    }

    pub fn rows(&self) -> &[Vec<Rat>] {
        &self.rows
    }

    /// Post-multiplies the likelihood rows by a row-stochastic garbling
    /// matrix (`realizations x new_realizations`).
    pub fn garble(&self, matrix: &[Vec<Rat>]) -> Result<RationalSignal> {
        if matrix.len() != self.realization_count() {
            return Err(Error::InvalidSignal("garbling matrix shape mismatch".into()));
        }
        let k_new = matrix[0].len();
        for row in matrix {
            if row.len() != k_new {
                return Err(Error::InvalidSignal("ragged garbling matrix".into()));
            }
            let sum: Rat = row.iter().fold(Rat::zero(), |a, p| a + p);
            if !sum.is_one() {
                return Err(Error::InvalidSignal("garbling rows must sum to 1".into()));
            }
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                (0..k_new)
                    .map(|t| {
                        row.iter()
                            .zip(matrix)
                            .fold(Rat::zero(), |acc, (p, g)| acc + p * &g[t])
                    })
                    .collect()
            })
            .collect();
        RationalSignal::new(rows)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|row| row.iter().map(rat_to_f64).collect())
            .collect()
    }
}

/// Menu assigning one signal to each type, with type weights summing to one.
#[derive(Debug, Clone)]
pub struct MultiMenu {
    pub types: Vec<SimplexType>,
    pub weights: Vec<Rat>,
    pub signals: Vec<RationalSignal>,
}

impl MultiMenu {
    pub fn new(
        types: Vec<SimplexType>,
        weights: Vec<Rat>,
        signals: Vec<RationalSignal>,
    ) -> Result<Self> {
        if types.is_empty() || types.len() != weights.len() || types.len() != signals.len() {
            return Err(Error::InvalidConfig("menu lengths mismatch".into()));
        }
        let sum: Rat = weights.iter().fold(Rat::zero(), |a, w| a + w);
        if !sum.is_one() {
            return Err(Error::InvalidConfig(format!(
                "menu weights sum to {sum}, expected exactly 1"
            )));
        }
        Ok(Self {
            types,
            weights,
            signals,
        })
    }

    /// Parses the menu file format
    /// `{values, types: [{probs, weight}], signals: [likelihood rows]}`;
    /// numbers may be JSON numbers or `"p/q"` strings.
    pub fn parse_json(text: &str) -> Result<(MultiMarket, MultiMenu)> {
        let root: Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("menu JSON: {e}")))?;
        let values = root
            .get("values")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidConfig("menu JSON: missing 'values'".into()))?
            .iter()
            .map(rat_from_json)
            .collect::<Result<Vec<_>>>()?;
        let mkt = MultiMarket::new(values)?;
        let mut types = Vec::new();
        let mut weights = Vec::new();
        for t in root
            .get("types")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidConfig("menu JSON: missing 'types'".into()))?
        {
            let probs = t
                .get("probs")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::InvalidConfig("menu JSON: type missing 'probs'".into()))?
                .iter()
                .map(rat_from_json)
                .collect::<Result<Vec<_>>>()?;
            types.push(SimplexType::new(probs)?);
            weights.push(rat_from_json(t.get("weight").ok_or_else(|| {
                Error::InvalidConfig("menu JSON: type missing 'weight'".into())
            })?)?);
        }
        let mut signals = Vec::new();
        for s in root
            .get("signals")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidConfig("menu JSON: missing 'signals'".into()))?
        {
            let rows = s
                .as_array()
                .ok_or_else(|| Error::InvalidConfig("menu JSON: signal must be rows".into()))?
                .iter()
                .map(|row| {
                    row.as_array()
                        .ok_or_else(|| Error::InvalidConfig("menu JSON: row must be array".into()))?
                        .iter()
                        .map(rat_from_json)
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            signals.push(RationalSignal::new(rows)?);
        }
        Ok((mkt, MultiMenu::new(types, weights, signals)?))
    }
}

/// Price tie handling; the low tie is the model convention, the high tie
/// exists to demonstrate why it matters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PriceTie {
    #[default]
    Lowest,
    Highest,
}

/// Bayes posterior of `theta` after realization `s`: componentwise
/// `theta(v) * pi(s|v)`, normalized.
pub fn posterior_many(
    theta: &SimplexType,
    sig: &RationalSignal,
    realization: usize,
) -> Result<SimplexType> {
    let mut raw: Vec<Rat> = Vec::with_capacity(theta.len());
    let mut total = Rat::zero();
    for v in 0..theta.len() {
        let p = theta.prob(v) * sig.likelihood(v, realization);
        total += &p;
        raw.push(p);
    }
    if total.is_zero() {
        return Err(Error::ZeroProbabilityRealization(realization));
    }
    SimplexType::new(raw.into_iter().map(|p| p / &total).collect())
}

/// Probability of realization `s` under type `theta`.
pub fn realization_probability(theta: &SimplexType, sig: &RationalSignal, s: usize) -> Rat {
    (0..theta.len()).fold(Rat::zero(), |acc, v| {
        acc + theta.prob(v) * sig.likelihood(v, s)
    })
}

/// Profit-maximizing posted price over the value grid, ties broken per
/// `tie`: `(price index, expected profit)`.
pub fn optimal_price_many(
    belief: &SimplexType,
    mkt: &MultiMarket,
    tie: PriceTie,
) -> (usize, Rat) {
    let n = mkt.len();
    let mut best_idx = 0usize;
    let mut best: Option<Rat> = None;
    for k in 0..n {
        // Pr(v >= v_k) under the belief.
        let tail = (k..n).fold(Rat::zero(), |acc, v| acc + belief.prob(v));
        let profit = mkt.value(k) * tail;
        let better = match &best {
            None => true,
            Some(b) => match tie {
                PriceTie::Lowest => &profit > b,
                PriceTie::Highest => &profit >= b,
            },
        };
        if better {
            best = Some(profit);
            best_idx = k;
        }
    }
    (best_idx, best.unwrap())
}

/// Decision value of a signal for a type: expected profit under optimal
/// pricing after each realization.
pub fn type_signal_value(theta: &SimplexType, sig: &RationalSignal, mkt: &MultiMarket) -> Rat {
    let mut total = Rat::zero();
    for s in 0..sig.realization_count() {
        let prob = realization_probability(theta, sig, s);
        if prob.is_zero() {
            continue;
        }
        let post = posterior_many(theta, sig, s).expect("positive-probability realization");
        let (_, profit) = optimal_price_many(&post, mkt, PriceTie::Lowest);
        total += prob * profit;
    }
    total
}

/// Expected buyer surplus a type generates under a signal, with optimal
/// pricing and the given tie rule.
pub fn type_buyer_surplus(
    theta: &SimplexType,
    sig: &RationalSignal,
    mkt: &MultiMarket,
    tie: PriceTie,
) -> Rat {
    let mut total = Rat::zero();
    for s in 0..sig.realization_count() {
        let prob = realization_probability(theta, sig, s);
        if prob.is_zero() {
            continue;
        }
        let post = posterior_many(theta, sig, s).expect("positive-probability realization");
        let (k, _) = optimal_price_many(&post, mkt, tie);
        let price = mkt.value(k);
        let surplus = (k..mkt.len()).fold(Rat::zero(), |acc, v| {
            acc + post.prob(v) * (mkt.value(v) - price)
        });
        total += prob * surplus;
    }
    total
}

/// Outside option: profit with no additional data.
pub fn no_data_profit(theta: &SimplexType, mkt: &MultiMarket) -> Rat {
    optimal_price_many(theta, mkt, PriceTie::Lowest).1
}

/// Ex ante buyer surplus with no additional data.
pub fn buyer_surplus_no_data(
    types: &[SimplexType],
    weights: &[Rat],
    mkt: &MultiMarket,
    tie: PriceTie,
) -> Rat {
    let uninformative = RationalSignal::uninformative(mkt.len());
    types
        .iter()
        .zip(weights)
        .fold(Rat::zero(), |acc, (theta, w)| {
            acc + w * type_buyer_surplus(theta, &uninformative, mkt, tie)
        })
}

#[derive(Debug, Clone)]
pub struct MenuIcReport {
    pub ok: bool,
    /// Largest deviation gain (exact; zero means ties).
    pub worst_gain: Rat,
    pub witness: Option<(usize, usize)>,
}

/// Truthful selection check: no type may gain from taking another type's
/// signal, comparing exact decision values.
pub fn menu_ic_check_many(menu: &MultiMenu, mkt: &MultiMarket) -> MenuIcReport {
    let own: Vec<Rat> = menu
        .types
        .iter()
        .zip(&menu.signals)
        .map(|(t, s)| type_signal_value(t, s, mkt))
        .collect();
    let mut worst = None::<Rat>;
    let mut witness = None;
    for (i, own_i) in own.iter().enumerate() {
        for j in 0..menu.types.len() {
            if i == j {
                continue;
            }
            let gain = type_signal_value(&menu.types[i], &menu.signals[j], mkt) - own_i;
            if worst.as_ref().is_none_or(|w| &gain > w) {
                worst = Some(gain);
                witness = Some((i, j));
            }
        }
    }
    let worst_gain = worst.unwrap_or_else(Rat::zero);
    MenuIcReport {
        ok: worst_gain <= Rat::zero(),
        worst_gain,
        witness,
    }
}

/// Efficiency under truthful selection: every buyer value trades with
/// probability one, i.e. after every realization each type posts a price
/// not exceeding any value in its posterior support.
pub fn efficient_outcome_check(menu: &MultiMenu, mkt: &MultiMarket, tie: PriceTie) -> bool {
    for (theta, sig) in menu.types.iter().zip(&menu.signals) {
        for s in 0..sig.realization_count() {
            if realization_probability(theta, sig, s).is_zero() {
                continue;
            }
            let post = posterior_many(theta, sig, s).expect("positive-probability realization");
            let (k, _) = optimal_price_many(&post, mkt, tie);
            for v in 0..k {
                if !post.prob(v).is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// Ex ante menu outcome `(buyer surplus, seller profit)`.
pub fn menu_outcome(menu: &MultiMenu, mkt: &MultiMarket, tie: PriceTie) -> (Rat, Rat) {
    let mut u = Rat::zero();
    let mut p = Rat::zero();
    for ((theta, sig), w) in menu.types.iter().zip(&menu.signals).zip(&menu.weights) {
        u += w * type_buyer_surplus(theta, sig, mkt, tie);
        p += w * type_signal_value(theta, sig, mkt);
    }
    (u, p)
}

// --- exact linear programming by vertex enumeration -----------------------

/// Maximizes `c . x` over `{x : a_i . x <= b_i}` by enumerating basic
/// solutions; exact and intended for a handful of variables. Ties prefer the
/// lexicographically largest vertex so results are deterministic.
fn lp_vertex_max(c: &[Rat], constraints: &[(Vec<Rat>, Rat)]) -> Option<Vec<Rat>> {
    let n = c.len();
    let m = constraints.len();
    let mut best: Option<(Rat, Vec<Rat>)> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        if let Some(x) = solve_square(constraints, &idx, n) {
            let feasible = constraints.iter().all(|(a, b)| {
                let lhs = a
                    .iter()
                    .zip(&x)
                    .fold(Rat::zero(), |acc, (ai, xi)| acc + ai * xi);
                lhs <= *b
            });
            if feasible {
                let value = c
                    .iter()
                    .zip(&x)
                    .fold(Rat::zero(), |acc, (ci, xi)| acc + ci * xi);
                let better = match &best {
                    None => true,
                    Some((bv, bx)) => value > *bv || (value == *bv && x > *bx),
                };
                if better {
                    best = Some((value, x));
                }
            }
        }
        // Next combination of m choose n.
        let mut i = n;
        loop {
            if i == 0 {
                return best.map(|(_, x)| x);
            }
            i -= 1;
            if idx[i] != i + m - n {
                idx[i] += 1;
                for j in (i + 1)..n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Solves the square system formed by the chosen constraint rows (as
/// equalities) with exact Gaussian elimination.
#[allow(clippy::needless_range_loop)] // in-place elimination borrows two rows
fn solve_square(constraints: &[(Vec<Rat>, Rat)], idx: &[usize], n: usize) -> Option<Vec<Rat>> {
    let mut a: Vec<Vec<Rat>> = idx.iter().map(|&i| constraints[i].0.clone()).collect();
    let mut b: Vec<Rat> = idx.iter().map(|&i| constraints[i].1.clone()).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &p;
            for cc in col..n {
                let v = &a[col][cc] * &factor;
                a[r][cc] -= v;
            }
            let v = &b[col] * &factor;
            b[r] -= v;
        }
    }
    Some(
        (0..n)
            .map(|i| &b[i] / &a[i][i])
            .collect(),
    )
}

/// Obedience constraints for one low-price realization: given `theta`, the
/// price `v_1` must beat every higher price on the realization's posterior.
/// Rows are in `a . pi <= 0` form over the likelihood vector `pi`.
fn low_price_obedience_rows(
    theta: &SimplexType,
    mkt: &MultiMarket,
) -> Vec<(Vec<Rat>, Rat)> {
    let n = mkt.len();
    let mut rows = Vec::new();
    for m in 1..n {
        // v_m * sum_{j>=m} theta_j pi_j - v_1 * sum_j theta_j pi_j <= 0
        let a: Vec<Rat> = (0..n)
            .map(|j| {
                let mut coeff = -(mkt.value(0) * theta.prob(j));
                if j >= m {
                    coeff += mkt.value(m) * theta.prob(j);
                }
                coeff
            })
            .collect();
        rows.push((a, Rat::zero()));
    }
    rows
}

/// The efficient public two-realization signal minimizing the target type's
/// profit: maximize the frequency of the low-price realization subject to
/// every type obeying the low-price recommendation, then let the target
/// price the residual realization optimally. Exact LP by vertex enumeration
/// (intended for small grids, `n <= 4`).
pub fn min_rent_efficient_public(
    mkt: &MultiMarket,
    types: &[SimplexType],
    target: usize,
) -> Result<(RationalSignal, Rat)> {
    let n = mkt.len();
    if target >= types.len() {
        return Err(Error::InvalidConfig("target type out of range".into()));
    }
    let mut constraints: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for j in 0..n {
        let mut up = vec![Rat::zero(); n];
        up[j] = Rat::one();
        constraints.push((up, Rat::one())); // pi_j <= 1
        let mut lo = vec![Rat::zero(); n];
        lo[j] = -Rat::one();
        constraints.push((lo, Rat::zero())); // -pi_j <= 0
    }
    for theta in types {
        constraints.extend(low_price_obedience_rows(theta, mkt));
    }
    let objective: Vec<Rat> = types[target].probs().to_vec();
    let pi = lp_vertex_max(&objective, &constraints)
        .ok_or_else(|| Error::InfeasibleConstraints("low-price LP has no vertex".into()))?;
    let rows: Vec<Vec<Rat>> = pi
        .iter()
        .map(|p| vec![p.clone(), Rat::one() - p])
        .collect();
    let signal = RationalSignal::new(rows)?;
    // The construction must stay efficient for every participating type.
    let k = types.len() as i64;
    let menu = MultiMenu::new(
        types.to_vec(),
        vec![rat(1, k); types.len()],
        vec![signal.clone(); types.len()],
    )?;
    if !efficient_outcome_check(&menu, mkt, PriceTie::Lowest) {
        return Err(Error::InfeasibleConstraints(
            "low-price LP optimum is not efficient".into(),
        ));
    }
    let profit = type_signal_value(&types[target], &signal, mkt);
    Ok((signal, profit))
}

/// Obedient efficient signal for a single type: one recommendation
/// realization per price, greedily maximizing the mass of lower-price
/// recommendations subject to obedience. Types that concentrate near the
/// top value force this toward the fully informative signal.
pub fn obedient_efficient_signal(theta: &SimplexType, mkt: &MultiMarket) -> Result<RationalSignal> {
    let n = mkt.len();
    let mut remaining = vec![Rat::one(); n];
    let mut columns: Vec<Vec<Rat>> = vec![vec![Rat::zero(); n]; n];
    for k in 0..n {
        if k == n - 1 {
            columns[k].clone_from_slice(&remaining);
            break;
        }
        // Variables: pi_k(j) for j >= k (efficiency forbids recommending a
        // price above the value). Objective: recommended mass.
        let d = n - k;
        let mut constraints: Vec<(Vec<Rat>, Rat)> = Vec::new();
        for j in 0..d {
            let mut up = vec![Rat::zero(); d];
            up[j] = Rat::one();
            constraints.push((up, remaining[k + j].clone()));
            let mut lo = vec![Rat::zero(); d];
            lo[j] = -Rat::one();
            constraints.push((lo, Rat::zero()));
        }
        for m in (k + 1)..n {
            // v_m tail beats v_k on this realization: forbidden.
            let a: Vec<Rat> = (0..d)
                .map(|j| {
                    let mut coeff = -(mkt.value(k) * theta.prob(k + j));
                    if k + j >= m {
                        coeff += mkt.value(m) * theta.prob(k + j);
                    }
                    coeff
                })
                .collect();
            constraints.push((a, Rat::zero()));
        }
        let objective: Vec<Rat> = (0..d).map(|j| theta.prob(k + j).clone()).collect();
        let x = lp_vertex_max(&objective, &constraints)
            .ok_or_else(|| Error::InfeasibleConstraints("recommendation LP failed".into()))?;
        for (j, xj) in x.iter().enumerate() {
            columns[k][k + j] = xj.clone();
            remaining[k + j] -= xj;
        }
    }
    let rows: Vec<Vec<Rat>> = (0..n)
        .map(|j| (0..n).map(|k| columns[k][j].clone()).collect())
        .collect();
    RationalSignal::new(rows)
}

/// The benchmark three-type market: values `(1, 3, 4)`, equally likely types
/// `(1/2, 1/4, 1/4)`, `(1/2, 1/2, 0)`, `(1/2, 0, 1/2)`, and the
/// incentive-compatible menu that holds every type to her outside option.
pub fn three_type_example() -> (MultiMarket, MultiMenu) {
    let mkt = MultiMarket::from_integers(&[1, 3, 4]).unwrap();
    let types = vec![
        SimplexType::new(vec![rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap(),
        SimplexType::new(vec![rat(1, 2), rat(1, 2), rat(0, 1)]).unwrap(),
        SimplexType::new(vec![rat(1, 2), rat(0, 1), rat(1, 2)]).unwrap(),
    ];
    let shared = RationalSignal::new(vec![
        vec![rat(1, 1), rat(0, 1)],
        vec![rat(1, 2), rat(1, 2)],
        vec![rat(1, 2), rat(1, 2)],
    ])
    .unwrap();
    let third = RationalSignal::new(vec![
        vec![rat(1, 1), rat(0, 1)],
        vec![rat(2, 3), rat(1, 3)],
        vec![rat(1, 3), rat(2, 3)],
    ])
    .unwrap();
    let menu = MultiMenu::new(
        types,
        vec![rat(1, 3), rat(1, 3), rat(1, 3)],
        vec![shared.clone(), shared, third],
    )
    .unwrap();
    (mkt, menu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> (MultiMarket, MultiMenu) {
        three_type_example()
    }

    #[test]
    fn posterior_examples() {
        let (mkt, menu) = example();
        let _ = mkt;
        let theta1 = &menu.types[0];
        // Realization 1 of the minimizing signal: normalize (1/2, 1/8, 1/12).
        let sig = RationalSignal::new(vec![
            vec![rat(1, 1), rat(0, 1)],
            vec![rat(1, 2), rat(1, 2)],
            vec![rat(1, 3), rat(2, 3)],
        ])
        .unwrap();
        let post = posterior_many(theta1, &sig, 0).unwrap();
        assert_eq!(post.probs(), &[rat(12, 17), rat(3, 17), rat(2, 17)]);

        let uninformative = RationalSignal::uninformative(3);
        let post = posterior_many(theta1, &uninformative, 0).unwrap();
        assert_eq!(post.probs(), theta1.probs());

        let full = RationalSignal::fully_informative(3);
        let post = posterior_many(theta1, &full, 2).unwrap();
        assert_eq!(post.probs(), &[rat(0, 1), rat(0, 1), rat(1, 1)]);

        // A type with no mass on v3 cannot see the revealing realization.
        let theta2 = &menu.types[1];
        assert!(matches!(
            posterior_many(theta2, &full, 2),
            Err(Error::ZeroProbabilityRealization(2))
        ));
    }

    #[test]
    fn pricing_examples() {
        let (mkt, menu) = example();
        let (k, profit) = optimal_price_many(&menu.types[0], &mkt, PriceTie::Lowest);
        assert_eq!(k, 1);
        assert_eq!(profit, rat(3, 2));

        let (k, profit) = optimal_price_many(&menu.types[2], &mkt, PriceTie::Lowest);
        assert_eq!(k, 2);
        assert_eq!(profit, rat(2, 1));

        let unit = SimplexType::new(vec![rat(1, 1), rat(0, 1), rat(0, 1)]).unwrap();
        let (k, profit) = optimal_price_many(&unit, &mkt, PriceTie::Lowest);
        assert_eq!(k, 0);
        assert_eq!(profit, rat(1, 1));
    }

    #[test]
    fn signal_values_and_outside_options() {
        let (mkt, menu) = example();
        // Own menu signals hold every type at her outside option.
        let expected = [rat(3, 2), rat(3, 2), rat(2, 1)];
        for (i, want) in expected.iter().enumerate() {
            assert_eq!(&no_data_profit(&menu.types[i], &mkt), want);
            assert_eq!(
                &type_signal_value(&menu.types[i], &menu.signals[i], &mkt),
                want
            );
        }
        // The minimizing public signal leaves type 1 with exactly 19/12.
        let hat = RationalSignal::new(vec![
            vec![rat(1, 1), rat(0, 1)],
            vec![rat(1, 2), rat(1, 2)],
            vec![rat(1, 3), rat(2, 3)],
        ])
        .unwrap();
        assert_eq!(type_signal_value(&menu.types[0], &hat, &mkt), rat(19, 12));

        let uninformative = RationalSignal::uninformative(3);
        assert_eq!(
            type_signal_value(&menu.types[0], &uninformative, &mkt),
            rat(3, 2)
        );
    }

    #[test]
    fn menu_ic_and_efficiency() {
        let (mkt, menu) = example();
        let rep = menu_ic_check_many(&menu, &mkt);
        assert!(rep.ok, "worst gain {:?}", rep.worst_gain);
        // Deviations tie exactly in this menu.
        assert!(rep.worst_gain.is_zero());
        assert!(efficient_outcome_check(&menu, &mkt, PriceTie::Lowest));

        // Replacing the third signal with full information tempts type 1:
        // full information is worth 1/2 + 3/4 + 1 = 9/4 > 3/2.
        let mut broken = menu.clone();
        broken.signals[2] = RationalSignal::fully_informative(3);
        let rep = menu_ic_check_many(&broken, &mkt);
        assert!(!rep.ok);
        assert_eq!(rep.worst_gain, rat(9, 4) - rat(3, 2));
        assert_eq!(rep.witness, Some((0, 2)));

        // A single shared signal is trivially IC.
        let single = MultiMenu::new(
            menu.types.clone(),
            menu.weights.clone(),
            vec![RationalSignal::uninformative(3); 3],
        )
        .unwrap();
        assert!(menu_ic_check_many(&single, &mkt).ok);
        // ...but not efficient here: the high type prices at 4 and excludes
        // low-value buyers.
        assert!(!efficient_outcome_check(&single, &mkt, PriceTie::Lowest));

        let full = MultiMenu::new(
            menu.types.clone(),
            menu.weights.clone(),
            vec![RationalSignal::fully_informative(3); 3],
        )
        .unwrap();
        assert!(efficient_outcome_check(&full, &mkt, PriceTie::Lowest));
    }

    #[test]
    fn high_tie_breaks_efficiency() {
        // Under the high tie-break an indifferent type walks away from the
        // efficient low price, which is exactly why the low tie is the
        // convention.
        let (mkt, menu) = example();
        assert!(!efficient_outcome_check(&menu, &mkt, PriceTie::Highest));
    }

    #[test]
    fn no_data_buyer_surplus() {
        let (mkt, menu) = example();
        let u0 = buyer_surplus_no_data(&menu.types, &menu.weights, &mkt, PriceTie::Lowest);
        assert_eq!(u0, rat(1, 12));
    }

    #[test]
    fn min_rent_three_type_benchmark() {
        let (mkt, menu) = example();
        let (signal, profit) = min_rent_efficient_public(&mkt, &menu.types, 0).unwrap();
        assert_eq!(profit, rat(19, 12));
        assert!(profit > rat(3, 2), "strict rent above the outside option");
        assert_eq!(signal.rows()[0], vec![rat(1, 1), rat(0, 1)]);
        assert_eq!(signal.rows()[1], vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(signal.rows()[2], vec![rat(1, 3), rat(2, 3)]);
    }

    #[test]
    fn min_rent_perturbed_values() {
        // Values (1,3,5): obedience ratios become pi_L >= 2 pi_M and
        // pi_L >= 4 pi_H, so the optimum is (1, 1/2, 1/4).
        let mkt = MultiMarket::from_integers(&[1, 3, 5]).unwrap();
        let (_, menu) = example();
        let (signal, profit) = min_rent_efficient_public(&mkt, &menu.types, 0).unwrap();
        assert_eq!(signal.rows()[1], vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(signal.rows()[2], vec![rat(1, 4), rat(3, 4)]);

        // Independent oracle: dense grid search over low-price likelihoods.
        let mut best: Option<Rat> = None;
        let steps = 24i64;
        for pm in 0..=steps {
            for ph in 0..=steps {
                let rows = vec![
                    vec![rat(1, 1), rat(0, 1)],
                    vec![rat(pm, steps), Rat::one() - rat(pm, steps)],
                    vec![rat(ph, steps), Rat::one() - rat(ph, steps)],
                ];
                let sig = RationalSignal::new(rows).unwrap();
                let m = MultiMenu::new(
                    menu.types.clone(),
                    menu.weights.clone(),
                    vec![sig.clone(); 3],
                )
                .unwrap();
                if !efficient_outcome_check(&m, &mkt, PriceTie::Lowest) {
                    continue;
                }
                let v = type_signal_value(&menu.types[0], &sig, &mkt);
                if best.as_ref().is_none_or(|b| &v < b) {
                    best = Some(v);
                }
            }
        }
        assert_eq!(best.unwrap(), profit);
        assert_eq!(profit, rat(13, 8));
    }

    #[test]
    fn min_rent_two_value_reduction_matches_flagging() {
        // One type believing H with probability 0.6 in a (1,3) market: the
        // minimizing signal flags the high value at the rate that leaves the
        // type just willing to price low, beta = (Hy - L)/(y (H - L)) at
        // y = 0.6.
        let mkt = MultiMarket::from_integers(&[1, 3]).unwrap();
        let theta = SimplexType::new(vec![rat(2, 5), rat(3, 5)]).unwrap();
        let (signal, _) = min_rent_efficient_public(&mkt, &[theta], 0).unwrap();
        assert_eq!(signal.rows()[0], vec![rat(1, 1), rat(0, 1)]);
        assert_eq!(signal.rows()[1], vec![rat(1, 3), rat(2, 3)]);

        let m = crate::model::MarketPrimitives::new(1.0, 3.0).unwrap();
        let c = crate::uniform::CutoffPair::new(0.0, 0.6, &m).unwrap();
        let flag = crate::uniform::cutoffs_to_signal(&c, &m);
        assert!((flag.beta() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn garbling_never_raises_decision_value() {
        let (mkt, menu) = example();
        // A few hand garblings plus a deterministic family.
        let mut garbles: Vec<Vec<Vec<Rat>>> = vec![
            vec![vec![rat(1, 1), rat(0, 1)], vec![rat(1, 1), rat(0, 1)]], // pool all
            vec![vec![rat(1, 2), rat(1, 2)], vec![rat(0, 1), rat(1, 1)]],
            vec![vec![rat(3, 4), rat(1, 4)], vec![rat(1, 4), rat(3, 4)]],
        ];
        for k in 1..8 {
            garbles.push(vec![
                vec![rat(k, 8), Rat::one() - rat(k, 8)],
                vec![rat(8 - k, 8), rat(k, 8)],
            ]);
        }
        for (theta, sig) in menu.types.iter().zip(&menu.signals) {
            let own = type_signal_value(theta, sig, &mkt);
            for g in &garbles {
                let garbled = sig.garble(g).unwrap();
                let v = type_signal_value(theta, &garbled, &mkt);
                assert!(v <= own, "garbling raised value: {v} > {own}");
            }
        }
    }

    #[test]
    fn public_signal_limitation_grid_search() {
        // The menu's buyer surplus beats every efficient two-realization
        // public signal by at least the minimum rent share of type 1.
        let (mkt, menu) = example();
        let (u_menu, _) = menu_outcome(&menu, &mkt, PriceTie::Lowest);
        assert_eq!(u_menu, rat(7, 12));
        let gap_floor = (rat(19, 12) - rat(3, 2)) * rat(1, 3);

        let steps = 6i64;
        let mut checked = 0;
        for pl in 0..=steps {
            for pm in 0..=steps {
                for ph in 0..=steps {
                    let rows = vec![
                        vec![rat(pl, steps), Rat::one() - rat(pl, steps)],
                        vec![rat(pm, steps), Rat::one() - rat(pm, steps)],
                        vec![rat(ph, steps), Rat::one() - rat(ph, steps)],
                    ];
                    let sig = RationalSignal::new(rows).unwrap();
                    let m = MultiMenu::new(
                        menu.types.clone(),
                        menu.weights.clone(),
                        vec![sig.clone(); 3],
                    )
                    .unwrap();
                    if !efficient_outcome_check(&m, &mkt, PriceTie::Lowest) {
                        continue;
                    }
                    checked += 1;
                    let (u_pub, _) = menu_outcome(&m, &mkt, PriceTie::Lowest);
                    assert!(
                        u_menu.clone() - &u_pub >= gap_floor,
                        "public signal too good: U = {u_pub}"
                    );
                }
            }
        }
        assert!(checked > 0, "grid must contain efficient public signals");
    }

    #[test]
    fn efficient_signals_approach_full_information_near_the_top_type() {
        let mkt = MultiMarket::from_integers(&[1, 3, 4]).unwrap();
        let mut offdiag_prev: Option<Rat> = None;
        for eps in [rat(1, 10), rat(1, 100)] {
            let theta = SimplexType::new(vec![
                eps.clone() * &eps,
                eps.clone(),
                Rat::one() - &eps - eps.clone() * &eps,
            ])
            .unwrap();
            let sig = obedient_efficient_signal(&theta, &mkt).unwrap();
            // Mass off the diagonal dies out as the type concentrates on the
            // top value.
            let mut offdiag = Rat::zero();
            for v in 0..3 {
                for s in 0..3 {
                    if v != s {
                        offdiag += sig.likelihood(v, s);
                    }
                }
            }
            if let Some(prev) = &offdiag_prev {
                assert!(&offdiag < prev, "off-diagonal mass must shrink");
            }
            offdiag_prev = Some(offdiag);
        }
        assert!(offdiag_prev.unwrap() < rat(1, 5));
    }

    #[test]
    fn menu_json_round_trip() {
        let text = r#"{
            "values": [1, 3, 4],
            "types": [
                {"probs": ["1/2", "1/4", "1/4"], "weight": "1/3"},
                {"probs": ["1/2", "1/2", 0], "weight": "1/3"},
                {"probs": ["1/2", 0, "1/2"], "weight": "1/3"}
            ],
            "signals": [
                [[1, 0], ["1/2", "1/2"], ["1/2", "1/2"]],
                [[1, 0], ["1/2", "1/2"], ["1/2", "1/2"]],
                [[1, 0], ["2/3", "1/3"], ["1/3", "2/3"]]
            ]
        }"#;
        let (mkt, menu) = MultiMenu::parse_json(text).unwrap();
        assert_eq!(mkt.len(), 3);
        let rep = menu_ic_check_many(&menu, &mkt);
        assert!(rep.ok);
        assert_eq!(
            buyer_surplus_no_data(&menu.types, &menu.weights, &mkt, PriceTie::Lowest),
            rat(1, 12)
        );
    }
}
