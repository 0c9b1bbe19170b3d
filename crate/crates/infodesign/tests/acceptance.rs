//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines; every tolerance is pinned here.

use std::time::Instant;

use infodesign::beliefs::TieBreak;
use infodesign::dist::TypeDistribution;
use infodesign::implications::{
    protocol_outcomes, third_party_comparison, Protocol, Regime, SetResolution,
};
use infodesign::manyvalues::{
    self, buyer_surplus_no_data, menu_ic_check_many, min_rent_efficient_public, rat,
    type_signal_value, PriceTie,
};
use infodesign::mechanisms::{
    best_response_threshold, build_public_signal, check_ic, check_structural, mechanism_outcome,
    public_response_outcome,
};
use infodesign::model::{convex_hull, directed_hausdorff, OutcomeSet};
use infodesign::oracle::{
    enumerate_binary_outcomes, enumerate_small_menus, random_ic_mechanism, random_mechanism,
    simulate_game, OracleConfig,
};
use infodesign::payoffs::{baselines, indirect_outcome};
use infodesign::persuasion::{sample_graph, support_value};
use infodesign::uniform::{self, CutoffPair};
use infodesign::{BinarySignal, FiniteSignal, MarketPrimitives, WelfareOutcome};

fn mkt(l: f64, h: f64) -> MarketPrimitives {
    MarketPrimitives::new(l, h).unwrap()
}

fn pass(n: usize, what: &str) {
    println!("ACCEPTANCE {n} PASS: {what}");
}

#[test]
fn criterion_1_uniform_1_3_anchors() {
    let started = Instant::now();
    let m = mkt(1.0, 3.0);
    let d = TypeDistribution::uniform01();

    let b = baselines(&m, &d);
    assert!((b.pi_floor - 5.0 / 3.0).abs() <= 1e-12, "pi_floor {}", b.pi_floor);
    assert!((b.w_bar - 2.0).abs() <= 1e-12, "w_bar {}", b.w_bar);

    let noinfo = indirect_outcome(0.5, &m, &d).unwrap();
    assert!((noinfo.buyer_surplus - 1.0 / 9.0).abs() <= 1e-10);
    assert!((noinfo.seller_profit - 5.0 / 3.0).abs() <= 1e-10);

    // Closed form: flagging rate beta = (H-2L)/(H-L) = 1/2, outcome exact.
    let (sig, opt) = uniform::buyer_optimal(&m);
    assert!((sig.beta() - 0.5).abs() <= 1e-12);
    assert!(sig.is_high_value_flagging(0.0));
    assert!((opt.buyer_surplus - 0.125).abs() <= 1e-12);
    assert!((opt.seller_profit - 1.75).abs() <= 1e-12);

    // Generic solver at grid 2001 / 720 directions within 1e-3.
    let graph = sample_graph(&m, &d, 2001).unwrap();
    let generic = support_value((1.0, 0.0), 0.5, &graph).unwrap();
    assert!(
        generic.outcome.distance(&opt) <= 1e-3,
        "generic buyer-optimal {:?}",
        generic.outcome
    );
    let set = infodesign::persuasion::implementable_set(&m, &d, 2001, 720).unwrap();
    for target in [
        WelfareOutcome::new(0.0, 2.0).unwrap(),
        noinfo,
        WelfareOutcome::new(0.125, 1.75).unwrap(),
    ] {
        let near = set.vertices().iter().any(|v| v.distance(&target) <= 1e-3);
        assert!(near, "boundary misses {target:?}");
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "runtime {:.2}s exceeds 10s",
        elapsed.as_secs_f64()
    );
    pass(1, &format!("benchmark (L=1, H=3) anchors in {:.2}s", elapsed.as_secs_f64()));
}

#[test]
fn criterion_2_uniform_2_3_anchors() {
    let m = mkt(2.0, 3.0);
    let d = TypeDistribution::uniform01();

    let b = baselines(&m, &d);
    assert!((b.pi_floor - 13.0 / 6.0).abs() <= 1e-12);
    assert!((b.w_bar - 2.5).abs() <= 1e-12);

    let (sig, opt) = uniform::buyer_optimal(&m);
    assert!(sig.is_uninformative(0.0), "buyer-optimal must be no info");
    let noinfo = indirect_outcome(0.5, &m, &d).unwrap();
    assert!(opt.distance(&noinfo) <= 1e-12);
    assert!((opt.buyer_surplus - 2.0 / 9.0).abs() <= 1e-12);
    assert!((opt.seller_profit - 13.0 / 6.0).abs() <= 1e-12);

    // Every two-realization signal on the 0.02 grid leaves U at or below
    // the no-information level.
    let cfg = OracleConfig::new(0.02, 2, 7, 100).unwrap();
    let cloud = enumerate_binary_outcomes(&m, &d, &cfg).unwrap();
    let max_u = cloud
        .iter()
        .map(|(_, o)| o.buyer_surplus)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(max_u <= 2.0 / 9.0 + 1e-9, "max U {max_u}");
    pass(2, "benchmark (L=2, H=3) anchors; no signal beats no-information for the buyer");
}

#[test]
fn criterion_3_uniform_1_2_anchors() {
    let m = mkt(1.0, 2.0);
    let d = TypeDistribution::uniform01();
    let b = baselines(&m, &d);
    assert!((b.pi_floor - 1.25).abs() <= 1e-12);
    assert!((b.w_bar - 1.5).abs() <= 1e-12);
    assert!((b.w_bar - b.pi_floor - 0.25).abs() <= 1e-12);

    // Boundary terminus: the buyer-optimal end of both flagging families.
    let (_, opt) = uniform::buyer_optimal(&m);
    let target = WelfareOutcome::new(0.125, 1.25).unwrap();
    assert!(opt.distance(&target) <= 1e-3);
    let polyline = uniform::boundary_polyline(&m, 400);
    let near = polyline.iter().any(|v| v.distance(&target) <= 1e-3);
    assert!(near, "closed-form boundary misses the terminus");
    pass(3, "benchmark (L=1, H=2) anchors and boundary terminus");
}

#[test]
fn criterion_4_many_values_example() {
    let (mkt, menu) = manyvalues::three_type_example();
    let u0 = buyer_surplus_no_data(&menu.types, &menu.weights, &mkt, PriceTie::Lowest);
    assert_eq!(u0, rat(1, 12), "U0 must equal 1/12 exactly");

    let ic = menu_ic_check_many(&menu, &mkt);
    assert!(ic.ok, "menu IC violated: {:?}", ic.worst_gain);
    assert!(
        ic.worst_gain <= rat(0, 1),
        "strict violations forbidden (ties permitted)"
    );

    let expected = [rat(3, 2), rat(3, 2), rat(2, 1)];
    for (i, want) in expected.iter().enumerate() {
        let got = type_signal_value(&menu.types[i], &menu.signals[i], &mkt);
        assert_eq!(&got, want, "type {i} profit");
    }

    let (_, profit) = min_rent_efficient_public(&mkt, &menu.types, 0).unwrap();
    assert_eq!(profit, rat(19, 12), "min-rent profit must be 19/12 exactly");
    assert!(profit > rat(3, 2), "rent must be strictly positive");
    pass(4, "three-type example: U0 = 1/12, profits (3/2, 3/2, 2), min rent 19/12");
}

#[test]
fn criterion_5_public_signal_replication() {
    let m = mkt(1.0, 3.0);
    // 100 random incentive-compatible mechanisms on grids of <= 6 types.
    for i in 0..100 {
        let mech = random_ic_mechanism(20_240_501, i, 6, &m);
        let sig = build_public_signal(&mech, &m).unwrap();
        let types = mech.grid().to_vec();
        let weights = vec![1.0 / types.len() as f64; types.len()];
        for (k, &theta) in types.iter().enumerate() {
            let resp = best_response_threshold(theta, &sig, &m);
            let (a, b) = mech.item(k);
            assert!(
                (resp.profile.0 - a).abs() <= 1e-9 && (resp.profile.1 - b).abs() <= 1e-9,
                "mechanism {i}: type {theta} replicates ({a},{b}) as {:?}",
                resp.profile
            );
        }
        let direct = mechanism_outcome(&mech, &weights, &m).unwrap();
        let public = public_response_outcome(&sig, &types, &weights, &m).unwrap();
        assert!(
            direct.distance(&public) <= 1e-9,
            "mechanism {i}: outcome gap {}",
            direct.distance(&public)
        );
    }

    // Brute-forced IC menus stay inside the public-signal outcome hull.
    for atoms in [
        vec![(0.2, 0.5), (0.8, 0.5)],
        vec![(0.15, 0.3), (0.5, 0.4), (0.85, 0.3)],
    ] {
        let d = TypeDistribution::discrete_atoms(atoms.clone()).unwrap();
        let menu_cfg = OracleConfig::new(0.1, 2, 11, 100).unwrap();
        let hull_cfg = OracleConfig::new(0.02, 2, 11, 100).unwrap();
        let cloud = enumerate_small_menus(&m, &atoms, &menu_cfg).unwrap();
        let pts: Vec<(f64, f64)> = enumerate_binary_outcomes(&m, &d, &hull_cfg)
            .unwrap()
            .into_iter()
            .map(|(_, o)| (o.buyer_surplus, o.seller_profit))
            .collect();
        let hull = OutcomeSet::new(
            convex_hull(&pts)
                .into_iter()
                .map(|(u, p)| WelfareOutcome {
                    buyer_surplus: u,
                    seller_profit: p,
                })
                .collect(),
            d.mean(),
        )
        .unwrap();
        for o in &cloud {
            assert!(
                hull.contains(o, 0.02),
                "{}-type menu outcome escapes hull: {o:?}",
                atoms.len()
            );
        }
    }
    pass(5, "100 IC mechanisms replicated by public signals; menu clouds inside public hull");
}

#[test]
fn criterion_6_structural_properties_hold_for_ic_mechanisms() {
    let m = mkt(1.0, 3.0);
    let mut checked = 0usize;
    // Constructive generator (sizes 2..=6).
    for i in 0..6000u64 {
        let mech = random_ic_mechanism(777, i, 6, &m);
        assert!(check_ic(&mech, &m).ok);
        let st = check_structural(&mech);
        assert!(
            st.ok(),
            "constructive IC mechanism {i} violates structure: {st:?}"
        );
        checked += 1;
    }
    // Rejection sampling over unconstrained random mechanisms.
    let mut index = 0u64;
    let mut kept = 0usize;
    while kept < 4000 {
        index += 1;
        assert!(index < 3_000_000, "rejection sampling stalled");
        let types = 2 + (index % 2) as usize;
        let mech = random_mechanism(313, index, types);
        if !check_ic(&mech, &m).ok {
            continue;
        }
        let st = check_structural(&mech);
        assert!(st.ok(), "sampled IC mechanism violates structure: {st:?}");
        // Summed IC inequalities order the response slopes
        // alpha*L + beta*(H-L) along the grid.
        for i in 1..mech.len() {
            let (a0, b0) = mech.item(i - 1);
            let (a1, b1) = mech.item(i);
            assert!(
                a1 * m.low() + b1 * m.spread() >= a0 * m.low() + b0 * m.spread() - 1e-12,
                "slope ordering fails on IC mechanism {index}"
            );
        }
        kept += 1;
        checked += 1;
    }
    assert!(checked >= 10_000);
    pass(6, &format!("{checked} random IC mechanisms satisfy monotonicity and relative impact"));
}

#[test]
fn criterion_7_third_party_regimes() {
    let res = SetResolution {
        grid_size: 2001,
        directions: 720,
    };
    let d = TypeDistribution::uniform01();

    let rep = third_party_comparison(&mkt(1.0, 3.0), &d, res).unwrap();
    assert_eq!(rep.regime, Regime::SellerWorseBuyerBetter);
    assert!(rep.uninformed.distance(&WelfareOutcome::new(0.0, 2.0).unwrap()) <= 1e-9);
    assert!(rep.informed.seller_profit < rep.uninformed.seller_profit - 1e-9);
    assert!(rep.informed.buyer_surplus > rep.uninformed.buyer_surplus + 1e-9);

    let rep = third_party_comparison(&mkt(2.0, 3.0), &d, res).unwrap();
    assert_eq!(rep.regime, Regime::SellerBetterBuyerWorse);
    assert!(rep.uninformed.distance(&WelfareOutcome::new(0.5, 2.0).unwrap()) <= 1e-9);
    assert!(rep.informed.seller_profit > rep.uninformed.seller_profit + 1e-9);
    assert!(rep.informed.buyer_surplus < rep.uninformed.buyer_surplus - 1e-9);
    pass(7, "third-party-data regimes classify with the exact uninformed outcomes");
}

#[test]
fn criterion_8_protocol_sets() {
    let m = mkt(1.0, 3.0);
    let d = TypeDistribution::uniform01();
    let res = SetResolution {
        grid_size: 2001,
        directions: 720,
    };

    let cheap = protocol_outcomes(Protocol::CheapTalk, &m, &d, res).unwrap();
    let noinfo = WelfareOutcome::new(1.0 / 9.0, 5.0 / 3.0).unwrap();
    assert!(cheap.outcome.points()[0].distance(&noinfo) <= 1e-10);

    // Voluntary disclosure spans the left boundary (closed form: low-value
    // flagging, x from L/H down to 0 at y = 1).
    let vd = protocol_outcomes(Protocol::VoluntaryDisclosure, &m, &d, res).unwrap();
    let curve: Vec<(f64, f64)> = vd
        .outcome
        .points()
        .iter()
        .map(|o| (o.buyer_surplus, o.seller_profit))
        .collect();
    let left: Vec<(f64, f64)> = (0..=400)
        .map(|i| {
            let x = m.ratio() * (1.0 - i as f64 / 400.0);
            let c = CutoffPair::new(x, 1.0, &m).unwrap();
            let o = uniform::outcome_xy(&c, &m);
            (o.buyer_surplus, o.seller_profit)
        })
        .collect();
    let h = directed_hausdorff(&curve, &left).max(directed_hausdorff(&left, &curve));
    assert!(h <= 2e-3, "disclosure-vs-left-boundary hausdorff {h}");

    // Request-consent with an uninformed buyer: the implementable set cut at
    // U >= 1/9, cross-checked against the closed-form construction (right
    // boundary arc between y = 1/3 and y = 2/3 plus the chord at U = 1/9).
    let rcu = protocol_outcomes(Protocol::RequestConsentUninformed, &m, &d, res).unwrap();
    let got: Vec<(f64, f64)> = rcu
        .outcome
        .points()
        .iter()
        .map(|o| (o.buyer_surplus, o.seller_profit))
        .collect();
    let mut expected: Vec<(f64, f64)> = (0..=400)
        .map(|i| {
            let y = 1.0 / 3.0 + (1.0 / 3.0) * i as f64 / 400.0;
            let c = CutoffPair::new(0.0, y, &m).unwrap();
            let o = uniform::outcome_xy(&c, &m);
            (o.buyer_surplus, o.seller_profit)
        })
        .collect();
    // Chord back down from (1/9, 11/6) to the no-info point.
    for i in 1..100 {
        let t = i as f64 / 100.0;
        expected.push((1.0 / 9.0, 11.0 / 6.0 - t * (11.0 / 6.0 - 5.0 / 3.0)));
    }
    let h = directed_hausdorff(&got, &expected).max(directed_hausdorff(&expected, &got));
    assert!(h <= 2e-3, "request-consent set hausdorff {h}");
    pass(8, "protocol outcome sets match their characterizations");
}

#[test]
fn criterion_9_monte_carlo_concordance() {
    let m = mkt(1.0, 3.0);
    let d = TypeDistribution::uniform01();
    let cfg = OracleConfig::new(0.1, 2, 20_240_817, 1_000_000).unwrap();
    let cases = [
        (BinarySignal::uninformative(), (1.0 / 9.0, 5.0 / 3.0)),
        (BinarySignal::fully_informative(), (0.0, 2.0)),
        (BinarySignal::new(0.0, 0.5).unwrap(), (0.125, 1.75)),
    ];
    for (sig, (u, p)) in cases {
        let fs = FiniteSignal::from_binary(sig);
        let est = simulate_game(&fs, &m, &d, &cfg).unwrap();
        assert!(
            (est.outcome.buyer_surplus - u).abs() <= 3.0 * est.se_buyer.max(1e-9),
            "buyer mean {} vs {u} (se {})",
            est.outcome.buyer_surplus,
            est.se_buyer
        );
        assert!(
            (est.outcome.seller_profit - p).abs() <= 3.0 * est.se_seller.max(1e-9),
            "seller mean {} vs {p} (se {})",
            est.outcome.seller_profit,
            est.se_seller
        );
        // Bit-level determinism per seed.
        let again = simulate_game(&fs, &m, &d, &cfg).unwrap();
        assert_eq!(
            est.outcome.buyer_surplus.to_bits(),
            again.outcome.buyer_surplus.to_bits()
        );
        assert_eq!(
            est.outcome.seller_profit.to_bits(),
            again.outcome.seller_profit.to_bits()
        );
    }
    pass(9, "simulation matches analytic outcomes within 3 standard errors, deterministically");
}

#[test]
fn tie_break_at_indifference_defaults_low() {
    // Shared convention behind the boundary constructions.
    let m = mkt(1.0, 3.0);
    assert_eq!(
        infodesign::beliefs::optimal_price_binary(1.0 / 3.0, &m, TieBreak::Low),
        1.0
    );
}
