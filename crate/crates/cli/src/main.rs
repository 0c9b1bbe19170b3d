//! Command-line front end: surplus-set computation, figure-data emission,
//! mechanism verification, the many-values worked example, protocol reports,
//! and oracle cross-checks.
//!
//! Exit codes: 0 success, 2 configuration or parse failure, 3 solver
//! infeasibility, 4 verification failure, 5 internal error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use infodesign::implications::{
    boundary_export_rows, protocol_outcomes, Protocol, ProtocolReport, SetResolution,
};
use infodesign::manyvalues::{
    buyer_surplus_no_data, efficient_outcome_check, menu_ic_check_many, min_rent_efficient_public,
    no_data_profit, parse_rat, rat, three_type_example, type_signal_value, MultiMarket,
    MultiMenu, PriceTie, Rat,
};
use infodesign::mechanisms::{
    best_response_threshold, build_public_signal, check_ic, check_obedience, check_structural,
    mechanism_outcome, public_response_outcome, DirectMechanism,
};
use infodesign::oracle::{
    enumerate_binary_outcomes, enumerate_small_menus, enumerate_ternary_outcomes, simulate_game,
    OracleConfig,
};
use infodesign::payoffs::{baselines, observable_triangle};
use infodesign::persuasion::{implementable_set, outcome_of_binary_signal};
use infodesign::uniform::{self, CutoffPair};
use infodesign::{BinarySignal, FiniteSignal, MarketPrimitives, TypeDistribution, WelfareOutcome};

#[derive(Parser)]
#[command(name = "infodesign", version, about = "Welfare-outcome solver for data provision to an informed monopolist")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    Low,
    High,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    All,
    CheapTalk,
    VoluntaryDisclosure,
    RequestConsentInformed,
    RequestConsentUninformed,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleCheck {
    PublicContainment,
    MenuContainment,
    Simulate,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the implementable welfare set, triangle, and baselines.
    SurplusSet {
        #[arg(long = "L", default_value_t = 1.0)]
        low: f64,
        #[arg(long = "H", default_value_t = 3.0)]
        high: f64,
        /// Distribution literal: uniform | point:T | atoms:T@W,... | plcdf:T@F,...
        #[arg(long, default_value = "uniform")]
        dist: String,
        #[arg(long, default_value_t = 2001)]
        grid: usize,
        #[arg(long, default_value_t = 720)]
        directions: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Emit per-direction split certificates instead of the summary.
        #[arg(long, default_value_t = false)]
        certificates: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the data behind one of the benchmark figures (1, 2a, 2b, 3).
    Figure {
        id: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a direct mechanism file (CSV: theta,alpha,beta).
    Verify {
        file: PathBuf,
        #[arg(long = "L", default_value_t = 1.0)]
        low: f64,
        #[arg(long = "H", default_value_t = 3.0)]
        high: f64,
    },
    /// Run the three-type benchmark example and its checks.
    ExampleManyValues {
        /// Override the value grid, e.g. 1,3,5 (entries may be p/q).
        #[arg(long)]
        values: Option<String>,
        #[arg(long = "tie-break", value_enum, default_value_t = TieArg::Low)]
        tie_break: TieArg,
        /// Verify a menu file instead of the built-in example.
        #[arg(long)]
        menu: Option<PathBuf>,
    },
    /// Protocol outcome reports as JSON.
    Protocols {
        #[arg(long, value_enum, default_value_t = ProtocolArg::All)]
        protocol: ProtocolArg,
        #[arg(long = "L", default_value_t = 1.0)]
        low: f64,
        #[arg(long = "H", default_value_t = 3.0)]
        high: f64,
        #[arg(long, default_value = "uniform")]
        dist: String,
        #[arg(long, default_value_t = 1001)]
        grid: usize,
        #[arg(long, default_value_t = 360)]
        directions: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force and Monte-Carlo cross-checks, reported as JSON.
    Oracle {
        #[arg(long, value_enum)]
        check: OracleCheck,
        #[arg(long = "L", default_value_t = 1.0)]
        low: f64,
        #[arg(long = "H", default_value_t = 3.0)]
        high: f64,
        #[arg(long, default_value = "uniform")]
        dist: String,
        #[arg(long = "grid-step", default_value_t = 0.05)]
        grid_step: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Config(String),
    Infeasible(String),
    Verification(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Infeasible(_) => 3,
            Failure::Verification(_) => 4,
            Failure::Internal(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m)
            | Failure::Infeasible(m)
            | Failure::Verification(m)
            | Failure::Internal(m) => m,
        }
    }
}

fn config_err(e: infodesign::Error) -> Failure {
    Failure::Config(e.to_string())
}

fn solver_err(e: infodesign::Error) -> Failure {
    use infodesign::Error as E;
    match e {
        E::DegeneratePrior(_)
        | E::InfeasibleConstraints(_)
        | E::NoEfficientSignalFound(_)
        | E::BoundaryCase
        | E::NotFullSupport(_) => Failure::Infeasible(e.to_string()),
        E::NotIncentiveCompatible(_) => Failure::Verification(e.to_string()),
        E::InvalidConfig(_) | E::InvalidMarket(_) | E::InvalidDistribution(_) => {
            Failure::Config(e.to_string())
        }
        other => Failure::Internal(other.to_string()),
    }
}

/// Parses the distribution literal syntax: `uniform`, `point:0.3`,
/// `atoms:0.2@0.5,0.8@0.5`, `plcdf:0@0,0.4@0.7,1@1`.
fn parse_dist(text: &str) -> Result<TypeDistribution, Failure> {
    let text = text.trim();
    if text == "uniform" {
        return Ok(TypeDistribution::uniform01());
    }
    if let Some(rest) = text.strip_prefix("point:") {
        let theta: f64 = rest
            .parse()
            .map_err(|_| Failure::Config(format!("bad point mass '{rest}'")))?;
        return TypeDistribution::point_mass(theta).map_err(config_err);
    }
    let parse_pairs = |body: &str| -> Result<Vec<(f64, f64)>, Failure> {
        body.split(',')
            .map(|entry| {
                let (a, b) = entry
                    .split_once('@')
                    .ok_or_else(|| Failure::Config(format!("expected T@W in '{entry}'")))?;
                let a: f64 = a
                    .trim()
                    .parse()
                    .map_err(|_| Failure::Config(format!("bad number '{a}'")))?;
                let b: f64 = b
                    .trim()
                    .parse()
                    .map_err(|_| Failure::Config(format!("bad number '{b}'")))?;
                Ok((a, b))
            })
            .collect()
    };
    if let Some(rest) = text.strip_prefix("atoms:") {
        return TypeDistribution::discrete_atoms(parse_pairs(rest)?).map_err(config_err);
    }
    if let Some(rest) = text.strip_prefix("plcdf:") {
        return TypeDistribution::piecewise_linear_cdf(parse_pairs(rest)?).map_err(config_err);
    }
    Err(Failure::Config(format!(
        "unknown distribution literal '{text}' (use uniform | point:T | atoms:T@W,... | plcdf:T@F,...)"
    )))
}

fn emit(out: Option<&PathBuf>, contents: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, contents)
            .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn push_point(buf: &mut String, which: &str, label: &str, o: &WelfareOutcome) {
    let _ = writeln!(buf, "{which},{label},{},{}", o.buyer_surplus, o.seller_profit);
}

#[allow(clippy::too_many_arguments)]
fn run_surplus_set(
    low: f64,
    high: f64,
    dist: &str,
    grid: usize,
    directions: usize,
    format: Format,
    certificates: bool,
    out: Option<&PathBuf>,
) -> Result<(), Failure> {
    let mkt = MarketPrimitives::new(low, high).map_err(config_err)?;
    let dist = parse_dist(dist)?;
    let res = SetResolution {
        grid_size: grid,
        directions,
    };
    if certificates {
        let rows = boundary_export_rows(&mkt, &dist, res).map_err(solver_err)?;
        let mut buf = String::from("lambda_u,lambda_pi,U,Pi,mu1,w1,mu2,w2\n");
        for r in rows {
            let _ = writeln!(
                buf,
                "{},{},{},{},{},{},{},{}",
                r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7]
            );
        }
        return emit(out, &buf);
    }
    let set = implementable_set(&mkt, &dist, grid, directions).map_err(solver_err)?;
    let b = baselines(&mkt, &dist);
    let triangle = observable_triangle(&mkt, &dist);
    match format {
        Format::Csv => {
            let mut buf = String::from("which,label,U,Pi\n");
            let _ = writeln!(buf, "baseline,pi_floor,,{}", b.pi_floor);
            let _ = writeln!(buf, "baseline,w_bar,,{}", b.w_bar);
            let _ = writeln!(buf, "baseline,u_noinfo,{},", b.u_noinfo);
            for v in triangle.vertices() {
                push_point(&mut buf, "triangle", "", v);
            }
            for v in set.vertices() {
                push_point(&mut buf, "boundary", "", v);
            }
            emit(out, &buf)
        }
        Format::Json => {
            let value = serde_json::json!({
                "market": {"L": low, "H": high},
                "prior": set.prior(),
                "baselines": {"pi_floor": b.pi_floor, "w_bar": b.w_bar, "u_noinfo": b.u_noinfo},
                "triangle": triangle.vertices(),
                "boundary": set.vertices(),
            });
            emit(out, &format!("{value}\n"))
        }
    }
}

fn figure_market(id: &str) -> Option<(f64, f64)> {
    match id {
        "1" => Some((1.0, 2.0)),
        "2a" => Some((1.0, 3.0)),
        "2b" => Some((2.0, 3.0)),
        "3" => Some((1.0, 3.0)),
        _ => None,
    }
}

fn run_figure(id: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    let (low, high) = figure_market(id)
        .ok_or_else(|| Failure::Config(format!("unknown figure id '{id}' (use 1, 2a, 2b, 3)")))?;
    let mkt = MarketPrimitives::new(low, high).map_err(config_err)?;
    let dist = TypeDistribution::uniform01();
    let mut buf = String::from("which,U,Pi\n");
    let point = |buf: &mut String, which: &str, o: &WelfareOutcome| {
        let _ = writeln!(buf, "{which},{},{}", o.buyer_surplus, o.seller_profit);
    };
    for v in observable_triangle(&mkt, &dist).vertices() {
        point(&mut buf, "triangle", v);
    }
    let n = 200;
    for i in 0..=n {
        let y = mkt.ratio() + (1.0 - mkt.ratio()) * i as f64 / n as f64;
        let c = CutoffPair::new(0.0, y, &mkt).map_err(solver_err)?;
        point(&mut buf, "right_boundary", &uniform::outcome_xy(&c, &mkt));
    }
    for i in 0..=n {
        let x = mkt.ratio() * (1.0 - i as f64 / n as f64);
        let c = CutoffPair::new(x, 1.0, &mkt).map_err(solver_err)?;
        point(&mut buf, "left_boundary", &uniform::outcome_xy(&c, &mkt));
    }
    point(&mut buf, "no_info", &uniform::no_info_outcome(&mkt));
    point(&mut buf, "full_info", &uniform::full_info_outcome(&mkt));
    let (_, opt) = uniform::buyer_optimal(&mkt);
    point(&mut buf, "buyer_optimal", &opt);

    if id == "3" {
        let res = SetResolution {
            grid_size: 1001,
            directions: 360,
        };
        let cheap =
            protocol_outcomes(Protocol::CheapTalk, &mkt, &dist, res).map_err(solver_err)?;
        point(&mut buf, "cheap_talk", &cheap.outcome.points()[0]);
        let vd = protocol_outcomes(Protocol::VoluntaryDisclosure, &mkt, &dist, res)
            .map_err(solver_err)?;
        for o in vd.outcome.points() {
            point(&mut buf, "voluntary_disclosure", &o);
        }
        let rcu = protocol_outcomes(Protocol::RequestConsentUninformed, &mkt, &dist, res)
            .map_err(solver_err)?;
        for o in rcu.outcome.points() {
            point(&mut buf, "request_consent_uninformed", &o);
        }
    }
    emit(out, &buf)
}

fn run_verify(file: &PathBuf, low: f64, high: f64) -> Result<(), Failure> {
    let mkt = MarketPrimitives::new(low, high).map_err(config_err)?;
    let text = std::fs::read_to_string(file)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", file.display())))?;
    let mech = DirectMechanism::parse_csv(&text).map_err(config_err)?;

    // Structural first: it names the most specific defect (a non-monotone
    // mechanism always also fails IC).
    let st = check_structural(&mech);
    if !st.monotone {
        return Err(Failure::Verification(format!(
            "monotonicity fails at grid index {:?}",
            st.monotone_witness
        )));
    }
    if !st.relative_impact {
        return Err(Failure::Verification(format!(
            "relative impact fails at triple {:?}",
            st.relative_impact_witness
        )));
    }
    let ic = check_ic(&mech, &mkt);
    if !ic.ok {
        return Err(Failure::Verification(format!(
            "incentive compatibility fails: gain {} at {:?}",
            ic.worst_violation, ic.witness
        )));
    }
    let ob = check_obedience(&mech, &mkt);
    if !ob.ok {
        return Err(Failure::Verification(format!(
            "obedience fails: gain {} at type {:?}",
            ob.worst_violation, ob.witness
        )));
    }
    let sig = build_public_signal(&mech, &mkt)
        .map_err(|e| Failure::Verification(format!("public signal construction: {e}")))?;
    let types = mech.grid().to_vec();
    let weights = vec![1.0 / types.len() as f64; types.len()];
    for (k, &theta) in types.iter().enumerate() {
        let resp = best_response_threshold(theta, &sig, &mkt);
        let (a, b) = mech.item(k);
        if (resp.profile.0 - a).abs() > 1e-9 || (resp.profile.1 - b).abs() > 1e-9 {
            return Err(Failure::Verification(format!(
                "replication fails for type {theta}: ({a}, {b}) vs {:?}",
                resp.profile
            )));
        }
    }
    let direct = mechanism_outcome(&mech, &weights, &mkt).map_err(|e| Failure::Internal(e.to_string()))?;
    let public = public_response_outcome(&sig, &types, &weights, &mkt)
        .map_err(|e| Failure::Internal(e.to_string()))?;
    if direct.distance(&public) > 1e-9 {
        return Err(Failure::Verification(format!(
            "replication outcome gap {}",
            direct.distance(&public)
        )));
    }
    println!(
        "ok: {} types; IC (worst gain {}), structural, obedience, replication (outcome gap {})",
        mech.len(),
        ic.worst_violation,
        direct.distance(&public)
    );
    println!(
        "outcome under equal type weights: U = {}, Pi = {}",
        direct.buyer_surplus, direct.seller_profit
    );
    Ok(())
}

fn parse_values(text: &str) -> Result<Vec<Rat>, Failure> {
    text.split(',')
        .map(|s| parse_rat(s).map_err(|e| Failure::Config(e.to_string())))
        .collect()
}

fn run_example_many_values(
    values: Option<&str>,
    tie: TieArg,
    menu_file: Option<&PathBuf>,
) -> Result<(), Failure> {
    let tie_break = match tie {
        TieArg::Low => PriceTie::Lowest,
        TieArg::High => PriceTie::Highest,
    };
    // Benchmark mode checks the canonical values; a custom value grid is a
    // recomputed report with no pass/fail; a menu file is verified.
    let (mkt, menu, benchmark, verify_menu) = if let Some(path) = menu_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        let (mkt, menu) = MultiMenu::parse_json(&text).map_err(config_err)?;
        (mkt, menu, false, true)
    } else if let Some(vals) = values {
        let mkt = MultiMarket::new(parse_values(vals)?).map_err(config_err)?;
        let (_, menu) = three_type_example();
        (mkt, menu, false, false)
    } else {
        let (mkt, menu) = three_type_example();
        (mkt, menu, true, false)
    };

    println!(
        "values: {}",
        mkt.values()
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    let mut outside = Vec::new();
    for (i, theta) in menu.types.iter().enumerate() {
        let profit = no_data_profit(theta, &mkt);
        println!("type {}: outside option {profit}", i + 1);
        outside.push(profit);
    }
    let u0 = buyer_surplus_no_data(&menu.types, &menu.weights, &mkt, tie_break);
    println!("buyer surplus with no data: {u0}");

    let ic = menu_ic_check_many(&menu, &mkt);
    println!(
        "menu IC: {} (worst deviation gain {})",
        if ic.ok { "ok" } else { "violated" },
        ic.worst_gain
    );
    let efficient = efficient_outcome_check(&menu, &mkt, tie_break);
    println!("menu efficient: {efficient}");
    let mut menu_profits = Vec::new();
    for (i, (theta, sig)) in menu.types.iter().zip(&menu.signals).enumerate() {
        let v = type_signal_value(theta, sig, &mkt);
        println!("type {} menu profit: {v}", i + 1);
        menu_profits.push(v);
    }
    let (signal, min_profit) =
        min_rent_efficient_public(&mkt, &menu.types, 0).map_err(solver_err)?;
    println!("minimizing efficient public signal (low-price likelihood per value):");
    for (v, row) in signal.rows().iter().enumerate() {
        println!("  v{}: {}", v + 1, row[0]);
    }
    println!(
        "type 1 profit under it: {min_profit} vs outside option {}",
        outside[0]
    );

    if benchmark {
        let checks = [
            ("U0 = 1/12", u0 == rat(1, 12)),
            ("menu IC with ties", ic.ok),
            ("menu efficient", efficient),
            (
                "profits (3/2, 3/2, 2)",
                menu_profits == vec![rat(3, 2), rat(3, 2), rat(2, 1)],
            ),
            ("min rent profit 19/12", min_profit == rat(19, 12)),
            ("strictly above 3/2", min_profit > rat(3, 2)),
        ];
        let mut all = true;
        for (name, ok) in checks {
            println!("check {name}: {}", if ok { "pass" } else { "FAIL" });
            all &= ok;
        }
        if !all {
            return Err(Failure::Verification(
                "benchmark example checks failed".into(),
            ));
        }
    } else if verify_menu && (!ic.ok || !efficient) {
        return Err(Failure::Verification(
            "menu fails IC or efficiency under the requested settings".into(),
        ));
    }
    Ok(())
}

fn run_protocols(
    protocol: ProtocolArg,
    low: f64,
    high: f64,
    dist: &str,
    grid: usize,
    directions: usize,
    out: Option<&PathBuf>,
) -> Result<(), Failure> {
    let mkt = MarketPrimitives::new(low, high).map_err(config_err)?;
    let dist = parse_dist(dist)?;
    let res = SetResolution {
        grid_size: grid,
        directions,
    };
    let list: Vec<Protocol> = match protocol {
        ProtocolArg::All => vec![
            Protocol::CheapTalk,
            Protocol::VoluntaryDisclosure,
            Protocol::RequestConsentInformed,
            Protocol::RequestConsentUninformed,
        ],
        ProtocolArg::CheapTalk => vec![Protocol::CheapTalk],
        ProtocolArg::VoluntaryDisclosure => vec![Protocol::VoluntaryDisclosure],
        ProtocolArg::RequestConsentInformed => vec![Protocol::RequestConsentInformed],
        ProtocolArg::RequestConsentUninformed => vec![Protocol::RequestConsentUninformed],
    };
    let mut reports = Vec::new();
    for p in list {
        let result = protocol_outcomes(p, &mkt, &dist, res).map_err(solver_err)?;
        if let Some(w) = &result.warning {
            eprintln!("warning: {}: {w}", p.name());
        }
        reports.push(ProtocolReport::from(&result));
    }
    let text = if reports.len() == 1 {
        serde_json::to_string(&reports[0])
    } else {
        serde_json::to_string(&reports)
    }
    .map_err(|e| Failure::Internal(e.to_string()))?;
    emit(out, &format!("{text}\n"))
}

fn outside_distance(set: &infodesign::OutcomeSet, p: &WelfareOutcome) -> f64 {
    // Smallest slack at which the point is inside.
    if set.contains(p, 0.0) {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while !set.contains(p, hi) {
        hi *= 2.0;
        if hi > 1e6 {
            return hi;
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if set.contains(p, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[allow(clippy::too_many_arguments)]
fn run_oracle(
    check: OracleCheck,
    low: f64,
    high: f64,
    dist_text: &str,
    grid_step: f64,
    seed: u64,
    samples: usize,
    alpha: f64,
    beta: f64,
    out: Option<&PathBuf>,
) -> Result<(), Failure> {
    let mkt = MarketPrimitives::new(low, high).map_err(config_err)?;
    let dist = parse_dist(dist_text)?;
    let cfg = OracleConfig::new(grid_step, 3, seed, samples).map_err(config_err)?;
    let config_echo = serde_json::json!({
        "L": low, "H": high, "dist": dist_text,
        "grid_step": grid_step, "seed": seed, "samples": samples,
    });
    let report = match check {
        OracleCheck::PublicContainment => {
            let set = implementable_set(&mkt, &dist, 2001, 2880).map_err(solver_err)?;
            let mut worst = 0.0_f64;
            for (_, o) in enumerate_binary_outcomes(&mkt, &dist, &cfg).map_err(solver_err)? {
                worst = worst.max(outside_distance(&set, &o));
            }
            for o in enumerate_ternary_outcomes(&mkt, &dist, &cfg).map_err(solver_err)? {
                worst = worst.max(outside_distance(&set, &o));
            }
            serde_json::json!({
                "check": "public-containment",
                "pass": worst <= 1e-6,
                "max_violation": worst,
                "config": config_echo,
            })
        }
        OracleCheck::MenuContainment => {
            let atoms = match &dist {
                TypeDistribution::DiscreteAtoms(a) => a.clone(),
                TypeDistribution::PointMass(t) => vec![(*t, 1.0)],
                _ => {
                    return Err(Failure::Config(
                        "menu-containment needs a discrete atoms distribution".into(),
                    ))
                }
            };
            let menu_cfg = OracleConfig::new(0.1, 2, seed, samples).map_err(config_err)?;
            let cloud = enumerate_small_menus(&mkt, &atoms, &menu_cfg).map_err(solver_err)?;
            let hull_cfg = OracleConfig::new(0.02, 2, seed, samples).map_err(config_err)?;
            let pts: Vec<(f64, f64)> = enumerate_binary_outcomes(&mkt, &dist, &hull_cfg)
                .map_err(solver_err)?
                .into_iter()
                .map(|(_, o)| (o.buyer_surplus, o.seller_profit))
                .collect();
            let hull = infodesign::model::convex_hull(&pts);
            let hull_set = infodesign::OutcomeSet::new(
                hull.into_iter()
                    .map(|(u, p)| WelfareOutcome {
                        buyer_surplus: u,
                        seller_profit: p,
                    })
                    .collect(),
                dist.mean(),
            )
            .map_err(|e| Failure::Internal(e.to_string()))?;
            let mut worst = 0.0_f64;
            for o in &cloud {
                worst = worst.max(outside_distance(&hull_set, o));
            }
            serde_json::json!({
                "check": "menu-containment",
                "pass": worst <= 0.02,
                "max_violation": worst,
                "menus": cloud.len(),
                "config": config_echo,
            })
        }
        OracleCheck::Simulate => {
            let sig = BinarySignal::new(alpha, beta).map_err(config_err)?;
            let analytic = outcome_of_binary_signal(sig, &mkt, &dist).map_err(solver_err)?;
            let est = simulate_game(&FiniteSignal::from_binary(sig), &mkt, &dist, &cfg)
                .map_err(solver_err)?;
            let du = (est.outcome.buyer_surplus - analytic.buyer_surplus).abs();
            let dp = (est.outcome.seller_profit - analytic.seller_profit).abs();
            let pass = du <= 3.0 * est.se_buyer.max(1e-9) && dp <= 3.0 * est.se_seller.max(1e-9);
            serde_json::json!({
                "check": "simulate",
                "pass": pass,
                "max_violation": du.max(dp),
                "estimate": est.outcome,
                "analytic": analytic,
                "se": {"U": est.se_buyer, "Pi": est.se_seller},
                "config": config_echo,
            })
        }
    };
    let pass = report["pass"].as_bool().unwrap_or(false);
    emit(out, &format!("{report}\n"))?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Verification("oracle check failed".into()))
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::SurplusSet {
            low,
            high,
            dist,
            grid,
            directions,
            format,
            certificates,
            out,
        } => run_surplus_set(
            low,
            high,
            &dist,
            grid,
            directions,
            format,
            certificates,
            out.as_ref(),
        ),
        Cmd::Figure { id, out } => run_figure(&id, out.as_ref()),
        Cmd::Verify { file, low, high } => run_verify(&file, low, high),
        Cmd::ExampleManyValues {
            values,
            tie_break,
            menu,
        } => run_example_many_values(values.as_deref(), tie_break, menu.as_ref()),
        Cmd::Protocols {
            protocol,
            low,
            high,
            dist,
            grid,
            directions,
            out,
        } => run_protocols(protocol, low, high, &dist, grid, directions, out.as_ref()),
        Cmd::Oracle {
            check,
            low,
            high,
            dist,
            grid_step,
            seed,
            samples,
            alpha,
            beta,
            out,
        } => run_oracle(
            check,
            low,
            high,
            &dist,
            grid_step,
            seed,
            samples,
            alpha,
            beta,
            out.as_ref(),
        ),
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("INFODESIGN_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
