mod common;

use ghqc::bench::{run_suite, Suite};
use ghqc::contracts::{BarrierSpec, Contract, Knockout, Monitoring, OptionKind, TarnSpec, VanillaSpec};
use ghqc::engine::{BackwardStep, GhqcStepper, WeightScheme};
use ghqc::model::{build_grid, Market, MarketParams, TimeGrid};
use ghqc::oracles::{closed_form_european, mc_price, McConfig};
use ghqc::pricers::{price, Discretization, PricingRequest, Scheme};
use ghqc::quadrature::GaussHermiteRule;
use ghqc::spline::SplineMode;

use common::{gmwb_pair, oracle_cases, oracle_market, ORACLE_PATHS, ORACLE_SEED, ORACLE_SPOT};

fn ghqc(contract: Contract, market: &Market, spot: f64, disc: Discretization) -> f64 {
    price(&PricingRequest::new(contract, market.clone(), spot, disc)).unwrap().price
}

#[test]
fn european_prices_match_closed_form() {
    let runs = [
        (OptionKind::Put, 36.0, 40.0, 0.06, 0.06, 0.2, 1.0),
        (OptionKind::Put, 44.0, 40.0, 0.06, 0.06, 0.4, 2.0),
        (OptionKind::Call, 100.0, 100.0, 0.04, 0.07, 0.4, 3.0),
        (OptionKind::Call, 1.05, 1.0, 0.0, 0.0, 0.2, 1.5),
    ];
    for (option, spot, strike, drift, rate, vol, t) in runs {
        let c = Contract::Vanilla(VanillaSpec::european(option, strike, t));
        let p = ghqc(c, &Market::constant(drift, rate, vol), spot, Discretization::new(500, 500, 16).with_width(5.0));
        let cf = closed_form_european(spot, strike, option, drift, rate, vol, t).unwrap();
        assert!(((p - cf) / cf).abs() < 2e-4, "{option:?} S={spot}: {p} vs {cf}");
    }
}

#[test]
fn path_dependent_prices_agree_with_monte_carlo() {
    let market = oracle_market();
    for (name, contract, disc) in oracle_cases() {
        let g = ghqc(contract.clone(), &market, ORACLE_SPOT, disc);
        let mc = mc_price(&contract, &market, ORACLE_SPOT, &McConfig::new(ORACLE_PATHS, ORACLE_SEED)).unwrap();
        let z = (g - mc.price) / mc.std_error;
        assert!(z.abs() <= 3.0, "{name}: {g} vs {} ± {}", mc.price, mc.std_error);
    }
}

#[test]
fn barrier_without_levels_is_the_european_price() {
    let market = Market::constant(0.05, 0.05, 0.25);
    let dates: Vec<f64> = (1..=12).map(|k| k as f64 / 12.0).collect();
    let disc = Discretization::new(300, 120, 6);
    for monitoring in [Monitoring::Discrete, Monitoring::ContinuousSingle] {
        let barrier = BarrierSpec {
            strike: 100.0,
            option: OptionKind::Call,
            monitoring_dates: dates.clone(),
            lower: vec![],
            upper: vec![f64::INFINITY],
            monitoring,
        };
        let b = ghqc(Contract::Barrier(barrier), &market, 100.0, disc.clone());
        let e =
            ghqc(Contract::Vanilla(VanillaSpec::european(OptionKind::Call, 100.0, 1.0)), &market, 100.0, disc.clone());
        assert!((b - e).abs() < 1e-12, "{monitoring:?}: {b} vs {e}");
    }
}

#[test]
fn tarn_knockout_types_are_ordered() {
    let r = run_suite(Suite::Table3, &Suite::Table3.default_discretization(Scheme::Ghqc)).unwrap();
    let by = |k: Knockout| -> Vec<(f64, f64)> {
        r.cases
            .iter()
            .filter_map(|c| match &c.case.contract {
                Contract::Tarn(t) if t.knockout == k => Some((t.target, c.price)),
                _ => None,
            })
            .collect()
    };
    let (full, part, none) = (by(Knockout::FullGain), by(Knockout::PartGain), by(Knockout::NoGain));
    assert_eq!(full.len(), 4);
    for ((f, p), n) in full.iter().zip(&part).zip(&none) {
        assert_eq!(f.0, p.0);
        assert_eq!(f.0, n.0);
        assert!(f.1 >= p.1 && p.1 >= n.1, "U={}: {} {} {}", f.0, f.1, p.1, n.1);
    }
    for series in [&full, &part, &none] {
        assert!(series.windows(2).all(|w| w[1].1 >= w[0].1), "not increasing in target: {series:?}");
    }
}

#[test]
fn early_exercise_rights_are_ordered() {
    let market = Market::constant(0.06, 0.06, 0.3);
    let disc = Discretization::new(300, 500, 6);
    for spot in [36.0, 40.0, 44.0] {
        let p = |spec: VanillaSpec| ghqc(Contract::Vanilla(spec), &market, spot, disc.clone());
        let american = p(VanillaSpec::american(OptionKind::Put, 40.0, 1.0));
        let bermudan = p(VanillaSpec::bermudan(OptionKind::Put, 40.0, 1.0, 10));
        let european = p(VanillaSpec::european(OptionKind::Put, 40.0, 1.0));
        assert!(american >= bermudan && bermudan >= european, "S={spot}: {american} {bermudan} {european}");
    }
}

#[test]
fn dynamic_withdrawals_are_worth_at_least_static() {
    let market = oracle_market();
    let disc = Discretization::new(300, 200, 6).with_aux(100).with_width(5.0);
    let (stat, dynamic) = gmwb_pair();
    let s = ghqc(stat, &market, 100.0, disc.clone());
    let d = ghqc(dynamic, &market, 100.0, disc);
    assert!(d >= s, "{d} vs {s}");
}

#[test]
fn knockout_never_adds_value() {
    let market = oracle_market();
    let european = ghqc(
        Contract::Vanilla(VanillaSpec::european(OptionKind::Call, 100.0, 1.0)),
        &market,
        ORACLE_SPOT,
        Discretization::new(400, 520, 6).with_width(5.0),
    );
    for (name, contract, disc) in oracle_cases() {
        if matches!(contract, Contract::Barrier(_)) {
            let b = ghqc(contract, &market, ORACLE_SPOT, disc);
            assert!(b <= european, "{name}: {b} vs {european}");
        }
    }
}

#[test]
fn discounted_spot_is_a_martingale() {
    let (t, steps) = (1.0, 50);
    let times = TimeGrid::uniform(t, steps).unwrap();
    let params = MarketParams::constant(0.05, 0.05, 0.25, steps).unwrap();
    let grid = build_grid(100.0, &params, &times, 200, 5.0).unwrap();
    let rule = GaussHermiteRule::new(5).unwrap();
    let mut st =
        GhqcStepper::new(grid, params, times, rule, WeightScheme::GaussHermite, SplineMode::FastCentral).unwrap();
    let mut v = grid.asset_values();
    for n in (1..=steps).rev() {
        v = st.step(n, &v).unwrap();
    }
    let x = grid.x_of(100.0);
    let m = ((x - grid.x_min()) / grid.dx()).round() as usize;
    let s = grid.s(m);
    assert!(((v[m] - s) / s).abs() < 1e-5, "{} vs {s}", v[m]);
}

#[test]
fn many_small_steps_match_one_large_step() {
    let t = 1.0;
    let smooth = |x: f64| (-(x - 0.1) * (x - 0.1) / 0.5).exp();
    let run = |steps: usize| {
        let times = TimeGrid::uniform(t, steps).unwrap();
        let params = MarketParams::constant(0.03, 0.05, 0.3, steps).unwrap();
        // Wide enough that a single step keeps every quadrature point inside.
        let grid = build_grid(100.0, &params, &times, 400, 8.0).unwrap();
        let rule = GaussHermiteRule::new(16).unwrap();
        let mut st =
            GhqcStepper::new(grid, params, times, rule, WeightScheme::GaussHermite, SplineMode::FastCentral).unwrap();
        let mut v: Vec<f64> = grid.xs().into_iter().map(smooth).collect();
        for n in (1..=steps).rev() {
            v = st.step(n, &v).unwrap();
        }
        let m = ((grid.x_of(100.0) - grid.x_min()) / grid.dx()).round() as usize;
        v[m]
    };
    let (many, one) = (run(50), run(1));
    assert!(((many - one) / one).abs() < 5e-5, "{many} vs {one}");
}

#[test]
fn monte_carlo_brackets_the_closed_form() {
    let market = Market::constant(0.05, 0.05, 0.2);
    let c = Contract::Vanilla(VanillaSpec::european(OptionKind::Call, 100.0, 1.0));
    let cf = closed_form_european(100.0, 100.0, OptionKind::Call, 0.05, 0.05, 0.2, 1.0).unwrap();
    let inside = (0..20u64)
        .filter(|&seed| {
            let r = mc_price(&c, &market, 100.0, &McConfig::new(20_000, seed)).unwrap();
            (r.price - cf).abs() <= 3.0 * r.std_error
        })
        .count();
    assert!(inside >= 19, "{inside} of 20");
}

#[test]
fn tarn_prices_rise_with_the_target() {
    let market = Market::constant(0.0, 0.0, 0.2);
    let dates: Vec<f64> = (1..=10).map(|k| k as f64 * 30.0 / 365.0).collect();
    let disc = Discretization::new(300, 150, 6).with_aux(50);
    let mut last = 0.0;
    for target in [0.2, 0.4, 0.6, 0.8] {
        let spec = TarnSpec {
            strike: 1.0,
            option: OptionKind::Call,
            target,
            knockout: Knockout::PartGain,
            fixing_dates: dates.clone(),
        };
        let p = ghqc(Contract::Tarn(spec), &market, 1.05, disc.clone());
        assert!(p >= last, "U={target}: {p} < {last}");
        last = p;
    }
}
