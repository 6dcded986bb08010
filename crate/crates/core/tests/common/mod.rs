#![allow(dead_code)]

use ghqc::contracts::{
    AsianSpec, AsianStrike, BarrierSpec, Contract, GmwbMode, GmwbSpec, Knockout, Monitoring, OptionKind, TarnSpec,
};
use ghqc::model::Market;
use ghqc::pricers::Discretization;

/// Non-negative Gauss-Hermite abscissas and weights as printed in the
/// published tables, kept as text so the printed precision is known.
pub const HERMITE_TABLES: &[(usize, &[(&str, &str)])] = &[
    (
        5,
        &[
            ("0.0000000000000000", "9.4530872048294168E-01"),
            ("0.9585724646138185", "3.9361932315224096E-01"),
            ("2.0201828704560856", "1.9953242059045910E-02"),
        ],
    ),
    (
        6,
        &[
            ("0.436077411927616", "7.2462959522439219E-01"),
            ("1.33584907401369", "1.5706732032285659E-01"),
            ("2.35060497367449", "4.5300099055088378E-03"),
        ],
    ),
    (
        16,
        &[
            ("0.273481046138152", "5.0792947901661356E-01"),
            ("0.822951449144655", "2.8064745852853262E-01"),
            ("1.38025853919888", "8.3810041398985777E-02"),
            ("1.95178799091625", "1.2880311535509970E-02"),
            ("2.54620215784748", "9.3228400862418017E-04"),
            ("3.17699916197995", "2.7118600925378804E-05"),
            ("3.86944790486012", "2.3209808448652027E-07"),
            ("4.68873893930581", "2.6548074740111637E-10"),
        ],
    ),
];

/// Whether `value` agrees with a printed table entry. Entries with 17
/// significant digits are held to 1e-15 relative, the double-precision
/// floor. Shorter entries must show the printed digits when rounded or
/// truncated to the printed length.
pub fn matches_printed(value: f64, text: &str) -> bool {
    let printed: f64 = text.parse().expect("numeric literal");
    let (mantissa, exponent) = match text.split_once(['E', 'e']) {
        Some((m, e)) => (m, e.parse::<i32>().expect("exponent")),
        None => (text, 0),
    };
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    if digits.trim_start_matches('0').len() >= 17 {
        return (value - printed).abs() <= 1e-15 * printed.abs();
    }
    let decimals = mantissa.split_once('.').map_or(0, |(_, f)| f.len()) as i32;
    let unit = 10f64.powi(exponent - decimals);
    let d = value.abs() - printed.abs();
    d >= -0.5 * unit && d < unit
}

/// `∫ x^k exp(-x^2) dx` over the real line.
pub fn hermite_moment(k: usize) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let mut m = std::f64::consts::PI.sqrt();
    for j in (2..=k).step_by(2) {
        m *= (j - 1) as f64 / 2.0;
    }
    m
}

pub const ORACLE_SPOT: f64 = 100.0;
pub const ORACLE_PATHS: usize = 1_000_000;
pub const ORACLE_SEED: u64 = 2024;

pub fn oracle_market() -> Market {
    Market::constant(0.05, 0.05, 0.2)
}

/// Path-dependent contracts checked against Monte Carlo, each with a mesh
/// on the wider five-deviation domain.
pub fn oracle_cases() -> Vec<(&'static str, Contract, Discretization)> {
    let monthly: Vec<f64> = (1..=12).map(|k| k as f64 / 12.0).collect();
    let weekly: Vec<f64> = (1..=52).map(|k| k as f64 / 52.0).collect();
    let barrier = |dates: &[f64], lower: f64, upper: Option<f64>, monitoring| BarrierSpec {
        strike: 100.0,
        option: OptionKind::Call,
        monitoring_dates: dates.to_vec(),
        lower: vec![lower],
        upper: upper.into_iter().collect(),
        monitoring,
    };
    vec![
        (
            "asian fixed-strike call",
            Contract::Asian(AsianSpec {
                option: OptionKind::Call,
                fixing_dates: monthly.clone(),
                strike: AsianStrike::Fixed { strike: 100.0 },
            }),
            Discretization::new(400, 120, 6).with_aux(400),
        ),
        (
            "tarn part-gain call",
            Contract::Tarn(TarnSpec {
                strike: 98.0,
                option: OptionKind::Call,
                target: 15.0,
                knockout: Knockout::PartGain,
                fixing_dates: monthly.clone(),
            }),
            Discretization::new(400, 480, 6).with_aux(100),
        ),
        (
            "barrier discrete down-and-out call",
            Contract::Barrier(barrier(&weekly, 90.0, None, Monitoring::Discrete)),
            Discretization::new(400, 520, 6),
        ),
        (
            "barrier continuous down-and-out call",
            Contract::Barrier(barrier(&monthly, 90.0, None, Monitoring::ContinuousSingle)),
            Discretization::new(400, 240, 6),
        ),
        (
            "barrier continuous double knock-out call",
            Contract::Barrier(barrier(&monthly, 80.0, Some(130.0), Monitoring::ContinuousDouble)),
            Discretization::new(400, 240, 6),
        ),
        (
            "gmwb static",
            Contract::Gmwb(GmwbSpec {
                premium: 100.0,
                withdrawal_dates: (1..=10).map(|k| k as f64).collect(),
                amount: 10.0,
                penalty: 0.1,
                fee: 0.01,
                mode: GmwbMode::Static,
            }),
            Discretization::new(400, 200, 6).with_aux(100),
        ),
    ]
    .into_iter()
    .map(|(n, c, d)| (n, c, d.with_width(5.0)))
    .collect()
}

/// Dynamic and static variants of one guarantee.
pub fn gmwb_pair() -> (Contract, Contract) {
    let spec = GmwbSpec {
        premium: 100.0,
        withdrawal_dates: (1..=10).map(|k| k as f64).collect(),
        amount: 10.0,
        penalty: 0.1,
        fee: 0.01,
        mode: GmwbMode::Static,
    };
    let dynamic = GmwbSpec { mode: GmwbMode::Dynamic, ..spec.clone() };
    (Contract::Gmwb(spec), Contract::Gmwb(dynamic))
}
