mod common;

use ghqc::bench::rrmse;
use ghqc::contracts::{asian_jump, gmwb_jump, tarn_jump, AuxGrid, GmwbMode, GmwbSpec, Knockout, OptionKind, TarnSpec};
use ghqc::engine::{build_operator, step_direct, StepQuadrature};
use ghqc::linalg::solve_tridiagonal;
use ghqc::model::{SpatialGrid, StepTransition};
use ghqc::quadrature::GaussHermiteRule;
use ghqc::spline::{eval_lagrange4, Spline, SplineMode, UniformKnots};
use proptest::prelude::*;

use common::hermite_moment;

fn step_setup(intervals: usize, vol: f64, dt: f64, drift: f64, q: usize) -> (SpatialGrid, StepQuadrature) {
    let grid = SpatialGrid::new(100.0, -1.5, 1.6, intervals).unwrap();
    let rule = GaussHermiteRule::new(q).unwrap();
    let quad = StepQuadrature::gauss_hermite(&rule, &StepTransition::new(drift, 0.03, vol, dt));
    (grid, quad)
}

fn values_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn operator_apply_equals_direct_step(
        (intervals, values) in (20usize..160).prop_flat_map(|m| (Just(m), values_strategy(m + 1))),
        vol in 0.05f64..0.8,
        dt in 0.001f64..0.5,
        drift in -0.1f64..0.1,
        q in prop::sample::select(vec![3usize, 5, 6, 16]),
    ) {
        let (grid, quad) = step_setup(intervals, vol, dt, drift, q);
        let op = build_operator(&grid, &quad).unwrap();
        let fast = op.apply(&values).unwrap();
        let direct = step_direct(&values, &grid, &quad, SplineMode::FastCentral).unwrap();
        for (a, b) in fast.iter().zip(&direct) {
            prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn operator_is_linear(
        (u, v) in values_strategy(81).prop_flat_map(|u| (Just(u), values_strategy(81))),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let (grid, quad) = step_setup(80, 0.3, 0.05, 0.01, 5);
        let op = build_operator(&grid, &quad).unwrap();
        let mix: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let lhs = op.apply(&mix).unwrap();
        let (hu, hv) = (op.apply(&u).unwrap(), op.apply(&v).unwrap());
        for m in 0..lhs.len() {
            let rhs = a * hu[m] + b * hv[m];
            let scale = (a * hu[m]).abs() + (b * hv[m]).abs() + 1.0;
            prop_assert!((lhs[m] - rhs).abs() < 1e-13 * scale * 10.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn fast_spline_equals_lagrange_on_interior_intervals(
        (intervals, values) in (4usize..120).prop_flat_map(|m| (Just(m), prop::collection::vec(-1.0f64..1.0, m + 1))),
        x0 in -5.0f64..5.0,
        dx in 0.01f64..1.0,
        t in 0.0f64..1.0,
    ) {
        let knots = UniformKnots::new(x0, dx, intervals).unwrap();
        let xs: Vec<f64> = (0..knots.len()).map(|j| knots.knot(j)).collect();
        let spline = Spline::fit_fast_uniform(knots, &values).unwrap();
        let x = xs[1] + t * (xs[intervals - 1] - xs[1]);
        let lag = eval_lagrange4(&xs, &values, x).unwrap();
        prop_assert!((spline.eval(x) - lag).abs() < 1e-12);
    }

    #[test]
    fn full_spline_reproduces_affine_data(
        intervals in 3usize..200,
        slope in -2.0f64..2.0,
        offset in -2.0f64..2.0,
        t in 0.0f64..1.0,
    ) {
        let knots = UniformKnots::new(-1.0, 2.0 / intervals as f64, intervals).unwrap();
        let values: Vec<f64> = (0..knots.len()).map(|j| offset + slope * knots.knot(j)).collect();
        let spline = Spline::fit_uniform(SplineMode::Full, knots, &values).unwrap();
        let x = -1.0 + 2.0 * t;
        prop_assert!((spline.eval(x) - (offset + slope * x)).abs() < 1e-13);
    }

    #[test]
    fn thomas_residual_is_small(
        (n, data) in (3usize..60).prop_flat_map(|n| (Just(n), prop::collection::vec((0.1f64..1.0, 0.1f64..1.0, -1.0f64..1.0), n))),
    ) {
        let lower: Vec<f64> = data.iter().map(|d| d.0).collect();
        let upper: Vec<f64> = data.iter().map(|d| d.1).collect();
        let diag: Vec<f64> = data.iter().map(|d| 2.5 + d.0 + d.1).collect();
        let rhs: Vec<f64> = data.iter().map(|d| d.2).collect();
        let x = solve_tridiagonal(&lower, &diag, &upper, &rhs).unwrap();
        for i in 0..n {
            let mut r = diag[i] * x[i] - rhs[i];
            if i > 0 { r += lower[i] * x[i - 1]; }
            if i + 1 < n { r += upper[i] * x[i + 1]; }
            prop_assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_hermite_is_exact_for_degree_2q_minus_1(
        q in prop::sample::select(vec![3usize, 5, 6, 16]),
        coeffs in prop::collection::vec(-1.0f64..1.0, 32),
    ) {
        let rule = GaussHermiteRule::new(q).unwrap();
        let c = &coeffs[..2 * q];
        let poly = |x: f64| c.iter().rev().fold(0.0, |acc, k| acc * x + k);
        let exact: f64 = c.iter().enumerate().map(|(k, ck)| ck * hermite_moment(k)).sum();
        let scale: f64 = c.iter().enumerate().map(|(k, ck)| (ck * hermite_moment(k)).abs()).sum();
        prop_assert!((rule.integrate(poly) - exact).abs() < 1e-11 * scale);
    }

    #[test]
    fn rrmse_is_scale_invariant(
        pairs in prop::collection::vec((0.5f64..2.0, 0.5f64..2.0), 1..30),
        c in 0.1f64..10.0,
    ) {
        let (e, r): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let es: Vec<f64> = e.iter().map(|v| c * v).collect();
        let rs: Vec<f64> = r.iter().map(|v| c * v).collect();
        prop_assert!((rrmse(&e, &r) - rrmse(&es, &rs)).abs() < 1e-13);
        prop_assert_eq!(rrmse(&r, &r), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn jumps_preserve_non_negativity(
        coeffs in prop::collection::vec((0.0f64..5.0, 0.0f64..5.0), 41),
        count in 1usize..12,
        target in 0.5f64..5.0,
        knockout in prop::sample::select(vec![Knockout::FullGain, Knockout::PartGain, Knockout::NoGain]),
    ) {
        let grid = SpatialGrid::new(1.0, -0.5, 0.5, 40).unwrap();
        // Affine in the aux level with non-negative coefficients, so the
        // interpolated values are non-negative too.
        let surface_on = |aux: &AuxGrid| -> Vec<Vec<f64>> {
            let span = aux.hi() - aux.lo();
            aux.levels().iter().map(|l| coeffs.iter().map(|(a, b)| a + b * (l - aux.lo()) / span).collect()).collect()
        };
        let aux = AuxGrid::new(grid.s(0), grid.s(40), 20).unwrap();
        let (asian, _) = asian_jump(&surface_on(&aux), &aux, &grid, count).unwrap();
        prop_assert!(asian.iter().flatten().all(|v| *v >= -1e-12));

        let tarn = TarnSpec { strike: 1.0, option: OptionKind::Call, target, knockout, fixing_dates: vec![1.0] };
        let aux = AuxGrid::new(0.0, target, 20).unwrap();
        prop_assert!(tarn_jump(&surface_on(&aux), &aux, &grid, &tarn).iter().flatten().all(|v| *v >= -1e-12));

        let gmwb = GmwbSpec { premium: 1.0, withdrawal_dates: vec![0.5, 1.0], amount: 0.5, penalty: 0.1, fee: 0.0, mode: GmwbMode::Dynamic };
        let aux = AuxGrid::new(0.0, 1.0, 20).unwrap();
        let zero = vec![0.0; aux.len()];
        let (s, z) = gmwb_jump(&surface_on(&aux), &zero, &aux, &grid, &gmwb);
        prop_assert!(s.iter().flatten().chain(&z).all(|v| *v >= -1e-12));
    }
}
