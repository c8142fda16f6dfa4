use conslaw::entropy::{
    entropy_decomposition_check, kruzhkov_residual, weak_residual, CandidateSolution, Smooth, TestFunction,
};
use conslaw::harness::{run_method, Method};
use conslaw::kinetic::{equilibrium, moment, VelocityGrid};
use conslaw::riemann::{analyze, solve_riemann_convex, RiemannProblem};
use conslaw::schemes::{godunov_solve, ph_solve, upwind_solve, LevelState, PHConfig, SchemeConfig, SchemeKind};
use conslaw::{make_flux_pair, Efficiency, FluxSpec, Grid1D, GridFunction};
use proptest::prelude::*;

/// Piecewise-linear data through `knots` spread evenly over `[-2, 2]`.
fn data(knots: &[f64], n_cells: usize) -> GridFunction {
    let grid = Grid1D::new(-2.0, 2.0, n_cells).unwrap();
    let m = knots.len() - 1;
    GridFunction::from_fn(grid, 0.0, |x| {
        let s = (x + 2.0) / 4.0 * m as f64;
        let i = (s.floor() as usize).min(m - 1);
        let w = s - i as f64;
        (1.0 - w) * knots[i] + w * knots[i + 1]
    })
    .unwrap()
}

fn knots(lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(lo..hi, 3..8)
}

fn burgers() -> conslaw::FluxPair {
    make_flux_pair(FluxSpec::Burgers, (-1.0, 1.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn burgers_jump_speed_and_admissibility(um in -1.0..1.0f64, up in -1.0..1.0f64) {
        prop_assume!((um - up).abs() > 1e-3);
        let rp = RiemannProblem::new(burgers(), um, up).unwrap();
        let r = analyze(&rp, 200).unwrap();
        prop_assert!((r.speed - 0.5 * (um + up)).abs() < 1e-12);
        prop_assert_eq!(r.satisfies_e, um > up);
        prop_assert_eq!(r.satisfies_lax, um > up);
    }

    #[test]
    fn riemann_profile_is_monotone_between_states(um in -1.0..1.0f64, up in -1.0..1.0f64) {
        let sol = solve_riemann_convex(&RiemannProblem::new(burgers(), um, up).unwrap()).unwrap();
        let xs: Vec<f64> = (0..=200).map(|i| -2.0 + 0.02 * i as f64).collect();
        let us: Vec<f64> = xs.iter().map(|&x| sol.evaluate(1.0, x)).collect();
        let (lo, hi) = (um.min(up), um.max(up));
        prop_assert!(us.iter().all(|&u| u >= lo && u <= hi));
        let sign = (up - um).signum();
        prop_assert!(us.windows(2).all(|w| sign * (w[1] - w[0]) >= 0.0));
    }

    #[test]
    fn schemes_keep_the_data_range(k in knots(-1.0, 1.0), t in 0.05..0.6f64) {
        let fp = burgers();
        let u0 = data(&k, 80);
        for kind in [SchemeKind::Godunov, SchemeKind::Upwind] {
            let mut cfg = SchemeConfig::with_cfl(&fp, &u0, 0.9, kind);
            if kind == SchemeKind::Upwind {
                cfg = cfg.split();
            }
            let u = if kind == SchemeKind::Godunov {
                godunov_solve(&fp, &u0, &cfg, t).unwrap()
            } else {
                upwind_solve(&fp, &u0, &cfg, t).unwrap()
            };
            prop_assert!(u.min() >= u0.min() - 1e-12 && u.max() <= u0.max() + 1e-12);
        }
    }

    #[test]
    fn godunov_is_upwind_for_positive_speeds(k in knots(0.0, 1.0), t in 0.05..0.6f64) {
        let fp = burgers();
        let u0 = data(&k, 60);
        let g = godunov_solve(&fp, &u0, &SchemeConfig::with_cfl(&fp, &u0, 0.9, SchemeKind::Godunov), t).unwrap();
        let u = upwind_solve(&fp, &u0, &SchemeConfig::with_cfl(&fp, &u0, 0.9, SchemeKind::Upwind), t).unwrap();
        prop_assert_eq!(g.values, u.values);
    }

    #[test]
    fn lax_oleinik_stays_in_the_data_range(k in knots(-1.0, 1.0), t in 0.1..1.0f64) {
        let u0 = data(&k, 40);
        let u = run_method(&burgers(), &u0, &Method::LaxOleinik { scan: 128 }, t).unwrap();
        prop_assert!(u.min() >= u0.min() - 1e-9 && u.max() <= u0.max() + 1e-9);
    }

    #[test]
    fn resampling_adds_no_extrema(k in knots(-1.0, 1.0), n in 5usize..200) {
        let u0 = data(&k, 37);
        let r = u0.resample(Grid1D::new(-2.0, 2.0, n).unwrap());
        prop_assert!(r.min() >= u0.min() - 1e-15 && r.max() <= u0.max() + 1e-15);
    }

    #[test]
    fn equilibrium_moment_recovers_the_state(k in knots(-1.0, 1.0), n_v in 8usize..96) {
        let fp = burgers();
        let u0 = data(&k, 30);
        let vg = VelocityGrid::covering(&fp, n_v).unwrap();
        let m = moment(&equilibrium(&fp, &u0, &vg).unwrap());
        for (a, b) in m.values.iter().zip(&u0.values) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_decomposition_identity(c3 in -1.0..1.0f64, c2 in -1.0..1.0f64, s in 0.01..0.99f64) {
        let (a, b) = (-1.5, 2.0);
        let phi = Smooth::new(
            move |u| c3 * u * u * u + c2 * u * u + u.exp(),
            move |u| 3.0 * c3 * u * u + 2.0 * c2 * u + u.exp(),
            move |u| 6.0 * c3 * u + 2.0 * c2 + u.exp(),
        );
        let u = a + s * (b - a);
        let (lhs, rhs) = entropy_decomposition_check(&phi, (a, b), u).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn kruzhkov_above_the_range_is_minus_weak(jump in -0.9..0.9f64, speed in -0.5..0.5f64, ct in 0.4..0.7f64, cx in -0.5..0.5f64) {
        let fp = burgers();
        let cand = CandidateSolution::from_fn(
            move |t, x| if x < speed * t { jump } else { -jump },
            (0.1, 1.0),
            (-2.0, 2.0),
            (-1.0, 1.0),
        )
        .unwrap();
        let tf = TestFunction::new((ct, cx), (0.2, 0.4)).unwrap();
        let w = weak_residual(&fp, &cand, &tf, 48).unwrap();
        let top = kruzhkov_residual(&fp, &cand, &tf, 1.0, 48).unwrap();
        let bottom = kruzhkov_residual(&fp, &cand, &tf, -1.0, 48).unwrap();
        prop_assert!((top + w).abs() < 1e-10);
        prop_assert!((bottom - w).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn level_system_preserves_order_and_bounds(alpha in 0.5..2.0f64, beta in 0.0..1.0f64, mu in 0.0..1.0f64, w in 0.5..3.0f64) {
        let cfg = PHConfig { efficiency: Efficiency::Affine { alpha, beta }, mu, h: 0.25, n_min: -20, n_max: 20, t_final: 1.0 };
        let init = LevelState::from_distribution(&cfg, |x| 0.5 * (1.0 + (x / w).tanh()));
        let out = ph_solve(&cfg, &init).unwrap();
        prop_assert!(out.is_nondecreasing(1e-12));
        prop_assert!(out.values.iter().all(|&u| (-1e-12..=1.0 + 1e-12).contains(&u)));
    }
}
