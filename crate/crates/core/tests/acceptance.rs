//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS|FAIL` line to stderr (uncaptured) before asserting.

use std::io::Write;

use conslaw::entropy::{
    change_of_variables_check, entropy_decomposition_check, kruzhkov_certificate, CandidateSolution, CertificateConfig,
    Smooth,
};
use conslaw::fixtures::{fixture, non_entropic_u2, ph_initial, Fixture};
use conslaw::flux::{make_flux_pair, Efficiency, FluxSpec};
use conslaw::grid::{l1_distance, sup_distance, Grid1D, GridFunction};
use conslaw::harness::{estimate_order, run_experiment, run_method, ExperimentConfig, Method, Tolerances, ROUNDOFF_L1};
use conslaw::kinetic::{chi, equilibrium, kinetic_solve, moment, VelocityGrid};
use conslaw::riemann::{check_e_condition, check_lax, chord_speed, rh_speed, OleinikFamily, RiemannProblem};
use conslaw::schemes::{
    godunov_solve, ph_solve, upwind_solve, LevelState, PHConfig, SchemeConfig, SchemeKind, WindPolicy,
};
use conslaw::variational::{characteristics_potential, potential_initial, HopfConvex, Integrand, LaxOleinik};
use conslaw::viscous::{
    check_one_sided_lipschitz, solve_viscous, solve_viscous_trajectory, ViscosityForm, ViscousConfig,
};
use conslaw::FluxPair;

fn report(n: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n:>2}: {verdict} {detail}");
    assert!(pass, "criterion {n} failed: {detail}");
}

fn sci(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", items.join(", "))
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn burgers(domain: (f64, f64)) -> FluxPair {
    make_flux_pair(FluxSpec::Burgers, domain).unwrap()
}

#[test]
fn criterion_01_shock_speeds() {
    let s1 = rh_speed(&RiemannProblem::new(burgers((-1.0, 1.0)), 1.0, -1.0).unwrap()).unwrap();
    let s2 = rh_speed(&RiemannProblem::new(burgers((0.0, 2.0)), 2.0, 0.0).unwrap()).unwrap();
    let gq = make_flux_pair(FluxSpec::GelfandQ, (0.0, 2.0)).unwrap();
    let s3 = rh_speed(&RiemannProblem::new(gq, 2.0, 0.0).unwrap()).unwrap();
    let pass = s1.abs() <= 1e-14 && (s2 - 1.0).abs() <= 1e-14 && (s3 - 4.0 / 3.0).abs() <= 1e-14;
    report(1, pass, &format!("burgers(1,-1)={s1:e} burgers(2,0)={s2} gelfand_q(2,0)={s3}"));
}

#[test]
fn criterion_02_admissibility() {
    let fp = burgers((-2.0, 2.0));
    let good = RiemannProblem::new(fp.clone(), 1.0, -1.0).unwrap();
    let bad = RiemannProblem::new(fp.clone(), -1.0, 1.0).unwrap();
    let accepts = check_lax(&good).unwrap() && check_e_condition(&good, 200).unwrap().0;
    let rejects = !check_lax(&bad).unwrap() && !check_e_condition(&bad, 200).unwrap().0;

    let fam = OleinikFamily { q: 2.0 };
    let mut rh_ok = true;
    let mut e_fails = 0;
    for j in fam.jumps() {
        let rp = RiemannProblem::new(fp.clone(), j.left, j.right).unwrap();
        rh_ok &= (chord_speed(&fp, j.left, j.right).unwrap() - j.speed).abs() <= 1e-14;
        if !check_e_condition(&rp, 200).unwrap().0 {
            e_fails += 1;
        }
    }
    let pass = accepts && rejects && rh_ok && e_fails >= 1;
    report(
        2,
        pass,
        &format!("accept(1,-1)={accepts} reject(-1,1)={rejects} u_2: R-H on all jumps={rh_ok}, E fails on {e_fails}"),
    );
}

/// Snapshots at `t = 0.1, 0.15, ..., 1.0` of one method on one fixture.
fn snapshot_series(f: &Fixture, method: &Method, n_cells: usize) -> CandidateSolution {
    let g = f.grid(n_cells).unwrap();
    let u0 = f.initial_on(g).unwrap();
    let snaps: Vec<GridFunction> =
        (0..19).map(|i| run_method(&f.fp, &u0, method, 0.1 + 0.05 * i as f64).unwrap()).collect();
    CandidateSolution::from_snapshots(snaps).unwrap()
}

#[test]
fn criterion_03_kruzhkov_certificate() {
    let cfg = CertificateConfig::default();
    let mut all_pass = true;
    let mut worst = (String::new(), f64::INFINITY);
    for name in ["burgers_fan", "burgers_shock"] {
        let f = fixture(name).unwrap();
        for m in Method::standard_set() {
            let cand = snapshot_series(&f, &m, 400);
            let cert = kruzhkov_certificate(&f.fp, &cand, &cfg).unwrap();
            let margin = cert.kruzhkov.residual + cert.kruzhkov.tolerance;
            if margin < worst.1 {
                worst = (format!("{name}/{}", m.name()), margin);
            }
            if !cert.pass {
                eprintln!("{name}/{}: {:?}", m.name(), cert);
            }
            all_pass &= cert.pass;
        }
    }
    let u2 = non_entropic_u2((0.1, 1.0)).unwrap();
    let cert = kruzhkov_certificate(&burgers((-1.0, 1.0)), &u2, &cfg).unwrap();
    let u2_rejected = cert.most_negative.residual < -0.01;
    report(
        3,
        all_pass && u2_rejected,
        &format!(
            "14 solver runs pass={all_pass} (smallest margin {:.2e} at {}); u_2 most negative residual {:.4} at k={}",
            worst.1, worst.0, cert.most_negative.residual, cert.most_negative.k
        ),
    );
}

#[test]
fn criterion_04_cross_definition_agreement() {
    let start = std::time::Instant::now();
    let cfg = ExperimentConfig {
        name: "burgers_fan_agreement".into(),
        fixture: Some("burgers_fan".into()),
        flux: None,
        domain: None,
        initial: None,
        x_range: None,
        methods: Method::standard_set(),
        ladder: vec![200, 400, 800],
        times: vec![1.0],
        out_dir: None,
        tolerances: Tolerances { max_pairwise_l1: Some(0.05), require_decreasing: true, ..Default::default() },
    };
    let rep = run_experiment(&cfg).unwrap();
    let finest = rep.slice(800, 1.0).unwrap();
    let max = finest.max_pairwise.unwrap_or(f64::INFINITY);
    let failed: Vec<&str> = rep.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    let secs = start.elapsed().as_secs_f64();
    report(
        4,
        rep.pass && max <= 0.05 && secs <= 300.0,
        &format!(
            "7 methods, max pairwise L1 at n=800 = {max:.4}, {} checks, failed {:?}, errors {:?}, {secs:.1}s",
            rep.checks.len(),
            failed,
            rep.errors
        ),
    );
}

#[test]
fn criterion_05_change_of_variables() {
    let f = fixture("exp_pair_riemann").unwrap();
    let mut visc = vec![];
    let mut godu = vec![];
    let mut bound_ok = true;
    for n in [100, 200, 400] {
        let g = f.grid(n).unwrap();
        let u0 = f.initial_on(g).unwrap();
        visc.push(change_of_variables_check(&f.fp, &u0, &Method::viscous(), 1.0).unwrap());
        let d = change_of_variables_check(&f.fp, &u0, &Method::godunov(), 1.0).unwrap();
        let tv = u0.map(|u| f.fp.eta(u)).total_variation();
        bound_ok &= d <= 2.0 * g.dx() * tv;
        godu.push(d);
    }
    // the two Godunov runs agree to roundoff on every grid; a roundoff-level series counts as decreasing
    let godu_decreasing = strictly_decreasing(&godu) || godu.iter().all(|&d| d <= ROUNDOFF_L1);
    let pass = visc[2] <= 0.05 && godu[2] <= 0.05 && strictly_decreasing(&visc) && godu_decreasing && bound_ok;
    report(5, pass, &format!("viscous {}, godunov {}, godunov <= 2h TV: {bound_ok}", sci(&visc), sci(&godu)));
}

#[test]
fn criterion_06_one_sided_lipschitz() {
    let f = fixture("burgers_fan").unwrap();
    let g = f.grid(1600).unwrap();
    let u0 = f.initial_on(g).unwrap();
    let e = 1.5;
    let mut pass = true;
    let mut slopes = vec![];
    for eps in [1e-2, 5e-3, 2.5e-3] {
        let traj = solve_viscous_trajectory(&f.fp, &u0, &ViscousConfig::new(eps, 1.0), &[0.5, 1.0]).unwrap();
        pass &= check_one_sided_lipschitz(&traj.snapshots, 0.5, e);
        for s in &traj.snapshots {
            slopes.push(conslaw::viscous::max_forward_slope(s) * s.time);
        }
    }
    let worst = slopes.iter().copied().fold(0.0, f64::max);
    report(6, pass, &format!("E = {e}; max over eps, t of t * max u_x = {worst:.4}"));
}

#[test]
fn criterion_07_maximum_principle() {
    let names = [
        "burgers_fan",
        "burgers_shock",
        "oleinik_uq_1",
        "gelfand_forms",
        "gelfand_burgers",
        "exp_pair_riemann",
        "ph_smooth_monotone",
        "smooth_ramp",
    ];
    let mut methods = Method::standard_set();
    methods.push(Method::HopfMonotone { reading: Default::default() });
    // the plain form is undefined where eta' vanishes, so the divergent form covers those fixtures
    methods.push(Method::Viscous { epsilon: None, form: ViscosityForm::Divergent });
    let mut worst: f64 = 0.0;
    let mut outputs = 0;
    let mut skipped = vec![];
    for name in names {
        let f = fixture(name).unwrap();
        let g = f.grid(200).unwrap();
        let u0 = f.initial_on(g).unwrap();
        let (lo, hi) = (u0.min(), u0.max());
        for m in &methods {
            for t in [0.5, 1.0] {
                match run_method(&f.fp, &u0, m, t) {
                    Ok(s) => {
                        outputs += 1;
                        worst = worst.max(lo - s.min()).max(s.max() - hi);
                    }
                    Err(e) => skipped.push(format!("{name}/{}: {e}", m.name())),
                }
            }
        }
    }
    skipped.dedup();
    report(
        7,
        worst <= 1e-8,
        &format!("{outputs} outputs, largest excursion {worst:.2e}; not applicable: {}", skipped.len()),
    );
    for s in skipped {
        eprintln!("  skipped {s}");
    }
}

/// Level system `Phi = 1 + u`, `mu = 0`, levels `-5/h..=5/h`, at `t = 1`.
fn ph_levels(h: f64) -> LevelState {
    let n = (5.0 / h).round() as i64;
    let cfg = PHConfig {
        efficiency: Efficiency::Affine { alpha: 1.0, beta: 1.0 },
        mu: 0.0,
        h,
        n_min: -n,
        n_max: n,
        t_final: 1.0,
    };
    ph_solve(&cfg, &LevelState::from_distribution(&cfg, ph_initial)).unwrap()
}

#[test]
fn criterion_08_ph_convergence() {
    let f = fixture("ph_smooth_monotone").unwrap();
    let hs = [0.04, 0.02, 0.01];
    let mut vs_viscous = vec![];
    let mut vs_exact = vec![];
    for &h in &hs {
        let levels = ph_levels(h);
        let n = levels.values.len();
        // viscous reference on a 4x finer grid whose every 4th node is a level point
        let g = Grid1D::new(-5.0, 5.0, 4 * (n - 1)).unwrap();
        let u0 = GridFunction::from_fn(g, 0.0, ph_initial).unwrap();
        let visc = solve_viscous(&f.fp, &u0, &ViscousConfig::new(0.5 * h, 1.0)).unwrap();
        let mut sup_v: f64 = 0.0;
        let mut sup_e: f64 = 0.0;
        for (k, &u) in levels.values.iter().enumerate() {
            let x = levels.level(k) as f64 * h;
            sup_v = sup_v.max((u - visc.values[4 * k]).abs());
            sup_e = sup_e.max((u - f.exact(1.0, x).unwrap()).abs());
        }
        vs_viscous.push((h, sup_v));
        vs_exact.push((h, sup_e));
    }
    let order = estimate_order(&vs_viscous).unwrap();
    let exact_errs: Vec<f64> = vs_exact.iter().map(|p| p.1).collect();
    let pass = order >= 0.8 && strictly_decreasing(&exact_errs);
    report(
        8,
        pass,
        &format!(
            "sup |u^n - u_eps| = {}, order {order:.3}; vs exact {}",
            sci(&vs_viscous.iter().map(|p| p.1).collect::<Vec<_>>()),
            sci(&exact_errs)
        ),
    );
}

#[test]
fn criterion_09_godunov_equals_upwind_for_level_fluxes() {
    let mut worst: f64 = 0.0;
    for mu in [0.0, 0.5] {
        let fp =
            make_flux_pair(FluxSpec::Ph { efficiency: Efficiency::Affine { alpha: 1.0, beta: 1.0 }, mu }, (0.0, 1.0))
                .unwrap();
        let g = Grid1D::new(-5.0, 5.0, 500).unwrap();
        let u0 = GridFunction::from_fn(g, 0.0, ph_initial).unwrap();
        let up = SchemeConfig::with_cfl(&fp, &u0, 0.9, SchemeKind::Upwind);
        let go = SchemeConfig { scheme: SchemeKind::Godunov, wind: WindPolicy::Strict, ..up };
        let a = upwind_solve(&fp, &u0, &up, 1.0).unwrap();
        let b = godunov_solve(&fp, &u0, &go, 1.0).unwrap();
        worst = worst.max(sup_distance(&a, &b).unwrap());
    }
    report(9, worst <= 1e-12, &format!("max node difference {worst:e} (mu = 0 and 0.5)"));
}

#[test]
fn criterion_10_entropy_decomposition() {
    let d = 1e-2;
    let fns = vec![
        ("u^2", Smooth::new(|u| u * u, |u| 2.0 * u, |_| 2.0)),
        ("e^u", Smooth::new(f64::exp, f64::exp, f64::exp)),
        (
            "smoothed |u-0.3|",
            Smooth::new(
                move |u| ((u - 0.3f64).powi(2) + d * d).sqrt(),
                move |u| (u - 0.3) / ((u - 0.3f64).powi(2) + d * d).sqrt(),
                move |u| d * d / ((u - 0.3f64).powi(2) + d * d).powf(1.5),
            ),
        ),
        ("cosh", Smooth::new(f64::cosh, f64::sinh, f64::cosh)),
        ("u^4", Smooth::new(|u| u.powi(4), |u| 4.0 * u.powi(3), |u| 12.0 * u * u)),
    ];
    let mut worst: f64 = 0.0;
    for (_, phi) in &fns {
        for i in 0..20 {
            let u = -1.0 + (2 * i + 1) as f64 / 20.0;
            let (l, r) = entropy_decomposition_check(phi, (-1.0, 1.0), u).unwrap();
            worst = worst.max((l - r).abs());
        }
    }
    report(10, worst <= 1e-8, &format!("5 functions x 20 samples, max |lhs - rhs| = {worst:.2e}"));
}

#[test]
fn criterion_11_hopf_self_consistency() {
    let ramp = fixture("smooth_ramp").unwrap();
    let g = ramp.grid(600).unwrap();
    let u0 = ramp.initial_on(g).unwrap();
    let pot = potential_initial(&ramp.fp, &u0).unwrap();
    let hopf = HopfConvex::new(&ramp.fp, &pot, 2001).unwrap();
    let mut t0_err: f64 = 0.0;
    for (x, v) in pot.grid().iter().zip(pot.values()) {
        t0_err = t0_err.max((hopf.evaluate(0.0, *x).unwrap().0 - v).abs());
    }
    let potential = hopf.into_potential();
    let mut ramp_err: f64 = 0.0;
    for t in [0.5, 1.0] {
        let u = potential.state_on(&ramp.fp, Grid1D::new(-1.0, 1.0, 200).unwrap(), t).unwrap();
        for (x, v) in u.grid.nodes().iter().zip(&u.values) {
            ramp_err = ramp_err.max((v - x / (1.0 + t)).abs());
        }
    }

    // u0 = -tanh(x) / 2 steepens into a shock only at t = 2
    let fp = burgers((-0.5, 0.5));
    let g = Grid1D::new(-4.0, 4.0, 800).unwrap();
    let w0 = GridFunction::from_fn(g, 0.0, |x| -0.5 * x.tanh()).unwrap();
    let lo = LaxOleinik::new(&fp, &w0, Integrand::Eta).unwrap();
    let mut pre_shock: f64 = 0.0;
    for t in [0.5, 1.0] {
        for i in 0..=20 {
            let x = -2.0 + 0.2 * i as f64;
            let a = lo.potential(t, x).unwrap();
            let b = characteristics_potential(&fp, &w0, t, x).unwrap();
            pre_shock = pre_shock.max((a - b).abs());
        }
    }
    let dx = g.dx();
    let pass = t0_err <= dx * dx && ramp_err <= 5e-3 && pre_shock <= 1e-3;
    report(
        11,
        pass,
        &format!("t=0 potential error {t0_err:.2e} (dx^2 = {:.1e}); |u - x/(1+t)| <= {ramp_err:.2e}; Hopf-Lax vs characteristics {pre_shock:.2e}", dx * dx),
    );
}

#[test]
fn criterion_12_kinetic() {
    let fp = burgers((-1.0, 1.0));
    let vg = VelocityGrid::covering(&fp, 200).unwrap();
    let g = Grid1D::new(-1.0, 1.0, 100).unwrap();
    let samples = GridFunction::from_fn(g, 0.0, |x| x).unwrap();
    let eq = equilibrium(&fp, &samples, &vg).unwrap();
    let m = moment(&eq);
    let moment_err = sup_distance(&m, &samples).unwrap();
    // plain midpoint sampling of chi is accurate to one velocity cell
    let dv = vg.dv();
    let midpoint_err = samples
        .values
        .iter()
        .map(|&u| ((0..vg.n_v).map(|j| chi(u, vg.center(j))).sum::<f64>() * dv - u).abs())
        .fold(0.0, f64::max);

    let mut series = vec![];
    let mut monotone = true;
    for name in ["burgers_shock", "moving_shock"] {
        let f = if name == "moving_shock" {
            Fixture::riemann(name, fp.clone(), 1.0, -0.5, (-2.0, 2.0)).unwrap()
        } else {
            fixture(name).unwrap()
        };
        let g = f.grid(400).unwrap();
        let u0 = f.initial_on(g).unwrap();
        let exact = f.exact_on(g, 1.0).unwrap().unwrap();
        let vg = VelocityGrid::covering(&f.fp, 64).unwrap();
        let errs: Vec<f64> = [1e-2, 3e-3, 1e-3]
            .iter()
            .map(|&eps| l1_distance(&kinetic_solve(&f.fp, &u0, eps, 1.0, &vg).unwrap(), &exact).unwrap())
            .collect();
        monotone &= strictly_decreasing(&errs);
        series.push(format!("{name} {}", sci(&errs)));
    }
    let pass = moment_err <= 1e-12 && midpoint_err <= dv + 1e-12 && monotone;
    report(
        12,
        pass,
        &format!(
            "moment error {moment_err:.1e} (midpoint chi {midpoint_err:.1e} <= dv {dv:.1e}); L1 over eps: {}",
            series.join("; ")
        ),
    );
}
