//! Level dynamics of the enterprise-distribution system
//! `h du^n/dt = -Phi(u^n)(u^n - u^{n-1}) + mu (u^{n+1} - u^n)`, the explicit
//! upwind and Godunov schemes for `eta(u)_t + phi(u)_x = 0`, and empirical
//! convergence tables.

use crate::error::{Error, Result};
use crate::flux::{inverse_monotone, Efficiency, FluxPair};
use crate::grid::{Grid1D, GridFunction};
use crate::numerics::{adaptive_simpson, linspace, log_log_slope};

/// Level system parameters; levels `n_min..=n_max` sit at `x = n h`.
#[derive(Debug, Clone)]
pub struct PHConfig {
    pub efficiency: Efficiency,
    pub mu: f64,
    pub h: f64,
    pub n_min: i64,
    pub n_max: i64,
    pub t_final: f64,
}

impl PHConfig {
    fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) {
            return Err(Error::Invalid(format!("level spacing must be positive, got {}", self.h)));
        }
        if !(self.mu >= 0.0) {
            return Err(Error::Invalid(format!("mu must be >= 0, got {}", self.mu)));
        }
        if self.n_max < self.n_min {
            return Err(Error::Invalid(format!("empty level range {}..={}", self.n_min, self.n_max)));
        }
        if !(self.t_final >= 0.0) {
            return Err(Error::Invalid(format!("t_final must be >= 0, got {}", self.t_final)));
        }
        for u in linspace(0.0, 1.0, 257) {
            let e = self.efficiency.value(u);
            if !(e > 0.0) || !e.is_finite() {
                return Err(Error::Invalid(format!("efficiency must be positive on [0, 1], got {e} at {u}")));
            }
        }
        Ok(())
    }

    pub fn n_levels(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    fn max_efficiency(&self) -> f64 {
        linspace(0.0, 1.0, 257).into_iter().map(|u| self.efficiency.value(u)).fold(0.0, f64::max)
    }
}

/// `u^n` for `n = n_min, n_min + 1, ...` at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelState {
    pub n_min: i64,
    pub values: Vec<f64>,
    pub time: f64,
}

impl LevelState {
    /// `u^n(0) = u0(n h)` for every level of `cfg`.
    pub fn from_distribution<F: Fn(f64) -> f64>(cfg: &PHConfig, u0: F) -> Self {
        let values = (cfg.n_min..=cfg.n_max).map(|n| u0(n as f64 * cfg.h)).collect();
        LevelState { n_min: cfg.n_min, values, time: 0.0 }
    }

    pub fn level(&self, k: usize) -> i64 {
        self.n_min + k as i64
    }

    /// The levels as a function on the grid of points `n h`.
    pub fn to_grid_function(&self, h: f64) -> Result<GridFunction> {
        let n = self.values.len();
        if n < 9 {
            return Err(Error::Invalid(format!("need at least 9 levels for a grid, got {n}")));
        }
        let grid = Grid1D::new(self.n_min as f64 * h, (self.n_min + n as i64 - 1) as f64 * h, n - 1)?;
        GridFunction::new(grid, self.values.clone(), self.time)
    }

    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0] - tol)
    }
}

/// Right-hand side `du^n/dt`; levels outside the range are frozen at 0 (left) and 1 (right).
pub fn ph_rhs(cfg: &PHConfig, state: &LevelState) -> Vec<f64> {
    let mut out = vec![0.0; state.values.len()];
    rhs_into(cfg, &state.values, &mut out);
    out
}

fn rhs_into(cfg: &PHConfig, u: &[f64], out: &mut [f64]) {
    let n = u.len();
    for k in 0..n {
        let left = if k > 0 { u[k - 1] } else { 0.0 };
        let right = if k + 1 < n { u[k + 1] } else { 1.0 };
        out[k] = (-cfg.efficiency.value(u[k]) * (u[k] - left) + cfg.mu * (right - u[k])) / cfg.h;
    }
}

/// Classic RK4 with `dt <= h / (4 (max Phi + mu))`; every stage must stay in
/// `[-1e-8, 1 + 1e-8]`.
pub fn ph_solve(cfg: &PHConfig, initial: &LevelState) -> Result<LevelState> {
    let mut traj = ph_solve_trajectory(cfg, initial, &[cfg.t_final])?;
    Ok(traj.pop().expect("one snapshot"))
}

/// Snapshots of [`ph_solve`] at ascending `times`.
pub fn ph_solve_trajectory(cfg: &PHConfig, initial: &LevelState, times: &[f64]) -> Result<Vec<LevelState>> {
    cfg.validate()?;
    if initial.values.len() != cfg.n_levels() || initial.n_min != cfg.n_min {
        return Err(Error::GridMismatch(format!(
            "state has {} levels from {}, config expects {} from {}",
            initial.values.len(),
            initial.n_min,
            cfg.n_levels(),
            cfg.n_min
        )));
    }
    check_range(initial)?;
    let dt_max = cfg.h / (4.0 * (cfg.max_efficiency() + cfg.mu));
    let n = initial.values.len();
    let mut u = initial.values.clone();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let mut t = initial.time;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        if target < t - 1e-12 {
            return Err(Error::Invalid("snapshot times must be ascending".into()));
        }
        while target - t > 1e-14 * target.max(1.0) {
            let dt = dt_max.min(target - t);
            rhs_into(cfg, &u, &mut k1);
            for i in 0..n {
                tmp[i] = u[i] + 0.5 * dt * k1[i];
            }
            rhs_into(cfg, &tmp, &mut k2);
            for i in 0..n {
                tmp[i] = u[i] + 0.5 * dt * k2[i];
            }
            rhs_into(cfg, &tmp, &mut k3);
            for i in 0..n {
                tmp[i] = u[i] + dt * k3[i];
            }
            rhs_into(cfg, &tmp, &mut k4);
            for i in 0..n {
                u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            t += dt;
            let s = LevelState { n_min: cfg.n_min, values: u.clone(), time: t };
            check_range(&s)?;
        }
        out.push(LevelState { n_min: cfg.n_min, values: u.clone(), time: target });
    }
    Ok(out)
}

fn check_range(s: &LevelState) -> Result<()> {
    for (k, &v) in s.values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("level {} at t = {}", s.level(k), s.time)));
        }
        if !(-1e-8..=1.0 + 1e-8).contains(&v) {
            return Err(Error::RangeEscape { u: v, level: s.level(k), t: s.time });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Upwind,
    Godunov,
}

/// How the upwind scheme treats negative characteristic speeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindPolicy {
    /// One-sided stencil only; negative speeds are an error.
    #[default]
    Strict,
    /// Engquist–Osher flux splitting; reduces to the one-sided stencil when all speeds are >= 0.
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub tau: f64,
    pub h: f64,
    pub scheme: SchemeKind,
    pub wind: WindPolicy,
}

impl SchemeConfig {
    /// Time step `cfl * h / max|a|` over the data range.
    pub fn with_cfl(fp: &FluxPair, u0: &GridFunction, cfl: f64, scheme: SchemeKind) -> Self {
        let h = u0.grid.dx();
        let (lo, hi) = fp.speed_bounds(u0.min(), u0.max());
        let amax = lo.abs().max(hi.abs());
        let tau = if amax > 0.0 { cfl * h / amax } else { h };
        Self { tau, h, scheme, wind: WindPolicy::Strict }
    }

    pub fn split(mut self) -> Self {
        self.wind = WindPolicy::Split;
        self
    }
}

fn check_scheme(fp: &FluxPair, u0: &GridFunction, cfg: &SchemeConfig) -> Result<(f64, f64, f64, f64)> {
    if !(cfg.tau > 0.0) {
        return Err(Error::Invalid(format!("tau must be positive, got {}", cfg.tau)));
    }
    let dx = u0.grid.dx();
    if (cfg.h - dx).abs() > 1e-9 * dx {
        return Err(Error::GridMismatch(format!("scheme h = {} but grid dx = {dx}", cfg.h)));
    }
    for &u in &u0.values {
        fp.check_domain(u)?;
    }
    let (lo, hi) = (u0.min(), u0.max());
    let (a_lo, a_hi) = fp.speed_bounds(lo, hi);
    let cfl = cfg.tau / cfg.h * a_lo.abs().max(a_hi.abs());
    if cfl > 1.0 + 1e-12 {
        return Err(Error::CflViolated(cfl));
    }
    Ok((lo, hi, a_lo, a_hi))
}

/// Explicit conservative update of `eta(u)` with the given interface flux;
/// boundary nodes are held fixed.
fn march<F: Fn(f64, f64) -> f64>(
    fp: &FluxPair,
    u0: &GridFunction,
    tau: f64,
    t_final: f64,
    flux: F,
) -> Result<GridFunction> {
    if !(t_final >= 0.0) {
        return Err(Error::Invalid(format!("t_final must be >= 0, got {t_final}")));
    }
    let n = u0.grid.n_nodes();
    let h = u0.grid.dx();
    let identity = fp.has_identity_eta();
    let (a, b) = fp.domain();
    let mut u = u0.values.clone();
    let mut v: Vec<f64> = u.iter().map(|&x| fp.eta(x)).collect();
    let mut f = vec![0.0; n - 1];
    let mut t = 0.0;
    while t_final - t > 1e-14 * t_final.max(1.0) {
        let dt = tau.min(t_final - t);
        for i in 0..n - 1 {
            f[i] = flux(u[i], u[i + 1]);
        }
        let r = dt / h;
        for i in 1..n - 1 {
            v[i] -= r * (f[i] - f[i - 1]);
            let ui = if identity { v[i] } else { fp.eta_inverse(v[i])? };
            if !ui.is_finite() {
                return Err(Error::NonFinite(format!("scheme state at x = {}", u0.grid.x(i))));
            }
            if ui < a - 1e-8 || ui > b + 1e-8 {
                return Err(Error::DomainEscape { u: ui, x: u0.grid.x(i), t: t + dt });
            }
            u[i] = ui;
        }
        t += dt;
    }
    GridFunction::new(u0.grid, u, t_final)
}

/// The "running count" scheme `eta(u_n)' = eta(u_n) - (tau/h)(phi(u_n) - phi(u_{n-1}))`.
pub fn upwind_solve(fp: &FluxPair, u0: &GridFunction, cfg: &SchemeConfig, t_final: f64) -> Result<GridFunction> {
    let (lo, hi, a_lo, a_hi) = check_scheme(fp, u0, cfg)?;
    if a_lo >= 0.0 {
        return march(fp, u0, cfg.tau, t_final, |ul, _| fp.phi(ul));
    }
    match cfg.wind {
        WindPolicy::Strict => Err(Error::WrongWindDirection(a_lo)),
        WindPolicy::Split => {
            if a_hi <= 0.0 {
                return march(fp, u0, cfg.tau, t_final, |_, ur| fp.phi(ur));
            }
            if fp.require_convex().is_ok() {
                let us = inverse_monotone(|u| fp.speed(u), 0.0, (lo, hi))?;
                let phi_s = fp.phi(us);
                march(fp, u0, cfg.tau, t_final, |ul, ur| fp.phi(ul.max(us)) + fp.phi(ur.min(us)) - phi_s)
            } else {
                march(fp, u0, cfg.tau, t_final, |ul, ur| {
                    fp.phi(ul) + adaptive_simpson(|s| fp.phi_prime(s).min(0.0), ul, ur, 1e-10)
                })
            }
        }
    }
}

/// Godunov flux: min of `phi` over `[u_l, u_r]` when `u_l <= u_r`, max over
/// `[u_r, u_l]` otherwise. Since `eta` is increasing this is the extremum of
/// `H = phi ∘ eta^{-1}` over the interface interval of `v = eta(u)`.
pub fn godunov_solve(fp: &FluxPair, u0: &GridFunction, cfg: &SchemeConfig, t_final: f64) -> Result<GridFunction> {
    let (lo, hi, a_lo, a_hi) = check_scheme(fp, u0, cfg)?;
    fp.require_convex()?;
    // sonic point of the convex H: phi is minimal there on the data range
    let us = if a_lo >= 0.0 {
        lo
    } else if a_hi <= 0.0 {
        hi
    } else {
        inverse_monotone(|u| fp.speed(u), 0.0, (lo, hi))?
    };
    march(
        fp,
        u0,
        cfg.tau,
        t_final,
        |ul, ur| {
            if ul <= ur {
                fp.phi(us.clamp(ul, ur))
            } else {
                fp.phi(ul).max(fp.phi(ur))
            }
        },
    )
}

/// Dispatches on `cfg.scheme`.
pub fn scheme_solve(fp: &FluxPair, u0: &GridFunction, cfg: &SchemeConfig, t_final: f64) -> Result<GridFunction> {
    match cfg.scheme {
        SchemeKind::Upwind => upwind_solve(fp, u0, cfg, t_final),
        SchemeKind::Godunov => godunov_solve(fp, u0, cfg, t_final),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub sup_err: f64,
    pub l1_err: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub order_sup: Option<f64>,
    pub order_l1: Option<f64>,
}

impl ConvergenceReport {
    pub fn sup_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].sup_err < w[0].sup_err)
    }

    pub fn l1_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].l1_err < w[0].l1_err)
    }
}

/// Error table of `runs` against `reference(x)`. The sup norm skips nodes within
/// `exclusion_factor * h` of any point in `shocks`; the L1 norm uses all nodes.
/// Orders are least-squares slopes of log error against log h (`None` when an
/// error vanishes).
pub fn convergence_report<R: Fn(f64) -> f64>(
    reference: R,
    runs: &[(f64, GridFunction)],
    shocks: &[f64],
    exclusion_factor: f64,
) -> Result<ConvergenceReport> {
    if runs.len() < 3 {
        return Err(Error::InsufficientRuns { needed: 3, got: runs.len() });
    }
    if runs.windows(2).any(|w| !(w[1].0 < w[0].0)) {
        return Err(Error::Invalid("runs must have strictly decreasing h".into()));
    }
    let mut rows = Vec::with_capacity(runs.len());
    for (h, g) in runs {
        let exact = GridFunction::from_fn(g.grid, g.time, &reference)?;
        let radius = exclusion_factor * h;
        let sup_err = g
            .grid
            .nodes()
            .iter()
            .zip(g.values.iter().zip(&exact.values))
            .filter(|(x, _)| shocks.iter().all(|s| (*x - s).abs() > radius))
            .map(|(_, (a, b))| (a - b).abs())
            .fold(0.0, f64::max);
        let l1_err = crate::grid::l1_distance(g, &exact)?;
        rows.push(ConvergenceRow { h: *h, sup_err, l1_err });
    }
    let order = |sel: fn(&ConvergenceRow) -> f64| {
        let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.h, sel(r))).collect();
        log_log_slope(&pairs).ok()
    };
    Ok(ConvergenceReport { order_sup: order(|r| r.sup_err), order_l1: order(|r| r.l1_err), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{make_flux_pair, FluxSpec};
    use crate::grid::l1_distance;
    use crate::riemann::{solve_riemann_convex, RiemannProblem};

    fn ph_cfg(alpha: f64, beta: f64, mu: f64, h: f64, n: (i64, i64), t: f64) -> PHConfig {
        PHConfig { efficiency: Efficiency::Affine { alpha, beta }, mu, h, n_min: n.0, n_max: n.1, t_final: t }
    }

    #[test]
    fn rhs_examples() {
        let cfg = ph_cfg(1.0, 0.0, 0.0, 1.0, (0, 9), 1.0);
        let s = LevelState { n_min: 0, values: vec![0.0; 10], time: 0.0 };
        // constant 0 interior, right boundary neighbor 1 only feeds the mu term
        assert!(ph_rhs(&cfg, &s).iter().all(|&d| d == 0.0));
        let mut s = LevelState { n_min: 0, values: vec![0.5; 10], time: 0.0 };
        let d = ph_rhs(&cfg, &s);
        assert_eq!(d[0], -0.5);
        assert!(d[1..].iter().all(|&x| x == 0.0));
        let cfg = ph_cfg(1.0, 1.0, 0.3, 0.5, (0, 9), 1.0);
        s.values = vec![0.4; 10];
        let d = ph_rhs(&cfg, &s);
        assert!(d[1..9].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn ph_zero_stays_zero_and_monotone_data_stay_monotone() {
        let cfg = ph_cfg(1.0, 1.0, 0.0, 0.05, (-40, 40), 1.0);
        let zero = LevelState::from_distribution(&cfg, |_| 0.0);
        let out = ph_solve(&cfg, &zero).unwrap();
        // the right frozen level 1 feeds only the mu term, which is zero here
        assert!(out.values.iter().all(|&v| v == 0.0));

        let cfg = ph_cfg(1.0, 1.0, 0.2, 0.05, (-60, 60), 1.0);
        let init = LevelState::from_distribution(&cfg, |x| 0.5 * (1.0 + (2.0 * x).tanh()));
        let traj = ph_solve_trajectory(&cfg, &init, &[0.25, 0.5, 1.0]).unwrap();
        // frozen neighbors 0 and 1 bound the range
        for s in &traj {
            assert!(s.is_nondecreasing(1e-14));
            assert!(s.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn ph_rejects_bad_config() {
        let mut cfg = ph_cfg(-1.0, 0.0, 0.0, 0.1, (0, 10), 1.0);
        let s = LevelState { n_min: 0, values: vec![0.0; 11], time: 0.0 };
        assert!(ph_solve(&cfg, &s).is_err());
        cfg.efficiency = Efficiency::Affine { alpha: 1.0, beta: 0.0 };
        let bad = LevelState { n_min: 0, values: vec![1.5; 11], time: 0.0 };
        assert!(matches!(ph_solve(&cfg, &bad), Err(Error::RangeEscape { .. })));
    }

    #[test]
    fn unit_cfl_linear_advection_is_an_exact_shift() {
        let fp = make_flux_pair(FluxSpec::Linear { eta_scale: 1.0, speed: 1.0 }, (-1.0, 1.0)).unwrap();
        let g = Grid1D::new(0.0, 1.0, 100).unwrap();
        let u0 = GridFunction::from_fn(g, 0.0, |x| (-(x - 0.3f64).powi(2) / 0.005).exp()).unwrap();
        let cfg = SchemeConfig { tau: g.dx(), h: g.dx(), scheme: SchemeKind::Upwind, wind: WindPolicy::Strict };
        let out = upwind_solve(&fp, &u0, &cfg, 10.0 * g.dx()).unwrap();
        for i in 11..100 {
            assert!((out.values[i] - u0.values[i - 10]).abs() < 1e-14);
        }
    }

    #[test]
    fn upwind_errors() {
        let fp = make_flux_pair(FluxSpec::Burgers, (-1.0, 1.0)).unwrap();
        let g = Grid1D::new(-1.0, 1.0, 40).unwrap();
        let u0 = GridFunction::from_fn(g, 0.0, |x| if x < 0.0 { -1.0 } else { 1.0 }).unwrap();
        let cfg = SchemeConfig::with_cfl(&fp, &u0, 0.9, SchemeKind::Upwind);
        assert!(matches!(upwind_solve(&fp, &u0, &cfg, 0.5), Err(Error::WrongWindDirection(_))));
        assert!(upwind_solve(&fp, &u0, &cfg.split(), 0.5).is_ok());
        let mut fast = cfg;
        fast.tau *= 2.0;
        assert!(matches!(upwind_solve(&fp, &u0, &fast.split(), 0.5), Err(Error::CflViolated(_))));
    }

    #[test]
    fn upwind_rarefaction_rate() {
        let fp = make_flux_pair(FluxSpec::Burgers, (0.0, 1.0)).unwrap();
        let exact = solve_riemann_convex(&RiemannProblem::new(fp.clone(), 0.0, 1.0).unwrap()).unwrap();
        let mut runs = vec![];
        for n in [100, 200, 400] {
            let g = Grid1D::new(-0.5, 1.5, 2 * n).unwrap();
            let u0 = GridFunction::from_fn(g, 0.0, |x| if x < 0.0 { 0.0 } else { 1.0 }).unwrap();
            let cfg = SchemeConfig::with_cfl(&fp, &u0, 0.9, SchemeKind::Upwind);
            runs.push((g.dx(), upwind_solve(&fp, &u0, &cfg, 1.0).unwrap()));
        }
        let rep = convergence_report(|x| exact.evaluate(1.0, x), &runs, &[], 3.0).unwrap();
        assert!(rep.l1_decreasing());
        for r in &rep.rows {
            assert!(r.l1_err <= 2.0 * r.h.sqrt(), "{r:?}");
        }
        let p = rep.order_l1.unwrap();
        assert!((0.4..=1.1).contains(&p), "order {p}");
    }

    #[test]
    fn godunov_examples() {
        let fp = make_flux_pair(FluxSpec::Burgers, (-1.0, 1.0)).unwrap();
        let g = Grid1D::new(-2.0, 2.0, 200).unwrap();
        let c = GridFunction::from_fn(g, 0.0, |_| -0.3).unwrap();
        let cfg = SchemeConfig::with_cfl(&fp, &c, 0.9, SchemeKind::Godunov);
        assert_eq!(godunov_solve(&fp, &c, &cfg, 1.0).unwrap().values, c.values);

        let shock = GridFunction::from_fn(g, 0.0, |x| if x < 0.0 { 1.0 } else { -1.0 }).unwrap();
        let cfg = SchemeConfig::with_cfl(&fp, &shock, 0.9, SchemeKind::Godunov);
        let out = godunov_solve(&fp, &shock, &cfg, 1.0).unwrap();
        let i = out.values.iter().position(|&v| v < 0.0).unwrap();
        let xs = g.x(i - 1) + g.dx() * out.values[i - 1] / (out.values[i - 1] - out.values[i]);
        assert!(xs.abs() <= g.dx(), "{xs}");

        let exact = solve_riemann_convex(&RiemannProblem::new(fp.clone(), -1.0, 1.0).unwrap()).unwrap();
        let mut prev = f64::INFINITY;
        for n in [100, 200, 400] {
            let g = Grid1D::new(-2.0, 2.0, n).unwrap();
            let u0 = GridFunction::from_fn(g, 0.0, |x| if x < 0.0 { -1.0 } else { 1.0 }).unwrap();
            let cfg = SchemeConfig::with_cfl(&fp, &u0, 0.9, SchemeKind::Godunov);
            let out = godunov_solve(&fp, &u0, &cfg, 1.0).unwrap();
            let ex = GridFunction::from_fn(g, 1.0, |x| exact.evaluate(1.0, x)).unwrap();
            let d = l1_distance(&out, &ex).unwrap();
            assert!(d < prev);
            prev = d;
        }
        let cubic = make_flux_pair(FluxSpec::Power { p: 3.0 }, (-1.0, 1.0)).unwrap();
        assert!(matches!(godunov_solve(&cubic, &shock, &cfg, 1.0), Err(Error::NotConvex(_))));
    }

    #[test]
    fn godunov_equals_upwind_for_level_fluxes() {
        let fp = make_flux_pair(
            FluxSpec::Ph { efficiency: Efficiency::Affine { alpha: 1.0, beta: 1.0 }, mu: 0.0 },
            (0.0, 1.0),
        )
        .unwrap();
        let g = Grid1D::new(-3.0, 3.0, 300).unwrap();
        let u0 = GridFunction::from_fn(g, 0.0, |x| 0.5 * (1.0 + (2.0 * x).tanh())).unwrap();
        let up = SchemeConfig::with_cfl(&fp, &u0, 0.8, SchemeKind::Upwind);
        let go = SchemeConfig { scheme: SchemeKind::Godunov, ..up };
        let a = upwind_solve(&fp, &u0, &up, 1.0).unwrap();
        let b = godunov_solve(&fp, &u0, &go, 1.0).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn upwind_conserves_up_to_boundary_flux() {
        let fp = make_flux_pair(FluxSpec::ExpPair, (-1.0, 1.0)).unwrap();
        let g = Grid1D::new(-2.0, 2.0, 200).unwrap();
        let u0 = GridFunction::from_fn(g, 0.0, |x| 0.6 * (3.0 * x).sin() * (-10.0 * x * x).exp()).unwrap();
        let cfg = SchemeConfig::with_cfl(&fp, &u0, 0.9, SchemeKind::Upwind);
        let out = upwind_solve(&fp, &u0, &cfg, 0.3).unwrap();
        let n = g.n_nodes();
        let mass = |s: &GridFunction| s.values[1..n - 1].iter().map(|&u| fp.eta(u)).sum::<f64>() * g.dx();
        // the tails stay flat, so the boundary fluxes are phi(u_0) in and phi(u_{n-2}) out
        let inflow = 0.3 * (fp.phi(u0.values[0]) - fp.phi(u0.values[n - 2]));
        let rel = (mass(&out) - mass(&u0) - inflow).abs() / mass(&u0).abs();
        assert!(rel < 1e-10, "{rel}");
    }

    #[test]
    fn convergence_report_examples() {
        let g = |n: usize| Grid1D::new(0.0, 1.0, n).unwrap();
        let runs: Vec<(f64, GridFunction)> = [16, 32, 64]
            .iter()
            .map(|&n| {
                let h = 1.0 / n as f64;
                (h, GridFunction::from_fn(g(n), 0.0, |x| x + 3.0 * h).unwrap())
            })
            .collect();
        let rep = convergence_report(|x| x, &runs, &[], 3.0).unwrap();
        assert!((rep.order_sup.unwrap() - 1.0).abs() < 1e-12);
        assert!((rep.order_l1.unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            convergence_report(|x| x, &runs[..2], &[], 3.0),
            Err(Error::InsufficientRuns { needed: 3, got: 2 })
        ));
        // exclusion zone hides a localized defect
        let mut bad = runs.clone();
        for (h, gf) in bad.iter_mut() {
            let k = gf.grid.nearest(0.5);
            gf.values[k] += 10.0;
            let _ = h;
        }
        let rep = convergence_report(|x| x, &bad, &[0.5], 3.0).unwrap();
        assert!(rep.rows.iter().all(|r| r.sup_err < 1.0));
    }
}
