//! Named initial-value problems with their flux pairs and, where available,
//! exact solutions.

use std::sync::Arc;

use crate::entropy::CandidateSolution;
use crate::error::{Error, Result};
use crate::flux::{inverse_monotone, make_flux_pair, Efficiency, FluxPair, FluxSpec};
use crate::grid::{Grid1D, GridFunction};
use crate::riemann::{solve_riemann_convex, OleinikFamily, RiemannProblem};

type Initial = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type Exact = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// An initial-value problem on a bounded interval.
#[derive(Clone)]
pub struct Fixture {
    pub name: String,
    pub fp: FluxPair,
    pub x_range: (f64, f64),
    initial: Initial,
    exact: Option<Exact>,
    /// Shock speeds of the exact solution; shocks start at `x = 0`.
    pub shock_speeds: Vec<f64>,
}

impl std::fmt::Debug for Fixture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fixture")
            .field("name", &self.name)
            .field("flux", &self.fp.label())
            .field("x_range", &self.x_range)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

pub const FIXTURE_NAMES: [&str; 9] = [
    "burgers_fan",
    "burgers_shock",
    "oleinik_uq_1",
    "oleinik_uq_2",
    "gelfand_forms",
    "gelfand_burgers",
    "exp_pair_riemann",
    "ph_smooth_monotone",
    "smooth_ramp",
];

impl Fixture {
    pub fn grid(&self, n_cells: usize) -> Result<Grid1D> {
        Grid1D::new(self.x_range.0, self.x_range.1, n_cells)
    }

    pub fn initial(&self, x: f64) -> f64 {
        (self.initial)(x)
    }

    pub fn initial_on(&self, grid: Grid1D) -> Result<GridFunction> {
        GridFunction::from_fn(grid, 0.0, |x| self.initial(x))
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact(&self, t: f64, x: f64) -> Option<f64> {
        self.exact.as_ref().map(|e| e(t, x))
    }

    pub fn exact_on(&self, grid: Grid1D, t: f64) -> Option<Result<GridFunction>> {
        self.exact.as_ref().map(|e| GridFunction::from_fn(grid, t, |x| e(t, x)))
    }

    pub fn shocks_at(&self, t: f64) -> Vec<f64> {
        self.shock_speeds.iter().map(|s| s * t).collect()
    }

    /// The exact solution as a candidate on `[t_window] x x_range`.
    pub fn exact_candidate(&self, t_window: (f64, f64)) -> Option<Result<CandidateSolution>> {
        let e = self.exact.clone()?;
        let lo = self.fp.domain();
        Some(CandidateSolution::from_fn(move |t, x| e(t, x), t_window, self.x_range, lo))
    }

    /// Riemann problem for a convex flux, solved exactly.
    pub fn riemann(name: &str, fp: FluxPair, u_minus: f64, u_plus: f64, x_range: (f64, f64)) -> Result<Self> {
        let sol = solve_riemann_convex(&RiemannProblem::new(fp.clone(), u_minus, u_plus)?)?;
        let shock_speeds = sol.shock_positions(1.0);
        Ok(Fixture {
            name: name.to_string(),
            fp,
            x_range,
            initial: Arc::new(move |x| if x < 0.0 { u_minus } else { u_plus }),
            exact: Some(Arc::new(move |t, x| sol.evaluate(t, x))),
            shock_speeds,
        })
    }

    /// Data given by a closure, no exact solution.
    pub fn from_fn<F>(name: &str, fp: FluxPair, x_range: (f64, f64), u0: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Fixture { name: name.to_string(), fp, x_range, initial: Arc::new(u0), exact: None, shock_speeds: vec![] }
    }
}

fn burgers(domain: (f64, f64)) -> Result<FluxPair> {
    make_flux_pair(FluxSpec::Burgers, domain)
}

/// Level-system flux with `Phi(u) = alpha + beta u` and migration rate `mu`.
pub fn ph_flux(alpha: f64, beta: f64, mu: f64) -> Result<FluxPair> {
    make_flux_pair(FluxSpec::Ph { efficiency: Efficiency::Affine { alpha, beta }, mu }, (0.0, 1.0))
}

/// `u0(x) = (1 + tanh 2x) / 2`.
pub fn ph_initial(x: f64) -> f64 {
    0.5 * (1.0 + (2.0 * x).tanh())
}

/// Exact solution of a rarefying smooth problem by inverting `x = y + t a(u0(y))`.
fn characteristic_solution(fp: FluxPair, u0: Initial, speed_range: (f64, f64)) -> Exact {
    Arc::new(move |t, x| {
        if t <= 0.0 {
            return u0(x);
        }
        let foot = |y: f64| y + t * fp.speed(u0(y));
        let bracket = (x - t * speed_range.1 - 1e-9, x - t * speed_range.0 + 1e-9);
        match inverse_monotone(foot, x, bracket) {
            Ok(y) => u0(y),
            Err(_) => f64::NAN,
        }
    })
}

/// Builds a fixture by name; see [`FIXTURE_NAMES`].
pub fn fixture(name: &str) -> Result<Fixture> {
    match name {
        "burgers_fan" => Fixture::riemann(name, burgers((-1.0, 1.0))?, -1.0, 1.0, (-2.0, 2.0)),
        "burgers_shock" => Fixture::riemann(name, burgers((-1.0, 1.0))?, 1.0, -1.0, (-2.0, 2.0)),
        "oleinik_uq_1" => oleinik_uq(1.0),
        "oleinik_uq_2" => oleinik_uq(2.0),
        // eta = u^2/2, phi = u^3/3: same smooth solutions as Burgers, different shocks
        "gelfand_forms" => {
            let fp = make_flux_pair(FluxSpec::GelfandQ, (0.0, 2.0))?;
            Fixture::riemann(name, fp, 2.0, 0.0, (-1.0, 3.0))
        }
        "gelfand_burgers" => Fixture::riemann(name, burgers((0.0, 2.0))?, 2.0, 0.0, (-1.0, 3.0)),
        "exp_pair_riemann" => {
            let fp = make_flux_pair(FluxSpec::ExpPair, (-0.5, 0.5))?;
            Fixture::riemann(name, fp, -0.5, 0.5, (-1.0, 3.0))
        }
        "ph_smooth_monotone" => {
            let fp = ph_flux(1.0, 1.0, 0.0)?;
            let u0: Initial = Arc::new(ph_initial);
            let range = fp.speed_bounds(0.0, 1.0);
            let exact = characteristic_solution(fp.clone(), u0.clone(), range);
            Ok(Fixture {
                name: name.into(),
                fp,
                x_range: (-5.0, 5.0),
                initial: u0,
                exact: Some(exact),
                shock_speeds: vec![],
            })
        }
        "smooth_ramp" => {
            let fp = burgers((-1.0, 1.0))?;
            Ok(Fixture {
                name: name.into(),
                fp,
                x_range: (-1.5, 1.5),
                initial: Arc::new(|x: f64| x.clamp(-1.0, 1.0)),
                exact: Some(Arc::new(|t: f64, x: f64| (x / (1.0 + t)).clamp(-1.0, 1.0))),
                shock_speeds: vec![],
            })
        }
        other => Err(Error::Config(format!("unknown fixture {other:?}; expected one of {}", FIXTURE_NAMES.join(", ")))),
    }
}

/// Burgers step `(1, -1)` on `[-2, 2]`, exact entropy solution attached; the
/// member `q` of Oleinik's family is available from [`oleinik_candidate`].
pub fn oleinik_uq(q: f64) -> Result<Fixture> {
    if !(q >= 1.0) {
        return Err(Error::Invalid(format!("Oleinik family needs q >= 1, got {q}")));
    }
    Fixture::riemann(&format!("oleinik_uq_{q}"), burgers((-q, q))?, 1.0, -1.0, (-2.0, 2.0))
}

/// `1 | -q | q | -1`, a weak solution for every `q >= 1`, entropic only for `q = 1`.
pub fn oleinik_candidate(q: f64, t_window: (f64, f64)) -> Result<CandidateSolution> {
    let fam = OleinikFamily { q };
    CandidateSolution::from_fn(move |t, x| fam.evaluate(t, x), t_window, (-2.0, 2.0), (-q, q))
}

/// The stationary expansion shock `-1 | 1` for Burgers: a weak solution that is not entropic.
pub fn non_entropic_u2(t_window: (f64, f64)) -> Result<CandidateSolution> {
    CandidateSolution::from_fn(|_, x| if x < 0.0 { -1.0 } else { 1.0 }, t_window, (-2.0, 2.0), (-1.0, 1.0))
}
