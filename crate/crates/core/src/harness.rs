//! Experiment orchestration: runs a matrix of (method, grid) cells, compares
//! every output on the finest grid, and writes plot-ready artifacts.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures::{fixture, Fixture};
use crate::flux::{make_flux_pair, Efficiency, FluxPair, FluxSpec};
use crate::grid::{l1_distance, GridFunction};
use crate::kinetic::{kinetic_solve, VelocityGrid};
use crate::numerics::log_log_slope;
use crate::schemes::{godunov_solve, upwind_solve, SchemeConfig, SchemeKind, WindPolicy};
use crate::variational::{Characteristics, Integrand, LaxOleinik, MonotoneHopf, Reading};
use crate::viscous::{solve_viscous, ViscosityForm, ViscousConfig};

/// Distances at or below this are treated as agreement to roundoff.
pub const ROUNDOFF_L1: f64 = 1e-10;

fn default_cfl() -> f64 {
    0.9
}

fn default_kinetic_eps() -> f64 {
    1e-3
}

fn default_n_v() -> usize {
    64
}

fn default_wind() -> WindPolicy {
    WindPolicy::Split
}

fn default_scan() -> usize {
    512
}

/// A solver and its knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Method {
    /// `epsilon` defaults to `h / 2`.
    Viscous {
        #[serde(default)]
        epsilon: Option<f64>,
        #[serde(default)]
        form: ViscosityForm,
    },
    LaxOleinik {
        #[serde(default = "default_scan")]
        scan: usize,
    },
    /// State recovered from the Hopf–Lax potential by differencing.
    HopfLax,
    Characteristics,
    Kinetic {
        #[serde(default = "default_kinetic_eps")]
        eps: f64,
        #[serde(default = "default_n_v")]
        n_v: usize,
    },
    Godunov {
        #[serde(default = "default_cfl")]
        cfl: f64,
    },
    Upwind {
        #[serde(default = "default_cfl")]
        cfl: f64,
        #[serde(default = "default_wind")]
        wind: WindPolicy,
    },
    HopfMonotone {
        #[serde(default)]
        reading: Reading,
    },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Viscous { .. } => "viscous",
            Method::LaxOleinik { .. } => "lax_oleinik",
            Method::HopfLax => "hopf_lax",
            Method::Characteristics => "characteristics",
            Method::Kinetic { .. } => "kinetic",
            Method::Godunov { .. } => "godunov",
            Method::Upwind { .. } => "upwind",
            Method::HopfMonotone { .. } => "hopf_monotone",
        }
    }

    pub fn viscous() -> Self {
        Method::Viscous { epsilon: None, form: ViscosityForm::Plain }
    }

    pub fn lax_oleinik() -> Self {
        Method::LaxOleinik { scan: default_scan() }
    }

    pub fn kinetic() -> Self {
        Method::Kinetic { eps: default_kinetic_eps(), n_v: default_n_v() }
    }

    pub fn godunov() -> Self {
        Method::Godunov { cfl: default_cfl() }
    }

    pub fn upwind() -> Self {
        Method::Upwind { cfl: default_cfl(), wind: WindPolicy::Split }
    }

    /// The seven routes compared on Riemann data.
    pub fn standard_set() -> Vec<Method> {
        vec![
            Method::viscous(),
            Method::lax_oleinik(),
            Method::HopfLax,
            Method::Characteristics,
            Method::kinetic(),
            Method::godunov(),
            Method::upwind(),
        ]
    }
}

/// `u(t)` on the grid of `u0` by `method`.
pub fn run_method(fp: &FluxPair, u0: &GridFunction, method: &Method, t: f64) -> Result<GridFunction> {
    if !(t >= 0.0) {
        return Err(Error::Invalid(format!("time must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(u0.clone());
    }
    let grid = u0.grid;
    let h = grid.dx();
    match method {
        Method::Viscous { epsilon, form } => {
            let cfg = ViscousConfig::new(epsilon.unwrap_or(0.5 * h), t).with_form(*form);
            solve_viscous(fp, u0, &cfg)
        }
        Method::LaxOleinik { scan } => LaxOleinik::new(fp, u0, Integrand::Eta)?.with_scan(*scan).solve_on(grid, t),
        Method::HopfLax => LaxOleinik::new(fp, u0, Integrand::Eta)?.into_potential().state_on(fp, grid, t),
        Method::Characteristics => Characteristics::new(fp, u0, t)?.solve_on(grid),
        Method::Kinetic { eps, n_v } => kinetic_solve(fp, u0, *eps, t, &VelocityGrid::covering(fp, *n_v)?),
        Method::Godunov { cfl } => {
            let cfg = SchemeConfig::with_cfl(fp, u0, *cfl, SchemeKind::Godunov);
            godunov_solve(fp, u0, &cfg, t)
        }
        Method::Upwind { cfl, wind } => {
            let cfg = SchemeConfig { wind: *wind, ..SchemeConfig::with_cfl(fp, u0, *cfl, SchemeKind::Upwind) };
            upwind_solve(fp, u0, &cfg, t)
        }
        Method::HopfMonotone { reading } => MonotoneHopf::new(fp, u0, *reading, 2001)?.solve_on(grid, t),
    }
}

/// Flux families available from configuration files and the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FluxConfig {
    Burgers,
    Power { p: f64 },
    GelfandQ,
    ExpPair,
    Linear { eta_scale: f64, speed: f64 },
    Ph { alpha: f64, beta: f64, mu: f64 },
}

impl FluxConfig {
    pub fn build(&self, domain: (f64, f64)) -> Result<FluxPair> {
        let spec = match *self {
            FluxConfig::Burgers => FluxSpec::Burgers,
            FluxConfig::Power { p } => FluxSpec::Power { p },
            FluxConfig::GelfandQ => FluxSpec::GelfandQ,
            FluxConfig::ExpPair => FluxSpec::ExpPair,
            FluxConfig::Linear { eta_scale, speed } => FluxSpec::Linear { eta_scale, speed },
            FluxConfig::Ph { alpha, beta, mu } => FluxSpec::Ph { efficiency: Efficiency::Affine { alpha, beta }, mu },
        };
        make_flux_pair(spec, domain)
    }

    /// Parses `burgers`, `gelfand_q`, `exp_pair`, `power:P`, `linear:K:C` or `ph:ALPHA:BETA:MU`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default();
        let nums: Vec<f64> = parts
            .map(|p| p.trim().parse::<f64>().map_err(|e| Error::Config(format!("bad number {p:?} in flux {s:?}: {e}"))))
            .collect::<Result<_>>()?;
        let want = |n: usize| {
            if nums.len() == n {
                Ok(())
            } else {
                Err(Error::Config(format!("flux {kind:?} takes {n} parameters, got {}", nums.len())))
            }
        };
        match kind {
            "burgers" => want(0).map(|_| FluxConfig::Burgers),
            "gelfand_q" => want(0).map(|_| FluxConfig::GelfandQ),
            "exp_pair" => want(0).map(|_| FluxConfig::ExpPair),
            "power" => want(1).map(|_| FluxConfig::Power { p: nums[0] }),
            "linear" => want(2).map(|_| FluxConfig::Linear { eta_scale: nums[0], speed: nums[1] }),
            "ph" => want(3).map(|_| FluxConfig::Ph { alpha: nums[0], beta: nums[1], mu: nums[2] }),
            other => Err(Error::Config(format!("unknown flux {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    Riemann {
        u_minus: f64,
        u_plus: f64,
    },
    /// Piecewise-linear through `(x, u)`, constant beyond the ends.
    Table {
        x: Vec<f64>,
        u: Vec<f64>,
    },
}

/// Pass/fail thresholds; absent entries are not checked.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default)]
    pub max_pairwise_l1: Option<f64>,
    #[serde(default)]
    pub max_oracle_l1: Option<f64>,
    /// Every pairwise and oracle distance must shrink along the ladder.
    #[serde(default)]
    pub require_decreasing: bool,
    #[serde(default)]
    pub min_order: Option<f64>,
    #[serde(default)]
    pub max_principle: Option<f64>,
}

fn default_times() -> Vec<f64> {
    vec![0.5, 1.0]
}

/// One experiment: a problem, a method list, a grid ladder and recorded times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Named problem; replaces `flux`, `domain`, `initial` and `x_range`.
    #[serde(default)]
    pub fixture: Option<String>,
    #[serde(default)]
    pub flux: Option<FluxConfig>,
    #[serde(default)]
    pub domain: Option<(f64, f64)>,
    #[serde(default)]
    pub initial: Option<InitialConfig>,
    #[serde(default)]
    pub x_range: Option<(f64, f64)>,
    pub methods: Vec<Method>,
    /// Cell counts, strictly increasing.
    pub ladder: Vec<usize>,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        let names: BTreeSet<&str> = self.methods.iter().map(Method::name).collect();
        if names.len() != self.methods.len() {
            return Err(Error::Config("each method kind may appear once".into()));
        }
        if self.ladder.is_empty() || self.ladder.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!(
                "ladder must be non-empty and strictly refining, got {:?}",
                self.ladder
            )));
        }
        if self.times.is_empty() || self.times.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::Config(format!("times must be positive, got {:?}", self.times)));
        }
        if self.fixture.is_none() && (self.flux.is_none() || self.initial.is_none() || self.x_range.is_none()) {
            return Err(Error::Config("without a fixture, flux, initial and x_range are required".into()));
        }
        Ok(())
    }

    /// The problem this config describes.
    pub fn problem(&self) -> Result<Fixture> {
        if let Some(name) = &self.fixture {
            return fixture(name);
        }
        let (flux, init, x_range) = match (&self.flux, &self.initial, self.x_range) {
            (Some(f), Some(i), Some(x)) => (f, i, x),
            _ => return Err(Error::Config("without a fixture, flux, initial and x_range are required".into())),
        };
        match init {
            InitialConfig::Riemann { u_minus, u_plus } => {
                let domain = self.domain.unwrap_or((u_minus.min(*u_plus), u_minus.max(*u_plus)));
                let fp = flux.build(domain)?;
                if fp.require_convex().is_ok() && u_minus != u_plus {
                    Fixture::riemann(&self.name, fp, *u_minus, *u_plus, x_range)
                } else {
                    let (l, r) = (*u_minus, *u_plus);
                    Ok(Fixture::from_fn(&self.name, fp, x_range, move |x| if x < 0.0 { l } else { r }))
                }
            }
            InitialConfig::Table { x, u } => {
                if x.len() != u.len() || x.len() < 2 || x.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Config("table needs matching lengths >= 2 and increasing x".into()));
                }
                let lo = u.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let domain = self.domain.unwrap_or((lo, if hi > lo { hi } else { lo + 1.0 }));
                let fp = flux.build(domain)?;
                let (xs, us) = (x.clone(), u.clone());
                Ok(Fixture::from_fn(&self.name, fp, x_range, move |q| table_eval(&xs, &us, q)))
            }
        }
    }
}

fn table_eval(x: &[f64], u: &[f64], q: f64) -> f64 {
    if q <= x[0] {
        return u[0];
    }
    let n = x.len();
    if q >= x[n - 1] {
        return u[n - 1];
    }
    let j = x.partition_point(|&s| s <= q);
    let w = (q - x[j - 1]) / (x[j] - x[j - 1]);
    (1.0 - w) * u[j - 1] + w * u[j]
}

/// Least-squares slope of `log err` against `log h`.
pub fn estimate_order(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 pairs, got {}", pairs.len())));
    }
    log_log_slope(pairs)
}

/// Distances at one rung and time, all measured on the finest grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceReport {
    pub t: f64,
    pub n_cells: usize,
    pub h: f64,
    /// Symmetric with zero diagonal; `None` where a method failed.
    pub l1_matrix: Vec<Vec<Option<f64>>>,
    pub max_pairwise: Option<f64>,
    /// Distance of each method to the exact solution, when one is known.
    pub oracle_l1: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderEntry {
    pub method: String,
    pub t: f64,
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodError {
    pub method: String,
    pub n_cells: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub name: String,
    pub methods: Vec<String>,
    pub ladder: Vec<usize>,
    pub times: Vec<f64>,
    pub slices: Vec<SliceReport>,
    /// Observed order of the oracle L1 error over the ladder.
    pub orders: Vec<OrderEntry>,
    pub errors: Vec<MethodError>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ComparisonReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn slice(&self, n_cells: usize, t: f64) -> Option<&SliceReport> {
        self.slices.iter().find(|s| s.n_cells == n_cells && s.t == t)
    }
}

/// One output of one (method, rung) cell.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub method: String,
    pub n_cells: usize,
    pub state: GridFunction,
}

impl Snapshot {
    pub fn file_name(&self) -> String {
        format!("snapshot_{}_{}_{}.csv", self.method, self.state.grid.dx(), self.state.time)
    }
}

type CellOutput = std::result::Result<Vec<GridFunction>, String>;

/// Runs every (method, rung) cell and compares the outputs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ComparisonReport> {
    run_experiment_with_snapshots(cfg).map(|r| r.0)
}

/// [`run_experiment`] plus the raw outputs, ordered by method, rung and time.
pub fn run_experiment_with_snapshots(cfg: &ExperimentConfig) -> Result<(ComparisonReport, Vec<Snapshot>)> {
    cfg.validate()?;
    let problem = cfg.problem()?;
    let fp = &problem.fp;
    let nm = cfg.methods.len();
    let cells: Vec<(usize, usize)> = (0..nm).flat_map(|m| (0..cfg.ladder.len()).map(move |r| (m, r))).collect();
    let outputs: Vec<CellOutput> = cells
        .par_iter()
        .map(|&(m, r)| {
            let grid = problem.grid(cfg.ladder[r]).map_err(|e| e.to_string())?;
            let u0 = problem.initial_on(grid).map_err(|e| e.to_string())?;
            cfg.times.iter().map(|&t| run_method(fp, &u0, &cfg.methods[m], t).map_err(|e| e.to_string())).collect()
        })
        .collect();

    let finest = problem.grid(*cfg.ladder.last().expect("non-empty ladder"))?;
    let names: Vec<String> = cfg.methods.iter().map(|m| m.name().to_string()).collect();
    let mut errors = Vec::new();
    let mut snapshots = Vec::new();
    for (&(m, r), out) in cells.iter().zip(&outputs) {
        match out {
            Ok(states) => snapshots.extend(states.iter().map(|s| Snapshot {
                method: names[m].clone(),
                n_cells: cfg.ladder[r],
                state: s.clone(),
            })),
            Err(msg) => {
                errors.push(MethodError { method: names[m].clone(), n_cells: cfg.ladder[r], message: msg.clone() })
            }
        }
    }
    let output = |m: usize, r: usize, k: usize| outputs[m * cfg.ladder.len() + r].as_ref().ok().map(|v| &v[k]);

    let mut slices = Vec::new();
    for (r, &n) in cfg.ladder.iter().enumerate() {
        for (k, &t) in cfg.times.iter().enumerate() {
            let resampled: Vec<Option<GridFunction>> =
                (0..nm).map(|m| output(m, r, k).map(|g| g.resample(finest))).collect();
            let mut matrix = vec![vec![None; nm]; nm];
            for i in 0..nm {
                if resampled[i].is_some() {
                    matrix[i][i] = Some(0.0);
                }
                for j in i + 1..nm {
                    if let (Some(a), Some(b)) = (&resampled[i], &resampled[j]) {
                        let d = l1_distance(a, b)?;
                        matrix[i][j] = Some(d);
                        matrix[j][i] = Some(d);
                    }
                }
            }
            let max_pairwise = matrix.iter().flatten().flatten().copied().reduce(f64::max);
            let exact = problem.exact_on(finest, t).transpose()?;
            let oracle_l1 = resampled
                .iter()
                .map(|g| match (g, &exact) {
                    (Some(g), Some(e)) => l1_distance(g, e).ok(),
                    _ => None,
                })
                .collect();
            slices.push(SliceReport {
                t,
                n_cells: n,
                h: problem.grid(n)?.dx(),
                l1_matrix: matrix,
                max_pairwise,
                oracle_l1,
            });
        }
    }

    let mut orders = Vec::new();
    if problem.has_exact() && cfg.ladder.len() >= 3 {
        for (m, name) in names.iter().enumerate() {
            for &t in &cfg.times {
                let pairs: Option<Vec<(f64, f64)>> =
                    slices.iter().filter(|s| s.t == t).map(|s| s.oracle_l1[m].map(|e| (s.h, e))).collect();
                let order = pairs.and_then(|p| estimate_order(&p).ok());
                orders.push(OrderEntry { method: name.clone(), t, order });
            }
        }
    }

    let checks = evaluate_checks(cfg, &problem, &names, &slices, &orders, &snapshots)?;
    let pass = errors.is_empty() && checks.iter().all(|c| c.pass);
    let report = ComparisonReport {
        name: cfg.name.clone(),
        methods: names,
        ladder: cfg.ladder.clone(),
        times: cfg.times.clone(),
        slices,
        orders,
        errors,
        checks,
        pass,
    };
    Ok((report, snapshots))
}

fn evaluate_checks(
    cfg: &ExperimentConfig,
    problem: &Fixture,
    names: &[String],
    slices: &[SliceReport],
    orders: &[OrderEntry],
    snapshots: &[Snapshot],
) -> Result<Vec<Check>> {
    let tol = &cfg.tolerances;
    let finest = *cfg.ladder.last().expect("non-empty ladder");
    let nm = names.len();
    let mut checks = Vec::new();
    let mut push = |name: String, value: f64, tolerance: f64, pass: bool| {
        checks.push(Check { name, value, tolerance, pass });
    };
    for s in slices.iter().filter(|s| s.n_cells == finest) {
        if let Some(lim) = tol.max_pairwise_l1 {
            let v = s.max_pairwise.unwrap_or(f64::INFINITY);
            push(format!("max pairwise L1 at t={}", s.t), v, lim, v <= lim);
        }
        if let Some(lim) = tol.max_oracle_l1 {
            for (m, d) in s.oracle_l1.iter().enumerate() {
                if let Some(d) = d {
                    push(format!("{} oracle L1 at t={}", names[m], s.t), *d, lim, *d <= lim);
                }
            }
        }
    }
    if tol.require_decreasing && cfg.ladder.len() >= 2 {
        for &t in &cfg.times {
            let rungs: Vec<&SliceReport> = slices.iter().filter(|s| s.t == t).collect();
            let decreasing = |series: Vec<Option<f64>>| -> (bool, f64) {
                let vals: Option<Vec<f64>> = series.into_iter().collect();
                match vals {
                    Some(v) => {
                        // identical discretizations sit at roundoff on every rung
                        let ok = v.windows(2).all(|w| w[1] < w[0]) || v.iter().all(|&d| d <= ROUNDOFF_L1);
                        (ok, *v.last().expect("non-empty"))
                    }
                    None => (false, f64::NAN),
                }
            };
            for i in 0..nm {
                for j in i + 1..nm {
                    let (ok, last) = decreasing(rungs.iter().map(|s| s.l1_matrix[i][j]).collect());
                    push(format!("{} vs {} decreasing at t={t}", names[i], names[j]), last, 0.0, ok);
                }
                if problem.has_exact() {
                    let (ok, last) = decreasing(rungs.iter().map(|s| s.oracle_l1[i]).collect());
                    push(format!("{} oracle decreasing at t={t}", names[i]), last, 0.0, ok);
                }
            }
        }
    }
    if let Some(min) = tol.min_order {
        for o in orders {
            let v = o.order.unwrap_or(f64::NAN);
            push(format!("{} order at t={}", o.method, o.t), v, min, v >= min);
        }
    }
    if let Some(lim) = tol.max_principle {
        let g = problem.grid(finest)?;
        let u0 = problem.initial_on(g)?;
        let (lo, hi) = (u0.min(), u0.max());
        for s in snapshots {
            let excess = (lo - s.state.min()).max(s.state.max() - hi).max(0.0);
            push(format!("{} max principle n={} t={}", s.method, s.n_cells, s.state.time), excess, lim, excess <= lim);
        }
    }
    Ok(checks)
}

/// Writes `x,u` columns for one state.
pub fn write_snapshot_csv(path: &Path, state: &GridFunction) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    w.write_record(["x", "u"]).map_err(|e| Error::Io(e.to_string()))?;
    for (x, u) in state.grid.nodes().iter().zip(&state.values) {
        w.write_record([x.to_string(), u.to_string()]).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an `x,u` CSV written by [`write_snapshot_csv`]; nodes must be uniform.
pub fn read_snapshot_csv(path: &Path, time: f64) -> Result<GridFunction> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let (mut xs, mut us) = (Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
        let get = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| Error::Config(format!("{}: short row", path.display())))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        };
        xs.push(get(0)?);
        us.push(get(1)?);
    }
    if xs.len() < 9 {
        return Err(Error::Config(format!("{}: need at least 9 rows", path.display())));
    }
    let grid = crate::grid::Grid1D::new(xs[0], xs[xs.len() - 1], xs.len() - 1)?;
    for (i, &x) in xs.iter().enumerate() {
        if (x - grid.x(i)).abs() > 1e-9 * (1.0 + x.abs()) {
            return Err(Error::GridMismatch(format!("{}: nodes are not uniform", path.display())));
        }
    }
    GridFunction::new(grid, us, time)
}

/// Writes every snapshot and `report.json` into `dir`; returns the files written.
pub fn write_artifacts(dir: &Path, report: &ComparisonReport, snapshots: &[Snapshot]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(snapshots.len() + 1);
    for s in snapshots {
        let p = dir.join(s.file_name());
        write_snapshot_csv(&p, &s.state)?;
        written.push(p);
    }
    let p = dir.join("report.json");
    std::fs::write(&p, report.to_json()?)?;
    written.push(p);
    Ok(written)
}
