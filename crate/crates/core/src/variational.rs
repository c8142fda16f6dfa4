//! Variational representations of the solution: the potential
//! `U(t, x) = ∫ eta(u) dx - ∫ phi(u) dt`, its Hopf and Lax–Oleinik formulas,
//! the minimum over characteristics, and the Hopf formula for monotone data.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::flux::{inverse_monotone, FluxPair, SampledFunction};
use crate::grid::{Grid1D, GridFunction};
use crate::numerics::{golden_section_min, linspace, Pchip};

/// Default number of coarse scan points for every sup/inf over a continuum.
pub const DEFAULT_SCAN: usize = 512;
const GOLDEN_TOL: f64 = 1e-10;
const L_TABLE_POINTS: usize = 4001;

/// Which formula produced a [`Potential`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Initial,
    HopfConvex,
    HopfLax,
    Characteristics,
}

/// A potential `U(t, x)` together with the formula that evaluates it.
#[derive(Clone)]
pub struct Potential {
    provenance: Provenance,
    eval: Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>,
}

impl std::fmt::Debug for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Potential({:?})", self.provenance)
    }
}

impl Potential {
    pub fn new<F>(provenance: Provenance, eval: F) -> Self
    where
        F: Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
    {
        Self { provenance, eval: Arc::new(eval) }
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn value(&self, t: f64, x: f64) -> Result<f64> {
        (self.eval)(t, x)
    }

    /// `u = eta^{-1}(U_x)` on the nodes of `grid`, with `U_x` the centered
    /// difference over half a cell on each side.
    pub fn state_on(&self, fp: &FluxPair, grid: Grid1D, t: f64) -> Result<GridFunction> {
        let h = 0.5 * grid.dx();
        let (lo, hi) = fp.eta_range();
        let mut values = Vec::with_capacity(grid.n_nodes());
        for x in grid.nodes() {
            let v = (self.value(t, x + h)? - self.value(t, x - h)?) / (2.0 * h);
            values.push(fp.eta_inverse(v.clamp(lo, hi))?);
        }
        GridFunction::new(grid, values, t)
    }
}

/// Record of one Lax–Oleinik minimization.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MinimizerRecord {
    pub t: f64,
    pub x: f64,
    pub y_star: f64,
    pub value: f64,
    /// Gap between the best and the second-best local minimum of the coarse scan
    /// (infinite when the scan has a single local minimum).
    pub unique_within: f64,
}

/// Initial integrand of the potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrand {
    /// `∫ eta(u0)`
    #[default]
    Eta,
    /// `∫ u0`, literally as printed in the Lax–Oleinik formula.
    Raw,
}

/// Trapezoid cumulative integral of `eta(u0)`, zero at the node nearest `x = 0`.
pub fn potential_initial(fp: &FluxPair, u0: &GridFunction) -> Result<SampledFunction> {
    potential_with(fp, u0, Integrand::Eta)
}

fn potential_with(fp: &FluxPair, u0: &GridFunction, integrand: Integrand) -> Result<SampledFunction> {
    for &u in &u0.values {
        fp.check_domain(u)?;
    }
    let dens: Vec<f64> = match integrand {
        Integrand::Eta => u0.values.iter().map(|&u| fp.eta(u)).collect(),
        Integrand::Raw => u0.values.clone(),
    };
    let dx = u0.grid.dx();
    let mut cum = Vec::with_capacity(dens.len());
    let mut acc = 0.0;
    cum.push(0.0);
    for w in dens.windows(2) {
        acc += 0.5 * (w[0] + w[1]) * dx;
        cum.push(acc);
    }
    let k = u0.grid.nearest(0.0);
    let shift = cum[k];
    SampledFunction::new(u0.grid.nodes(), cum.into_iter().map(|c| c - shift).collect())
}

/// A sampled potential extended affinely beyond its grid with the end densities.
#[derive(Debug, Clone)]
struct ExtendedPotential {
    f: SampledFunction,
    left_slope: f64,
    right_slope: f64,
}

impl ExtendedPotential {
    fn new(fp: &FluxPair, u0: &GridFunction, integrand: Integrand) -> Result<Self> {
        let f = potential_with(fp, u0, integrand)?;
        let dens = |u: f64| match integrand {
            Integrand::Eta => fp.eta(u),
            Integrand::Raw => u,
        };
        let left_slope = dens(u0.values[0]);
        let right_slope = dens(*u0.values.last().expect("non-empty"));
        Ok(Self { f, left_slope, right_slope })
    }

    fn eval(&self, y: f64) -> f64 {
        let g = self.f.grid();
        let v = self.f.values();
        let (g0, gn) = (g[0], g[g.len() - 1]);
        if y < g0 {
            v[0] + self.left_slope * (y - g0)
        } else if y > gn {
            v[v.len() - 1] + self.right_slope * (y - gn)
        } else {
            self.f.eval(y)
        }
    }
}

/// Scans `f` on `n` points of `[lo, hi]` and refines the best one by golden
/// section. Ties go to the smallest abscissa. Returns `(argmin, min, gap)`.
fn scan_and_refine<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> Result<(f64, f64, f64)> {
    if !(hi - lo > 1e-14 * (1.0 + lo.abs().max(hi.abs()))) {
        let v = f(lo);
        if !v.is_finite() {
            return Err(Error::NonFiniteFunctional(lo));
        }
        return Ok((lo, v, f64::INFINITY));
    }
    let ys = linspace(lo, hi, n.max(3));
    let vals: Vec<f64> = ys.iter().map(|&y| f(y)).collect();
    if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteFunctional(ys[i]));
    }
    let mut best = 0;
    for (i, &v) in vals.iter().enumerate() {
        if v < vals[best] {
            best = i;
        }
    }
    // local minima of the scan, for the uniqueness gap
    let mut minima: Vec<f64> = vec![];
    for i in 0..vals.len() {
        let left_ok = i == 0 || vals[i] < vals[i - 1];
        let right_ok = i == vals.len() - 1 || vals[i] <= vals[i + 1];
        if left_ok && right_ok {
            minima.push(vals[i]);
        }
    }
    minima.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let gap = if minima.len() > 1 { minima[1] - minima[0] } else { f64::INFINITY };
    let a = ys[best.saturating_sub(1)];
    let b = ys[(best + 1).min(ys.len() - 1)];
    let (y, v) = golden_section_min(&f, a, b, GOLDEN_TOL);
    if v < vals[best] {
        Ok((y, v, gap))
    } else {
        Ok((ys[best], vals[best], gap))
    }
}

/// Lax–Oleinik solver for one initial datum: `L = H*` is tabulated once and
/// reused for every query point.
#[derive(Debug, Clone)]
pub struct LaxOleinik {
    fp: FluxPair,
    u_lo: f64,
    u_hi: f64,
    a_lo: f64,
    a_hi: f64,
    /// Hermite table of `L` on the speed range; `None` for constant speed.
    l_table: Option<Pchip>,
    v_lo: f64,
    v_hi: f64,
    u0pot: ExtendedPotential,
    scan: usize,
}

impl LaxOleinik {
    pub fn new(fp: &FluxPair, u0: &GridFunction, integrand: Integrand) -> Result<Self> {
        let u0pot = ExtendedPotential::new(fp, u0, integrand)?;
        let (u_lo, u_hi) = (u0.min(), u0.max());
        let (a_lo, a_hi) = fp.speed_bounds(u_lo, u_hi);
        let degenerate = a_hi - a_lo <= 1e-12 * (1.0 + a_lo.abs().max(a_hi.abs()));
        let l_table = if degenerate {
            None
        } else {
            fp.require_convex()?;
            Some(legendre_table(fp, u_lo, u_hi)?)
        };
        Ok(Self {
            fp: fp.clone(),
            u_lo,
            u_hi,
            a_lo,
            a_hi,
            l_table,
            v_lo: fp.eta(u_lo),
            v_hi: fp.eta(u_hi),
            u0pot,
            scan: DEFAULT_SCAN,
        })
    }

    pub fn with_scan(mut self, n: usize) -> Self {
        self.scan = n.max(3);
        self
    }

    /// `L(q) = sup_v [q v - H(v)]` over the data's density range.
    pub fn lagrangian(&self, q: f64) -> f64 {
        match &self.l_table {
            None => {
                // H is linear with slope a_lo: L is the indicator of {a_lo}, finite part only
                q * self.v_lo - self.fp.phi(self.u_lo)
            }
            Some(p) => {
                if q < self.a_lo {
                    p.eval_all(self.a_lo).0 + self.v_lo * (q - self.a_lo)
                } else if q > self.a_hi {
                    p.eval_all(self.a_hi).0 + self.v_hi * (q - self.a_hi)
                } else {
                    p.eval_all(q).0
                }
            }
        }
    }

    fn minimize(&self, t: f64, x: f64) -> Result<MinimizerRecord> {
        if !(t > 0.0) {
            return Err(Error::Invalid(format!("Lax–Oleinik needs t > 0, got {t}")));
        }
        let lo = x - t * self.a_hi;
        let hi = x - t * self.a_lo;
        let f = |y: f64| t * self.lagrangian((x - y) / t) + self.u0pot.eval(y);
        let (y_star, value, gap) = scan_and_refine(f, lo, hi, self.scan)?;
        Ok(MinimizerRecord { t, x, y_star, value, unique_within: gap })
    }

    /// Minimal potential `min_y [U0(y) + t L((x - y)/t)]`.
    pub fn potential(&self, t: f64, x: f64) -> Result<f64> {
        Ok(self.minimize(t, x)?.value)
    }

    /// `u(t, x) = a^{-1}((x - y*)/t)`, clamped to the data range.
    pub fn solve(&self, t: f64, x: f64) -> Result<(f64, MinimizerRecord)> {
        let rec = self.minimize(t, x)?;
        if self.l_table.is_none() {
            // constant speed: the state is carried unchanged along x - a t
            let u = self.u0_state(rec.y_star);
            return Ok((u, rec));
        }
        let q = ((x - rec.y_star) / t).clamp(self.a_lo, self.a_hi);
        let u = inverse_monotone(|u| self.fp.speed(u), q, (self.u_lo, self.u_hi))?;
        Ok((u.clamp(self.u_lo, self.u_hi), rec))
    }

    fn u0_state(&self, y: f64) -> f64 {
        // derivative of the potential recovers the density at y
        let h = 1e-7 * (1.0 + y.abs());
        let v = (self.u0pot.eval(y + h) - self.u0pot.eval(y - h)) / (2.0 * h);
        self.fp
            .eta_inverse(v.clamp(self.v_lo.min(self.v_hi), self.v_lo.max(self.v_hi)))
            .unwrap_or(self.u_lo)
            .clamp(self.u_lo, self.u_hi)
    }

    pub fn solve_on(&self, grid: Grid1D, t: f64) -> Result<GridFunction> {
        let mut values = Vec::with_capacity(grid.n_nodes());
        for x in grid.nodes() {
            values.push(self.solve(t, x)?.0);
        }
        GridFunction::new(grid, values, t)
    }

    pub fn into_potential(self) -> Potential {
        Potential::new(
            Provenance::HopfLax,
            move |t, x| {
                if t == 0.0 {
                    Ok(self.u0pot.eval(x))
                } else {
                    self.potential(t, x)
                }
            },
        )
    }
}

/// Hermite table of `L(q) = q eta(u) - phi(u)` at `q = a(u)`, slopes `L'(q) = eta(u)`.
fn legendre_table(fp: &FluxPair, u_lo: f64, u_hi: f64) -> Result<Pchip> {
    let mut q = Vec::with_capacity(L_TABLE_POINTS);
    let mut l = Vec::with_capacity(L_TABLE_POINTS);
    let mut d = Vec::with_capacity(L_TABLE_POINTS);
    for u in linspace(u_lo, u_hi, L_TABLE_POINTS) {
        let a = fp.speed(u);
        if let Some(&last) = q.last() {
            if !(a > last) {
                continue;
            }
        }
        let v = fp.eta(u);
        q.push(a);
        l.push(a * v - fp.phi(u));
        d.push(v);
    }
    Pchip::with_slopes(q, l, d)
}

/// `u(t, x)` by the Lax–Oleinik formula. Builds the solver for a single query;
/// use [`LaxOleinik`] for many queries on the same datum.
pub fn lax_oleinik(fp: &FluxPair, u0: &GridFunction, t: f64, x: f64) -> Result<(f64, MinimizerRecord)> {
    LaxOleinik::new(fp, u0, Integrand::Eta)?.solve(t, x)
}

/// The inf-form Hopf–Lax potential `min_y [U0(y) + t L((x - y)/t)]`.
pub fn hopf_lax_convex_h(fp: &FluxPair, u0: &GridFunction, t: f64, x: f64) -> Result<f64> {
    LaxOleinik::new(fp, u0, Integrand::Eta)?.potential(t, x)
}

/// Hopf formula for convex initial potential:
/// `U(t, x) = sup_s [s x - H(s) t - U0*(s)]`, `s` over the density range.
#[derive(Debug, Clone)]
pub struct HopfConvex {
    fp: FluxPair,
    u0: SampledFunction,
    s_grid: Vec<f64>,
    h_vals: Vec<f64>,
    star: Vec<f64>,
}

impl HopfConvex {
    pub fn new(fp: &FluxPair, u0_potential: &SampledFunction, n_s: usize) -> Result<Self> {
        u0_potential.is_convex(1e-10).map_err(Error::NotConvexInitial)?;
        let (lo, hi) = fp.eta_range();
        let s_grid = linspace(lo, hi, n_s.max(3));
        let h_vals = s_grid.iter().map(|&s| fp.hamiltonian(s)).collect::<Result<Vec<_>>>()?;
        let star = s_grid.iter().map(|&s| conjugate_at(u0_potential, s)).collect();
        Ok(Self { fp: fp.clone(), u0: u0_potential.clone(), s_grid, h_vals, star })
    }

    /// Returns `(U(t, x), s*)`.
    pub fn evaluate(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        if !(t >= 0.0) {
            return Err(Error::Invalid(format!("Hopf formula needs t >= 0, got {t}")));
        }
        let mut best = 0;
        let mut best_v = f64::NEG_INFINITY;
        for (i, ((&s, &h), &st)) in self.s_grid.iter().zip(&self.h_vals).zip(&self.star).enumerate() {
            let v = s * x - h * t - st;
            if v > best_v {
                best_v = v;
                best = i;
            }
        }
        let a = self.s_grid[best.saturating_sub(1)];
        let b = self.s_grid[(best + 1).min(self.s_grid.len() - 1)];
        let neg = |s: f64| -(s * x - self.fp.hamiltonian(s).unwrap_or(f64::INFINITY) * t - conjugate_at(&self.u0, s));
        let (s, v) = golden_section_min(neg, a, b, GOLDEN_TOL);
        if -v > best_v {
            Ok((-v, s))
        } else {
            Ok((best_v, self.s_grid[best]))
        }
    }

    pub fn into_potential(self) -> Potential {
        Potential::new(Provenance::HopfConvex, move |t, x| self.evaluate(t, x).map(|r| r.0))
    }
}

/// `U(t, x)` by the Hopf formula for convex `U0` (single query).
pub fn hopf_convex_initial(fp: &FluxPair, u0_potential: &SampledFunction, t: f64, x: f64) -> Result<f64> {
    HopfConvex::new(fp, u0_potential, 2001)?.evaluate(t, x).map(|r| r.0)
}

/// `max_i [s x_i - f_i]` over the samples of `f`.
fn conjugate_at(f: &SampledFunction, s: f64) -> f64 {
    f.grid().iter().zip(f.values()).map(|(&x, &v)| s * x - v).fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Copy)]
struct Launch {
    x: f64,
    u: f64,
    phi: f64,
}

/// Minimum of the potential over straight characteristics at a fixed time.
#[derive(Debug, Clone)]
pub struct Characteristics {
    fp: FluxPair,
    t: f64,
    dx: f64,
    launches: Vec<Launch>,
}

impl Characteristics {
    /// Launches from every node, from sub-launches filling the gaps between
    /// neighbors whose characteristics spread apart, and from a constant
    /// extension of the data over the influence cone.
    pub fn new(fp: &FluxPair, u0: &GridFunction, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::Invalid(format!("characteristics need t > 0, got {t}")));
        }
        let (u_lo, u_hi) = (u0.min(), u0.max());
        let (a_lo, a_hi) = fp.speed_bounds(u_lo, u_hi);
        if a_hi - a_lo > 1e-12 * (1.0 + a_lo.abs().max(a_hi.abs())) {
            fp.require_convex()?;
        }
        let pot = potential_initial(fp, u0)?;
        let g = u0.grid;
        let dx = g.dx();
        let reach = t * a_lo.abs().max(a_hi.abs()) + dx;
        let n_ext = (reach / dx).ceil() as usize;

        // node list with constant extension on both sides
        let mut nodes: Vec<(f64, f64, f64)> = Vec::with_capacity(g.n_nodes() + 2 * n_ext);
        let (u_first, u_last) = (u0.values[0], *u0.values.last().expect("non-empty"));
        let (p_first, p_last) = (pot.values()[0], *pot.values().last().expect("non-empty"));
        for k in (1..=n_ext).rev() {
            let x = g.x_min - k as f64 * dx;
            nodes.push((x, u_first, p_first + fp.eta(u_first) * (x - g.x_min)));
        }
        for i in 0..g.n_nodes() {
            nodes.push((g.x(i), u0.values[i], pot.values()[i]));
        }
        for k in 1..=n_ext {
            let x = g.x_max + k as f64 * dx;
            nodes.push((x, u_last, p_last + fp.eta(u_last) * (x - g.x_max)));
        }

        let carry = |x0: f64, u: f64, p0: f64| Launch {
            x: x0 + t * fp.speed(u),
            u,
            phi: p0 + t * (fp.eta(u) * fp.speed(u) - fp.phi(u)),
        };
        let mut launches = Vec::with_capacity(nodes.len() * 2);
        for w in nodes.windows(2) {
            let (x0, u0v, p0) = w[0];
            let (x1, u1v, p1) = w[1];
            launches.push(carry(x0, u0v, p0));
            let spread = (fp.speed(u1v) - fp.speed(u0v)).abs() * t / dx;
            let m = spread.ceil() as usize;
            if m > 1 {
                // sub-launches with linearly interpolated state; potential by trapezoid
                let mut p = p0;
                let mut xp = x0;
                let mut up = u0v;
                for j in 1..m {
                    let s = j as f64 / m as f64;
                    let xs = x0 + s * (x1 - x0);
                    let us = u0v + s * (u1v - u0v);
                    p += 0.5 * (fp.eta(up) + fp.eta(us)) * (xs - xp);
                    launches.push(carry(xs, us, p));
                    xp = xs;
                    up = us;
                }
                let _ = p1;
            }
        }
        let (x_last, u_l, p_l) = *nodes.last().expect("non-empty");
        launches.push(carry(x_last, u_l, p_l));
        Ok(Self { fp: fp.clone(), t, dx, launches })
    }

    /// Returns `(Phi(t, x), u)` where `u` is the state carried by the minimizing characteristic.
    pub fn evaluate(&self, x: f64) -> Result<(f64, f64)> {
        let consider = |best: &mut Option<(f64, f64)>, phi: f64, u: f64| {
            if best.is_none_or(|(b, _)| phi < b) {
                *best = Some((phi, u));
            }
        };
        let mut best = None;
        for w in self.launches.windows(2) {
            let (l, r) = (w[0], w[1]);
            let (lo, hi) = if l.x <= r.x { (l, r) } else { (r, l) };
            if x >= lo.x && x <= hi.x && hi.x > lo.x {
                let s = (x - lo.x) / (hi.x - lo.x);
                consider(&mut best, lo.phi + s * (hi.phi - lo.phi), lo.u + s * (hi.u - lo.u));
            }
        }
        if best.is_none() {
            // tangent extension undershoots a convex potential, so it is only a fallback
            for l in &self.launches {
                if (l.x - x).abs() <= 0.5 * self.dx {
                    consider(&mut best, l.phi + self.fp.eta(l.u) * (x - l.x), l.u);
                }
            }
        }
        best.ok_or(Error::NoCharacteristicHits { t: self.t, x })
    }

    pub fn solve_on(&self, grid: Grid1D) -> Result<GridFunction> {
        let mut values = Vec::with_capacity(grid.n_nodes());
        for x in grid.nodes() {
            values.push(self.evaluate(x)?.1);
        }
        GridFunction::new(grid, values, self.t)
    }
}

/// Potential by minimizing over characteristics (single query).
pub fn characteristics_potential(fp: &FluxPair, u0: &GridFunction, t: f64, x: f64) -> Result<f64> {
    Characteristics::new(fp, u0, t)?.evaluate(x).map(|r| r.0)
}

/// Parameterization of the sup variable in the monotone-data Hopf formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reading {
    /// `s` is a state value in `[u-, u+]`, density `eta(s)`.
    #[default]
    State,
    /// `s` is a density value in `[eta(u-), eta(u+)]`.
    Density,
}

/// Hopf formula for nondecreasing data, valid without convexity of `H`:
/// `v* = argsup_v [v x - t H(v) - U0*(v)]`, `u = eta^{-1}(v*)`.
#[derive(Debug, Clone)]
pub struct MonotoneHopf {
    fp: FluxPair,
    reading: Reading,
    u_minus: f64,
    u_plus: f64,
    pot: SampledFunction,
    params: Vec<f64>,
    dens: Vec<f64>,
    h_vals: Vec<f64>,
    star: Vec<f64>,
}

impl MonotoneHopf {
    pub fn new(fp: &FluxPair, u0: &GridFunction, reading: Reading, n_s: usize) -> Result<Self> {
        if let Some(i) = u0.values.windows(2).position(|w| w[1] < w[0] - 1e-12) {
            return Err(Error::NotMonotoneData(u0.grid.x(i + 1)));
        }
        let pot = potential_initial(fp, u0)?;
        let u_minus = u0.values[0];
        let u_plus = *u0.values.last().expect("non-empty");
        let n = n_s.max(3);
        let (params, dens): (Vec<f64>, Vec<f64>) = match reading {
            Reading::State => linspace(u_minus, u_plus, n).into_iter().map(|s| (s, fp.eta(s))).unzip(),
            Reading::Density => linspace(fp.eta(u_minus), fp.eta(u_plus), n).into_iter().map(|v| (v, v)).unzip(),
        };
        let h_vals = dens.iter().map(|&v| fp.hamiltonian(v)).collect::<Result<Vec<_>>>()?;
        let star = dens.iter().map(|&v| conjugate_at(&pot, v)).collect();
        Ok(Self { fp: fp.clone(), reading, u_minus, u_plus, pot, params, dens, h_vals, star })
    }

    fn density(&self, p: f64) -> f64 {
        match self.reading {
            Reading::State => self.fp.eta(p),
            Reading::Density => p,
        }
    }

    fn functional(&self, t: f64, x: f64, p: f64) -> f64 {
        let v = self.density(p);
        match self.fp.hamiltonian(v) {
            Ok(h) => v * x - t * h - conjugate_at(&self.pot, v),
            Err(_) => f64::NEG_INFINITY,
        }
    }

    pub fn solve(&self, t: f64, x: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Invalid(format!("monotone Hopf formula needs t > 0, got {t}")));
        }
        if self.u_minus == self.u_plus {
            return Ok(self.u_minus);
        }
        let mut best = 0;
        let mut best_v = f64::NEG_INFINITY;
        for i in 0..self.params.len() {
            let v = self.dens[i] * x - t * self.h_vals[i] - self.star[i];
            if v > best_v {
                best_v = v;
                best = i;
            }
        }
        let a = self.params[best.saturating_sub(1)];
        let b = self.params[(best + 1).min(self.params.len() - 1)];
        let (p, neg) = golden_section_min(|p| -self.functional(t, x, p), a, b, GOLDEN_TOL);
        let p_star = if -neg > best_v { p } else { self.params[best] };
        let u = match self.reading {
            Reading::State => p_star,
            Reading::Density => self.fp.eta_inverse(p_star)?,
        };
        let (lo, hi) = (self.u_minus.min(self.u_plus), self.u_minus.max(self.u_plus));
        Ok(u.clamp(lo, hi))
    }

    pub fn solve_on(&self, grid: Grid1D, t: f64) -> Result<GridFunction> {
        let mut values = Vec::with_capacity(grid.n_nodes());
        for x in grid.nodes() {
            values.push(self.solve(t, x)?);
        }
        GridFunction::new(grid, values, t)
    }
}

/// `u(t, x)` by the monotone-data Hopf formula (single query, state reading).
pub fn hopf_monotone(fp: &FluxPair, u0: &GridFunction, t: f64, x: f64) -> Result<f64> {
    MonotoneHopf::new(fp, u0, Reading::State, DEFAULT_SCAN)?.solve(t, x)
}
