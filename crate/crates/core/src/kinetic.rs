//! BGK-type kinetic relaxation `eta'(v) f_t + phi'(v) f_x = (chi_u(v) - f) / eps`
//! on a velocity grid, whose macroscopic state tends to the entropy solution
//! as `eps -> 0`.
//!
//! Velocity cells carry averages with respect to the measure `d eta(v)`, so
//! the discrete `eta`-content `sum_j m_j f_j` (with `m_j` the `eta`-length of
//! cell `j`) of an equilibrium `chi_u` is exactly `eta(u) - eta(0)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flux::FluxPair;
use crate::grid::{Grid1D, GridFunction};

/// Uniform velocity cells `[v_min + j dv, v_min + (j + 1) dv]`, `j < n_v`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct VelocityGrid {
    pub v_min: f64,
    pub v_max: f64,
    pub n_v: usize,
}

impl VelocityGrid {
    pub fn new(v_min: f64, v_max: f64, n_v: usize) -> Result<Self> {
        if !(v_min < v_max) {
            return Err(Error::Invalid(format!("velocity grid needs v_min < v_max, got [{v_min}, {v_max}]")));
        }
        if n_v < 16 {
            return Err(Error::Invalid(format!("velocity grid needs n_v >= 16, got {n_v}")));
        }
        Ok(Self { v_min, v_max, n_v })
    }

    /// Covers the state domain and `v = 0`, padded by one cell on each side.
    pub fn covering(fp: &FluxPair, n_v: usize) -> Result<Self> {
        let (a, b) = fp.domain();
        let (lo, hi) = (a.min(0.0), b.max(0.0));
        let n = n_v.max(16);
        let dv = (hi - lo) / (n - 2) as f64;
        Self::new(lo - dv, hi + dv, n)
    }

    pub fn dv(&self) -> f64 {
        (self.v_max - self.v_min) / self.n_v as f64
    }

    pub fn center(&self, j: usize) -> f64 {
        self.v_min + (j as f64 + 0.5) * self.dv()
    }

    fn edges(&self, j: usize) -> (f64, f64) {
        let dv = self.dv();
        (self.v_min + j as f64 * dv, self.v_min + (j + 1) as f64 * dv)
    }
}

/// `f(x_i, v_j)` stored slice-major: `values[j][i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticDensity {
    pub x_grid: Grid1D,
    pub v_grid: VelocityGrid,
    pub values: Vec<Vec<f64>>,
    pub time: f64,
}

/// The equilibrium indicator: `sign u` where `(u - v) v >= 0`, else `0`.
pub fn chi(u: f64, v: f64) -> f64 {
    if (u - v) * v >= 0.0 && u != 0.0 {
        u.signum()
    } else {
        0.0
    }
}

/// `∫ f dv` per node by the midpoint rule over the velocity cells.
pub fn moment(f: &KineticDensity) -> GridFunction {
    let dv = f.v_grid.dv();
    let n = f.x_grid.n_nodes();
    let values = (0..n).map(|i| f.values.iter().map(|s| s[i]).sum::<f64>() * dv).collect();
    GridFunction { grid: f.x_grid, values, time: f.time }
}

/// Velocity-cell data shared by every step of a run.
struct Cells {
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// `eta`-length of each cell, velocities clamped to the domain.
    m: Vec<f64>,
    speed: Vec<f64>,
    eta_prime: Vec<f64>,
}

impl Cells {
    fn new(fp: &FluxPair, vg: &VelocityGrid) -> Self {
        let (a, b) = fp.domain();
        let mut c = Cells { lo: vec![], hi: vec![], m: vec![], speed: vec![], eta_prime: vec![] };
        for j in 0..vg.n_v {
            let (lo, hi) = vg.edges(j);
            c.lo.push(lo);
            c.hi.push(hi);
            let m = fp.eta(hi.clamp(a, b)) - fp.eta(lo.clamp(a, b));
            // cells outside the domain up to rounding carry no measure
            let full = fp.eta_prime(vg.center(j).clamp(a, b)).max(fp.eta_prime_min()) * vg.dv();
            c.m.push(if m > 1e-9 * full { m } else { 0.0 });
            let v = vg.center(j).clamp(a, b);
            c.speed.push(fp.speed(v));
            c.eta_prime.push(fp.eta_prime(v));
        }
        c
    }

    /// `eta`-measure average of `chi_u` over cell `j`.
    fn chi_average(&self, fp: &FluxPair, u: f64, j: usize) -> f64 {
        if u == 0.0 || self.m[j] <= 0.0 {
            return 0.0;
        }
        let (a, b) = fp.domain();
        let lo = self.lo[j].max(u.min(0.0));
        let hi = self.hi[j].min(u.max(0.0));
        if hi <= lo {
            return 0.0;
        }
        u.signum() * (fp.eta(hi.clamp(a, b)) - fp.eta(lo.clamp(a, b))) / self.m[j]
    }
}

/// `chi_{u0(x)}` on every node, averaged over each velocity cell.
pub fn equilibrium(fp: &FluxPair, u0: &GridFunction, vg: &VelocityGrid) -> Result<KineticDensity> {
    for &u in &u0.values {
        fp.check_domain(u)?;
    }
    let cells = Cells::new(fp, vg);
    let values = (0..vg.n_v).map(|j| u0.values.iter().map(|&u| cells.chi_average(fp, u, j)).collect()).collect();
    Ok(KineticDensity { x_grid: u0.grid, v_grid: *vg, values, time: u0.time })
}

/// State with the same discrete `eta`-content as `f`: `eta(u) = eta(0) + sum_j m_j f_j`.
/// Equals [`moment`] when `eta` is the identity.
pub fn macroscopic_state(fp: &FluxPair, f: &KineticDensity) -> Result<GridFunction> {
    let cells = Cells::new(fp, &f.v_grid);
    let w: Vec<f64> = cells.m.clone();
    let n = f.x_grid.n_nodes();
    let values = (0..n)
        .map(|i| {
            let target: f64 = f.values.iter().zip(&w).map(|(s, wj)| wj * s[i]).sum();
            state_for_content(fp, &cells, &w, target)
        })
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(f.x_grid, values, f.time)
}

/// Solves `sum_j w_j chi_avg(u, j) = target` for `u`, where the left side is
/// `∫_0^u rho d eta` with the cell density `rho_j = w_j / m_j`.
fn state_for_content(fp: &FluxPair, cells: &Cells, w: &[f64], target: f64) -> Result<f64> {
    let (a, b) = fp.domain();
    let n = w.len();
    // cumulative content at the left edge of each cell, shifted so that K(0) = 0
    let mut k = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    k.push(0.0);
    for &wj in w {
        acc += wj;
        k.push(acc);
    }
    let zero_cell = (0..n).find(|&j| cells.lo[j] <= 0.0 && 0.0 < cells.hi[j]).unwrap_or(0);
    let rho0 = if cells.m[zero_cell] > 0.0 { w[zero_cell] / cells.m[zero_cell] } else { 0.0 };
    let k0 = k[zero_cell] + rho0 * (fp.eta(0.0_f64.clamp(a, b)) - fp.eta(cells.lo[zero_cell].clamp(a, b)));
    let goal = (target + k0).clamp(k[0], k[n]);
    // last cell whose left-edge content does not exceed the goal and that carries weight
    let mut j = k.partition_point(|&kk| kk <= goal).saturating_sub(1).min(n - 1);
    while j > 0 && !(w[j] > 0.0) {
        j -= 1;
    }
    if !(w[j] > 0.0) {
        return Ok(0.0_f64.clamp(a, b));
    }
    let rho = w[j] / cells.m[j];
    let v = fp.eta(cells.lo[j].clamp(a, b)) + (goal - k[j]) / rho;
    let (lo_v, hi_v) = fp.eta_range();
    let u = fp.eta_inverse(v.clamp(lo_v, hi_v))?;
    if !u.is_finite() {
        return Err(Error::NonFinite(format!("kinetic state for content {target}")));
    }
    Ok(u.clamp(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticConfig {
    pub eps: f64,
    pub t_final: f64,
    pub cfl_safety: f64,
}

impl KineticConfig {
    pub fn new(eps: f64, t_final: f64) -> Self {
        Self { eps, t_final, cfl_safety: 0.45 }
    }
}

/// Macroscopic state at `t_final` of the kinetic relaxation started at equilibrium.
pub fn kinetic_solve(
    fp: &FluxPair,
    u0: &GridFunction,
    eps: f64,
    t_final: f64,
    vg: &VelocityGrid,
) -> Result<GridFunction> {
    let f = kinetic_evolve(fp, u0, &KineticConfig::new(eps, t_final), vg)?;
    macroscopic_state(fp, &f)
}

/// Evolves the kinetic density by transport/relaxation splitting.
pub fn kinetic_evolve(
    fp: &FluxPair,
    u0: &GridFunction,
    cfg: &KineticConfig,
    vg: &VelocityGrid,
) -> Result<KineticDensity> {
    if !(cfg.eps > 0.0) {
        return Err(Error::UnstableConfig(format!("eps must be positive, got {}", cfg.eps)));
    }
    if !(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0) {
        return Err(Error::UnstableConfig(format!("cfl_safety must lie in (0, 1], got {}", cfg.cfl_safety)));
    }
    if !(cfg.t_final >= 0.0) {
        return Err(Error::Invalid(format!("t_final must be >= 0, got {}", cfg.t_final)));
    }
    let (a, b) = fp.domain();
    if vg.v_min > a.min(0.0) || vg.v_max < b.max(0.0) {
        return Err(Error::Invalid(format!(
            "velocity grid [{}, {}] must cover the domain [{a}, {b}] and 0",
            vg.v_min, vg.v_max
        )));
    }
    let cells = Cells::new(fp, vg);
    let mut f = equilibrium(fp, u0, vg)?;
    let dx = u0.grid.dx();
    let c_max = cells.speed.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let dt_max = if c_max > 0.0 { cfg.cfl_safety * dx / c_max } else { cfg.t_final.max(dx) };
    let n = u0.grid.n_nodes();
    let mut t = 0.0;
    while cfg.t_final - t > 1e-14 * cfg.t_final.max(1.0) {
        let dt = dt_max.min(cfg.t_final - t);
        // (i) upwind transport of each slice, boundary nodes fixed
        f.values.par_iter_mut().zip(cells.speed.par_iter()).for_each(|(slice, &c)| {
            let nu = c * dt / dx;
            let old = slice.clone();
            if c > 0.0 {
                for i in 1..n - 1 {
                    slice[i] = old[i] - nu * (old[i] - old[i - 1]);
                }
            } else if c < 0.0 {
                for i in 1..n - 1 {
                    slice[i] = old[i] - nu * (old[i + 1] - old[i]);
                }
            }
        });
        // (ii) exact relaxation toward the equilibrium with the same eta-content
        let decay: Vec<f64> =
            cells.eta_prime.iter().map(|&ep| if ep > 0.0 { (-dt / (cfg.eps * ep)).exp() } else { 0.0 }).collect();
        let w: Vec<f64> = cells.m.iter().zip(&decay).map(|(m, e)| m * (1.0 - e)).collect();
        let targets: Vec<f64> = (1..n - 1)
            .into_par_iter()
            .map(|i| {
                let content: f64 = f.values.iter().zip(&w).map(|(s, wj)| wj * s[i]).sum();
                state_for_content(fp, &cells, &w, content)
            })
            .collect::<Result<Vec<_>>>()?;
        for (k, &u) in targets.iter().enumerate() {
            let i = k + 1;
            for (j, &d) in decay.iter().enumerate() {
                let eq = cells.chi_average(fp, u, j);
                let v = &mut f.values[j][i];
                *v = eq + (*v - eq) * d;
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("kinetic density at x = {}", u0.grid.x(i))));
                }
            }
        }
        t += dt;
    }
    f.time = cfg.t_final;
    Ok(f)
}
