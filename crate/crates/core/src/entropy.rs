//! Certificates for candidate solutions: weak-form and Kruzhkov residuals
//! against mollifier bumps, the `|u - k|` decomposition of smooth functions,
//! and the `v = eta(u)` change of variables.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flux::FluxPair;
use crate::grid::{l1_distance, GridFunction};
use crate::numerics::{adaptive_simpson, linspace};

/// `exp(-1/(1 - s^2))` on `|s| < 1`, with derivative.
fn bump(s: f64) -> (f64, f64) {
    if s.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let d = 1.0 - s * s;
    let b = (-1.0 / d).exp();
    (b, -2.0 * s / (d * d) * b)
}

/// Tensor mollifier `B((t - t0)/r_t) B((x - x0)/r_x)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TestFunction {
    pub center: (f64, f64),
    pub radii: (f64, f64),
}

impl TestFunction {
    pub fn new(center: (f64, f64), radii: (f64, f64)) -> Result<Self> {
        if !(radii.0 > 0.0 && radii.1 > 0.0) {
            return Err(Error::Invalid(format!("bump radii must be positive, got {radii:?}")));
        }
        Ok(Self { center, radii })
    }

    /// `(f, f_t, f_x)` at `(t, x)`.
    pub fn eval(&self, t: f64, x: f64) -> (f64, f64, f64) {
        let (bt, dbt) = bump((t - self.center.0) / self.radii.0);
        let (bx, dbx) = bump((x - self.center.1) / self.radii.1);
        (bt * bx, dbt / self.radii.0 * bx, bt * dbx / self.radii.1)
    }

    pub fn support_measure(&self) -> f64 {
        4.0 * self.radii.0 * self.radii.1
    }

    /// Quadrature error budget `10 * |supp f| / quad_n`.
    pub fn tolerance(&self, quad_n: usize) -> f64 {
        10.0 * self.support_measure() / quad_n as f64
    }

    fn check_inside(&self, cand: &CandidateSolution) -> Result<()> {
        let (t0, x0) = self.center;
        let (rt, rx) = self.radii;
        let slack = 1e-12;
        let inside = t0 - rt > 0.0
            && t0 - rt >= cand.t_window.0 - slack
            && t0 + rt <= cand.t_window.1 + slack
            && x0 - rx >= cand.x_window.0 - slack
            && x0 + rx <= cand.x_window.1 + slack;
        if inside {
            Ok(())
        } else {
            Err(Error::SupportEscape)
        }
    }
}

type Evaluator = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A bounded function `u(t, x)` on a time-space window.
#[derive(Clone)]
pub struct CandidateSolution {
    eval: Evaluator,
    pub t_window: (f64, f64),
    pub x_window: (f64, f64),
    /// Declared value bounds; samples outside are rejected.
    pub range: (f64, f64),
}

impl std::fmt::Debug for CandidateSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CandidateSolution")
            .field("t_window", &self.t_window)
            .field("x_window", &self.x_window)
            .field("range", &self.range)
            .finish_non_exhaustive()
    }
}

impl CandidateSolution {
    pub fn from_fn<F>(f: F, t_window: (f64, f64), x_window: (f64, f64), range: (f64, f64)) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        if !(t_window.0 < t_window.1 && x_window.0 < x_window.1 && range.0 <= range.1) {
            return Err(Error::Invalid(format!(
                "bad candidate windows t {t_window:?}, x {x_window:?}, range {range:?}"
            )));
        }
        Ok(Self { eval: Arc::new(f), t_window, x_window, range })
    }

    /// Piecewise-linear interpolation in `t` between snapshots sharing one grid.
    pub fn from_snapshots(snaps: Vec<GridFunction>) -> Result<Self> {
        if snaps.len() < 2 {
            return Err(Error::Invalid(format!("need at least 2 snapshots, got {}", snaps.len())));
        }
        let grid = snaps[0].grid;
        if snaps.iter().any(|s| s.grid != grid) {
            return Err(Error::GridMismatch("snapshots live on different grids".into()));
        }
        if snaps.windows(2).any(|w| !(w[1].time > w[0].time)) {
            return Err(Error::Invalid("snapshot times must be strictly increasing".into()));
        }
        let lo = snaps.iter().map(GridFunction::min).fold(f64::INFINITY, f64::min);
        let hi = snaps.iter().map(GridFunction::max).fold(f64::NEG_INFINITY, f64::max);
        let t_window = (snaps[0].time, snaps[snaps.len() - 1].time);
        let x_window = (grid.x_min, grid.x_max);
        let times: Vec<f64> = snaps.iter().map(|s| s.time).collect();
        let eval = move |t: f64, x: f64| {
            let j = times.partition_point(|&s| s <= t).clamp(1, times.len() - 1);
            let w = ((t - times[j - 1]) / (times[j] - times[j - 1])).clamp(0.0, 1.0);
            (1.0 - w) * snaps[j - 1].interpolate(x) + w * snaps[j].interpolate(x)
        };
        Self::from_fn(eval, t_window, x_window, (lo, hi))
    }

    pub fn value(&self, t: f64, x: f64) -> f64 {
        (self.eval)(t, x)
    }

    /// The candidate at time `t` on the nodes of `like`.
    pub fn slice(&self, like: &GridFunction, t: f64) -> Result<GridFunction> {
        GridFunction::from_fn(like.grid, t, |x| self.value(t, x))
    }
}

/// Quadrature nodes of one bump: `eta(u), phi(u), w f_t, w f_x`.
struct Samples {
    eta: Vec<f64>,
    phi: Vec<f64>,
    wft: Vec<f64>,
    wfx: Vec<f64>,
}

fn sample(fp: &FluxPair, cand: &CandidateSolution, tf: &TestFunction, quad_n: usize) -> Result<Samples> {
    tf.check_inside(cand)?;
    if quad_n < 2 {
        return Err(Error::Invalid(format!("quad_n must be >= 2, got {quad_n}")));
    }
    let (t0, x0) = tf.center;
    let (rt, rx) = tf.radii;
    let (ht, hx) = (2.0 * rt / quad_n as f64, 2.0 * rx / quad_n as f64);
    let w = ht * hx;
    let cap = quad_n * quad_n;
    let mut s = Samples {
        eta: Vec::with_capacity(cap),
        phi: Vec::with_capacity(cap),
        wft: Vec::with_capacity(cap),
        wfx: Vec::with_capacity(cap),
    };
    let (lo, hi) = cand.range;
    for i in 0..quad_n {
        let t = t0 - rt + (i as f64 + 0.5) * ht;
        for j in 0..quad_n {
            let x = x0 - rx + (j as f64 + 0.5) * hx;
            let (_, ft, fx) = tf.eval(t, x);
            if ft == 0.0 && fx == 0.0 {
                continue;
            }
            let u = cand.value(t, x);
            if !u.is_finite() {
                return Err(Error::NonFinite(format!("candidate at (t, x) = ({t}, {x})")));
            }
            if u < lo - 1e-8 || u > hi + 1e-8 {
                return Err(Error::OutOfRange { v: u, lo, hi });
            }
            s.eta.push(fp.eta(u));
            s.phi.push(fp.phi(u));
            s.wft.push(w * ft);
            s.wfx.push(w * fx);
        }
    }
    Ok(s)
}

impl Samples {
    fn weak(&self) -> f64 {
        (0..self.eta.len()).map(|i| self.eta[i] * self.wft[i] + self.phi[i] * self.wfx[i]).sum()
    }

    fn kruzhkov(&self, eta_k: f64, phi_k: f64) -> f64 {
        (0..self.eta.len())
            .map(|i| {
                let de = self.eta[i] - eta_k;
                // eta is increasing, so sign(u - k) = sign(eta(u) - eta(k))
                let sg = if de > 0.0 {
                    1.0
                } else if de < 0.0 {
                    -1.0
                } else {
                    0.0
                };
                de.abs() * self.wft[i] + sg * (self.phi[i] - phi_k) * self.wfx[i]
            })
            .sum()
    }
}

/// Midpoint quadrature of `∬ eta(u) f_t + phi(u) f_x` on `quad_n x quad_n` points.
pub fn weak_residual(fp: &FluxPair, cand: &CandidateSolution, tf: &TestFunction, quad_n: usize) -> Result<f64> {
    Ok(sample(fp, cand, tf, quad_n)?.weak())
}

/// Midpoint quadrature of `∬ |eta(u) - eta(k)| f_t + sign(u - k)(phi(u) - phi(k)) f_x`;
/// entropy solutions give values `>= -tf.tolerance(quad_n)`.
pub fn kruzhkov_residual(
    fp: &FluxPair,
    cand: &CandidateSolution,
    tf: &TestFunction,
    entropy_level: f64,
    quad_n: usize,
) -> Result<f64> {
    let s = sample(fp, cand, tf, quad_n)?;
    Ok(s.kruzhkov(fp.eta(entropy_level), fp.phi(entropy_level)))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CertificateConfig {
    pub k_points: usize,
    /// Bump centers per axis: `(time, space)`.
    pub lattice: (usize, usize),
    pub quad_n: usize,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        Self { k_points: 33, lattice: (4, 8), quad_n: 256 }
    }
}

/// Bump placements: centers at the cell midpoints of a `lattice` partition of
/// the window, radii half a cell (scaled by 0.999) and twice that clipped to the window.
pub fn bump_lattice(cand: &CandidateSolution, lattice: (usize, usize)) -> Vec<TestFunction> {
    let (nt, nx) = lattice;
    let t_lo = cand.t_window.0.max(0.0);
    let (tw, xw) = (cand.t_window.1 - t_lo, cand.x_window.1 - cand.x_window.0);
    let (rt1, rx1) = (0.999 * tw / (2 * nt) as f64, 0.999 * xw / (2 * nx) as f64);
    let mut out = Vec::with_capacity(2 * nt * nx);
    for scale in [1.0, 2.0] {
        for i in 0..nt {
            let t0 = t_lo + (i as f64 + 0.5) * tw / nt as f64;
            for j in 0..nx {
                let x0 = cand.x_window.0 + (j as f64 + 0.5) * xw / nx as f64;
                let rt = (scale * rt1).min(0.999 * (t0 - t_lo)).min(0.999 * (cand.t_window.1 - t0));
                let rx = (scale * rx1).min(0.999 * (x0 - cand.x_window.0)).min(0.999 * (cand.x_window.1 - x0));
                out.push(TestFunction { center: (t0, x0), radii: (rt, rx) });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WorstCase {
    pub k: f64,
    pub placement: TestFunction,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Certificate {
    /// Largest `|weak residual|` over the lattice.
    pub weak: WorstCase,
    /// Smallest `residual + tolerance` over k-grid and lattice.
    pub kruzhkov: WorstCase,
    /// Most negative Kruzhkov residual, regardless of tolerance.
    pub most_negative: WorstCase,
    pub checks: usize,
    pub pass: bool,
}

/// Sweeps `k` over `cfg.k_points` values on `[min u, max u]` and every bump of
/// [`bump_lattice`]; passes iff every Kruzhkov residual is `>= -tolerance` and
/// every weak residual is within tolerance.
pub fn kruzhkov_certificate(fp: &FluxPair, cand: &CandidateSolution, cfg: &CertificateConfig) -> Result<Certificate> {
    if cfg.k_points < 2 {
        return Err(Error::Invalid(format!("need at least 2 entropy levels, got {}", cfg.k_points)));
    }
    let ks = linspace(cand.range.0, cand.range.1, cfg.k_points);
    let levels: Vec<(f64, f64, f64)> = ks.iter().map(|&k| (k, fp.eta(k), fp.phi(k))).collect();
    let placements = bump_lattice(cand, cfg.lattice);
    let per_bump: Vec<Result<(WorstCase, WorstCase, WorstCase)>> = placements
        .par_iter()
        .map(|tf| {
            let s = sample(fp, cand, tf, cfg.quad_n)?;
            let tol = tf.tolerance(cfg.quad_n);
            let weak = WorstCase { k: f64::NAN, placement: *tf, residual: s.weak(), tolerance: tol };
            let mut worst = WorstCase { k: f64::NAN, placement: *tf, residual: f64::INFINITY, tolerance: tol };
            for &(k, ek, pk) in &levels {
                let r = s.kruzhkov(ek, pk);
                if r < worst.residual {
                    worst.k = k;
                    worst.residual = r;
                }
            }
            Ok((weak, worst, worst))
        })
        .collect();
    let mut weak: Option<WorstCase> = None;
    let mut kr: Option<WorstCase> = None;
    let mut neg: Option<WorstCase> = None;
    let mut pass = true;
    for r in per_bump {
        let (w, k, n) = r?;
        pass &= w.residual.abs() <= w.tolerance && k.residual >= -k.tolerance;
        if weak.is_none_or(|b| w.residual.abs() - w.tolerance > b.residual.abs() - b.tolerance) {
            weak = Some(w);
        }
        if kr.is_none_or(|b| k.residual + k.tolerance < b.residual + b.tolerance) {
            kr = Some(k);
        }
        if neg.is_none_or(|b| n.residual < b.residual) {
            neg = Some(n);
        }
    }
    match (weak, kr, neg) {
        (Some(weak), Some(kruzhkov), Some(most_negative)) => {
            Ok(Certificate { weak, kruzhkov, most_negative, checks: placements.len() * cfg.k_points, pass })
        }
        _ => Err(Error::Invalid("empty bump lattice".into())),
    }
}

/// A twice-differentiable function given with its first two derivatives.
#[derive(Clone)]
pub struct Smooth {
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub df: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub ddf: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Smooth {
    pub fn new<F, D, DD>(f: F, df: D, ddf: DD) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
        DD: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { f: Arc::new(f), df: Arc::new(df), ddf: Arc::new(ddf) }
    }
}

/// `(Phi(u), rhs)` with
/// `rhs = 1/2 ∫_a^b |u - k| Phi''(k) dk + 1/2 (Phi'(a) + Phi'(b)) u
///        + 1/2 (Phi(a) + Phi(b) - a Phi'(a) - b Phi'(b))`.
pub fn entropy_decomposition_check(phi: &Smooth, interval: (f64, f64), u: f64) -> Result<(f64, f64)> {
    let (a, b) = interval;
    if !(a < u && u < b) {
        return Err(Error::OutOfInterval { u, a, b });
    }
    let ddf = &phi.ddf;
    // split at the kink of |u - k|
    let left = adaptive_simpson(|k| (u - k) * ddf(k), a, u, 1e-13);
    let right = adaptive_simpson(|k| (k - u) * ddf(k), u, b, 1e-13);
    let (fa, fb, da, db) = ((phi.f)(a), (phi.f)(b), (phi.df)(a), (phi.df)(b));
    let rhs = 0.5 * (left + right) + 0.5 * (da + db) * u + 0.5 * (fa + fb - a * da - b * db);
    Ok(((phi.f)(u), rhs))
}

/// L1 distance between `u0` and the candidate at each of `times`.
pub fn initial_trace(cand: &CandidateSolution, u0: &GridFunction, times: &[f64]) -> Result<Vec<(f64, f64)>> {
    times
        .iter()
        .map(|&t| {
            let s = cand.slice(u0, t)?;
            Ok((t, l1_distance(&s, u0)?))
        })
        .collect()
}

/// Default shrinking slices for [`initial_trace`].
pub const TRACE_TIMES: [f64; 3] = [0.05, 0.025, 0.0125];

/// Solves the `u` problem with `fp` and the `v` problem with
/// `(identity, phi ∘ eta^{-1})` from `eta(u0)`, and returns
/// `||eta(u(t)) - v(t)||_{L1}`.
pub fn change_of_variables_check(
    fp: &FluxPair,
    u0: &GridFunction,
    method: &crate::harness::Method,
    t: f64,
) -> Result<f64> {
    let composed = fp.composed()?;
    let v0 = u0.map(|u| fp.eta(u));
    let u = crate::harness::run_method(fp, u0, method, t)?;
    let v = crate::harness::run_method(&composed, &v0, method, t)?;
    l1_distance(&u.map(|x| fp.eta(x)), &v)
}
