//! Small numerical kernels shared by the solvers: quadrature, 1-D minimization,
//! monotone cubic interpolation and least-squares slopes.

use crate::error::{Error, Result};

/// `n` equally spaced points on `[a, b]`, endpoints included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => {
            let step = (b - a) / (n - 1) as f64;
            (0..n).map(|i| if i == n - 1 { b } else { a + step * i as f64 }).collect()
        }
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to relative tolerance `rel_tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let scale = whole.abs().max(1e-300);
    // absolute target derived from the coarse estimate; refined recursively
    let tol = (rel_tol * scale).max(1e-15 * (b - a).abs());
    simpson_rec(&f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // stop once the correction is at roundoff level
    let floor = 8.0 * f64::EPSILON * (left.abs() + right.abs());
    if depth == 0 || delta.abs() <= (15.0 * tol).max(floor) {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Golden-section search for a minimizer of `f` on `[a, b]`, stopping when the
/// bracket is shorter than `tol`. Returns `(argmin, min)`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while hi - lo > tol && iter < 200 {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
        iter += 1;
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn log_log_slope(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 (h, err) pairs, got {}", pairs.len())));
    }
    if let Some(&(h, e)) = pairs.iter().find(|(h, e)| !(*h > 0.0) || !(*e > 0.0)) {
        return Err(Error::DegenerateFit(format!("h and err must be positive (h = {h}, err = {e})")));
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 1e-300 {
        return Err(Error::DegenerateFit("all h values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes).
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::Invalid("pchip needs >= 2 matching knots".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid("pchip knots must be strictly increasing".into()));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            d[0] = pchip_end(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = pchip_end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Self { x, y, d })
    }

    /// Hermite interpolant with caller-supplied nodal derivatives.
    pub fn with_slopes(x: Vec<f64>, y: Vec<f64>, d: Vec<f64>) -> Result<Self> {
        if x.len() < 2 || y.len() != x.len() || d.len() != x.len() {
            return Err(Error::Invalid("hermite needs >= 2 matching knots".into()));
        }
        Ok(Self { x, y, d })
    }

    fn locate(&self, u: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&xi| xi <= u) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    /// Returns value, first and second derivative at `u` (cubic extrapolation outside).
    pub fn eval_all(&self, u: f64) -> (f64, f64, f64) {
        let i = self.locate(u);
        let h = self.x[i + 1] - self.x[i];
        let s = (u - self.x[i]) / h;
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.d[i], self.d[i + 1]);
        let h00 = 2.0 * s.powi(3) - 3.0 * s * s + 1.0;
        let h10 = s.powi(3) - 2.0 * s * s + s;
        let h01 = -2.0 * s.powi(3) + 3.0 * s * s;
        let h11 = s.powi(3) - s * s;
        let v = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
        let dh00 = 6.0 * s * s - 6.0 * s;
        let dh10 = 3.0 * s * s - 4.0 * s + 1.0;
        let dh01 = -6.0 * s * s + 6.0 * s;
        let dh11 = 3.0 * s * s - 2.0 * s;
        let dv = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
        let ddh00 = 12.0 * s - 6.0;
        let ddh10 = 6.0 * s - 4.0;
        let ddh01 = -12.0 * s + 6.0;
        let ddh11 = 6.0 * s - 2.0;
        let ddv = (ddh00 * y0 + ddh01 * y1) / (h * h) + (ddh10 * d0 + ddh11 * d1) / h;
        (v, dv, ddv)
    }
}

fn pchip_end(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}
