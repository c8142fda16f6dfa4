//! Discontinuity analysis for step data: Rankine–Hugoniot speeds, the Oleinik
//! chord condition, the Lax condition, speeds of weighted divergent forms and
//! the exact self-similar solution for a convex Hamiltonian.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux::{inverse_monotone, FluxPair};
use crate::numerics::adaptive_simpson;

const LAX_TOL: f64 = 1e-12;
const E_TOL: f64 = 1e-10;
pub const DEFAULT_E_SAMPLES: usize = 101;

/// Step data: `u_minus` to the left of the origin, `u_plus` to the right.
#[derive(Debug, Clone)]
pub struct RiemannProblem {
    pub fp: FluxPair,
    pub u_minus: f64,
    pub u_plus: f64,
}

impl RiemannProblem {
    pub fn new(fp: FluxPair, u_minus: f64, u_plus: f64) -> Result<Self> {
        fp.check_domain(u_minus)?;
        fp.check_domain(u_plus)?;
        Ok(Self { fp, u_minus, u_plus })
    }

    fn lo_hi(&self) -> (f64, f64) {
        (self.u_minus.min(self.u_plus), self.u_minus.max(self.u_plus))
    }
}

/// Full admissibility verdict for a single jump.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscontinuityReport {
    pub speed: f64,
    pub satisfies_rh: bool,
    pub satisfies_e: bool,
    pub satisfies_lax: bool,
    pub violating_state: Option<f64>,
    pub admissible_interval: Option<(f64, f64)>,
}

/// Chord slope `sigma(u1, u2) = [phi] / [eta]`.
pub fn chord_speed(fp: &FluxPair, u1: f64, u2: f64) -> Result<f64> {
    if u1 == u2 {
        return Err(Error::DegenerateStates(u1));
    }
    Ok((fp.phi(u2) - fp.phi(u1)) / (fp.eta(u2) - fp.eta(u1)))
}

/// Rankine–Hugoniot speed of the jump.
pub fn rh_speed(rp: &RiemannProblem) -> Result<f64> {
    chord_speed(&rp.fp, rp.u_minus, rp.u_plus)
}

/// Strict Lax inequality `a(u_plus) < k < a(u_minus)`; equality within 1e-12 fails.
pub fn check_lax(rp: &RiemannProblem) -> Result<bool> {
    let k = rh_speed(rp)?;
    let a_plus = rp.fp.speed(rp.u_plus);
    let a_minus = rp.fp.speed(rp.u_minus);
    Ok(a_plus + LAX_TOL < k && k < a_minus - LAX_TOL)
}

/// Oleinik E-condition on `n_samples` interior states. Returns the verdict and
/// the first violating intermediate state, scanning from `u_minus` toward `u_plus`.
pub fn check_e_condition(rp: &RiemannProblem, n_samples: usize) -> Result<(bool, Option<f64>)> {
    if n_samples < 3 {
        return Err(Error::Invalid(format!("E-condition needs >= 3 samples, got {n_samples}")));
    }
    let k = rh_speed(rp)?;
    let (um, up) = (rp.u_minus, rp.u_plus);
    for j in 1..=n_samples {
        let u = um + (up - um) * j as f64 / (n_samples + 1) as f64;
        let s = chord_speed(&rp.fp, um, u)?;
        if s < k - E_TOL {
            return Ok((false, Some(u)));
        }
    }
    Ok((true, None))
}

/// The open interval of speeds reachable by multiplying the law by a positive
/// smooth weight: `(min a, max a)` over the two states, for a convex Hamiltonian.
pub fn admissible_speed_interval(rp: &RiemannProblem) -> Result<(f64, f64)> {
    rp.fp.require_convex()?;
    let a1 = rp.fp.speed(rp.u_minus);
    let a2 = rp.fp.speed(rp.u_plus);
    Ok((a1.min(a2), a1.max(a2)))
}

/// Jump speed of the divergent form obtained with the weight `psi = f'/eta'`:
/// `k = ∫ a(u) f'(u) du / (f(u_+) - f(u_-))`.
pub fn weighted_form_speed<W: Fn(f64) -> f64>(rp: &RiemannProblem, f_prime: W) -> Result<f64> {
    if rp.u_minus == rp.u_plus {
        return Err(Error::DegenerateStates(rp.u_minus));
    }
    let (lo, hi) = rp.lo_hi();
    for j in 1..=101 {
        let u = lo + (hi - lo) * j as f64 / 102.0;
        let w = f_prime(u);
        if !(w > 0.0) {
            return Err(Error::NonPositiveWeight(u));
        }
    }
    let num = adaptive_simpson(|u| rp.fp.speed(u) * f_prime(u), rp.u_minus, rp.u_plus, 1e-12);
    let den = adaptive_simpson(&f_prime, rp.u_minus, rp.u_plus, 1e-12);
    Ok(num / den)
}

/// One elementary wave of a self-similar solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Wave {
    Shock { speed: f64, left: f64, right: f64 },
    Rarefaction { speed_left: f64, speed_right: f64, left: f64, right: f64 },
}

/// Exact solution `u(x/t)` of a Riemann problem.
#[derive(Debug, Clone)]
pub struct SelfSimilarSolution {
    pub fp: FluxPair,
    pub u_minus: f64,
    pub u_plus: f64,
    pub waves: Vec<Wave>,
}

impl SelfSimilarSolution {
    pub fn evaluate(&self, t: f64, x: f64) -> f64 {
        if t <= 0.0 {
            return if x <= 0.0 { self.u_minus } else { self.u_plus };
        }
        let xi = x / t;
        match self.waves.first() {
            None => self.u_minus,
            Some(Wave::Shock { speed, left, right }) => {
                if xi < *speed {
                    *left
                } else {
                    *right
                }
            }
            Some(Wave::Rarefaction { speed_left, speed_right, left, right }) => {
                if xi <= *speed_left {
                    *left
                } else if xi >= *speed_right {
                    *right
                } else {
                    inverse_monotone(|u| self.fp.speed(u), xi, (left.min(*right), left.max(*right))).unwrap_or(*left)
                }
            }
        }
    }

    /// Shock positions at time `t`.
    pub fn shock_positions(&self, t: f64) -> Vec<f64> {
        self.waves
            .iter()
            .filter_map(|w| match w {
                Wave::Shock { speed, .. } => Some(speed * t),
                _ => None,
            })
            .collect()
    }
}

/// Exact entropy solution of the Riemann problem for a strictly convex Hamiltonian.
pub fn solve_riemann_convex(rp: &RiemannProblem) -> Result<SelfSimilarSolution> {
    rp.fp.require_convex()?;
    let mut sol = SelfSimilarSolution { fp: rp.fp.clone(), u_minus: rp.u_minus, u_plus: rp.u_plus, waves: vec![] };
    if rp.u_minus == rp.u_plus {
        return Ok(sol);
    }
    let wave = if check_lax(rp)? {
        Wave::Shock { speed: rh_speed(rp)?, left: rp.u_minus, right: rp.u_plus }
    } else {
        Wave::Rarefaction {
            speed_left: rp.fp.speed(rp.u_minus),
            speed_right: rp.fp.speed(rp.u_plus),
            left: rp.u_minus,
            right: rp.u_plus,
        }
    };
    sol.waves.push(wave);
    Ok(sol)
}

/// Full report for one jump, as printed by the `riemann` subcommand.
pub fn analyze(rp: &RiemannProblem, n_samples: usize) -> Result<DiscontinuityReport> {
    let speed = rh_speed(rp)?;
    let (satisfies_e, violating_state) = check_e_condition(rp, n_samples)?;
    Ok(DiscontinuityReport {
        speed,
        satisfies_rh: true,
        satisfies_e,
        satisfies_lax: check_lax(rp)?,
        violating_state,
        admissible_interval: admissible_speed_interval(rp).ok(),
    })
}

/// One jump of a piecewise-constant candidate: `left | right` moving at `speed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub left: f64,
    pub right: f64,
    pub speed: f64,
}

/// Oleinik's family of weak solutions of Burgers' equation for step data `(1, -1)`:
/// `1 | -q | q | -1` with jumps moving at `(1-q)/2`, `0`, `(q-1)/2`.
/// Only `q = 1` is the entropy solution.
#[derive(Debug, Clone, Copy)]
pub struct OleinikFamily {
    pub q: f64,
}

impl OleinikFamily {
    pub fn evaluate(&self, t: f64, x: f64) -> f64 {
        let q = self.q;
        let s = 0.5 * (1.0 - q) * t;
        if x <= s {
            1.0
        } else if x <= 0.0 {
            -q
        } else if x <= -s {
            q
        } else {
            -1.0
        }
    }

    pub fn jumps(&self) -> Vec<Jump> {
        let q = self.q;
        if q == 1.0 {
            return vec![Jump { left: 1.0, right: -1.0, speed: 0.0 }];
        }
        vec![
            Jump { left: 1.0, right: -q, speed: 0.5 * (1.0 - q) },
            Jump { left: -q, right: q, speed: 0.0 },
            Jump { left: q, right: -1.0, speed: 0.5 * (q - 1.0) },
        ]
    }
}
