//! The flux pair `(eta, phi)` of `eta(u)_t + phi(u)_x = 0` together with the
//! derived objects every solver needs: the characteristic speed
//! `a(u) = phi'(u) / eta'(u)`, the Hamiltonian `H = phi ∘ eta^{-1}`, monotone
//! inversion and discrete Legendre transforms.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{adaptive_simpson, linspace, Pchip};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Number of points used to validate and classify a flux pair.
pub const DOMAIN_SAMPLES: usize = 1001;
/// Magnitude below which `(phi'/eta')'` is treated as zero by [`FluxPair::convexity_class`].
pub const CONVEXITY_THRESHOLD: f64 = 1e-10;
const INVERSE_TOL: f64 = 1e-12;
const FD_TOL: f64 = 1e-6;

/// Efficiency function `Phi(u) > 0` of the enterprise-level model.
#[derive(Clone)]
pub enum Efficiency {
    /// `Phi(u) = alpha + beta * u`.
    Affine {
        alpha: f64,
        beta: f64,
    },
    Custom {
        value: ScalarFn,
        derivative: ScalarFn,
    },
}

impl Efficiency {
    pub fn value(&self, u: f64) -> f64 {
        match self {
            Efficiency::Affine { alpha, beta } => alpha + beta * u,
            Efficiency::Custom { value, .. } => value(u),
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match self {
            Efficiency::Affine { beta, .. } => *beta,
            Efficiency::Custom { derivative, .. } => derivative(u),
        }
    }
}

impl fmt::Debug for Efficiency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Efficiency::Affine { alpha, beta } => write!(f, "Affine({alpha} + {beta} u)"),
            Efficiency::Custom { .. } => write!(f, "Custom"),
        }
    }
}

/// Closures for a user-supplied pair; all six must be consistent.
#[derive(Clone)]
pub struct CustomFlux {
    pub eta: ScalarFn,
    pub eta_prime: ScalarFn,
    pub eta_second: ScalarFn,
    pub phi: ScalarFn,
    pub phi_prime: ScalarFn,
    pub phi_second: ScalarFn,
}

impl CustomFlux {
    /// Pair with `eta(u) = u` and the given flux derivatives.
    pub fn identity_eta(phi: ScalarFn, phi_prime: ScalarFn, phi_second: ScalarFn) -> Self {
        Self {
            eta: Arc::new(|u| u),
            eta_prime: Arc::new(|_| 1.0),
            eta_second: Arc::new(|_| 0.0),
            phi,
            phi_prime,
            phi_second,
        }
    }
}

/// Description of a flux pair, turned into a validated [`FluxPair`] by [`make_flux_pair`].
#[derive(Clone)]
pub enum FluxSpec {
    /// `eta = u`, `phi = u^2 / 2`.
    Burgers,
    /// `eta = u`, `phi = u^p / p`.
    Power {
        p: f64,
    },
    /// `eta = u^2 / 2`, `phi = u^3 / 3`.
    GelfandQ,
    /// `eta = e^u`, `phi = e^{2u} / 2`.
    ExpPair,
    /// `eta = k u`, `phi = c k u` (transport at speed `c`).
    Linear {
        eta_scale: f64,
        speed: f64,
    },
    /// `eta' = 1/(Phi + mu)`, `phi' = (Phi - mu)/(Phi + mu)`, `eta(0) = phi(0) = 0`.
    Ph {
        efficiency: Efficiency,
        mu: f64,
    },
    Custom(CustomFlux),
    /// Tabulated `(u, eta, phi)`, interpolated by monotone piecewise cubics.
    Tabulated {
        u: Vec<f64>,
        eta: Vec<f64>,
        phi: Vec<f64>,
    },
}

impl fmt::Debug for FluxSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FluxSpec::Burgers => write!(f, "Burgers"),
            FluxSpec::Power { p } => write!(f, "Power(p={p})"),
            FluxSpec::GelfandQ => write!(f, "GelfandQ"),
            FluxSpec::ExpPair => write!(f, "ExpPair"),
            FluxSpec::Linear { eta_scale, speed } => write!(f, "Linear(k={eta_scale}, c={speed})"),
            FluxSpec::Ph { efficiency, mu } => write!(f, "Ph({efficiency:?}, mu={mu})"),
            FluxSpec::Custom(_) => write!(f, "Custom"),
            FluxSpec::Tabulated { u, .. } => write!(f, "Tabulated({} knots)", u.len()),
        }
    }
}

#[derive(Clone)]
enum Model {
    Burgers,
    Power(f64),
    GelfandQ,
    ExpPair,
    Linear {
        k: f64,
        c: f64,
    },
    PhAffine {
        alpha: f64,
        beta: f64,
        mu: f64,
    },
    PhTable {
        eff: Efficiency,
        mu: f64,
        eta: Pchip,
    },
    Custom(CustomFlux),
    Tabulated {
        eta: Pchip,
        phi: Pchip,
    },
    /// The same law written for `v = eta(u)`: identity density, flux `phi ∘ eta^{-1}`.
    Composed(FluxPair),
}

struct Inner {
    model: Model,
    label: String,
    a: f64,
    b: f64,
    eta_prime_min: f64,
}

/// A validated flux pair on the closed state interval `[a, b]`.
///
/// Cheap to clone; immutable after construction.
#[derive(Clone)]
pub struct FluxPair {
    inner: Arc<Inner>,
}

impl fmt::Debug for FluxPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FluxPair").field("family", &self.inner.label).field("domain", &self.domain()).finish()
    }
}

/// Sign structure of `(phi'/eta')'` over the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convexity {
    StrictlyConvex,
    StrictlyConcave,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityClass {
    pub tag: Convexity,
    /// Where `(phi'/eta')'` vanishes or changes sign, when `tag` is `Neither`.
    pub witness: Option<f64>,
}

fn powr(u: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() < 64.0 {
        u.powi(p as i32)
    } else {
        u.powf(p)
    }
}

/// Builds and validates a flux pair on `[domain.0, domain.1]`.
///
/// Rejects pairs whose `eta'` is not positive on a 1001-point sample of the
/// domain. A zero of `eta'` exactly at an endpoint is tolerated (the pair is
/// still strictly monotone there) but `eta_prime_min` then excludes that endpoint.
pub fn make_flux_pair(spec: FluxSpec, domain: (f64, f64)) -> Result<FluxPair> {
    let (a, b) = domain;
    if !(a.is_finite() && b.is_finite()) || !(a < b) {
        return Err(Error::Invalid(format!("domain [{a}, {b}] must be a finite interval with a < b")));
    }
    let (model, label) = match spec {
        FluxSpec::Burgers => (Model::Burgers, "burgers".to_string()),
        FluxSpec::Power { p } => {
            if !(p > 1.0) {
                return Err(Error::Invalid(format!("power family needs p > 1, got {p}")));
            }
            (Model::Power(p), format!("power(p={p})"))
        }
        FluxSpec::GelfandQ => (Model::GelfandQ, "gelfand_q".to_string()),
        FluxSpec::ExpPair => (Model::ExpPair, "exp_pair".to_string()),
        FluxSpec::Linear { eta_scale, speed } => {
            (Model::Linear { k: eta_scale, c: speed }, format!("linear(k={eta_scale}, c={speed})"))
        }
        FluxSpec::Ph { efficiency, mu } => {
            if !(mu >= 0.0) {
                return Err(Error::Invalid(format!("mu must be >= 0, got {mu}")));
            }
            for u in linspace(a, b, DOMAIN_SAMPLES) {
                let v = efficiency.value(u);
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("efficiency at u = {u}")));
                }
                if !(v + mu > 0.0) {
                    return Err(Error::NonMonotoneEta { min: 1.0 / (v + mu), at: u });
                }
            }
            let label = format!("ph({efficiency:?}, mu={mu})");
            match efficiency {
                Efficiency::Affine { alpha, beta } => (Model::PhAffine { alpha, beta, mu }, label),
                eff => {
                    let eta = ph_eta_table(&eff, mu, a, b)?;
                    (Model::PhTable { eff, mu, eta }, label)
                }
            }
        }
        FluxSpec::Custom(c) => (Model::Custom(c), "custom".to_string()),
        FluxSpec::Tabulated { u, eta, phi } => {
            if u.len() != eta.len() || u.len() != phi.len() {
                return Err(Error::Invalid("tabulated columns differ in length".into()));
            }
            if let Some(w) = eta.windows(2).position(|w| !(w[1] > w[0])) {
                return Err(Error::NonMonotoneEta { min: eta[w + 1] - eta[w], at: u[w] });
            }
            let (lo, hi) = (u[0], u[u.len() - 1]);
            if a < lo - 1e-12 || b > hi + 1e-12 {
                return Err(Error::Invalid(format!("domain [{a}, {b}] exceeds the table range [{lo}, {hi}]")));
            }
            let eta = Pchip::new(u.clone(), eta)?;
            let phi = Pchip::new(u, phi)?;
            (Model::Tabulated { eta, phi }, "tabulated".to_string())
        }
    };
    FluxPair::validated(model, label, a, b)
}

fn ph_eta_table(eff: &Efficiency, mu: f64, a: f64, b: f64) -> Result<Pchip> {
    let knots = linspace(a, b, 2049);
    let deriv = |u: f64| 1.0 / (eff.value(u) + mu);
    let anchor = adaptive_simpson(deriv, 0.0, a, 1e-13);
    let mut vals = Vec::with_capacity(knots.len());
    let mut acc = anchor;
    vals.push(acc);
    for w in knots.windows(2) {
        acc += adaptive_simpson(deriv, w[0], w[1], 1e-13);
        vals.push(acc);
    }
    let slopes = knots.iter().map(|&u| deriv(u)).collect();
    Pchip::with_slopes(knots, vals, slopes)
}

impl FluxPair {
    fn validated(model: Model, label: String, a: f64, b: f64) -> Result<Self> {
        let fp = FluxPair { inner: Arc::new(Inner { model, label, a, b, eta_prime_min: 0.0 }) };
        let samples = linspace(a, b, DOMAIN_SAMPLES);
        let mut eta_prime_min = f64::INFINITY;
        let mut worst = (f64::INFINITY, a);
        for (i, &u) in samples.iter().enumerate() {
            let vals = [fp.eta(u), fp.phi(u), fp.eta_prime(u), fp.phi_prime(u)];
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("{} at u = {u}", fp.inner.label)));
            }
            let ep = vals[2];
            if ep < worst.0 {
                worst = (ep, u);
            }
            let endpoint = i == 0 || i == samples.len() - 1;
            if ep < 0.0 || (ep == 0.0 && !endpoint) {
                return Err(Error::NonMonotoneEta { min: ep, at: u });
            }
            if ep > 0.0 {
                eta_prime_min = eta_prime_min.min(ep);
            }
        }
        if !eta_prime_min.is_finite() {
            return Err(Error::NonMonotoneEta { min: worst.0, at: worst.1 });
        }
        // derivative consistency against central differences (interior points);
        // only user closures can disagree, interpolated models are consistent by construction
        let delta = 1e-5 * (b - a).min(1.0);
        let user_supplied = matches!(fp.inner.model, Model::Custom(_));
        for &u in samples[1..samples.len() - 1].iter().filter(|_| user_supplied) {
            if u - delta < a || u + delta > b {
                continue;
            }
            for (what, f, d) in [
                ("eta", fp.eta(u + delta) - fp.eta(u - delta), fp.eta_prime(u)),
                ("phi", fp.phi(u + delta) - fp.phi(u - delta), fp.phi_prime(u)),
            ] {
                let fd = f / (2.0 * delta);
                let err = (fd - d).abs() / d.abs().max(1.0);
                if err > FD_TOL {
                    return Err(Error::InconsistentDerivative { what, at: u, err });
                }
            }
        }
        let mut inner = Arc::try_unwrap(fp.inner).ok().expect("fresh Arc");
        inner.eta_prime_min = eta_prime_min;
        Ok(FluxPair { inner: Arc::new(inner) })
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.inner.a, self.inner.b)
    }

    /// Lower bound of `eta'` over the sampled domain.
    pub fn eta_prime_min(&self) -> f64 {
        self.inner.eta_prime_min
    }

    /// `[eta(a), eta(b)]`.
    pub fn eta_range(&self) -> (f64, f64) {
        (self.eta(self.inner.a), self.eta(self.inner.b))
    }

    pub fn contains(&self, u: f64) -> bool {
        let (a, b) = self.domain();
        let slack = 1e-12 * (b - a).max(1.0);
        u >= a - slack && u <= b + slack
    }

    pub fn check_domain(&self, u: f64) -> Result<()> {
        if self.contains(u) {
            Ok(())
        } else {
            let (a, b) = self.domain();
            Err(Error::OutOfDomain { u, a, b })
        }
    }

    /// True when `eta(u) = u` identically (the density transform is trivial).
    pub fn has_identity_eta(&self) -> bool {
        matches!(self.inner.model, Model::Burgers | Model::Power(_) | Model::Composed(_))
            || matches!(self.inner.model, Model::Linear { k, .. } if k == 1.0)
    }

    pub fn eta(&self, u: f64) -> f64 {
        match &self.inner.model {
            Model::Burgers | Model::Power(_) => u,
            Model::GelfandQ => 0.5 * u * u,
            Model::ExpPair => u.exp(),
            Model::Linear { k, .. } => k * u,
            Model::PhAffine { alpha, beta, mu } => ph_affine_eta(*alpha, *beta, *mu, u),
            Model::PhTable { eta, .. } => eta.eval_all(u).0,
            Model::Custom(c) => (c.eta)(u),
            Model::Tabulated { eta, .. } => eta.eval_all(u).0,
            Model::Composed(_) => u,
        }
    }

    pub fn eta_prime(&self, u: f64) -> f64 {
        match &self.inner.model {
            Model::Burgers | Model::Power(_) | Model::Composed(_) => 1.0,
            Model::GelfandQ => u,
            Model::ExpPair => u.exp(),
            Model::Linear { k, .. } => *k,
            Model::PhAffine { alpha, beta, mu } => 1.0 / (alpha + beta * u + mu),
            Model::PhTable { eff, mu, .. } => 1.0 / (eff.value(u) + mu),
            Model::Custom(c) => (c.eta_prime)(u),
            Model::Tabulated { eta, .. } => eta.eval_all(u).1,
        }
    }

    pub fn eta_second(&self, u: f64) -> f64 {
        match &self.inner.model {
            Model::Burgers | Model::Power(_) | Model::Composed(_) | Model::Linear { .. } => 0.0,
            Model::GelfandQ => 1.0,
            Model::ExpPair => u.exp(),
            Model::PhAffine { alpha, beta, mu } => -beta / (alpha + beta * u + mu).powi(2),
            Model::PhTable { eff, mu, .. } => -eff.derivative(u) / (eff.value(u) + mu).powi(2),
            Model::Custom(c) => (c.eta_second)(u),
            Model::Tabulated { eta, .. } => eta.eval_all(u).2,
        }
    }

    pub fn phi(&self, u: f64) -> f64 {
        match &self.inner.model {
            Model::Burgers => 0.5 * u * u,
            Model::Power(p) => powr(u, *p) / p,
            Model::GelfandQ => u * u * u / 3.0,
            Model::ExpPair => 0.5 * (2.0 * u).exp(),
            Model::Linear { k, c } => c * k * u,
            Model::PhAffine { alpha, beta, mu } => u - 2.0 * mu * ph_affine_eta(*alpha, *beta, *mu, u),
            Model::PhTable { mu, eta, .. } => u - 2.0 * mu * eta.eval_all(u).0,
            Model::Custom(c) => (c.phi)(u),
            Model::Tabulated { phi, .. } => phi.eval_all(u).0,
            Model::Composed(base) => base.phi(base.eta_inverse_unchecked(u)),
        }
    }

    pub fn phi_prime(&self, u: f64) -> f64 {
        match &self.inner.model {
            Model::Burgers => u,
            Model::Power(p) => powr(u, p - 1.0),
            Model::GelfandQ => u * u,
            Model::ExpPair => (2.0 * u).exp(),
            Model::Linear { k, c } => c * k,
            Model::PhAffine { alpha, beta, mu } => {
                let phi_eff = alpha + beta * u;
                (phi_eff - mu) / (phi_eff + mu)
            }
            Model::PhTable { eff, mu, .. } => {
                let phi_eff = eff.value(u);
                (phi_eff - mu) / (phi_eff + mu)
            }
            Model::Custom(c) => (c.phi_prime)(u),
            Model::Tabulated { phi, .. } => phi.eval_all(u).1,
            Model::Composed(base) => base.speed(base.eta_inverse_unchecked(u)),
        }
    }

    pub fn phi_second(&self, u: f64) -> f64 {
        match &self.inner.model {
            Model::Burgers => 1.0,
            Model::Power(p) => (p - 1.0) * powr(u, p - 2.0),
            Model::GelfandQ => 2.0 * u,
            Model::ExpPair => 2.0 * (2.0 * u).exp(),
            Model::Linear { .. } => 0.0,
            Model::PhAffine { alpha, beta, mu } => 2.0 * mu * beta / (alpha + beta * u + mu).powi(2),
            Model::PhTable { eff, mu, .. } => 2.0 * mu * eff.derivative(u) / (eff.value(u) + mu).powi(2),
            Model::Custom(c) => (c.phi_second)(u),
            Model::Tabulated { phi, .. } => phi.eval_all(u).2,
            Model::Composed(base) => {
                let w = base.eta_inverse_unchecked(u);
                base.speed_derivative(w) / base.eta_prime(w)
            }
        }
    }

    /// `phi'(u) / eta'(u)` without a domain check.
    pub fn speed(&self, u: f64) -> f64 {
        match &self.inner.model {
            Model::Burgers => u,
            Model::GelfandQ => u,
            Model::PhAffine { alpha, beta, mu } => alpha + beta * u - mu,
            Model::PhTable { eff, mu, .. } => eff.value(u) - mu,
            Model::Linear { c, .. } => *c,
            _ => self.phi_prime(u) / self.eta_prime(u),
        }
    }

    /// `(phi'/eta')'(u) = (phi'' eta' - phi' eta'') / eta'^2`.
    pub fn speed_derivative(&self, u: f64) -> f64 {
        let ep = self.eta_prime(u);
        (self.phi_second(u) * ep - self.phi_prime(u) * self.eta_second(u)) / (ep * ep)
    }

    /// Characteristic speed `phi'(u) / eta'(u)`.
    pub fn characteristic_speed(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        let s = self.speed(u);
        if s.is_finite() {
            Ok(s)
        } else {
            Err(Error::NonFinite(format!("characteristic speed at u = {u}")))
        }
    }

    /// `eta^{-1}(v)`, closed form where available and bisection otherwise.
    pub fn eta_inverse(&self, v: f64) -> Result<f64> {
        if let Some(u) = self.eta_inverse_closed(v) {
            return if u.is_finite() { Ok(u) } else { Err(Error::NonFinite(format!("eta^-1({v})"))) };
        }
        let (a, b) = self.domain();
        inverse_monotone(|u| self.eta(u), v, (a, b)).map_err(|_| {
            let (lo, hi) = self.eta_range();
            Error::OutOfRange { v, lo, hi }
        })
    }

    fn eta_inverse_unchecked(&self, v: f64) -> f64 {
        self.eta_inverse(v).unwrap_or(f64::NAN)
    }

    fn eta_inverse_closed(&self, v: f64) -> Option<f64> {
        match &self.inner.model {
            Model::Burgers | Model::Power(_) | Model::Composed(_) => Some(v),
            Model::GelfandQ => Some(if v >= 0.0 { (2.0 * v).sqrt() } else { f64::NAN }),
            Model::ExpPair => Some(v.ln()),
            Model::Linear { k, .. } => Some(v / k),
            Model::PhAffine { alpha, beta, mu } => {
                let c = alpha + mu;
                Some(if *beta == 0.0 { c * v } else { c * (beta * v).exp_m1() / beta })
            }
            _ => None,
        }
    }

    /// `H(v) = phi(eta^{-1}(v))` for `v` in `[eta(a), eta(b)]`.
    pub fn hamiltonian(&self, v: f64) -> Result<f64> {
        let (lo, hi) = self.eta_range();
        let slack = INVERSE_TOL * (1.0 + v.abs());
        if v < lo - slack || v > hi + slack {
            return Err(Error::OutOfRange { v, lo, hi });
        }
        let u = self.eta_inverse(v.clamp(lo, hi))?;
        Ok(self.phi(u.clamp(self.inner.a, self.inner.b)))
    }

    /// `H'(v) = a(eta^{-1}(v))`.
    pub fn hamiltonian_prime(&self, v: f64) -> Result<f64> {
        let (lo, hi) = self.eta_range();
        let u = self.eta_inverse(v.clamp(lo, hi))?;
        Ok(self.speed(u.clamp(self.inner.a, self.inner.b)))
    }

    /// The same conservation law written for `v = eta(u)`:
    /// identity density and flux `phi ∘ eta^{-1}` on `[eta(a), eta(b)]`.
    pub fn composed(&self) -> Result<FluxPair> {
        let (lo, hi) = self.eta_range();
        FluxPair::validated(Model::Composed(self.clone()), format!("composed({})", self.inner.label), lo, hi)
    }

    /// Classifies by the sign of `(phi'/eta')'`, computed with central differences
    /// of the speed on the interior of a 1001-point sample.
    pub fn convexity_class(&self) -> ConvexityClass {
        let (a, b) = self.domain();
        let u = linspace(a, b, DOMAIN_SAMPLES);
        let du = u[1] - u[0];
        let speeds: Vec<f64> = u.iter().map(|&x| self.speed(x)).collect();
        let mut pos = 0usize;
        let mut neg = 0usize;
        let mut first_flat = None;
        let mut first_sign: Option<f64> = None;
        let mut change = None;
        for i in 1..u.len() - 1 {
            if !(speeds[i + 1].is_finite() && speeds[i - 1].is_finite()) {
                continue;
            }
            let d = (speeds[i + 1] - speeds[i - 1]) / (2.0 * du);
            if d > CONVEXITY_THRESHOLD {
                pos += 1;
            } else if d < -CONVEXITY_THRESHOLD {
                neg += 1;
            } else if first_flat.is_none() {
                first_flat = Some(u[i]);
            }
            if d.abs() > CONVEXITY_THRESHOLD {
                match first_sign {
                    None => first_sign = Some(d.signum()),
                    Some(s) if s != d.signum() && change.is_none() => {
                        change = Some(0.5 * (u[i] + u[i - 1]));
                    }
                    _ => {}
                }
            }
        }
        if first_flat.is_none() && neg == 0 && pos > 0 {
            ConvexityClass { tag: Convexity::StrictlyConvex, witness: None }
        } else if first_flat.is_none() && pos == 0 && neg > 0 {
            ConvexityClass { tag: Convexity::StrictlyConcave, witness: None }
        } else {
            ConvexityClass { tag: Convexity::Neither, witness: change.or(first_flat) }
        }
    }

    pub fn require_convex(&self) -> Result<()> {
        match self.convexity_class() {
            ConvexityClass { tag: Convexity::StrictlyConvex, .. } => Ok(()),
            c => Err(Error::NotConvex(format!("{} is {:?} (witness {:?})", self.inner.label, c.tag, c.witness))),
        }
    }

    /// Min and max of the characteristic speed over `[lo, hi]` (sampled, endpoints included).
    pub fn speed_bounds(&self, lo: f64, hi: f64) -> (f64, f64) {
        let n = if hi > lo { 257 } else { 1 };
        linspace(lo, hi, n)
            .into_iter()
            .map(|u| self.speed(u))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(mn, mx), s| (mn.min(s), mx.max(s)))
    }

    /// Min of `eta'` over `[lo, hi]` (sampled).
    pub fn eta_prime_min_on(&self, lo: f64, hi: f64) -> f64 {
        let n = if hi > lo { 257 } else { 1 };
        linspace(lo, hi, n).into_iter().map(|u| self.eta_prime(u)).filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min)
    }
}

fn ph_affine_eta(alpha: f64, beta: f64, mu: f64, u: f64) -> f64 {
    let c = alpha + mu;
    if beta == 0.0 {
        u / c
    } else {
        (beta * u / c).ln_1p() / beta
    }
}

/// Solves `f(x) = y` for strictly monotone `f` on `bracket` by bisection, to
/// `|f(x) - y| <= 1e-12 (1 + |y|)` or until the bracket collapses.
pub fn inverse_monotone<F: Fn(f64) -> f64>(f: F, y: f64, bracket: (f64, f64)) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    let (f_lo, f_hi) = (f(lo), f(hi));
    let tol = INVERSE_TOL * (1.0 + y.abs());
    if !(f_lo.is_finite() && f_hi.is_finite() && y.is_finite()) {
        return Err(Error::NonFinite(format!("inverse_monotone at y = {y}")));
    }
    let (fmin, fmax) = if f_lo <= f_hi { (f_lo, f_hi) } else { (f_hi, f_lo) };
    if y < fmin - tol || y > fmax + tol {
        return Err(Error::NotBracketed { y, lo, hi, f_lo, f_hi });
    }
    if (f_lo - y).abs() <= tol {
        return Ok(lo);
    }
    if (f_hi - y).abs() <= tol {
        return Ok(hi);
    }
    let increasing = f_hi > f_lo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm - y).abs() <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        if (fm < y) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A function sampled on a strictly increasing grid; linear in between and
/// clamped to the end values outside.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.is_empty() || grid.len() != values.len() {
            return Err(Error::Invalid("sampled function needs matching non-empty grid and values".into()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid("sampled function grid must be strictly increasing".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("sampled value {v}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Vec<f64>, f: F) -> Result<Self> {
        let values = grid.iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.grid.len();
        if x <= self.grid[0] {
            return self.values[0];
        }
        if x >= self.grid[n - 1] {
            return self.values[n - 1];
        }
        let k = self.grid.partition_point(|&g| g <= x);
        let (x0, x1) = (self.grid[k - 1], self.grid[k]);
        let (y0, y1) = (self.values[k - 1], self.values[k]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// True when slopes between consecutive samples are nondecreasing within `tol`.
    pub fn is_convex(&self, tol: f64) -> std::result::Result<(), f64> {
        let slopes: Vec<f64> =
            self.grid.windows(2).zip(self.values.windows(2)).map(|(g, v)| (v[1] - v[0]) / (g[1] - g[0])).collect();
        match slopes.windows(2).position(|s| s[1] < s[0] - tol) {
            Some(i) => Err(self.grid[i + 1]),
            None => Ok(()),
        }
    }
}

/// Discrete Legendre transform: for each `s` in `s_grid`, `max_x s x - f(x)`
/// over the sample points of `f`. Also returns the maximizing abscissae.
pub fn legendre_conjugate_with_argmax(f: &SampledFunction, s_grid: &[f64]) -> Result<(SampledFunction, Vec<f64>)> {
    let mut vals = Vec::with_capacity(s_grid.len());
    let mut arg = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let mut best = f64::NEG_INFINITY;
        let mut best_x = f.grid[0];
        for (&x, &fx) in f.grid.iter().zip(&f.values) {
            let v = s * x - fx;
            if v > best {
                best = v;
                best_x = x;
            }
        }
        vals.push(best);
        arg.push(best_x);
    }
    Ok((SampledFunction::new(s_grid.to_vec(), vals)?, arg))
}

/// Discrete Legendre transform `f*(s) = max_x [s x - f(x)]` on `s_grid`.
pub fn legendre_conjugate(f: &SampledFunction, s_grid: &[f64]) -> Result<SampledFunction> {
    legendre_conjugate_with_argmax(f, s_grid).map(|(g, _)| g)
}
