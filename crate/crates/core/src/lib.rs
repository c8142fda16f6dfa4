//! Generalized solutions of the scalar conservation law
//! `eta(u)_t + phi(u)_x = 0`, computed by several independent routes
//! (vanishing viscosity, variational formulas, kinetic relaxation, difference
//! schemes, the enterprise-level difference-differential system) and
//! certified against one another and against entropy inequalities.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod error;
pub mod fixtures;
pub mod flux;
pub mod grid;
pub mod harness;
pub mod kinetic;
pub mod numerics;
pub mod riemann;
pub mod schemes;
pub mod variational;
pub mod viscous;

pub use error::{Error, Result};
pub use flux::{make_flux_pair, Efficiency, FluxPair, FluxSpec};
pub use grid::{l1_distance, Grid1D, GridFunction};
