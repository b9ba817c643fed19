//! Simulation-guided multi-criteria decision analysis.
//!
//! The crate scores infrastructure options for a port weighbridge by
//! combining expected monetary costs and benefits over a scenario tree with
//! queueing criteria estimated by discrete-event simulation, then ranks the
//! options three ways (cost–benefit, static MCDA, dynamic MCDA) and probes
//! the ranking's robustness by Monte-Carlo perturbation.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod cost_benefit;
mod error;
pub mod mcda;
pub mod option;
pub mod pipeline;
pub mod port_sim;
pub mod ranking;
pub mod reference;
pub mod scenario;
pub mod sensitivity;

#[cfg(test)]
mod testing;

pub use error::{Error, Result};
