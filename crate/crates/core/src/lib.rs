//! Behavioral simulator of a mixed-signal spiking neuron row with tristate
//! plastic synapses, an error-driven (Delta rule) learning circuit and a
//! calcium-gated hysteretic stop-learning mechanism.
//!
//! Layout:
//! - [`dynamics`]: DPI integrators, integrate-and-fire soma, calcium trace.
//! - [`plasticity`]: weight update, tristate drift, discretization, Delta
//!   rule, hysteretic comparators and the learn gate.
//! - [`engine`], [`spikes`], [`trace`], [`params`]: the fixed-step simulation
//!   loop, its inputs and its CSV output.
//! - [`experiments`]: presets, config files, calibration and run summaries.

// Validation is written as `!(a < b)` so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod params;
pub mod plasticity;
pub mod spikes;
pub mod trace;

pub use engine::{run, run_params, sweep, Simulation, Sources};
pub use error::{ConfigError, Error, Result};
pub use params::SimParams;
pub use trace::{Trace, TraceRecord};
