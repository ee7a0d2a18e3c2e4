//! Noise budgets and asymptotic secret key rates for quantum channels sharing
//! a DWDM fibre with amplified classical traffic.
//!
//! Three noise sources reach the quantum receiver: amplifier ASE leaking
//! through the multiplexer, out-of-band leakage of the classical carriers, and
//! spontaneous anti-Stokes Raman scattering generated along the fibre. The
//! [`noise`] module turns link and component parameters into photon numbers;
//! [`bb84`] and [`gmcs`] turn those into key rates; [`scenario`] sweeps them
//! over distance.

// `!(x > 0.0)` style range checks are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bb84;
pub mod config;
pub mod distance;
pub mod error;
pub mod gmcs;
pub mod noise;
pub mod output;
pub mod scenario;
pub mod units;

pub use config::{load_config, parse_config, Config};
pub use error::{Error, Result};
pub use scenario::{run_sweep, ParameterSet, Scenario, SweepResult};
