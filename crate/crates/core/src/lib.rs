//! Saturation model of Wi-Fi DCF stations sharing a channel with a
//! fixed-duty-cycle LTE downlink, plus a discrete-event simulator used to
//! check it.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end and run aggregation live in the `coex` crate.
//!
//! Layout:
//!
//! * [`params`]: scenario parameters, derived packet airtime and LTE timing.
//! * [`dcf`]: the retry-limited DCF Markov chain and its fixed points.
//! * [`offperiod`]: OFF-period combinatorics (edge hits, success sequences).
//! * [`throughput`]: coexistence, LTE and Wi-Fi-only throughput.
//! * [`fairness`]: duty cycles achieving access or throughput fairness.
//! * [`sim`]: event-driven CSMA/CA simulator with an ON/OFF interferer.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dcf;
mod error;
pub mod fairness;
mod math;
pub mod offperiod;
pub mod params;
pub mod sim;
pub mod throughput;

pub use error::{Error, Result};
