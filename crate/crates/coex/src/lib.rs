//! Sweeps, simulations, fairness solves and model/simulator comparisons
//! for LTE-U and Wi-Fi coexistence, writing CSV tables.

pub mod aggregate;
pub mod commands;
mod error;
pub mod spec;
pub mod table;

pub use error::{CliError, Result};
