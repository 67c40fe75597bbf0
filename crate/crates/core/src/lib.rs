//! Simulation of a single-neuron quantum perceptron.
//!
//! Classical integers are encoded as ±1 sign vectors (bit 1 → −1, bit 0 → +1,
//! MSB first), loaded into a register of `n` data qubits as phase patterns,
//! and compared against a weight pattern by un-preparing the weight state and
//! reading an ancilla. The probability of the ancilla reading 1 is
//! `((Σ_j i_j w_j) / m)²` with `m = 2^n`.
//!
//! The crate is organized bottom-up:
//!
//! - [`statevector`]: dense state-vector simulator (H, X, multi-controlled Z/X)
//! - [`perceptron`]: encoding, oracle circuits, exact/sampled/closed-form readout
//! - [`dataset`]: exhaustive labeling of every input against a fixed weight
//! - [`training`]: learning-rate scaled bit-flip training
//! - [`sweep`]: all-pairs probability matrices
//! - [`pattern`]: rendering a value as a pixel grid

pub mod dataset;
mod error;
pub mod io;
pub mod pattern;
pub mod perceptron;
pub mod rng;
pub mod statevector;
pub mod sweep;
pub mod training;

pub use error::{Error, Result};

/// Formats a probability at 12 significant digits using the shortest
/// decimal that round-trips (`0.25`, `1.0`, `0.499877929688`).
pub fn format_probability(p: f64) -> String {
    format!("{:?}", round_significant(p))
}

/// Rounds to 12 significant digits.
pub fn round_significant(p: f64) -> f64 {
    if p == 0.0 || !p.is_finite() {
        return p;
    }
    format!("{p:.11e}").parse().unwrap_or(p)
}
