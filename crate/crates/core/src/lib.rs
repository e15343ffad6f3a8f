//! Encrypted comparison and selection over a levelled Fan-Vercauteren scheme.
//!
//! The comparison circuit approximates the Heaviside step as the weak limit of
//! `(1 + tanh(k x)) / 2`, doubling the tanh argument `r` times with the
//! division-free polynomial `z (1.9142 - z^2)`. Selection is done by weighting:
//! both inputs are rescaled by encrypted weights close to 0 or 1.
//!
//! Layers, bottom up:
//! - [`ring`]: `Z_q[x]/(x^d + 1)` with big-integer coefficients.
//! - [`fv`]: key generation, encryption, evaluation and noise budgets.
//! - [`encoder`]: balanced base-`b` fractional encoding of reals.
//! - [`approx`]: plaintext numerical kernels and oracles.
//! - [`comparator`]: the comparison and selection circuits over any backend.
//! - [`harness`]: datasets, metrics, regression tables and encrypted runs.

pub mod approx;
pub mod comparator;
pub mod encoder;
pub mod error;
pub mod fv;
pub mod harness;
pub mod ring;

pub use error::{Error, Result};
