//! Universal secure error correction for linear network coding.
//!
//! A source sends `n` packets of `m` symbols over GF(q) through a network that
//! applies an unknown linear transform. An adversary injects up to `t` packets
//! and observes up to `mu` links. The scheme here encodes a `k`-packet message
//! with a Gabidulin coset code so the destination decodes with zero error and
//! the eavesdropper learns nothing, for every network code, at the optimal
//! rate `k = n - 2t - mu` when `m >= n`.
//!
//! Modules, bottom up:
//! - [`gf`]: GF(q) and GF(q^m) arithmetic
//! - [`linalg`]: matrices over either field, rank, solving, enumeration
//! - [`rankmetric`]: Gabidulin codes, error and erasure decoding
//! - [`secure_scheme`]: coset coding and the combined scheme
//! - [`network_sim`]: channel model, lifting, noncoherent decoding
//! - [`audit`]: exhaustive reliability and secrecy verification
//! - [`formats`] and [`cli`]: text file formats and the command-line front end

pub mod audit;
pub mod cli;
pub mod error;
pub mod formats;
pub mod gf;
pub mod linalg;
pub mod network_sim;
pub mod rankmetric;
pub mod secure_scheme;

pub use error::{Error, Result};
pub use gf::{Elem, FieldParams, Gf};
pub use linalg::{MatrixFq, MatrixFqm};
pub use rankmetric::{DecodeOutcome, GabidulinCode};

pub use secure_scheme::{SchemeInstance, SchemeParams};
