//! Exact simulator and verifier for the quantum colouring game on Hadamard
//! graphs.
//!
//! - [`quantum`]: dense qudit states, the order-`N` Fourier transform, sign
//!   flips and measurement statistics.
//! - [`graph`]: the Hadamard graph `G_N`, its components, independence and
//!   chromatic bounds, and exact colouring of tiny vertex sets.
//! - [`protocol`]: the entangled strategy end to end, plus its closed forms.
//! - [`harness`]: question enumeration, verification sweeps, classical
//!   strategy scoring and pseudo-telepathy certificates.
//! - [`cli`]: the `ptlab` command-line front end.

pub mod cli;
pub mod error;
pub mod graph;
pub mod harness;
pub mod protocol;
pub mod quantum;
pub mod report;

pub use error::{Error, Result};
pub use graph::{GraphSpec, Vertex};
pub use harness::{
    CertificateOptions, ClassicalStrategy, Mode, PseudoTelepathyCertificate, VerificationReport,
    VerifyOptions,
};
pub use protocol::{Question, RoundResult};
