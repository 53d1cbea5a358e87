//! Simulator and analysis toolkit for quantum-noise randomized stream ciphers
//! of the Y00 (alpha-eta) family.
//!
//! The crate splits into the layers of the protocol stack:
//!
//! * [`keystream`] - classical PRNGs (LFSR, TinyMT32), key expansion into
//!   symbol streams, period bookkeeping, and Berlekamp-Massey recovery.
//! * [`y00core`] - keyed mapping tables, coherent-state constellations, and
//!   the encode / invert / decode slot operations.
//! * [`channel`] - heterodyne measurement statistics: confusion matrices and
//!   per-slot error-pattern distributions.
//! * [`qdetect`] - small-ensemble quantum detection: Gram matrices, the
//!   square-root measurement, and the binary Helstrom limit.
//! * [`fca`] - the correlation-attack bound machinery: Bayes thresholds,
//!   exact success probabilities, entropy / KL bounds, and the security
//!   margin solver.
//! * [`hp`] - fixed-point big-integer arithmetic backing the solver path,
//!   where the quantities of interest sit far below f64 resolution.

pub mod channel;
pub mod error;
pub mod fca;
pub mod hp;
pub mod keystream;
pub mod qdetect;
pub mod y00core;

pub use error::{Error, Result};
