//! Stabilizer entanglement distillation toolkit.
//!
//! This crate implements the full stack needed to study measurement-based
//! entanglement distillation at desk scale:
//!
//! - [`bits`]: word-packed GF(2) vectors and matrices.
//! - [`pauli`]: n-qubit Pauli strings with sign tracking and symplectic
//!   products.
//! - [`check`]: stabilizer check matrices and their Gaussian-elimination
//!   standard form.
//! - [`tableau`]: a stabilizer-state simulator with destabilizer bookkeeping,
//!   arbitrary Pauli measurements, and Bell-pair registers split across an
//!   Alice/Bob bipartition.
//! - [`block`]: stabilizer codes turned into executable measurement-based
//!   distillation recipes (logical operators, decoding schedules, syndrome
//!   lookup, integrated recovery).
//! - [`distill`]: the Monte Carlo engine for block, recurrence, and
//!   classical-code protocols, plus the adaptive block-size schedule.
//! - [`conv`]: quantum convolutional codes over the Laurent-polynomial ring,
//!   frame-by-frame decoding, and entanglement-assisted decoding.
//! - [`planar`]: planar surface codes, the resource-Bell encoder protocol,
//!   and measurement-error threshold analysis.
//! - [`circuit`]: a small circuit IR for synthesizing measurement circuits
//!   and computing depth/gate/span metrics.
//!
//! Monte Carlo trials are data-parallel. With the default `parallel` feature
//! the engine fans trials out over rayon; without it everything runs on one
//! thread. Results are bit-identical for any worker count because per-trial
//! randomness is keyed on `(seed, trial index)` and merging is plain counter
//! addition.

pub mod bits;
pub mod block;
pub mod check;
pub mod circuit;
pub mod conv;
pub mod distill;
pub mod error;
pub mod exec;
pub mod pauli;
pub mod planar;
pub mod rng;
pub mod tableau;

pub use check::{standard_form, CheckMatrix, StandardForm};
pub use error::Error;
pub use exec::{Execution, RunCfg};
pub use pauli::{multiply, symplectic_product, Letter, PauliString, Sign};
pub use tableau::{BellRegister, Gate, Tableau};
