//! Monte Carlo engine for entanglement distillation protocols.
//!
//! All protocols share the same skeleton: create Bell pairs, subject Bob's
//! qubits to a Pauli channel, run local stabilizer and decoding measurements
//! on both sides, exchange parities classically, apply recoveries and phase
//! fixes, and classify the residual error on every kept pair. Trials are
//! independent and fan out over workers; see [`crate::exec`].

mod adaptive;
mod noise;
mod protocol;
mod result;
mod runner;
mod transfer;

pub use adaptive::{adaptive_schedule, adaptive_schedule_recursive, AdaptiveRound, AdaptiveSchedule};
pub use noise::{inject_noise, inject_noise_bilateral, sample_pattern, single_lateral_equivalent, NoiseSpec};
pub use protocol::{
    classical_code_protocol, classical_code_protocol_channel, run_block_protocol,
    run_block_with_pattern, run_recurrence, run_recurrence_with_pattern, SyndromeMode,
};
pub use result::{ProtocolResult, TrialStats};
pub use runner::{BlockDecoder, BlockOutcomes, BlockRunner, CosetTable};
pub use transfer::{parity_detect_transfer, PauliChannel};
