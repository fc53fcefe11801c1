//! Representation matching: station B applies the target block by block
//! against a uniform ansatz over block labels, and a coherent test on the
//! returned registers heralds success.
//!
//! Simulation runs in block coordinates. The input is split once with the
//! Schur basis; the index, representation and multiplicity registers are
//! then explicit, and the full space is only revisited for comparisons.

mod protocol;
mod state;
mod target;

pub use protocol::{
    recovery_unitary, relative_phase, run_repmatch, run_repmatch_with, run_round, run_until_success,
    run_until_success_with, MultiRoundRun, MultiRoundSummary, ProtocolOutcome, RepMatchRun, Recovery, RoundLimit,
    RoundResult,
};
pub use state::{decompose_input, merge_registers, BlockLayout, BlockState, MergeMap};
pub use target::{RepMatchSetup, TargetSpec};
