//! Two-station session shell: metered transfers, a counted gate oracle and
//! reproducible transcripts.

mod oracle;
mod session;
mod transcript;

pub use oracle::{GateOracle, RoundQueries};
pub use session::{execute_session, ProtocolKind, Session, SessionConfig, SessionOutcome};
pub use transcript::{qubits_for, Leg, Message, RoundRecord, Totals, Transcript, TRANSCRIPT_SCHEMA_VERSION};
