//! A metered two-party session: Bob holds the gate behind an oracle that
//! counts queries, Alice holds the input, and every message is logged.
//!
//! `cargo run --release --example harness_session`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use repmatch::costmodel::Task;
use repmatch::harness::{GateOracle, ProtocolKind, Session, SessionConfig};
use repmatch::linalg::random_state;
use repmatch::repmatch::{RoundLimit, TargetSpec};

fn main() -> repmatch::Result<()> {
    let (n, d) = (4, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let target = TargetSpec::random(Task::UnitaryArray, n, d, &mut rng)?;

    for protocol in [ProtocolKind::Repmatch, ProtocolKind::Teleport, ProtocolKind::StoreRetrieve] {
        let mut cfg = SessionConfig::new(protocol, Task::UnitaryArray, n, d);
        cfg.limit = RoundLimit::MaxRounds(8);
        let session = Session::new(cfg)?;
        let psi = random_state(session.basis().dim(), 1, &mut rng);
        let mut oracle = GateOracle::new(target.clone());
        let out = session.execute_seeded(&psi, &mut oracle, 4)?;
        println!(
            "{protocol}: rounds {}, qubits {}, queries {} forward + {} inverse, fidelity {:.9}, per-round p {:.6}",
            out.rounds,
            out.transcript.total_qubits(),
            oracle.forward_queries(),
            oracle.inverse_queries(),
            out.fidelity,
            out.probability
        );
    }
    Ok(())
}
