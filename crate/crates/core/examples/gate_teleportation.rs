//! Baseline: port-based style gate teleportation through a block-entangled
//! resource, with its exact success probability.
//!
//! `cargo run --release --example gate_teleportation`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use repmatch::baselines::{build_teleport_resource, run_gate_teleport};
use repmatch::costmodel::{decimal, Task};
use repmatch::linalg::random_state;
use repmatch::repmatch::TargetSpec;
use repmatch::schur::SchurBasis;

fn main() -> repmatch::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (n, d) in [(1, 2), (2, 2), (3, 2), (2, 3)] {
        let resource = build_teleport_resource(n, d)?;
        let basis = SchurBasis::build(n, d)?;
        let target = TargetSpec::random(Task::UnitaryArray, n, d, &mut rng)?;
        let psi = random_state(basis.dim(), 1, &mut rng);
        let run = run_gate_teleport(&psi, &target, &basis)?;
        let s = run.summary();
        println!(
            "n={n} d={d}: resource support {} dims, p = {} ≈ {} (simulated {:.6}), fidelity {:.12}, {} qubits",
            resource.state.support_dim(),
            s.exact_probability,
            decimal(&resource.exact_success_probability()?),
            s.probability,
            s.fidelity,
            s.qubits
        );
    }
    Ok(())
}
