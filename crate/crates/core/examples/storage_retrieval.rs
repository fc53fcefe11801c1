//! Baseline: store a gate in a quantum memory, save it to disk, and
//! retrieve it later on a fresh input.
//!
//! `cargo run --release --example storage_retrieval`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use repmatch::baselines::{memory_qubits, retrieve, store, GateMemory};
use repmatch::costmodel::Task;
use repmatch::linalg::random_state;
use repmatch::repcore::Role;
use repmatch::repmatch::{decompose_input, TargetSpec};
use repmatch::schur::SchurBasis;

fn main() -> repmatch::Result<()> {
    let (n, d) = (3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let basis = SchurBasis::build(n, d)?;
    let target = TargetSpec::random(Task::UnitaryArray, n, d, &mut rng)?;

    let memory = store(&target, &basis)?;
    println!("memory: {} qubits ({} predicted), exact p = {}", memory.qubits(), memory_qubits(n, d), memory.exact_success_probability()?);

    let path = std::env::temp_dir().join("repmatch-gate-memory.bin");
    memory.save(&path)?;
    let reloaded = GateMemory::load(&path)?;

    let psi = random_state(basis.dim(), 1, &mut rng);
    let (outcome, exact) = retrieve(&psi, &reloaded, &basis)?;
    let ideal = decompose_input(&target.ideal_output(&psi)?, &basis, Role::UnitaryArray)?;
    let fidelity = outcome.state.fidelity(&ideal);
    println!("retrieved from {}: p = {:.6} (exact {exact}), fidelity {:.12}", path.display(), outcome.probability, fidelity);
    std::fs::remove_file(&path)?;
    Ok(())
}
