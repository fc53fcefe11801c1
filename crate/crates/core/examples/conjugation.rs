//! Applying the complex conjugate gate `Ū^⊗n` with queries to `U` only.
//!
//! `cargo run --release --example conjugation`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use repmatch::costmodel::Task;
use repmatch::harness::GateOracle;
use repmatch::linalg::random_state;
use repmatch::repmatch::{run_repmatch_with, RepMatchSetup, TargetSpec};
use repmatch::schur::BuildOptions;

fn main() -> repmatch::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n, d) in [(1, 2), (2, 2), (2, 3)] {
        let setup = RepMatchSetup::new(n, d, Task::Conjugation, &BuildOptions::from_env())?;
        let target = TargetSpec::random(Task::Conjugation, n, d, &mut rng)?;
        let psi = random_state(setup.basis().dim(), 1, &mut rng);
        let mut oracle = GateOracle::new(target);
        let run = run_repmatch_with(&psi, &mut oracle, &setup)?;
        println!(
            "n={n} d={d}: fidelity with Ū^⊗n|ψ⟩ = {:.12}, p = {:.4}, oracle uses of U = {}",
            run.success().fidelity,
            run.success().probability,
            oracle.total_queries()
        );
    }
    Ok(())
}
