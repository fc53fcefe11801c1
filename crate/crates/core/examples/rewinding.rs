//! Failure recovery: undoing a wrong branch, and repeating rounds until the
//! gate lands.
//!
//! `cargo run --release --example rewinding`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use repmatch::costmodel::Task;
use repmatch::linalg::random_state;
use repmatch::repmatch::{
    decompose_input, recovery_unitary, run_repmatch, run_until_success, RepMatchSetup, RoundLimit, TargetSpec,
};
use repmatch::schur::BuildOptions;

fn main() -> repmatch::Result<()> {
    let (n, d) = (3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let setup = RepMatchSetup::new(n, d, Task::UnitaryArray, &BuildOptions::from_env())?;
    let target = TargetSpec::random(Task::UnitaryArray, n, d, &mut rng)?;
    let psi = random_state(setup.basis().dim(), 2, &mut rng).normalize();
    let input = decompose_input(&psi, setup.basis(), setup.layout().role)?;

    let run = run_repmatch(&psi, &target, &setup)?;
    for o in run.outcomes.iter().filter(|o| o.branch != 0) {
        let rec = recovery_unitary(o.branch, &target, &setup)?;
        let restored = rec.apply(&o.state.clone().normalized());
        println!("branch {}: after recovery, fidelity with the input = {:.12}", o.branch, restored.fidelity(&input));
    }

    println!();
    for seed in 0..6 {
        let multi = run_until_success(&psi, &target, &setup, RoundLimit::Epsilon(1e-3), seed)?;
        let s = multi.summary();
        println!(
            "seed {seed}: success={} after {} of {} rounds, branches {:?}, fidelity {:.9}, {} qubits",
            s.success, s.rounds, s.max_rounds, s.branches, s.fidelity, s.qubits
        );
    }
    Ok(())
}
