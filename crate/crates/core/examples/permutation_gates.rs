//! Remote permutation of qudits: the symmetric group acts on the
//! multiplicity spaces, so the merged register is built from those instead.
//!
//! `cargo run --release --example permutation_gates -- "(1 2 3)"`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use repmatch::costmodel::{cost_report, Task};
use repmatch::linalg::random_state;
use repmatch::perm::Permutation;
use repmatch::repmatch::{run_repmatch, RepMatchSetup, TargetSpec};
use repmatch::schur::BuildOptions;

fn main() -> repmatch::Result<()> {
    let cycles = std::env::args().nth(1).unwrap_or_else(|| "(1 2 3)".to_owned());
    let (n, d) = (3, 3);
    let pi = Permutation::from_cycles(&cycles, n)?;
    println!("permutation {cycles} on {n} qutrits, cycle type {:?}", pi.cycle_type().parts());

    let setup = RepMatchSetup::new(n, d, Task::Permutation, &BuildOptions::from_env())?;
    let psi = random_state(setup.basis().dim(), 1, &mut ChaCha8Rng::seed_from_u64(5));
    let run = run_repmatch(&psi, &TargetSpec::permutation(pi, d), &setup)?;
    let ok = run.success();
    println!("success p = {:.6} (1/|R| = {:.6}), fidelity {:.12}", ok.probability, 1.0 / setup.num_branches() as f64, ok.fidelity);

    let r = cost_report(n, d, Task::Permutation)?;
    println!("qubits: {} sent vs c_rm = {}, c_max = {}", run.transcript.total_qubits(), r.c_rm, r.c_max);
    Ok(())
}
