//! One round of representation matching on random qubit inputs, showing
//! every heralded branch and the metered transcript.
//!
//! `cargo run --release --example representation_matching -- [n]`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use repmatch::costmodel::{cost_report, Task};
use repmatch::linalg::random_state;
use repmatch::repmatch::{run_repmatch, RepMatchSetup, TargetSpec};
use repmatch::schur::BuildOptions;

fn main() -> repmatch::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(4, |a| a.parse().expect("integer n"));
    let d = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    let setup = RepMatchSetup::new(n, d, Task::UnitaryArray, &BuildOptions::from_env())?;
    let target = TargetSpec::random(Task::UnitaryArray, n, d, &mut rng)?;
    // A reference register entangled with the input, which the protocol must not disturb.
    let psi = random_state(setup.basis().dim(), 2, &mut rng).normalize();

    let run = run_repmatch(&psi, &target, &setup)?;
    println!("|R| = {} branches, d_R = {}, d_tot = {}", setup.num_branches(), setup.d_r(), setup.d_tot());
    for o in &run.outcomes {
        println!("  branch {}: p = {:.6}, fidelity with U^⊗n|ψ⟩ = {:.6}", o.branch, o.probability, o.fidelity);
    }
    println!("success branch fidelity: {:.12}", run.success().fidelity);
    println!("total probability: {:.12}", run.total_probability());
    println!("merged-register weight outside the block support: {:.3e}", run.merged_support_leak);

    let report = cost_report(n, d, Task::UnitaryArray)?;
    println!("\nqubits sent: {} (c_rm = {}, dense simulation would need {})", run.transcript.total_qubits(), report.c_rm, report.c_max);
    println!("{}", run.transcript.to_json_pretty()?);
    Ok(())
}
