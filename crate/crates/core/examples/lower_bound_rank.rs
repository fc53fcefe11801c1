//! The operators `U^⊗n` span exactly `Σ d_λ²` dimensions, which no
//! compression can beat. Here the span is measured numerically.
//!
//! `cargo run --release --example lower_bound_rank`

use repmatch::costmodel::Task;
use repmatch::lowerbound::{check_lower_bound, rank_witness};

fn main() -> repmatch::Result<()> {
    for (n, d, task) in [(1, 2, Task::UnitaryArray), (3, 2, Task::UnitaryArray), (2, 3, Task::UnitaryArray), (4, 2, Task::Permutation)] {
        let r = rank_witness(n, d, task, 1)?;
        println!("{task} n={n} d={d}: rank {} (expected {}), stable {}, {} samples", r.measured, r.expected, r.stable, r.samples);
    }
    let lb = check_lower_bound(50, 3, Task::UnitaryArray)?;
    println!("\nn=50 d=3: c_rm = {} qubits, 2^c_rm ≥ {} holds: {}", lb.cost, lb.d_tot_sq, lb.bound_holds);
    Ok(())
}
