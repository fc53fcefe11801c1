//! Irreducible blocks of four qubits and the counting identities.
//!
//! `cargo run --example irrep_tables -- [n] [d]`

use repmatch::repcore::{build_table, check_identities, Role};

fn main() -> repmatch::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(4);
    let d = args.next().unwrap_or(2);

    for role in [Role::UnitaryArray, Role::Permutation] {
        let t = build_table(n, d, role);
        println!("{role:?} on (C^{d})^⊗{n}: {} blocks", t.num_irreps());
        for e in &t.entries {
            println!("  λ = {:?}  d_λ = {}  m_λ = {}", e.lambda.rows(), e.d_lambda, e.m_lambda);
        }
        println!("  d_R = {}  d_tot = {}  d_tot,sq = {}\n", t.d_r, t.d_tot, t.d_tot_sq);
    }

    let check = check_identities(n, d);
    println!("Σ d_λ m_λ = d^n: {}   Σ m_λ² = dim of commutant: {}", check.sum_product_holds, check.sum_sq_holds);
    build_table(n, d, Role::UnitaryArray).write_csv(std::io::stdout())
}
