//! Builds the real orthogonal Schur transform and checks that it
//! block-diagonalizes both tensor-power unitaries and permutations.
//!
//! `cargo run --release --example schur_basis -- [n] [d]`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use repmatch::schur::{build_schur_basis, verify_basis, BuildOptions};

fn main() -> repmatch::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(4);
    let d = args.next().unwrap_or(2);

    let started = std::time::Instant::now();
    let basis = build_schur_basis(n, d, &BuildOptions::from_env())?;
    println!("Schur basis for n={n}, d={d}: {0}×{0} in {1:?}", basis.dim(), started.elapsed());
    for label in 0..basis.num_labels() {
        println!(
            "  λ = {:?}: columns {:?} (d_λ = {}, m_λ = {})",
            basis.label(label).rows(),
            basis.block_columns(label),
            basis.d_lambda(label),
            basis.m_lambda(label)
        );
    }

    let report = verify_basis(&basis, 20, &mut ChaCha8Rng::seed_from_u64(7));
    println!("max residual over 20 samples: {:.2e}", report.max_residual());
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
