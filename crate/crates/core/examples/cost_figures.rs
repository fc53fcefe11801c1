//! Qubit costs of the three protocols as the copy number grows, plus the
//! CSV series used for plotting.
//!
//! `cargo run --example cost_figures`

use repmatch::costmodel::{cost_report, decimal, figure_series, Figure, Task};

fn main() -> repmatch::Result<()> {
    println!("{:>4} {:>3} {:>6} {:>6} {:>6} {:>4} {:>14}", "n", "d", "c_max", "c_rm", "c_min", "δc", "p_tele");
    for d in [2, 3, 5] {
        for n in [1, 10, 100, 1000] {
            let r = cost_report(n, d, Task::UnitaryArray)?;
            println!(
                "{n:>4} {d:>3} {:>6} {:>6} {:>6} {:>4} {:>14}",
                r.c_max,
                r.c_rm,
                r.c_min,
                r.small_delta_c,
                decimal(&r.p_tele)
            );
        }
    }

    let r = cost_report(6, 3, Task::Permutation)?;
    println!("\npermutations of 6 qutrits: c_rm = {} qubits, success 1/{}", r.c_rm, r.num_irreps);

    println!("\nprobability series (first rows):");
    let table = figure_series(Figure::Fig6, Figure::Fig6.default_d(), "1..6".parse()?)?;
    table.write_csv(std::io::stdout())
}
