use std::collections::HashMap;

use nalgebra::DMatrix;
use num_traits::ToPrimitive;

use super::checked_dim;
use crate::error::{Error, Result};
use crate::linalg::permutation_index_map;
use crate::perm::all_permutations;
use crate::repcore::{factorial, mn_character, sym_dimension, YoungDiagram};

/// Largest `n` for which the `n!`-term projector sum is attempted.
pub const PROJECTOR_MAX_N: usize = 8;

/// Isotypic projector `Π_λ = (m_λ/n!) Σ_π χ^λ(π) P_π` on `(C^d)^{⊗n}`.
///
/// The sum runs over all of S(n), so this is only usable for small `n`; it
/// serves as an independent check of the Schur basis.
pub fn isotypic_projector(n: usize, d: usize, lambda: &YoungDiagram, cap: usize) -> Result<DMatrix<f64>> {
    if n > PROJECTOR_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "isotypic projector limited to n <= {PROJECTOR_MAX_N}"
        )));
    }
    let dim = checked_dim(n, d, cap)?;
    let m = sym_dimension(lambda, n, d)?.to_f64().unwrap_or(f64::NAN);
    let n_fact = factorial(n).to_f64().unwrap_or(f64::NAN);
    let mut chars = HashMap::new();
    let mut proj = DMatrix::<f64>::zeros(dim, dim);
    for pi in all_permutations(n) {
        let ct = pi.cycle_type();
        let chi = match chars.get(&ct) {
            Some(&v) => v,
            None => {
                let v = mn_character(lambda, &ct)?.to_f64().unwrap_or(f64::NAN);
                chars.insert(ct, v);
                v
            }
        };
        if chi == 0.0 {
            continue;
        }
        for (x, y) in permutation_index_map(&pi, d).into_iter().enumerate() {
            proj[(y, x)] += chi;
        }
    }
    proj *= m / n_fact;
    Ok(proj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repcore::{enumerate_diagrams, su_dimension};
    use crate::schur::SchurBasis;

    #[test]
    fn projectors_match_schur_blocks() {
        for (n, d) in [(2, 2), (3, 2), (4, 2), (3, 3), (5, 2)] {
            let basis = SchurBasis::build(n, d).unwrap();
            let mut total = DMatrix::<f64>::zeros(basis.dim(), basis.dim());
            for (label, lambda) in enumerate_diagrams(n, d).iter().enumerate() {
                let p = isotypic_projector(n, d, lambda, 4096).unwrap();
                // idempotent with trace d_λ m_λ
                assert!((&p * &p - &p).abs().max() < 1e-10);
                let rank = su_dimension(lambda, d).unwrap() * sym_dimension(lambda, n, d).unwrap();
                assert!((p.trace() - rank.to_f64().unwrap()).abs() < 1e-9);
                // equals the projector onto the basis block
                let cols = basis.block_columns(label);
                let b = basis.matrix().columns(cols.start, cols.len());
                assert!((b * b.transpose() - &p).abs().max() < 1e-10, "n={n} d={d} {lambda}");
                total += p;
            }
            assert!((total - DMatrix::<f64>::identity(basis.dim(), basis.dim())).abs().max() < 1e-10);
        }
    }
}
