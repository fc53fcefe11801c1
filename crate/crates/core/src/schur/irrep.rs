use rand::Rng;

use super::SchurBasis;
use crate::error::{Error, Result};
use crate::linalg::{apply_permutation, apply_tensor_power, haar_special_unitary, kron, unitarity_residual, CMatrix, C64};
use crate::perm::Permutation;
use crate::repcore::{associated_diagram, YoungDiagram};

const EXTRACTION_TOL: f64 = 1e-9;

fn check_extracted(m: CMatrix, what: &str, label: &YoungDiagram) -> Result<CMatrix> {
    let res = unitarity_residual(&m);
    if res > EXTRACTION_TOL {
        return Err(Error::BasisInvalid(format!(
            "{what} block for {label} is not unitary (residual {res:e})"
        )));
    }
    Ok(m)
}

/// `U^λ_g` read from the multiplicity slot `α = 0`.
pub fn su_irrep_matrix(basis: &SchurBasis, lambda: &YoungDiagram, g: &CMatrix) -> Result<CMatrix> {
    su_irrep_matrix_at(basis, basis.label_index(lambda)?, g, 0)
}

/// `U^λ_g` read from multiplicity slot `alpha`; `label` indexes the basis table.
pub fn su_irrep_matrix_at(basis: &SchurBasis, label: usize, g: &CMatrix, alpha: usize) -> Result<CMatrix> {
    if g.nrows() != basis.d() || g.ncols() != basis.d() {
        return Err(Error::DimensionMismatch {
            expected: basis.d(),
            found: g.nrows(),
        });
    }
    if alpha >= basis.m_lambda(label) {
        return Err(Error::SlotOutOfRange {
            slot: alpha,
            dim: basis.m_lambda(label),
        });
    }
    let x = basis.rep_columns(label, alpha);
    let y = apply_tensor_power(g, basis.n(), &x);
    check_extracted(x.transpose() * y, "SU(d)", basis.label(label))
}

/// `U^λ_g` for every label of the basis, in canonical order.
pub fn su_irrep_blocks(basis: &SchurBasis, g: &CMatrix) -> Result<Vec<CMatrix>> {
    (0..basis.num_labels()).map(|l| su_irrep_matrix_at(basis, l, g, 0)).collect()
}

/// `V^λ_π` read from the representation slot `q = 0`.
pub fn sym_irrep_matrix(basis: &SchurBasis, lambda: &YoungDiagram, pi: &Permutation) -> Result<CMatrix> {
    sym_irrep_matrix_at(basis, basis.label_index(lambda)?, pi, 0)
}

pub fn sym_irrep_matrix_at(basis: &SchurBasis, label: usize, pi: &Permutation, q: usize) -> Result<CMatrix> {
    if pi.len() != basis.n() {
        return Err(Error::DimensionMismatch {
            expected: basis.n(),
            found: pi.len(),
        });
    }
    if q >= basis.d_lambda(label) {
        return Err(Error::SlotOutOfRange {
            slot: q,
            dim: basis.d_lambda(label),
        });
    }
    let x = basis.mult_columns(label, q);
    let y = apply_permutation(pi, basis.d(), &x);
    check_extracted(x.transpose() * y, "S(n)", basis.label(label))
}

pub fn sym_irrep_blocks(basis: &SchurBasis, pi: &Permutation) -> Result<Vec<CMatrix>> {
    (0..basis.num_labels()).map(|l| sym_irrep_matrix_at(basis, l, pi, 0)).collect()
}

/// Unitary `V^λ` with `(U^λ_g)* = V^λ U^{λ̄}_g (V^λ)†` for all `g ∈ SU(d)`.
///
/// `U^λ` is read from `src` (label index `label`) and `U^{λ̄}` from `dst`,
/// where `λ̄` is the associated diagram padded to `dst.n()` boxes. The
/// intertwiner is the null vector of `(U^λ_g)* X − X U^{λ̄}_g = 0` stacked
/// over Haar samples; the sample set grows while the null space is larger
/// than one.
pub fn conjugation_intertwiner<R: Rng + ?Sized>(
    src: &SchurBasis,
    label: usize,
    dst: &SchurBasis,
    rng: &mut R,
) -> Result<CMatrix> {
    let lambda = src.label(label).clone();
    if src.d() != dst.d() {
        return Err(Error::AssociatedMismatch {
            label: lambda.to_string(),
            reason: format!("local dimensions {} and {} differ", src.d(), dst.d()),
        });
    }
    let d = src.d();
    let bar = associated_diagram(&lambda, d, Some(dst.n())).map_err(|e| Error::AssociatedMismatch {
        label: lambda.to_string(),
        reason: e.to_string(),
    })?;
    let bar_label = dst.label_index(&bar).map_err(|e| Error::AssociatedMismatch {
        label: lambda.to_string(),
        reason: e.to_string(),
    })?;
    let dim = src.d_lambda(label);
    if dst.d_lambda(bar_label) != dim {
        return Err(Error::AssociatedMismatch {
            label: lambda.to_string(),
            reason: format!("dimension {dim} vs {} for {bar}", dst.d_lambda(bar_label)),
        });
    }

    let id = CMatrix::identity(dim, dim);
    let mut rows: Vec<CMatrix> = Vec::new();
    let mut found = 0;
    for round in 0..4 {
        let wanted = 3usize << round;
        while rows.len() < wanted {
            let g = haar_special_unitary(d, rng);
            let a = su_irrep_matrix_at(src, label, &g, 0)?;
            let b = su_irrep_matrix_at(dst, bar_label, &g, 0)?;
            rows.push(kron(&id, &a.conjugate()) - kron(&b.transpose(), &id));
        }
        let stacked = stack(&rows, dim * dim);
        let null = null_space(&stacked, 1e-8);
        found = null.len();
        if found == 1 {
            let x = CMatrix::from_column_slice(dim, dim, null[0].as_slice());
            return Ok(normalize_intertwiner(x, dim));
        }
        if found == 0 {
            break;
        }
    }
    Err(Error::IntertwinerNullSpace {
        label: lambda.to_string(),
        found,
    })
}

fn stack(blocks: &[CMatrix], cols: usize) -> CMatrix {
    let total: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(total, cols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), b.shape()).copy_from(b);
        r += b.nrows();
    }
    out
}

/// Right singular vectors with singular value below `tol · max(σ_max, 1)`.
///
/// The floor of one matters when every block is a scalar phase and the
/// stacked system is zero up to rounding.
fn null_space(a: &CMatrix, tol: f64) -> Vec<nalgebra::DVector<C64>> {
    let cols = a.ncols();
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = &svd.singular_values;
    let smax = sv.iter().fold(1.0f64, |m, &s| m.max(s));
    let mut out = Vec::new();
    for i in 0..cols {
        // rows beyond the thin rank carry zero singular values
        let sigma = if i < sv.len() { sv[i] } else { 0.0 };
        if sigma <= tol * smax {
            out.push(v_t.row(i).adjoint());
        }
    }
    out
}

/// Scales a solution of the intertwining equation to a unitary and applies
/// the phase convention (largest-magnitude entry real positive).
fn normalize_intertwiner(x: CMatrix, dim: usize) -> CMatrix {
    let hs = x.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let mut v = x * C64::new((dim as f64 / hs).sqrt(), 0.0);
    let max = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if let Some(lead) = v.iter().find(|z| z.norm() >= max - 1e-9).copied() {
        let phase = lead.conj() / lead.norm();
        v *= phase;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, c};
    use crate::repcore::{mn_character, enumerate_diagrams};
    use num_traits::ToPrimitive;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn yd(rows: &[usize]) -> YoungDiagram {
        YoungDiagram::new(rows.to_vec()).unwrap()
    }

    #[test]
    fn determinant_representation_is_trivial() {
        let basis = SchurBasis::build(2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let g = haar_special_unitary(2, &mut rng);
            let m = su_irrep_matrix(&basis, &yd(&[1, 1]), &g).unwrap();
            assert!((m[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn spin_one_weights() {
        let basis = SchurBasis::build(2, 2).unwrap();
        let theta = 0.37;
        let g = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::from_polar(1.0, theta),
            C64::from_polar(1.0, -theta),
        ]));
        let m = su_irrep_matrix(&basis, &yd(&[2]), &g).unwrap();
        let want = [2.0 * theta, 0.0, -2.0 * theta];
        for (i, w) in want.iter().enumerate() {
            assert!((m[(i, i)] - C64::from_polar(1.0, *w)).norm() < 1e-12);
        }
    }

    #[test]
    fn homomorphism_and_alpha_independence() {
        let basis = SchurBasis::build(4, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = haar_special_unitary(2, &mut rng);
        let h = haar_special_unitary(2, &mut rng);
        for label in 0..basis.num_labels() {
            let gh = su_irrep_matrix_at(&basis, label, &(&g * &h), 0).unwrap();
            let prod = su_irrep_matrix_at(&basis, label, &g, 0).unwrap()
                * su_irrep_matrix_at(&basis, label, &h, 0).unwrap();
            assert!(max_abs_diff(&gh, &prod) < 1e-8);
            for alpha in 1..basis.m_lambda(label) {
                let other = su_irrep_matrix_at(&basis, label, &g, alpha).unwrap();
                assert!(max_abs_diff(&other, &su_irrep_matrix_at(&basis, label, &g, 0).unwrap()) < 1e-8);
            }
        }
    }

    #[test]
    fn symmetric_group_examples() {
        let basis = SchurBasis::build(2, 2).unwrap();
        let swap = Permutation::from_cycles("(1 2)", 2).unwrap();
        let m = sym_irrep_matrix(&basis, &yd(&[1, 1]), &swap).unwrap();
        assert!((m[(0, 0)] + c(1.0, 0.0)).norm() < 1e-12);
        let m = sym_irrep_matrix(&basis, &yd(&[2]), &swap).unwrap();
        assert!((m[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn traces_are_characters() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (n, d) in [(3, 2), (4, 2), (4, 3), (5, 3)] {
            let basis = SchurBasis::build(n, d).unwrap();
            for _ in 0..4 {
                let pi = Permutation::random(n, &mut rng);
                for lambda in enumerate_diagrams(n, d) {
                    let m = sym_irrep_matrix(&basis, &lambda, &pi).unwrap();
                    let chi = mn_character(&lambda, &pi.cycle_type()).unwrap().to_f64().unwrap();
                    assert!((m.trace() - c(chi, 0.0)).norm() < 1e-8, "{lambda} {pi}");
                }
            }
        }
    }

    fn assert_intertwines(src: &SchurBasis, dst: &SchurBasis, label: usize, v: &CMatrix, rng: &mut ChaCha8Rng) {
        let bar = associated_diagram(src.label(label), src.d(), Some(dst.n())).unwrap();
        assert!(unitarity_residual(v) < 1e-8);
        for _ in 0..20 {
            let g = haar_special_unitary(src.d(), rng);
            let a = su_irrep_matrix_at(src, label, &g, 0).unwrap();
            let b = su_irrep_matrix(dst, &bar, &g).unwrap();
            assert!(max_abs_diff(&a.conjugate(), &(v * b * v.adjoint())) < 1e-8);
        }
    }

    #[test]
    fn qubit_intertwiners() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b1 = SchurBasis::build(1, 2).unwrap();
        let v = conjugation_intertwiner(&b1, 0, &b1, &mut rng).unwrap();
        // proportional to Pauli-y: zero diagonal, off-diagonal of opposite sign
        assert!(v[(0, 0)].norm() < 1e-9 && v[(1, 1)].norm() < 1e-9);
        assert!((v[(0, 1)] + v[(1, 0)]).norm() < 1e-9);
        assert_intertwines(&b1, &b1, 0, &v, &mut rng);

        let b2 = SchurBasis::build(2, 2).unwrap();
        for label in 0..b2.num_labels() {
            let v = conjugation_intertwiner(&b2, label, &b2, &mut rng).unwrap();
            assert_intertwines(&b2, &b2, label, &v, &mut rng);
        }
        let singlet = conjugation_intertwiner(&b2, 1, &b2, &mut rng).unwrap();
        assert_eq!(singlet.shape(), (1, 1));
        assert!((singlet[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qutrit_intertwiners_use_padded_partner() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let src = SchurBasis::build(2, 3).unwrap();
        let dst = SchurBasis::build(4, 3).unwrap();
        for label in 0..src.num_labels() {
            let v = conjugation_intertwiner(&src, label, &dst, &mut rng).unwrap();
            assert_intertwines(&src, &dst, label, &v, &mut rng);
        }
        // box count that padding cannot reach
        let bad = SchurBasis::build(3, 3).unwrap();
        assert!(matches!(
            conjugation_intertwiner(&src, 0, &bad, &mut rng),
            Err(Error::AssociatedMismatch { .. })
        ));
    }
}
