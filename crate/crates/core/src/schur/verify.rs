use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use super::{SchurBasis, SiteLayout};
use crate::linalg::{apply_tensor_power, haar_special_unitary, permutation_index_map, random_state, CMatrix, C64};
use crate::perm::Permutation;

/// Residuals of a Schur basis against its defining properties.
///
/// Block residuals are the largest norm of the component of `U_g^{⊗n} b`
/// (or `P_π b`) leaving the multiplet of a basis column `b`, measured at the
/// first partner slot. Spreads measure `‖U_g^{⊗n} b − Σ b' M‖` at the other
/// slots with `M` the block extracted at the first slot, so they bound both
/// leakage and any dependence on the partner index.
#[derive(Clone, Debug, Serialize)]
pub struct SchurVerification {
    pub n: usize,
    pub d: usize,
    pub samples: usize,
    pub unitarity_residual: f64,
    pub su_block_residual: f64,
    pub su_alpha_spread: f64,
    pub sym_block_residual: f64,
    pub sym_q_spread: f64,
    /// `‖P_π U^{⊗n} v − B (⊕ U^λ ⊗ V^λ) Bᵀ v‖` on random vectors.
    pub commutation_residual: f64,
    pub dims_match: bool,
}

impl SchurVerification {
    pub fn max_residual(&self) -> f64 {
        [
            self.unitarity_residual,
            self.su_block_residual,
            self.su_alpha_spread,
            self.sym_block_residual,
            self.sym_q_spread,
            self.commutation_residual,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.dims_match && self.max_residual() < tol
    }
}

/// Checks orthonormality, the block structure under `samples` Haar unitaries
/// and `samples` uniform permutations, and the joint action.
pub fn verify_basis<R: Rng + ?Sized>(basis: &SchurBasis, samples: usize, rng: &mut R) -> SchurVerification {
    let gs: Vec<CMatrix> = (0..samples).map(|_| haar_special_unitary(basis.d(), rng)).collect();
    let pis: Vec<Permutation> = (0..samples).map(|_| Permutation::random(basis.n(), rng)).collect();
    let maps: Vec<Vec<usize>> = pis.iter().map(|p| permutation_index_map(p, basis.d())).collect();
    let weights = WeightIndex::new(basis);

    let mut su_block_residual = 0.0f64;
    let mut su_alpha_spread = 0.0f64;
    let mut sym_block_residual = 0.0f64;
    let mut sym_q_spread = 0.0f64;
    let mut su_blocks: Vec<Vec<CMatrix>> = vec![Vec::new(); samples];
    let mut sym_blocks: Vec<Vec<CMatrix>> = vec![Vec::new(); samples];

    for label in 0..basis.num_labels() {
        let (dl, ml) = (basis.d_lambda(label), basis.m_lambda(label));
        for alpha in 0..ml {
            let x = basis.matrix().select_columns((0..dl).map(|q| basis.column(label, q, alpha)).collect::<Vec<_>>().iter());
            let xc = x.map(|v| C64::new(v, 0.0));
            for (s, g) in gs.iter().enumerate() {
                let y = apply_tensor_power(g, basis.n(), &xc);
                if alpha == 0 {
                    let m = real_tr_mul(&x, &y);
                    let r = y - real_mul(&x, &m);
                    su_block_residual = su_block_residual.max(max_column_norm(&r));
                    su_blocks[s].push(m);
                } else {
                    // compared against the α = 0 block directly: any leakage
                    // or α dependence shows up in this residual
                    let r = y - real_mul(&x, &su_blocks[s][label]);
                    su_alpha_spread = su_alpha_spread.max(max_column_norm(&r));
                }
            }
        }
        // Permutations preserve weight spaces, and every column of the
        // multiplet (λ, q, ·) has the same weight, so only those rows matter.
        for q in 0..dl {
            let cols: Vec<usize> = (0..ml).map(|a| basis.column(label, q, a)).collect();
            let rows = weights.rows_of_column(basis, cols[0]);
            let x = basis.matrix().select_columns(cols.iter()).select_rows(rows.iter());
            for (s, map) in maps.iter().enumerate() {
                let mut y = DMatrix::<f64>::zeros(x.nrows(), x.ncols());
                for (i, &row) in rows.iter().enumerate() {
                    let target = weights.position[map[row]];
                    y.row_mut(target).copy_from(&x.row(i));
                }
                let m = x.tr_mul(&y);
                let r = &y - &x * &m;
                let res = r.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
                sym_block_residual = sym_block_residual.max(res);
                let m = m.map(|v| C64::new(v, 0.0));
                if q == 0 {
                    sym_blocks[s].push(m);
                } else {
                    sym_q_spread = sym_q_spread.max(max_diff(&m, &sym_blocks[s][label]));
                }
            }
        }
    }

    let mut commutation_residual = 0.0f64;
    for s in 0..samples {
        let v = random_state(basis.dim(), 1, rng);
        let direct = permute_rows(&apply_tensor_power(&gs[s], basis.n(), &v), &maps[s]);
        let coords = basis.to_schur(&v).expect("dimension checked");
        let mut moved = CMatrix::zeros(coords.nrows(), 1);
        for label in 0..basis.num_labels() {
            let (dl, ml) = (basis.d_lambda(label), basis.m_lambda(label));
            let start = basis.block_columns(label).start;
            // block coordinates reshaped as a d_λ × m_λ matrix C ↦ U C Vᵀ
            let c = CMatrix::from_fn(dl, ml, |q, a| coords[(start + q * ml + a, 0)]);
            let out = &su_blocks[s][label] * c * sym_blocks[s][label].transpose();
            for q in 0..dl {
                for a in 0..ml {
                    moved[(start + q * ml + a, 0)] = out[(q, a)];
                }
            }
        }
        let via_blocks = basis.from_schur(&moved).expect("dimension checked");
        commutation_residual = commutation_residual.max((direct - via_blocks).norm());
    }

    let labels = basis.num_labels();
    let table_dims = basis.table().entries.iter().enumerate().all(|(l, e)| {
        e.d_lambda == basis.d_lambda(l).into() && e.m_lambda == basis.m_lambda(l).into()
    });
    let total = (0..labels).map(|l| basis.d_lambda(l) * basis.m_lambda(l)).sum::<usize>();
    let extracted = (0..samples).all(|s| {
        (0..labels).all(|l| {
            su_blocks[s][l].nrows() == basis.d_lambda(l) && sym_blocks[s][l].nrows() == basis.m_lambda(l)
        })
    });
    let dims_match = table_dims && total == basis.dim() && extracted;

    SchurVerification {
        n: basis.n(),
        d: basis.d(),
        samples,
        unitarity_residual: unitarity_residual(basis),
        su_block_residual,
        su_alpha_spread,
        sym_block_residual,
        sym_q_spread,
        commutation_residual,
        dims_match,
    }
}

/// Row indices of each weight space and the position of every row inside its own space.
struct WeightIndex {
    content: Vec<Vec<usize>>,
    rows: HashMap<Vec<usize>, Vec<usize>>,
    position: Vec<usize>,
}

impl WeightIndex {
    fn new(basis: &SchurBasis) -> Self {
        let sites = SiteLayout::new(basis.n(), basis.d());
        let content: Vec<Vec<usize>> = (0..basis.dim()).map(|x| sites.content(x)).collect();
        let mut rows: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        let mut position = vec![0; basis.dim()];
        for (x, w) in content.iter().enumerate() {
            let list = rows.entry(w.clone()).or_default();
            position[x] = list.len();
            list.push(x);
        }
        Self { content, rows, position }
    }

    /// Rows of the weight space holding the dominant amplitude of `col`.
    fn rows_of_column(&self, basis: &SchurBasis, col: usize) -> &[usize] {
        let lead = basis.matrix().column(col).iamax();
        &self.rows[&self.content[lead]]
    }
}

/// `Xᵀ Y` for real `X` and complex `Y`.
fn real_tr_mul(x: &DMatrix<f64>, y: &CMatrix) -> CMatrix {
    let re = x.tr_mul(&y.map(|z| z.re));
    let im = x.tr_mul(&y.map(|z| z.im));
    CMatrix::from_fn(re.nrows(), re.ncols(), |i, j| C64::new(re[(i, j)], im[(i, j)]))
}

/// `X M` for real `X` and complex `M`.
fn real_mul(x: &DMatrix<f64>, m: &CMatrix) -> CMatrix {
    let re = x * m.map(|z| z.re);
    let im = x * m.map(|z| z.im);
    CMatrix::from_fn(re.nrows(), re.ncols(), |i, j| C64::new(re[(i, j)], im[(i, j)]))
}

fn permute_rows(x: &CMatrix, map: &[usize]) -> CMatrix {
    let mut out = CMatrix::zeros(x.nrows(), x.ncols());
    for col in 0..x.ncols() {
        for (src, &dst) in map.iter().enumerate() {
            out[(dst, col)] = x[(src, col)];
        }
    }
    out
}

fn max_column_norm(m: &CMatrix) -> f64 {
    m.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `max |BᵀB − I|`, computed weight space by weight space.
///
/// Every column is first checked to be supported on a single weight space
/// (amplitude elsewhere counts toward the residual); the Gram matrix then
/// splits into one block per weight.
fn unitarity_residual(basis: &SchurBasis) -> f64 {
    let b = basis.matrix();
    let dim = basis.dim();
    let sites = SiteLayout::new(basis.n(), basis.d());
    let row_weight: Vec<Vec<usize>> = (0..dim).map(|x| sites.content(x)).collect();
    let mut rows_by_weight: HashMap<&[usize], Vec<usize>> = HashMap::new();
    for (x, w) in row_weight.iter().enumerate() {
        rows_by_weight.entry(w.as_slice()).or_default().push(x);
    }
    let mut cols_by_weight: HashMap<&[usize], Vec<usize>> = HashMap::new();
    let mut residual = 0.0f64;
    for col in 0..dim {
        let column = b.column(col);
        let lead = column.iamax();
        let w = row_weight[lead].as_slice();
        for (x, v) in column.iter().enumerate() {
            if row_weight[x].as_slice() != w {
                residual = residual.max(v.abs());
            }
        }
        cols_by_weight.entry(w).or_default().push(col);
    }
    for (w, cols) in &cols_by_weight {
        let rows = &rows_by_weight[w];
        let sub = b.select_rows(rows.iter()).select_columns(cols.iter());
        let gram = sub.tr_mul(&sub);
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                residual = residual.max((gram[(i, j)] - target).abs());
            }
        }
    }
    residual
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_bases_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (n, d) in [(1, 2), (2, 2), (3, 2), (5, 2), (3, 3), (2, 4)] {
            let basis = SchurBasis::build(n, d).unwrap();
            let report = verify_basis(&basis, 5, &mut rng);
            assert!(report.passed(1e-9), "{report:?}");
        }
    }

    #[test]
    fn corrupted_basis_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let basis = SchurBasis::build(3, 2).unwrap();
        let mut m = basis.matrix().clone();
        m.swap_columns(0, 5);
        let broken = SchurBasis::from_parts(3, 2, m);
        let report = verify_basis(&broken, 3, &mut rng);
        assert!(!report.passed(1e-9));
    }

    #[test]
    fn per_weight_unitarity_matches_dense_check() {
        let basis = SchurBasis::build(4, 3).unwrap();
        let b = basis.matrix();
        let dense = (b.tr_mul(b) - nalgebra::DMatrix::<f64>::identity(81, 81)).abs().max();
        assert!((unitarity_residual(&basis) - dense).abs() < 1e-12 || dense < 1e-12);
    }
}
