use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::repcore::{IrrepTable, Role};
use crate::schur::SchurBasis;

/// Register structure of the block decomposition.
///
/// Block `λ` is stored as a `rep_pad × (mult_λ · ext)` matrix: rows index the
/// representation register (padded to `rep_pad ≥ rep_λ`), columns index the
/// multiplicity register and the external reference, `α·ext + e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockLayout {
    pub role: Role,
    pub rep_dims: Vec<usize>,
    pub mult_dims: Vec<usize>,
    pub rep_pad: usize,
}

impl BlockLayout {
    pub fn from_table(table: &IrrepTable, role: Role) -> Self {
        let (rep_dims, mult_dims) = if role == table.role {
            (table.rep_dims(), table.mult_dims())
        } else {
            (table.mult_dims(), table.rep_dims())
        };
        let rep_pad = rep_dims.iter().copied().max().unwrap_or(0);
        Self {
            role,
            rep_dims,
            mult_dims,
            rep_pad,
        }
    }

    pub fn num_labels(&self) -> usize {
        self.rep_dims.len()
    }

    /// Position in the Schur basis of (label, representation slot, multiplicity slot).
    fn schur_row(&self, basis: &SchurBasis, label: usize, rep: usize, mult: usize) -> usize {
        match self.role {
            Role::UnitaryArray => basis.column(label, rep, mult),
            Role::Permutation => basis.column(label, mult, rep),
        }
    }
}

/// A state in block coordinates; see [`BlockLayout`].
#[derive(Clone, Debug, PartialEq)]
pub struct BlockState {
    pub layout: BlockLayout,
    pub ext: usize,
    pub blocks: Vec<CMatrix>,
}

impl BlockState {
    pub fn zeros(layout: &BlockLayout, ext: usize) -> Self {
        let blocks = layout
            .mult_dims
            .iter()
            .map(|&m| CMatrix::zeros(layout.rep_pad, m * ext))
            .collect();
        Self {
            layout: layout.clone(),
            ext,
            blocks,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum()
    }

    pub fn scaled(mut self, s: f64) -> Self {
        for b in &mut self.blocks {
            *b *= C64::new(s, 0.0);
        }
        self
    }

    pub fn normalized(self) -> Self {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            self
        } else {
            self.scaled(1.0 / n)
        }
    }

    /// Weight on representation slots beyond each label's own dimension.
    pub fn padding_norm_sqr(&self) -> f64 {
        self.blocks
            .iter()
            .zip(&self.layout.rep_dims)
            .map(|(b, &r)| b.rows(r, self.layout.rep_pad - r).norm_squared())
            .sum()
    }

    /// Weight carried by each label.
    pub fn label_weights(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.norm_squared()).collect()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum::<C64>())
            .sum()
    }

    pub fn fidelity(&self, other: &Self) -> f64 {
        let (a, b) = (self.norm_sqr(), other.norm_sqr());
        if a == 0.0 || b == 0.0 {
            return 0.0;
        }
        self.inner(other).norm_sqr() / (a * b)
    }

    /// Applies `ops[λ]` to the representation register of block `λ`; operators
    /// smaller than the padded register act on its leading slots.
    pub fn apply_blocks(&self, ops: &[CMatrix]) -> Self {
        let blocks = self
            .blocks
            .iter()
            .zip(ops)
            .map(|(b, op)| apply_on_leading(op, b))
            .collect();
        Self {
            layout: self.layout.clone(),
            ext: self.ext,
            blocks,
        }
    }

    /// Back to the full tensor-product space; fails if any padding slot is occupied.
    pub fn compose(&self, basis: &SchurBasis) -> Result<CMatrix> {
        let pad = self.padding_norm_sqr();
        if pad > 1e-20 {
            return Err(Error::InvalidArgument(format!(
                "state has weight {pad:e} outside the physical representation slots"
            )));
        }
        let mut coords = CMatrix::zeros(basis.dim(), self.ext);
        for (label, block) in self.blocks.iter().enumerate() {
            for rep in 0..self.layout.rep_dims[label] {
                for mult in 0..self.layout.mult_dims[label] {
                    let row = self.layout.schur_row(basis, label, rep, mult);
                    for e in 0..self.ext {
                        coords[(row, e)] = block[(rep, mult * self.ext + e)];
                    }
                }
            }
        }
        basis.from_schur(&coords)
    }
}

pub(crate) fn apply_on_leading(op: &CMatrix, block: &CMatrix) -> CMatrix {
    let k = op.nrows();
    let mut out = block.clone();
    let head = op * block.rows(0, k);
    out.rows_mut(0, k).copy_from(&head);
    out
}

/// Splits `ψ` (`d^n × ext`) into blocks; `ψ` must be normalized to 1e−10.
pub fn decompose_input(psi: &CMatrix, basis: &SchurBasis, role: Role) -> Result<BlockState> {
    if psi.nrows() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: psi.nrows(),
        });
    }
    let norm = psi.norm_squared();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm.sqrt()));
    }
    decompose_unchecked(psi, basis, role)
}

pub(crate) fn decompose_unchecked(psi: &CMatrix, basis: &SchurBasis, role: Role) -> Result<BlockState> {
    let layout = BlockLayout::from_table(basis.table(), role);
    let coords = basis.to_schur(psi)?;
    let ext = psi.ncols();
    let mut state = BlockState::zeros(&layout, ext);
    for label in 0..layout.num_labels() {
        for rep in 0..layout.rep_dims[label] {
            for mult in 0..layout.mult_dims[label] {
                let row = layout.schur_row(basis, label, rep, mult);
                for e in 0..ext {
                    state.blocks[label][(rep, mult * ext + e)] = coords[(row, e)];
                }
            }
        }
    }
    Ok(state)
}

/// Bijection between (label, representation slot) pairs and `[0, d_tot)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeMap {
    offsets: Vec<usize>,
    dims: Vec<usize>,
    total: usize,
}

impl MergeMap {
    pub fn new(rep_dims: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(rep_dims.len());
        let mut total = 0;
        for &r in rep_dims {
            offsets.push(total);
            total += r;
        }
        Self {
            offsets,
            dims: rep_dims.to_vec(),
            total,
        }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn merge(&self, label: usize, slot: usize) -> Result<usize> {
        let dim = *self.dims.get(label).ok_or(Error::SlotOutOfRange {
            slot: label,
            dim: self.dims.len(),
        })?;
        if slot >= dim {
            return Err(Error::SlotOutOfRange { slot, dim });
        }
        Ok(self.offsets[label] + slot)
    }

    pub fn split(&self, index: usize) -> Result<(usize, usize)> {
        if index >= self.total {
            return Err(Error::SlotOutOfRange {
                slot: index,
                dim: self.total,
            });
        }
        let label = self.offsets.partition_point(|&o| o <= index) - 1;
        Ok((label, index - self.offsets[label]))
    }
}

/// Memory index of `(λ, m)`: the representation dimensions of all earlier
/// diagrams plus `m`.
pub fn merge_registers(label: usize, slot: usize, table: &IrrepTable) -> Result<usize> {
    MergeMap::new(&table.rep_dims()).merge(label, slot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_state, fidelity, random_state};
    use crate::repcore::build_table;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn merge_examples() {
        let t = build_table(4, 2, Role::UnitaryArray);
        assert_eq!(merge_registers(0, 0, &t).unwrap(), 0);
        assert_eq!(merge_registers(1, 2, &t).unwrap(), 7);
        assert!(matches!(merge_registers(1, 3, &t), Err(Error::SlotOutOfRange { .. })));
        let map = MergeMap::new(&t.rep_dims());
        for i in 0..map.total() {
            let (l, m) = map.split(i).unwrap();
            assert_eq!(map.merge(l, m).unwrap(), i);
        }
        assert!(map.split(9).is_err());
    }

    #[test]
    fn supports_of_simple_inputs() {
        let basis = SchurBasis::build(3, 2).unwrap();
        let s = decompose_input(&basis_state(8, 0), &basis, Role::UnitaryArray).unwrap();
        assert!((s.label_weights()[0] - 1.0).abs() < 1e-12);

        let basis = SchurBasis::build(2, 2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = CMatrix::from_column_slice(4, 1, &[0.0, r, -r, 0.0].map(|x| C64::new(x, 0.0)));
        let s = decompose_input(&singlet, &basis, Role::UnitaryArray).unwrap();
        assert!(s.label_weights()[0] < 1e-24);
        assert!((s.label_weights()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn round_trip_both_roles() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, d) in [(3, 2), (4, 2), (3, 3)] {
            let basis = SchurBasis::build(n, d).unwrap();
            for role in [Role::UnitaryArray, Role::Permutation] {
                let psi = random_state(basis.dim(), 2, &mut rng);
                let s = decompose_input(&psi, &basis, role).unwrap();
                assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
                assert!(s.padding_norm_sqr() == 0.0);
                assert!(fidelity(&psi, &s.compose(&basis).unwrap()) >= 1.0 - 1e-10);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let basis = SchurBasis::build(2, 2).unwrap();
        let psi = basis_state(4, 1) * C64::new(2.0, 0.0);
        assert!(matches!(decompose_input(&psi, &basis, Role::UnitaryArray), Err(Error::NotNormalized(_))));
        assert!(matches!(
            decompose_input(&basis_state(8, 1), &basis, Role::UnitaryArray),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
