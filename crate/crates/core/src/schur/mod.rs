//! Numerical Schur basis of `(C^d)^{⊗n}`.
//!
//! The basis is real orthogonal. Column `(λ, q, α)` sits at
//! `offset(λ) + q·m_λ + α`, with diagrams in canonical order. In this basis
//! `U_g^{⊗n}` becomes `⊕_λ U^λ_g ⊗ I_{m_λ}` and a permutation of the tensor
//! factors becomes `⊕_λ I_{d_λ} ⊗ V^λ_π`.
//!
//! Construction per diagram `λ`:
//! 1. the highest-weight vectors of weight `λ` (kernel of the raising
//!    operators `E_{i,i+1}` on the weight-`λ` subspace) span a space of
//!    dimension `m_λ` and seed the multiplicity index `α`;
//! 2. lowering operators `F_{ij}` (`i < j`, lexicographic sweep) applied to the
//!    `α = 0` seed generate the representation index `q`, orthonormalized with
//!    two Gram–Schmidt passes; the same linear recipe is replayed on every
//!    other seed, which keeps the `q` basis identical across `α`.

mod cache;
mod irrep;
mod projector;
mod verify;

pub use cache::{read_complex_dump, write_complex_dump, ColumnLabel, ComplexDump, DumpHeader, PHASE_CONVENTION_VERSION};
pub use irrep::{conjugation_intertwiner, su_irrep_blocks, su_irrep_matrix, su_irrep_matrix_at, sym_irrep_blocks, sym_irrep_matrix, sym_irrep_matrix_at};
pub use projector::isotypic_projector;
pub use verify::{verify_basis, SchurVerification};

use std::collections::HashMap;
use std::ops::Range;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::perm::Permutation;
use crate::repcore::{build_table, IrrepTable, Role, YoungDiagram};

pub const DEFAULT_DIM_CAP: usize = 4096;
pub const DIM_CAP_ENV: &str = "REPMATCH_DIM_CAP";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuildOptions {
    /// Largest allowed `d^n`.
    pub cap: usize,
    /// Relative tolerance for rank decisions during construction.
    pub tol: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_DIM_CAP,
            tol: 1e-8,
        }
    }
}

impl BuildOptions {
    /// Defaults, with the cap overridden by `REPMATCH_DIM_CAP` when set.
    pub fn from_env() -> Self {
        let mut opts = Self::default();
        if let Some(cap) = std::env::var(DIM_CAP_ENV).ok().and_then(|v| v.parse().ok()) {
            opts.cap = cap;
        }
        opts
    }
}

/// `d^n`, rejecting values above `cap`.
pub fn checked_dim(n: usize, d: usize, cap: usize) -> Result<usize> {
    let dim = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if dim > cap as u128 {
        return Err(Error::DimensionCap { dim, cap });
    }
    Ok(dim as usize)
}

/// A group element acting on `(C^d)^{⊗n}`.
#[derive(Clone, Debug)]
pub enum GroupElement {
    Unitary(CMatrix),
    Permutation(Permutation),
}

impl GroupElement {
    /// Checks unitarity (1e−12) and determinant one (1e−10) for SU(d) elements.
    pub fn special_unitary(u: CMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::InvalidArgument("group element must be square".into()));
        }
        let res = crate::linalg::unitarity_residual(&u);
        if res > 1e-12 {
            return Err(Error::InvalidArgument(format!("not unitary (residual {res:e})")));
        }
        let det = u.determinant();
        if (det - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidArgument(format!("determinant {det} is not 1")));
        }
        Ok(Self::Unitary(u))
    }
}

/// The operator permuting tensor factors: `|i₁…iₙ⟩ ↦ |i_{π⁻¹(1)}…i_{π⁻¹(n)}⟩`.
pub fn permutation_operator(pi: &Permutation, d: usize, cap: usize) -> Result<CMatrix> {
    let dim = checked_dim(pi.len(), d, cap)?;
    let map = crate::linalg::permutation_index_map(pi, d);
    let mut out = CMatrix::zeros(dim, dim);
    for (x, &y) in map.iter().enumerate() {
        out[(y, x)] = C64::new(1.0, 0.0);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct SchurBasis {
    n: usize,
    d: usize,
    table: IrrepTable,
    offsets: Vec<usize>,
    d_dims: Vec<usize>,
    m_dims: Vec<usize>,
    matrix: DMatrix<f64>,
}

impl SchurBasis {
    pub fn build(n: usize, d: usize) -> Result<Self> {
        build_schur_basis(n, d, &BuildOptions::default())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Irrep table in the unitary-array role.
    pub fn table(&self) -> &IrrepTable {
        &self.table
    }

    pub fn num_labels(&self) -> usize {
        self.offsets.len()
    }

    pub fn d_lambda(&self, label: usize) -> usize {
        self.d_dims[label]
    }

    pub fn m_lambda(&self, label: usize) -> usize {
        self.m_dims[label]
    }

    pub fn label(&self, label: usize) -> &YoungDiagram {
        &self.table.entries[label].lambda
    }

    pub fn label_index(&self, lambda: &YoungDiagram) -> Result<usize> {
        self.table.index_of(lambda)
    }

    /// Real orthogonal change of basis; columns are the Schur basis vectors.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn column(&self, label: usize, q: usize, alpha: usize) -> usize {
        debug_assert!(q < self.d_dims[label] && alpha < self.m_dims[label]);
        self.offsets[label] + q * self.m_dims[label] + alpha
    }

    pub fn block_columns(&self, label: usize) -> Range<usize> {
        let start = self.offsets[label];
        start..start + self.d_dims[label] * self.m_dims[label]
    }

    /// Columns `(λ, q, α)` for `q < d_λ` at fixed `α`, as a complex matrix.
    pub fn rep_columns(&self, label: usize, alpha: usize) -> CMatrix {
        let dl = self.d_dims[label];
        CMatrix::from_fn(self.dim(), dl, |x, q| {
            C64::new(self.matrix[(x, self.column(label, q, alpha))], 0.0)
        })
    }

    /// Columns `(λ, q, α)` for `α < m_λ` at fixed `q`, as a complex matrix.
    pub fn mult_columns(&self, label: usize, q: usize) -> CMatrix {
        let ml = self.m_dims[label];
        CMatrix::from_fn(self.dim(), ml, |x, a| {
            C64::new(self.matrix[(x, self.column(label, q, a))], 0.0)
        })
    }

    /// Coordinates in the Schur basis: `Bᵀ ψ` (the basis is real).
    pub fn to_schur(&self, psi: &CMatrix) -> Result<CMatrix> {
        self.check_rows(psi)?;
        let re = psi.map(|z| z.re);
        let im = psi.map(|z| z.im);
        let a = self.matrix.tr_mul(&re);
        let b = self.matrix.tr_mul(&im);
        Ok(CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| C64::new(a[(i, j)], b[(i, j)])))
    }

    /// Inverse of [`Self::to_schur`]: `B a`.
    pub fn from_schur(&self, coords: &CMatrix) -> Result<CMatrix> {
        self.check_rows(coords)?;
        let re = coords.map(|z| z.re);
        let im = coords.map(|z| z.im);
        let a = &self.matrix * re;
        let b = &self.matrix * im;
        Ok(CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| C64::new(a[(i, j)], b[(i, j)])))
    }

    fn check_rows(&self, m: &CMatrix) -> Result<()> {
        if m.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: m.nrows(),
            });
        }
        Ok(())
    }

    pub(crate) fn from_parts(n: usize, d: usize, matrix: DMatrix<f64>) -> Self {
        let table = build_table(n, d, Role::UnitaryArray);
        let (offsets, d_dims, m_dims) = layout(&table);
        Self {
            n,
            d,
            table,
            offsets,
            d_dims,
            m_dims,
            matrix,
        }
    }
}

fn layout(table: &IrrepTable) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let d_dims = table.rep_dims();
    let m_dims = table.mult_dims();
    let mut offsets = Vec::with_capacity(d_dims.len());
    let mut acc = 0;
    for (dl, ml) in d_dims.iter().zip(&m_dims) {
        offsets.push(acc);
        acc += dl * ml;
    }
    (offsets, d_dims, m_dims)
}

/// Builds the Schur basis for `(n, d)`; see the module docs for the procedure.
pub fn build_schur_basis(n: usize, d: usize, opts: &BuildOptions) -> Result<SchurBasis> {
    if d == 0 {
        return Err(Error::InvalidArgument("local dimension must be positive".into()));
    }
    let dim = checked_dim(n, d, opts.cap)?;
    let table = build_table(n, d, Role::UnitaryArray);
    let (offsets, d_dims, m_dims) = layout(&table);
    let sites = SiteLayout::new(n, d);
    let mut weight_spaces: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for x in 0..dim {
        weight_spaces.entry(sites.content(x)).or_default().push(x);
    }

    let mut matrix = DMatrix::<f64>::zeros(dim, dim);
    for (label, entry) in table.entries.iter().enumerate() {
        let weight = entry.lambda.rows_padded(d);
        let seeds = highest_weight_vectors(&sites, &weight_spaces[&weight], opts.tol);
        if seeds.len() != m_dims[label] {
            return Err(Error::ProjectorRank {
                label: entry.lambda.to_string(),
                expected: m_dims[label],
                found: seeds.len(),
            });
        }
        let recipe = LoweringRecipe::discover(&sites, &seeds[0], d_dims[label], opts.tol);
        if recipe.len() != d_dims[label] {
            return Err(Error::BasisInvalid(format!(
                "lowering orbit of {} closed at {} vectors, expected {}",
                entry.lambda,
                recipe.len(),
                d_dims[label]
            )));
        }
        for (alpha, seed) in seeds.iter().enumerate() {
            for (q, v) in recipe.replay(&sites, seed).into_iter().enumerate() {
                let col = offsets[label] + q * m_dims[label] + alpha;
                matrix.column_mut(col).copy_from_slice(&v);
            }
        }
    }
    Ok(SchurBasis {
        n,
        d,
        table,
        offsets,
        d_dims,
        m_dims,
        matrix,
    })
}

pub(crate) struct SiteLayout {
    n: usize,
    d: usize,
    dim: usize,
    strides: Vec<usize>,
}

impl SiteLayout {
    pub(crate) fn new(n: usize, d: usize) -> Self {
        let strides = (0..n).map(|k| d.pow((n - 1 - k) as u32)).collect();
        Self {
            n,
            d,
            dim: d.pow(n as u32),
            strides,
        }
    }

    fn digit(&self, x: usize, site: usize) -> usize {
        (x / self.strides[site]) % self.d
    }

    /// Number of sites holding each level: the weight of basis vector `x`.
    pub(crate) fn content(&self, x: usize) -> Vec<usize> {
        let mut w = vec![0; self.d];
        for k in 0..self.n {
            w[self.digit(x, k)] += 1;
        }
        w
    }

    /// `Σ_k (|to⟩⟨from|)_k` applied to a dense real vector.
    fn ladder(&self, from: usize, to: usize, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (x, &amp) in v.iter().enumerate() {
            if amp == 0.0 {
                continue;
            }
            for k in 0..self.n {
                if self.digit(x, k) == from {
                    let y = x + to * self.strides[k] - from * self.strides[k];
                    out[y] += amp;
                }
            }
        }
        out
    }
}

/// Orthonormal basis of `{v ∈ span(indices) : E_{i,i+1} v = 0 ∀i}`.
fn highest_weight_vectors(sites: &SiteLayout, indices: &[usize], tol: f64) -> Vec<Vec<f64>> {
    let size = indices.len();
    // Gram matrix Σᵢ Eᵢᵀ Eᵢ on the weight space; images are grouped by target index.
    let mut images: HashMap<usize, Vec<usize>> = HashMap::new();
    for (p, &x) in indices.iter().enumerate() {
        for k in 0..sites.n {
            let digit = sites.digit(x, k);
            if digit > 0 {
                images.entry(x - sites.strides[k]).or_default().push(p);
            }
        }
    }
    let mut gram = DMatrix::<f64>::zeros(size, size);
    for sources in images.values() {
        for &a in sources {
            for &b in sources {
                gram[(a, b)] += 1.0;
            }
        }
    }
    let eig = SymmetricEigen::new(gram);
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, &e| m.max(e.abs()));
    let mut kernel: Vec<Vec<f64>> = Vec::new();
    for (i, &e) in eig.eigenvalues.iter().enumerate() {
        if e.abs() < 1e-6 * scale {
            let mut v = vec![0.0; sites.dim];
            for (p, &x) in indices.iter().enumerate() {
                v[x] = eig.eigenvectors[(p, i)];
            }
            kernel.push(v);
        }
    }
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(kernel.len());
    for mut v in kernel {
        orthogonalize(&mut v, &out);
        let nrm = norm(&v);
        if nrm > tol {
            scale_in_place(&mut v, 1.0 / nrm);
            fix_sign(&mut v);
            out.push(v);
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn scale_in_place(v: &mut [f64], s: f64) {
    v.iter_mut().for_each(|x| *x *= s);
}

/// Two Gram–Schmidt passes; returns the accumulated projection coefficients.
fn orthogonalize(v: &mut [f64], against: &[Vec<f64>]) -> Vec<f64> {
    let mut coeffs = vec![0.0; against.len()];
    for _ in 0..2 {
        for (k, u) in against.iter().enumerate() {
            let c = dot(u, v);
            coeffs[k] += c;
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
        }
    }
    coeffs
}

/// Makes the largest-magnitude amplitude positive (first index on ties); returns the sign used.
fn fix_sign(v: &mut [f64]) -> f64 {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let lead = v.iter().find(|x| x.abs() >= max - 1e-9).copied().unwrap_or(0.0);
    let sign = if lead < 0.0 { -1.0 } else { 1.0 };
    if sign < 0.0 {
        scale_in_place(v, -1.0);
    }
    sign
}

struct LoweringStep {
    parent: usize,
    from: usize,
    to: usize,
    coeffs: Vec<f64>,
    norm: f64,
    sign: f64,
}

/// Linear recipe generating the `q` basis of one irrep copy from its highest-weight seed.
struct LoweringRecipe {
    steps: Vec<LoweringStep>,
}

impl LoweringRecipe {
    fn discover(sites: &SiteLayout, seed: &[f64], target: usize, tol: f64) -> Self {
        let d = sites.d;
        let ops: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
        let mut kept: Vec<Vec<f64>> = vec![seed.to_vec()];
        let mut steps = Vec::new();
        let mut cursor = 0;
        'outer: while cursor < kept.len() {
            for &(from, to) in &ops {
                if kept.len() == target {
                    break 'outer;
                }
                // kept vectors are unit norm, so an absolute threshold also
                // discards images that vanish exactly up to rounding noise
                let mut w = sites.ladder(from, to, &kept[cursor]);
                if norm(&w) <= tol {
                    continue;
                }
                let coeffs = orthogonalize(&mut w, &kept);
                let after = norm(&w);
                if after <= tol {
                    continue;
                }
                scale_in_place(&mut w, 1.0 / after);
                let sign = fix_sign(&mut w);
                steps.push(LoweringStep {
                    parent: cursor,
                    from,
                    to,
                    coeffs,
                    norm: after,
                    sign,
                });
                kept.push(w);
            }
            cursor += 1;
        }
        Self { steps }
    }

    /// Number of vectors produced, including the seed.
    fn len(&self) -> usize {
        self.steps.len() + 1
    }

    fn replay(&self, sites: &SiteLayout, seed: &[f64]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = vec![seed.to_vec()];
        for step in &self.steps {
            let mut w = sites.ladder(step.from, step.to, &out[step.parent]);
            for (k, c) in step.coeffs.iter().enumerate() {
                if *c != 0.0 {
                    w.iter_mut().zip(&out[k]).for_each(|(x, y)| *x -= c * y);
                }
            }
            scale_in_place(&mut w, step.sign / step.norm);
            out.push(w);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{apply_permutation, basis_state, max_abs_diff};

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn col(b: &SchurBasis, c: usize) -> Vec<f64> {
        b.matrix().column(c).iter().copied().collect()
    }

    #[test]
    fn two_qubits_triplet_and_singlet() {
        let b = SchurBasis::build(2, 2).unwrap();
        let expect = [
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, S, S, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, S, -S, 0.0],
        ];
        for (c, e) in expect.iter().enumerate() {
            let got = col(&b, c);
            for (x, y) in got.iter().zip(e) {
                assert!((x - y).abs() < 1e-12, "column {c}: {got:?}");
            }
        }
    }

    #[test]
    fn single_copy_is_standard_basis() {
        for d in 1..5 {
            let b = SchurBasis::build(1, d).unwrap();
            let diff = b.matrix() - DMatrix::<f64>::identity(d, d);
            assert!(diff.abs().max() < 1e-12);
        }
    }

    #[test]
    fn three_qubit_block_sizes() {
        let b = SchurBasis::build(3, 2).unwrap();
        assert_eq!((b.d_lambda(0), b.m_lambda(0)), (4, 1));
        assert_eq!((b.d_lambda(1), b.m_lambda(1)), (2, 2));
        assert_eq!(b.block_columns(1), 4..8);
        assert_eq!(b.dim(), 8);
    }

    #[test]
    fn cap_is_enforced() {
        let opts = BuildOptions { cap: 8, ..Default::default() };
        assert!(matches!(build_schur_basis(4, 2, &opts), Err(Error::DimensionCap { .. })));
        assert!(build_schur_basis(3, 2, &opts).is_ok());
    }

    #[test]
    fn permutation_operator_examples() {
        let id = permutation_operator(&Permutation::identity(3), 2, 4096).unwrap();
        assert!(max_abs_diff(&id, &CMatrix::identity(8, 8)) == 0.0);
        let swap = permutation_operator(&Permutation::from_cycles("(1 2)", 2).unwrap(), 2, 4096).unwrap();
        let out = &swap * basis_state(4, 0b01);
        assert_eq!(out, basis_state(4, 0b10));
        let cyc = Permutation::from_cycles("(1 2 3)", 3).unwrap();
        let p = permutation_operator(&cyc, 2, 4096).unwrap();
        assert!(max_abs_diff(&(&p * &p * &p), &CMatrix::identity(8, 8)) == 0.0);
        // operator and index-map application agree
        let psi = crate::linalg::random_state(8, 1, &mut rand::rng());
        assert!(max_abs_diff(&(&p * &psi), &apply_permutation(&cyc, 2, &psi)) < 1e-15);
        assert!(matches!(
            permutation_operator(&Permutation::identity(13), 2, 4096),
            Err(Error::DimensionCap { .. })
        ));
    }

    #[test]
    fn schur_round_trip() {
        let b = SchurBasis::build(3, 3).unwrap();
        let psi = crate::linalg::random_state(27, 2, &mut rand::rng());
        let back = b.from_schur(&b.to_schur(&psi).unwrap()).unwrap();
        assert!(max_abs_diff(&psi, &back) < 1e-12);
    }

    #[test]
    fn group_element_validation() {
        assert!(GroupElement::special_unitary(CMatrix::identity(2, 2)).is_ok());
        let phase = CMatrix::identity(2, 2) * C64::new(0.0, 1.0);
        assert!(GroupElement::special_unitary(phase).is_err());
        let not_unitary = CMatrix::identity(2, 2) * C64::new(2.0, 0.0);
        assert!(GroupElement::special_unitary(not_unitary).is_err());
    }
}
