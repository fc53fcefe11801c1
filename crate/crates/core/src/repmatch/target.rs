use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::state::{BlockLayout, MergeMap};
use crate::costmodel::Task;
use crate::error::{Error, Result};
use crate::linalg::{apply_permutation, apply_tensor_power, haar_special_unitary, CMatrix};
use crate::perm::Permutation;
use crate::repcore::Role;
use crate::schur::{
    build_schur_basis, conjugation_intertwiner, su_irrep_blocks, su_irrep_matrix_at, sym_irrep_blocks,
    BuildOptions, GroupElement, SchurBasis,
};

/// Seed for the random samples used to pin conjugation intertwiners; fixed
/// so that a setup is a pure function of `(n, d, task)`.
const INTERTWINER_SEED: u64 = 0x5eed_c0de;

/// The gate station B is asked to apply to Christa's `n` systems.
#[derive(Clone, Debug)]
pub struct TargetSpec {
    pub task: Task,
    pub element: GroupElement,
    pub n: usize,
    pub d: usize,
}

impl TargetSpec {
    /// `U_g^{⊗n}` for `g ∈ SU(d)`.
    pub fn unitary(u: CMatrix, n: usize) -> Result<Self> {
        let d = u.nrows();
        Ok(Self {
            task: Task::UnitaryArray,
            element: GroupElement::special_unitary(u)?,
            n,
            d,
        })
    }

    /// `(U_g^*)^{⊗n}`, realised from `(d−1)n` queries of `U_g`.
    pub fn conjugation(u: CMatrix, n: usize) -> Result<Self> {
        let mut t = Self::unitary(u, n)?;
        t.task = Task::Conjugation;
        Ok(t)
    }

    /// Permutation of the `n` local systems of dimension `d`.
    pub fn permutation(pi: Permutation, d: usize) -> Self {
        Self {
            task: Task::Permutation,
            n: pi.len(),
            d,
            element: GroupElement::Permutation(pi),
        }
    }

    /// Haar-random (or uniformly random) target for `task`.
    pub fn random<R: Rng + ?Sized>(task: Task, n: usize, d: usize, rng: &mut R) -> Result<Self> {
        match task {
            Task::UnitaryArray => Self::unitary(haar_special_unitary(d, rng), n),
            Task::Conjugation => Self::conjugation(haar_special_unitary(d, rng), n),
            Task::Permutation => Ok(Self::permutation(Permutation::random(n, rng), d)),
            Task::StorageRetrieval => Err(unsupported(task)),
        }
    }

    pub fn role(&self) -> Role {
        self.task.role()
    }

    /// Copies of `U_g` consumed per application of the target.
    pub fn uses(&self) -> usize {
        match self.task {
            Task::Conjugation => (self.d - 1) * self.n,
            _ => self.n,
        }
    }

    fn unitary_element(&self) -> Result<&CMatrix> {
        match &self.element {
            GroupElement::Unitary(u) => Ok(u),
            GroupElement::Permutation(_) => Err(Error::InvalidArgument(format!(
                "task {} needs an SU({}) element",
                self.task, self.d
            ))),
        }
    }

    /// Direct full-space action, used as the reference output.
    pub fn ideal_output(&self, psi: &CMatrix) -> Result<CMatrix> {
        let dim = self.d.pow(self.n as u32);
        if psi.nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: psi.nrows(),
            });
        }
        match (&self.task, &self.element) {
            (Task::UnitaryArray, GroupElement::Unitary(u)) => Ok(apply_tensor_power(u, self.n, psi)),
            (Task::Conjugation, GroupElement::Unitary(u)) => Ok(apply_tensor_power(&u.conjugate(), self.n, psi)),
            (Task::Permutation, GroupElement::Permutation(pi)) => Ok(apply_permutation(pi, self.d, psi)),
            _ => Err(unsupported(self.task)),
        }
    }
}

fn unsupported(task: Task) -> Error {
    Error::InvalidArgument(format!("task {task} is not a representation-matching target"))
}

/// Everything station B needs besides the gate itself: the Schur basis for
/// `n` copies, and for conjugation the partner basis on `(d−1)n` copies with
/// the per-block intertwiners.
#[derive(Clone, Debug)]
pub struct RepMatchSetup {
    task: Task,
    basis: SchurBasis,
    partner: Option<SchurBasis>,
    intertwiners: Vec<CMatrix>,
    layout: BlockLayout,
    merge: MergeMap,
}

impl RepMatchSetup {
    pub fn new(n: usize, d: usize, task: Task, opts: &BuildOptions) -> Result<Self> {
        let basis = build_schur_basis(n, d, opts)?;
        let partner = match task {
            Task::Conjugation if d > 2 => Some(build_schur_basis((d - 1) * n, d, opts)?),
            _ => None,
        };
        Self::from_bases(basis, partner, task)
    }

    /// Reuses prebuilt bases. For conjugation with `d > 2`, `partner` must
    /// be the basis on `(d−1)n` copies; with `d = 2` it may be omitted.
    pub fn from_bases(basis: SchurBasis, partner: Option<SchurBasis>, task: Task) -> Result<Self> {
        if task == Task::StorageRetrieval {
            return Err(unsupported(task));
        }
        let (n, d) = (basis.n(), basis.d());
        let mut intertwiners = Vec::new();
        let mut partner = partner;
        if task == Task::Conjugation {
            if partner.is_none() && d == 2 {
                partner = Some(basis.clone());
            }
            let dst = partner.as_ref().ok_or_else(|| {
                Error::InvalidArgument(format!("conjugation needs the basis on {} copies", (d - 1) * n))
            })?;
            if dst.n() != (d - 1) * n || dst.d() != d {
                return Err(Error::InvalidArgument(format!(
                    "partner basis has n={}, d={}; expected n={}, d={d}",
                    dst.n(),
                    dst.d(),
                    (d - 1) * n
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(INTERTWINER_SEED);
            for label in 0..basis.num_labels() {
                intertwiners.push(conjugation_intertwiner(&basis, label, dst, &mut rng)?);
            }
        }
        let layout = BlockLayout::from_table(basis.table(), task.role());
        let merge = MergeMap::new(&layout.rep_dims);
        Ok(Self {
            task,
            basis,
            partner,
            intertwiners,
            layout,
            merge,
        })
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn basis(&self) -> &SchurBasis {
        &self.basis
    }

    pub fn partner(&self) -> Option<&SchurBasis> {
        self.partner.as_ref()
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    pub fn merge_map(&self) -> &MergeMap {
        &self.merge
    }

    /// `|R|`, the number of block labels and of test outcomes.
    pub fn num_branches(&self) -> usize {
        self.layout.num_labels()
    }

    /// `d_R`, the padded representation register.
    pub fn d_r(&self) -> usize {
        self.layout.rep_pad
    }

    /// `d_tot`, the merged backward register.
    pub fn d_tot(&self) -> usize {
        self.merge.total()
    }

    pub(crate) fn check_target(&self, target: &TargetSpec) -> Result<()> {
        if target.task != self.task || target.n != self.basis.n() || target.d != self.basis.d() {
            return Err(Error::InvalidArgument(format!(
                "target ({}, n={}, d={}) does not match setup ({}, n={}, d={})",
                target.task,
                target.n,
                target.d,
                self.task,
                self.basis.n(),
                self.basis.d()
            )));
        }
        Ok(())
    }

    /// The unpadded block `T_λ` the target applies on each representation register.
    pub fn target_blocks(&self, target: &TargetSpec) -> Result<Vec<CMatrix>> {
        self.check_target(target)?;
        match self.task {
            Task::UnitaryArray => su_irrep_blocks(&self.basis, target.unitary_element()?),
            Task::Permutation => match &target.element {
                GroupElement::Permutation(pi) => sym_irrep_blocks(&self.basis, pi),
                GroupElement::Unitary(_) => Err(Error::InvalidArgument("permutation task needs a permutation".into())),
            },
            Task::Conjugation => {
                let u = target.unitary_element()?;
                let dst = self.partner.as_ref().expect("checked at construction");
                let mut out = Vec::with_capacity(self.basis.num_labels());
                for (label, x) in self.intertwiners.iter().enumerate() {
                    let bar = crate::repcore::associated_diagram(self.basis.label(label), self.basis.d(), Some(dst.n()))?;
                    let bar_label = dst.label_index(&bar)?;
                    let partner_block = su_irrep_matrix_at(dst, bar_label, u, 0)?;
                    out.push(x * partner_block * x.adjoint());
                }
                Ok(out)
            }
            Task::StorageRetrieval => Err(unsupported(self.task)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, unitarity_residual};

    #[test]
    fn uses_per_task() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(TargetSpec::random(Task::UnitaryArray, 4, 3, &mut rng).unwrap().uses(), 4);
        assert_eq!(TargetSpec::random(Task::Conjugation, 4, 3, &mut rng).unwrap().uses(), 8);
        assert_eq!(TargetSpec::random(Task::Permutation, 4, 3, &mut rng).unwrap().uses(), 4);
        assert!(TargetSpec::random(Task::StorageRetrieval, 4, 3, &mut rng).is_err());
        let phase = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![crate::linalg::c(1.0, 0.0), crate::linalg::c(0.0, 1.0)]));
        assert!(TargetSpec::unitary(phase, 2).is_err());
    }

    #[test]
    fn conjugate_blocks_match_entrywise_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let opts = BuildOptions::default();
        for (n, d) in [(2, 2), (3, 2), (2, 3)] {
            let setup = RepMatchSetup::new(n, d, Task::Conjugation, &opts).unwrap();
            let target = TargetSpec::random(Task::Conjugation, n, d, &mut rng).unwrap();
            let direct = match &target.element {
                GroupElement::Unitary(u) => su_irrep_blocks(setup.basis(), u).unwrap(),
                _ => unreachable!(),
            };
            for (t, u) in setup.target_blocks(&target).unwrap().iter().zip(&direct) {
                assert!(unitarity_residual(t) < 1e-9);
                assert!(max_abs_diff(t, &u.conjugate()) < 1e-9);
            }
        }
    }

    #[test]
    fn mismatched_target_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let setup = RepMatchSetup::new(2, 2, Task::UnitaryArray, &BuildOptions::default()).unwrap();
        let t = TargetSpec::random(Task::UnitaryArray, 3, 2, &mut rng).unwrap();
        assert!(setup.target_blocks(&t).is_err());
        let t = TargetSpec::random(Task::Permutation, 2, 2, &mut rng).unwrap();
        assert!(setup.target_blocks(&t).is_err());
    }
}
