//! Gate teleportation over the merged representation space, and storage of
//! the gate array in a memory with retrieval by a matching projection.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::costmodel::{decimal, Task};
use crate::error::{Error, Result};
use crate::harness::{GateOracle, Leg, RoundRecord, Transcript};
use crate::linalg::{CMatrix, C64};
use crate::repcore::{build_table, ceil_log2, Role};
use crate::repmatch::{decompose_input, BlockLayout, BlockState, MergeMap, ProtocolOutcome, TargetSpec};
use crate::schur::{
    checked_dim, read_complex_dump, su_irrep_blocks, write_complex_dump, BuildOptions, ComplexDump, DumpHeader,
    GroupElement, SchurBasis, PHASE_CONVENTION_VERSION,
};

fn ratio(a: usize, b: usize) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn unitary_blocks(target: &TargetSpec, basis: &SchurBasis) -> Result<Vec<CMatrix>> {
    if target.task != Task::UnitaryArray || target.n != basis.n() || target.d != basis.d() {
        return Err(Error::InvalidArgument(format!(
            "baseline protocols compress U_g^⊗n on n={} copies of C^{}; got task {} with n={}, d={}",
            basis.n(),
            basis.d(),
            target.task,
            target.n,
            target.d
        )));
    }
    match &target.element {
        GroupElement::Unitary(u) => su_irrep_blocks(basis, u),
        GroupElement::Permutation(_) => Err(Error::InvalidArgument("expected an SU(d) element".into())),
    }
}

/// Block-diagonal bipartite state on `R₁ ⊗ R₂`, one block per diagram.
///
/// Block `λ` holds the coefficient matrix of `amp_λ |λ⟩ ⊗ (U^λ ⊗ I)|Φ⁺_λ⟩`,
/// that is `amp_λ / √d_λ · U^λ`.
#[derive(Clone, Debug)]
pub struct BlockEntangled {
    rep_dims: Vec<usize>,
    amplitudes_sq: Vec<BigRational>,
    blocks: Vec<CMatrix>,
}

impl BlockEntangled {
    fn new(rep_dims: Vec<usize>, amplitudes_sq: Vec<BigRational>) -> Self {
        let blocks = rep_dims
            .iter()
            .zip(&amplitudes_sq)
            .map(|(&r, a)| {
                let amp = num_traits::ToPrimitive::to_f64(a).unwrap_or(0.0).sqrt();
                CMatrix::identity(r, r) * C64::new(amp / (r as f64).sqrt(), 0.0)
            })
            .collect();
        Self {
            rep_dims,
            amplitudes_sq,
            blocks,
        }
    }

    pub fn rep_dims(&self) -> &[usize] {
        &self.rep_dims
    }

    /// Exact squared amplitude of each block.
    pub fn amplitudes_sq(&self) -> &[BigRational] {
        &self.amplitudes_sq
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    /// `Σ amp_λ²` in exact arithmetic.
    pub fn exact_norm_sqr(&self) -> BigRational {
        self.amplitudes_sq.iter().fold(BigRational::zero(), |acc, a| acc + a)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum()
    }

    /// Largest deviation of a block's norm from its exact amplitude.
    pub fn amplitude_residual(&self) -> f64 {
        self.blocks
            .iter()
            .zip(&self.amplitudes_sq)
            .map(|(b, a)| (b.norm() - num_traits::ToPrimitive::to_f64(a).unwrap_or(0.0).sqrt()).abs())
            .fold(0.0, f64::max)
    }

    /// Dimension of the block-diagonal support, `Σ d_λ²`.
    pub fn support_dim(&self) -> usize {
        self.rep_dims.iter().map(|r| r * r).sum()
    }

    fn rotate(&mut self, gate_blocks: &[CMatrix]) {
        for (b, u) in self.blocks.iter_mut().zip(gate_blocks) {
            *b = u * &*b;
        }
    }

    /// Coefficient matrix on the merged `d_tot × d_tot` space.
    pub fn to_dense(&self) -> CMatrix {
        let total: usize = self.rep_dims.iter().sum();
        let mut out = CMatrix::zeros(total, total);
        let mut offset = 0;
        for (b, &r) in self.blocks.iter().zip(&self.rep_dims) {
            out.view_mut((offset, offset), (r, r)).copy_from(b);
            offset += r;
        }
        out
    }

    /// Amplitudes listed over the block support in `(λ, row, column)` order.
    fn support_vector(&self) -> CMatrix {
        let mut v = Vec::with_capacity(self.support_dim());
        for b in &self.blocks {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    v.push(b[(i, j)]);
                }
            }
        }
        CMatrix::from_column_slice(v.len(), 1, &v)
    }
}

/// Resource `Σ_λ √(d_λ/d_tot) |λ⟩|Φ⁺_λ⟩|η₀⟩`, the maximally entangled state of
/// the merged representation space.
#[derive(Clone, Debug)]
pub struct TeleportResource {
    pub n: usize,
    pub d: usize,
    pub d_tot: usize,
    pub state: BlockEntangled,
}

pub fn build_teleport_resource(n: usize, d: usize) -> Result<TeleportResource> {
    checked_dim(n, d, BuildOptions::from_env().cap)?;
    let table = build_table(n, d, Role::UnitaryArray);
    let dims = table.rep_dims();
    let d_tot: usize = dims.iter().sum();
    let amps = dims.iter().map(|&r| ratio(r, d_tot)).collect();
    Ok(TeleportResource {
        n,
        d,
        d_tot,
        state: BlockEntangled::new(dims, amps),
    })
}

impl TeleportResource {
    /// Success probability of the identity Bell outcome, from the amplitude
    /// pattern: every block contributes `amp_λ² / d_λ / d_tot`.
    pub fn exact_success_probability(&self) -> Result<BigRational> {
        block_uniform_factor(&self.state, |r| r * self.d_tot)
    }
}

/// Returns the common value of `amp_λ² / f(d_λ)`; fails if it depends on λ.
fn block_uniform_factor(state: &BlockEntangled, f: impl Fn(usize) -> usize) -> Result<BigRational> {
    let mut common: Option<BigRational> = None;
    for (&r, a) in state.rep_dims.iter().zip(&state.amplitudes_sq) {
        let v = a / BigRational::from_integer(BigInt::from(f(r)));
        match &common {
            None => common = Some(v),
            Some(c) if *c == v => {}
            Some(c) => {
                return Err(Error::InvalidArgument(format!(
                    "success probability depends on the input block ({c} vs {v})"
                )))
            }
        }
    }
    common.ok_or_else(|| Error::InvalidArgument("empty resource".into()))
}

/// Result of a baseline run: the success branch and the exact probability.
#[derive(Clone, Debug)]
pub struct BaselineRun {
    pub outcome: ProtocolOutcome,
    pub exact_probability: BigRational,
    pub failure_probability: f64,
    pub transcript: Transcript,
}

#[derive(Clone, Debug, Serialize)]
pub struct BaselineSummary {
    pub probability: f64,
    pub exact_probability: String,
    pub exact_probability_decimal: String,
    pub fidelity: f64,
    pub qubits: u64,
}

impl BaselineRun {
    pub fn summary(&self) -> BaselineSummary {
        BaselineSummary {
            probability: self.outcome.probability,
            exact_probability: self.exact_probability.to_string(),
            exact_probability_decimal: decimal(&self.exact_probability),
            fidelity: self.outcome.fidelity,
            qubits: self.transcript.total_qubits(),
        }
    }
}

/// Input in merged coordinates: rows index `(λ, representation slot)` through
/// `merge`, columns index the multiplicity slot (padded) and the reference.
fn to_merged(state: &BlockState, merge: &MergeMap, mult_pad: usize) -> CMatrix {
    let ext = state.ext;
    let mut out = CMatrix::zeros(merge.total(), mult_pad * ext);
    for (label, block) in state.blocks.iter().enumerate() {
        for rep in 0..state.layout.rep_dims[label] {
            let row = merge.merge(label, rep).expect("slot within block");
            let width = state.layout.mult_dims[label] * ext;
            out.view_mut((row, 0), (1, width)).copy_from(&block.view((rep, 0), (1, width)));
        }
    }
    out
}

fn from_merged(merged: &CMatrix, merge: &MergeMap, layout: &BlockLayout, ext: usize) -> BlockState {
    let mut state = BlockState::zeros(layout, ext);
    for row in 0..merge.total() {
        let (label, rep) = merge.split(row).expect("row within merged space");
        let width = layout.mult_dims[label] * ext;
        state.blocks[label]
            .view_mut((rep, 0), (1, width))
            .copy_from(&merged.view((row, 0), (1, width)));
    }
    state
}

fn ideal_state(psi: &CMatrix, target: &TargetSpec, basis: &SchurBasis) -> Result<BlockState> {
    decompose_input(&target.ideal_output(psi)?, basis, Role::UnitaryArray)
}

pub fn run_gate_teleport(psi: &CMatrix, target: &TargetSpec, basis: &SchurBasis) -> Result<BaselineRun> {
    let mut oracle = GateOracle::new(target.clone());
    run_gate_teleport_with(psi, &mut oracle, basis)
}

/// Station B rotates the resource with the gate and sends it; station A
/// projects the input and half of the resource onto the identity Bell state.
/// Only that branch is materialized; the rest is reported as one failure mass.
pub fn run_gate_teleport_with(psi: &CMatrix, oracle: &mut GateOracle, basis: &SchurBasis) -> Result<BaselineRun> {
    let target = oracle.target().clone();
    let gate = unitary_blocks(&target, basis)?;
    let input = decompose_input(psi, basis, Role::UnitaryArray)?;
    let mut resource = build_teleport_resource(basis.n(), basis.d())?;
    resource.state.rotate(&gate);
    oracle.charge(1, 1, 0);

    let mut transcript = Transcript::new("teleport", format!("teleport-n{}-d{}", basis.n(), basis.d()));
    transcript.send(1, Leg::BToA, "AR1R2 (block support)", resource.state.support_dim() as u64);

    let merge = MergeMap::new(resource.state.rep_dims());
    let mult_pad = input.layout.mult_dims.iter().copied().max().unwrap_or(1);
    let merged_in = to_merged(&input, &merge, mult_pad);
    // ⟨Φ⁺|_{in,R₂} applied to ψ_in ⊗ Σ_xy Φ_xy |x⟩_{R₁}|y⟩_{R₂} leaves Φ·ψ / √d_tot on R₁.
    let phi = resource.state.to_dense();
    let projected = (phi * merged_in) * C64::new(1.0 / (resource.d_tot as f64).sqrt(), 0.0);
    let branch = from_merged(&projected, &merge, &input.layout, input.ext);

    let probability = branch.norm_sqr();
    let state = branch.normalized();
    let fidelity = state.fidelity(&ideal_state(psi, &target, basis)?);
    let exact_probability = resource.exact_success_probability()?;
    transcript.record(RoundRecord {
        round: 1,
        branch: 0,
        success: true,
        probability,
        fidelity: Some(fidelity),
    });
    Ok(BaselineRun {
        outcome: ProtocolOutcome {
            branch: 0,
            probability,
            state,
            fidelity,
        },
        failure_probability: 1.0 - probability,
        exact_probability,
        transcript,
    })
}

/// Memory `Σ_λ d_λ/√d_tot,sq |λ⟩_A (U^λ_g ⊗ I)|Φ⁺_λ⟩_{R₁R₂}` holding the gate.
#[derive(Clone, Debug)]
pub struct GateMemory {
    pub n: usize,
    pub d: usize,
    pub d_tot_sq: usize,
    pub state: BlockEntangled,
}

impl GateMemory {
    /// Memory size in qubits, `⌈log₂ d_tot,sq⌉`.
    pub fn qubits(&self) -> u64 {
        ceil_log2(&num_bigint::BigUint::from(self.d_tot_sq))
    }

    /// Success probability of retrieval from the amplitude pattern: every
    /// block contributes `amp_λ² / d_λ²`.
    pub fn exact_success_probability(&self) -> Result<BigRational> {
        block_uniform_factor(&self.state, |r| r * r)
    }

    pub fn to_dump(&self) -> ComplexDump {
        let data = self.state.support_vector();
        ComplexDump {
            header: DumpHeader {
                kind: "gate-memory".into(),
                n: self.n,
                d: self.d,
                phase_convention_version: PHASE_CONVENTION_VERSION,
                rows: data.nrows(),
                cols: 1,
                columns: Vec::new(),
            },
            data,
        }
    }

    pub fn from_dump(dump: &ComplexDump) -> Result<Self> {
        let h = &dump.header;
        if h.kind != "gate-memory" || h.phase_convention_version != PHASE_CONVENTION_VERSION || h.cols != 1 {
            return Err(Error::BasisInvalid(format!("not a gate memory: {}", h.kind)));
        }
        let mut memory = empty_memory(h.n, h.d)?;
        if h.rows != memory.d_tot_sq {
            return Err(Error::DimensionMismatch {
                expected: memory.d_tot_sq,
                found: h.rows,
            });
        }
        let mut k = 0;
        for b in &mut memory.state.blocks {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    b[(i, j)] = dump.data[(k, 0)];
                    k += 1;
                }
            }
        }
        Ok(memory)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_complex_dump(BufWriter::new(File::create(path)?), &self.to_dump())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_dump(&read_complex_dump(BufReader::new(File::open(path)?))?)
    }
}

fn empty_memory(n: usize, d: usize) -> Result<GateMemory> {
    checked_dim(n, d, BuildOptions::from_env().cap)?;
    let table = build_table(n, d, Role::UnitaryArray);
    let dims = table.rep_dims();
    let d_tot_sq: usize = dims.iter().map(|r| r * r).sum();
    let amps = dims.iter().map(|&r| ratio(r * r, d_tot_sq)).collect();
    Ok(GateMemory {
        n,
        d,
        d_tot_sq,
        state: BlockEntangled::new(dims, amps),
    })
}

/// Storage: applies the gate once to the first half of every block.
pub fn store(target: &TargetSpec, basis: &SchurBasis) -> Result<GateMemory> {
    let mut oracle = GateOracle::new(target.clone());
    store_with(&mut oracle, basis)
}

pub fn store_with(oracle: &mut GateOracle, basis: &SchurBasis) -> Result<GateMemory> {
    let gate = unitary_blocks(oracle.target(), basis)?;
    let mut memory = empty_memory(basis.n(), basis.d())?;
    memory.state.rotate(&gate);
    oracle.charge(1, 1, 0);
    Ok(memory)
}

/// Retrieval: `N_yes = Σ_λ ⟨λ|_A ⊗ |λ⟩⟨λ|_I ⊗ ⟨Φ⁺_λ|_{R R₂}`, leaving the
/// output on `R₁`. The memory does not know which gate it holds, so the
/// returned fidelity is NaN; compare `state` against the ideal output yourself.
pub fn retrieve(psi: &CMatrix, memory: &GateMemory, basis: &SchurBasis) -> Result<(ProtocolOutcome, BigRational)> {
    if memory.n != basis.n() || memory.d != basis.d() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: memory.d.pow(memory.n as u32),
        });
    }
    let input = decompose_input(psi, basis, Role::UnitaryArray)?;
    let mut out = BlockState::zeros(&input.layout, input.ext);
    for (label, m) in memory.state.blocks.iter().enumerate() {
        let r = input.layout.rep_dims[label];
        let psi_lambda = input.blocks[label].rows(0, r);
        let projected = (m * psi_lambda) * C64::new(1.0 / (r as f64).sqrt(), 0.0);
        out.blocks[label].rows_mut(0, r).copy_from(&projected);
    }
    let probability = out.norm_sqr();
    let state = out.normalized();
    Ok((
        ProtocolOutcome {
            branch: 0,
            probability,
            state,
            fidelity: f64::NAN,
        },
        memory.exact_success_probability()?,
    ))
}

pub fn run_store_retrieve(psi: &CMatrix, target: &TargetSpec, basis: &SchurBasis) -> Result<BaselineRun> {
    let mut oracle = GateOracle::new(target.clone());
    run_store_retrieve_with(psi, &mut oracle, basis)
}

/// Stores the gate, hands the memory to station A and retrieves it there.
pub fn run_store_retrieve_with(psi: &CMatrix, oracle: &mut GateOracle, basis: &SchurBasis) -> Result<BaselineRun> {
    let memory = store_with(oracle, basis)?;
    let mut transcript = Transcript::new("store-retrieve", format!("store-retrieve-n{}-d{}", basis.n(), basis.d()));
    transcript.send(1, Leg::BToA, "AR1R2 (memory)", memory.d_tot_sq as u64);
    let (mut outcome, exact_probability) = retrieve(psi, &memory, basis)?;
    outcome.fidelity = outcome.state.fidelity(&ideal_state(psi, oracle.target(), basis)?);
    transcript.record(RoundRecord {
        round: 1,
        branch: 0,
        success: true,
        probability: outcome.probability,
        fidelity: Some(outcome.fidelity),
    });
    Ok(BaselineRun {
        failure_probability: 1.0 - outcome.probability,
        outcome,
        exact_probability,
        transcript,
    })
}

/// `⌈log₂ d_tot,sq⌉` from exact aggregates, for sizes beyond simulation.
pub fn memory_qubits(n: usize, d: usize) -> u64 {
    ceil_log2(&crate::repcore::aggregates(n, d, Role::UnitaryArray).d_tot_sq)
}

/// `p · d_tot² = 1` and `p_rs · d_tot,sq = 1` as exact identities.
pub fn exact_identities_hold(n: usize, d: usize) -> Result<bool> {
    let tele = build_teleport_resource(n, d)?;
    let mem = empty_memory(n, d)?;
    let dt = BigRational::from_integer(BigInt::from(tele.d_tot));
    let dsq = BigRational::from_integer(BigInt::from(mem.d_tot_sq));
    Ok(tele.state.exact_norm_sqr().is_one()
        && mem.state.exact_norm_sqr().is_one()
        && tele.exact_success_probability()? * &dt * &dt == BigRational::one()
        && mem.exact_success_probability()? * dsq == BigRational::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{fidelity, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn resource_examples() {
        let r = build_teleport_resource(1, 2).unwrap();
        let dense = r.state.to_dense();
        let expected = CMatrix::identity(2, 2) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        assert!((dense - expected).norm() < 1e-15);

        let r = build_teleport_resource(2, 2).unwrap();
        assert_eq!(r.state.amplitudes_sq(), &[ratio(3, 4), ratio(1, 4)]);
        assert!(r.state.exact_norm_sqr().is_one());
        assert!((r.state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn teleport_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for (n, expected) in [(1, ratio(1, 4)), (2, ratio(1, 16)), (4, ratio(1, 81))] {
            let basis = SchurBasis::build(n, 2).unwrap();
            let target = TargetSpec::random(Task::UnitaryArray, n, 2, &mut rng).unwrap();
            let psi = random_state(basis.dim(), 2, &mut rng);
            let run = run_gate_teleport(&psi, &target, &basis).unwrap();
            assert_eq!(run.exact_probability, expected);
            let p: f64 = num_traits::ToPrimitive::to_f64(&expected).unwrap();
            assert!((run.outcome.probability - p).abs() < 1e-12);
            assert!(run.outcome.fidelity > 1.0 - 1e-9);
            let out = run.outcome.state.compose(&basis).unwrap();
            assert!(fidelity(&out, &target.ideal_output(&psi).unwrap()) > 1.0 - 1e-9);
        }
    }

    #[test]
    fn storage_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, dsq, qubits) in [(1, 4, 2), (2, 10, 4)] {
            let basis = SchurBasis::build(n, 2).unwrap();
            let target = TargetSpec::random(Task::UnitaryArray, n, 2, &mut rng).unwrap();
            let memory = store(&target, &basis).unwrap();
            assert_eq!(memory.d_tot_sq, dsq);
            assert_eq!(memory.qubits(), qubits);
            assert!(memory.state.amplitude_residual() < 1e-12);
            let psi = random_state(basis.dim(), 1, &mut rng);
            let run = run_store_retrieve(&psi, &target, &basis).unwrap();
            assert_eq!(run.exact_probability, ratio(1, dsq));
            assert!((run.outcome.probability - 1.0 / dsq as f64).abs() < 1e-12);
            assert!(run.outcome.fidelity > 1.0 - 1e-9);
        }
    }

    #[test]
    fn memory_dump_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let basis = SchurBasis::build(3, 2).unwrap();
        let target = TargetSpec::random(Task::UnitaryArray, 3, 2, &mut rng).unwrap();
        let memory = store(&target, &basis).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("memory.bin");
        memory.save(&path).unwrap();
        let loaded = GateMemory::load(&path).unwrap();
        for (a, b) in loaded.state.blocks().iter().zip(memory.state.blocks()) {
            assert_eq!(a, b);
        }
        let schur_path = SchurBasis::cache_path(dir.path(), 3, 2);
        basis.save(&schur_path).unwrap();
        assert!(GateMemory::load(&schur_path).is_err());
    }

    #[test]
    fn identities_small_grid() {
        for n in 1..=6 {
            for d in 2..=3 {
                assert!(exact_identities_hold(n, d).unwrap());
            }
        }
    }

    #[test]
    fn wrong_task_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let basis = SchurBasis::build(2, 2).unwrap();
        let t = TargetSpec::random(Task::Permutation, 2, 2, &mut rng).unwrap();
        assert!(run_gate_teleport(&crate::linalg::basis_state(4, 0), &t, &basis).is_err());
    }
}
