use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::state::{decompose_input, decompose_unchecked, BlockState};
use super::target::{RepMatchSetup, TargetSpec};
use crate::costmodel::amplify_rounds;
use crate::error::{Error, Result};
use crate::harness::{GateOracle, Leg, RoundQueries, RoundRecord, Transcript};
use crate::linalg::{pad_with_identity, CMatrix, C64};

/// One branch of the modified matching test.
#[derive(Clone, Debug)]
pub struct ProtocolOutcome {
    /// Test outcome `r̂`; `0` is success.
    pub branch: usize,
    pub probability: f64,
    /// Normalized post-measurement state of the index, representation and multiplicity registers.
    pub state: BlockState,
    /// Overlap with the ideal target output.
    pub fidelity: f64,
}

/// All branches of a single round.
#[derive(Clone, Debug)]
pub struct RoundResult {
    pub outcomes: Vec<ProtocolOutcome>,
    /// Weight of the joint (ansatz, representation) state outside the merged
    /// `d_tot`-dimensional support when station B sends it back.
    pub merged_support_leak: f64,
}

impl RoundResult {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }
}

/// Executes one round of the modified test.
///
/// `ops[a]` is the padded operator station B applies to the representation
/// register when the ansatz register reads `a`. Outcome `r̂` keeps the terms
/// with ansatz `λ + r̂ (mod |R|)` against index `λ`.
pub fn run_round(input: &BlockState, ops: &[CMatrix], ideal: &BlockState) -> RoundResult {
    let labels = input.layout.num_labels();
    let pad = input.layout.rep_pad;
    let weight = 1.0 / labels as f64;
    let mut leak = 0.0;
    let mut products: Vec<Vec<CMatrix>> = Vec::with_capacity(labels);
    for (a, op) in ops.iter().enumerate() {
        let rep_a = input.layout.rep_dims[a];
        let row: Vec<CMatrix> = input.blocks.iter().map(|b| op * b).collect();
        leak += row.iter().map(|p| p.rows(rep_a, pad - rep_a).norm_squared()).sum::<f64>() * weight;
        products.push(row);
    }
    let outcomes = (0..labels)
        .map(|branch| {
            let mut state = BlockState::zeros(&input.layout, input.ext);
            for lambda in 0..labels {
                state.blocks[lambda] = products[(lambda + branch) % labels][lambda].clone();
            }
            let probability = state.norm_sqr() * weight;
            let state = state.normalized();
            let fidelity = state.fidelity(ideal);
            ProtocolOutcome {
                branch,
                probability,
                state,
                fidelity,
            }
        })
        .collect();
    RoundResult {
        outcomes,
        merged_support_leak: leak,
    }
}

/// A full single-round run with every branch enumerated.
#[derive(Clone, Debug)]
pub struct RepMatchRun {
    pub outcomes: Vec<ProtocolOutcome>,
    pub merged_support_leak: f64,
    /// Weight on padding slots in the success branch; zero up to rounding.
    pub success_padding: f64,
    pub transcript: Transcript,
    pub queries: Vec<RoundQueries>,
}

impl RepMatchRun {
    pub fn success(&self) -> &ProtocolOutcome {
        &self.outcomes[0]
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }
}

fn padded(blocks: &[CMatrix], pad: usize) -> Vec<CMatrix> {
    blocks.iter().map(|b| pad_with_identity(b, pad)).collect()
}

fn ideal_blocks(psi: &CMatrix, target: &TargetSpec, setup: &RepMatchSetup) -> Result<BlockState> {
    decompose_unchecked(&target.ideal_output(psi)?, setup.basis(), target.role())
}

fn meter_round(t: &mut Transcript, round: usize, setup: &RepMatchSetup) {
    t.send(round, Leg::AToB, "R", setup.d_r() as u64);
    t.send(round, Leg::BToA, "AR (merged)", setup.d_tot() as u64);
}

pub fn run_repmatch(psi: &CMatrix, target: &TargetSpec, setup: &RepMatchSetup) -> Result<RepMatchRun> {
    let mut oracle = GateOracle::new(target.clone());
    run_repmatch_with(psi, &mut oracle, setup)
}

/// As [`run_repmatch`], drawing the gate from a caller-owned oracle.
pub fn run_repmatch_with(psi: &CMatrix, oracle: &mut GateOracle, setup: &RepMatchSetup) -> Result<RepMatchRun> {
    let target = oracle.target().clone();
    setup.check_target(&target)?;
    let input = decompose_input(psi, setup.basis(), target.role())?;
    let ops = padded(&setup.target_blocks(&target)?, setup.d_r());
    oracle.charge(1, 1, 0);
    let ideal = ideal_blocks(psi, &target, setup)?;

    let mut transcript = Transcript::new("repmatch", format!("repmatch-{}-n{}-d{}", target.task, target.n, target.d));
    meter_round(&mut transcript, 1, setup);
    let round = run_round(&input, &ops, &ideal);
    for o in &round.outcomes {
        transcript.record(RoundRecord {
            round: 1,
            branch: o.branch,
            success: o.branch == 0,
            probability: o.probability,
            fidelity: Some(o.fidelity),
        });
    }
    let success_padding = round.outcomes[0].state.padding_norm_sqr();
    Ok(RepMatchRun {
        outcomes: round.outcomes,
        merged_support_leak: round.merged_support_leak,
        success_padding,
        transcript,
        queries: oracle.rounds().to_vec(),
    })
}

/// Block operator undoing a failed round.
#[derive(Clone, Debug)]
pub struct Recovery {
    branch: usize,
    /// `W_λ`: what the failed round did to block `λ` (padded).
    applied: Vec<CMatrix>,
}

impl Recovery {
    pub fn branch(&self) -> usize {
        self.branch
    }

    /// The operator the failed round left on each block.
    pub fn applied(&self) -> &[CMatrix] {
        &self.applied
    }

    /// `W_λ†` per block.
    pub fn blocks(&self) -> Vec<CMatrix> {
        self.applied.iter().map(|w| w.adjoint()).collect()
    }

    pub fn apply(&self, state: &BlockState) -> BlockState {
        state.apply_blocks(&self.blocks())
    }

    /// Operators for a retry round: `T_a W_a†` for every ansatz value `a`.
    pub fn retry_ops(&self, target_ops: &[CMatrix]) -> Vec<CMatrix> {
        target_ops.iter().zip(&self.applied).map(|(t, w)| t * w.adjoint()).collect()
    }
}

fn recovery_from_ops(branch: usize, ops: &[CMatrix], previous: Option<&[CMatrix]>) -> Recovery {
    let labels = ops.len();
    let applied = (0..labels)
        .map(|lambda| {
            let shifted = &ops[(lambda + branch) % labels];
            match previous {
                Some(prev) => shifted * &prev[lambda],
                None => shifted.clone(),
            }
        })
        .collect();
    Recovery { branch, applied }
}

/// Recovery for outcome `branch` of a first round.
pub fn recovery_unitary(branch: usize, target: &TargetSpec, setup: &RepMatchSetup) -> Result<Recovery> {
    if branch == 0 {
        return Err(Error::NothingToRecover);
    }
    if branch >= setup.num_branches() {
        return Err(Error::SlotOutOfRange {
            slot: branch,
            dim: setup.num_branches(),
        });
    }
    let ops = padded(&setup.target_blocks(target)?, setup.d_r());
    Ok(recovery_from_ops(branch, &ops, None))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RoundLimit {
    MaxRounds(usize),
    /// Enough rounds that the failure probability is at most `ε`.
    Epsilon(f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiRoundSummary {
    pub success: bool,
    pub rounds: usize,
    pub max_rounds: usize,
    pub branches: Vec<usize>,
    pub fidelity: f64,
    pub restored_fidelity: Option<f64>,
    pub qubits: u64,
}

#[derive(Clone, Debug)]
pub struct MultiRoundRun {
    pub success: bool,
    pub rounds: usize,
    pub max_rounds: usize,
    /// Observed test outcome per round.
    pub branches: Vec<usize>,
    pub final_state: BlockState,
    /// Fidelity of the final state to the ideal output (success) or to the
    /// input after the closing recovery (failure).
    pub fidelity: f64,
    pub restored_fidelity: Option<f64>,
    pub transcript: Transcript,
    pub queries: Vec<RoundQueries>,
}

impl MultiRoundRun {
    pub fn summary(&self) -> MultiRoundSummary {
        MultiRoundSummary {
            success: self.success,
            rounds: self.rounds,
            max_rounds: self.max_rounds,
            branches: self.branches.clone(),
            fidelity: self.fidelity,
            restored_fidelity: self.restored_fidelity,
            qubits: self.transcript.total_qubits(),
        }
    }
}

fn resolve_limit(limit: RoundLimit, labels: usize) -> Result<usize> {
    match limit {
        RoundLimit::MaxRounds(0) => Err(Error::InvalidArgument("max_rounds must be at least 1".into())),
        RoundLimit::MaxRounds(k) => Ok(k),
        RoundLimit::Epsilon(eps) => {
            let p = BigRational::new(BigInt::from(1), BigInt::from(labels));
            Ok(amplify_rounds(&p, eps)? as usize)
        }
    }
}

fn sample_branch<R: Rng + ?Sized>(outcomes: &[ProtocolOutcome], rng: &mut R) -> usize {
    let x: f64 = rng.random();
    let mut acc = 0.0;
    for o in outcomes {
        acc += o.probability;
        if x < acc {
            return o.branch;
        }
    }
    outcomes.last().map(|o| o.branch).unwrap_or(0)
}

pub fn run_until_success(
    psi: &CMatrix,
    target: &TargetSpec,
    setup: &RepMatchSetup,
    limit: RoundLimit,
    seed: u64,
) -> Result<MultiRoundRun> {
    let mut oracle = GateOracle::new(target.clone());
    run_until_success_with(psi, &mut oracle, setup, limit, seed)
}

/// Repeats the protocol, folding the pending recovery into each retry's target.
pub fn run_until_success_with(
    psi: &CMatrix,
    oracle: &mut GateOracle,
    setup: &RepMatchSetup,
    limit: RoundLimit,
    seed: u64,
) -> Result<MultiRoundRun> {
    let target = oracle.target().clone();
    setup.check_target(&target)?;
    let max_rounds = resolve_limit(limit, setup.num_branches())?;
    let input = decompose_input(psi, setup.basis(), target.role())?;
    let target_ops = padded(&setup.target_blocks(&target)?, setup.d_r());
    let ideal = ideal_blocks(psi, &target, setup)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut transcript = Transcript::new(
        "repmatch",
        format!("repmatch-{}-n{}-d{}-seed{seed}", target.task, target.n, target.d),
    );

    let mut state = input.clone();
    let mut pending: Option<Recovery> = None;
    // Applications of U and U† contained in the pending correction.
    let mut pending_words = (0u64, 0u64);
    let mut branches = Vec::new();

    for round in 1..=max_rounds {
        let (ops, words) = match &pending {
            Some(rec) => (rec.retry_ops(&target_ops), (1 + pending_words.1, pending_words.0)),
            None => (target_ops.clone(), (1, 0)),
        };
        oracle.charge(round, words.0, words.1);
        meter_round(&mut transcript, round, setup);
        let result = run_round(&state, &ops, &ideal);
        let branch = sample_branch(&result.outcomes, &mut rng);
        let outcome = &result.outcomes[branch];
        transcript.record(RoundRecord {
            round,
            branch,
            success: branch == 0,
            probability: outcome.probability,
            fidelity: Some(outcome.fidelity),
        });
        branches.push(branch);
        if branch == 0 {
            return Ok(MultiRoundRun {
                success: true,
                rounds: round,
                max_rounds,
                branches,
                final_state: outcome.state.clone(),
                fidelity: outcome.fidelity,
                restored_fidelity: None,
                transcript,
                queries: oracle.rounds().to_vec(),
            });
        }
        let previous = pending.as_ref().map(|r| r.applied.clone());
        pending = Some(recovery_from_ops(branch, &ops, previous.as_deref()));
        pending_words = (words.0 + pending_words.0, words.1 + pending_words.1);
        state = outcome.state.clone();
    }

    let rec = pending.expect("at least one failed round");
    oracle.charge(max_rounds, pending_words.1, pending_words.0);
    let restored = rec.apply(&state);
    let restored_fidelity = restored.fidelity(&input);
    Ok(MultiRoundRun {
        success: false,
        rounds: max_rounds,
        max_rounds,
        branches,
        final_state: restored,
        fidelity: restored_fidelity,
        restored_fidelity: Some(restored_fidelity),
        transcript,
        queries: oracle.rounds().to_vec(),
    })
}

/// Global phase between two states, for diagnostics.
pub fn relative_phase(a: &BlockState, b: &BlockState) -> C64 {
    let z = a.inner(b);
    if z.norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        z / z.norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::Task;
    use crate::linalg::{basis_state, fidelity, random_state};
    use crate::perm::Permutation;
    use crate::schur::BuildOptions;

    fn setup(n: usize, d: usize, task: Task) -> RepMatchSetup {
        RepMatchSetup::new(n, d, task, &BuildOptions::default()).unwrap()
    }

    #[test]
    fn single_copy_always_succeeds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = setup(1, 2, Task::UnitaryArray);
        let t = TargetSpec::random(Task::UnitaryArray, 1, 2, &mut rng).unwrap();
        let psi = random_state(2, 1, &mut rng);
        let run = run_repmatch(&psi, &t, &s).unwrap();
        assert_eq!(run.outcomes.len(), 1);
        assert!((run.success().probability - 1.0).abs() < 1e-12);
        let out = run.success().state.compose(s.basis()).unwrap();
        assert!(fidelity(&out, &t.ideal_output(&psi).unwrap()) > 1.0 - 1e-9);
        assert_eq!(run.queries[0].forward, 1);
    }

    #[test]
    fn two_qubit_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = setup(2, 2, Task::UnitaryArray);
        for psi in [basis_state(4, 1), basis_state(4, 0)] {
            let t = TargetSpec::random(Task::UnitaryArray, 2, 2, &mut rng).unwrap();
            let run = run_repmatch(&psi, &t, &s).unwrap();
            assert!((run.success().probability - 0.5).abs() < 1e-10);
            assert!((run.total_probability() - 1.0).abs() < 1e-10);
            assert!(run.success().fidelity > 1.0 - 1e-9);
            assert!(run.success_padding < 1e-24);
            assert_eq!(run.transcript.totals.forward, 2);
            assert_eq!(run.transcript.totals.backward, 2);
        }
    }

    #[test]
    fn permutation_three_cycle() {
        let s = setup(3, 2, Task::Permutation);
        let pi = Permutation::from_cycles("(1 2 3)", 3).unwrap();
        let t = TargetSpec::permutation(pi, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random_state(8, 1, &mut rng);
        let run = run_repmatch(&psi, &t, &s).unwrap();
        assert!((run.success().probability - 0.5).abs() < 1e-10);
        let out = run.success().state.compose(s.basis()).unwrap();
        assert!(fidelity(&out, &t.ideal_output(&psi).unwrap()) > 1.0 - 1e-9);
    }

    #[test]
    fn recovery_restores_input_and_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = setup(3, 2, Task::UnitaryArray);
        let t = TargetSpec::random(Task::UnitaryArray, 3, 2, &mut rng).unwrap();
        let psi = random_state(8, 3, &mut rng);
        let run = run_repmatch(&psi, &t, &s).unwrap();
        let input = decompose_input(&psi, s.basis(), t.role()).unwrap();
        assert!(matches!(recovery_unitary(0, &t, &s), Err(Error::NothingToRecover)));
        for o in &run.outcomes[1..] {
            let rec = recovery_unitary(o.branch, &t, &s).unwrap();
            let restored = rec.apply(&o.state);
            assert!(restored.fidelity(&input) > 1.0 - 1e-9);
            assert!(fidelity(&restored.compose(s.basis()).unwrap(), &psi) > 1.0 - 1e-9);
        }
    }

    #[test]
    fn second_round_after_failure_reaches_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = setup(2, 2, Task::UnitaryArray);
        let t = TargetSpec::random(Task::UnitaryArray, 2, 2, &mut rng).unwrap();
        let psi = random_state(4, 1, &mut rng);
        let run = run_repmatch(&psi, &t, &s).unwrap();
        let rec = recovery_unitary(1, &t, &s).unwrap();
        let ops = rec.retry_ops(&padded(&s.target_blocks(&t).unwrap(), s.d_r()));
        let ideal = ideal_blocks(&psi, &t, &s).unwrap();
        let second = run_round(&run.outcomes[1].state, &ops, &ideal);
        assert!((second.outcomes[0].probability - 0.5).abs() < 1e-10);
        assert!(second.outcomes[0].fidelity > 1.0 - 1e-9);
    }

    #[test]
    fn exhausted_rounds_restore_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = setup(3, 2, Task::UnitaryArray);
        let t = TargetSpec::random(Task::UnitaryArray, 3, 2, &mut rng).unwrap();
        let psi = random_state(8, 2, &mut rng);
        let mut failures = 0;
        for seed in 0..40 {
            let run = run_until_success(&psi, &t, &s, RoundLimit::MaxRounds(3), seed).unwrap();
            if run.success {
                assert!(run.fidelity > 1.0 - 1e-9);
            } else {
                failures += 1;
                assert!(run.restored_fidelity.unwrap() > 1.0 - 1e-9);
                assert_eq!(run.branches.len(), 3);
            }
            assert_eq!(run.transcript.total_qubits(), 5 * run.rounds as u64);
            assert!(run.transcript.is_consistent());
        }
        assert!(failures > 0);
    }

    #[test]
    fn epsilon_limit() {
        assert_eq!(resolve_limit(RoundLimit::Epsilon(0.01), 2).unwrap(), 7);
        assert_eq!(resolve_limit(RoundLimit::Epsilon(0.5), 1).unwrap(), 1);
        assert!(resolve_limit(RoundLimit::MaxRounds(0), 2).is_err());
    }
}
