//! Numerical witness for the counting lower bound: the operators `U_g^{⊗n}`
//! span a space of dimension `Σ d_λ²`, so any memory that reproduces them
//! needs at least that many dimensions.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::costmodel::{cost_report, Task};
use crate::error::{Error, Result};
use crate::linalg::{haar_special_unitary, tensor_power_matrix, CMatrix};
use crate::perm::{all_permutations, Permutation};
use crate::repcore::{aggregates, factorial, Role};
use crate::schur::{checked_dim, permutation_operator, BuildOptions};

pub const DEFAULT_RANK_TOL: f64 = 1e-8;
/// Rows sampled beyond the expected rank.
pub const OVERSAMPLING: usize = 8;
/// Largest `d^n` for which [`check_lower_bound`] attaches a rank witness.
pub const RANK_WITNESS_MAX_DIM: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankReport {
    pub expected: usize,
    pub measured: usize,
    /// Rank unchanged at `tol/10` and `tol·10`.
    pub stable: bool,
    pub samples: usize,
    pub tol: f64,
}

impl RankReport {
    pub fn passed(&self) -> bool {
        self.stable && self.measured == self.expected
    }
}

fn rank_at(singular: &[f64], tol: f64) -> usize {
    let smax = singular.iter().copied().fold(0.0, f64::max);
    singular.iter().filter(|&&s| s > tol * smax).count()
}

/// Numerical rank of `rows` (each a flattened operator) at three tolerance decades.
fn rank_with_stability(rows: &[CMatrix], tol: f64) -> (usize, bool) {
    let width = rows[0].len();
    let m = CMatrix::from_fn(rows.len(), width, |i, j| rows[i][j]);
    let singular: Vec<f64> = m.singular_values().iter().copied().collect();
    let r = rank_at(&singular, tol);
    (r, rank_at(&singular, tol * 0.1) == r && rank_at(&singular, tol * 10.0) == r)
}

fn expected_rank(n: usize, d: usize, role: Role) -> Result<usize> {
    aggregates(n, d, role)
        .d_tot_sq
        .to_usize()
        .ok_or_else(|| Error::InvalidArgument("expected rank exceeds usize".into()))
}

/// Rank of the span of `U_{g_k}^{⊗n}` over `sample_count` Haar samples.
pub fn matrix_element_rank<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    sample_count: usize,
    tol: f64,
    rng: &mut R,
) -> Result<RankReport> {
    checked_dim(n, d, BuildOptions::from_env().cap)?;
    let expected = expected_rank(n, d, Role::UnitaryArray)?;
    if sample_count < expected + OVERSAMPLING {
        return Err(Error::InvalidArgument(format!(
            "need at least {} samples, got {sample_count}",
            expected + OVERSAMPLING
        )));
    }
    let rows: Vec<CMatrix> = (0..sample_count)
        .map(|_| tensor_power_matrix(&haar_special_unitary(d, rng), n))
        .collect();
    let (measured, stable) = rank_with_stability(&rows, tol);
    Ok(RankReport {
        expected,
        measured,
        stable,
        samples: sample_count,
        tol,
    })
}

/// Rank of the span of permutation operators on `(C^d)^{⊗n}`; expected `Σ m_λ²`
/// over diagrams with at most `d` rows. Uses every permutation when `n!` is
/// at most `sample_count`, otherwise distinct random ones.
pub fn permutation_rank<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    sample_count: usize,
    tol: f64,
    rng: &mut R,
) -> Result<RankReport> {
    let cap = BuildOptions::from_env().cap;
    checked_dim(n, d, cap)?;
    let expected = expected_rank(n, d, Role::Permutation)?;
    let perms: Vec<Permutation> = if factorial(n) <= BigUint::from(sample_count) {
        all_permutations(n)
    } else {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(sample_count);
        while out.len() < sample_count {
            let p = Permutation::random(n, rng);
            if seen.insert(p.images().to_vec()) {
                out.push(p);
            }
        }
        out.shuffle(rng);
        out
    };
    if perms.len() < expected {
        return Err(Error::InvalidArgument(format!(
            "{} permutations cannot witness rank {expected}",
            perms.len()
        )));
    }
    let rows = perms
        .iter()
        .map(|p| permutation_operator(p, d, cap))
        .collect::<Result<Vec<_>>>()?;
    let (measured, stable) = rank_with_stability(&rows, tol);
    Ok(RankReport {
        expected,
        measured,
        stable,
        samples: rows.len(),
        tol,
    })
}

/// Rank witness for `task` with the default sample count and tolerance.
pub fn rank_witness(n: usize, d: usize, task: Task, seed: u64) -> Result<RankReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = expected_rank(n, d, task.role())? + OVERSAMPLING;
    match task {
        Task::Permutation => permutation_rank(n, d, samples, DEFAULT_RANK_TOL, &mut rng),
        _ => matrix_element_rank(n, d, samples, DEFAULT_RANK_TOL, &mut rng),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundReport {
    pub n: usize,
    pub d: usize,
    pub task: Task,
    /// Qubits the protocol for `task` spends.
    pub cost: u64,
    pub d_tot_sq: String,
    /// `2^cost ≥ d_tot,sq`.
    pub bound_holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<RankReport>,
}

impl LowerBoundReport {
    pub fn passed(&self) -> bool {
        self.bound_holds && self.rank.as_ref().is_none_or(RankReport::passed)
    }
}

/// Checks that the protocol's qubit count can hold the span of the target
/// operators, and attaches a rank witness when `d^n` is small.
pub fn check_lower_bound(n: usize, d: usize, task: Task) -> Result<LowerBoundReport> {
    let report = cost_report(n, d, task)?;
    let cost = match task {
        Task::StorageRetrieval => report.c_rs,
        _ => report.c_rm,
    };
    let bound_holds = BigUint::from(1u8) << cost >= report.d_tot_sq;
    let small = (d as u128)
        .checked_pow(n as u32)
        .is_some_and(|dim| dim <= RANK_WITNESS_MAX_DIM as u128);
    let rank = if small { Some(rank_witness(n, d, task, 0)?) } else { None };
    Ok(LowerBoundReport {
        n,
        d,
        task,
        cost,
        d_tot_sq: report.d_tot_sq.to_string(),
        bound_holds,
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_ranks() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (n, expected) in [(1, 4), (2, 10), (3, 20)] {
            let r = matrix_element_rank(n, 2, expected + OVERSAMPLING, DEFAULT_RANK_TOL, &mut rng).unwrap();
            assert_eq!(r.measured, expected);
            assert!(r.stable);
        }
        assert!(matrix_element_rank(2, 2, 10, DEFAULT_RANK_TOL, &mut rng).is_err());
    }

    #[test]
    fn permutation_span() {
        let r = rank_witness(4, 2, Task::Permutation, 3).unwrap();
        assert_eq!((r.expected, r.measured), (14, 14));
        assert!(r.stable);
        let r = rank_witness(3, 3, Task::Permutation, 3).unwrap();
        assert_eq!(r.measured, 6);
    }

    #[test]
    fn bound_examples() {
        let r = check_lower_bound(4, 2, Task::UnitaryArray).unwrap();
        assert_eq!((r.cost, r.d_tot_sq.as_str()), (7, "35"));
        assert!(r.passed(), "{r:?}");
        let r = check_lower_bound(1, 2, Task::UnitaryArray).unwrap();
        assert_eq!((r.cost, r.d_tot_sq.as_str()), (2, "4"));
        assert!(r.passed());
        let r = check_lower_bound(30, 3, Task::StorageRetrieval).unwrap();
        assert!(r.bound_holds && r.rank.is_none());
        let json = serde_json::to_value(check_lower_bound(2, 2, Task::Permutation).unwrap()).unwrap();
        assert_eq!(json["rank"]["expected"], 2);
    }
}
