use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{factorial, YoungDiagram};
use crate::error::{Error, Result};

/// Cycle type of a permutation: a partition of `n` (parts sorted descending).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleType {
    parts: Vec<usize>,
}

impl CycleType {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self { parts }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![1; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }
}

/// Number of permutations with cycle type `mu`: `n! / ∏ₖ k^{aₖ} aₖ!`.
pub fn class_size(mu: &CycleType) -> BigUint {
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for &p in mu.parts() {
        *counts.entry(p).or_default() += 1;
    }
    let denom = counts.iter().fold(BigUint::one(), |acc, (&k, &a)| {
        acc * BigUint::from(k).pow(a as u32) * factorial(a)
    });
    factorial(mu.size()) / denom
}

/// Character `χ^λ(μ)` of the symmetric group via the Murnaghan–Nakayama rule.
///
/// Rim hooks are removed on the beta-set (abacus) encoding of `λ`: sliding a
/// bead from position `b` to a free position `b − r` removes a rim hook of
/// length `r`, with sign `(−1)^{beads jumped}`.
pub fn mn_character(lambda: &YoungDiagram, mu: &CycleType) -> Result<BigInt> {
    if lambda.boxes() != mu.size() {
        return Err(Error::BoxCountMismatch {
            expected: lambda.boxes(),
            found: mu.size(),
        });
    }
    let len = lambda.num_rows();
    let beta: Vec<usize> = lambda
        .rows()
        .iter()
        .enumerate()
        .map(|(i, &r)| r + len - 1 - i)
        .collect();
    let mut memo = HashMap::new();
    Ok(mn_recurse(beta, mu.parts(), &mut memo))
}

fn mn_recurse(beta: Vec<usize>, parts: &[usize], memo: &mut HashMap<(Vec<usize>, usize), BigInt>) -> BigInt {
    let Some((&r, rest)) = parts.split_first() else {
        return BigInt::one();
    };
    let key = (beta.clone(), parts.len());
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let mut total = BigInt::zero();
    for (idx, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let target = b - r;
        let jumped = beta.iter().filter(|&&x| x > target && x < b).count();
        let mut next = beta.clone();
        next[idx] = target;
        next.sort_unstable_by(|a, b| b.cmp(a));
        let sub = mn_recurse(next, rest, memo);
        if jumped % 2 == 0 {
            total += sub;
        } else {
            total -= sub;
        }
    }
    memo.insert(key, total.clone());
    total
}
