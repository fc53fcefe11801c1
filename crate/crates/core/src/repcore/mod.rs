//! Exact Young-diagram combinatorics.
//!
//! Everything here works on arbitrary-precision integers. Diagrams are kept
//! with trailing zero rows stripped so that equality is equality of the
//! nonzero row sequence; callers supply the row bound `d` where it matters.

mod character;
mod diagram;
mod table;

pub use character::{class_size, mn_character, CycleType};
pub use diagram::{enumerate_diagrams, for_each_diagram, YoungDiagram};
pub use table::{aggregates, build_table, Aggregates, IrrepEntry, IrrepTable, Role};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// `⌈log₂ x⌉` for `x ≥ 1`, computed as the bit length of `x − 1`.
pub fn ceil_log2(x: &BigUint) -> u64 {
    assert!(!x.is_zero(), "ceil_log2 of zero");
    (x - 1u32).bits()
}

/// Exact outcome of the two dimension-counting identities for `(n, d)`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct IdentityCheck {
    pub n: usize,
    pub d: usize,
    /// `Σ d_λ² = C(n + d² − 1, n)`.
    pub sum_sq_holds: bool,
    /// `Σ d_λ m_λ = d^n`.
    pub sum_product_holds: bool,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.sum_sq_holds && self.sum_product_holds
    }
}

pub fn check_identities(n: usize, d: usize) -> IdentityCheck {
    let table = build_table(n, d, Role::UnitaryArray);
    let product: BigUint = table.entries.iter().map(|e| &e.d_lambda * &e.m_lambda).sum();
    IdentityCheck {
        n,
        d,
        sum_sq_holds: table.d_tot_sq == binomial(n + d * d - 1, n),
        sum_product_holds: product == BigUint::from(d).pow(n as u32),
    }
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Product of the shifted row differences `∏_{i<j} (λᵢ − λⱼ − i + j)` over `d` rows.
fn vandermonde(rows: &[usize], d: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..d {
        for j in i + 1..d {
            acc *= (rows[i] + j - rows[j] - i) as u64;
        }
    }
    acc
}

fn vandermonde_u128(rows: &[usize], d: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 0..d {
        for j in i + 1..d {
            acc = acc.checked_mul((rows[i] + j - rows[j] - i) as u128)?;
        }
    }
    Some(acc)
}

fn superfactorial(d: usize) -> BigUint {
    (1..d).fold(BigUint::one(), |acc, k| acc * factorial(k))
}

fn padded(lambda: &YoungDiagram, d: usize) -> Result<Vec<usize>> {
    if lambda.num_rows() > d {
        return Err(Error::TooManyRows {
            rows: lambda.num_rows(),
            d,
        });
    }
    Ok(lambda.rows_padded(d))
}

/// Dimension `d_λ` of the SU(d) irrep labelled by `λ` (Weyl dimension formula).
pub fn su_dimension(lambda: &YoungDiagram, d: usize) -> Result<BigUint> {
    let rows = padded(lambda, d)?;
    Ok(vandermonde(&rows, d) / superfactorial(d))
}

/// Fast path of [`su_dimension`] for callers that sweep large grids.
pub(crate) fn su_dimension_u128(rows: &[usize], d: usize, superfact: u128) -> Option<u128> {
    vandermonde_u128(rows, d).map(|v| v / superfact)
}

pub(crate) fn superfactorial_u128(d: usize) -> u128 {
    (1..d)
        .map(|k| (1..=k as u128).product::<u128>())
        .product()
}

/// Dimension `m_λ` of the S(n) irrep labelled by `λ`.
///
/// Uses `n! ∏_{j<k}(λⱼ − λₖ − j + k) / ∏ᵢ (λᵢ + d − i)!`, which equals the
/// number of standard Young tableaux of shape `λ` for any `d ≥ rows(λ)`.
pub fn sym_dimension(lambda: &YoungDiagram, n: usize, d: usize) -> Result<BigUint> {
    if lambda.boxes() != n {
        return Err(Error::BoxCountMismatch {
            expected: n,
            found: lambda.boxes(),
        });
    }
    let rows = padded(lambda, d)?;
    Ok(sym_dimension_rows(&rows, n, &factorial(n)))
}

pub(crate) fn sym_dimension_rows(rows: &[usize], n: usize, n_factorial: &BigUint) -> BigUint {
    let d = rows.len();
    debug_assert_eq!(rows.iter().sum::<usize>(), n);
    let numerator = n_factorial * vandermonde(rows, d);
    let denominator = rows
        .iter()
        .enumerate()
        .fold(BigUint::one(), |acc, (i, &r)| acc * factorial(r + d - 1 - i));
    numerator / denominator
}

/// Associated diagram `λ̄` (column heights `k ↦ d − k`), optionally padded with
/// full columns of height `d` until it has `pad_to` boxes.
pub fn associated_diagram(
    lambda: &YoungDiagram,
    d: usize,
    pad_to: Option<usize>,
) -> Result<YoungDiagram> {
    let rows = padded(lambda, d)?;
    let first = rows.first().copied().unwrap_or(0);
    let mut out: Vec<usize> = (0..d).map(|i| first - rows[d - 1 - i]).collect();
    if let Some(target) = pad_to {
        let boxes: usize = out.iter().sum();
        if target < boxes || !(target - boxes).is_multiple_of(d) {
            return Err(Error::PaddingInfeasible {
                boxes,
                target,
                d,
            });
        }
        let extra = (target - boxes) / d;
        out.iter_mut().for_each(|r| *r += extra);
    }
    YoungDiagram::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn yd(rows: &[usize]) -> YoungDiagram {
        YoungDiagram::new(rows.to_vec()).unwrap()
    }

    #[test]
    fn counting_identities_small() {
        for n in 1..=8 {
            for d in 1..=4 {
                assert!(check_identities(n, d).holds(), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn ceil_log2_matches_definition() {
        let cases = [(1u32, 0u64), (2, 1), (3, 2), (4, 2), (5, 3), (9, 4), (35, 6), (2601, 12)];
        for (x, want) in cases {
            assert_eq!(ceil_log2(&BigUint::from(x)), want, "x = {x}");
        }
    }

    #[test]
    fn su_dimension_examples() {
        assert_eq!(su_dimension(&yd(&[1]), 2).unwrap(), BigUint::from(2u32));
        assert_eq!(su_dimension(&yd(&[2]), 2).unwrap(), BigUint::from(3u32));
        assert_eq!(su_dimension(&yd(&[1, 1]), 3).unwrap(), BigUint::from(3u32));
        assert_eq!(su_dimension(&yd(&[2, 1]), 3).unwrap(), BigUint::from(8u32));
        assert!(matches!(
            su_dimension(&yd(&[1, 1, 1]), 2),
            Err(Error::TooManyRows { rows: 3, d: 2 })
        ));
    }

    #[test]
    fn sym_dimension_examples() {
        for n in 0..8 {
            assert_eq!(sym_dimension(&yd(&[n]), n, 3).unwrap(), BigUint::one());
        }
        assert_eq!(sym_dimension(&yd(&[2, 1]), 3, 2).unwrap(), BigUint::from(2u32));
        assert_eq!(sym_dimension(&yd(&[2, 2]), 4, 2).unwrap(), BigUint::from(2u32));
        assert!(matches!(
            sym_dimension(&yd(&[2, 1]), 4, 2),
            Err(Error::BoxCountMismatch { .. })
        ));
    }

    #[test]
    fn literal_denominator_without_factorials_is_wrong() {
        // n = 3, λ = (2,1), d = 2: without factorials the quotient is 3!·2/(3·1) = 4, not 2.
        let rows = [2usize, 1];
        let literal = 6 * 2 / ((rows[0] + 1) * rows[1]);
        assert_eq!(literal, 4);
        assert_eq!(sym_dimension(&yd(&rows), 3, 2).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn associated_diagram_examples() {
        assert_eq!(associated_diagram(&yd(&[1, 1]), 2, None).unwrap(), yd(&[]));
        assert_eq!(associated_diagram(&yd(&[1]), 3, None).unwrap(), yd(&[1, 1]));
        for d in 2..6 {
            for n in 1..6 {
                let bar = associated_diagram(&yd(&[n]), d, None).unwrap();
                assert_eq!(bar.rows(), vec![n; d - 1].as_slice());
                assert_eq!(bar.boxes(), (d - 1) * n);
            }
        }
        // (1,1) for d = 2 padded back to two boxes is itself.
        assert_eq!(associated_diagram(&yd(&[1, 1]), 2, Some(2)).unwrap(), yd(&[1, 1]));
        assert!(matches!(
            associated_diagram(&yd(&[1]), 2, Some(2)),
            Err(Error::PaddingInfeasible { .. })
        ));
    }

    #[test]
    fn associated_diagram_preserves_su_dimension() {
        for d in 2..5 {
            for n in 1..7 {
                for lambda in enumerate_diagrams(n, d) {
                    let bar = associated_diagram(&lambda, d, Some((d - 1) * n)).unwrap();
                    assert_eq!(su_dimension(&lambda, d).unwrap(), su_dimension(&bar, d).unwrap());
                }
            }
        }
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(7, 4), BigUint::from(35u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
    }
}
