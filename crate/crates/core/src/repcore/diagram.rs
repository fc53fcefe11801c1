use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition `λ₁ ≥ λ₂ ≥ …`, stored without trailing zero rows.
///
/// Serializes as a JSON array of row lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct YoungDiagram {
    rows: Vec<usize>,
}

impl YoungDiagram {
    /// Builds a diagram from row lengths; trailing zeros are allowed and dropped.
    pub fn new(mut rows: Vec<usize>) -> Result<Self> {
        while rows.last() == Some(&0) {
            rows.pop();
        }
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::NotAPartition(rows));
        }
        Ok(Self { rows })
    }

    pub fn empty() -> Self {
        Self { rows: Vec::new() }
    }

    /// Nonzero rows.
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn rows_padded(&self, d: usize) -> Vec<usize> {
        let mut out = self.rows.clone();
        out.resize(d.max(out.len()), 0);
        out
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn boxes(&self) -> usize {
        self.rows.iter().sum()
    }

    /// Column heights (the conjugate partition).
    pub fn columns(&self) -> Vec<usize> {
        let width = self.rows.first().copied().unwrap_or(0);
        (0..width)
            .map(|c| self.rows.iter().take_while(|&&r| r > c).count())
            .collect()
    }
}

impl TryFrom<Vec<usize>> for YoungDiagram {
    type Error = Error;

    fn try_from(rows: Vec<usize>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<YoungDiagram> for Vec<usize> {
    fn from(value: YoungDiagram) -> Self {
        value.rows
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// Visits every partition of `n` into at most `d` parts in descending
/// lexicographic order. The slice passed to `visit` always has length `d`.
pub fn for_each_diagram<F: FnMut(&[usize])>(n: usize, d: usize, mut visit: F) {
    assert!(d >= 1, "row bound must be positive");
    let mut rows = vec![0usize; d];
    fill(&mut rows, 0, n, n, &mut visit);
}

fn fill<F: FnMut(&[usize])>(rows: &mut [usize], i: usize, remaining: usize, cap: usize, visit: &mut F) {
    let d = rows.len();
    if i == d - 1 {
        if remaining <= cap {
            rows[i] = remaining;
            visit(rows);
        }
        return;
    }
    if remaining == 0 {
        rows[i..].iter_mut().for_each(|r| *r = 0);
        visit(rows);
        return;
    }
    let slots = d - i;
    let lowest = remaining.div_ceil(slots);
    let highest = remaining.min(cap);
    for v in (lowest..=highest).rev() {
        rows[i] = v;
        fill(rows, i + 1, remaining - v, v, visit);
    }
}

/// All partitions of `n` into at most `d` parts, in canonical (descending
/// lexicographic) order.
pub fn enumerate_diagrams(n: usize, d: usize) -> Vec<YoungDiagram> {
    let mut out = Vec::new();
    for_each_diagram(n, d, |rows| {
        out.push(YoungDiagram::new(rows.to_vec()).expect("generated rows are a partition"));
    });
    out
}
