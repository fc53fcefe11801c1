use std::io::Write;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{
    factorial, su_dimension, su_dimension_u128, superfactorial_u128, sym_dimension_rows,
    for_each_diagram, YoungDiagram,
};
use crate::error::{Error, Result};

/// Which of `d_λ` / `m_λ` plays the role of the representation dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    /// `U_g^{⊗n}`, `g ∈ SU(d)`: the representation register has dimension `d_λ`.
    UnitaryArray,
    /// Permutations of the `n` systems: the representation register has dimension `m_λ`.
    Permutation,
}

impl std::str::FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unitary" | "unitary-array" => Ok(Role::UnitaryArray),
            "permutation" => Ok(Role::Permutation),
            other => Err(Error::InvalidArgument(format!("unknown role `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrrepEntry {
    pub lambda: YoungDiagram,
    pub d_lambda: BigUint,
    pub m_lambda: BigUint,
}

impl IrrepEntry {
    pub fn rep_dim(&self, role: Role) -> &BigUint {
        match role {
            Role::UnitaryArray => &self.d_lambda,
            Role::Permutation => &self.m_lambda,
        }
    }

    pub fn mult_dim(&self, role: Role) -> &BigUint {
        match role {
            Role::UnitaryArray => &self.m_lambda,
            Role::Permutation => &self.d_lambda,
        }
    }
}

/// All irreducible blocks of `(C^d)^{⊗n}` with exact aggregates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrrepTable {
    pub n: usize,
    pub d: usize,
    pub role: Role,
    pub entries: Vec<IrrepEntry>,
    /// Largest representation dimension.
    pub d_r: BigUint,
    /// Sum of representation dimensions.
    pub d_tot: BigUint,
    /// Sum of squared representation dimensions.
    pub d_tot_sq: BigUint,
}

pub fn build_table(n: usize, d: usize, role: Role) -> IrrepTable {
    let n_fact = factorial(n);
    let mut entries = Vec::new();
    for_each_diagram(n, d, |rows| {
        let lambda = YoungDiagram::new(rows.to_vec()).expect("valid partition");
        let d_lambda = su_dimension(&lambda, d).expect("row bound respected");
        let m_lambda = sym_dimension_rows(rows, n, &n_fact);
        entries.push(IrrepEntry {
            lambda,
            d_lambda,
            m_lambda,
        });
    });
    let mut d_r = BigUint::zero();
    let mut d_tot = BigUint::zero();
    let mut d_tot_sq = BigUint::zero();
    for e in &entries {
        let r = e.rep_dim(role);
        if *r > d_r {
            d_r = r.clone();
        }
        d_tot += r;
        d_tot_sq += r * r;
    }
    IrrepTable {
        n,
        d,
        role,
        entries,
        d_r,
        d_tot,
        d_tot_sq,
    }
}

impl IrrepTable {
    pub fn num_irreps(&self) -> usize {
        self.entries.len()
    }

    pub fn index_of(&self, lambda: &YoungDiagram) -> Result<usize> {
        self.entries
            .iter()
            .position(|e| &e.lambda == lambda)
            .ok_or_else(|| Error::UnknownDiagram(lambda.to_string()))
    }

    /// Representation dimensions as machine integers (simulation sizes only).
    pub fn rep_dims(&self) -> Vec<usize> {
        self.entries
            .iter()
            .map(|e| e.rep_dim(self.role).to_usize().expect("dimension fits in usize"))
            .collect()
    }

    pub fn mult_dims(&self) -> Vec<usize> {
        self.entries
            .iter()
            .map(|e| e.mult_dim(self.role).to_usize().expect("dimension fits in usize"))
            .collect()
    }

    pub fn aggregates(&self) -> Aggregates {
        Aggregates {
            count: self.num_irreps(),
            d_r: self.d_r.clone(),
            d_tot: self.d_tot.clone(),
            d_tot_sq: self.d_tot_sq.clone(),
        }
    }

    /// CSV with columns `lambda,d_lambda,m_lambda`; `lambda` is a JSON row array.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["lambda", "d_lambda", "m_lambda"])?;
        for e in &self.entries {
            w.write_record([
                serde_json::to_string(&e.lambda)?,
                e.d_lambda.to_string(),
                e.m_lambda.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Aggregates of an [`IrrepTable`] without materializing its entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Aggregates {
    pub count: usize,
    pub d_r: BigUint,
    pub d_tot: BigUint,
    pub d_tot_sq: BigUint,
}

/// Streams over the diagrams of `(n, d)` and accumulates `|R|`, `d_R`,
/// `d_tot` and `d_tot,sq` for the given role.
pub fn aggregates(n: usize, d: usize, role: Role) -> Aggregates {
    if role == Role::UnitaryArray {
        if let Some(a) = unitary_aggregates_u128(n, d) {
            return a;
        }
    }
    let n_fact = factorial(n);
    let superfact = super::superfactorial(d);
    let mut count = 0usize;
    let mut d_r = BigUint::zero();
    let mut d_tot = BigUint::zero();
    let mut d_tot_sq = BigUint::zero();
    for_each_diagram(n, d, |rows| {
        let r = match role {
            Role::UnitaryArray => super::vandermonde(rows, d) / &superfact,
            Role::Permutation => sym_dimension_rows(rows, n, &n_fact),
        };
        count += 1;
        d_tot_sq += &r * &r;
        d_tot += &r;
        if r > d_r {
            d_r = r;
        }
    });
    Aggregates {
        count,
        d_r,
        d_tot,
        d_tot_sq,
    }
}

fn unitary_aggregates_u128(n: usize, d: usize) -> Option<Aggregates> {
    let superfact = superfactorial_u128(d);
    let mut count = 0usize;
    let mut d_r: u128 = 0;
    let mut d_tot: u128 = 0;
    let mut d_tot_sq: u128 = 0;
    let mut overflow = false;
    for_each_diagram(n, d, |rows| {
        if overflow {
            return;
        }
        let step = || -> Option<(u128, u128, u128)> {
            let r = su_dimension_u128(rows, d, superfact)?;
            Some((r, d_tot.checked_add(r)?, d_tot_sq.checked_add(r.checked_mul(r)?)?))
        };
        match step() {
            Some((r, t, s)) => {
                count += 1;
                d_r = d_r.max(r);
                d_tot = t;
                d_tot_sq = s;
            }
            None => overflow = true,
        }
    });
    (!overflow).then(|| Aggregates {
        count,
        d_r: BigUint::from(d_r),
        d_tot: BigUint::from(d_tot),
        d_tot_sq: BigUint::from(d_tot_sq),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repcore::binomial;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn table_examples() {
        let t = build_table(2, 2, Role::UnitaryArray);
        assert_eq!((t.d_r.clone(), t.d_tot.clone(), t.d_tot_sq.clone()), (big(3), big(4), big(10)));
        assert_eq!(t.d_tot_sq, binomial(5, 2));

        let t = build_table(4, 2, Role::UnitaryArray);
        assert_eq!((t.d_r.clone(), t.d_tot.clone(), t.d_tot_sq.clone()), (big(5), big(9), big(35)));

        let t = build_table(4, 2, Role::Permutation);
        assert_eq!(t.rep_dims(), vec![1, 3, 2]);
        assert_eq!((t.d_r.clone(), t.d_tot.clone(), t.d_tot_sq.clone()), (big(3), big(6), big(14)));
    }

    #[test]
    fn streaming_aggregates_agree_with_table() {
        for role in [Role::UnitaryArray, Role::Permutation] {
            for d in 1..5 {
                for n in 0..12 {
                    assert_eq!(aggregates(n, d, role), build_table(n, d, role).aggregates());
                }
            }
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        build_table(4, 2, Role::UnitaryArray).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "lambda,d_lambda,m_lambda\n[4],5,1\n\"[3,1]\",3,3\n\"[2,2]\",1,2\n"
        );
    }
}
