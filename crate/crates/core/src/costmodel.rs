//! Exact communication costs, success probabilities and bounds.
//!
//! All quantities are exact: integers are `BigUint`, probabilities are
//! `BigRational`. Decimal renderings appear only in output formats.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::repcore::{aggregates, binomial, ceil_log2, Aggregates, Role};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    UnitaryArray,
    Permutation,
    Conjugation,
    StorageRetrieval,
}

impl Task {
    /// Table role whose representation dimension enters the costs.
    pub fn role(self) -> Role {
        match self {
            Task::Permutation => Role::Permutation,
            _ => Role::UnitaryArray,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::UnitaryArray => "unitary-array",
            Task::Permutation => "permutation",
            Task::Conjugation => "conjugation",
            Task::StorageRetrieval => "storage-retrieval",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unitary-array" | "unitary" => Ok(Task::UnitaryArray),
            "permutation" => Ok(Task::Permutation),
            "conjugation" => Ok(Task::Conjugation),
            "storage-retrieval" | "store-retrieve" => Ok(Task::StorageRetrieval),
            other => Err(Error::InvalidArgument(format!("unknown task `{other}`"))),
        }
    }
}

fn recip(x: &BigUint) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(x.clone()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostReport {
    pub n: usize,
    pub d: usize,
    pub task: Task,
    /// `|R|`, the number of irreducible blocks.
    pub num_irreps: usize,
    pub d_r: BigUint,
    pub d_tot: BigUint,
    pub d_tot_sq: BigUint,
    /// Qubits for compressed teleportation of the whole array.
    pub c_max: u64,
    /// Qubits for representation matching.
    pub c_rm: u64,
    /// Lower bound on the qubits of any protocol.
    pub c_min: u64,
    pub delta_c: i64,
    pub small_delta_c: i64,
    /// Per-copy teleportation: `n⌈log₂ d²⌉`.
    pub c_naive: BigUint,
    pub p_rm: BigRational,
    pub p_tele: BigRational,
    pub p_naive: BigRational,
    pub p_rs: BigRational,
    /// Memory qubits for storage and retrieval.
    pub c_rs: u64,
}

pub fn cost_report(n: usize, d: usize, task: Task) -> Result<CostReport> {
    if d < 2 {
        return Err(Error::InvalidArgument("local dimension must be at least 2".into()));
    }
    let agg = aggregates(n, d, task.role());
    Ok(report_from_aggregates(n, d, task, &agg))
}

pub fn report_from_aggregates(n: usize, d: usize, task: Task, agg: &Aggregates) -> CostReport {
    let log_dr = ceil_log2(&agg.d_r);
    let log_dtot = ceil_log2(&agg.d_tot);
    let c_rm = log_dr + log_dtot;
    let c_max = 2 * log_dtot;
    let c_min = ceil_log2(&agg.d_tot_sq);
    let local = ceil_log2(&BigUint::from(d * d));
    let d_sq_n = BigUint::from(d).pow(2 * n as u32);
    CostReport {
        n,
        d,
        task,
        num_irreps: agg.count,
        d_r: agg.d_r.clone(),
        d_tot: agg.d_tot.clone(),
        d_tot_sq: agg.d_tot_sq.clone(),
        c_max,
        c_rm,
        c_min,
        delta_c: c_max as i64 - c_rm as i64,
        small_delta_c: c_rm as i64 - c_min as i64,
        c_naive: BigUint::from(n) * local,
        p_rm: recip(&BigUint::from(agg.count)),
        p_tele: recip(&(&agg.d_tot * &agg.d_tot)),
        p_naive: recip(&d_sq_n),
        p_rs: recip(&agg.d_tot_sq),
        c_rs: c_min,
    }
}

impl CostReport {
    /// `c_rm·|R| ≥ c_max`: averaged over the possible outcomes, matching never beats
    /// teleportation of the full array.
    pub fn average_cost_holds(&self) -> bool {
        self.c_rm as u128 * self.num_irreps as u128 >= self.c_max as u128
    }

    /// JSON object with every exact value rendered as a string.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "d": self.d,
            "task": self.task.name(),
            "num_irreps": self.num_irreps.to_string(),
            "d_r": self.d_r.to_string(),
            "d_tot": self.d_tot.to_string(),
            "d_tot_sq": self.d_tot_sq.to_string(),
            "c_max": self.c_max.to_string(),
            "c_rm": self.c_rm.to_string(),
            "c_min": self.c_min.to_string(),
            "delta_c": self.delta_c.to_string(),
            "small_delta_c": self.small_delta_c.to_string(),
            "c_naive": self.c_naive.to_string(),
            "c_rs": self.c_rs.to_string(),
            "p_rm": self.p_rm.to_string(),
            "p_rm_decimal": decimal(&self.p_rm),
            "p_tele": self.p_tele.to_string(),
            "p_tele_decimal": decimal(&self.p_tele),
            "p_naive": self.p_naive.to_string(),
            "p_naive_decimal": decimal(&self.p_naive),
            "p_rs": self.p_rs.to_string(),
            "p_rs_decimal": decimal(&self.p_rs),
        })
    }

    pub const CSV_HEADER: [&'static str; 17] = [
        "n", "d", "task", "num_irreps", "d_r", "d_tot", "d_tot_sq", "c_max", "c_rm", "c_min", "delta_c",
        "small_delta_c", "c_naive", "c_rs", "p_rm", "p_tele", "p_rs",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.d.to_string(),
            self.task.name().to_string(),
            self.num_irreps.to_string(),
            self.d_r.to_string(),
            self.d_tot.to_string(),
            self.d_tot_sq.to_string(),
            self.c_max.to_string(),
            self.c_rm.to_string(),
            self.c_min.to_string(),
            self.delta_c.to_string(),
            self.small_delta_c.to_string(),
            self.c_naive.to_string(),
            self.c_rs.to_string(),
            self.p_rm.to_string(),
            self.p_tele.to_string(),
            self.p_rs.to_string(),
        ]
    }
}

/// Scientific rendering with 12 significant digits, computed exactly.
pub fn decimal(r: &BigRational) -> String {
    const DIGITS: i64 = 12;
    if r.is_zero() {
        return "0".into();
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let num = r.numer().abs();
    let den = r.denom().abs();
    let ten = BigInt::from(10);
    let mut exp = num.to_string().len() as i64 - den.to_string().len() as i64;
    let scaled = |e: i64| -> BigInt {
        let shift = DIGITS - 1 - e;
        let (a, b) = if shift >= 0 {
            (&num * Pow::pow(&ten, shift as u64), den.clone())
        } else {
            (num.clone(), &den * Pow::pow(&ten, (-shift) as u64))
        };
        // round half up
        (a * 2 + &b) / (b * 2)
    };
    let lower = Pow::pow(&ten, (DIGITS - 1) as u64);
    let upper = Pow::pow(&ten, DIGITS as u64);
    let mut m = scaled(exp);
    while m >= upper {
        exp += 1;
        m = scaled(exp);
    }
    while m < lower {
        exp -= 1;
        m = scaled(exp);
    }
    // rounding may carry into a new digit
    if m >= upper {
        exp += 1;
        m = scaled(exp);
    }
    let digits = m.to_string();
    format!("{sign}{}.{}e{exp}", &digits[..1], &digits[1..])
}

/// Smallest `k ≥ 1` with `(1 − p)^k ≤ ε`.
pub fn amplify_rounds(p: &BigRational, eps: f64) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidProbability(format!("epsilon {eps} outside (0, 1)")));
    }
    if !(p.is_positive() && *p <= BigRational::one()) {
        return Err(Error::InvalidProbability(format!("success probability {p} outside (0, 1]")));
    }
    if p.is_one() {
        return Ok(1);
    }
    let q = BigRational::one() - p;
    let pf = p.to_f64().unwrap_or(0.0);
    let estimate = (eps.ln() / (-pf).ln_1p()).ceil().max(1.0);
    if !estimate.is_finite() || estimate > 1e5 {
        return Ok(estimate as u64);
    }
    let eps_exact = BigRational::from_float(eps).expect("finite epsilon");
    let fails = |k: u64| Pow::pow(&q, k as u32) > eps_exact;
    let mut k = estimate as u64;
    while fails(k) {
        k += 1;
    }
    while k > 1 && !fails(k - 1) {
        k -= 1;
    }
    Ok(k)
}

/// Exact checks of the counting bounds for `(n, d)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub d: usize,
    /// `|R| ≤ (n+1)^{d−1}`.
    pub num_irreps: bool,
    /// `d_R ≤ (n+1)^{d(d−1)/2}`.
    pub max_dimension: bool,
    /// `d_tot ≤ d_R·|R| ≤ (n+1)^{(d+2)(d−1)/2}`.
    pub total_dimension: bool,
    /// `c_rm ≤ (d²−1)·log₂(n+1) + 2`.
    pub matching_cost: bool,
}

impl BoundReport {
    pub fn all_hold(&self) -> bool {
        self.num_irreps && self.max_dimension && self.total_dimension && self.matching_cost
    }
}

pub fn verify_bounds(n: usize, d: usize) -> Result<BoundReport> {
    let report = cost_report(n, d, Task::UnitaryArray)?;
    let base = BigUint::from(n + 1);
    let pow = |e: usize| Pow::pow(&base, e as u32);
    let count = BigUint::from(report.num_irreps);
    let c_rm = report.c_rm as usize;
    let matching_cost = c_rm < 2 || BigUint::one() << (c_rm - 2) <= pow(d * d - 1);
    Ok(BoundReport {
        n,
        d,
        num_irreps: count <= pow(d - 1),
        max_dimension: report.d_r <= pow(d * (d - 1) / 2),
        total_dimension: report.d_tot <= &report.d_r * &count && &report.d_r * &count <= pow((d + 2) * (d - 1) / 2),
        matching_cost,
    })
}

/// Named plot series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    /// Qubit costs `c_rm`, `c_min`, `c_max` of unitary arrays.
    Fig4,
    /// Savings `Δc` and overhead `δc` for permutation gates, qudits of dimension 4 by default.
    Fig5,
    /// Success probabilities of matching and gate teleportation.
    Fig6,
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig4" => Ok(Figure::Fig4),
            "fig5" => Ok(Figure::Fig5),
            "fig6" => Ok(Figure::Fig6),
            other => Err(Error::InvalidArgument(format!("unknown figure `{other}`"))),
        }
    }
}

impl Figure {
    pub fn default_d(self) -> usize {
        match self {
            Figure::Fig5 => 4,
            _ => 2,
        }
    }

    pub fn default_range(self) -> NRange {
        match self {
            Figure::Fig5 => NRange { start: 2, end: 60, step: 2 },
            _ => NRange { start: 1, end: 100, step: 1 },
        }
    }

    fn header(self) -> Vec<&'static str> {
        match self {
            Figure::Fig4 => vec!["n", "c_rm", "c_min", "c_max"],
            Figure::Fig5 => vec!["n", "delta_c", "small_delta_c"],
            Figure::Fig6 => vec!["n", "p_rm", "p_rm_decimal", "p_tele", "p_tele_decimal"],
        }
    }

    fn task(self) -> Task {
        match self {
            Figure::Fig5 => Task::Permutation,
            _ => Task::UnitaryArray,
        }
    }
}

/// Inclusive range of copy numbers with a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NRange {
    pub start: usize,
    pub end: usize,
    pub step: usize,
}

impl NRange {
    pub fn iter(&self) -> impl Iterator<Item = usize> {
        (self.start..=self.end).step_by(self.step.max(1))
    }
}

impl FromStr for NRange {
    type Err = Error;

    /// `a..b`, `a..b:step`, or a single value.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad range `{s}` (expected a..b or a..b:step)"));
        let (body, step) = match s.split_once(':') {
            Some((b, st)) => (b, st.trim().parse().map_err(|_| bad())?),
            None => (s, 1),
        };
        let (start, end) = match body.split_once("..") {
            Some((a, b)) => (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().trim_start_matches('=').parse().map_err(|_| bad())?,
            ),
            None => {
                let v = body.trim().parse().map_err(|_| bad())?;
                (v, v)
            }
        };
        if start > end || step == 0 {
            return Err(bad());
        }
        Ok(NRange { start, end, step })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigureTable {
    pub figure: Figure,
    pub d: usize,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub reports: Vec<CostReport>,
}

impl FigureTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn figure_series(figure: Figure, d: usize, range: NRange) -> Result<FigureTable> {
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for n in range.iter() {
        let r = cost_report(n, d, figure.task())?;
        rows.push(match figure {
            Figure::Fig4 => vec![n.to_string(), r.c_rm.to_string(), r.c_min.to_string(), r.c_max.to_string()],
            Figure::Fig5 => vec![n.to_string(), r.delta_c.to_string(), r.small_delta_c.to_string()],
            Figure::Fig6 => vec![
                n.to_string(),
                r.p_rm.to_string(),
                decimal(&r.p_rm),
                r.p_tele.to_string(),
                decimal(&r.p_tele),
            ],
        });
        reports.push(r);
    }
    Ok(FigureTable {
        figure,
        d,
        header: figure.header().into_iter().map(String::from).collect(),
        rows,
        reports,
    })
}

/// Compares the direct sum `Σ m_λ` (d = 2) with the closed form
/// `((n+2)/(n+1))·C(n+1, n/2)` and its half.
#[derive(Clone, Debug, PartialEq)]
pub struct PermutationTotalDiagnostic {
    pub n: usize,
    pub direct: BigUint,
    pub closed_form: BigRational,
    pub halved: BigRational,
}

impl PermutationTotalDiagnostic {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "direct": self.direct.to_string(),
            "closed_form": self.closed_form.to_string(),
            "halved": self.halved.to_string(),
            "closed_form_matches": self.closed_form == BigRational::from(BigInt::from(self.direct.clone())),
            "halved_matches": self.halved == BigRational::from(BigInt::from(self.direct.clone())),
        })
    }
}

pub fn permutation_total_diagnostic(n: usize) -> Result<PermutationTotalDiagnostic> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument("closed form defined for even n ≥ 2".into()));
    }
    let direct = aggregates(n, 2, Role::Permutation).d_tot;
    let closed_form = BigRational::new(BigInt::from(n + 2), BigInt::from(n + 1))
        * BigRational::from(BigInt::from(binomial(n + 1, n / 2)));
    let halved = &closed_form / BigRational::from(BigInt::from(2));
    Ok(PermutationTotalDiagnostic {
        n,
        direct,
        closed_form,
        halved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn reference_reports() {
        let r = cost_report(100, 2, Task::UnitaryArray).unwrap();
        assert_eq!((r.d_r.clone(), r.d_tot.clone(), r.d_tot_sq.clone()), (101u32.into(), 2601u32.into(), 176851u32.into()));
        assert_eq!((r.c_rm, r.c_min, r.c_max, r.small_delta_c), (19, 18, 24, 1));
        assert_eq!(cost_report(100, 5, Task::UnitaryArray).unwrap().small_delta_c, 2);

        let r = cost_report(1, 2, Task::UnitaryArray).unwrap();
        assert_eq!((r.num_irreps, r.delta_c, r.c_rm, r.c_max), (1, 0, 2, 2));
        assert_eq!(r.p_rm, rat(1, 1));

        let r = cost_report(4, 2, Task::UnitaryArray).unwrap();
        assert_eq!((r.c_max, r.c_rm, r.c_min, r.delta_c, r.small_delta_c), (8, 7, 6, 1, 1));
        assert_eq!((r.p_rm.clone(), r.p_tele.clone()), (rat(1, 3), rat(1, 81)));
        assert_eq!(r.c_naive, 8u32.into());
        assert_eq!(r.p_naive, rat(1, 256));
    }

    #[test]
    fn storage_fields() {
        let r = cost_report(1, 2, Task::StorageRetrieval).unwrap();
        assert_eq!((r.c_rs, r.p_rs.clone()), (2, rat(1, 4)));
        let r = cost_report(2, 2, Task::StorageRetrieval).unwrap();
        assert_eq!((r.c_rs, r.p_rs.clone()), (4, rat(1, 10)));
    }

    #[test]
    fn permutation_role() {
        let r = cost_report(4, 2, Task::Permutation).unwrap();
        assert_eq!((r.d_r.clone(), r.d_tot.clone(), r.d_tot_sq.clone()), (3u32.into(), 6u32.into(), 14u32.into()));
    }

    #[test]
    fn amplification_examples() {
        assert_eq!(amplify_rounds(&rat(1, 2), 0.01).unwrap(), 7);
        assert_eq!(amplify_rounds(&rat(1, 1), 0.3).unwrap(), 1);
        assert_eq!(amplify_rounds(&rat(1, 3), 0.05).unwrap(), 8);
        assert_eq!(amplify_rounds(&rat(1, 2), 0.5).unwrap(), 1);
        assert_eq!(amplify_rounds(&rat(1, 2), 0.25).unwrap(), 2);
        assert!(amplify_rounds(&rat(1, 2), 0.0).is_err());
        assert!(amplify_rounds(&rat(1, 2), 1.0).is_err());
        assert!(amplify_rounds(&rat(0, 1), 0.5).is_err());
    }

    #[test]
    fn bounds_examples() {
        assert!(verify_bounds(4, 2).unwrap().all_hold());
        assert!(verify_bounds(1, 2).unwrap().all_hold());
        assert!(verify_bounds(10, 3).unwrap().all_hold());
    }

    #[test]
    fn figure_rows() {
        let t = figure_series(Figure::Fig4, 2, NRange { start: 100, end: 100, step: 1 }).unwrap();
        assert_eq!(t.rows[0], vec!["100", "19", "18", "24"]);
        let t = figure_series(Figure::Fig6, 2, NRange { start: 2, end: 2, step: 1 }).unwrap();
        assert_eq!(t.rows[0][1], "1/2");
        assert_eq!(t.rows[0][3], "1/16");
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("n,p_rm,p_rm_decimal,p_tele,p_tele_decimal\n2,1/2,5.00000000000e-1,1/16,6.25000000000e-2\n"));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal(&rat(1, 3)), "3.33333333333e-1");
        assert_eq!(decimal(&rat(2, 3)), "6.66666666667e-1");
        assert_eq!(decimal(&rat(1, 1)), "1.00000000000e0");
        assert_eq!(decimal(&rat(-5, 4)), "-1.25000000000e0");
        assert_eq!(decimal(&rat(9_999_999_999_999, 10_000_000_000_000)), "1.00000000000e0");
        assert_eq!(decimal(&rat(0, 1)), "0");
        let tiny = BigRational::new(BigInt::one(), BigInt::from(4u8).pow(1000u32));
        assert!(decimal(&tiny).ends_with("e-603"));
    }

    #[test]
    fn range_parsing() {
        assert_eq!("2..60:2".parse::<NRange>().unwrap(), NRange { start: 2, end: 60, step: 2 });
        assert_eq!("5".parse::<NRange>().unwrap(), NRange { start: 5, end: 5, step: 1 });
        assert!("9..3".parse::<NRange>().is_err());
        assert_eq!(NRange { start: 2, end: 7, step: 2 }.iter().collect::<Vec<_>>(), vec![2, 4, 6]);
    }

    #[test]
    fn closed_form_diagnostic() {
        let diag = permutation_total_diagnostic(2).unwrap();
        assert_eq!(diag.direct, 2u32.into());
        assert_eq!(diag.closed_form, rat(4, 1));
        let diag = permutation_total_diagnostic(4).unwrap();
        assert_eq!((diag.direct.clone(), diag.closed_form.clone()), (6u32.into(), rat(12, 1)));
        for n in (2..40).step_by(2) {
            let diag = permutation_total_diagnostic(n).unwrap();
            assert_eq!(diag.halved, BigRational::from(BigInt::from(diag.direct)));
        }
    }

    #[test]
    fn json_keeps_big_values_as_strings() {
        let j = cost_report(300, 5, Task::UnitaryArray).unwrap().to_json();
        assert!(j["d_tot_sq"].is_string());
        assert!(j["p_rm"].as_str().unwrap().starts_with("1/"));
    }
}
