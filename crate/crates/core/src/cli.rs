//! Command-line front end. Output goes to `--out` or stdout; every command is
//! deterministic for fixed flags and seeds.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::costmodel::{cost_report, decimal, figure_series, verify_bounds, CostReport, Figure, NRange, Task};
use crate::error::{Error, Result};
use crate::harness::{GateOracle, ProtocolKind, Session, SessionConfig};
use crate::linalg::random_state;
use crate::lowerbound::{check_lower_bound, rank_witness};
use crate::perm::Permutation;
use crate::repcore::{build_table, check_identities, Role};
use crate::repmatch::{RoundLimit, TargetSpec};
use crate::schur::{build_schur_basis, verify_basis, BuildOptions, DEFAULT_DIM_CAP, DIM_CAP_ENV};

#[derive(Debug, Parser)]
#[command(name = "repmatch", version, about = "Representation matching: costs, simulations and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Raise or lower the largest `d^n` for which a Schur basis is built.
    #[arg(long, global = true)]
    pub dim_cap: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Irreducible blocks of (C^d)^{⊗n} with exact dimensions.
    Table(TableArgs),
    /// Exact communication costs and success probabilities.
    Costs(CostsArgs),
    /// Data series behind the cost and probability plots.
    Figure(FigureArgs),
    /// Run protocol simulations and summarize them.
    Simulate(SimulateArgs),
    /// Numerical and exact checks; exits nonzero on failure.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    /// `unitary` or `permutation`.
    #[arg(long, default_value = "unitary")]
    pub role: Role,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CostsArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value = "unitary-array")]
    pub task: Task,
    /// `a..b` or `a..b:step`; overrides `--n`.
    #[arg(long)]
    pub range: Option<NRange>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// `fig4`, `fig5` or `fig6`.
    #[arg(long)]
    pub which: Figure,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long)]
    pub range: Option<NRange>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// `repmatch`, `teleport` or `store-retrieve`.
    #[arg(long, default_value = "repmatch")]
    pub protocol: ProtocolKind,
    #[arg(long, default_value = "unitary-array")]
    pub task: Task,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seed for the target gate; defaults to `--seed`.
    #[arg(long)]
    pub g_seed: Option<u64>,
    /// Permutation in 1-based cycle notation, e.g. "(1 2 3)".
    #[arg(long)]
    pub perm: Option<String>,
    /// Target failure probability for repeated rounds.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub max_rounds: Option<usize>,
    /// Write the first trial's transcript here.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyWhat {
    Schur,
    Bounds,
    Rank,
    Identities,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub what: VerifyWhat,
    /// Copy number; the grid maximum for `bounds` and `identities`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Local dimension; the grid maximum for `bounds` and `identities`.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value = "unitary-array")]
    pub task: Task,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Runs a parsed command, writing to `out`. Returns whether all checks passed.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    match &cli.command {
        Command::Table(a) => table(a, out).map(|_| true),
        Command::Costs(a) => costs(a, out).map(|_| true),
        Command::Figure(a) => figure(a, out).map(|_| true),
        Command::Simulate(a) => simulate(a, out).map(|_| true),
        Command::Verify(a) => verify(a, out),
    }
}

/// Entry point for the binary: parses `args`, runs, and maps the result to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(cap) = cli.dim_cap {
        if cap > DEFAULT_DIM_CAP {
            eprintln!("warning: dimension cap {cap} exceeds the default {DEFAULT_DIM_CAP}; dense bases may exhaust memory");
        }
        // Read back by `BuildOptions::from_env` wherever a basis is built.
        std::env::set_var(DIM_CAP_ENV, cap.to_string());
    }
    let result = match &cli.out {
        Some(path) => std::fs::File::create(path)
            .map_err(Error::from)
            .and_then(|f| execute(&cli, &mut std::io::BufWriter::new(f))),
        None => execute(&cli, &mut std::io::stdout().lock()),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn write_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

fn table(a: &TableArgs, out: &mut dyn Write) -> Result<()> {
    let t = build_table(a.n, a.d, a.role);
    match a.format {
        Format::Csv => t.write_csv(out),
        Format::Json => write_json(
            out,
            &json!({
                "n": t.n,
                "d": t.d,
                "role": t.role,
                "entries": t.entries.iter().map(|e| json!({
                    "lambda": e.lambda,
                    "d_lambda": e.d_lambda.to_string(),
                    "m_lambda": e.m_lambda.to_string(),
                })).collect::<Vec<_>>(),
                "count": t.num_irreps(),
                "d_r": t.d_r.to_string(),
                "d_tot": t.d_tot.to_string(),
                "d_tot_sq": t.d_tot_sq.to_string(),
            }),
        ),
    }
}

fn costs(a: &CostsArgs, out: &mut dyn Write) -> Result<()> {
    let ns: Vec<usize> = match a.range {
        Some(r) => r.iter().collect(),
        None => vec![a.n],
    };
    let reports = ns
        .into_iter()
        .map(|n| cost_report(n, a.d, a.task))
        .collect::<Result<Vec<CostReport>>>()?;
    match a.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CostReport::CSV_HEADER)?;
            for r in &reports {
                w.write_record(r.csv_record())?;
            }
            w.flush()?;
            Ok(())
        }
        Format::Json if reports.len() == 1 => write_json(out, &reports[0].to_json()),
        Format::Json => write_json(out, &Value::Array(reports.iter().map(CostReport::to_json).collect())),
    }
}

fn figure(a: &FigureArgs, out: &mut dyn Write) -> Result<()> {
    let mut range = a.range.unwrap_or_else(|| a.which.default_range());
    if let Some(nmax) = a.nmax {
        range.end = nmax;
    }
    let d = a.d.unwrap_or_else(|| a.which.default_d());
    figure_series(a.which, d, range)?.write_csv(out)
}

fn build_target(a: &SimulateArgs) -> Result<TargetSpec> {
    let task = match a.protocol {
        ProtocolKind::Repmatch => a.task,
        _ => Task::UnitaryArray,
    };
    if let Some(cycles) = &a.perm {
        if task != Task::Permutation {
            return Err(Error::InvalidArgument("--perm needs --task permutation".into()));
        }
        return Ok(TargetSpec::permutation(Permutation::from_cycles(cycles, a.n)?, a.d));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.g_seed.unwrap_or(a.seed));
    TargetSpec::random(task, a.n, a.d, &mut rng)
}

fn simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    if a.trials == 0 {
        return Err(Error::InvalidArgument("--trials must be at least 1".into()));
    }
    let target = build_target(a)?;
    let mut config = SessionConfig::new(a.protocol, target.task, a.n, a.d);
    config.seed = a.seed;
    config.limit = match (a.eps, a.max_rounds) {
        (Some(eps), _) => RoundLimit::Epsilon(eps),
        (None, Some(k)) => RoundLimit::MaxRounds(k),
        (None, None) => RoundLimit::MaxRounds(1),
    };
    let session = Session::new(config)?;
    let report = cost_report(a.n, a.d, if a.protocol == ProtocolKind::Repmatch { target.task } else { Task::UnitaryArray })?;

    let mut input_rng = ChaCha8Rng::seed_from_u64(a.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut herald_rng = ChaCha8Rng::seed_from_u64(a.seed.wrapping_add(1));
    let dim = session.basis().dim();
    let (mut successes, mut rounds_total, mut qubits_total) = (0usize, 0usize, 0u64);
    let mut min_fidelity = f64::INFINITY;
    let mut max_rounds_seen = 0usize;
    let mut round_limit = 1usize;
    for trial in 0..a.trials {
        let psi = random_state(dim, 1, &mut input_rng);
        let mut oracle = GateOracle::new(target.clone());
        let outcome = session.execute_seeded(&psi, &mut oracle, a.seed.wrapping_add(trial as u64))?;
        if trial == 0 {
            if let Some(path) = &a.emit {
                std::fs::write(path, outcome.transcript.to_json_pretty()?)?;
            }
        }
        // The baselines materialize only their success branch; the herald is drawn here.
        let success = match a.protocol {
            ProtocolKind::Repmatch => outcome.success,
            _ => herald_rng.random::<f64>() < outcome.probability,
        };
        if success {
            successes += 1;
        }
        min_fidelity = min_fidelity.min(outcome.fidelity);
        rounds_total += outcome.rounds;
        max_rounds_seen = max_rounds_seen.max(outcome.rounds);
        qubits_total += outcome.transcript.total_qubits();
        if let Some(rec) = outcome.transcript.outcomes.last() {
            round_limit = round_limit.max(rec.round);
        }
    }

    let (p_exact, limit) = match a.protocol {
        ProtocolKind::Repmatch => {
            let limit = match session.config().limit {
                RoundLimit::MaxRounds(k) => k,
                RoundLimit::Epsilon(eps) => crate::costmodel::amplify_rounds(&report.p_rm, eps)? as usize,
            };
            (report.p_rm.clone(), limit)
        }
        ProtocolKind::Teleport => (report.p_tele.clone(), 1),
        ProtocolKind::StoreRetrieve => (report.p_rs.clone(), 1),
    };
    let p = p_exact.to_f64().unwrap_or(0.0);
    let expected = 1.0 - (1.0 - p).powi(limit as i32);
    let trials = a.trials as f64;
    let rate = successes as f64 / trials;
    let sigma = (expected * (1.0 - expected) / trials).sqrt();
    write_json(
        out,
        &json!({
            "protocol": a.protocol,
            "task": target.task,
            "n": a.n,
            "d": a.d,
            "trials": a.trials,
            "seed": a.seed,
            "round_limit": limit,
            "success_probability_per_round": p_exact.to_string(),
            "success_probability_per_round_decimal": decimal(&p_exact),
            "expected_success_rate": expected,
            "empirical_success_rate": rate,
            "sigma": sigma,
            "within_3_sigma": (rate - expected).abs() <= 3.0 * sigma + 1e-12,
            "successes": successes,
            "mean_rounds": rounds_total as f64 / trials,
            "max_rounds": max_rounds_seen,
            "mean_qubits": qubits_total as f64 / trials,
            "qubits_per_round": match a.protocol {
                ProtocolKind::Repmatch => report.c_rm,
                _ => report.c_min,
            },
            "min_fidelity": min_fidelity,
        }),
    )
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<bool> {
    let (v, passed) = match a.what {
        VerifyWhat::Schur => {
            let (n, d) = (a.n.unwrap_or(3), a.d.unwrap_or(2));
            let basis = build_schur_basis(n, d, &BuildOptions::from_env())?;
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let r = verify_basis(&basis, a.samples, &mut rng);
            let passed = r.passed(1e-9);
            (json!({ "what": "schur", "report": r, "max_residual": r.max_residual(), "passed": passed }), passed)
        }
        VerifyWhat::Rank => {
            let (n, d) = (a.n.unwrap_or(2), a.d.unwrap_or(2));
            let r = rank_witness(n, d, a.task, a.seed)?;
            let passed = r.passed();
            (
                json!({ "what": "rank", "n": n, "d": d, "task": a.task,
                        "expected": r.expected, "measured": r.measured, "stable": r.stable, "passed": passed }),
                passed,
            )
        }
        VerifyWhat::Bounds => {
            let (nmax, dmax) = (a.n.unwrap_or(30), a.d.unwrap_or(5));
            let mut failures = Vec::new();
            let mut checked = 0;
            for n in 1..=nmax {
                for d in 2..=dmax {
                    let b = verify_bounds(n, d)?;
                    let lb = check_lower_bound(n, d, Task::UnitaryArray)?;
                    checked += 1;
                    if !b.all_hold() || !lb.passed() {
                        failures.push(json!({ "bounds": b, "lower_bound": lb }));
                    }
                }
            }
            let passed = failures.is_empty();
            (json!({ "what": "bounds", "checked": checked, "failures": failures, "passed": passed }), passed)
        }
        VerifyWhat::Identities => {
            let (nmax, dmax) = (a.n.unwrap_or(30), a.d.unwrap_or(5));
            let mut failures = Vec::new();
            let mut checked = 0;
            for n in 1..=nmax {
                for d in 1..=dmax {
                    let c = check_identities(n, d);
                    checked += 1;
                    if !c.holds() {
                        failures.push(serde_json::to_value(c)?);
                    }
                }
            }
            let passed = failures.is_empty();
            (json!({ "what": "identities", "checked": checked, "failures": failures, "passed": passed }), passed)
        }
    };
    write_json(out, &v)?;
    Ok(passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (bool, String) {
        let cli = Cli::try_parse_from(std::iter::once("repmatch").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        let ok = execute(&cli, &mut buf).unwrap();
        (ok, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn table_csv() {
        let (_, s) = run(&["table", "--n", "4", "--d", "2"]);
        assert_eq!(s.lines().count(), 4);
        let (_, s) = run(&["table", "--n", "4", "--d", "2", "--role", "permutation", "--format", "json"]);
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!((v["d_r"].as_str(), v["d_tot"].as_str(), v["d_tot_sq"].as_str()), (Some("3"), Some("6"), Some("14")));
    }

    #[test]
    fn costs_json() {
        let (_, s) = run(&["costs", "--n", "100", "--d", "5"]);
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["small_delta_c"], "2");
        let (_, s) = run(&["costs", "--d", "2", "--range", "1..5", "--format", "csv"]);
        assert_eq!(s.lines().count(), 6);
    }

    #[test]
    fn figure_rows() {
        let (_, s) = run(&["figure", "--which", "fig4", "--d", "2", "--nmax", "100"]);
        assert_eq!(s.lines().count(), 101);
    }

    #[test]
    fn simulate_summaries() {
        let (_, s) = run(&["simulate", "--protocol", "repmatch", "--n", "1", "--trials", "20"]);
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["empirical_success_rate"], 1.0);
        let (_, s) = run(&["simulate", "--protocol", "store-retrieve", "--n", "2", "--d", "2"]);
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["success_probability_per_round"], "1/10");
        let (_, s) = run(&["simulate", "--task", "permutation", "--n", "3", "--perm", "(1 2 3)", "--trials", "4"]);
        let v: Value = serde_json::from_str(&s).unwrap();
        assert!(v["min_fidelity"].as_f64().unwrap() > 1.0 - 1e-9 || v["successes"] == 0);
    }

    #[test]
    fn verify_commands() {
        assert!(run(&["verify", "--what", "schur", "--n", "3", "--d", "2"]).0);
        let (ok, s) = run(&["verify", "--what", "rank", "--n", "2", "--d", "2"]);
        assert!(ok);
        assert!(s.contains("\"measured\": 10"));
        assert!(run(&["verify", "--what", "identities", "--n", "10", "--d", "3"]).0);
        assert!(run(&["verify", "--what", "bounds", "--n", "8", "--d", "3"]).0);
    }
}
