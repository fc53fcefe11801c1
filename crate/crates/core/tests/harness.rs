//! Metered sessions end to end, and the command-line binary.

use std::process::Command;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use repmatch::costmodel::{cost_report, Task};
use repmatch::harness::{GateOracle, Leg, ProtocolKind, Session, SessionConfig, Transcript};
use repmatch::linalg::random_state;
use repmatch::repmatch::{RoundLimit, TargetSpec};
use repmatch::Error;

fn oracle_for(task: Task, n: usize, d: usize, seed: u64) -> GateOracle {
    GateOracle::new(TargetSpec::random(task, n, d, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap())
}

#[test]
fn one_round_transcripts_cost_exactly_c_rm() {
    for task in [Task::UnitaryArray, Task::Permutation, Task::Conjugation] {
        for n in 1..=10 {
            let session = Session::new(SessionConfig::new(ProtocolKind::Repmatch, task, n, 2)).unwrap();
            let psi = random_state(session.basis().dim(), 1, &mut ChaCha8Rng::seed_from_u64(n as u64));
            let mut oracle = oracle_for(task, n, 2, 7 + n as u64);
            let out = session.execute(&psi, &mut oracle).unwrap();
            let report = cost_report(n, 2, task).unwrap();
            assert!(out.transcript.is_consistent());
            assert_eq!(out.transcript.total_qubits(), report.c_rm, "{task} n={n}");
            let forward: u64 = out.transcript.messages.iter().filter(|m| m.leg == Leg::AToB).map(|m| m.qubits).sum();
            assert_eq!(forward, repmatch::repcore::ceil_log2(&report.d_r));
            // n uses in the first round; conjugation needs (d−1)n, which is n for qubits.
            assert_eq!(oracle.rounds()[0].forward, n as u64, "{task} n={n}");
            assert!(out.fidelity > 1.0 - 1e-9 || !out.success);
        }
    }
}

#[test]
fn repeated_rounds_scale_the_transcript() {
    let mut cfg = SessionConfig::new(ProtocolKind::Repmatch, Task::UnitaryArray, 5, 2);
    cfg.limit = RoundLimit::MaxRounds(20);
    let session = Session::new(cfg).unwrap();
    let c_rm = cost_report(5, 2, Task::UnitaryArray).unwrap().c_rm;
    let psi = random_state(32, 1, &mut ChaCha8Rng::seed_from_u64(1));
    for seed in 0..40 {
        let out = session.execute_seeded(&psi, &mut oracle_for(Task::UnitaryArray, 5, 2, 3), seed).unwrap();
        assert!(out.success);
        assert_eq!(out.transcript.totals.rounds as usize, out.rounds);
        assert_eq!(out.transcript.total_qubits(), c_rm * out.rounds as u64);
        assert!(out.fidelity > 1.0 - 1e-9);
        // Retries fold the pending recovery into the target, so later rounds
        // spend whole multiples of the n uses that round 1 spends.
        assert_eq!((out.queries[0].forward, out.queries[0].inverse), (5, 0));
        for q in &out.queries {
            assert!(q.forward + q.inverse > 0 && (q.forward + q.inverse) % 5 == 0);
        }
        let json = out.transcript.to_json_pretty().unwrap();
        let back: Transcript = serde_json::from_str(&json).unwrap();
        assert_eq!(back, out.transcript);
    }
}

#[test]
fn baseline_transcripts_cost_c_min() {
    for protocol in [ProtocolKind::Teleport, ProtocolKind::StoreRetrieve] {
        for n in 1..=5 {
            let session = Session::new(SessionConfig::new(protocol, Task::UnitaryArray, n, 2)).unwrap();
            let psi = random_state(session.basis().dim(), 1, &mut ChaCha8Rng::seed_from_u64(2));
            let out = session.execute(&psi, &mut oracle_for(Task::UnitaryArray, n, 2, 4)).unwrap();
            assert_eq!(out.transcript.messages.len(), 1);
            assert_eq!(out.transcript.messages[0].leg, Leg::BToA);
            assert_eq!(out.transcript.total_qubits(), cost_report(n, 2, Task::UnitaryArray).unwrap().c_min);
        }
    }
}

#[test]
fn failed_sessions_report_their_transcript() {
    let session = Session::new(SessionConfig::new(ProtocolKind::Repmatch, Task::UnitaryArray, 2, 2)).unwrap();
    let wrong_size = random_state(8, 1, &mut ChaCha8Rng::seed_from_u64(0));
    match session.execute(&wrong_size, &mut oracle_for(Task::UnitaryArray, 2, 2, 0)) {
        Err(Error::Session { transcript, source }) => {
            assert!(transcript.messages.is_empty());
            assert!(matches!(*source, Error::DimensionMismatch { .. }));
        }
        other => panic!("expected a session error, got {other:?}"),
    }
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_repmatch")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn cli_subcommands() {
    let (code, csv) = cli(&["table", "--n", "4", "--d", "2"]);
    assert_eq!(code, 0);
    assert!(csv.starts_with("lambda,d_lambda,m_lambda"));

    let (code, json) = cli(&["costs", "--n", "100", "--d", "2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!((v["c_rm"].as_str(), v["c_min"].as_str()), (Some("19"), Some("18")));

    let (code, fig) = cli(&["figure", "--which", "fig5"]);
    assert_eq!(code, 0);
    assert_eq!(fig.lines().next(), Some("n,delta_c,small_delta_c"));
    assert_eq!(fig.lines().count(), 1 + 30);

    let (code, sim) = cli(&["simulate", "--n", "3", "--trials", "50", "--max-rounds", "3", "--seed", "8"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&sim).unwrap();
    assert_eq!(v["within_3_sigma"], true);

    assert_eq!(cli(&["verify", "--what", "schur", "--n", "4", "--d", "2"]).0, 0);
    assert_eq!(cli(&["verify", "--what", "identities", "--n", "12", "--d", "4"]).0, 0);
    assert_eq!(cli(&["costs", "--n", "3", "--d", "2", "--task", "bogus"]).0, 2);
}

#[test]
fn cli_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig4.csv");
    let transcript = dir.path().join("transcript.json");
    let out_s = out.to_str().unwrap();
    assert_eq!(cli(&["figure", "--which", "fig4", "--range", "1..10", "--out", out_s]).0, 0);
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 11);
    let args = ["simulate", "--n", "4", "--emit", transcript.to_str().unwrap()];
    assert_eq!(cli(&args).0, 0);
    let t: Transcript = serde_json::from_str(&std::fs::read_to_string(&transcript).unwrap()).unwrap();
    assert!(t.is_consistent());
}
