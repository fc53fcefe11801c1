use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{GateOracle, RoundQueries, Transcript};
use crate::baselines::{run_gate_teleport_with, run_store_retrieve_with};
use crate::costmodel::Task;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::repmatch::{run_until_success_with, RepMatchSetup, RoundLimit};
use crate::schur::{build_schur_basis, BuildOptions, SchurBasis};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    Repmatch,
    Teleport,
    StoreRetrieve,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Repmatch => "repmatch",
            ProtocolKind::Teleport => "teleport",
            ProtocolKind::StoreRetrieve => "store-retrieve",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "repmatch" => Ok(Self::Repmatch),
            "teleport" => Ok(Self::Teleport),
            "store-retrieve" | "storage-retrieval" => Ok(Self::StoreRetrieve),
            other => Err(Error::InvalidArgument(format!("unknown protocol `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SessionConfig {
    pub protocol: ProtocolKind,
    pub task: Task,
    pub n: usize,
    pub d: usize,
    /// Round limit for representation matching; the baselines run once.
    pub limit: RoundLimit,
    pub seed: u64,
    pub build: BuildOptions,
}

impl SessionConfig {
    pub fn new(protocol: ProtocolKind, task: Task, n: usize, d: usize) -> Self {
        Self {
            protocol,
            task,
            n,
            d,
            limit: RoundLimit::MaxRounds(1),
            seed: 0,
            build: BuildOptions::from_env(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SessionOutcome {
    pub success: bool,
    pub rounds: usize,
    /// Success probability of one round.
    pub probability: f64,
    pub fidelity: f64,
    pub transcript: Transcript,
    pub queries: Vec<RoundQueries>,
}

/// Prepared stations for repeated sessions with the same `(protocol, task, n, d)`.
#[derive(Clone, Debug)]
pub struct Session {
    config: SessionConfig,
    basis: SchurBasis,
    setup: Option<RepMatchSetup>,
}

impl Session {
    pub fn new(config: SessionConfig) -> Result<Self> {
        if config.protocol != ProtocolKind::Repmatch && config.task != Task::UnitaryArray {
            return Err(Error::InvalidArgument(format!(
                "{} compresses unitary arrays only, not {}",
                config.protocol, config.task
            )));
        }
        let (basis, setup) = match config.protocol {
            ProtocolKind::Repmatch => {
                let setup = RepMatchSetup::new(config.n, config.d, config.task, &config.build)?;
                (setup.basis().clone(), Some(setup))
            }
            _ => (build_schur_basis(config.n, config.d, &config.build)?, None),
        };
        Ok(Self { config, basis, setup })
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn basis(&self) -> &SchurBasis {
        &self.basis
    }

    pub fn execute(&self, psi: &CMatrix, oracle: &mut GateOracle) -> Result<SessionOutcome> {
        self.execute_seeded(psi, oracle, self.config.seed)
    }

    pub fn execute_seeded(&self, psi: &CMatrix, oracle: &mut GateOracle, seed: u64) -> Result<SessionOutcome> {
        let attach = |e: Error| Error::Session {
            transcript: Box::new(Transcript::new(self.config.protocol.name(), "failed")),
            source: Box::new(e),
        };
        match self.config.protocol {
            ProtocolKind::Repmatch => {
                let setup = self.setup.as_ref().expect("built for repmatch");
                let run = run_until_success_with(psi, oracle, setup, self.config.limit, seed).map_err(attach)?;
                Ok(SessionOutcome {
                    success: run.success,
                    rounds: run.rounds,
                    probability: 1.0 / setup.num_branches() as f64,
                    fidelity: run.fidelity,
                    transcript: run.transcript,
                    queries: run.queries,
                })
            }
            ProtocolKind::Teleport | ProtocolKind::StoreRetrieve => {
                let run = if self.config.protocol == ProtocolKind::Teleport {
                    run_gate_teleport_with(psi, oracle, &self.basis)
                } else {
                    run_store_retrieve_with(psi, oracle, &self.basis)
                }
                .map_err(attach)?;
                Ok(SessionOutcome {
                    success: true,
                    rounds: 1,
                    probability: run.outcome.probability,
                    fidelity: run.outcome.fidelity,
                    transcript: run.transcript,
                    queries: oracle.rounds().to_vec(),
                })
            }
        }
    }
}

/// One-shot convenience: prepares the stations and runs a single session.
pub fn execute_session(config: SessionConfig, psi: &CMatrix, oracle: &mut GateOracle) -> Result<SessionOutcome> {
    Session::new(config)?.execute(psi, oracle)
}
