use serde::Serialize;

use crate::error::Result;
use crate::linalg::CMatrix;
use crate::repmatch::TargetSpec;

/// Queries spent in one round, counted in single-copy uses of `U_g`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RoundQueries {
    pub round: usize,
    pub forward: u64,
    pub inverse: u64,
}

/// Black-box access to the target gate with a query counter.
///
/// A protocol step that needs `U^target_g` (or its inverse) on its working
/// register calls [`GateOracle::charge`] with the number of applications; each
/// application costs [`TargetSpec::uses`] single-copy queries.
#[derive(Clone, Debug)]
pub struct GateOracle {
    target: TargetSpec,
    log: Vec<RoundQueries>,
}

impl GateOracle {
    pub fn new(target: TargetSpec) -> Self {
        Self { target, log: Vec::new() }
    }

    pub fn target(&self) -> &TargetSpec {
        &self.target
    }

    /// Copies of `U_g` consumed by one application.
    pub fn uses_per_application(&self) -> u64 {
        self.target.uses() as u64
    }

    pub fn charge(&mut self, round: usize, forward_apps: u64, inverse_apps: u64) {
        let per = self.uses_per_application();
        match self.log.iter_mut().find(|r| r.round == round) {
            Some(r) => {
                r.forward += forward_apps * per;
                r.inverse += inverse_apps * per;
            }
            None => self.log.push(RoundQueries {
                round,
                forward: forward_apps * per,
                inverse: inverse_apps * per,
            }),
        }
    }

    /// Applies the ideal target operation to a full-space state, charging one application.
    pub fn apply(&mut self, round: usize, psi: &CMatrix) -> Result<CMatrix> {
        self.charge(round, 1, 0);
        self.target.ideal_output(psi)
    }

    pub fn rounds(&self) -> &[RoundQueries] {
        &self.log
    }

    pub fn forward_queries(&self) -> u64 {
        self.log.iter().map(|r| r.forward).sum()
    }

    pub fn inverse_queries(&self) -> u64 {
        self.log.iter().map(|r| r.inverse).sum()
    }

    pub fn total_queries(&self) -> u64 {
        self.forward_queries() + self.inverse_queries()
    }
}
