use serde::{Deserialize, Serialize};

pub const TRANSCRIPT_SCHEMA_VERSION: u32 = 1;

/// Direction of an inter-station transfer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Leg {
    #[serde(rename = "A→B")]
    AToB,
    #[serde(rename = "B→A")]
    BToA,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub round: usize,
    pub leg: Leg,
    pub register: String,
    pub dimension: u64,
    pub qubits: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub branch: usize,
    pub success: bool,
    pub probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub forward: u64,
    pub backward: u64,
    pub rounds: usize,
}

impl Totals {
    pub fn qubits(&self) -> u64 {
        self.forward + self.backward
    }
}

/// Ordered log of every metered transfer in a session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub schema_version: u32,
    pub session_id: String,
    pub protocol: String,
    pub messages: Vec<Message>,
    pub outcomes: Vec<RoundRecord>,
    pub totals: Totals,
}

/// Qubits needed for a register of dimension `dim`: bit length of `dim − 1`.
pub fn qubits_for(dim: u64) -> u64 {
    u64::from(u64::BITS - dim.saturating_sub(1).leading_zeros())
}

impl Transcript {
    pub fn new(protocol: &str, session_id: impl Into<String>) -> Self {
        Self {
            schema_version: TRANSCRIPT_SCHEMA_VERSION,
            session_id: session_id.into(),
            protocol: protocol.to_string(),
            messages: Vec::new(),
            outcomes: Vec::new(),
            totals: Totals::default(),
        }
    }

    pub fn send(&mut self, round: usize, leg: Leg, register: &str, dimension: u64) {
        let qubits = qubits_for(dimension);
        match leg {
            Leg::AToB => self.totals.forward += qubits,
            Leg::BToA => self.totals.backward += qubits,
        }
        self.totals.rounds = self.totals.rounds.max(round);
        self.messages.push(Message {
            round,
            leg,
            register: register.to_string(),
            dimension,
            qubits,
        });
    }

    pub fn record(&mut self, record: RoundRecord) {
        self.totals.rounds = self.totals.rounds.max(record.round);
        self.outcomes.push(record);
    }

    pub fn total_qubits(&self) -> u64 {
        self.totals.qubits()
    }

    /// Recomputes the totals from the message list and compares.
    pub fn is_consistent(&self) -> bool {
        let mut t = Totals::default();
        for m in &self.messages {
            if m.qubits != qubits_for(m.dimension) {
                return false;
            }
            match m.leg {
                Leg::AToB => t.forward += m.qubits,
                Leg::BToA => t.backward += m.qubits,
            }
            t.rounds = t.rounds.max(m.round);
        }
        for o in &self.outcomes {
            t.rounds = t.rounds.max(o.round);
        }
        t == self.totals
    }

    pub fn to_json_pretty(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_rule() {
        for (dim, q) in [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (9, 4), (16, 4), (17, 5)] {
            assert_eq!(qubits_for(dim), q, "dim {dim}");
        }
    }

    #[test]
    fn totals_follow_messages() {
        let mut t = Transcript::new("repmatch", "s");
        t.send(1, Leg::AToB, "R", 5);
        t.send(1, Leg::BToA, "AR", 9);
        t.send(2, Leg::AToB, "R", 5);
        assert_eq!(t.totals, Totals { forward: 6, backward: 4, rounds: 2 });
        assert!(t.is_consistent());
        let json = t.to_json_pretty().unwrap();
        assert!(json.contains("\"A→B\""));
        let back: Transcript = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        let mut broken = t.clone();
        broken.messages[0].qubits = 1;
        assert!(!broken.is_consistent());
    }
}
