//! Append-only audit trail. One event per audited call; each event lists the
//! record-level operations it covered and a SHA-256 digest of the records
//! written.

use std::collections::BTreeSet;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum AuditOp {
    PutCase {
        case_id: String,
    },
    RecordHearing {
        case_id: String,
        date: NaiveDate,
    },
    DisposeCase {
        case_id: String,
        date: NaiveDate,
    },
    FileAppeal {
        case_id: String,
        appeal_of: String,
        /// Fields taken from the draft rather than the disposal snapshot.
        overridden: Vec<String>,
    },
    Assign {
        case_id: String,
        date: NaiveDate,
    },
    ModelUpdate {
        prior: [f64; 5],
        updated: [f64; 5],
    },
    SectionWeights {
        entries: std::collections::BTreeMap<String, f64>,
        default_weight: f64,
    },
    CalendarChange {
        holidays: Vec<NaiveDate>,
        leaves: Vec<(String, NaiveDate)>,
    },
    PriorityOverride {
        case_id: String,
        prior: crate::case::PriorityLevel,
        updated: crate::case::PriorityLevel,
    },
    Notify {
        notification_ids: Vec<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEvent {
    pub sequence_number: u64,
    pub timestamp: DateTime<Utc>,
    pub actor: String,
    pub action: String,
    pub ops: Vec<AuditOp>,
    /// Hex SHA-256 over the records written, newline separated.
    pub payload_digest: String,
    /// False when the call failed after some records were already written.
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub completed: bool,
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

/// Accumulates ops and payload bytes for the event being built.
#[derive(Debug)]
pub(crate) struct AuditScope {
    pub actor: String,
    pub action: String,
    pub ops: Vec<AuditOp>,
    hasher: Sha256,
}

impl AuditScope {
    pub fn new(actor: &str, action: &str) -> Self {
        Self {
            actor: actor.to_string(),
            action: action.to_string(),
            ops: Vec::new(),
            hasher: Sha256::new(),
        }
    }

    pub fn absorb(&mut self, payload: &str) {
        self.hasher.update(payload.as_bytes());
        self.hasher.update(b"\n");
    }

    pub fn finish(
        self,
        sequence_number: u64,
        timestamp: DateTime<Utc>,
        completed: bool,
    ) -> AuditEvent {
        AuditEvent {
            sequence_number,
            timestamp,
            actor: self.actor,
            action: self.action,
            ops: self.ops,
            payload_digest: hex::encode(self.hasher.finalize()),
            completed,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Partition {
    pub pending: BTreeSet<String>,
    pub disposed: BTreeSet<String>,
}

/// Rebuilds the pending/disposed split from the audit trail alone.
pub fn replay_partition<'a>(events: impl IntoIterator<Item = &'a AuditEvent>) -> Partition {
    let mut p = Partition::default();
    for op in events.into_iter().flat_map(|e| e.ops.iter()) {
        match op {
            AuditOp::PutCase { case_id } | AuditOp::FileAppeal { case_id, .. } => {
                p.pending.insert(case_id.clone());
            }
            AuditOp::DisposeCase { case_id, .. } => {
                p.pending.remove(case_id);
                p.disposed.insert(case_id.clone());
            }
            _ => {}
        }
    }
    p
}

/// True when sequence numbers run 1, 2, 3, ... without gaps.
pub fn is_contiguous(events: &[AuditEvent]) -> bool {
    events
        .iter()
        .enumerate()
        .all(|(i, e)| e.sequence_number == i as u64 + 1)
}
