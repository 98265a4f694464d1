//! System of record for pending and disposed cases, hearing assignments and
//! the audit trail.
//!
//! All mutation goes through `&mut DocketStore`, which gives the single
//! writer contract; callers that share a store across threads wrap it in a
//! lock. Every mutating call lands in exactly one [`AuditEvent`]: either its
//! own, or the event of an enclosing [`DocketStore::audited`] scope.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::audit::{is_contiguous, AuditEvent, AuditOp, AuditScope};
use crate::case::{
    days_between, validate_case, CaseRecord, CaseStatus, CaseType, CreatedBy, HearingEntry,
    HearingOutcome, LegalSectionRef, PriorityLevel, Severity, ValidationContext,
};
use crate::clock::{Clock, SystemClock};
use crate::error::StoreError;
use crate::journal::{MemoryBackend, StorageBackend, Stream};
use crate::rank::Scorer;
use crate::scheduler::{HearingAssignment, LoadLedger};
use crate::weight::{feature_vector, outcome_target, OutcomeSample};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisposalRecord {
    pub case_id: String,
    pub disposal_date: NaiveDate,
    pub final_outcome: String,
    pub disposal_latency_days: u32,
    pub snapshot: CaseRecord,
}

/// Turns a disposal into a training sample for the weight model.
pub trait OutcomeSampler {
    fn sample(&self, record: &DisposalRecord) -> OutcomeSample;
}

impl OutcomeSampler for Scorer {
    fn sample(&self, record: &DisposalRecord) -> OutcomeSample {
        let features = feature_vector(
            &record.snapshot,
            record.disposal_date,
            &self.sections,
            &self.features,
        )
        .expect("disposal date is never before filing");
        OutcomeSample {
            features,
            target: outcome_target(&features, record.disposal_latency_days, &self.features),
        }
    }
}

/// New-case details for an appeal. Unset substantive fields are inherited
/// from the disposal snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppealDraft {
    pub case_id: String,
    pub filing_date: NaiveDate,
    pub judge_id: String,
    #[serde(default = "registrar")]
    pub created_by: CreatedBy,
    #[serde(default)]
    pub case_type: Option<CaseType>,
    #[serde(default)]
    pub severity: Option<Severity>,
    #[serde(default)]
    pub priority_level: Option<PriorityLevel>,
    #[serde(default)]
    pub legal_sections: Option<Vec<LegalSectionRef>>,
}

fn registrar() -> CreatedBy {
    CreatedBy::Registrar
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CaseView<'a> {
    Pending(&'a CaseRecord),
    Disposed(&'a DisposalRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SlotRef {
    case_id: String,
    judge_id: String,
    date: NaiveDate,
    pool: crate::case::Pool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum AssignmentLine {
    Released { released: SlotRef },
    Assigned(HearingAssignment),
}

pub struct DocketStore {
    backend: Box<dyn StorageBackend>,
    clock: Arc<dyn Clock>,
    pending: BTreeMap<String, CaseRecord>,
    disposed: BTreeMap<String, DisposalRecord>,
    assignments: Vec<HearingAssignment>,
    released: Vec<bool>,
    by_date: BTreeMap<NaiveDate, Vec<usize>>,
    outstanding: HashMap<String, usize>,
    ledger: LoadLedger,
    audit: Vec<AuditEvent>,
    scope: Option<AuditScope>,
    samples: Vec<OutcomeSample>,
}

impl std::fmt::Debug for DocketStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DocketStore")
            .field("pending", &self.pending.len())
            .field("disposed", &self.disposed.len())
            .field("assignments", &self.assignments.len())
            .field("audit", &self.audit.len())
            .finish()
    }
}

fn parse_line<T: serde::de::DeserializeOwned>(
    stream: Stream,
    idx: usize,
    line: &str,
) -> Result<T, StoreError> {
    serde_json::from_str(line).map_err(|e| {
        StoreError::StorageFailure(format!("{} record {}: {e}", stream.file_name(), idx + 1))
    })
}

impl DocketStore {
    pub fn in_memory() -> Self {
        Self::open(Box::new(MemoryBackend::new()), Arc::new(SystemClock))
            .expect("empty memory backend always loads")
    }

    /// Loads whatever the backend already holds.
    pub fn open(
        backend: Box<dyn StorageBackend>,
        clock: Arc<dyn Clock>,
    ) -> Result<Self, StoreError> {
        let mut store = Self {
            backend,
            clock,
            pending: BTreeMap::new(),
            disposed: BTreeMap::new(),
            assignments: Vec::new(),
            released: Vec::new(),
            by_date: BTreeMap::new(),
            outstanding: HashMap::new(),
            ledger: LoadLedger::new(),
            audit: Vec::new(),
            scope: None,
            samples: Vec::new(),
        };
        store.load()?;
        Ok(store)
    }

    fn load(&mut self) -> Result<(), StoreError> {
        let mut cases: BTreeMap<String, CaseRecord> = BTreeMap::new();
        for (i, line) in self.backend.read_all(Stream::Cases)?.iter().enumerate() {
            let c: CaseRecord = parse_line(Stream::Cases, i, line)?;
            cases.insert(c.case_id.clone(), c);
        }
        for (i, line) in self.backend.read_all(Stream::Disposed)?.iter().enumerate() {
            let d: DisposalRecord = parse_line(Stream::Disposed, i, line)?;
            cases.remove(&d.case_id);
            self.disposed.insert(d.case_id.clone(), d);
        }
        self.pending = cases;

        let mut slots: HashMap<(String, NaiveDate), Vec<usize>> = HashMap::new();
        for (i, line) in self
            .backend
            .read_all(Stream::Assignments)?
            .iter()
            .enumerate()
        {
            match parse_line(Stream::Assignments, i, line)? {
                AssignmentLine::Assigned(a) => {
                    slots
                        .entry((a.case_id.clone(), a.date))
                        .or_default()
                        .push(self.assignments.len());
                    self.index_assignment(a);
                }
                AssignmentLine::Released { released } => {
                    let idx = slots
                        .get_mut(&(released.case_id.clone(), released.date))
                        .and_then(|v| v.iter().copied().find(|&k| !self.released[k]))
                        .ok_or_else(|| {
                            StoreError::StorageFailure(format!(
                                "release of unknown slot {} on {}",
                                released.case_id, released.date
                            ))
                        })?;
                    self.released[idx] = true;
                }
            }
        }
        for (idx, a) in self.assignments.iter().enumerate() {
            if self.released[idx] {
                continue;
            }
            self.ledger.record(&a.judge_id, a.date, a.pool);
            if let Some(case) = self.pending.get(&a.case_id) {
                if case.last_hearing_date().is_none_or(|last| a.date > last) {
                    self.outstanding.insert(a.case_id.clone(), idx);
                }
            }
        }

        for (i, line) in self.backend.read_all(Stream::Audit)?.iter().enumerate() {
            self.audit.push(parse_line(Stream::Audit, i, line)?);
        }
        if !is_contiguous(&self.audit) {
            return Err(StoreError::StorageFailure(
                "audit sequence numbers are not contiguous".into(),
            ));
        }
        Ok(())
    }

    fn index_assignment(&mut self, a: HearingAssignment) -> usize {
        let idx = self.assignments.len();
        self.by_date.entry(a.date).or_default().push(idx);
        self.assignments.push(a);
        self.released.push(false);
        idx
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    pub fn set_clock(&mut self, clock: Arc<dyn Clock>) {
        self.clock = clock;
    }

    // ---- audit scoping ----

    /// Runs `f` so that everything it writes is covered by one audit event.
    /// The event is appended when `f` succeeds, and also when it fails after
    /// having written something (marked incomplete). Nested calls join the
    /// enclosing scope.
    pub fn audited<R, E>(
        &mut self,
        actor: &str,
        action: &str,
        f: impl FnOnce(&mut Self) -> Result<R, E>,
    ) -> Result<R, E>
    where
        E: From<StoreError>,
    {
        if self.scope.is_some() {
            return f(self);
        }
        self.scope = Some(AuditScope::new(actor, action));
        let result = f(self);
        let scope = self.scope.take().expect("scope set above");
        match result {
            Ok(value) => {
                self.commit(scope, true)?;
                Ok(value)
            }
            Err(e) => {
                if !scope.ops.is_empty() {
                    self.commit(scope, false)?;
                }
                Err(e)
            }
        }
    }

    fn within<R>(
        &mut self,
        action: &str,
        f: impl FnOnce(&mut Self) -> Result<R, StoreError>,
    ) -> Result<R, StoreError> {
        self.audited("system", action, f)
    }

    fn commit(&mut self, scope: AuditScope, completed: bool) -> Result<(), StoreError> {
        let event = scope.finish(self.audit.len() as u64 + 1, self.clock.now(), completed);
        let line = serde_json::to_string(&event)?;
        self.backend.append(Stream::Audit, &line)?;
        self.audit.push(event);
        Ok(())
    }

    fn write(&mut self, stream: Stream, line: &str, op: Option<AuditOp>) -> Result<(), StoreError> {
        self.backend.append(stream, line)?;
        let scope = self
            .scope
            .as_mut()
            .expect("store writes always run inside a scope");
        scope.absorb(line);
        scope.ops.extend(op);
        Ok(())
    }

    /// Records an operation that is not a store write (model or
    /// configuration changes) in the current audit event, or in an event
    /// of its own outside a scope.
    pub fn note(&mut self, action: &str, op: AuditOp) -> Result<(), StoreError> {
        self.within(action, |s| {
            let payload = serde_json::to_string(&op)?;
            let scope = s.scope.as_mut().expect("inside scope");
            scope.absorb(&payload);
            scope.ops.push(op);
            Ok(())
        })
    }

    /// Appends notification records to the outbox stream under one audit op.
    pub fn append_outbox(
        &mut self,
        action: &str,
        lines: &[String],
        ids: Vec<u64>,
    ) -> Result<(), StoreError> {
        self.within(action, |s| {
            for line in lines {
                s.write(Stream::Outbox, line, None)?;
            }
            s.scope
                .as_mut()
                .expect("inside scope")
                .ops
                .push(AuditOp::Notify {
                    notification_ids: ids,
                });
            Ok(())
        })
    }

    pub fn outbox_records(&self) -> Result<Vec<String>, StoreError> {
        self.backend.read_all(Stream::Outbox)
    }

    pub fn audit_log(&self) -> &[AuditEvent] {
        &self.audit
    }

    pub fn last_sequence(&self) -> u64 {
        self.audit.len() as u64
    }

    // ---- cases ----

    pub fn contains(&self, case_id: &str) -> bool {
        self.pending.contains_key(case_id) || self.disposed.contains_key(case_id)
    }

    pub fn is_disposed(&self, case_id: &str) -> bool {
        self.disposed.contains_key(case_id)
    }

    pub fn put_case(&mut self, case: CaseRecord) -> Result<String, StoreError> {
        self.within("put_case", |s| {
            if s.contains(&case.case_id) {
                return Err(StoreError::DuplicateCaseId(case.case_id.clone()));
            }
            if case.status != CaseStatus::Pending {
                return Err(StoreError::InvalidRecord(format!(
                    "case {} must be pending when stored",
                    case.case_id
                )));
            }
            let line = case.to_canonical_json();
            let id = case.case_id.clone();
            s.write(
                Stream::Cases,
                &line,
                Some(AuditOp::PutCase {
                    case_id: id.clone(),
                }),
            )?;
            s.pending.insert(id.clone(), case);
            Ok(id)
        })
    }

    pub fn get_pending(&self, case_id: &str) -> Option<&CaseRecord> {
        self.pending.get(case_id)
    }

    pub fn get(&self, case_id: &str) -> Option<CaseView<'_>> {
        self.pending
            .get(case_id)
            .map(CaseView::Pending)
            .or_else(|| self.disposed.get(case_id).map(CaseView::Disposed))
    }

    pub fn pending(&self) -> impl Iterator<Item = &CaseRecord> {
        self.pending.values()
    }

    pub fn pending_count(&self) -> usize {
        self.pending.len()
    }

    /// Pending cases ordered by case id, optionally restricted to a type.
    pub fn list_pending(&self, filter: Option<CaseType>) -> Vec<CaseRecord> {
        self.pending
            .values()
            .filter(|c| filter.is_none_or(|t| c.case_type == t))
            .cloned()
            .collect()
    }

    pub fn record_hearing(
        &mut self,
        case_id: &str,
        entry: HearingEntry,
    ) -> Result<CaseRecord, StoreError> {
        self.within("record_hearing", |s| {
            let case = s.pending_case(case_id)?;
            if entry.outcome == HearingOutcome::Disposed {
                return Err(StoreError::InvalidRecord(
                    "use dispose_case to record a disposal".into(),
                ));
            }
            let directed = entry.outcome == HearingOutcome::NextHearingDirected;
            if directed != matches!(entry.directive_after_days, Some(d) if d > 0)
                || (!directed && entry.directive_after_days.is_some())
            {
                return Err(StoreError::InvalidRecord(
                    "directive_after_days must be set exactly for NextHearingDirected".into(),
                ));
            }
            if entry.date < case.filing_date
                || case.last_hearing_date().is_some_and(|d| entry.date <= d)
            {
                return Err(StoreError::NonMonotoneHearings {
                    case_id: case_id.to_string(),
                    date: entry.date,
                });
            }
            let mut updated = case.clone();
            updated.hearings.push(entry.clone());
            s.write(
                Stream::Cases,
                &updated.to_canonical_json(),
                Some(AuditOp::RecordHearing {
                    case_id: case_id.to_string(),
                    date: entry.date,
                }),
            )?;
            if let Some(&idx) = s.outstanding.get(case_id) {
                if s.assignments[idx].date <= entry.date {
                    s.outstanding.remove(case_id);
                }
            }
            s.pending.insert(case_id.to_string(), updated.clone());
            Ok(updated)
        })
    }

    fn pending_case(&self, case_id: &str) -> Result<&CaseRecord, StoreError> {
        match self.pending.get(case_id) {
            Some(c) => Ok(c),
            None if self.disposed.contains_key(case_id) => {
                Err(StoreError::AlreadyDisposed(case_id.to_string()))
            }
            None => Err(StoreError::CaseNotFound(case_id.to_string())),
        }
    }

    /// Replaces the entry priority of a pending case.
    pub fn override_priority(
        &mut self,
        case_id: &str,
        level: PriorityLevel,
    ) -> Result<CaseRecord, StoreError> {
        self.within("override_priority", |s| {
            let mut updated = s.pending_case(case_id)?.clone();
            let prior = updated.priority_level;
            updated.priority_level = level;
            s.write(
                Stream::Cases,
                &updated.to_canonical_json(),
                Some(AuditOp::PriorityOverride {
                    case_id: case_id.to_string(),
                    prior,
                    updated: level,
                }),
            )?;
            s.pending.insert(case_id.to_string(), updated.clone());
            Ok(updated)
        })
    }

    /// Moves a pending case to the disposed set and queues exactly one
    /// outcome sample for the weight model.
    pub fn dispose_case(
        &mut self,
        case_id: &str,
        disposal_date: NaiveDate,
        outcome: &str,
        sampler: &dyn OutcomeSampler,
    ) -> Result<DisposalRecord, StoreError> {
        self.within("dispose_case", |s| {
            let case = s.pending_case(case_id)?;
            let latency = days_between(case.filing_date, disposal_date).ok_or_else(|| {
                StoreError::NonMonotoneHearings {
                    case_id: case_id.to_string(),
                    date: disposal_date,
                }
            })?;
            let mut snapshot = case.clone();
            match snapshot.last_hearing_date() {
                Some(last) if disposal_date < last => {
                    return Err(StoreError::NonMonotoneHearings {
                        case_id: case_id.to_string(),
                        date: disposal_date,
                    })
                }
                Some(last) if disposal_date == last => {
                    let h = snapshot.hearings.last_mut().expect("has a last hearing");
                    h.outcome = HearingOutcome::Disposed;
                    h.directive_after_days = None;
                }
                _ => snapshot.hearings.push(HearingEntry {
                    date: disposal_date,
                    outcome: HearingOutcome::Disposed,
                    directive_after_days: None,
                }),
            }
            snapshot.status = CaseStatus::Disposed;
            let record = DisposalRecord {
                case_id: case_id.to_string(),
                disposal_date,
                final_outcome: outcome.to_string(),
                disposal_latency_days: latency,
                snapshot,
            };
            s.write(
                Stream::Disposed,
                &serde_json::to_string(&record)?,
                Some(AuditOp::DisposeCase {
                    case_id: case_id.to_string(),
                    date: disposal_date,
                }),
            )?;
            if let Some(idx) = s.outstanding.remove(case_id) {
                if s.assignments[idx].date > disposal_date {
                    s.release(idx)?;
                }
            }
            s.pending.remove(case_id);
            s.samples.push(sampler.sample(&record));
            s.disposed.insert(case_id.to_string(), record.clone());
            Ok(record)
        })
    }

    pub fn fetch_disposed(&self, case_id: &str) -> Result<DisposalRecord, StoreError> {
        self.disposed
            .get(case_id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(case_id.to_string()))
    }

    pub fn disposed(&self) -> impl Iterator<Item = &DisposalRecord> {
        self.disposed.values()
    }

    pub fn disposed_count(&self) -> usize {
        self.disposed.len()
    }

    /// Outcome samples queued by disposals since the last call.
    pub fn take_outcome_samples(&mut self) -> Vec<OutcomeSample> {
        std::mem::take(&mut self.samples)
    }

    /// Creates a pending appeal of a disposed case. Case type, severity,
    /// priority and sections come from the disposal snapshot unless the
    /// draft overrides them; hearings start empty.
    pub fn file_appeal(
        &mut self,
        disposed_case_id: &str,
        draft: AppealDraft,
    ) -> Result<CaseRecord, StoreError> {
        self.within("file_appeal", |s| {
            let parent = s.fetch_disposed(disposed_case_id)?;
            if s.contains(&draft.case_id) {
                return Err(StoreError::DuplicateCaseId(draft.case_id.clone()));
            }
            if draft.filing_date < parent.disposal_date {
                return Err(StoreError::InvalidRecord(format!(
                    "appeal filed {} before the disposal on {}",
                    draft.filing_date, parent.disposal_date
                )));
            }
            let mut overridden = Vec::new();
            let mut pick = |name: &str, set: bool| {
                if set {
                    overridden.push(name.to_string());
                }
            };
            pick("case_type", draft.case_type.is_some());
            pick("severity", draft.severity.is_some());
            pick("priority_level", draft.priority_level.is_some());
            pick("legal_sections", draft.legal_sections.is_some());

            let snap = &parent.snapshot;
            let case = CaseRecord {
                case_id: draft.case_id.clone(),
                case_type: draft.case_type.unwrap_or(snap.case_type),
                filing_date: draft.filing_date,
                severity: draft.severity.unwrap_or(snap.severity),
                priority_level: draft.priority_level.unwrap_or(snap.priority_level),
                legal_sections: draft
                    .legal_sections
                    .unwrap_or_else(|| snap.legal_sections.clone()),
                hearings: Vec::new(),
                status: CaseStatus::Pending,
                appeal_of: Some(disposed_case_id.to_string()),
                judge_id: draft.judge_id.clone(),
                created_by: draft.created_by,
            };
            let disposed = |id: &str| s.disposed.contains_key(id);
            let ctx = ValidationContext {
                today: draft.filing_date,
                is_disposed: &disposed,
            };
            let case = validate_case(case, &ctx)
                .map_err(|e| StoreError::InvalidRecord(e.to_string()))?
                .record;
            s.write(
                Stream::Cases,
                &case.to_canonical_json(),
                Some(AuditOp::FileAppeal {
                    case_id: case.case_id.clone(),
                    appeal_of: disposed_case_id.to_string(),
                    overridden,
                }),
            )?;
            s.pending.insert(case.case_id.clone(), case.clone());
            Ok(case)
        })
    }

    // ---- assignments ----

    /// Persists assignments produced by the allocator and counts them in
    /// the store's load ledger. An earlier outstanding assignment of the
    /// same case is released.
    pub fn save_assignments(&mut self, batch: Vec<HearingAssignment>) -> Result<(), StoreError> {
        self.within("save_assignments", |s| {
            for a in &batch {
                s.pending_case(&a.case_id)?;
            }
            for a in batch {
                if let Some(prev) = s.outstanding.remove(&a.case_id) {
                    s.release(prev)?;
                }
                s.write(
                    Stream::Assignments,
                    &serde_json::to_string(&a)?,
                    Some(AuditOp::Assign {
                        case_id: a.case_id.clone(),
                        date: a.date,
                    }),
                )?;
                s.ledger.record(&a.judge_id, a.date, a.pool);
                let case_id = a.case_id.clone();
                let idx = s.index_assignment(a);
                s.outstanding.insert(case_id, idx);
            }
            Ok(())
        })
    }

    fn release(&mut self, idx: usize) -> Result<(), StoreError> {
        if self.released[idx] {
            return Ok(());
        }
        let a = &self.assignments[idx];
        let slot = SlotRef {
            case_id: a.case_id.clone(),
            judge_id: a.judge_id.clone(),
            date: a.date,
            pool: a.pool,
        };
        self.ledger.release(&slot.judge_id, slot.date, slot.pool);
        self.released[idx] = true;
        let line = serde_json::to_string(&AssignmentLine::Released { released: slot })?;
        self.write(Stream::Assignments, &line, None)
    }

    /// Scheduled hearing not yet held, if any.
    pub fn outstanding(&self, case_id: &str) -> Option<&HearingAssignment> {
        self.outstanding.get(case_id).map(|&i| &self.assignments[i])
    }

    pub fn has_outstanding(&self, case_id: &str) -> bool {
        self.outstanding.contains_key(case_id)
    }

    pub fn outstanding_count(&self) -> usize {
        self.outstanding.len()
    }

    /// Live (not released) assignments in the order they were made.
    pub fn assignments(&self) -> impl Iterator<Item = &HearingAssignment> {
        self.assignments
            .iter()
            .zip(&self.released)
            .filter(|(_, r)| !**r)
            .map(|(a, _)| a)
    }

    /// Live assignments dated `date`.
    pub fn assignments_on(&self, date: NaiveDate) -> impl Iterator<Item = &HearingAssignment> {
        self.by_date
            .get(&date)
            .into_iter()
            .flatten()
            .filter(|&&i| !self.released[i])
            .map(|&i| &self.assignments[i])
    }

    pub fn ledger(&self) -> &LoadLedger {
        &self.ledger
    }

    /// Judges that appear on any stored case.
    pub fn judges(&self) -> impl Iterator<Item = &str> {
        self.pending
            .values()
            .map(|c| c.judge_id.as_str())
            .chain(self.disposed.values().map(|d| d.snapshot.judge_id.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::replay_partition;
    use crate::case::Pool;
    use crate::fixtures::{date, sample_cases};
    use crate::journal::NdjsonBackend;

    fn loaded() -> DocketStore {
        let mut s = DocketStore::in_memory();
        for c in sample_cases() {
            s.put_case(c).unwrap();
        }
        s
    }

    fn assignment(case_id: &str, d: NaiveDate) -> HearingAssignment {
        HearingAssignment {
            case_id: case_id.into(),
            judge_id: "J1".into(),
            date: d,
            pool: Pool::Old,
            rank_at_assignment: 1,
            weight_snapshot: 0.5,
        }
    }

    #[test]
    fn put_and_get_round_trip() {
        let s = loaded();
        let case = &sample_cases()[2];
        match s.get("003") {
            Some(CaseView::Pending(stored)) => {
                assert_eq!(stored, case);
                assert_eq!(stored.to_canonical_json(), case.to_canonical_json());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let mut s = loaded();
        let err = s.put_case(sample_cases()[0].clone()).unwrap_err();
        assert!(matches!(err, StoreError::DuplicateCaseId(id) if id == "001"));
    }

    #[test]
    fn list_pending_filters_by_type() {
        let s = loaded();
        let ids: Vec<_> = s
            .list_pending(Some(CaseType::Criminal))
            .into_iter()
            .map(|c| c.case_id)
            .collect();
        assert_eq!(ids, ["001", "004", "005"]);
        assert_eq!(s.list_pending(None).len(), 5);
        assert!(DocketStore::in_memory().list_pending(None).is_empty());
    }

    #[test]
    fn record_hearing_appends_and_checks_order() {
        let mut s = loaded();
        let updated = s
            .record_hearing("002", HearingEntry::adjourned(date(2025, 7, 2)))
            .unwrap();
        assert_eq!(updated.hearings.len(), 1);
        assert_eq!(crate::case::classify_pool(&updated), Ok(Pool::Old));
        let err = s
            .record_hearing("002", HearingEntry::adjourned(date(2025, 6, 1)))
            .unwrap_err();
        assert!(matches!(err, StoreError::NonMonotoneHearings { .. }));
        assert!(matches!(
            s.record_hearing("zzz", HearingEntry::adjourned(date(2025, 7, 2))),
            Err(StoreError::CaseNotFound(_))
        ));
    }

    #[test]
    fn dispose_case_005() {
        let mut s = loaded();
        let rec = s
            .dispose_case("005", date(2025, 9, 20), "convicted", &Scorer::default())
            .unwrap();
        assert_eq!(rec.disposal_latency_days, 172);
        assert_eq!(rec.snapshot.status, CaseStatus::Disposed);
        assert_eq!(s.take_outcome_samples().len(), 1);
        assert!(s.take_outcome_samples().is_empty());
        assert!(matches!(
            s.dispose_case("005", date(2025, 9, 21), "x", &Scorer::default()),
            Err(StoreError::AlreadyDisposed(_))
        ));
        assert_eq!(s.fetch_disposed("005").unwrap(), rec);
        assert!(matches!(
            s.fetch_disposed("999"),
            Err(StoreError::NotFound(_))
        ));
        assert!(s.get_pending("005").is_none());
    }

    #[test]
    fn fetched_snapshot_is_independent_of_later_writes() {
        let mut s = loaded();
        s.dispose_case("005", date(2025, 9, 20), "settled", &Scorer::default())
            .unwrap();
        let before = s.fetch_disposed("005").unwrap();
        s.file_appeal(
            "005",
            AppealDraft {
                case_id: "A-005".into(),
                filing_date: date(2025, 10, 1),
                judge_id: "HC1".into(),
                created_by: CreatedBy::AdvocateOnRecord,
                case_type: None,
                severity: Some(Severity::High),
                priority_level: None,
                legal_sections: None,
            },
        )
        .unwrap();
        assert_eq!(s.fetch_disposed("005").unwrap(), before);
    }

    #[test]
    fn appeal_inherits_from_snapshot() {
        let mut s = loaded();
        s.dispose_case("001", date(2025, 7, 15), "convicted", &Scorer::default())
            .unwrap();
        let draft = AppealDraft {
            case_id: "A-001".into(),
            filing_date: date(2025, 8, 1),
            judge_id: "HC1".into(),
            created_by: CreatedBy::AdvocateOnRecord,
            case_type: None,
            severity: None,
            priority_level: None,
            legal_sections: None,
        };
        let appeal = s.file_appeal("001", draft.clone()).unwrap();
        assert_eq!(appeal.case_type, CaseType::Criminal);
        assert_eq!(appeal.appeal_of.as_deref(), Some("001"));
        assert_eq!(
            appeal
                .legal_sections
                .iter()
                .map(|x| x.canonical())
                .collect::<Vec<_>>(),
            ["IPC:302", "IPC:34"]
        );
        assert!(appeal.hearings.is_empty());
        assert!(s.list_pending(None).iter().any(|c| c.case_id == "A-001"));

        assert!(matches!(
            s.file_appeal("001", draft),
            Err(StoreError::DuplicateCaseId(_))
        ));
        let mut other = AppealDraft {
            case_id: "A-002".into(),
            ..s_draft()
        };
        other.case_id = "A-002".into();
        assert!(matches!(
            s.file_appeal("002", other),
            Err(StoreError::NotFound(_))
        ));
    }

    fn s_draft() -> AppealDraft {
        AppealDraft {
            case_id: "X".into(),
            filing_date: date(2025, 8, 1),
            judge_id: "HC1".into(),
            created_by: CreatedBy::Registrar,
            case_type: None,
            severity: None,
            priority_level: None,
            legal_sections: None,
        }
    }

    #[test]
    fn each_call_writes_one_contiguous_audit_event() {
        let mut s = loaded();
        s.dispose_case("001", date(2025, 7, 15), "convicted", &Scorer::default())
            .unwrap();
        s.file_appeal(
            "001",
            AppealDraft {
                case_id: "A1".into(),
                ..s_draft()
            },
        )
        .unwrap();
        assert_eq!(s.audit_log().len(), 7);
        assert!(is_contiguous(s.audit_log()));
        let p = replay_partition(s.audit_log());
        assert_eq!(p.disposed.iter().collect::<Vec<_>>(), ["001"]);
        assert_eq!(p.pending.len(), 5);
        assert!(p.pending.contains("A1"));
    }

    #[test]
    fn scope_groups_writes_into_one_event() {
        let mut s = loaded();
        let n = s.audit_log().len();
        s.audited("judge", "decision", |s| -> Result<(), StoreError> {
            s.record_hearing("002", HearingEntry::directed(date(2025, 7, 2), 15))?;
            s.save_assignments(vec![assignment("002", date(2025, 7, 17))])?;
            Ok(())
        })
        .unwrap();
        assert_eq!(s.audit_log().len(), n + 1);
        let ev = s.audit_log().last().unwrap();
        assert_eq!(ev.action, "decision");
        assert_eq!(ev.ops.len(), 2);
        assert_eq!(ev.payload_digest.len(), 64);
    }

    #[test]
    fn superseded_assignment_frees_its_slot() {
        let mut s = loaded();
        s.save_assignments(vec![assignment("003", date(2025, 7, 10))])
            .unwrap();
        assert_eq!(s.ledger().get("J1", date(2025, 7, 10)).total, 1);
        s.save_assignments(vec![assignment("003", date(2025, 7, 20))])
            .unwrap();
        assert_eq!(s.ledger().get("J1", date(2025, 7, 10)).total, 0);
        assert_eq!(s.outstanding("003").unwrap().date, date(2025, 7, 20));
        assert_eq!(s.assignments().count(), 1);
        s.dispose_case("003", date(2025, 7, 15), "settled", &Scorer::default())
            .unwrap();
        assert_eq!(s.ledger().get("J1", date(2025, 7, 20)).total, 0);
        assert!(s.outstanding("003").is_none());
    }

    #[test]
    fn file_backend_reload_matches_memory_state() {
        let dir = tempfile::tempdir().unwrap();
        let open = || {
            DocketStore::open(
                Box::new(NdjsonBackend::open(dir.path()).unwrap()),
                Arc::new(SystemClock),
            )
            .unwrap()
        };
        let mut s = open();
        for c in sample_cases() {
            s.put_case(c).unwrap();
        }
        s.save_assignments(vec![
            assignment("003", date(2025, 7, 10)),
            assignment("004", date(2025, 7, 11)),
        ])
        .unwrap();
        s.record_hearing("003", HearingEntry::directed(date(2025, 7, 10), 20))
            .unwrap();
        s.save_assignments(vec![assignment("003", date(2025, 7, 31))])
            .unwrap();
        s.save_assignments(vec![assignment("004", date(2025, 8, 1))])
            .unwrap();
        s.dispose_case("005", date(2025, 9, 20), "acquitted", &Scorer::default())
            .unwrap();

        let r = open();
        assert_eq!(r.list_pending(None), s.list_pending(None));
        assert_eq!(
            r.fetch_disposed("005").unwrap(),
            s.fetch_disposed("005").unwrap()
        );
        assert_eq!(r.ledger(), s.ledger());
        assert_eq!(r.outstanding("003"), s.outstanding("003"));
        assert_eq!(r.outstanding("004"), s.outstanding("004"));
        assert_eq!(r.audit_log(), s.audit_log());
        assert_eq!(
            r.assignments().collect::<Vec<_>>(),
            s.assignments().collect::<Vec<_>>()
        );
        let p = replay_partition(r.audit_log());
        assert_eq!(p.pending.len(), r.pending_count());
        assert!(p.disposed.contains("005"));
    }

    #[test]
    fn corrupt_interior_record_is_a_storage_failure() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("cases.ndjson"), "{not json}\n").unwrap();
        let err = DocketStore::open(
            Box::new(NdjsonBackend::open(dir.path()).unwrap()),
            Arc::new(SystemClock),
        )
        .unwrap_err();
        assert!(matches!(err, StoreError::StorageFailure(_)));
    }

    #[test]
    fn torn_trailing_case_record_is_ignored() {
        let dir = tempfile::tempdir().unwrap();
        {
            let mut s = DocketStore::open(
                Box::new(NdjsonBackend::open(dir.path()).unwrap()),
                Arc::new(SystemClock),
            )
            .unwrap();
            s.put_case(sample_cases()[0].clone()).unwrap();
        }
        let json = sample_cases()[1].to_canonical_json();
        let path = dir.path().join("cases.ndjson");
        let mut text = std::fs::read_to_string(&path).unwrap();
        text.push_str(&json[..json.len() / 2]);
        std::fs::write(&path, text).unwrap();
        let s = DocketStore::open(
            Box::new(NdjsonBackend::open(dir.path()).unwrap()),
            Arc::new(SystemClock),
        )
        .unwrap();
        assert_eq!(s.pending_count(), 1);
    }
}
