//! The docket: store, scoring, calendar, capacity and outbox wired together
//! into the operations registrars, judges and administrators perform. The
//! HTTP service and the simulator both drive this type and nothing else.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::audit::AuditOp;
use crate::calendar::{is_sitting_day, CourtCalendar};
use crate::case::{
    case_age_days, classify_pool, validate_case, CaseRecord, CaseType, HearingEntry,
    LegalSectionRef, Pool, PriorityLevel, ValidatedCase, ValidationContext,
};
use crate::config::EngineConfig;
use crate::error::{EngineError, StoreError};
use crate::notify::{
    Channel, ChannelAdapter, ConsoleAdapter, DeliveryReport, Notification, NotificationStatus,
    Outbox, RecipientRole,
};
use crate::perf::{OperationStats, PerfLog};
use crate::rank::{rank_cases, Scorer};
use crate::scheduler::{
    allocate_hearings, allocate_within, schedule_directive, AllocationRequest, CapacityConfig,
    DailyCounts, HearingAssignment,
};
use crate::store::{AppealDraft, DisposalRecord, DocketStore};
use crate::weight::{update_coefficients, SectionWeightTable, WeightModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecisionAction {
    Dispose,
    NextHearingAfterDays,
}

/// A judge's ruling at a hearing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case_id: Option<String>,
    pub action: DecisionAction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub after_days: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome_code: Option<String>,
    /// Defaults to the service clock's date.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision_date: Option<NaiveDate>,
}

impl DecisionRequest {
    pub fn dispose() -> Self {
        Self {
            case_id: None,
            action: DecisionAction::Dispose,
            after_days: None,
            outcome_code: None,
            decision_date: None,
        }
    }

    pub fn after(days: u32) -> Self {
        Self {
            action: DecisionAction::NextHearingAfterDays,
            after_days: Some(days),
            ..Self::dispose()
        }
    }

    pub fn on(mut self, date: NaiveDate) -> Self {
        self.decision_date = Some(date);
        self
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        match (self.action, self.after_days) {
            (DecisionAction::Dispose, None) => Ok(()),
            (DecisionAction::Dispose, Some(_)) => Err(EngineError::InvalidDecision(
                "after_days is only allowed with NextHearingAfterDays".into(),
            )),
            (DecisionAction::NextHearingAfterDays, Some(d)) if d > 0 => Ok(()),
            (DecisionAction::NextHearingAfterDays, _) => Err(EngineError::InvalidDecision(
                "NextHearingAfterDays needs a positive after_days".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionOutcome {
    pub case_id: String,
    pub decision_date: NaiveDate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disposal: Option<DisposalRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub next_hearing: Option<HearingAssignment>,
    pub notification_ids: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRun {
    pub as_of: NaiveDate,
    pub assigned: Vec<HearingAssignment>,
    /// Cases that found no slot inside the scheduling window.
    pub deferred: Vec<String>,
    /// Cases that could not be scored, with the reason.
    pub rejected: Vec<(String, String)>,
    pub notifications_queued: usize,
    pub delivery: DeliveryReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppealFiled {
    pub case: CaseRecord,
    pub notification: Notification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalendarUpdate {
    pub holidays_added: Vec<NaiveDate>,
    pub leaves_added: Vec<(String, NaiveDate)>,
    /// Outstanding hearings that fell on a newly closed day and were moved.
    pub rescheduled: Vec<HearingAssignment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocketRow {
    pub rank: u32,
    pub case_id: String,
    pub case_type: CaseType,
    pub pool: Pool,
    pub weight: f64,
    pub sections: Vec<LegalSectionRef>,
    pub age_days: u32,
    pub hearing_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocketView {
    pub judge_id: String,
    pub date: NaiveDate,
    /// Changes whenever the store changes; lets clients detect stale views.
    pub version: u64,
    pub sitting: bool,
    pub rows: Vec<DocketRow>,
    pub counts: DailyCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgeBucket {
    pub min_days: u32,
    /// Exclusive; `None` for the open-ended last bucket.
    pub max_days: Option<u32>,
    pub count: usize,
}

pub const AGE_BUCKET_EDGES: [u32; 6] = [0, 30, 90, 180, 365, 730];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotificationCounts {
    pub queued: usize,
    pub delivered: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub as_of: NaiveDate,
    pub operations: Vec<OperationStats>,
    pub scheduled_per_day: BTreeMap<NaiveDate, u32>,
    pub pending_age_histogram: Vec<AgeBucket>,
    pub pending_cases: usize,
    pub disposed_cases: usize,
    pub notifications: NotificationCounts,
    pub model_coefficients: [f64; 5],
    pub model_samples_seen: u64,
}

pub struct Docket {
    store: DocketStore,
    scorer: Scorer,
    capacity: CapacityConfig,
    calendar: CourtCalendar,
    outbox: Outbox,
    adapter: Box<dyn ChannelAdapter + Send>,
    perf: PerfLog,
    judges: BTreeSet<String>,
    recipients: Vec<RecipientRole>,
    window_days: Option<u32>,
    learning: bool,
}

impl std::fmt::Debug for Docket {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Docket")
            .field("store", &self.store)
            .field("capacity", &self.capacity)
            .field("judges", &self.judges)
            .finish_non_exhaustive()
    }
}

fn hearing_notice_roles() -> Vec<RecipientRole> {
    RecipientRole::ALL.to_vec()
}

impl Docket {
    /// Wraps a store, replaying model, section-weight and calendar changes
    /// recorded in its audit log on top of `config` and `calendar`.
    pub fn open(
        store: DocketStore,
        config: EngineConfig,
        calendar: CourtCalendar,
        adapter: Box<dyn ChannelAdapter + Send>,
    ) -> Result<Self, EngineError> {
        let outbox = Outbox::load(&store, adapter.channel())?;
        let mut docket = Self {
            store,
            scorer: config.scorer,
            capacity: config.capacity,
            calendar,
            outbox,
            adapter,
            perf: PerfLog::new(),
            judges: BTreeSet::new(),
            recipients: hearing_notice_roles(),
            window_days: None,
            learning: true,
        };
        docket.replay()?;
        docket
            .judges
            .extend(docket.store.judges().map(str::to_string));
        Ok(docket)
    }

    /// An empty in-memory docket with default configuration.
    pub fn in_memory() -> Self {
        Self::open(
            DocketStore::in_memory(),
            EngineConfig::default(),
            CourtCalendar::default(),
            Box::new(ConsoleAdapter::silent()),
        )
        .expect("an empty store always opens")
    }

    fn replay(&mut self) -> Result<(), EngineError> {
        let mut model: Option<([f64; 5], u64)> = None;
        for op in self.store.audit_log().iter().flat_map(|e| &e.ops) {
            match op {
                AuditOp::ModelUpdate { updated, .. } => {
                    let seen = model.map_or(0, |(_, n)| n) + 1;
                    model = Some((*updated, seen));
                }
                AuditOp::SectionWeights {
                    entries,
                    default_weight,
                } => {
                    self.scorer.sections = SectionWeightTable::new(
                        entries.iter().map(|(k, v)| (k.clone(), *v)),
                        *default_weight,
                    )?;
                }
                AuditOp::CalendarChange { holidays, leaves } => {
                    for d in holidays {
                        self.calendar.add_holiday(*d);
                    }
                    for (j, d) in leaves {
                        self.calendar.add_leave(j, *d);
                    }
                }
                _ => {}
            }
        }
        if let Some((coefficients, seen)) = model {
            self.scorer.model = WeightModel::new(coefficients, self.scorer.model.learning_rate())?
                .with_samples_seen(seen);
        }
        Ok(())
    }

    /// Limits each scheduling run to `days` days after its reference date;
    /// `None` places every case however far out that takes.
    pub fn with_window(mut self, days: Option<u32>) -> Self {
        self.window_days = days;
        self
    }

    pub fn with_recipients(mut self, recipients: Vec<RecipientRole>) -> Self {
        self.recipients = recipients;
        self
    }

    pub fn with_judges<S: Into<String>>(mut self, judges: impl IntoIterator<Item = S>) -> Self {
        self.judges.extend(judges.into_iter().map(Into::into));
        self
    }

    /// Turns online learning from disposals on or off.
    pub fn with_learning(mut self, learning: bool) -> Self {
        self.learning = learning;
        self
    }

    pub fn store(&self) -> &DocketStore {
        &self.store
    }

    pub fn scorer(&self) -> &Scorer {
        &self.scorer
    }

    pub fn capacity(&self) -> &CapacityConfig {
        &self.capacity
    }

    pub fn calendar(&self) -> &CourtCalendar {
        &self.calendar
    }

    pub fn outbox(&self) -> &Outbox {
        &self.outbox
    }

    pub fn perf(&self) -> &PerfLog {
        &self.perf
    }

    pub fn judges(&self) -> &BTreeSet<String> {
        &self.judges
    }

    pub fn today(&self) -> NaiveDate {
        self.store.clock().today()
    }

    fn timed<R>(&mut self, op: &str, f: impl FnOnce(&mut Self) -> R) -> R {
        let start = Instant::now();
        let out = f(self);
        self.perf.record(op, start.elapsed());
        out
    }

    /// Validates a draft against `today` and stores it.
    pub fn enter_case(
        &mut self,
        actor: &str,
        draft: CaseRecord,
        today: NaiveDate,
    ) -> Result<ValidatedCase, EngineError> {
        self.timed("enter_case", |d| {
            let store = &d.store;
            let disposed = |id: &str| store.is_disposed(id);
            let ctx = ValidationContext {
                today,
                is_disposed: &disposed,
            };
            let validated = validate_case(draft, &ctx)?;
            if d.store.contains(&validated.record.case_id) {
                return Err(StoreError::DuplicateCaseId(validated.record.case_id.clone()).into());
            }
            d.store.audited(actor, "enter_case", |s| {
                s.put_case(validated.record.clone())
            })?;
            d.judges.insert(validated.record.judge_id.clone());
            Ok(validated)
        })
    }

    /// Applies a judge's decision. A disposal feeds the weight model; a
    /// directive records the hearing, books the next one and queues notices.
    pub fn decide(
        &mut self,
        actor: &str,
        case_id: &str,
        request: &DecisionRequest,
    ) -> Result<DecisionOutcome, EngineError> {
        self.timed("decision", |d| {
            request.validate()?;
            if let Some(id) = &request.case_id {
                if id != case_id {
                    return Err(EngineError::InvalidDecision(format!(
                        "body names case {id} but the request is for {case_id}"
                    )));
                }
            }
            let date = request.decision_date.unwrap_or_else(|| d.today());
            let Self {
                store,
                scorer,
                capacity,
                calendar,
                outbox,
                adapter,
                recipients,
                learning,
                ..
            } = d;
            store.audited(
                actor,
                "decision",
                |s| -> Result<DecisionOutcome, EngineError> {
                    let mut outcome = DecisionOutcome {
                        case_id: case_id.to_string(),
                        decision_date: date,
                        disposal: None,
                        next_hearing: None,
                        notification_ids: Vec::new(),
                    };
                    match request.action {
                        DecisionAction::Dispose => {
                            let code = request.outcome_code.as_deref().unwrap_or("disposed");
                            outcome.disposal = Some(s.dispose_case(case_id, date, code, &*scorer)?);
                            learn(s, scorer, *learning)?;
                        }
                        DecisionAction::NextHearingAfterDays => {
                            let after = request.after_days.expect("validated");
                            let case =
                                s.record_hearing(case_id, HearingEntry::directed(date, after))?;
                            let weight = scorer.score(&case, date)?.effective_weight;
                            let mut ledger = s.ledger().clone();
                            let next = schedule_directive(
                                &case,
                                date,
                                after,
                                weight,
                                calendar,
                                capacity,
                                &mut ledger,
                            )?;
                            s.save_assignments(vec![next.clone()])?;
                            let queued =
                                outbox.enqueue_batch(s, std::slice::from_ref(&next), recipients)?;
                            outcome.notification_ids =
                                queued.iter().map(|n| n.notification_id).collect();
                            deliver(s, outbox, adapter.as_mut())?;
                            outcome.next_hearing = Some(next);
                        }
                    }
                    Ok(outcome)
                },
            )
        })
    }

    /// Ranks every pending case without a booked hearing and allocates
    /// hearing days from `as_of` onwards, then queues and sends notices.
    pub fn run_schedule(
        &mut self,
        actor: &str,
        as_of: NaiveDate,
    ) -> Result<ScheduleRun, EngineError> {
        self.timed("schedule_run", |d| {
            let candidates: Vec<&CaseRecord> = d
                .store
                .pending()
                .filter(|c| c.filing_date <= as_of && !d.store.has_outstanding(&c.case_id))
                .collect();
            let start = Instant::now();
            let ranking = rank_cases(&candidates, as_of, &d.scorer);
            let requests: Vec<AllocationRequest> = ranking
                .ranked
                .iter()
                .map(|r| {
                    let case = d
                        .store
                        .get_pending(&r.case_id)
                        .expect("ranked from pending");
                    AllocationRequest {
                        case_id: r.case_id.clone(),
                        judge_id: case.judge_id.clone(),
                        pool: classify_pool(case).expect("pending case has a pool"),
                        weight: r.effective_weight,
                    }
                })
                .collect();
            let rejected = ranking
                .rejected
                .iter()
                .map(|(id, e)| (id.clone(), e.to_string()))
                .collect();
            d.perf.record("rank", start.elapsed());

            let start = Instant::now();
            let mut ledger = d.store.ledger().clone();
            let allocation = match d.window_days {
                Some(w) => allocate_within(
                    &requests,
                    as_of,
                    as_of + Days::new(w as u64),
                    &d.calendar,
                    &d.capacity,
                    &mut ledger,
                )?,
                None => crate::scheduler::Allocation {
                    assigned: allocate_hearings(
                        &requests,
                        as_of,
                        &d.calendar,
                        &d.capacity,
                        &mut ledger,
                    )?,
                    deferred: Vec::new(),
                },
            };
            d.perf.record("allocate", start.elapsed());

            let Self {
                store,
                outbox,
                adapter,
                recipients,
                perf,
                ..
            } = d;
            store.audited(
                actor,
                "schedule_run",
                |s| -> Result<ScheduleRun, EngineError> {
                    s.save_assignments(allocation.assigned.clone())?;
                    let start = Instant::now();
                    let queued = outbox.enqueue_batch(s, &allocation.assigned, recipients)?;
                    let delivery = deliver(s, outbox, adapter.as_mut())?;
                    perf.record("notify", start.elapsed());
                    Ok(ScheduleRun {
                        as_of,
                        assigned: allocation.assigned,
                        deferred: allocation.deferred,
                        rejected,
                        notifications_queued: queued.len(),
                        delivery,
                    })
                },
            )
        })
    }

    /// Outstanding hearings booked for `date`, in booking order.
    pub fn hearings_due(&self, date: NaiveDate) -> Vec<HearingAssignment> {
        self.store
            .assignments_on(date)
            .filter(|a| {
                self.store
                    .outstanding(&a.case_id)
                    .is_some_and(|o| o.date == date)
            })
            .cloned()
            .collect()
    }

    /// Queues notices for assignments that were already booked. Notices
    /// already recorded are not repeated.
    pub fn notify_assignments(
        &mut self,
        actor: &str,
        assignments: &[HearingAssignment],
    ) -> Result<Vec<Notification>, EngineError> {
        self.timed("notify", |d| {
            let Self {
                store,
                outbox,
                recipients,
                ..
            } = d;
            store.audited(actor, "notify", |s| {
                Ok(outbox.enqueue_batch(s, assignments, recipients)?)
            })
        })
    }

    /// Sends every queued notice through the configured adapter.
    pub fn drain_notifications(&mut self, actor: &str) -> Result<DeliveryReport, EngineError> {
        self.timed("drain", |d| {
            let Self {
                store,
                outbox,
                adapter,
                ..
            } = d;
            store.audited(actor, "drain", |s| deliver(s, outbox, adapter.as_mut()))
        })
    }

    pub fn file_appeal(
        &mut self,
        actor: &str,
        disposed_case_id: &str,
        draft: AppealDraft,
        higher_court_id: &str,
    ) -> Result<AppealFiled, EngineError> {
        self.timed("appeal", |d| {
            let Self {
                store,
                outbox,
                adapter,
                judges,
                ..
            } = d;
            let filed =
                store.audited(actor, "appeal", |s| -> Result<AppealFiled, EngineError> {
                    let case = s.file_appeal(disposed_case_id, draft)?;
                    let notification = outbox.appeal_notice(s, &case, higher_court_id)?;
                    deliver(s, outbox, adapter.as_mut())?;
                    let notification = outbox
                        .get(notification.notification_id)
                        .expect("just queued")
                        .clone();
                    Ok(AppealFiled { case, notification })
                })?;
            judges.insert(filed.case.judge_id.clone());
            Ok(filed)
        })
    }

    /// Adds court holidays and judge leave. Outstanding hearings on a day
    /// that is no longer a sitting day are moved to the earliest open day
    /// after it.
    pub fn update_calendar(
        &mut self,
        actor: &str,
        holidays: &[NaiveDate],
        leaves: &[(String, NaiveDate)],
    ) -> Result<CalendarUpdate, EngineError> {
        self.timed("calendar_update", |d| {
            let holidays_added: Vec<NaiveDate> = holidays
                .iter()
                .copied()
                .filter(|h| d.calendar.add_holiday(*h))
                .collect();
            let leaves_added: Vec<(String, NaiveDate)> = leaves
                .iter()
                .filter(|(j, day)| d.calendar.add_leave(j, *day))
                .cloned()
                .collect();
            for (j, _) in &leaves_added {
                d.judges.insert(j.clone());
            }
            let mut displaced: Vec<HearingAssignment> = d
                .store
                .pending()
                .filter_map(|c| d.store.outstanding(&c.case_id))
                .filter(|a| !is_sitting_day(a.date, &a.judge_id, &d.calendar))
                .cloned()
                .collect();
            displaced.sort_by(|a, b| {
                (a.date, a.rank_at_assignment, &a.case_id).cmp(&(
                    b.date,
                    b.rank_at_assignment,
                    &b.case_id,
                ))
            });

            let Self {
                store,
                calendar,
                capacity,
                outbox,
                adapter,
                recipients,
                ..
            } = d;
            store.audited(
                actor,
                "calendar_update",
                |s| -> Result<CalendarUpdate, EngineError> {
                    s.note(
                        "calendar_update",
                        AuditOp::CalendarChange {
                            holidays: holidays_added.clone(),
                            leaves: leaves_added.clone(),
                        },
                    )?;
                    let mut ledger = s.ledger().clone();
                    let mut rescheduled = Vec::new();
                    for old in displaced {
                        ledger.release(&old.judge_id, old.date, old.pool);
                        let req = AllocationRequest {
                            case_id: old.case_id.clone(),
                            judge_id: old.judge_id.clone(),
                            pool: old.pool,
                            weight: old.weight_snapshot,
                        };
                        let mut placed =
                            allocate_hearings(&[req], old.date, calendar, capacity, &mut ledger)?;
                        let mut moved = placed.remove(0);
                        moved.rank_at_assignment = old.rank_at_assignment;
                        rescheduled.push(moved);
                    }
                    s.save_assignments(rescheduled.clone())?;
                    outbox.enqueue_batch(s, &rescheduled, recipients)?;
                    deliver(s, outbox, adapter.as_mut())?;
                    Ok(CalendarUpdate {
                        holidays_added,
                        leaves_added,
                        rescheduled,
                    })
                },
            )
        })
    }

    pub fn set_section_weights(
        &mut self,
        actor: &str,
        table: SectionWeightTable,
    ) -> Result<(), EngineError> {
        self.timed("section_weights", |d| {
            d.store.audited(actor, "section_weights", |s| {
                s.note(
                    "section_weights",
                    AuditOp::SectionWeights {
                        entries: table.entries().clone(),
                        default_weight: table.default_weight(),
                    },
                )
            })?;
            d.scorer.sections = table;
            Ok(())
        })
    }

    pub fn override_priority(
        &mut self,
        actor: &str,
        case_id: &str,
        level: PriorityLevel,
    ) -> Result<CaseRecord, EngineError> {
        self.timed("priority_override", |d| {
            Ok(d.store.audited(actor, "priority_override", |s| {
                s.override_priority(case_id, level)
            })?)
        })
    }

    /// The day's hearings for one judge, ordered by current effective
    /// weight, with per-pool counts of the rows shown.
    pub fn docket(&mut self, judge_id: &str, date: NaiveDate) -> Result<DocketView, EngineError> {
        self.timed("docket_view", |d| {
            if !d.judges.contains(judge_id) {
                return Err(EngineError::UnknownJudge(judge_id.to_string()));
            }
            let cases: Vec<&CaseRecord> = d
                .store
                .assignments_on(date)
                .filter(|a| a.judge_id == judge_id)
                .filter_map(|a| d.store.get_pending(&a.case_id))
                .collect();
            let ranking = rank_cases(&cases, date, &d.scorer);
            let mut counts = DailyCounts::default();
            let rows = ranking
                .ranked
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let case = d
                        .store
                        .get_pending(&r.case_id)
                        .expect("ranked from pending");
                    let pool = d
                        .store
                        .assignments_on(date)
                        .find(|a| a.case_id == r.case_id)
                        .map_or(Pool::Old, |a| a.pool);
                    counts.add(pool);
                    DocketRow {
                        rank: i as u32 + 1,
                        case_id: r.case_id.clone(),
                        case_type: case.case_type,
                        pool,
                        weight: r.effective_weight,
                        sections: case.legal_sections.clone(),
                        age_days: case_age_days(case, date).unwrap_or(0),
                        hearing_count: case.hearing_count(),
                    }
                })
                .collect();
            Ok(DocketView {
                judge_id: judge_id.to_string(),
                date,
                version: d.store.last_sequence(),
                sitting: is_sitting_day(date, judge_id, &d.calendar),
                rows,
                counts,
            })
        })
    }

    pub fn metrics(&self, as_of: NaiveDate) -> MetricsReport {
        let mut histogram: Vec<AgeBucket> = AGE_BUCKET_EDGES
            .iter()
            .enumerate()
            .map(|(i, &min)| AgeBucket {
                min_days: min,
                max_days: AGE_BUCKET_EDGES.get(i + 1).copied(),
                count: 0,
            })
            .collect();
        for case in self.store.pending() {
            let age = case_age_days(case, as_of).unwrap_or(0);
            let idx = AGE_BUCKET_EDGES
                .iter()
                .rposition(|&e| age >= e)
                .unwrap_or(0);
            histogram[idx].count += 1;
        }
        MetricsReport {
            as_of,
            operations: self.perf.report(),
            scheduled_per_day: self.store.ledger().totals_by_date(),
            pending_age_histogram: histogram,
            pending_cases: self.store.pending_count(),
            disposed_cases: self.store.disposed_count(),
            notifications: NotificationCounts {
                queued: self.outbox.queued_count(),
                delivered: self.outbox.count(NotificationStatus::Delivered),
                failed: self.outbox.count(NotificationStatus::Failed),
            },
            model_coefficients: self.scorer.model.coefficients(),
            model_samples_seen: self.scorer.model.samples_seen(),
        }
    }

    /// The channel new notices are sent through.
    pub fn channel(&self) -> Channel {
        self.adapter.channel()
    }
}

/// Folds queued disposal samples into the model, auditing each change.
fn learn(store: &mut DocketStore, scorer: &mut Scorer, enabled: bool) -> Result<(), StoreError> {
    for sample in store.take_outcome_samples() {
        if !enabled {
            continue;
        }
        let prior = scorer.model.coefficients();
        scorer.model = update_coefficients(&scorer.model, &sample);
        store.note(
            "model_update",
            AuditOp::ModelUpdate {
                prior,
                updated: scorer.model.coefficients(),
            },
        )?;
    }
    Ok(())
}

/// Drains the outbox; an unavailable adapter leaves notices queued.
fn deliver(
    store: &mut DocketStore,
    outbox: &mut Outbox,
    adapter: &mut (dyn ChannelAdapter + Send),
) -> Result<DeliveryReport, EngineError> {
    match outbox.drain(store, adapter) {
        Ok(r) => Ok(r),
        Err(crate::error::NotifyError::AdapterUnavailable(_)) => Ok(DeliveryReport::default()),
        Err(e) => Err(e.into()),
    }
}
