//! Notification outbox: hearing-date notices recorded at most once per
//! (case, date, role) and delivered through pluggable channel adapters.

use std::collections::HashMap;
use std::fmt;
use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::case::CaseRecord;
use crate::error::NotifyError;
use crate::scheduler::HearingAssignment;
use crate::store::DocketStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RecipientRole {
    Judge,
    Lawyer,
    Litigant,
}

impl RecipientRole {
    pub const ALL: [RecipientRole; 3] = [Self::Judge, Self::Lawyer, Self::Litigant];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Judge => "Judge",
            Self::Lawyer => "Lawyer",
            Self::Litigant => "Litigant",
        }
    }
}

impl fmt::Display for RecipientRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    Console,
    File,
    #[serde(rename = "SMS")]
    Sms,
    Email,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NotificationStatus {
    Queued,
    Delivered,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Notification {
    pub notification_id: u64,
    pub case_id: String,
    pub recipient_role: RecipientRole,
    pub channel: Channel,
    pub hearing_date: NaiveDate,
    pub payload: String,
    pub idempotency_key: String,
    pub status: NotificationStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_reason: Option<String>,
    #[serde(default)]
    pub retried: bool,
}

/// Hex SHA-256 of `case_id|date|role`.
pub fn idempotency_key(case_id: &str, date: NaiveDate, role: RecipientRole) -> String {
    hex::encode(Sha256::digest(
        format!("{case_id}|{date}|{role}").as_bytes(),
    ))
}

fn appeal_key(case_id: &str, date: NaiveDate, court: &str) -> String {
    hex::encode(Sha256::digest(
        format!("appeal|{case_id}|{date}|{court}").as_bytes(),
    ))
}

/// Why a single delivery attempt failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryFailure(pub String);

pub trait ChannelAdapter {
    fn channel(&self) -> Channel;

    /// False when the channel cannot be used at all; draining then leaves
    /// every notification untouched.
    fn is_available(&self) -> bool {
        true
    }

    fn deliver(&mut self, notification: &Notification) -> Result<(), DeliveryFailure>;
}

/// Writes one line per notification to any writer (stdout by default).
pub struct ConsoleAdapter {
    out: Box<dyn Write + Send>,
}

impl ConsoleAdapter {
    pub fn stdout() -> Self {
        Self::new(Box::new(io::stdout()))
    }

    pub fn new(out: Box<dyn Write + Send>) -> Self {
        Self { out }
    }

    /// Accepts everything and prints nothing.
    pub fn silent() -> Self {
        Self::new(Box::new(io::sink()))
    }
}

impl ChannelAdapter for ConsoleAdapter {
    fn channel(&self) -> Channel {
        Channel::Console
    }

    fn deliver(&mut self, n: &Notification) -> Result<(), DeliveryFailure> {
        writeln!(
            self.out,
            "[{}] {} -> {}: {}",
            n.hearing_date, n.case_id, n.recipient_role, n.payload
        )
        .map_err(|e| DeliveryFailure(e.to_string()))
    }
}

/// Appends `DATE case_id role payload` lines to `outbox.log`.
#[derive(Debug, Clone)]
pub struct FileAdapter {
    path: PathBuf,
}

impl FileAdapter {
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        Self {
            path: dir.as_ref().join("outbox.log"),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl ChannelAdapter for FileAdapter {
    fn channel(&self) -> Channel {
        Channel::File
    }

    fn deliver(&mut self, n: &Notification) -> Result<(), DeliveryFailure> {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| DeliveryFailure(e.to_string()))?;
        writeln!(
            file,
            "{} {} {} {}",
            n.hearing_date, n.case_id, n.recipient_role, n.payload
        )
        .map_err(|e| DeliveryFailure(e.to_string()))
    }
}

/// Placeholder for an SMS gateway; never available.
#[derive(Debug, Default, Clone, Copy)]
pub struct SmsAdapter;

impl ChannelAdapter for SmsAdapter {
    fn channel(&self) -> Channel {
        Channel::Sms
    }

    fn is_available(&self) -> bool {
        false
    }

    fn deliver(&mut self, _: &Notification) -> Result<(), DeliveryFailure> {
        Err(DeliveryFailure("no SMS gateway configured".into()))
    }
}

/// Placeholder for an email gateway; never available.
#[derive(Debug, Default, Clone, Copy)]
pub struct EmailAdapter;

impl ChannelAdapter for EmailAdapter {
    fn channel(&self) -> Channel {
        Channel::Email
    }

    fn is_available(&self) -> bool {
        false
    }

    fn deliver(&mut self, _: &Notification) -> Result<(), DeliveryFailure> {
        Err(DeliveryFailure("no email gateway configured".into()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeliveryReport {
    pub delivered: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Outbox {
    notifications: Vec<Notification>,
    active: HashMap<String, u64>,
    queued: Vec<u64>,
    default_channel: Option<Channel>,
}

impl Outbox {
    pub fn new(default_channel: Channel) -> Self {
        Self {
            default_channel: Some(default_channel),
            ..Self::default()
        }
    }

    /// Rebuilds the outbox from the store's outbox stream.
    pub fn load(store: &DocketStore, default_channel: Channel) -> Result<Self, NotifyError> {
        let mut outbox = Self::new(default_channel);
        for line in store.outbox_records()? {
            let n: Notification = serde_json::from_str(&line)
                .map_err(|e| NotifyError::StorageFailure(format!("outbox record: {e}")))?;
            let idx = (n.notification_id - 1) as usize;
            match idx.cmp(&outbox.notifications.len()) {
                std::cmp::Ordering::Less => outbox.notifications[idx] = n,
                std::cmp::Ordering::Equal => outbox.notifications.push(n),
                std::cmp::Ordering::Greater => {
                    return Err(NotifyError::StorageFailure(format!(
                        "outbox record {} out of order",
                        n.notification_id
                    )))
                }
            }
        }
        for n in &outbox.notifications {
            if n.status != NotificationStatus::Failed {
                outbox
                    .active
                    .insert(n.idempotency_key.clone(), n.notification_id);
            }
            if n.status == NotificationStatus::Queued {
                outbox.queued.push(n.notification_id);
            }
        }
        Ok(outbox)
    }

    fn channel(&self) -> Channel {
        self.default_channel.unwrap_or(Channel::Console)
    }

    pub fn get(&self, id: u64) -> Option<&Notification> {
        id.checked_sub(1)
            .and_then(|i| self.notifications.get(i as usize))
    }

    pub fn all(&self) -> &[Notification] {
        &self.notifications
    }

    pub fn len(&self) -> usize {
        self.notifications.len()
    }

    pub fn is_empty(&self) -> bool {
        self.notifications.is_empty()
    }

    pub fn queued_count(&self) -> usize {
        self.queued.len()
    }

    pub fn count(&self, status: NotificationStatus) -> usize {
        self.notifications
            .iter()
            .filter(|n| n.status == status)
            .count()
    }

    fn persist(
        &self,
        store: &mut DocketStore,
        action: &str,
        ids: &[u64],
    ) -> Result<(), NotifyError> {
        if ids.is_empty() {
            return Ok(());
        }
        let lines = ids
            .iter()
            .map(|&id| serde_json::to_string(self.get(id).expect("id from this outbox")))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| NotifyError::StorageFailure(e.to_string()))?;
        store.append_outbox(action, &lines, ids.to_vec())?;
        Ok(())
    }

    fn push(
        &mut self,
        case_id: &str,
        role: RecipientRole,
        date: NaiveDate,
        payload: String,
        key: String,
    ) -> u64 {
        let id = self.notifications.len() as u64 + 1;
        self.active.insert(key.clone(), id);
        self.queued.push(id);
        self.notifications.push(Notification {
            notification_id: id,
            case_id: case_id.to_string(),
            recipient_role: role,
            channel: self.channel(),
            hearing_date: date,
            payload,
            idempotency_key: key,
            status: NotificationStatus::Queued,
            failure_reason: None,
            retried: false,
        });
        id
    }

    /// Queues one notice per role for an assignment. Roles that already
    /// have an active notice for the same case and date are skipped.
    pub fn enqueue_for_assignment(
        &mut self,
        store: &mut DocketStore,
        assignment: &HearingAssignment,
        recipients: &[RecipientRole],
    ) -> Result<Vec<Notification>, NotifyError> {
        self.enqueue_batch(store, std::slice::from_ref(assignment), recipients)
    }

    /// [`Outbox::enqueue_for_assignment`] over many assignments, persisted
    /// as one batch.
    pub fn enqueue_batch(
        &mut self,
        store: &mut DocketStore,
        assignments: &[HearingAssignment],
        recipients: &[RecipientRole],
    ) -> Result<Vec<Notification>, NotifyError> {
        let mut ids = Vec::new();
        for a in assignments {
            for &role in recipients {
                let key = idempotency_key(&a.case_id, a.date, role);
                if self.active.contains_key(&key) {
                    continue;
                }
                let payload = format!(
                    "Case {} is listed for hearing on {} before judge {}",
                    a.case_id, a.date, a.judge_id
                );
                ids.push(self.push(&a.case_id, role, a.date, payload, key));
            }
        }
        self.persist(store, "enqueue_notifications", &ids)?;
        Ok(ids
            .iter()
            .map(|&id| self.get(id).expect("just pushed").clone())
            .collect())
    }

    /// Notice to the higher court that an appeal has been filed. A repeat
    /// call returns the existing notice without recording a new one.
    pub fn appeal_notice(
        &mut self,
        store: &mut DocketStore,
        appeal: &CaseRecord,
        higher_court_id: &str,
    ) -> Result<Notification, NotifyError> {
        let origin = appeal
            .appeal_of
            .as_deref()
            .ok_or_else(|| NotifyError::NotAnAppeal(appeal.case_id.clone()))?;
        let key = appeal_key(&appeal.case_id, appeal.filing_date, higher_court_id);
        if let Some(&id) = self.active.get(&key) {
            return Ok(self.get(id).expect("active id exists").clone());
        }
        let payload = format!(
            "Appeal {} of case {} filed on {} before higher court {}",
            appeal.case_id, origin, appeal.filing_date, higher_court_id
        );
        let id = self.push(
            &appeal.case_id,
            RecipientRole::Judge,
            appeal.filing_date,
            payload,
            key,
        );
        self.persist(store, "appeal_notice", &[id])?;
        Ok(self.get(id).expect("just pushed").clone())
    }

    /// Attempts delivery of every queued notification.
    pub fn drain(
        &mut self,
        store: &mut DocketStore,
        adapter: &mut dyn ChannelAdapter,
    ) -> Result<DeliveryReport, NotifyError> {
        if !adapter.is_available() {
            return Err(NotifyError::AdapterUnavailable(format!(
                "{:?}",
                adapter.channel()
            )));
        }
        let mut report = DeliveryReport::default();
        let mut touched = Vec::new();
        let channel = adapter.channel();
        for id in std::mem::take(&mut self.queued) {
            let n = &mut self.notifications[(id - 1) as usize];
            n.channel = channel;
            match adapter.deliver(n) {
                Ok(()) => {
                    n.status = NotificationStatus::Delivered;
                    report.delivered += 1;
                }
                Err(DeliveryFailure(reason)) => {
                    n.status = NotificationStatus::Failed;
                    n.failure_reason = Some(reason);
                    self.active.remove(&n.idempotency_key);
                    report.failed += 1;
                }
            }
            touched.push(n.notification_id);
        }
        self.persist(store, "drain_outbox", &touched)?;
        Ok(report)
    }

    /// Re-queues a failed notification. Allowed once per notification.
    pub fn retry(&mut self, store: &mut DocketStore, id: u64) -> Result<Notification, NotifyError> {
        let n = self.get(id).ok_or(NotifyError::UnknownNotification(id))?;
        if n.status != NotificationStatus::Failed {
            return Err(NotifyError::NotFailed(id));
        }
        if n.retried {
            return Err(NotifyError::RetryExhausted(id));
        }
        if self.active.contains_key(&n.idempotency_key) {
            return Err(NotifyError::DuplicateActive(id));
        }
        let key = n.idempotency_key.clone();
        let n = &mut self.notifications[(id - 1) as usize];
        n.status = NotificationStatus::Queued;
        n.failure_reason = None;
        n.retried = true;
        self.active.insert(key, id);
        self.queued.push(id);
        self.persist(store, "retry_notification", &[id])?;
        Ok(self.get(id).expect("exists").clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case::Pool;
    use crate::fixtures::{date, sample_cases};
    use crate::rank::Scorer;
    use crate::store::AppealDraft;
    use proptest::prelude::*;
    use std::collections::HashSet;

    struct Broken;

    impl ChannelAdapter for Broken {
        fn channel(&self) -> Channel {
            Channel::Console
        }

        fn deliver(&mut self, _: &Notification) -> Result<(), DeliveryFailure> {
            Err(DeliveryFailure("line down".into()))
        }
    }

    fn assignment(case_id: &str, d: NaiveDate) -> HearingAssignment {
        HearingAssignment {
            case_id: case_id.into(),
            judge_id: "J1".into(),
            date: d,
            pool: Pool::Old,
            rank_at_assignment: 3,
            weight_snapshot: 0.54,
        }
    }

    fn setup() -> (DocketStore, Outbox) {
        let mut store = DocketStore::in_memory();
        for c in sample_cases() {
            store.put_case(c).unwrap();
        }
        (store, Outbox::new(Channel::Console))
    }

    #[test]
    fn one_notice_per_role_and_no_duplicates() {
        let (mut store, mut outbox) = setup();
        let a = assignment("003", date(2025, 7, 14));
        let first = outbox
            .enqueue_for_assignment(&mut store, &a, &RecipientRole::ALL)
            .unwrap();
        assert_eq!(first.len(), 3);
        assert!(first.iter().all(|n| n.status == NotificationStatus::Queued));
        assert!(first
            .iter()
            .all(|n| n.payload.contains("2025-07-14") && n.payload.contains("003")));
        assert!(outbox
            .enqueue_for_assignment(&mut store, &a, &RecipientRole::ALL)
            .unwrap()
            .is_empty());
        assert!(outbox
            .enqueue_for_assignment(&mut store, &a, &[])
            .unwrap()
            .is_empty());
    }

    #[test]
    fn key_is_sha256_of_pipe_joined_fields() {
        let expected = hex::encode(Sha256::digest(b"003|2025-07-14|Lawyer"));
        assert_eq!(
            idempotency_key("003", date(2025, 7, 14), RecipientRole::Lawyer),
            expected
        );
        assert_ne!(
            idempotency_key("003", date(2025, 7, 14), RecipientRole::Judge),
            idempotency_key("003", date(2025, 7, 15), RecipientRole::Judge)
        );
    }

    #[test]
    fn drain_outcomes() {
        let (mut store, mut outbox) = setup();
        assert_eq!(
            outbox
                .drain(&mut store, &mut ConsoleAdapter::silent())
                .unwrap(),
            DeliveryReport::default()
        );
        let a = assignment("003", date(2025, 7, 14));
        outbox
            .enqueue_for_assignment(&mut store, &a, &RecipientRole::ALL)
            .unwrap();
        let report = outbox
            .drain(&mut store, &mut ConsoleAdapter::silent())
            .unwrap();
        assert_eq!(
            report,
            DeliveryReport {
                delivered: 3,
                failed: 0
            }
        );

        let b = assignment("004", date(2025, 7, 15));
        outbox
            .enqueue_for_assignment(&mut store, &b, &RecipientRole::ALL)
            .unwrap();
        let report = outbox.drain(&mut store, &mut Broken).unwrap();
        assert_eq!(
            report,
            DeliveryReport {
                delivered: 0,
                failed: 3
            }
        );
        assert_eq!(outbox.count(NotificationStatus::Failed), 3);
    }

    #[test]
    fn unavailable_adapter_leaves_statuses() {
        let (mut store, mut outbox) = setup();
        outbox
            .enqueue_for_assignment(
                &mut store,
                &assignment("001", date(2025, 7, 2)),
                &RecipientRole::ALL,
            )
            .unwrap();
        for adapter in [
            &mut SmsAdapter as &mut dyn ChannelAdapter,
            &mut EmailAdapter,
        ] {
            assert!(matches!(
                outbox.drain(&mut store, adapter),
                Err(NotifyError::AdapterUnavailable(_))
            ));
        }
        assert_eq!(outbox.count(NotificationStatus::Queued), 3);
    }

    #[test]
    fn failed_notice_can_be_retried_once() {
        let (mut store, mut outbox) = setup();
        let a = assignment("002", date(2025, 7, 3));
        let n = outbox
            .enqueue_for_assignment(&mut store, &a, &[RecipientRole::Litigant])
            .unwrap();
        let id = n[0].notification_id;
        assert!(matches!(
            outbox.retry(&mut store, id),
            Err(NotifyError::NotFailed(_))
        ));
        outbox.drain(&mut store, &mut Broken).unwrap();
        outbox.retry(&mut store, id).unwrap();
        outbox.drain(&mut store, &mut Broken).unwrap();
        assert!(matches!(
            outbox.retry(&mut store, id),
            Err(NotifyError::RetryExhausted(_))
        ));
        assert!(matches!(
            outbox.retry(&mut store, 99),
            Err(NotifyError::UnknownNotification(99))
        ));
        // a failed notice no longer blocks a fresh one for the same key
        assert_eq!(
            outbox
                .enqueue_for_assignment(&mut store, &a, &[RecipientRole::Litigant])
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn file_adapter_writes_lines() {
        let dir = tempfile::tempdir().unwrap();
        let (mut store, mut outbox) = setup();
        outbox
            .enqueue_for_assignment(
                &mut store,
                &assignment("005", date(2025, 7, 8)),
                &[RecipientRole::Judge],
            )
            .unwrap();
        let mut adapter = FileAdapter::in_dir(dir.path());
        outbox.drain(&mut store, &mut adapter).unwrap();
        let text = std::fs::read_to_string(adapter.path()).unwrap();
        assert!(text.starts_with("2025-07-08 005 Judge Case 005"));
        assert_eq!(outbox.all()[0].channel, Channel::File);
    }

    #[test]
    fn appeal_notice_contract() {
        let (mut store, mut outbox) = setup();
        store
            .dispose_case("001", date(2025, 7, 15), "convicted", &Scorer::default())
            .unwrap();
        let appeal = store
            .file_appeal(
                "001",
                AppealDraft {
                    case_id: "A-001".into(),
                    filing_date: date(2025, 8, 1),
                    judge_id: "HC-J1".into(),
                    created_by: crate::case::CreatedBy::AdvocateOnRecord,
                    case_type: None,
                    severity: None,
                    priority_level: None,
                    legal_sections: None,
                },
            )
            .unwrap();
        let n = outbox.appeal_notice(&mut store, &appeal, "HC-01").unwrap();
        assert!(n.payload.contains("001") && n.payload.contains("HC-01"));
        assert!(n.payload.contains("2025-08-01"));
        let again = outbox.appeal_notice(&mut store, &appeal, "HC-01").unwrap();
        assert_eq!(again.notification_id, n.notification_id);
        assert_eq!(outbox.len(), 1);
        let plain = store.get_pending("002").unwrap().clone();
        assert!(matches!(
            outbox.appeal_notice(&mut store, &plain, "HC-01"),
            Err(NotifyError::NotAnAppeal(_))
        ));
    }

    #[test]
    fn outbox_reloads_from_store() {
        let dir = tempfile::tempdir().unwrap();
        let open = || {
            DocketStore::open(
                Box::new(crate::journal::NdjsonBackend::open(dir.path()).unwrap()),
                std::sync::Arc::new(crate::clock::SystemClock),
            )
            .unwrap()
        };
        let mut store = open();
        for c in sample_cases() {
            store.put_case(c).unwrap();
        }
        let mut outbox = Outbox::new(Channel::Console);
        outbox
            .enqueue_for_assignment(
                &mut store,
                &assignment("003", date(2025, 7, 14)),
                &RecipientRole::ALL,
            )
            .unwrap();
        outbox
            .drain(&mut store, &mut ConsoleAdapter::silent())
            .unwrap();
        drop(store);
        let mut store = open();
        let mut reloaded = Outbox::load(&store, Channel::Console).unwrap();
        assert_eq!(reloaded.all(), outbox.all());
        let again = reloaded
            .enqueue_for_assignment(
                &mut store,
                &assignment("003", date(2025, 7, 14)),
                &RecipientRole::ALL,
            )
            .unwrap();
        assert!(again.is_empty());
    }

    proptest! {
        #[test]
        fn at_most_one_active_notice_per_key(
            ops in proptest::collection::vec((0usize..3, 0i64..3, 0usize..4), 1..40)
        ) {
            let (mut store, mut outbox) = setup();
            let ids = ["001", "002", "003"];
            for (case, day, action) in ops {
                let a = assignment(ids[case], date(2025, 7, 1) + chrono::Duration::days(day));
                match action {
                    0 | 1 => { outbox.enqueue_for_assignment(&mut store, &a, &RecipientRole::ALL).unwrap(); }
                    2 => { outbox.drain(&mut store, &mut Broken).unwrap(); }
                    _ => {
                        let failed: Vec<u64> = outbox.all().iter()
                            .filter(|n| n.status == NotificationStatus::Failed)
                            .map(|n| n.notification_id).collect();
                        for id in failed { let _ = outbox.retry(&mut store, id); }
                    }
                }
                let mut seen = HashSet::new();
                for n in outbox.all().iter().filter(|n| n.status != NotificationStatus::Failed) {
                    prop_assert!(seen.insert(n.idempotency_key.clone()));
                }
            }
        }
    }
}
