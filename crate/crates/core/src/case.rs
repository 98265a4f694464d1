//! Case domain types and the derived classifications every other module
//! relies on: case age and the fresh/old pool split.
//!
//! The canonical serialized form of a [`CaseRecord`] is a JSON object with
//! `YYYY-MM-DD` dates and `"STATUTE:SECTION"` strings for legal sections.
//! Store files, the HTTP API and the simulator all use this exact form.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CaseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseType {
    Criminal,
    Civil,
    Family,
}

impl CaseType {
    pub const ALL: [CaseType; 3] = [CaseType::Criminal, CaseType::Civil, CaseType::Family];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Severity {
    High,
    Medium,
    Low,
}

impl Severity {
    pub const ALL: [Severity; 3] = [Severity::High, Severity::Medium, Severity::Low];
}

/// Priority level supplied at case entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PriorityLevel {
    Urgent,
    Medium,
    Ordinary,
}

impl PriorityLevel {
    pub const ALL: [PriorityLevel; 3] = [
        PriorityLevel::Urgent,
        PriorityLevel::Medium,
        PriorityLevel::Ordinary,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseStatus {
    Pending,
    Disposed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CreatedBy {
    Registrar,
    AdvocateOnRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HearingOutcome {
    Adjourned,
    NextHearingDirected,
    Disposed,
}

/// Capacity pool a pending case competes in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pool {
    Fresh,
    Old,
}

impl Pool {
    pub fn other(self) -> Pool {
        match self {
            Pool::Fresh => Pool::Old,
            Pool::Old => Pool::Fresh,
        }
    }
}

/// A statute/section pair, canonically rendered as `STATUTE:SECTION` in
/// upper case.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LegalSectionRef {
    statute: String,
    section: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid legal section reference {0:?}: expected STATUTE:SECTION")]
pub struct SectionParseError(pub String);

impl LegalSectionRef {
    pub fn new(statute: &str, section: &str) -> Result<Self, SectionParseError> {
        let statute = statute.trim().to_uppercase();
        let section = section.trim().to_uppercase();
        if statute.is_empty() || section.is_empty() {
            return Err(SectionParseError(format!("{statute}:{section}")));
        }
        Ok(Self { statute, section })
    }

    pub fn statute(&self) -> &str {
        &self.statute
    }

    pub fn section(&self) -> &str {
        &self.section
    }

    pub fn canonical(&self) -> String {
        format!("{}:{}", self.statute, self.section)
    }
}

impl fmt::Display for LegalSectionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.statute, self.section)
    }
}

impl FromStr for LegalSectionRef {
    type Err = SectionParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (statute, section) = s
            .split_once(':')
            .ok_or_else(|| SectionParseError(s.to_string()))?;
        LegalSectionRef::new(statute, section).map_err(|_| SectionParseError(s.to_string()))
    }
}

impl Serialize for LegalSectionRef {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LegalSectionRef {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HearingEntry {
    pub date: NaiveDate,
    pub outcome: HearingOutcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directive_after_days: Option<u32>,
}

impl HearingEntry {
    pub fn adjourned(date: NaiveDate) -> Self {
        Self {
            date,
            outcome: HearingOutcome::Adjourned,
            directive_after_days: None,
        }
    }

    pub fn directed(date: NaiveDate, after_days: u32) -> Self {
        Self {
            date,
            outcome: HearingOutcome::NextHearingDirected,
            directive_after_days: Some(after_days),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub case_id: String,
    pub case_type: CaseType,
    pub filing_date: NaiveDate,
    pub severity: Severity,
    pub priority_level: PriorityLevel,
    #[serde(default)]
    pub legal_sections: Vec<LegalSectionRef>,
    #[serde(default)]
    pub hearings: Vec<HearingEntry>,
    #[serde(default = "default_status")]
    pub status: CaseStatus,
    #[serde(default)]
    pub appeal_of: Option<String>,
    pub judge_id: String,
    #[serde(default = "default_created_by")]
    pub created_by: CreatedBy,
}

fn default_status() -> CaseStatus {
    CaseStatus::Pending
}

fn default_created_by() -> CreatedBy {
    CreatedBy::Registrar
}

impl CaseRecord {
    /// Canonical JSON form.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("case records always serialize")
    }

    pub fn hearing_count(&self) -> usize {
        self.hearings.len()
    }

    pub fn last_hearing_date(&self) -> Option<NaiveDate> {
        self.hearings.last().map(|h| h.date)
    }

    /// Date of the last procedural activity: the last hearing, or the
    /// filing date when the case has never been heard.
    pub fn last_activity_date(&self) -> NaiveDate {
        self.last_hearing_date().unwrap_or(self.filing_date)
    }

    pub fn is_pending(&self) -> bool {
        self.status == CaseStatus::Pending
    }
}

/// A named violation found by [`validate_case`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "code")]
pub enum ValidationIssue {
    EmptyCaseId,
    EmptyJudgeId,
    /// Not fatal: the default section weight applies.
    EmptySections,
    FutureFilingDate {
        filing_date: NaiveDate,
        today: NaiveDate,
    },
    NonMonotoneHearings {
        index: usize,
    },
    HearingBeforeFiling {
        index: usize,
    },
    DirectiveMismatch {
        index: usize,
    },
    DanglingAppealRef {
        appeal_of: String,
    },
    DisposedWithoutRecord,
}

impl ValidationIssue {
    pub fn is_fatal(&self) -> bool {
        !matches!(self, ValidationIssue::EmptySections)
    }

    pub fn code(&self) -> &'static str {
        match self {
            ValidationIssue::EmptyCaseId => "EmptyCaseId",
            ValidationIssue::EmptyJudgeId => "EmptyJudgeId",
            ValidationIssue::EmptySections => "EmptySections",
            ValidationIssue::FutureFilingDate { .. } => "FutureFilingDate",
            ValidationIssue::NonMonotoneHearings { .. } => "NonMonotoneHearings",
            ValidationIssue::HearingBeforeFiling { .. } => "HearingBeforeFiling",
            ValidationIssue::DirectiveMismatch { .. } => "DirectiveMismatch",
            ValidationIssue::DanglingAppealRef { .. } => "DanglingAppealRef",
            ValidationIssue::DisposedWithoutRecord => "DisposedWithoutRecord",
        }
    }
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::FutureFilingDate { filing_date, today } => {
                write!(
                    f,
                    "FutureFilingDate: filed {filing_date}, reference date {today}"
                )
            }
            ValidationIssue::NonMonotoneHearings { index } => {
                write!(
                    f,
                    "NonMonotoneHearings: hearing #{index} is not after its predecessor"
                )
            }
            ValidationIssue::HearingBeforeFiling { index } => {
                write!(
                    f,
                    "HearingBeforeFiling: hearing #{index} precedes the filing date"
                )
            }
            ValidationIssue::DirectiveMismatch { index } => write!(
                f,
                "DirectiveMismatch: hearing #{index} directive_after_days must be a positive \
                 value exactly when the outcome is NextHearingDirected"
            ),
            ValidationIssue::DanglingAppealRef { appeal_of } => {
                write!(f, "DanglingAppealRef: {appeal_of} is not a disposed case")
            }
            other => f.write_str(other.code()),
        }
    }
}

/// Fatal validation failure: every violation found, fatal or not.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("case validation failed: {}", .issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct ValidationErrors {
    pub issues: Vec<ValidationIssue>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedCase {
    pub record: CaseRecord,
    pub warnings: Vec<ValidationIssue>,
}

/// External facts validation needs.
pub struct ValidationContext<'a> {
    pub today: NaiveDate,
    /// Returns true when the id names a case with a disposal record.
    pub is_disposed: &'a dyn Fn(&str) -> bool,
}

impl<'a> ValidationContext<'a> {
    pub fn standalone(today: NaiveDate) -> Self {
        Self {
            today,
            is_disposed: &|_| false,
        }
    }
}

/// Checks every [`CaseRecord`] invariant. The record is returned unchanged
/// when no fatal issue is found, so validation is idempotent.
pub fn validate_case(
    draft: CaseRecord,
    ctx: &ValidationContext<'_>,
) -> Result<ValidatedCase, ValidationErrors> {
    let mut issues = Vec::new();

    if draft.case_id.trim().is_empty() {
        issues.push(ValidationIssue::EmptyCaseId);
    }
    if draft.judge_id.trim().is_empty() {
        issues.push(ValidationIssue::EmptyJudgeId);
    }
    if draft.legal_sections.is_empty() {
        issues.push(ValidationIssue::EmptySections);
    }
    if draft.filing_date > ctx.today {
        issues.push(ValidationIssue::FutureFilingDate {
            filing_date: draft.filing_date,
            today: ctx.today,
        });
    }
    for (index, hearing) in draft.hearings.iter().enumerate() {
        if hearing.date < draft.filing_date {
            issues.push(ValidationIssue::HearingBeforeFiling { index });
        }
        if index > 0 && hearing.date <= draft.hearings[index - 1].date {
            issues.push(ValidationIssue::NonMonotoneHearings { index });
        }
        let directed = hearing.outcome == HearingOutcome::NextHearingDirected;
        let has_days = matches!(hearing.directive_after_days, Some(d) if d > 0);
        if directed != has_days || (!directed && hearing.directive_after_days.is_some()) {
            issues.push(ValidationIssue::DirectiveMismatch { index });
        }
    }
    if let Some(parent) = &draft.appeal_of {
        if !(ctx.is_disposed)(parent) {
            issues.push(ValidationIssue::DanglingAppealRef {
                appeal_of: parent.clone(),
            });
        }
    }
    if draft.status == CaseStatus::Disposed && !(ctx.is_disposed)(&draft.case_id) {
        issues.push(ValidationIssue::DisposedWithoutRecord);
    }

    if issues.iter().any(ValidationIssue::is_fatal) {
        Err(ValidationErrors { issues })
    } else {
        Ok(ValidatedCase {
            record: draft,
            warnings: issues,
        })
    }
}

/// Whole days elapsed between filing and `today`.
pub fn case_age_days(case: &CaseRecord, today: NaiveDate) -> Result<u32, CaseError> {
    days_between(case.filing_date, today).ok_or_else(|| CaseError::FutureFilingDate {
        case_id: case.case_id.clone(),
        filing_date: case.filing_date,
        today,
    })
}

/// `to - from` in days, or `None` when `to` precedes `from`.
pub fn days_between(from: NaiveDate, to: NaiveDate) -> Option<u32> {
    u32::try_from((to - from).num_days()).ok()
}

/// Fresh iff the case has never been heard.
pub fn classify_pool(case: &CaseRecord) -> Result<Pool, CaseError> {
    if case.status != CaseStatus::Pending {
        return Err(CaseError::DisposedCase(case.case_id.clone()));
    }
    Ok(if case.hearings.is_empty() {
        Pool::Fresh
    } else {
        Pool::Old
    })
}
