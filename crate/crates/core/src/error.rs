use chrono::NaiveDate;
use thiserror::Error;

/// Errors from pure case-level computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CaseError {
    #[error("case {case_id} filed on {filing_date} which is after the reference date {today}")]
    FutureFilingDate {
        case_id: String,
        filing_date: NaiveDate,
        today: NaiveDate,
    },
    #[error("case {0} is disposed")]
    DisposedCase(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("no sitting day for judge {judge_id} within {horizon_days} days of {from}")]
    NoSittingDayWithinHorizon {
        judge_id: String,
        from: NaiveDate,
        horizon_days: u32,
    },
    #[error("case {0} is not pending")]
    CaseNotPending(String),
    #[error("invalid directive: {0}")]
    InvalidDirective(String),
    #[error("invalid capacity: {0}")]
    InvalidCapacity(String),
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("case id {0} already exists")]
    DuplicateCaseId(String),
    #[error("case {0} not found")]
    CaseNotFound(String),
    #[error("case {0} is already disposed")]
    AlreadyDisposed(String),
    #[error("no disposed case with id {0}")]
    NotFound(String),
    #[error(
        "hearing dated {date} for case {case_id} precedes an earlier hearing or the filing date"
    )]
    NonMonotoneHearings { case_id: String, date: NaiveDate },
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("storage failure: {0}")]
    StorageFailure(String),
}

impl From<std::io::Error> for StoreError {
    fn from(err: std::io::Error) -> Self {
        StoreError::StorageFailure(err.to_string())
    }
}

impl From<serde_json::Error> for StoreError {
    fn from(err: serde_json::Error) -> Self {
        StoreError::StorageFailure(err.to_string())
    }
}

#[derive(Debug, Error)]
pub enum NotifyError {
    #[error("channel adapter {0} is unavailable")]
    AdapterUnavailable(String),
    #[error("case {0} is not an appeal")]
    NotAnAppeal(String),
    #[error("notification {0} not found")]
    UnknownNotification(u64),
    #[error("notification {0} is not in the failed state")]
    NotFailed(u64),
    #[error("notification {0} was already retried once")]
    RetryExhausted(u64),
    #[error("an active notification with the same idempotency key as {0} exists")]
    DuplicateActive(u64),
    #[error("storage failure: {0}")]
    StorageFailure(String),
}

impl From<StoreError> for NotifyError {
    fn from(err: StoreError) -> Self {
        NotifyError::StorageFailure(err.to_string())
    }
}

/// Errors while parsing configuration or calendar files.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid value for {key}: {message}")]
    InvalidValue { key: String, message: String },
}

/// Failure of a docket-level operation, wrapping the module that raised it.
#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Validation(#[from] crate::case::ValidationErrors),
    #[error(transparent)]
    Case(#[from] CaseError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Notify(#[from] NotifyError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("unknown judge {0}")]
    UnknownJudge(String),
    #[error("invalid decision: {0}")]
    InvalidDecision(String),
}
