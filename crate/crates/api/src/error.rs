use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use docket_core::error::{CaseError, EngineError, NotifyError, ScheduleError, StoreError};

/// Error body: `{code, message, details}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(default)]
    pub details: Value,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                code: code.to_string(),
                message: message.into(),
                details: Value::Null,
            },
        }
    }

    fn with_details(mut self, details: Value) -> Self {
        self.body.details = details;
        self
    }

    pub fn unauthenticated(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "Unauthenticated", message)
    }

    pub fn forbidden(message: impl Into<String>) -> Self {
        Self::new(StatusCode::FORBIDDEN, "Forbidden", message)
    }

    pub fn malformed(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "MalformedRequest", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(rejection: JsonRejection) -> Self {
        ApiError::malformed(rejection.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(rejection: QueryRejection) -> Self {
        ApiError::malformed(rejection.body_text())
    }
}

fn variant(err: &EngineError) -> (StatusCode, &'static str) {
    use StatusCode as S;
    match err {
        EngineError::Validation(_) => (S::BAD_REQUEST, "ValidationFailed"),
        EngineError::Case(CaseError::FutureFilingDate { .. }) => {
            (S::BAD_REQUEST, "FutureFilingDate")
        }
        EngineError::Case(CaseError::DisposedCase(_)) => (S::CONFLICT, "DisposedCase"),
        EngineError::Schedule(e) => match e {
            ScheduleError::NoSittingDayWithinHorizon { .. } => {
                (S::UNPROCESSABLE_ENTITY, "NoSittingDayWithinHorizon")
            }
            ScheduleError::CaseNotPending(_) => (S::CONFLICT, "CaseNotPending"),
            ScheduleError::InvalidDirective(_) => (S::BAD_REQUEST, "InvalidDirective"),
            ScheduleError::InvalidCapacity(_) => (S::UNPROCESSABLE_ENTITY, "InvalidCapacity"),
        },
        EngineError::Store(e) => match e {
            StoreError::DuplicateCaseId(_) => (S::CONFLICT, "DuplicateCaseId"),
            StoreError::CaseNotFound(_) => (S::NOT_FOUND, "CaseNotFound"),
            StoreError::AlreadyDisposed(_) => (S::CONFLICT, "AlreadyDisposed"),
            StoreError::NotFound(_) => (S::NOT_FOUND, "NotFound"),
            StoreError::NonMonotoneHearings { .. } => (S::BAD_REQUEST, "NonMonotoneHearings"),
            StoreError::InvalidRecord(_) => (S::BAD_REQUEST, "InvalidRecord"),
            StoreError::StorageFailure(_) => (S::INTERNAL_SERVER_ERROR, "StorageFailure"),
        },
        EngineError::Notify(e) => match e {
            NotifyError::AdapterUnavailable(_) => (S::SERVICE_UNAVAILABLE, "AdapterUnavailable"),
            NotifyError::NotAnAppeal(_) => (S::BAD_REQUEST, "NotAnAppeal"),
            NotifyError::UnknownNotification(_) => (S::NOT_FOUND, "UnknownNotification"),
            NotifyError::NotFailed(_) => (S::CONFLICT, "NotFailed"),
            NotifyError::RetryExhausted(_) => (S::CONFLICT, "RetryExhausted"),
            NotifyError::DuplicateActive(_) => (S::CONFLICT, "DuplicateActive"),
            NotifyError::StorageFailure(_) => (S::INTERNAL_SERVER_ERROR, "StorageFailure"),
        },
        EngineError::Config(_) => (S::BAD_REQUEST, "InvalidConfig"),
        EngineError::UnknownJudge(_) => (S::NOT_FOUND, "UnknownJudge"),
        EngineError::InvalidDecision(_) => (S::BAD_REQUEST, "InvalidDecision"),
    }
}

impl From<EngineError> for ApiError {
    fn from(err: EngineError) -> Self {
        let (status, code) = variant(&err);
        let out = ApiError::new(status, code, err.to_string());
        match &err {
            EngineError::Validation(v) => out.with_details(Value::Array(
                v.issues
                    .iter()
                    .map(|i| json!({ "code": i.code(), "message": i.to_string(), "fatal": i.is_fatal() }))
                    .collect(),
            )),
            _ => out,
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(err: StoreError) -> Self {
        EngineError::from(err).into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use docket_core::case::{ValidationErrors, ValidationIssue};

    #[test]
    fn validation_errors_list_every_issue() {
        let err = EngineError::Validation(ValidationErrors {
            issues: vec![ValidationIssue::EmptyCaseId, ValidationIssue::EmptySections],
        });
        let api = ApiError::from(err);
        assert_eq!(api.status, StatusCode::BAD_REQUEST);
        assert_eq!(api.body.code, "ValidationFailed");
        assert_eq!(api.body.details[0]["code"], "EmptyCaseId");
        assert_eq!(api.body.details[1]["fatal"], false);
    }

    #[test]
    fn store_errors_map_to_http_statuses() {
        let cases = [
            (
                StoreError::DuplicateCaseId("x".into()),
                StatusCode::CONFLICT,
            ),
            (StoreError::CaseNotFound("x".into()), StatusCode::NOT_FOUND),
            (
                StoreError::AlreadyDisposed("x".into()),
                StatusCode::CONFLICT,
            ),
            (StoreError::NotFound("x".into()), StatusCode::NOT_FOUND),
            (
                StoreError::StorageFailure("disk".into()),
                StatusCode::INTERNAL_SERVER_ERROR,
            ),
        ];
        for (err, status) in cases {
            assert_eq!(ApiError::from(err).status, status);
        }
    }
}
