//! HTTP boundary over [`Docket`]. Handlers parse, check the caller's role,
//! call one docket operation and serialize its result.
//!
//! Every request carries an `X-Role` header naming the caller's desk role
//! (`Registrar`, `Judge` or `Admin`). A missing or unknown role is 401; a
//! role not allowed on the endpoint is 403.

mod error;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{FromRequestParts, Path, Query, State};
use axum::http::request::Parts;
use axum::http::StatusCode;
use axum::routing::{get, post, put};
use axum::{Json, Router};
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use docket_core::case::{CaseRecord, PriorityLevel};
use docket_core::engine::{
    AppealFiled, CalendarUpdate, DecisionOutcome, DecisionRequest, Docket, DocketView,
    MetricsReport, ScheduleRun,
};
use docket_core::error::StoreError;
use docket_core::notify::{DeliveryReport, Notification, NotificationStatus};
use docket_core::store::{AppealDraft, CaseView, DisposalRecord};
use docket_core::weight::SectionWeightTable;

pub use error::{ApiError, ErrorBody};

pub const ROLE_HEADER: &str = "x-role";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Registrar,
    Judge,
    Admin,
}

impl Role {
    fn parse(value: &str) -> Option<Role> {
        match value.trim().to_ascii_lowercase().as_str() {
            "registrar" => Some(Role::Registrar),
            "judge" => Some(Role::Judge),
            "admin" => Some(Role::Admin),
            _ => None,
        }
    }

    fn require(self, allowed: &[Role]) -> Result<Self, ApiError> {
        if allowed.contains(&self) {
            Ok(self)
        } else {
            Err(ApiError::forbidden(format!(
                "role {self} may not perform this operation"
            )))
        }
    }

    /// Actor name recorded in the audit log.
    fn actor(self) -> &'static str {
        match self {
            Role::Registrar => "registrar",
            Role::Judge => "judge",
            Role::Admin => "admin",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<S: Send + Sync> FromRequestParts<S> for Role {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, _state: &S) -> Result<Self, Self::Rejection> {
        let header = parts
            .headers
            .get(ROLE_HEADER)
            .ok_or_else(|| ApiError::unauthenticated("missing X-Role header"))?;
        header
            .to_str()
            .ok()
            .and_then(Role::parse)
            .ok_or_else(|| ApiError::unauthenticated("X-Role must be Registrar, Judge or Admin"))
    }
}

/// Shared service state. One lock serializes every operation, so scheduling
/// runs never interleave with decisions.
#[derive(Clone)]
pub struct AppState {
    docket: Arc<Mutex<Docket>>,
}

impl AppState {
    pub fn new(docket: Docket) -> Self {
        Self {
            docket: Arc::new(Mutex::new(docket)),
        }
    }

    pub fn docket(&self) -> MutexGuard<'_, Docket> {
        self.docket
            .lock()
            .unwrap_or_else(|poisoned| poisoned.into_inner())
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/cases", post(create_case))
        .route("/cases/{id}", get(get_case))
        .route("/cases/{id}/decision", post(decide))
        .route("/cases/{id}/priority", put(override_priority))
        .route("/docket", get(docket_view))
        .route("/appeals", post(file_appeal))
        .route("/schedule/run", post(run_schedule))
        .route("/calendar/holidays", post(update_calendar))
        .route("/config/section-weights", put(section_weights))
        .route("/notifications", get(notifications))
        .route("/notifications/drain", post(drain))
        .route("/metrics", get(metrics))
        .with_state(state)
}

type ApiResult<T> = Result<T, ApiError>;

const ANY: &[Role] = &[Role::Registrar, Role::Judge, Role::Admin];
const ENTRY: &[Role] = &[Role::Registrar, Role::Admin];
const ADMIN: &[Role] = &[Role::Admin];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarningBody {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreatedCase {
    pub case: CaseRecord,
    /// Non-fatal validation findings.
    pub warnings: Vec<WarningBody>,
}

async fn create_case(
    State(state): State<AppState>,
    role: Role,
    body: Result<Json<CaseRecord>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<CreatedCase>)> {
    role.require(ENTRY)?;
    let Json(draft) = body?;
    let mut docket = state.docket();
    let today = docket.today();
    let validated = docket.enter_case(role.actor(), draft, today)?;
    let warnings = validated
        .warnings
        .iter()
        .map(|w| WarningBody {
            code: w.code().to_string(),
            message: w.to_string(),
        })
        .collect();
    Ok((
        StatusCode::CREATED,
        Json(CreatedCase {
            case: validated.record,
            warnings,
        }),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum CaseResponse {
    Pending { case: CaseRecord },
    Disposed { disposal: DisposalRecord },
}

async fn get_case(
    State(state): State<AppState>,
    role: Role,
    Path(id): Path<String>,
) -> ApiResult<Json<CaseResponse>> {
    role.require(ANY)?;
    let docket = state.docket();
    match docket.store().get(&id) {
        Some(CaseView::Pending(c)) => Ok(Json(CaseResponse::Pending { case: c.clone() })),
        Some(CaseView::Disposed(d)) => Ok(Json(CaseResponse::Disposed {
            disposal: d.clone(),
        })),
        None => Err(StoreError::CaseNotFound(id).into()),
    }
}

async fn decide(
    State(state): State<AppState>,
    role: Role,
    Path(id): Path<String>,
    body: Result<Json<DecisionRequest>, JsonRejection>,
) -> ApiResult<Json<DecisionOutcome>> {
    role.require(&[Role::Judge])?;
    let Json(request) = body?;
    Ok(Json(state.docket().decide(role.actor(), &id, &request)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorityOverride {
    pub priority_level: PriorityLevel,
}

async fn override_priority(
    State(state): State<AppState>,
    role: Role,
    Path(id): Path<String>,
    body: Result<Json<PriorityOverride>, JsonRejection>,
) -> ApiResult<Json<CaseRecord>> {
    role.require(ADMIN)?;
    let Json(body) = body?;
    Ok(Json(state.docket().override_priority(
        role.actor(),
        &id,
        body.priority_level,
    )?))
}

#[derive(Debug, Deserialize)]
struct DocketQuery {
    judge: String,
    date: Option<NaiveDate>,
}

async fn docket_view(
    State(state): State<AppState>,
    role: Role,
    query: Result<Query<DocketQuery>, QueryRejection>,
) -> ApiResult<Json<DocketView>> {
    role.require(ANY)?;
    let Query(q) = query?;
    let mut docket = state.docket();
    let date = q.date.unwrap_or_else(|| docket.today());
    Ok(Json(docket.docket(&q.judge, date)?))
}

#[derive(Debug, Clone, Deserialize)]
pub struct AppealRequest {
    pub disposed_case_id: String,
    pub higher_court_id: String,
    #[serde(flatten)]
    pub draft: AppealDraft,
}

async fn file_appeal(
    State(state): State<AppState>,
    role: Role,
    body: Result<Json<AppealRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<AppealFiled>)> {
    role.require(ENTRY)?;
    let Json(req) = body?;
    let filed = state.docket().file_appeal(
        role.actor(),
        &req.disposed_case_id,
        req.draft,
        &req.higher_court_id,
    )?;
    Ok((StatusCode::CREATED, Json(filed)))
}

#[derive(Debug, Deserialize)]
struct AsOfQuery {
    as_of: Option<NaiveDate>,
}

async fn run_schedule(
    State(state): State<AppState>,
    role: Role,
    query: Result<Query<AsOfQuery>, QueryRejection>,
) -> ApiResult<Json<ScheduleRun>> {
    role.require(ENTRY)?;
    let Query(q) = query?;
    let mut docket = state.docket();
    let as_of = q.as_of.unwrap_or_else(|| docket.today());
    Ok(Json(docket.run_schedule(role.actor(), as_of)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaveEntry {
    pub judge_id: String,
    pub date: NaiveDate,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CalendarRequest {
    #[serde(default)]
    pub holidays: Vec<NaiveDate>,
    #[serde(default)]
    pub leaves: Vec<LeaveEntry>,
}

async fn update_calendar(
    State(state): State<AppState>,
    role: Role,
    body: Result<Json<CalendarRequest>, JsonRejection>,
) -> ApiResult<Json<CalendarUpdate>> {
    role.require(ADMIN)?;
    let Json(req) = body?;
    let leaves: Vec<(String, NaiveDate)> = req
        .leaves
        .into_iter()
        .map(|l| (l.judge_id, l.date))
        .collect();
    Ok(Json(state.docket().update_calendar(
        role.actor(),
        &req.holidays,
        &leaves,
    )?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionWeightsRequest {
    pub entries: BTreeMap<String, f64>,
    pub default_weight: f64,
}

async fn section_weights(
    State(state): State<AppState>,
    role: Role,
    body: Result<Json<SectionWeightsRequest>, JsonRejection>,
) -> ApiResult<Json<SectionWeightTable>> {
    role.require(ADMIN)?;
    let Json(req) = body?;
    let table = SectionWeightTable::new(req.entries, req.default_weight)
        .map_err(docket_core::error::EngineError::from)?;
    let mut docket = state.docket();
    docket.set_section_weights(role.actor(), table)?;
    Ok(Json(docket.scorer().sections.clone()))
}

#[derive(Debug, Deserialize)]
struct NotificationQuery {
    case_id: Option<String>,
    status: Option<NotificationStatus>,
}

async fn notifications(
    State(state): State<AppState>,
    role: Role,
    query: Result<Query<NotificationQuery>, QueryRejection>,
) -> ApiResult<Json<Vec<Notification>>> {
    role.require(ANY)?;
    let Query(q) = query?;
    let docket = state.docket();
    let list = docket
        .outbox()
        .all()
        .iter()
        .filter(|n| q.case_id.as_ref().is_none_or(|id| &n.case_id == id))
        .filter(|n| q.status.is_none_or(|s| n.status == s))
        .cloned()
        .collect();
    Ok(Json(list))
}

async fn drain(State(state): State<AppState>, role: Role) -> ApiResult<Json<DeliveryReport>> {
    role.require(ENTRY)?;
    Ok(Json(state.docket().drain_notifications(role.actor())?))
}

async fn metrics(
    State(state): State<AppState>,
    role: Role,
    query: Result<Query<AsOfQuery>, QueryRejection>,
) -> ApiResult<Json<MetricsReport>> {
    role.require(ANY)?;
    let Query(q) = query?;
    let docket = state.docket();
    let as_of = q.as_of.unwrap_or_else(|| docket.today());
    Ok(Json(docket.metrics(as_of)))
}
