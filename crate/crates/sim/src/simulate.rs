use std::collections::HashMap;
use std::sync::Arc;

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use docket_core::calendar::{is_sitting_day, CourtCalendar};
use docket_core::case::{days_between, CaseRecord, Pool};
use docket_core::clock::ManualClock;
use docket_core::engine::{DecisionRequest, Docket};
use docket_core::journal::MemoryBackend;
use docket_core::notify::{ConsoleAdapter, NotificationStatus};
use docket_core::rank::Scorer;
use docket_core::scheduler::HearingAssignment;
use docket_core::store::DocketStore;

use crate::{generate_cases, SimConfig, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DayCount {
    pub date: NaiveDate,
    pub fresh: u32,
    pub old: u32,
    pub total: u32,
}

/// Deterministic outcome of a run: equal configs give equal metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationMetrics {
    pub seed: u64,
    pub days: u32,
    pub generated_cases: usize,
    pub filed_cases: usize,
    /// Hearings booked on each simulated day, summed over judges.
    pub scheduled_per_day: Vec<DayCount>,
    pub max_scheduled_per_day: u32,
    pub hearings_held: usize,
    pub first_hearings_held: usize,
    pub mean_age_at_first_hearing_days: f64,
    pub max_age_at_first_hearing_days: u32,
    /// Latest date on which a fresh case was booked for its first hearing.
    pub last_first_hearing: Option<NaiveDate>,
    /// That date's position among court sitting days counted from the start
    /// date (1-based).
    pub last_first_hearing_sitting_day: Option<u32>,
    /// Pending cases idle for more than twice the aging threshold with no
    /// hearing booked.
    pub starvation_count: usize,
    pub notifications_sent: usize,
    pub disposals: usize,
    pub pending_at_end: usize,
    pub booked_at_end: usize,
    /// Longest gap between hearings (or since filing) among the tenth of
    /// cases with the lowest base weight when they entered the docket.
    pub low_weight_decile_max_wait_days: u32,
    pub model_coefficients: [f64; 5],
}

impl SimulationMetrics {
    pub fn empty(seed: u64, days: u32) -> Self {
        Self {
            seed,
            days,
            generated_cases: 0,
            filed_cases: 0,
            scheduled_per_day: Vec::new(),
            max_scheduled_per_day: 0,
            hearings_held: 0,
            first_hearings_held: 0,
            mean_age_at_first_hearing_days: 0.0,
            max_age_at_first_hearing_days: 0,
            last_first_hearing: None,
            last_first_hearing_sitting_day: None,
            starvation_count: 0,
            notifications_sent: 0,
            disposals: 0,
            pending_at_end: 0,
            booked_at_end: 0,
            low_weight_decile_max_wait_days: 0,
            model_coefficients: [0.0; 5],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub metrics: SimulationMetrics,
    /// Every live booking, in the order it was made.
    pub assignments: Vec<HearingAssignment>,
}

impl SimulationOutput {
    pub fn assignments_ndjson(&self) -> String {
        let mut out = String::new();
        for a in &self.assignments {
            out.push_str(&serde_json::to_string(a).expect("assignment serializes"));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct Track {
    last_activity: NaiveDate,
    max_wait: u32,
}

const ACTOR: &str = "simulator";

fn violation(date: NaiveDate, message: String) -> SimError {
    SimError::InvariantViolation { date, message }
}

/// Court sitting days (weekends and holidays excluded) from `start` to
/// `date`, inclusive.
fn sitting_day_index(start: NaiveDate, date: NaiveDate, calendar: &CourtCalendar) -> u32 {
    start
        .iter_days()
        .take_while(|d| *d <= date)
        .filter(|d| is_sitting_day(*d, "", calendar))
        .count() as u32
}

/// Runs the daily loop: file new cases, rank and book the unbooked ones
/// within the lookahead window, send notices, then let judges decide every
/// hearing due that day.
pub fn run_simulation(config: &SimConfig) -> Result<SimulationOutput, SimError> {
    let cases = generate_cases(config)?;
    let mut metrics = SimulationMetrics::empty(config.seed, config.days);
    metrics.generated_cases = cases.len();

    let calendar = config.calendar();
    let capacity = config.capacity()?;
    let clock = Arc::new(ManualClock::at_date(config.start_date));
    let store = DocketStore::open(Box::new(MemoryBackend::new()), clock.clone())
        .map_err(docket_core::error::EngineError::from)?;
    let mut docket = Docket::open(
        store,
        config.engine_config()?,
        calendar.clone(),
        Box::new(ConsoleAdapter::silent()),
    )?
    .with_window(Some(config.lookahead_days))
    .with_judges(config.judge_ids())
    .with_learning(config.learning);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);

    // Filing order: by date, then by id.
    let mut arrivals: Vec<&CaseRecord> = cases.iter().collect();
    arrivals.sort_by(|a, b| (a.filing_date, &a.case_id).cmp(&(b.filing_date, &b.case_id)));
    let mut next_arrival = 0;

    let initial = Scorer {
        aging: None,
        ..docket.scorer().clone()
    };
    let mut entry_weight: Vec<(f64, String)> = Vec::new();
    let mut track: HashMap<String, Track> = HashMap::new();
    let mut first_hearing_ages: Vec<u32> = Vec::new();
    let mut last_fresh: Option<NaiveDate> = None;
    let judges = config.judge_ids();
    let end = config.start_date + Days::new(config.days as u64);

    for offset in 0..config.days {
        let today = config.start_date + Days::new(offset as u64);
        clock.set_date(today);

        while next_arrival < arrivals.len() && arrivals[next_arrival].filing_date <= today {
            let case = arrivals[next_arrival];
            next_arrival += 1;
            docket.enter_case("registrar", case.clone(), today)?;
            let weight = initial
                .score(case, today)
                .map_err(docket_core::error::EngineError::from)?;
            entry_weight.push((weight.base_weight, case.case_id.clone()));
            track.insert(
                case.case_id.clone(),
                Track {
                    last_activity: case.last_activity_date(),
                    max_wait: 0,
                },
            );
        }

        let run = docket.run_schedule(ACTOR, today)?;
        let mut booked: Vec<HearingAssignment> = run.assigned;

        for due in docket.hearings_due(today) {
            let case = docket
                .store()
                .get_pending(&due.case_id)
                .expect("due hearing of a pending case");
            let first = case.hearings.is_empty();
            let t = track.get_mut(&due.case_id).expect("tracked on entry");
            let gap = days_between(t.last_activity, today).unwrap_or(0);
            t.max_wait = t.max_wait.max(gap);
            t.last_activity = today;
            if first {
                first_hearing_ages.push(days_between(case.filing_date, today).unwrap_or(0));
            }
            metrics.hearings_held += 1;

            let request = if rng.random_bool(config.dispose_probability) {
                DecisionRequest::dispose()
            } else {
                DecisionRequest::after(
                    rng.random_range(config.directive_min_days..=config.directive_max_days),
                )
            };
            let outcome = docket.decide("judge", &due.case_id, &request.on(today))?;
            if outcome.disposal.is_some() {
                metrics.disposals += 1;
            }
            booked.extend(outcome.next_hearing);
        }

        for a in &booked {
            if !is_sitting_day(a.date, &a.judge_id, &calendar) {
                return Err(violation(
                    today,
                    format!("{} booked on non-sitting day {}", a.case_id, a.date),
                ));
            }
            if a.pool == Pool::Fresh {
                last_fresh = last_fresh.max(Some(a.date));
            }
        }
        for judge in &judges {
            let load = docket.store().ledger().get(judge, today);
            let within = load.total <= capacity.daily_total()
                && (capacity.spill_enabled()
                    || (load.fresh <= capacity.cap(Pool::Fresh)
                        && load.old <= capacity.cap(Pool::Old)));
            if !within {
                return Err(violation(
                    today,
                    format!("judge {judge} over capacity: {load:?}"),
                ));
            }
        }
        let store = docket.store();
        if store.pending_count() + store.disposed_count() != next_arrival
            || store.outstanding_count() > store.pending_count()
        {
            return Err(violation(
                today,
                format!(
                    "conservation broken: filed {next_arrival}, pending {}, booked {}, disposed {}",
                    store.pending_count(),
                    store.outstanding_count(),
                    store.disposed_count()
                ),
            ));
        }
    }

    let store = docket.store();
    metrics.filed_cases = next_arrival;
    metrics.scheduled_per_day = (0..config.days)
        .map(|o| {
            let date = config.start_date + Days::new(o as u64);
            let mut day = DayCount {
                date,
                fresh: 0,
                old: 0,
                total: 0,
            };
            for j in &judges {
                let c = store.ledger().get(j, date);
                day.fresh += c.fresh;
                day.old += c.old;
                day.total += c.total;
            }
            day
        })
        .collect();
    metrics.max_scheduled_per_day = metrics
        .scheduled_per_day
        .iter()
        .map(|d| d.total)
        .max()
        .unwrap_or(0);
    metrics.first_hearings_held = first_hearing_ages.len();
    if !first_hearing_ages.is_empty() {
        metrics.mean_age_at_first_hearing_days =
            first_hearing_ages.iter().map(|&a| a as f64).sum::<f64>()
                / first_hearing_ages.len() as f64;
        metrics.max_age_at_first_hearing_days =
            first_hearing_ages.iter().copied().max().unwrap_or(0);
    }
    metrics.last_first_hearing = last_fresh;
    metrics.last_first_hearing_sitting_day =
        last_fresh.map(|d| sitting_day_index(config.start_date, d, &calendar));

    let threshold = 2 * config.aging_threshold_days;
    metrics.starvation_count = store
        .pending()
        .filter(|c| !store.has_outstanding(&c.case_id))
        .filter(|c| days_between(c.last_activity_date(), end).is_some_and(|idle| idle > threshold))
        .count();
    for c in store.pending() {
        if let Some(t) = track.get_mut(&c.case_id) {
            t.max_wait = t
                .max_wait
                .max(days_between(t.last_activity, end).unwrap_or(0));
        }
    }
    entry_weight.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let decile = entry_weight.len().div_ceil(10);
    metrics.low_weight_decile_max_wait_days = entry_weight[..decile]
        .iter()
        .map(|(_, id)| track[id].max_wait)
        .max()
        .unwrap_or(0);
    metrics.notifications_sent = docket.outbox().count(NotificationStatus::Delivered);
    metrics.pending_at_end = store.pending_count();
    metrics.booked_at_end = store.outstanding_count();
    metrics.model_coefficients = docket.scorer().model.coefficients();

    Ok(SimulationOutput {
        metrics,
        assignments: store.assignments().cloned().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimConfig {
        SimConfig {
            n_cases: 600,
            days: 60,
            fresh_cap: 5,
            old_cap: 5,
            ..SimConfig::default()
        }
    }

    #[test]
    fn zero_days_touches_nothing() {
        let out = run_simulation(&SimConfig {
            days: 0,
            n_cases: 50,
            ..SimConfig::default()
        })
        .unwrap();
        let mut expected = SimulationMetrics::empty(42, 0);
        expected.generated_cases = 50;
        expected.model_coefficients = docket_core::weight::DEFAULT_COEFFICIENTS;
        assert_eq!(out.metrics, expected);
        assert!(out.assignments.is_empty());
    }

    #[test]
    fn small_run_is_reproducible_and_within_capacity() {
        let a = run_simulation(&small()).unwrap();
        let b = run_simulation(&small()).unwrap();
        assert_eq!(a, b);
        assert!(a.metrics.max_scheduled_per_day <= 10);
        assert!(a.metrics.hearings_held > 0);
        assert!(a.metrics.disposals > 0);
        assert_eq!(a.metrics.notifications_sent, 3 * a.assignments.len());
        assert_eq!(
            a.metrics.filed_cases,
            a.metrics.pending_at_end + a.metrics.disposals
        );
    }

    #[test]
    fn different_seeds_differ() {
        let a = run_simulation(&small()).unwrap();
        let b = run_simulation(&SimConfig { seed: 7, ..small() }).unwrap();
        assert_ne!(a.assignments, b.assignments);
    }

    #[test]
    fn sitting_day_index_counts_weekdays() {
        let cal = CourtCalendar::default();
        let wed = NaiveDate::from_ymd_opt(2025, 1, 1).unwrap();
        assert_eq!(sitting_day_index(wed, wed, &cal), 1);
        assert_eq!(sitting_day_index(wed, wed + Days::new(6), &cal), 5);
    }
}
