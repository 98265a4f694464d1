//! Hearing-date allocation under a daily capacity split between fresh and
//! old cases.
//!
//! Cases are placed greedily in rank order: each takes the earliest sitting
//! day for its judge where its pool still has room. With spill enabled a
//! pool that is full on a day may use the other pool's free slots, never
//! exceeding the daily total. Loads only grow during a call, so a
//! per-(judge, pool) cursor can skip days already known to be full.

use std::collections::{BTreeMap, HashMap};

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::calendar::{next_sitting_day, CourtCalendar};
use crate::case::{CaseRecord, Pool};
use crate::error::ScheduleError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityConfig {
    daily_total: u32,
    fresh_cap: u32,
    old_cap: u32,
    spill_enabled: bool,
}

impl Default for CapacityConfig {
    fn default() -> Self {
        Self {
            daily_total: 100,
            fresh_cap: 50,
            old_cap: 50,
            spill_enabled: true,
        }
    }
}

impl CapacityConfig {
    pub fn new(fresh_cap: u32, old_cap: u32, spill_enabled: bool) -> Result<Self, ScheduleError> {
        let daily_total = fresh_cap
            .checked_add(old_cap)
            .ok_or_else(|| ScheduleError::InvalidCapacity("capacity overflows".into()))?;
        if daily_total == 0 {
            return Err(ScheduleError::InvalidCapacity(
                "daily total must be positive".into(),
            ));
        }
        Ok(Self {
            daily_total,
            fresh_cap,
            old_cap,
            spill_enabled,
        })
    }

    pub fn daily_total(&self) -> u32 {
        self.daily_total
    }

    pub fn spill_enabled(&self) -> bool {
        self.spill_enabled
    }

    pub fn with_spill(mut self, spill_enabled: bool) -> Self {
        self.spill_enabled = spill_enabled;
        self
    }

    pub fn cap(&self, pool: Pool) -> u32 {
        match pool {
            Pool::Fresh => self.fresh_cap,
            Pool::Old => self.old_cap,
        }
    }

    /// Whether a case from `pool` fits on a day that already carries `load`.
    pub fn admits(&self, load: &DailyCounts, pool: Pool) -> bool {
        load.total < self.daily_total && (load.get(pool) < self.cap(pool) || self.spill_enabled)
    }
}

/// Per-date tally of scheduled hearings by the pool of the case heard.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailyCounts {
    pub fresh: u32,
    pub old: u32,
    pub total: u32,
}

impl DailyCounts {
    pub fn get(&self, pool: Pool) -> u32 {
        match pool {
            Pool::Fresh => self.fresh,
            Pool::Old => self.old,
        }
    }

    pub fn add(&mut self, pool: Pool) {
        match pool {
            Pool::Fresh => self.fresh += 1,
            Pool::Old => self.old += 1,
        }
        self.total += 1;
    }

    fn remove(&mut self, pool: Pool) -> bool {
        let slot = match pool {
            Pool::Fresh => &mut self.fresh,
            Pool::Old => &mut self.old,
        };
        if *slot == 0 {
            return false;
        }
        *slot -= 1;
        self.total -= 1;
        true
    }
}

/// Running per-(judge, date) load.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadLedger {
    loads: BTreeMap<(String, NaiveDate), DailyCounts>,
}

impl LoadLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_assignments<'a>(
        assignments: impl IntoIterator<Item = &'a HearingAssignment>,
    ) -> Self {
        let mut ledger = Self::new();
        for a in assignments {
            ledger.record(&a.judge_id, a.date, a.pool);
        }
        ledger
    }

    pub fn get(&self, judge_id: &str, date: NaiveDate) -> DailyCounts {
        self.loads
            .get(&(judge_id.to_string(), date))
            .copied()
            .unwrap_or_default()
    }

    pub fn record(&mut self, judge_id: &str, date: NaiveDate, pool: Pool) {
        self.loads
            .entry((judge_id.to_string(), date))
            .or_default()
            .add(pool);
    }

    /// Frees a slot, e.g. when a scheduled hearing is superseded.
    pub fn release(&mut self, judge_id: &str, date: NaiveDate, pool: Pool) -> bool {
        let key = (judge_id.to_string(), date);
        let Some(counts) = self.loads.get_mut(&key) else {
            return false;
        };
        let removed = counts.remove(pool);
        if counts.total == 0 {
            self.loads.remove(&key);
        }
        removed
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, NaiveDate, DailyCounts)> {
        self.loads.iter().map(|((j, d), c)| (j.as_str(), *d, *c))
    }

    /// Totals per date summed over judges.
    pub fn totals_by_date(&self) -> BTreeMap<NaiveDate, u32> {
        let mut out = BTreeMap::new();
        for ((_, d), c) in &self.loads {
            *out.entry(*d).or_insert(0) += c.total;
        }
        out
    }
}

/// One entry of the ranked input to the allocator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationRequest {
    pub case_id: String,
    pub judge_id: String,
    pub pool: Pool,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HearingAssignment {
    pub case_id: String,
    pub judge_id: String,
    pub date: NaiveDate,
    pub pool: Pool,
    /// 1-based position in the ranked batch; 0 for judge directives.
    #[serde(rename = "rank")]
    pub rank_at_assignment: u32,
    #[serde(rename = "weight")]
    pub weight_snapshot: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Allocation {
    pub assigned: Vec<HearingAssignment>,
    /// Case ids that found no room on or before the window end.
    pub deferred: Vec<String>,
}

/// Places every ranked case, scanning as far forward as needed.
pub fn allocate_hearings(
    ranked: &[AllocationRequest],
    start: NaiveDate,
    calendar: &CourtCalendar,
    capacity: &CapacityConfig,
    load: &mut LoadLedger,
) -> Result<Vec<HearingAssignment>, ScheduleError> {
    allocate_until(ranked, start, None, calendar, capacity, load).map(|a| a.assigned)
}

/// Like [`allocate_hearings`] but only uses days up to and including
/// `window_end`; cases that do not fit are deferred.
pub fn allocate_within(
    ranked: &[AllocationRequest],
    start: NaiveDate,
    window_end: NaiveDate,
    calendar: &CourtCalendar,
    capacity: &CapacityConfig,
    load: &mut LoadLedger,
) -> Result<Allocation, ScheduleError> {
    allocate_until(ranked, start, Some(window_end), calendar, capacity, load)
}

fn allocate_until(
    ranked: &[AllocationRequest],
    start: NaiveDate,
    window_end: Option<NaiveDate>,
    calendar: &CourtCalendar,
    capacity: &CapacityConfig,
    load: &mut LoadLedger,
) -> Result<Allocation, ScheduleError> {
    let mut out = Allocation::default();
    let mut cursors: HashMap<(&str, Pool), NaiveDate> = HashMap::new();

    for (idx, req) in ranked.iter().enumerate() {
        let cursor = cursors
            .get(&(req.judge_id.as_str(), req.pool))
            .copied()
            .unwrap_or(start);
        let placed = earliest_slot(
            &req.judge_id,
            req.pool,
            cursor,
            window_end,
            calendar,
            capacity,
            load,
        )?;
        match placed {
            Some(day) => {
                cursors.insert((req.judge_id.as_str(), req.pool), day);
                load.record(&req.judge_id, day, req.pool);
                out.assigned.push(HearingAssignment {
                    case_id: req.case_id.clone(),
                    judge_id: req.judge_id.clone(),
                    date: day,
                    pool: req.pool,
                    rank_at_assignment: idx as u32 + 1,
                    weight_snapshot: req.weight,
                });
            }
            None => {
                if let Some(end) = window_end {
                    cursors.insert((req.judge_id.as_str(), req.pool), end + Days::new(1));
                }
                out.deferred.push(req.case_id.clone());
            }
        }
    }
    Ok(out)
}

fn earliest_slot(
    judge_id: &str,
    pool: Pool,
    from: NaiveDate,
    window_end: Option<NaiveDate>,
    calendar: &CourtCalendar,
    capacity: &CapacityConfig,
    load: &LoadLedger,
) -> Result<Option<NaiveDate>, ScheduleError> {
    if capacity.cap(pool) == 0 && !capacity.spill_enabled() {
        return Err(ScheduleError::InvalidCapacity(format!(
            "no {pool:?} slots exist while spill is disabled"
        )));
    }
    let mut day = from;
    loop {
        if window_end.is_some_and(|end| day > end) {
            return Ok(None);
        }
        day = next_sitting_day(day, judge_id, calendar)?;
        if window_end.is_some_and(|end| day > end) {
            return Ok(None);
        }
        if capacity.admits(&load.get(judge_id, day), pool) {
            return Ok(Some(day));
        }
        day = day + Days::new(1);
    }
}

/// Schedules the next hearing for a "next hearing after N days" directive:
/// the earliest sitting day on or after `decision_date + after_days` with
/// room in the old pool. The slot is recorded in `load`.
pub fn schedule_directive(
    case: &CaseRecord,
    decision_date: NaiveDate,
    after_days: u32,
    weight: f64,
    calendar: &CourtCalendar,
    capacity: &CapacityConfig,
    load: &mut LoadLedger,
) -> Result<HearingAssignment, ScheduleError> {
    if !case.is_pending() {
        return Err(ScheduleError::CaseNotPending(case.case_id.clone()));
    }
    if after_days == 0 {
        return Err(ScheduleError::InvalidDirective(
            "after_days must be at least 1".into(),
        ));
    }
    let floor = decision_date + Days::new(after_days as u64);
    let day = earliest_slot(
        &case.judge_id,
        Pool::Old,
        floor,
        None,
        calendar,
        capacity,
        load,
    )?
    .expect("unbounded search always places");
    load.record(&case.judge_id, day, Pool::Old);
    Ok(HearingAssignment {
        case_id: case.case_id.clone(),
        judge_id: case.judge_id.clone(),
        date: day,
        pool: Pool::Old,
        rank_at_assignment: 0,
        weight_snapshot: weight,
    })
}

/// Counts of assignments on `date` by pool.
pub fn daily_counts<'a>(
    date: NaiveDate,
    assignments: impl IntoIterator<Item = &'a HearingAssignment>,
) -> DailyCounts {
    let mut counts = DailyCounts::default();
    for a in assignments.into_iter().filter(|a| a.date == date) {
        counts.add(a.pool);
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{date, sample_cases};

    fn req(id: &str, pool: Pool) -> AllocationRequest {
        AllocationRequest {
            case_id: id.into(),
            judge_id: "J1".into(),
            pool,
            weight: 0.5,
        }
    }

    fn dates(a: &[HearingAssignment]) -> Vec<NaiveDate> {
        a.iter().map(|x| x.date).collect()
    }

    #[test]
    fn capacity_validation() {
        assert!(CapacityConfig::new(0, 0, true).is_err());
        let c = CapacityConfig::new(3, 2, false).unwrap();
        assert_eq!(c.daily_total(), 5);
        assert_eq!(CapacityConfig::default().daily_total(), 100);
    }

    #[test]
    fn spill_into_free_fresh_slot() {
        let cal = CourtCalendar::default();
        let cap = CapacityConfig::new(1, 1, true).unwrap();
        let monday = date(2025, 7, 7);
        let ranked = [
            req("a", Pool::Old),
            req("b", Pool::Old),
            req("c", Pool::Old),
        ];
        let out = allocate_hearings(&ranked, monday, &cal, &cap, &mut LoadLedger::new()).unwrap();
        assert_eq!(dates(&out), [monday, monday, date(2025, 7, 8)]);
        assert_eq!(
            out.iter().map(|a| a.rank_at_assignment).collect::<Vec<_>>(),
            [1, 2, 3]
        );
    }

    #[test]
    fn no_spill_keeps_pools_apart() {
        let cal = CourtCalendar::default();
        let cap = CapacityConfig::new(1, 1, false).unwrap();
        let monday = date(2025, 7, 7);
        let ranked = [
            req("a", Pool::Old),
            req("b", Pool::Old),
            req("c", Pool::Fresh),
        ];
        let out = allocate_hearings(&ranked, monday, &cal, &cap, &mut LoadLedger::new()).unwrap();
        assert_eq!(dates(&out), [monday, date(2025, 7, 8), monday]);
    }

    #[test]
    fn ten_thousand_fresh_cases_fill_two_hundred_days() {
        let cal = CourtCalendar::default();
        let start = date(2025, 7, 7);
        let ranked: Vec<_> = (0..10_000)
            .map(|i| req(&format!("F{i:05}"), Pool::Fresh))
            .collect();

        let mut sitting = Vec::new();
        let mut d = start;
        while sitting.len() < 200 {
            d = next_sitting_day(d, "J1", &cal).unwrap();
            sitting.push(d);
            d = d + Days::new(1);
        }

        let strict = CapacityConfig::default().with_spill(false);
        let out = allocate_hearings(&ranked, start, &cal, &strict, &mut LoadLedger::new()).unwrap();
        assert_eq!(out.last().unwrap().date, sitting[199]);

        let spill = CapacityConfig::default();
        let out = allocate_hearings(&ranked, start, &cal, &spill, &mut LoadLedger::new()).unwrap();
        assert_eq!(out.last().unwrap().date, sitting[99]);
    }

    #[test]
    fn empty_ranked_list() {
        let out = allocate_hearings(
            &[],
            date(2025, 7, 7),
            &CourtCalendar::default(),
            &CapacityConfig::default(),
            &mut LoadLedger::new(),
        )
        .unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn window_defers_overflow() {
        let cal = CourtCalendar::default();
        let cap = CapacityConfig::new(1, 1, false).unwrap();
        let ranked = [
            req("a", Pool::Fresh),
            req("b", Pool::Fresh),
            req("c", Pool::Old),
        ];
        let monday = date(2025, 7, 7);
        let out =
            allocate_within(&ranked, monday, monday, &cal, &cap, &mut LoadLedger::new()).unwrap();
        assert_eq!(out.assigned.len(), 2);
        assert_eq!(out.deferred, ["b"]);
    }

    #[test]
    fn directive_examples() {
        let cal = CourtCalendar::default();
        let cap = CapacityConfig::default();
        let case = &sample_cases()[0];

        let a = schedule_directive(
            case,
            date(2025, 7, 1),
            15,
            0.9,
            &cal,
            &cap,
            &mut LoadLedger::new(),
        )
        .unwrap();
        assert_eq!(a.date, date(2025, 7, 16));
        assert_eq!(a.pool, Pool::Old);

        // Friday + 1 lands on Saturday; next sitting day is Monday
        let a = schedule_directive(
            case,
            date(2025, 7, 4),
            1,
            0.9,
            &cal,
            &cap,
            &mut LoadLedger::new(),
        )
        .unwrap();
        assert_eq!(a.date, date(2025, 7, 7));

        let mut load = LoadLedger::new();
        for _ in 0..50 {
            load.record("J1", date(2025, 7, 16), Pool::Old);
            load.record("J1", date(2025, 7, 16), Pool::Fresh);
        }
        let a = schedule_directive(case, date(2025, 7, 1), 15, 0.9, &cal, &cap, &mut load).unwrap();
        assert_eq!(a.date, date(2025, 7, 17));
        assert_eq!(load.get("J1", date(2025, 7, 17)).old, 1);
    }

    #[test]
    fn directive_rejects_disposed_and_zero_days() {
        let cal = CourtCalendar::default();
        let cap = CapacityConfig::default();
        let mut case = sample_cases()[0].clone();
        assert!(matches!(
            schedule_directive(
                &case,
                date(2025, 7, 1),
                0,
                0.9,
                &cal,
                &cap,
                &mut LoadLedger::new()
            ),
            Err(ScheduleError::InvalidDirective(_))
        ));
        case.status = crate::case::CaseStatus::Disposed;
        assert!(matches!(
            schedule_directive(
                &case,
                date(2025, 7, 1),
                3,
                0.9,
                &cal,
                &cap,
                &mut LoadLedger::new()
            ),
            Err(ScheduleError::CaseNotPending(_))
        ));
    }

    #[test]
    fn daily_count_examples() {
        let cal = CourtCalendar::default();
        let monday = date(2025, 7, 7);
        assert_eq!(daily_counts(monday, &[]), DailyCounts::default());

        let mut ranked: Vec<_> = (0..60)
            .map(|i| req(&format!("F{i}"), Pool::Fresh))
            .collect();
        ranked.extend((0..60).map(|i| req(&format!("O{i}"), Pool::Old)));
        let strict = CapacityConfig::default().with_spill(false);
        let out =
            allocate_hearings(&ranked, monday, &cal, &strict, &mut LoadLedger::new()).unwrap();
        assert_eq!(
            daily_counts(monday, &out),
            DailyCounts {
                fresh: 50,
                old: 50,
                total: 100
            }
        );

        // 49 fresh and 60 old with spill: one old case borrows the spare fresh slot
        let mut ranked: Vec<_> = (0..49)
            .map(|i| req(&format!("F{i}"), Pool::Fresh))
            .collect();
        ranked.extend((0..60).map(|i| req(&format!("O{i}"), Pool::Old)));
        let out = allocate_hearings(
            &ranked,
            monday,
            &cal,
            &CapacityConfig::default(),
            &mut LoadLedger::new(),
        )
        .unwrap();
        assert_eq!(
            daily_counts(monday, &out),
            DailyCounts {
                fresh: 49,
                old: 51,
                total: 100
            }
        );
    }

    #[test]
    fn ledger_release() {
        let mut l = LoadLedger::new();
        let d = date(2025, 7, 7);
        l.record("J1", d, Pool::Old);
        assert!(l.release("J1", d, Pool::Old));
        assert!(!l.release("J1", d, Pool::Old));
        assert_eq!(l.get("J1", d), DailyCounts::default());
    }

    #[test]
    fn pool_without_slots_is_an_error_not_a_hang() {
        let cap = CapacityConfig::new(0, 5, false).unwrap();
        let req = AllocationRequest {
            case_id: "C".into(),
            judge_id: "J1".into(),
            pool: Pool::Fresh,
            weight: 0.5,
        };
        let err = allocate_hearings(
            &[req],
            date(2025, 7, 1),
            &CourtCalendar::default(),
            &cap,
            &mut LoadLedger::new(),
        );
        assert!(matches!(err, Err(ScheduleError::InvalidCapacity(_))));
    }
}
