//! Brute-force reference for hearing allocation on small instances. It
//! re-derives sitting days from first principles and scans every day from
//! the start for each case in rank order, with no cursors or shared state
//! beyond the list of slots already taken.

use std::collections::BTreeSet;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use docket_core::calendar::CourtCalendar;
use docket_core::case::Pool;
use docket_core::scheduler::{AllocationRequest, CapacityConfig, LoadLedger};
use rand::Rng;

#[derive(Debug, Clone)]
pub struct Instance {
    pub requests: Vec<AllocationRequest>,
    pub start: NaiveDate,
    pub holidays: BTreeSet<NaiveDate>,
    pub leaves: BTreeSet<(String, NaiveDate)>,
    pub fresh_cap: u32,
    pub old_cap: u32,
    pub spill: bool,
    pub preload: Vec<(String, NaiveDate, Pool)>,
}

impl Instance {
    pub fn calendar(&self) -> CourtCalendar {
        let mut cal = CourtCalendar::default();
        for h in &self.holidays {
            cal.add_holiday(*h);
        }
        for (j, d) in &self.leaves {
            cal.add_leave(j, *d);
        }
        cal
    }

    pub fn capacity(&self) -> CapacityConfig {
        CapacityConfig::new(self.fresh_cap, self.old_cap, self.spill).unwrap()
    }

    pub fn ledger(&self) -> LoadLedger {
        let mut l = LoadLedger::new();
        for (j, d, p) in &self.preload {
            l.record(j, *d, *p);
        }
        l
    }
}

/// (case_id, judge_id, date, pool, rank) per request, in request order.
pub type Placement = (String, String, NaiveDate, Pool, u32);

pub fn brute_force(inst: &Instance) -> Vec<Placement> {
    let mut taken: Vec<(String, NaiveDate, Pool)> = inst.preload.clone();
    let mut out = Vec::new();
    for (idx, req) in inst.requests.iter().enumerate() {
        for offset in 0..=800u64 {
            let day = inst.start + Days::new(offset);
            if matches!(day.weekday(), Weekday::Sat | Weekday::Sun)
                || inst.holidays.contains(&day)
                || inst.leaves.contains(&(req.judge_id.clone(), day))
            {
                continue;
            }
            let same_day = taken
                .iter()
                .filter(|(j, d, _)| *j == req.judge_id && *d == day);
            let total = same_day.clone().count() as u32;
            let in_pool = same_day.filter(|(_, _, p)| *p == req.pool).count() as u32;
            let cap = match req.pool {
                Pool::Fresh => inst.fresh_cap,
                Pool::Old => inst.old_cap,
            };
            if total < inst.fresh_cap + inst.old_cap && (in_pool < cap || inst.spill) {
                taken.push((req.judge_id.clone(), day, req.pool));
                out.push((
                    req.case_id.clone(),
                    req.judge_id.clone(),
                    day,
                    req.pool,
                    idx as u32 + 1,
                ));
                break;
            }
        }
    }
    out
}

/// At most 20 cases, daily capacity at most 5, up to two judges, random
/// holidays, leave and pre-existing load over the first few weeks.
pub fn random_instance(rng: &mut impl Rng) -> Instance {
    let start = NaiveDate::from_ymd_opt(2025, 7, 1).unwrap() + Days::new(rng.random_range(0..14));
    let judges = ["J1", "J2"];
    let n_judges = rng.random_range(1..=2);
    let spill = rng.random_bool(0.5);
    // Without spill each pool needs its own slots or its cases never fit.
    let (fresh_cap, old_cap) = if spill {
        let f = rng.random_range(0..=5);
        (f, rng.random_range(if f == 0 { 1 } else { 0 }..=(5 - f)))
    } else {
        let f = rng.random_range(1..=4);
        (f, rng.random_range(1..=(5 - f)))
    };
    let n_cases = rng.random_range(0..=20);
    let requests = (0..n_cases)
        .map(|i| AllocationRequest {
            case_id: format!("C{i:02}"),
            judge_id: judges[rng.random_range(0..n_judges)].to_string(),
            pool: if rng.random_bool(0.5) {
                Pool::Fresh
            } else {
                Pool::Old
            },
            weight: 1.0 - i as f64 / 32.0,
        })
        .collect();
    let day = |rng: &mut _| start + Days::new(Rng::random_range(rng, 0..28));
    let holidays = (0..rng.random_range(0..6)).map(|_| day(rng)).collect();
    let leaves = (0..rng.random_range(0..6))
        .map(|_| (judges[rng.random_range(0..n_judges)].to_string(), day(rng)))
        .collect();
    let preload = (0..rng.random_range(0..8))
        .map(|_| {
            let pool = if rng.random_bool(0.5) {
                Pool::Fresh
            } else {
                Pool::Old
            };
            (
                judges[rng.random_range(0..n_judges)].to_string(),
                day(rng),
                pool,
            )
        })
        .collect();
    let mut inst = Instance {
        requests,
        start,
        holidays,
        leaves,
        fresh_cap,
        old_cap,
        spill,
        preload,
    };
    // Pre-existing load must itself respect capacity.
    let cap = inst.capacity();
    let mut ledger = LoadLedger::new();
    inst.preload.retain(|(j, d, p)| {
        let ok = cap.admits(&ledger.get(j, *d), *p);
        if ok {
            ledger.record(j, *d, *p);
        }
        ok
    });
    inst
}
