//! Court sitting calendar: weekends, court holidays and per-judge leave.
//!
//! File format, one entry per line:
//!
//! ```text
//! # court holidays
//! 2025-08-15
//! # judge leave
//! J1,2025-09-02
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, ScheduleError};

/// How far ahead `next_sitting_day` looks before declaring the calendar
/// pathological.
pub const SITTING_HORIZON_DAYS: u32 = 366;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CourtCalendar {
    pub holidays: BTreeSet<NaiveDate>,
    pub judge_leaves: BTreeMap<String, BTreeSet<NaiveDate>>,
    /// Weekdays that never sit.
    pub weekend: Vec<Weekday>,
}

impl Default for CourtCalendar {
    fn default() -> Self {
        Self {
            holidays: BTreeSet::new(),
            judge_leaves: BTreeMap::new(),
            weekend: vec![Weekday::Sat, Weekday::Sun],
        }
    }
}

impl CourtCalendar {
    pub fn add_holiday(&mut self, date: NaiveDate) -> bool {
        self.holidays.insert(date)
    }

    pub fn add_leave(&mut self, judge_id: &str, date: NaiveDate) -> bool {
        self.judge_leaves
            .entry(judge_id.to_string())
            .or_default()
            .insert(date)
    }

    pub fn is_leave(&self, judge_id: &str, date: NaiveDate) -> bool {
        self.judge_leaves
            .get(judge_id)
            .is_some_and(|days| days.contains(&date))
    }

    pub fn leave_day_count(&self) -> usize {
        self.judge_leaves.values().map(BTreeSet::len).sum()
    }

    /// Adds every entry of a calendar file.
    pub fn merge_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: String| ConfigError::Syntax {
                line: idx + 1,
                message,
            };
            match line.split_once(',') {
                Some((judge, day)) => {
                    let judge = judge.trim();
                    if judge.is_empty() {
                        return Err(syntax("empty judge id".into()));
                    }
                    let day = parse_iso(day.trim()).map_err(syntax)?;
                    self.add_leave(judge, day);
                }
                None => {
                    let day = parse_iso(line).map_err(syntax)?;
                    self.add_holiday(day);
                }
            }
        }
        Ok(())
    }

    pub fn parse_file(text: &str) -> Result<Self, ConfigError> {
        let mut cal = Self::default();
        cal.merge_file(text)?;
        Ok(cal)
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for day in &self.holidays {
            let _ = writeln!(out, "{day}");
        }
        for (judge, days) in &self.judge_leaves {
            for day in days {
                let _ = writeln!(out, "{judge},{day}");
            }
        }
        out
    }
}

fn parse_iso(s: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| format!("bad date {s:?}: {e}"))
}

pub fn is_sitting_day(date: NaiveDate, judge_id: &str, calendar: &CourtCalendar) -> bool {
    !calendar.weekend.contains(&date.weekday())
        && !calendar.holidays.contains(&date)
        && !calendar.is_leave(judge_id, date)
}

/// Smallest sitting day on or after `from`.
pub fn next_sitting_day(
    from: NaiveDate,
    judge_id: &str,
    calendar: &CourtCalendar,
) -> Result<NaiveDate, ScheduleError> {
    let mut day = from;
    for _ in 0..=SITTING_HORIZON_DAYS {
        if is_sitting_day(day, judge_id, calendar) {
            return Ok(day);
        }
        day = day + Days::new(1);
    }
    Err(ScheduleError::NoSittingDayWithinHorizon {
        judge_id: judge_id.to_string(),
        from,
        horizon_days: SITTING_HORIZON_DAYS,
    })
}
