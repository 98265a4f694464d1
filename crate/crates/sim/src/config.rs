use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use docket_core::calendar::CourtCalendar;
use docket_core::config::EngineConfig;
use docket_core::scheduler::CapacityConfig;
use docket_core::weight::AgingPolicy;

use crate::SimError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaveDay {
    pub judge: String,
    pub date: NaiveDate,
}

/// Everything a run depends on. Two runs with equal configs produce
/// identical metrics and assignment files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub n_cases: usize,
    pub seed: u64,
    pub days: u32,
    /// First simulated day.
    pub start_date: NaiveDate,
    /// Filing dates are drawn uniformly from this inclusive range. Cases
    /// filed after the start date enter the docket on their filing day.
    pub filing_from: NaiveDate,
    pub filing_to: NaiveDate,
    /// Share of cases that already had hearings before the start date.
    pub old_case_fraction: f64,
    pub judges: u32,
    pub fresh_cap: u32,
    pub old_cap: u32,
    pub spill: bool,
    pub holidays: Vec<NaiveDate>,
    pub leaves: Vec<LeaveDay>,
    /// Over (Criminal, Civil, Family).
    pub type_mix: [f64; 3],
    /// Over (High, Medium, Low).
    pub severity_mix: [f64; 3],
    /// Over (Urgent, Medium, Ordinary).
    pub priority_mix: [f64; 3],
    pub dispose_probability: f64,
    pub directive_min_days: u32,
    pub directive_max_days: u32,
    /// How far ahead each daily scheduling run may book.
    pub lookahead_days: u32,
    pub aging: bool,
    pub aging_threshold_days: u32,
    pub aging_multiplier: f64,
    pub learning: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        let d = |y, m, day| NaiveDate::from_ymd_opt(y, m, day).expect("valid literal date");
        let aging = AgingPolicy::default();
        Self {
            n_cases: 10_000,
            seed: 42,
            days: 250,
            start_date: d(2025, 1, 1),
            filing_from: d(2023, 1, 1),
            filing_to: d(2025, 1, 1),
            old_case_fraction: 0.3,
            judges: 1,
            fresh_cap: 50,
            old_cap: 50,
            spill: true,
            holidays: Vec::new(),
            leaves: Vec::new(),
            type_mix: [0.5, 0.3, 0.2],
            severity_mix: [0.3, 0.4, 0.3],
            priority_mix: [0.2, 0.3, 0.5],
            dispose_probability: 0.25,
            directive_min_days: 7,
            directive_max_days: 30,
            lookahead_days: 30,
            aging: true,
            aging_threshold_days: aging.threshold_days(),
            aging_multiplier: aging.multiplier(),
            learning: true,
        }
    }
}

fn check_mix(name: &str, mix: &[f64; 3]) -> Result<(), SimError> {
    let sum: f64 = mix.iter().sum();
    if mix.iter().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(SimError::InvalidDistribution(format!(
            "{name} {mix:?} must be nonnegative and sum to 1"
        )));
    }
    Ok(())
}

/// Bare TOML dates (`2025-01-26`) become strings so they parse as `NaiveDate`.
fn dates_to_strings(value: &mut toml::Value) {
    match value {
        toml::Value::Datetime(d) => *value = toml::Value::String(d.to_string()),
        toml::Value::Array(items) => items.iter_mut().for_each(dates_to_strings),
        toml::Value::Table(t) => t.iter_mut().for_each(|(_, v)| dates_to_strings(v)),
        _ => {}
    }
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self, SimError> {
        let invalid = |e: &dyn std::fmt::Display| SimError::InvalidConfig(e.to_string());
        let mut table: toml::Table = toml::from_str(text).map_err(|e| invalid(&e))?;
        for (_, v) in table.iter_mut() {
            dates_to_strings(v);
        }
        let cfg: Self = toml::Value::Table(table)
            .try_into()
            .map_err(|e| invalid(&e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::InvalidConfig(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        check_mix("type_mix", &self.type_mix)?;
        check_mix("severity_mix", &self.severity_mix)?;
        check_mix("priority_mix", &self.priority_mix)?;
        let invalid = |m: &str| Err(SimError::InvalidConfig(m.to_string()));
        if !(0.0..=1.0).contains(&self.dispose_probability) {
            return invalid("dispose_probability must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.old_case_fraction) {
            return invalid("old_case_fraction must lie in [0, 1]");
        }
        if self.directive_min_days == 0 || self.directive_min_days > self.directive_max_days {
            return invalid("directive window must satisfy 1 <= min <= max");
        }
        if self.filing_from > self.filing_to {
            return invalid("filing_from is after filing_to");
        }
        if self.judges == 0 {
            return invalid("at least one judge is needed");
        }
        self.capacity()?;
        self.engine_config()?;
        Ok(())
    }

    pub fn judge_ids(&self) -> Vec<String> {
        (1..=self.judges).map(|i| format!("J{i}")).collect()
    }

    pub fn capacity(&self) -> Result<CapacityConfig, SimError> {
        CapacityConfig::new(self.fresh_cap, self.old_cap, self.spill)
            .map_err(|e| SimError::InvalidConfig(e.to_string()))
    }

    pub fn calendar(&self) -> CourtCalendar {
        let mut cal = CourtCalendar::default();
        for h in &self.holidays {
            cal.add_holiday(*h);
        }
        for l in &self.leaves {
            cal.add_leave(&l.judge, l.date);
        }
        cal
    }

    pub fn engine_config(&self) -> Result<EngineConfig, SimError> {
        let mut cfg = EngineConfig {
            capacity: self.capacity()?,
            ..EngineConfig::default()
        };
        cfg.scorer.aging = if self.aging {
            Some(
                AgingPolicy::new(self.aging_threshold_days, self.aging_multiplier)
                    .map_err(|e| SimError::InvalidConfig(e.to_string()))?,
            )
        } else {
            None
        };
        Ok(cfg)
    }
}
