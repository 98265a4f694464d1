//! Plain-text `key = value` configuration for scoring and capacity.
//!
//! ```text
//! # section weights replace the built-in table when any are given
//! section.IPC:302 = 1.0
//! section.default = 0.3
//! model.sev = 0.30          # all five coefficients or none
//! model.learning_rate = 0.05
//! model.target_speed_share = 0.5
//! features.age_cap_days = 730
//! aging.enabled = true
//! aging.threshold_days = 180
//! aging.multiplier = 1.25
//! capacity.fresh = 50
//! capacity.spill = true
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::ConfigError;
use crate::rank::Scorer;
use crate::scheduler::CapacityConfig;
use crate::weight::{AgingPolicy, SectionWeightTable, WeightModel, FEATURE_NAMES};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EngineConfig {
    pub scorer: Scorer,
    pub capacity: CapacityConfig,
}

fn value<T: FromStr>(key: &str, raw: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    raw.parse().map_err(|e: T::Err| ConfigError::InvalidValue {
        key: key.to_string(),
        message: format!("{raw:?}: {e}"),
    })
}

impl EngineConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let defaults = Self::default();
        let mut sections: Vec<(String, f64)> = Vec::new();
        let mut section_default = defaults.scorer.sections.default_weight();
        let mut coefficients: [Option<f64>; 5] = [None; 5];
        let mut learning_rate = defaults.scorer.model.learning_rate();
        let mut features = defaults.scorer.features;
        let mut aging_enabled = defaults.scorer.aging.is_some();
        let base_aging = AgingPolicy::default();
        let (mut threshold, mut multiplier) =
            (base_aging.threshold_days(), base_aging.multiplier());
        let (mut fresh, mut old, mut spill) = (
            defaults.capacity.cap(crate::case::Pool::Fresh),
            defaults.capacity.cap(crate::case::Pool::Old),
            defaults.capacity.spill_enabled(),
        );

        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, val) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: idx + 1,
                message: format!("expected key = value, got {line:?}"),
            })?;
            let (key, val) = (key.trim(), val.trim());
            match key {
                "section.default" => section_default = value(key, val)?,
                "model.learning_rate" => learning_rate = value(key, val)?,
                "model.target_speed_share" => features.target_speed_share = value(key, val)?,
                "features.age_cap_days" => features.age_cap_days = value(key, val)?,
                "features.hearing_cap" => features.hearing_cap = value(key, val)?,
                "aging.enabled" => aging_enabled = value(key, val)?,
                "aging.threshold_days" => threshold = value(key, val)?,
                "aging.multiplier" => multiplier = value(key, val)?,
                "capacity.fresh" => fresh = value(key, val)?,
                "capacity.old" => old = value(key, val)?,
                "capacity.spill" => spill = value(key, val)?,
                _ => {
                    if let Some(section) = key.strip_prefix("section.") {
                        sections.push((section.to_string(), value(key, val)?));
                    } else if let Some(i) = key
                        .strip_prefix("model.")
                        .and_then(|name| FEATURE_NAMES.iter().position(|n| *n == name))
                    {
                        coefficients[i] = Some(value(key, val)?);
                    } else {
                        return Err(ConfigError::Syntax {
                            line: idx + 1,
                            message: format!("unknown key {key:?}"),
                        });
                    }
                }
            }
        }

        let table = if sections.is_empty() {
            let mut t = defaults.scorer.sections.clone();
            if section_default != t.default_weight() {
                t = SectionWeightTable::new(
                    t.entries().iter().map(|(k, v)| (k.clone(), *v)),
                    section_default,
                )?;
            }
            t
        } else {
            SectionWeightTable::new(sections, section_default)?
        };

        let given = coefficients.iter().filter(|c| c.is_some()).count();
        let model = match given {
            0 => WeightModel::default().with_learning_rate(learning_rate)?,
            5 => WeightModel::new(coefficients.map(|c| c.expect("all present")), learning_rate)?,
            _ => {
                return Err(ConfigError::InvalidValue {
                    key: "model".into(),
                    message: "give all five coefficients or none".into(),
                })
            }
        };
        if features.age_cap_days == 0 || features.hearing_cap == 0 {
            return Err(ConfigError::InvalidValue {
                key: "features".into(),
                message: "caps must be positive".into(),
            });
        }
        if !(0.0..=1.0).contains(&features.target_speed_share) {
            return Err(ConfigError::InvalidValue {
                key: "model.target_speed_share".into(),
                message: format!("{} is outside [0, 1]", features.target_speed_share),
            });
        }
        let aging = aging_enabled
            .then(|| AgingPolicy::new(threshold, multiplier))
            .transpose()?;
        let capacity =
            CapacityConfig::new(fresh, old, spill).map_err(|e| ConfigError::InvalidValue {
                key: "capacity".into(),
                message: e.to_string(),
            })?;
        Ok(Self {
            scorer: Scorer {
                model,
                sections: table,
                features,
                aging,
            },
            capacity,
        })
    }

    /// Renders a file that parses back to an equal configuration.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let s = &self.scorer;
        for (k, v) in s.sections.entries() {
            let _ = writeln!(out, "section.{k} = {v}");
        }
        let _ = writeln!(out, "section.default = {}", s.sections.default_weight());
        for (name, c) in FEATURE_NAMES.iter().zip(s.model.coefficients()) {
            let _ = writeln!(out, "model.{name} = {c}");
        }
        let _ = writeln!(out, "model.learning_rate = {}", s.model.learning_rate());
        let _ = writeln!(
            out,
            "model.target_speed_share = {}",
            s.features.target_speed_share
        );
        let _ = writeln!(out, "features.age_cap_days = {}", s.features.age_cap_days);
        let _ = writeln!(out, "features.hearing_cap = {}", s.features.hearing_cap);
        let _ = writeln!(out, "aging.enabled = {}", s.aging.is_some());
        let aging = s.aging.unwrap_or_default();
        let _ = writeln!(out, "aging.threshold_days = {}", aging.threshold_days());
        let _ = writeln!(out, "aging.multiplier = {}", aging.multiplier());
        let c = &self.capacity;
        let _ = writeln!(out, "capacity.fresh = {}", c.cap(crate::case::Pool::Fresh));
        let _ = writeln!(out, "capacity.old = {}", c.cap(crate::case::Pool::Old));
        let _ = writeln!(out, "capacity.spill = {}", c.spill_enabled());
        out
    }
}
