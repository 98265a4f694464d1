//! Case scoring: normalized features, a convex linear weight model that is
//! refined online from disposal outcomes, and the pendency-based aging
//! boost that keeps low-weight cases from waiting forever.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::case::{case_age_days, CaseRecord, LegalSectionRef, PriorityLevel, Severity};
use crate::error::{CaseError, ConfigError};

pub const FEATURE_NAMES: [&str; 5] = ["sev", "pri", "age", "sec", "hear"];

/// Default coefficients over (sev, pri, age, sec, hear).
pub const DEFAULT_COEFFICIENTS: [f64; 5] = [0.30, 0.25, 0.20, 0.15, 0.10];
pub const DEFAULT_LEARNING_RATE: f64 = 0.05;

/// Sum-to-one tolerance for model coefficients.
pub const COEFFICIENT_SUM_TOLERANCE: f64 = 1e-9;

pub fn severity_score(severity: Severity) -> f64 {
    match severity {
        Severity::High => 1.0,
        Severity::Medium => 0.6,
        Severity::Low => 0.2,
    }
}

pub fn priority_score(priority: PriorityLevel) -> f64 {
    match priority {
        PriorityLevel::Urgent => 1.0,
        PriorityLevel::Medium => 0.6,
        PriorityLevel::Ordinary => 0.2,
    }
}

/// (sev, pri) scores.
pub fn enum_scores(severity: Severity, priority: PriorityLevel) -> (f64, f64) {
    (severity_score(severity), priority_score(priority))
}

/// Expert-editable statute section weights with a fallback for sections not
/// listed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionWeightTable {
    entries: BTreeMap<String, f64>,
    default_weight: f64,
}

impl Default for SectionWeightTable {
    fn default() -> Self {
        let entries = [
            ("IPC:302", 1.0),
            ("IPC:34", 0.7),
            ("IPC:420", 0.8),
            ("IPC:406", 0.7),
            ("IPC:323", 0.4),
            ("CRPC:200", 0.3),
            ("HMA-1955:13", 0.5),
            ("ICA-1872:73", 0.3),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        Self {
            entries,
            default_weight: 0.3,
        }
    }
}

fn check_unit(key: &str, value: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ConfigError::InvalidValue {
            key: key.to_string(),
            message: format!("{value} is outside [0, 1]"),
        })
    }
}

impl SectionWeightTable {
    pub fn new(
        entries: impl IntoIterator<Item = (String, f64)>,
        default_weight: f64,
    ) -> Result<Self, ConfigError> {
        check_unit("default", default_weight)?;
        let mut table = Self {
            entries: BTreeMap::new(),
            default_weight,
        };
        for (key, weight) in entries {
            table.set(&key, weight)?;
        }
        Ok(table)
    }

    pub fn empty(default_weight: f64) -> Result<Self, ConfigError> {
        Self::new(std::iter::empty(), default_weight)
    }

    /// Inserts or replaces a weight; the key is canonicalized first.
    pub fn set(&mut self, key: &str, weight: f64) -> Result<(), ConfigError> {
        let section: LegalSectionRef = key.parse().map_err(
            |e: crate::case::SectionParseError| ConfigError::InvalidValue {
                key: key.to_string(),
                message: e.to_string(),
            },
        )?;
        check_unit(key, weight)?;
        self.entries.insert(section.canonical(), weight);
        Ok(())
    }

    pub fn weight(&self, section: &LegalSectionRef) -> f64 {
        self.entries
            .get(&section.canonical())
            .copied()
            .unwrap_or(self.default_weight)
    }

    pub fn default_weight(&self) -> f64 {
        self.default_weight
    }

    pub fn entries(&self) -> &BTreeMap<String, f64> {
        &self.entries
    }
}

/// Highest configured weight among the sections, or the default weight for
/// an empty list.
pub fn section_score(sections: &[LegalSectionRef], table: &SectionWeightTable) -> f64 {
    sections
        .iter()
        .map(|s| table.weight(s))
        .reduce(f64::max)
        .unwrap_or(table.default_weight)
}

/// Saturation points for the age and hearing-count features, and the mix
/// used to label disposals for learning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub age_cap_days: u32,
    pub hearing_cap: u32,
    /// Share of the outcome target taken from disposal speed; the rest comes
    /// from the priority score.
    pub target_speed_share: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            age_cap_days: 730,
            hearing_cap: 10,
            target_speed_share: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub sev: f64,
    pub pri: f64,
    pub age: f64,
    pub sec: f64,
    pub hear: f64,
}

impl FeatureVector {
    pub fn from_array(v: [f64; 5]) -> Self {
        Self {
            sev: v[0],
            pri: v[1],
            age: v[2],
            sec: v[3],
            hear: v[4],
        }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.sev, self.pri, self.age, self.sec, self.hear]
    }

    pub fn is_normalized(&self) -> bool {
        self.to_array().iter().all(|x| (0.0..=1.0).contains(x))
    }
}

pub fn feature_vector(
    case: &CaseRecord,
    today: NaiveDate,
    table: &SectionWeightTable,
    config: &FeatureConfig,
) -> Result<FeatureVector, CaseError> {
    let age_days = case_age_days(case, today)?;
    let (sev, pri) = enum_scores(case.severity, case.priority_level);
    Ok(FeatureVector {
        sev,
        pri,
        age: ratio_capped(age_days as f64, config.age_cap_days as f64),
        sec: section_score(&case.legal_sections, table),
        hear: ratio_capped(case.hearing_count() as f64, config.hearing_cap as f64),
    })
}

fn ratio_capped(value: f64, cap: f64) -> f64 {
    if cap <= 0.0 {
        1.0
    } else {
        (value / cap).min(1.0)
    }
}

/// Convex linear scorer. Coefficients are nonnegative and sum to one, so a
/// normalized feature vector always scores in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightModel {
    coefficients: [f64; 5],
    learning_rate: f64,
    samples_seen: u64,
}

impl Default for WeightModel {
    fn default() -> Self {
        Self {
            coefficients: DEFAULT_COEFFICIENTS,
            learning_rate: DEFAULT_LEARNING_RATE,
            samples_seen: 0,
        }
    }
}

impl WeightModel {
    pub fn new(coefficients: [f64; 5], learning_rate: f64) -> Result<Self, ConfigError> {
        if coefficients.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(ConfigError::InvalidValue {
                key: "model.coefficients".into(),
                message: "coefficients must be finite and nonnegative".into(),
            });
        }
        let sum: f64 = coefficients.iter().sum();
        if (sum - 1.0).abs() > COEFFICIENT_SUM_TOLERANCE {
            return Err(ConfigError::InvalidValue {
                key: "model.coefficients".into(),
                message: format!("coefficients sum to {sum}, expected 1"),
            });
        }
        if !(learning_rate.is_finite() && learning_rate > 0.0) {
            return Err(ConfigError::InvalidValue {
                key: "model.learning_rate".into(),
                message: format!("{learning_rate} is not a positive rate"),
            });
        }
        Ok(Self {
            coefficients,
            learning_rate,
            samples_seen: 0,
        })
    }

    pub fn coefficients(&self) -> [f64; 5] {
        self.coefficients
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn samples_seen(&self) -> u64 {
        self.samples_seen
    }

    /// Restores the number of updates already applied, e.g. after replay.
    pub fn with_samples_seen(mut self, samples_seen: u64) -> Self {
        self.samples_seen = samples_seen;
        self
    }

    pub fn with_learning_rate(mut self, learning_rate: f64) -> Result<Self, ConfigError> {
        Self::new(self.coefficients, learning_rate)?;
        self.learning_rate = learning_rate;
        Ok(self)
    }

    pub fn predict(&self, features: &FeatureVector) -> f64 {
        base_weight(features, self)
    }

    pub fn invariants_hold(&self) -> bool {
        let sum: f64 = self.coefficients.iter().sum();
        self.coefficients.iter().all(|c| *c >= 0.0)
            && (sum - 1.0).abs() <= COEFFICIENT_SUM_TOLERANCE
            && self.learning_rate > 0.0
    }
}

pub fn base_weight(features: &FeatureVector, model: &WeightModel) -> f64 {
    let dot: f64 = features
        .to_array()
        .iter()
        .zip(model.coefficients.iter())
        .map(|(x, w)| x * w)
        .sum();
    dot.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgingPolicy {
    threshold_days: u32,
    multiplier: f64,
    cap: f64,
}

impl Default for AgingPolicy {
    fn default() -> Self {
        Self {
            threshold_days: 180,
            multiplier: 1.25,
            cap: 1.0,
        }
    }
}

impl AgingPolicy {
    pub fn new(threshold_days: u32, multiplier: f64) -> Result<Self, ConfigError> {
        if threshold_days < 1 {
            return Err(ConfigError::InvalidValue {
                key: "aging.threshold_days".into(),
                message: "must be at least 1".into(),
            });
        }
        if !(multiplier.is_finite() && multiplier > 1.0) {
            return Err(ConfigError::InvalidValue {
                key: "aging.multiplier".into(),
                message: format!("{multiplier} must be greater than 1"),
            });
        }
        Ok(Self {
            threshold_days,
            multiplier,
            cap: 1.0,
        })
    }

    pub fn threshold_days(&self) -> u32 {
        self.threshold_days
    }

    pub fn multiplier(&self) -> f64 {
        self.multiplier
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }
}

/// `min(cap, base * multiplier^k)` with `k` the number of completed
/// threshold periods since the last activity.
pub fn aging_boost(base: f64, days_since_last_activity: u32, policy: &AgingPolicy) -> f64 {
    let periods = days_since_last_activity / policy.threshold_days;
    if periods == 0 || base <= 0.0 {
        return base.min(policy.cap);
    }
    // Past ~200 periods the product saturates the cap for any base worth
    // boosting; bounding the exponent keeps powi finite.
    let periods = periods.min(i32::MAX as u32) as i32;
    let boosted = base * policy.multiplier.powi(periods);
    if boosted.is_finite() {
        boosted.min(policy.cap)
    } else {
        policy.cap
    }
}

/// Training example produced when a case is disposed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSample {
    pub features: FeatureVector,
    pub target: f64,
}

/// Urgency label for a disposed case: the speed of disposal relative to the
/// age cap, blended with the entry priority score.
pub fn outcome_target(
    features: &FeatureVector,
    disposal_latency_days: u32,
    config: &FeatureConfig,
) -> f64 {
    let speed = 1.0 - ratio_capped(disposal_latency_days as f64, config.age_cap_days as f64);
    let share = config.target_speed_share;
    (share * speed + (1.0 - share) * features.pri).clamp(0.0, 1.0)
}

/// One raw stochastic-gradient step on `(prediction - target)^2`, before
/// projection back onto the simplex.
pub fn gradient_step(
    coefficients: [f64; 5],
    sample: &OutcomeSample,
    learning_rate: f64,
) -> [f64; 5] {
    let x = sample.features.to_array();
    let prediction: f64 = x.iter().zip(coefficients.iter()).map(|(a, b)| a * b).sum();
    let residual = sample.target - prediction;
    let mut out = coefficients;
    for (w, xi) in out.iter_mut().zip(x) {
        *w += 2.0 * learning_rate * residual * xi;
    }
    out
}

/// Gradient step, clamp at zero, renormalize to sum one. If every
/// coefficient clamps to zero the previous coefficients are kept.
pub fn update_coefficients(model: &WeightModel, sample: &OutcomeSample) -> WeightModel {
    let raw = gradient_step(model.coefficients, sample, model.learning_rate);
    let clamped = raw.map(|w| if w.is_finite() { w.max(0.0) } else { 0.0 });
    let sum: f64 = clamped.iter().sum();
    let coefficients = if sum > f64::EPSILON {
        clamped.map(|w| w / sum)
    } else {
        model.coefficients
    };
    WeightModel {
        coefficients,
        learning_rate: model.learning_rate,
        samples_seen: model.samples_seen + 1,
    }
}
