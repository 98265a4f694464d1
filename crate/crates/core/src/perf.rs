//! Execution-time bookkeeping per named operation.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationTiming {
    pub operation: String,
    pub duration_micros: u64,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, Default)]
struct Stats {
    count: u64,
    total: Duration,
    max: Duration,
    last: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationStats {
    pub operation: String,
    pub count: u64,
    pub mean_micros: f64,
    pub max_micros: u64,
    pub last_at: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone, Default)]
pub struct PerfLog {
    stats: BTreeMap<String, Stats>,
}

impl PerfLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, operation: &str, elapsed: Duration) -> OperationTiming {
        let now = Utc::now();
        let s = self.stats.entry(operation.to_string()).or_default();
        s.count += 1;
        s.total += elapsed;
        s.max = s.max.max(elapsed);
        s.last = Some(now);
        OperationTiming {
            operation: operation.to_string(),
            duration_micros: elapsed.as_micros() as u64,
            timestamp: now,
        }
    }

    /// Runs `f` and records how long it took.
    pub fn time<R>(&mut self, operation: &str, f: impl FnOnce() -> R) -> R {
        let start = Instant::now();
        let out = f();
        self.record(operation, start.elapsed());
        out
    }

    pub fn count(&self, operation: &str) -> u64 {
        self.stats.get(operation).map_or(0, |s| s.count)
    }

    pub fn report(&self) -> Vec<OperationStats> {
        self.stats
            .iter()
            .map(|(op, s)| OperationStats {
                operation: op.clone(),
                count: s.count,
                mean_micros: s.total.as_secs_f64() * 1e6 / s.count as f64,
                max_micros: s.max.as_micros() as u64,
                last_at: s.last,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregates_per_operation() {
        let mut log = PerfLog::new();
        assert!(log.report().is_empty());
        log.record("rank", Duration::from_micros(10));
        log.record("rank", Duration::from_micros(30));
        log.record("allocate", Duration::from_micros(5));
        let r = log.report();
        assert_eq!(r.len(), 2);
        let rank = r.iter().find(|s| s.operation == "rank").unwrap();
        assert_eq!((rank.count, rank.max_micros), (2, 30));
        assert!((rank.mean_micros - 20.0).abs() < 1e-9);
        assert_eq!(log.time("x", || 7), 7);
        assert_eq!(log.count("x"), 1);
        assert_eq!(log.count("missing"), 0);
    }
}
