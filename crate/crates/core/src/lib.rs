//! Court-case prioritization and hearing scheduling.
//!
//! Pending cases are scored by a convex linear model over normalized case
//! features, boosted when they have waited too long, ranked, and given
//! hearing dates under a daily fresh/old capacity split that respects
//! weekends, court holidays and judge leave. Disposals feed the model back
//! and every mutation lands in an append-only audit log.

pub mod audit;
pub mod calendar;
pub mod case;
pub mod clock;
pub mod config;
pub mod engine;
pub mod error;
pub mod fixtures;
pub mod journal;
pub mod notify;
pub mod perf;
pub mod rank;
pub mod scheduler;
pub mod store;
pub mod weight;
