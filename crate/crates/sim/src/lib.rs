//! Synthetic caseloads and a day-by-day simulation of the docket.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`):
//! stream 0 generates the caseload and stream 1 drives judge decisions.

mod config;
mod generate;
mod report;
mod simulate;

pub use config::{LeaveDay, SimConfig};
pub use generate::{case_rng, generate_cases};
pub use report::{report, ReportFormat};
pub use simulate::{run_simulation, DayCount, SimulationMetrics, SimulationOutput};

use docket_core::error::EngineError;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("invariant violated on {date}: {message}")]
    InvariantViolation {
        date: chrono::NaiveDate,
        message: String,
    },
    #[error(transparent)]
    Engine(#[from] EngineError),
}
