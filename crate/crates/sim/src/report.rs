use std::fmt::Write;

use crate::SimulationMetrics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum ReportFormat {
    #[default]
    Table,
    Json,
}

/// Renders metrics for a terminal or as pretty JSON that parses back into
/// the same value.
pub fn report(metrics: &SimulationMetrics, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(metrics).expect("metrics serialize"),
        ReportFormat::Table => table(metrics),
    }
}

const HEADER: (&str, &str) = ("metric", "value");

fn table(m: &SimulationMetrics) -> String {
    let sitting: Vec<_> = m.scheduled_per_day.iter().filter(|d| d.total > 0).collect();
    let mean_booked = if sitting.is_empty() {
        0.0
    } else {
        sitting.iter().map(|d| d.total as f64).sum::<f64>() / sitting.len() as f64
    };
    if m.days == 0 && m.generated_cases == 0 {
        return format!("{}  {}\n", HEADER.0, HEADER.1);
    }
    let mut rows: Vec<(&str, String)> = vec![(HEADER.0, HEADER.1.into())];
    rows.extend([
        ("seed", m.seed.to_string()),
        ("days simulated", m.days.to_string()),
        ("cases generated", m.generated_cases.to_string()),
        ("cases filed", m.filed_cases.to_string()),
        ("days with hearings", sitting.len().to_string()),
        ("mean hearings per sitting day", format!("{mean_booked:.2}")),
        (
            "max hearings on one day",
            m.max_scheduled_per_day.to_string(),
        ),
        ("hearings held", m.hearings_held.to_string()),
        ("first hearings held", m.first_hearings_held.to_string()),
        (
            "mean age at first hearing (days)",
            format!("{:.1}", m.mean_age_at_first_hearing_days),
        ),
        (
            "max age at first hearing (days)",
            m.max_age_at_first_hearing_days.to_string(),
        ),
        (
            "last first hearing",
            match (m.last_first_hearing, m.last_first_hearing_sitting_day) {
                (Some(d), Some(n)) => format!("{d} (sitting day {n})"),
                _ => "-".into(),
            },
        ),
        ("disposals", m.disposals.to_string()),
        ("pending at end", m.pending_at_end.to_string()),
        ("booked at end", m.booked_at_end.to_string()),
        ("starved cases", m.starvation_count.to_string()),
        (
            "low-weight decile max wait (days)",
            m.low_weight_decile_max_wait_days.to_string(),
        ),
        ("notifications sent", m.notifications_sent.to_string()),
        (
            "model coefficients",
            m.model_coefficients
                .iter()
                .map(|c| format!("{c:.4}"))
                .collect::<Vec<_>>()
                .join(" "),
        ),
    ]);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
    out
}
