//! The five-case illustrative caseload used across tests, demos and the
//! acceptance suite.
//!
//! Hearing counts, dates of filing, severities, priorities and sections are
//! the published values. The individual hearing dates are not published,
//! so each history is laid out between filing and 2025-07-01 with the last
//! hearing inside the default 180-day aging window.

use chrono::NaiveDate;

use crate::case::{
    CaseRecord, CaseStatus, CaseType, CreatedBy, HearingEntry, LegalSectionRef, PriorityLevel,
    Severity,
};

pub const SAMPLE_JUDGE: &str = "J1";

/// Reference date at which the published ordering is checked.
pub fn sample_reference_date() -> NaiveDate {
    date(2025, 7, 1)
}

/// Published ordering, highest weight first.
pub const SAMPLE_ORDER: [&str; 5] = ["001", "004", "003", "005", "002"];

pub fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid fixture date")
}

fn sections(list: &[&str]) -> Vec<LegalSectionRef> {
    list.iter()
        .map(|s| s.parse().expect("valid fixture section"))
        .collect()
}

fn hearings(dates: &[(i32, u32, u32)]) -> Vec<HearingEntry> {
    dates
        .iter()
        .map(|&(y, m, d)| HearingEntry::adjourned(date(y, m, d)))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn case(
    id: &str,
    case_type: CaseType,
    filed: NaiveDate,
    severity: Severity,
    priority_level: PriorityLevel,
    secs: &[&str],
    history: &[(i32, u32, u32)],
) -> CaseRecord {
    CaseRecord {
        case_id: id.to_string(),
        case_type,
        filing_date: filed,
        severity,
        priority_level,
        legal_sections: sections(secs),
        hearings: hearings(history),
        status: CaseStatus::Pending,
        appeal_of: None,
        judge_id: SAMPLE_JUDGE.to_string(),
        created_by: CreatedBy::Registrar,
    }
}

/// Cases 001..005 in id order.
pub fn sample_cases() -> Vec<CaseRecord> {
    vec![
        case(
            "001",
            CaseType::Criminal,
            date(2024, 1, 1),
            Severity::High,
            PriorityLevel::Urgent,
            &["IPC:302", "IPC:34"],
            &[(2024, 3, 15), (2024, 8, 20), (2025, 1, 10), (2025, 5, 20)],
        ),
        case(
            "002",
            CaseType::Civil,
            date(2025, 2, 1),
            Severity::Low,
            PriorityLevel::Ordinary,
            &["ICA-1872:73"],
            &[],
        ),
        case(
            "003",
            CaseType::Family,
            date(2024, 6, 1),
            Severity::Medium,
            PriorityLevel::Medium,
            &["HMA-1955:13"],
            &[(2024, 8, 5), (2024, 12, 10), (2025, 4, 8)],
        ),
        case(
            "004",
            CaseType::Criminal,
            date(2024, 2, 1),
            Severity::High,
            PriorityLevel::Urgent,
            &["IPC:420", "IPC:406"],
            &[
                (2024, 3, 10),
                (2024, 6, 12),
                (2024, 10, 15),
                (2025, 2, 11),
                (2025, 6, 3),
            ],
        ),
        case(
            "005",
            CaseType::Criminal,
            date(2025, 4, 1),
            Severity::Medium,
            PriorityLevel::Ordinary,
            &["IPC:323", "CRPC:200"],
            &[(2025, 5, 6), (2025, 6, 10)],
        ),
    ]
}
