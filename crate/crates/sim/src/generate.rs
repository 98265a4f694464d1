//! Synthetic caseload. Every draw comes from one ChaCha8 stream seeded with
//! the configured 64-bit seed, in a fixed order per case, so the output is
//! a pure function of the config.

use chrono::{Days, NaiveDate};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use docket_core::case::{
    days_between, CaseRecord, CaseStatus, CaseType, CreatedBy, HearingEntry, LegalSectionRef,
    PriorityLevel, Severity,
};

use crate::{SimConfig, SimError};

/// Sections a case of each type may cite.
fn section_pool(case_type: CaseType) -> &'static [&'static str] {
    match case_type {
        CaseType::Criminal => &[
            "IPC:302", "IPC:34", "IPC:420", "IPC:406", "IPC:323", "CRPC:200",
        ],
        CaseType::Civil => &["ICA-1872:73", "IPC:420", "IPC:406"],
        CaseType::Family => &["HMA-1955:13", "CRPC:200"],
    }
}

fn weighted(name: &str, mix: &[f64; 3]) -> Result<WeightedIndex<f64>, SimError> {
    WeightedIndex::new(mix).map_err(|e| SimError::InvalidDistribution(format!("{name}: {e}")))
}

/// The RNG used for case generation. Decisions during the run use stream 1
/// of the same seed.
pub fn case_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn generate_cases(config: &SimConfig) -> Result<Vec<CaseRecord>, SimError> {
    config.validate()?;
    let types = weighted("type_mix", &config.type_mix)?;
    let severities = weighted("severity_mix", &config.severity_mix)?;
    let priorities = weighted("priority_mix", &config.priority_mix)?;
    let judges = config.judge_ids();
    let span = days_between(config.filing_from, config.filing_to).expect("validated order") as u64;
    let mut rng = case_rng(config.seed);

    let mut cases = Vec::with_capacity(config.n_cases);
    for i in 0..config.n_cases {
        let case_type = CaseType::ALL[types.sample(&mut rng)];
        let severity = Severity::ALL[severities.sample(&mut rng)];
        let priority_level = PriorityLevel::ALL[priorities.sample(&mut rng)];
        let filing_date = config.filing_from + Days::new(rng.random_range(0..=span));
        let pool = section_pool(case_type);
        let n_sections = rng.random_range(1..=2usize.min(pool.len()));
        let mut legal_sections: Vec<LegalSectionRef> = Vec::with_capacity(n_sections);
        while legal_sections.len() < n_sections {
            let s: LegalSectionRef = pool[rng.random_range(0..pool.len())]
                .parse()
                .expect("static section keys parse");
            if !legal_sections.contains(&s) {
                legal_sections.push(s);
            }
        }
        let judge_id = judges[rng.random_range(0..judges.len())].clone();
        let hearings = if rng.random_bool(config.old_case_fraction) {
            prior_hearings(&mut rng, filing_date, config.start_date)
        } else {
            Vec::new()
        };
        cases.push(CaseRecord {
            case_id: format!("S{:06}", i + 1),
            case_type,
            filing_date,
            severity,
            priority_level,
            legal_sections,
            hearings,
            status: CaseStatus::Pending,
            appeal_of: None,
            judge_id,
            created_by: CreatedBy::Registrar,
        });
    }
    Ok(cases)
}

/// One to four adjourned hearings strictly between filing and `before`.
fn prior_hearings(rng: &mut ChaCha8Rng, filing: NaiveDate, before: NaiveDate) -> Vec<HearingEntry> {
    let Some(gap) = days_between(filing, before).filter(|g| *g >= 2) else {
        return Vec::new();
    };
    let n = rng.random_range(1..=4u32).min(gap - 1);
    let mut offsets: Vec<u32> = (0..n).map(|_| rng.random_range(1..gap)).collect();
    offsets.sort_unstable();
    offsets.dedup();
    offsets
        .into_iter()
        .map(|o| HearingEntry::adjourned(filing + Days::new(o as u64)))
        .collect()
}
