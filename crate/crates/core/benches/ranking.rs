use std::hint::black_box;

use chrono::{Days, NaiveDate};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use docket_core::case::{
    CaseRecord, CaseStatus, CaseType, CreatedBy, HearingEntry, PriorityLevel, Severity,
};
use docket_core::rank::{rank_cases_sequential, Scorer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SECTIONS: [&str; 8] = [
    "IPC:302",
    "IPC:34",
    "IPC:420",
    "IPC:406",
    "IPC:323",
    "CRPC:200",
    "HMA-1955:13",
    "ICA-1872:73",
];

fn caseload(n: usize, seed: u64) -> Vec<CaseRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let origin = NaiveDate::from_ymd_opt(2023, 1, 1).unwrap();
    (0..n)
        .map(|i| {
            let filing = origin + Days::new(rng.random_range(0..900));
            let hearings = (0..rng.random_range(0..4u64))
                .map(|k| HearingEntry::adjourned(filing + Days::new(1 + k * 40)))
                .collect();
            CaseRecord {
                case_id: format!("B{i:05}"),
                case_type: CaseType::ALL[rng.random_range(0..3)],
                filing_date: filing,
                severity: Severity::ALL[rng.random_range(0..3)],
                priority_level: PriorityLevel::ALL[rng.random_range(0..3)],
                legal_sections: vec![SECTIONS[rng.random_range(0..SECTIONS.len())]
                    .parse()
                    .unwrap()],
                hearings,
                status: CaseStatus::Pending,
                appeal_of: None,
                judge_id: "J1".into(),
                created_by: CreatedBy::Registrar,
            }
        })
        .collect()
}

fn ranking(c: &mut Criterion) {
    let today = NaiveDate::from_ymd_opt(2025, 7, 1).unwrap();
    let scorer = Scorer::default();
    let mut group = c.benchmark_group("rank_cases");
    for n in [1_000usize, 10_000] {
        let cases = caseload(n, 42);
        group.bench_with_input(BenchmarkId::new("sequential", n), &cases, |b, cases| {
            b.iter(|| rank_cases_sequential(black_box(cases), today, &scorer))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", n), &cases, |b, cases| {
            b.iter(|| docket_core::rank::rank_cases_parallel(black_box(cases), today, &scorer))
        });
    }
    group.finish();
}

criterion_group!(benches, ranking);
criterion_main!(benches);
