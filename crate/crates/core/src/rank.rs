//! Ranking of pending cases by effective weight.
//!
//! Per-case scoring is independent, so with the `parallel` feature it fans
//! out over rayon. The final order comes from a total comparator (weight,
//! then filing date, then case id), which makes both paths produce the same
//! output for the same input.

use std::borrow::Borrow;
use std::cmp::Ordering;

use chrono::NaiveDate;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::case::{days_between, CaseRecord};
use crate::error::CaseError;
use crate::weight::{
    aging_boost, base_weight, feature_vector, AgingPolicy, FeatureConfig, FeatureVector,
    SectionWeightTable, WeightModel,
};

/// Everything needed to score a case.
#[derive(Debug, Clone, PartialEq)]
pub struct Scorer {
    pub model: WeightModel,
    pub sections: SectionWeightTable,
    pub features: FeatureConfig,
    /// `None` disables the aging review.
    pub aging: Option<AgingPolicy>,
}

impl Default for Scorer {
    fn default() -> Self {
        Self {
            model: WeightModel::default(),
            sections: SectionWeightTable::default(),
            features: FeatureConfig::default(),
            aging: Some(AgingPolicy::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseScore {
    pub features: FeatureVector,
    pub base_weight: f64,
    pub effective_weight: f64,
}

impl Scorer {
    pub fn score(&self, case: &CaseRecord, today: NaiveDate) -> Result<CaseScore, CaseError> {
        let features = feature_vector(case, today, &self.sections, &self.features)?;
        let base = base_weight(&features, &self.model);
        let effective = match &self.aging {
            Some(policy) => {
                let idle = days_between(case.last_activity_date(), today).unwrap_or(0);
                aging_boost(base, idle, policy)
            }
            None => base,
        };
        Ok(CaseScore {
            features,
            base_weight: base,
            effective_weight: effective,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCase {
    pub case_id: String,
    pub effective_weight: f64,
    pub filing_date: NaiveDate,
}

#[derive(Debug, Clone, Default)]
pub struct RankOutcome {
    pub ranked: Vec<RankedCase>,
    /// Cases that could not be scored; they are skipped, not fatal.
    pub rejected: Vec<(String, CaseError)>,
}

fn compare(a: &RankedCase, b: &RankedCase) -> Ordering {
    b.effective_weight
        .total_cmp(&a.effective_weight)
        .then_with(|| a.filing_date.cmp(&b.filing_date))
        .then_with(|| a.case_id.cmp(&b.case_id))
}

fn score_one(
    case: &CaseRecord,
    today: NaiveDate,
    scorer: &Scorer,
) -> Result<RankedCase, (String, CaseError)> {
    scorer
        .score(case, today)
        .map(|s| RankedCase {
            case_id: case.case_id.clone(),
            effective_weight: s.effective_weight,
            filing_date: case.filing_date,
        })
        .map_err(|e| (case.case_id.clone(), e))
}

fn finish(results: Vec<Result<RankedCase, (String, CaseError)>>) -> RankOutcome {
    let mut out = RankOutcome::default();
    for r in results {
        match r {
            Ok(c) => out.ranked.push(c),
            Err(e) => out.rejected.push(e),
        }
    }
    out.ranked.sort_unstable_by(compare);
    out
}

pub fn rank_cases_sequential<C: Borrow<CaseRecord>>(
    cases: &[C],
    today: NaiveDate,
    scorer: &Scorer,
) -> RankOutcome {
    finish(
        cases
            .iter()
            .map(|c| score_one(c.borrow(), today, scorer))
            .collect(),
    )
}

#[cfg(feature = "parallel")]
pub fn rank_cases_parallel<C: Borrow<CaseRecord> + Sync>(
    cases: &[C],
    today: NaiveDate,
    scorer: &Scorer,
) -> RankOutcome {
    let results: Vec<_> = cases
        .par_iter()
        .map(|c| score_one(c.borrow(), today, scorer))
        .collect();
    let mut out = RankOutcome::default();
    for r in results {
        match r {
            Ok(c) => out.ranked.push(c),
            Err(e) => out.rejected.push(e),
        }
    }
    out.ranked.par_sort_unstable_by(compare);
    out
}

/// Orders cases by effective weight, highest first. Uses the parallel path
/// when the `parallel` feature is enabled.
pub fn rank_cases<C: Borrow<CaseRecord> + Sync>(
    cases: &[C],
    today: NaiveDate,
    scorer: &Scorer,
) -> RankOutcome {
    #[cfg(feature = "parallel")]
    {
        rank_cases_parallel(cases, today, scorer)
    }
    #[cfg(not(feature = "parallel"))]
    {
        rank_cases_sequential(cases, today, scorer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{date, sample_cases, sample_reference_date, SAMPLE_ORDER};

    fn ids(out: &RankOutcome) -> Vec<&str> {
        out.ranked.iter().map(|r| r.case_id.as_str()).collect()
    }

    #[test]
    fn sample_ordering() {
        let out = rank_cases(&sample_cases(), sample_reference_date(), &Scorer::default());
        assert!(out.rejected.is_empty());
        assert_eq!(ids(&out), SAMPLE_ORDER);
    }

    #[test]
    fn sample_ordering_without_aging() {
        let scorer = Scorer {
            aging: None,
            ..Scorer::default()
        };
        let out = rank_cases(&sample_cases(), sample_reference_date(), &scorer);
        assert_eq!(ids(&out), SAMPLE_ORDER);
    }

    #[test]
    fn identical_cases_break_ties_by_id() {
        let mut a = sample_cases()[1].clone();
        a.case_id = "B-7".into();
        let mut b = a.clone();
        b.case_id = "A-9".into();
        let out = rank_cases(&[a, b], sample_reference_date(), &Scorer::default());
        assert_eq!(ids(&out), ["A-9", "B-7"]);
    }

    #[test]
    fn earlier_filing_wins_ties() {
        let mut a = sample_cases()[0].clone();
        a.case_id = "A".into();
        a.filing_date = date(2020, 1, 2);
        let mut b = a.clone();
        b.case_id = "B".into();
        b.filing_date = date(2020, 1, 1);
        // both saturate age, so the weights tie
        let out = rank_cases(&[a, b], sample_reference_date(), &Scorer::default());
        assert_eq!(ids(&out), ["B", "A"]);
    }

    #[test]
    fn empty_input() {
        let out = rank_cases::<CaseRecord>(&[], sample_reference_date(), &Scorer::default());
        assert!(out.ranked.is_empty() && out.rejected.is_empty());
    }

    #[test]
    fn bad_case_is_skipped_not_fatal() {
        let mut cases = sample_cases();
        cases[2].filing_date = date(2030, 1, 1);
        let out = rank_cases(&cases, sample_reference_date(), &Scorer::default());
        assert_eq!(ids(&out), ["001", "004", "005", "002"]);
        assert_eq!(out.rejected.len(), 1);
        assert_eq!(out.rejected[0].0, "003");
    }

    #[cfg(feature = "parallel")]
    mod parallel {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn parallel_and_sequential_agree(seed_days in proptest::collection::vec((0u64..2000, 0usize..5), 0..60)) {
                let base = sample_cases();
                let cases: Vec<CaseRecord> = seed_days
                    .iter()
                    .enumerate()
                    .map(|(i, (back, k))| {
                        let mut c = base[*k].clone();
                        c.case_id = format!("C{i:03}");
                        c.hearings.clear();
                        c.filing_date = date(2025, 7, 1) - chrono::Days::new(*back);
                        c
                    })
                    .collect();
                let today = sample_reference_date();
                let s = rank_cases_sequential(&cases, today, &Scorer::default());
                let p = rank_cases_parallel(&cases, today, &Scorer::default());
                prop_assert_eq!(s.ranked, p.ranked);
            }
        }
    }
}
