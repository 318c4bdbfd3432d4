use serde::{Deserialize, Serialize};

use super::{JobAd, SkillVocabulary};
use crate::{Error, Result};

/// Sparse binary job × skill incidence `x(j, s)` with its marginals.
///
/// Jobs keep the order of the ad list they were built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncidenceIndex {
    job_ids: Vec<String>,
    /// Sorted, distinct skill indices per job.
    job_skills: Vec<Vec<u32>>,
    /// `Σ_j x(j, s)` per skill.
    skill_totals: Vec<u64>,
    /// `Σ_s x(j, s)` per job.
    job_totals: Vec<u64>,
    grand_total: u64,
}

/// Builds the incidence index. Every ad skill must be in `vocab`.
pub fn build_index(ads: &[JobAd], vocab: &SkillVocabulary) -> Result<IncidenceIndex> {
    if ads.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut skill_totals = vec![0u64; vocab.len()];
    let mut job_skills = Vec::with_capacity(ads.len());
    let mut job_totals = Vec::with_capacity(ads.len());
    for ad in ads {
        let mut row = ad
            .skills
            .iter()
            .map(|s| {
                vocab
                    .index_of(s)
                    .map(|i| i as u32)
                    .ok_or_else(|| Error::UnknownSkill(s.clone()))
            })
            .collect::<Result<Vec<u32>>>()?;
        row.sort_unstable();
        row.dedup();
        for &s in &row {
            skill_totals[s as usize] += 1;
        }
        job_totals.push(row.len() as u64);
        job_skills.push(row);
    }
    let grand_total = job_totals.iter().sum();
    Ok(IncidenceIndex {
        job_ids: ads.iter().map(|a| a.id.clone()).collect(),
        job_skills,
        skill_totals,
        job_totals,
        grand_total,
    })
}

impl IncidenceIndex {
    pub fn n_jobs(&self) -> usize {
        self.job_ids.len()
    }

    pub fn n_skills(&self) -> usize {
        self.skill_totals.len()
    }

    pub fn job_id(&self, job: usize) -> &str {
        &self.job_ids[job]
    }

    pub fn job_ids(&self) -> &[String] {
        &self.job_ids
    }

    pub fn job_skills(&self, job: usize) -> &[u32] {
        &self.job_skills[job]
    }

    pub fn skill_total(&self, skill: usize) -> u64 {
        self.skill_totals[skill]
    }

    pub fn skill_totals(&self) -> &[u64] {
        &self.skill_totals
    }

    pub fn job_total(&self, job: usize) -> u64 {
        self.job_totals[job]
    }

    pub fn grand_total(&self) -> u64 {
        self.grand_total
    }

    pub fn contains(&self, job: usize, skill: usize) -> bool {
        self.job_skills[job].binary_search(&(skill as u32)).is_ok()
    }

    /// Re-derives every marginal from the stored entries.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.job_ids.len();
        if self.job_skills.len() != n || self.job_totals.len() != n {
            return Err(Error::Invariant("incidence rows out of step with job ids".into()));
        }
        let mut skill_totals = vec![0u64; self.skill_totals.len()];
        for (row, &total) in self.job_skills.iter().zip(&self.job_totals) {
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Invariant("incidence row not strictly sorted".into()));
            }
            if row.len() as u64 != total {
                return Err(Error::Invariant("per-job skill count mismatch".into()));
            }
            for &s in row {
                let slot = skill_totals
                    .get_mut(s as usize)
                    .ok_or_else(|| Error::Invariant(format!("skill index {s} out of range")))?;
                *slot += 1;
            }
        }
        if skill_totals != self.skill_totals {
            return Err(Error::Invariant("per-skill job count mismatch".into()));
        }
        let by_skill: u64 = skill_totals.iter().sum();
        let by_job: u64 = self.job_totals.iter().sum();
        if by_skill != self.grand_total || by_job != self.grand_total {
            return Err(Error::Invariant(format!(
                "grand total {} != Σ skills {by_skill} / Σ jobs {by_job}",
                self.grand_total
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use chrono::NaiveDate;

    use super::*;

    pub(crate) fn ad(id: &str, skills: &[&str]) -> JobAd {
        JobAd {
            id: id.into(),
            posted_date: NaiveDate::from_ymd_opt(2016, 3, 1).unwrap(),
            occupation: "occ".into(),
            skills: skills.iter().map(|s| s.to_string()).collect(),
            salary_min: None,
            salary_max: None,
            education_years: None,
            experience_years: None,
        }
    }

    #[test]
    fn worked_corpus_marginals() {
        let ads = vec![ad("J1", &["a", "b"]), ad("J2", &["a"]), ad("J3", &["b", "c"])];
        let vocab = SkillVocabulary::from_ads(&ads);
        let idx = build_index(&ads, &vocab).unwrap();
        assert_eq!(idx.grand_total(), 5);
        assert_eq!(idx.skill_total(vocab.index_of("a").unwrap()), 2);
        assert_eq!(idx.job_total(0), 2);
        assert!(idx.contains(2, vocab.index_of("c").unwrap()));
        assert!(!idx.contains(1, vocab.index_of("c").unwrap()));
        idx.check_invariants().unwrap();
    }

    #[test]
    fn single_job_single_skill() {
        let ads = vec![ad("J1", &["a"])];
        let idx = build_index(&ads, &SkillVocabulary::from_ads(&ads)).unwrap();
        assert_eq!(idx.grand_total(), 1);
    }

    #[test]
    fn empty_corpus_is_fatal() {
        let err = build_index(&[], &SkillVocabulary::new()).unwrap_err();
        assert!(matches!(err, Error::EmptyCorpus));
    }

    #[test]
    fn unknown_skill_is_fatal() {
        let vocab = SkillVocabulary::from_ads(&[ad("J1", &["a"])]);
        let err = build_index(&[ad("J2", &["zzz"])], &vocab).unwrap_err();
        assert!(matches!(err, Error::UnknownSkill(s) if s == "zzz"));
    }
}
