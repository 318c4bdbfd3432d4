//! Revealed Comparative Advantage of skills within ads, and effective use.
//!
//! For a job `j` and skill `s` with incidence `x(j, s)`:
//!
//! ```text
//! RCA(j, s) = (x(j, s) / Σ_s' x(j, s')) / (Σ_j' x(j', s) / Σ_j',s' x(j', s'))
//! ```
//!
//! A skill is *effectively used* by a job when `RCA(j, s) > 1` (strict).

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{IncidenceIndex, SkillVocabulary};
use crate::{Error, Result};

/// RCA values stored only where `x(j, s) = 1`; every other entry is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RcaMatrix {
    job_ids: Vec<String>,
    n_skills: usize,
    /// Per job, `(skill, rca)` sorted by skill index.
    rows: Vec<Vec<(u32, f64)>>,
}

impl RcaMatrix {
    pub fn n_jobs(&self) -> usize {
        self.rows.len()
    }

    pub fn n_skills(&self) -> usize {
        self.n_skills
    }

    pub fn job_id(&self, job: usize) -> &str {
        &self.job_ids[job]
    }

    pub fn row(&self, job: usize) -> &[(u32, f64)] {
        &self.rows[job]
    }

    /// RCA of `(job, skill)`, `None` where there is no incidence.
    pub fn get(&self, job: usize, skill: usize) -> Option<f64> {
        let row = &self.rows[job];
        row.binary_search_by_key(&(skill as u32), |&(s, _)| s)
            .ok()
            .map(|i| row[i].1)
    }

    /// Writes `job_id,skill,rca,effective` audit rows.
    pub fn write_csv<W: Write>(&self, vocab: &SkillVocabulary, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["job_id", "skill", "rca", "effective"])?;
        for (job, row) in self.rows.iter().enumerate() {
            for &(s, rca) in row {
                w.write_record([
                    self.job_ids[job].as_str(),
                    vocab.display(s as usize),
                    &rca.to_string(),
                    if rca > 1.0 { "1" } else { "0" },
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Binary effective-use matrix `e(j, s)` with per-skill counts `Σ_j e(j, s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveUseMatrix {
    n_skills: usize,
    /// Per job, sorted skill indices with `e(j, s) = 1`.
    rows: Vec<Vec<u32>>,
    counts: Vec<u64>,
}

impl EffectiveUseMatrix {
    pub fn n_jobs(&self) -> usize {
        self.rows.len()
    }

    pub fn n_skills(&self) -> usize {
        self.n_skills
    }

    pub fn row(&self, job: usize) -> &[u32] {
        &self.rows[job]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn is_effective(&self, job: usize, skill: usize) -> bool {
        self.rows[job].binary_search(&(skill as u32)).is_ok()
    }

    /// `Σ_j e(j, s)`.
    pub fn count(&self, skill: usize) -> u64 {
        self.counts[skill]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

pub fn compute_rca(index: &IncidenceIndex) -> Result<RcaMatrix> {
    if index.n_jobs() == 0 || index.grand_total() == 0 {
        return Err(Error::EmptyCorpus);
    }
    let grand = index.grand_total() as f64;
    let rows = (0..index.n_jobs())
        .into_par_iter()
        .map(|job| {
            let job_total = index.job_total(job) as f64;
            index
                .job_skills(job)
                .iter()
                .map(|&s| {
                    let share_in_job = 1.0 / job_total;
                    let share_in_market = index.skill_total(s as usize) as f64 / grand;
                    (s, share_in_job / share_in_market)
                })
                .collect()
        })
        .collect();
    Ok(RcaMatrix {
        job_ids: index.job_ids().to_vec(),
        n_skills: index.n_skills(),
        rows,
    })
}

pub fn compute_effective_use(rca: &RcaMatrix) -> EffectiveUseMatrix {
    let mut counts = vec![0u64; rca.n_skills];
    let rows: Vec<Vec<u32>> = rca
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .filter(|&&(_, v)| v > 1.0)
                .map(|&(s, _)| s)
                .collect()
        })
        .collect();
    for row in &rows {
        for &s in row {
            counts[s as usize] += 1;
        }
    }
    EffectiveUseMatrix {
        n_skills: rca.n_skills,
        rows,
        counts,
    }
}
