//! Job-advertisement corpora: records, skill normalization, ingestion and the
//! job × skill incidence index.

mod index;
mod ingest;
mod vocab;

use std::io::Write;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

pub use index::{build_index, IncidenceIndex};
pub use ingest::{
    ingest, ingest_reader, IngestConfig, IngestReport, Ingested, InputFormat, Rejection,
};
pub use vocab::SkillVocabulary;

use crate::Result;

/// One job advertisement.
///
/// `skills` holds normalized skill keys (see [`skill_key`]), sorted and
/// deduplicated; the display casing lives in the [`SkillVocabulary`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobAd {
    pub id: String,
    #[serde(rename = "date")]
    pub posted_date: NaiveDate,
    pub occupation: String,
    pub skills: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub salary_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub salary_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub education_years: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experience_years: Option<f64>,
}

impl JobAd {
    pub fn year(&self) -> i32 {
        self.posted_date.year()
    }

    /// Salary used by the salary indicator: the midpoint of the advertised
    /// range, or whichever bound is present.
    pub fn salary(&self) -> Option<f64> {
        match (self.salary_min, self.salary_max) {
            (Some(lo), Some(hi)) => Some(0.5 * (lo + hi)),
            (Some(v), None) | (None, Some(v)) => Some(v),
            (None, None) => None,
        }
    }
}

/// Trims and collapses internal whitespace runs to a single space.
pub fn normalize_skill(raw: &str) -> String {
    raw.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Identity key of a skill name: whitespace-normalized and lowercased.
pub fn skill_key(raw: &str) -> String {
    normalize_skill(raw).to_lowercase()
}

/// Writes ads in the JSONL input format, one object per line.
pub fn write_jsonl<W: Write>(ads: &[JobAd], mut out: W) -> Result<()> {
    for ad in ads {
        serde_json::to_writer(&mut out, ad)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
