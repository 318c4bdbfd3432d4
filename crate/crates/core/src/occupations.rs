//! Occupation skill intensity and selection.
//!
//! The intensity of occupation `o` in a target skill set `D` is the share of
//! the occupation's skill slots that fall in `D`:
//!
//! ```text
//! η(o, D) = Σ_{j∈O, s∈D} x(j, s) / Σ_{j∈O, s'} x(j, s')
//! ```

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::JobAd;
use crate::similarity::SkillSetResult;
use crate::{Error, Result};

/// Label given to selected occupations missing from the category map.
pub const UNCATEGORIZED: &str = "uncategorized";

const DEFAULT_CATEGORIES: &str = include_str!("../data/dsa_categories.csv");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationProfile {
    pub occupation: String,
    pub ads: usize,
    /// `Σ_{j∈O, s'} x(j, s')`.
    pub total_slots: u64,
    /// `Σ_{j∈O, s∈D} x(j, s)`.
    pub target_slots: u64,
    pub eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    #[serde(default)]
    pub low_support: bool,
}

/// Target skill keys for intensity computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSkills(BTreeSet<String>);

impl TargetSkills {
    pub fn new<I, S>(keys: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        TargetSkills(keys.into_iter().map(Into::into).collect())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.0.contains(key)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl From<&SkillSetResult> for TargetSkills {
    fn from(set: &SkillSetResult) -> Self {
        TargetSkills::new(set.keys().map(str::to_string))
    }
}

/// One profile per occupation, sorted by η descending then name ascending.
pub fn compute_intensity(ads: &[JobAd], target: &TargetSkills) -> Result<Vec<OccupationProfile>> {
    if ads.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if target.is_empty() {
        return Err(Error::InvalidInput("target skill set is empty".into()));
    }
    let mut acc: BTreeMap<&str, (usize, u64, u64)> = BTreeMap::new();
    for ad in ads {
        let e = acc.entry(ad.occupation.as_str()).or_default();
        e.0 += 1;
        e.1 += ad.skills.len() as u64;
        e.2 += ad.skills.iter().filter(|s| target.contains(s)).count() as u64;
    }
    let mut profiles: Vec<OccupationProfile> = acc
        .into_iter()
        .map(|(occ, (n, total, hit))| OccupationProfile {
            occupation: occ.to_string(),
            ads: n,
            total_slots: total,
            target_slots: hit,
            eta: if total == 0 { 0.0 } else { hit as f64 / total as f64 },
            category: None,
            low_support: false,
        })
        .collect();
    sort_profiles(&mut profiles);
    Ok(profiles)
}

fn sort_profiles(profiles: &mut [OccupationProfile]) {
    profiles.sort_by(|a, b| {
        b.eta
            .partial_cmp(&a.eta)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.occupation.cmp(&b.occupation))
    });
}

/// Two-column `occupation,category` mapping.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryMap(BTreeMap<String, String>);

impl CategoryMap {
    /// The bundled four-category grouping of data science and analytics occupations.
    pub fn dsa_default() -> Self {
        Self::parse(DEFAULT_CATEGORIES).expect("bundled category map is well formed")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses CSV text. A leading `occupation,category` header is optional.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut map = BTreeMap::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::MalformedMapping {
                line: e.position().map_or(i + 1, |p| p.line() as usize),
                reason: e.to_string(),
            })?;
            let line = rec.position().map_or(i + 1, |p| p.line() as usize);
            if rec.iter().all(str::is_empty) {
                continue;
            }
            if rec.len() != 2 {
                return Err(Error::MalformedMapping {
                    line,
                    reason: format!("expected 2 fields, found {}", rec.len()),
                });
            }
            let (occ, cat) = (&rec[0], &rec[1]);
            if i == 0 && occ.eq_ignore_ascii_case("occupation") && cat.eq_ignore_ascii_case("category")
            {
                continue;
            }
            if occ.is_empty() || cat.is_empty() {
                return Err(Error::MalformedMapping {
                    line,
                    reason: "empty occupation or category".into(),
                });
            }
            if let Some(prev) = map.insert(occ.to_string(), cat.to_string()) {
                if prev != cat {
                    return Err(Error::MalformedMapping {
                        line,
                        reason: format!("`{occ}` mapped to both `{prev}` and `{cat}`"),
                    });
                }
            }
        }
        Ok(CategoryMap(map))
    }

    pub fn get(&self, occupation: &str) -> Option<&str> {
        self.0.get(occupation).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn categories(&self) -> BTreeSet<&str> {
        self.0.values().map(String::as_str).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(o, c)| (o.as_str(), c.as_str()))
    }
}

impl FromIterator<(String, String)> for CategoryMap {
    fn from_iter<T: IntoIterator<Item = (String, String)>>(iter: T) -> Self {
        CategoryMap(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionParams {
    /// Occupations with η strictly above this are selected.
    pub threshold: f64,
    /// Selected occupations with fewer ads are flagged low-support.
    pub low_support_floor: usize,
}

impl Default for SelectionParams {
    fn default() -> Self {
        Self {
            threshold: 0.15,
            low_support_floor: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationSelection {
    pub params: SelectionParams,
    pub selected: Vec<OccupationProfile>,
    pub total_occupations: usize,
    pub total_ads: usize,
}

pub fn select_occupations(
    profiles: &[OccupationProfile],
    params: &SelectionParams,
    categories: Option<&CategoryMap>,
) -> Result<OccupationSelection> {
    if !(params.threshold > 0.0 && params.threshold < 1.0) {
        return Err(Error::config("threshold", "must lie strictly between 0 and 1"));
    }
    let mut selected: Vec<OccupationProfile> = profiles
        .iter()
        .filter(|p| p.eta > params.threshold)
        .cloned()
        .map(|mut p| {
            p.category = Some(
                categories
                    .and_then(|m| m.get(&p.occupation))
                    .unwrap_or(UNCATEGORIZED)
                    .to_string(),
            );
            p.low_support = p.ads < params.low_support_floor;
            p
        })
        .collect();
    sort_profiles(&mut selected);
    Ok(OccupationSelection {
        params: params.clone(),
        total_occupations: selected.len(),
        total_ads: selected.iter().map(|p| p.ads).sum(),
        selected,
    })
}

impl OccupationSelection {
    /// Writes `category,occupation,ads,eta` rows grouped by category, then a
    /// `TOTALS` row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut rows: Vec<&OccupationProfile> = self.selected.iter().collect();
        rows.sort_by(|a, b| {
            a.category
                .cmp(&b.category)
                .then_with(|| a.occupation.cmp(&b.occupation))
        });
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["category", "occupation", "ads", "eta"])?;
        for p in rows {
            w.write_record([
                p.category.as_deref().unwrap_or(UNCATEGORIZED),
                &p.occupation,
                &p.ads.to_string(),
                &p.eta.to_string(),
            ])?;
        }
        w.write_record([
            "TOTALS",
            &format!("{} occupations", self.total_occupations),
            &self.total_ads.to_string(),
            "",
        ])?;
        w.flush()?;
        Ok(())
    }

    pub fn occupations(&self) -> impl Iterator<Item = &str> {
        self.selected.iter().map(|p| p.occupation.as_str())
    }
}
