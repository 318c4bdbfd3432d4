//! Synthetic job-ad corpora with planted ground truth.
//!
//! Each day, each occupation posts a number of ads drawn from a Poisson
//! distribution around its expected rate (or the rounded rate in exact mode).
//! The rate combines exponential growth, piecewise by segment, with
//! multiplicative weekly and yearly seasonality and optional day-level noise.
//!
//! An ad's skills come from three sources:
//! * planted clusters, each drawn on with a per-occupation probability, and
//!   then each cluster skill kept with the cluster's cohesion;
//! * background skills, each independently at its ubiquity;
//! * the occupation's own skills.
//!
//! All randomness comes from one ChaCha8 generator seeded from the config.

pub mod scenarios;

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::{Duration, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::corpus::{skill_key, write_jsonl, JobAd};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpec {
    pub name: String,
    pub skills: Vec<String>,
    /// Probability each cluster skill appears in an ad drawing on the cluster.
    pub cohesion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackgroundSkill {
    pub name: String,
    pub ubiquity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterUse {
    pub cluster: String,
    pub probability: f64,
}

/// Annual growth rate in force from `day` on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthChange {
    pub day: usize,
    pub annual_growth: f64,
}

/// A per-ad numeric attribute: `level + trend_per_year · years + N(0, noise_sd)`,
/// present on a `coverage` fraction of ads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub level: f64,
    #[serde(default)]
    pub trend_per_year: f64,
    #[serde(default)]
    pub noise_sd: f64,
    #[serde(default = "one")]
    pub coverage: f64,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    /// Expected ads per day at day 0, before seasonality.
    pub base_rate: f64,
    #[serde(default)]
    pub annual_growth: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub growth_changes: Vec<GrowthChange>,
    #[serde(default)]
    pub clusters: Vec<ClusterUse>,
    #[serde(default)]
    pub own_skills: Vec<String>,
    #[serde(default = "half")]
    pub own_skill_probability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub salary: Option<AttributeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub education: Option<AttributeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experience: Option<AttributeSpec>,
}

impl OccupationSpec {
    pub fn new(name: impl Into<String>, base_rate: f64) -> Self {
        Self {
            name: name.into(),
            category: None,
            base_rate,
            annual_growth: 0.0,
            growth_changes: Vec::new(),
            clusters: Vec::new(),
            own_skills: Vec::new(),
            own_skill_probability: 0.5,
            salary: None,
            education: None,
            experience: None,
        }
    }

    /// Expected rate multiplier from growth alone after `day` days.
    pub fn growth_factor(&self, day: usize) -> f64 {
        let mut log = 0.0;
        let mut rate = self.annual_growth;
        let mut from = 0usize;
        for change in &self.growth_changes {
            if change.day >= day {
                break;
            }
            log += (1.0 + rate).ln() * (change.day - from) as f64;
            from = change.day;
            rate = change.annual_growth;
        }
        log += (1.0 + rate).ln() * (day - from) as f64;
        (log / DAYS_PER_YEAR).exp()
    }
}

const DAYS_PER_YEAR: f64 = 365.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub start_date: NaiveDate,
    pub n_days: usize,
    /// Post exactly the rounded expected rate each day instead of a Poisson draw.
    #[serde(default)]
    pub exact_counts: bool,
    /// Standard deviation of the multiplicative day-level rate noise.
    #[serde(default)]
    pub noise: f64,
    /// Relative amplitudes of the multiplicative seasonal factors.
    #[serde(default)]
    pub weekly_amplitude: f64,
    #[serde(default)]
    pub yearly_amplitude: f64,
    #[serde(default)]
    pub clusters: Vec<ClusterSpec>,
    #[serde(default)]
    pub background_skills: Vec<BackgroundSkill>,
    pub occupations: Vec<OccupationSpec>,
}

fn check(ok: bool, field: impl Into<String>, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(field, reason))
    }
}

fn is_prob(p: f64) -> bool {
    (0.0..=1.0).contains(&p)
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        check(self.n_days > 0, "n_days", "must be at least 1")?;
        check(
            self.noise.is_finite() && self.noise >= 0.0,
            "noise",
            "must be finite and non-negative",
        )?;
        for (field, a) in [
            ("weekly_amplitude", self.weekly_amplitude),
            ("yearly_amplitude", self.yearly_amplitude),
        ] {
            check((0.0..1.0).contains(&a), field, "must lie in [0, 1)")?;
        }
        let mut names = BTreeSet::new();
        for (i, c) in self.clusters.iter().enumerate() {
            check(!c.skills.is_empty(), format!("clusters[{i}].skills"), "must not be empty")?;
            check(is_prob(c.cohesion), format!("clusters[{i}].cohesion"), "must lie in [0, 1]")?;
            check(names.insert(c.name.as_str()), format!("clusters[{i}].name"), "duplicate cluster name")?;
        }
        for (i, b) in self.background_skills.iter().enumerate() {
            check(
                is_prob(b.ubiquity),
                format!("background_skills[{i}].ubiquity"),
                "must lie in [0, 1]",
            )?;
        }
        check(!self.occupations.is_empty(), "occupations", "must not be empty")?;
        let mut occ_names = BTreeSet::new();
        for (i, o) in self.occupations.iter().enumerate() {
            let f = |name: &str| format!("occupations[{i}].{name}");
            check(occ_names.insert(o.name.as_str()), f("name"), "duplicate occupation name")?;
            check(
                o.base_rate.is_finite() && o.base_rate >= 0.0,
                f("base_rate"),
                "must be finite and non-negative",
            )?;
            check(o.annual_growth > -1.0, f("annual_growth"), "must exceed -1")?;
            let mut last = 0;
            for (k, g) in o.growth_changes.iter().enumerate() {
                let field = format!("occupations[{i}].growth_changes[{k}]");
                check(g.annual_growth > -1.0, field.clone(), "annual_growth must exceed -1")?;
                check(g.day > last || k == 0, field, "days must be strictly increasing")?;
                last = g.day;
            }
            for (k, u) in o.clusters.iter().enumerate() {
                let field = format!("occupations[{i}].clusters[{k}]");
                check(names.contains(u.cluster.as_str()), field.clone(), "unknown cluster")?;
                check(is_prob(u.probability), field, "probability must lie in [0, 1]")?;
            }
            check(is_prob(o.own_skill_probability), f("own_skill_probability"), "must lie in [0, 1]")?;
            for (name, attr) in [
                ("salary", &o.salary),
                ("education", &o.education),
                ("experience", &o.experience),
            ] {
                if let Some(a) = attr {
                    check(is_prob(a.coverage), f(&format!("{name}.coverage")), "must lie in [0, 1]")?;
                    check(
                        a.noise_sd.is_finite() && a.noise_sd >= 0.0,
                        f(&format!("{name}.noise_sd")),
                        "must be finite and non-negative",
                    )?;
                    check(
                        a.level.is_finite() && a.trend_per_year.is_finite(),
                        f(name),
                        "level and trend must be finite",
                    )?;
                }
            }
            let can_post = o.clusters.iter().any(|u| {
                u.probability > 0.0
                    && self.cluster(&u.cluster).map(|c| c.cohesion > 0.0).unwrap_or(false)
            }) || (o.own_skill_probability > 0.0 && !o.own_skills.is_empty())
                || self.background_skills.iter().any(|b| b.ubiquity > 0.0);
            check(can_post, f("skills"), "occupation can never draw a skill")?;
        }
        Ok(())
    }

    fn cluster(&self, name: &str) -> Option<&ClusterSpec> {
        self.clusters.iter().find(|c| c.name == name)
    }

    /// Expected posting rate of `occ` on `day`, before noise.
    pub fn expected_rate(&self, occ: &OccupationSpec, day: usize) -> f64 {
        let t = abs_day(self.start_date + Duration::days(day as i64));
        let weekly = 1.0 + self.weekly_amplitude * (2.0 * PI * t / 7.0).sin();
        let yearly = 1.0 + self.yearly_amplitude * (2.0 * PI * t / DAYS_PER_YEAR).sin();
        occ.base_rate * occ.growth_factor(day) * weekly * yearly
    }

    /// Ratio of expected cluster slots to expected total slots per ad,
    /// for every cluster. Ignores the small correction from redrawing
    /// empty ads.
    pub fn designed_eta(&self, occ: &OccupationSpec) -> BTreeMap<String, f64> {
        let mut per_cluster: BTreeMap<String, f64> = BTreeMap::new();
        for u in &occ.clusters {
            if let Some(c) = self.cluster(&u.cluster) {
                *per_cluster.entry(c.name.clone()).or_default() +=
                    u.probability * c.cohesion * c.skills.len() as f64;
            }
        }
        let total: f64 = per_cluster.values().sum::<f64>()
            + self.background_skills.iter().map(|b| b.ubiquity).sum::<f64>()
            + occ.own_skill_probability * occ.own_skills.len() as f64;
        self.clusters
            .iter()
            .map(|c| {
                let slots = per_cluster.get(&c.name).copied().unwrap_or(0.0);
                (c.name.clone(), if total > 0.0 { slots / total } else { 0.0 })
            })
            .collect()
    }
}

fn abs_day(date: NaiveDate) -> f64 {
    (date - NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid date")).num_days() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterTruth {
    pub name: String,
    /// Skill keys of the cluster.
    pub skills: Vec<String>,
    pub cohesion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationTruth {
    pub name: String,
    pub category: Option<String>,
    pub ads: usize,
    /// Designed η per cluster.
    pub designed_eta: BTreeMap<String, f64>,
    pub base_rate: f64,
    pub annual_growth: f64,
    pub growth_changes: Vec<GrowthChange>,
    pub salary: Option<AttributeSpec>,
    pub education: Option<AttributeSpec>,
    pub experience: Option<AttributeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub start_date: NaiveDate,
    pub n_days: usize,
    pub weekly_amplitude: f64,
    pub yearly_amplitude: f64,
    pub noise: f64,
    pub clusters: Vec<ClusterTruth>,
    pub occupations: Vec<OccupationTruth>,
    pub total_ads: usize,
}

impl GroundTruth {
    pub fn cluster(&self, name: &str) -> Option<&ClusterTruth> {
        self.clusters.iter().find(|c| c.name == name)
    }

    pub fn occupation(&self, name: &str) -> Option<&OccupationTruth> {
        self.occupations.iter().find(|o| o.name == name)
    }
}

const MAX_REDRAWS: usize = 10_000;

struct Draw<'a> {
    config: &'a SynthConfig,
    rng: ChaCha8Rng,
    std_normal: Normal<f64>,
}

impl Draw<'_> {
    fn bernoulli(&mut self, p: f64) -> bool {
        p > 0.0 && self.rng.random::<f64>() < p
    }

    fn count(&mut self, rate: f64) -> usize {
        let rate = if self.config.noise > 0.0 {
            rate * (1.0 + self.config.noise * self.std_normal.sample(&mut self.rng)).max(0.0)
        } else {
            rate
        };
        if self.config.exact_counts {
            return rate.round() as usize;
        }
        if rate <= 0.0 {
            return 0;
        }
        Poisson::new(rate).expect("positive finite rate").sample(&mut self.rng) as usize
    }

    fn skills(&mut self, occ: &OccupationSpec) -> Result<Vec<String>> {
        for _ in 0..MAX_REDRAWS {
            let mut skills = BTreeSet::new();
            for u in &occ.clusters {
                if !self.bernoulli(u.probability) {
                    continue;
                }
                let cluster = self.config.cluster(&u.cluster).expect("validated cluster");
                for s in &cluster.skills {
                    if self.bernoulli(cluster.cohesion) {
                        skills.insert(skill_key(s));
                    }
                }
            }
            for b in &self.config.background_skills {
                if self.bernoulli(b.ubiquity) {
                    skills.insert(skill_key(&b.name));
                }
            }
            for s in &occ.own_skills {
                if self.bernoulli(occ.own_skill_probability) {
                    skills.insert(skill_key(s));
                }
            }
            if !skills.is_empty() {
                return Ok(skills.into_iter().collect());
            }
        }
        Err(Error::Invariant(format!(
            "could not draw a non-empty skill set for `{}`",
            occ.name
        )))
    }

    fn attribute(&mut self, spec: &Option<AttributeSpec>, years: f64) -> Option<f64> {
        let a = spec.as_ref()?;
        if !self.bernoulli(a.coverage) {
            return None;
        }
        let noise = if a.noise_sd > 0.0 {
            a.noise_sd * self.std_normal.sample(&mut self.rng)
        } else {
            0.0
        };
        Some(a.level + a.trend_per_year * years + noise)
    }
}

/// Generates the corpus and its ground truth. Ads are ordered by day, then
/// by occupation in config order.
pub fn generate(config: &SynthConfig) -> Result<(Vec<JobAd>, GroundTruth)> {
    config.validate()?;
    let mut draw = Draw {
        config,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        std_normal: Normal::new(0.0, 1.0).expect("valid normal"),
    };
    let mut ads = Vec::new();
    let mut per_occ = vec![0usize; config.occupations.len()];
    for day in 0..config.n_days {
        let date = config.start_date + Duration::days(day as i64);
        let years = day as f64 / DAYS_PER_YEAR;
        for (oi, occ) in config.occupations.iter().enumerate() {
            let n = draw.count(config.expected_rate(occ, day));
            for _ in 0..n {
                let skills = draw.skills(occ)?;
                let salary = draw.attribute(&occ.salary, years).map(|v| v.max(0.0));
                let education = draw.attribute(&occ.education, years).map(|v| v.max(0.0));
                let experience = draw.attribute(&occ.experience, years).map(|v| v.max(0.0));
                ads.push(JobAd {
                    id: format!("ad{:08}", ads.len() + 1),
                    posted_date: date,
                    occupation: occ.name.clone(),
                    skills,
                    salary_min: salary.map(|v| (0.9 * v).round()),
                    salary_max: salary.map(|v| (1.1 * v).round()),
                    education_years: education.map(round2),
                    experience_years: experience.map(round2),
                });
                per_occ[oi] += 1;
            }
        }
    }
    let truth = GroundTruth {
        seed: config.seed,
        start_date: config.start_date,
        n_days: config.n_days,
        weekly_amplitude: config.weekly_amplitude,
        yearly_amplitude: config.yearly_amplitude,
        noise: config.noise,
        clusters: config
            .clusters
            .iter()
            .map(|c| ClusterTruth {
                name: c.name.clone(),
                skills: c.skills.iter().map(|s| skill_key(s)).collect(),
                cohesion: c.cohesion,
            })
            .collect(),
        occupations: config
            .occupations
            .iter()
            .zip(&per_occ)
            .map(|(o, &n)| OccupationTruth {
                name: o.name.clone(),
                category: o.category.clone(),
                ads: n,
                designed_eta: config.designed_eta(o),
                base_rate: o.base_rate,
                annual_growth: o.annual_growth,
                growth_changes: o.growth_changes.clone(),
                salary: o.salary,
                education: o.education,
                experience: o.experience,
            })
            .collect(),
        total_ads: ads.len(),
    };
    Ok((ads, truth))
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|source| Error::Io { path, source })?;
    Ok(BufWriter::new(file))
}

/// Writes `ads.jsonl`, `ground_truth.json` and `categories.csv` into `dir`.
pub fn write_outputs(dir: &Path, ads: &[JobAd], truth: &GroundTruth) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    write_jsonl(ads, create(dir, "ads.jsonl")?)?;

    let mut out = create(dir, "ground_truth.json")?;
    serde_json::to_writer_pretty(&mut out, truth)?;
    out.write_all(b"\n")?;
    out.flush()?;

    let mut w = csv::Writer::from_writer(create(dir, "categories.csv")?);
    w.write_record(["occupation", "category"])?;
    for o in &truth.occupations {
        if let Some(c) = &o.category {
            w.write_record([o.name.as_str(), c.as_str()])?;
        }
    }
    w.flush()?;
    Ok(())
}
