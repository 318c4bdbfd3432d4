//! Skill complementarity and seed-set expansion.
//!
//! Complementarity of two skills is the minimum of the two conditional
//! probabilities of effective co-use:
//!
//! ```text
//! θ(s, s') = Σ_j e(j, s)·e(j, s') / max(Σ_j e(j, s), Σ_j e(j, s'))
//! ```
//!
//! Only pairs with at least one co-effective job are stored; every other
//! pair is exactly zero.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use tracing::warn;

use crate::corpus::{skill_key, SkillVocabulary};
use crate::skillmetrics::EffectiveUseMatrix;
use crate::{Error, Result};

/// Symmetric sparse θ matrix held as per-skill adjacency lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaMatrix {
    /// Per skill, `(other, θ)` sorted by `other`; the diagonal is not stored.
    neighbours: Vec<Vec<(u32, f64)>>,
    effective_counts: Vec<u64>,
}

impl ThetaMatrix {
    pub fn n_skills(&self) -> usize {
        self.neighbours.len()
    }

    /// θ of two distinct skills; 0 for pairs never co-effective.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        let row = &self.neighbours[a];
        row.binary_search_by_key(&(b as u32), |&(s, _)| s)
            .map(|i| row[i].1)
            .unwrap_or(0.0)
    }

    pub fn neighbours(&self, skill: usize) -> &[(u32, f64)] {
        &self.neighbours[skill]
    }

    pub fn effective_count(&self, skill: usize) -> u64 {
        self.effective_counts[skill]
    }

    /// Number of stored unordered pairs.
    pub fn n_pairs(&self) -> usize {
        self.neighbours.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Iterates stored pairs once each as `(a, b, θ)` with `a < b`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.neighbours.iter().enumerate().flat_map(|(a, row)| {
            row.iter()
                .filter(move |&&(b, _)| (b as usize) > a)
                .map(move |&(b, t)| (a, b as usize, t))
        })
    }
}

pub fn compute_theta(eff: &EffectiveUseMatrix) -> ThetaMatrix {
    let n = eff.n_skills();
    let mut co: HashMap<(u32, u32), u64> = HashMap::new();
    for row in eff.rows() {
        for (i, &a) in row.iter().enumerate() {
            for &b in &row[i + 1..] {
                *co.entry((a, b)).or_default() += 1;
            }
        }
    }
    let mut neighbours: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for ((a, b), joint) in co {
        let denom = eff.count(a as usize).max(eff.count(b as usize));
        // joint ≥ 1 implies both counts ≥ 1
        let theta = joint as f64 / denom as f64;
        neighbours[a as usize].push((b, theta));
        neighbours[b as usize].push((a, theta));
    }
    for row in &mut neighbours {
        row.sort_unstable_by_key(|&(s, _)| s);
    }
    ThetaMatrix {
        neighbours,
        effective_counts: eff.counts().to_vec(),
    }
}

/// How merged per-seed scores are averaged.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Mean over the seed lists in which the skill appears.
    #[default]
    Appearances,
    /// Sum over seed lists divided by the number of seeds.
    AllSeeds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionParams {
    pub per_seed_k: usize,
    /// Maximum length of the final list, seeds included.
    pub cutoff: usize,
    pub averaging: Averaging,
}

impl Default for ExpansionParams {
    fn default() -> Self {
        Self {
            per_seed_k: 300,
            cutoff: 150,
            averaging: Averaging::Appearances,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedSkill {
    pub rank: usize,
    /// Display name.
    pub skill: String,
    /// Normalized key.
    pub key: String,
    /// Averaged θ; for seeds, the largest θ to any other seed (`None` for a lone seed).
    pub theta: Option<f64>,
    pub seed: bool,
    /// Number of seed lists the skill appeared in (0 for seeds).
    pub appearances: usize,
}

/// Ranked target skill set produced by seed expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillSetResult {
    pub skills: Vec<RankedSkill>,
    pub seeds: Vec<String>,
    pub params: ExpansionParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn by_score_then_name(a: (&str, f64), b: (&str, f64)) -> Ordering {
    b.1.partial_cmp(&a.1)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.0.cmp(b.0))
}

/// Expands seed skills into a ranked skill set.
///
/// Each seed contributes its `per_seed_k` most complementary skills (itself
/// excluded). The lists are merged, every non-seed skill is scored by the
/// average of its θ values, and the ranking is truncated so that seeds plus
/// ranked skills fit in `cutoff`. Seeds come first, scored by their largest
/// θ to another seed. Ties break on ascending display name.
pub fn expand_seeds(
    theta: &ThetaMatrix,
    vocab: &SkillVocabulary,
    seeds: &[String],
    params: &ExpansionParams,
) -> Result<SkillSetResult> {
    if params.per_seed_k == 0 {
        return Err(Error::config("per_seed_k", "must be at least 1"));
    }
    if params.cutoff == 0 {
        return Err(Error::config("cutoff", "must be at least 1"));
    }
    if seeds.is_empty() {
        return Err(Error::config("seeds", "at least one seed skill is required"));
    }

    let mut seed_idx: Vec<usize> = Vec::new();
    for raw in seeds {
        let i = vocab
            .lookup(raw)
            .ok_or_else(|| Error::UnknownSeed(raw.trim().to_string()))?;
        if !seed_idx.contains(&i) {
            seed_idx.push(i);
        }
    }
    if params.cutoff < seed_idx.len() {
        return Err(Error::config(
            "cutoff",
            format!("{} is smaller than the {} seeds", params.cutoff, seed_idx.len()),
        ));
    }

    let mut warnings = Vec::new();
    // skill -> (sum of θ, appearances)
    let mut merged: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for &s in &seed_idx {
        let mut list: Vec<(u32, f64)> = theta.neighbours(s).to_vec();
        if list.is_empty() {
            let msg = format!("seed `{}` has no complementary skills", vocab.display(s));
            warn!("{msg}");
            warnings.push(msg);
            continue;
        }
        list.sort_by(|a, b| {
            by_score_then_name(
                (vocab.display(a.0 as usize), a.1),
                (vocab.display(b.0 as usize), b.1),
            )
        });
        for &(other, t) in list.iter().take(params.per_seed_k) {
            let entry = merged.entry(other as usize).or_insert((0.0, 0));
            entry.0 += t;
            entry.1 += 1;
        }
    }

    let n_seeds = seed_idx.len();
    let mut ranked: Vec<(usize, f64, usize)> = merged
        .into_iter()
        .filter(|(s, _)| !seed_idx.contains(s))
        .map(|(s, (sum, n))| {
            let score = match params.averaging {
                Averaging::Appearances => sum / n as f64,
                Averaging::AllSeeds => sum / n_seeds as f64,
            };
            (s, score, n)
        })
        .collect();
    ranked.sort_by(|a, b| by_score_then_name((vocab.display(a.0), a.1), (vocab.display(b.0), b.1)));
    ranked.truncate(params.cutoff - n_seeds);

    let mut seed_rows: Vec<(usize, Option<f64>)> = seed_idx
        .iter()
        .map(|&s| {
            let best = seed_idx
                .iter()
                .filter(|&&o| o != s)
                .map(|&o| theta.get(s, o))
                .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.max(t))));
            (s, best)
        })
        .collect();
    seed_rows.sort_by(|a, b| {
        by_score_then_name(
            (vocab.display(a.0), a.1.unwrap_or(f64::INFINITY)),
            (vocab.display(b.0), b.1.unwrap_or(f64::INFINITY)),
        )
    });

    let skills = seed_rows
        .into_iter()
        .map(|(s, t)| (s, t, true, 0))
        .chain(ranked.into_iter().map(|(s, t, n)| (s, Some(t), false, n)))
        .enumerate()
        .map(|(i, (s, theta, seed, appearances))| RankedSkill {
            rank: i + 1,
            skill: vocab.display(s).to_string(),
            key: vocab.key(s).to_string(),
            theta,
            seed,
            appearances,
        })
        .collect();

    Ok(SkillSetResult {
        skills,
        seeds: seed_idx.iter().map(|&s| vocab.display(s).to_string()).collect(),
        params: params.clone(),
        corpus_hash: None,
        warnings,
    })
}

impl SkillSetResult {
    /// Builds a result from a plain list of skills, for hand-curated target sets.
    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let skills = names
            .into_iter()
            .enumerate()
            .map(|(i, n)| RankedSkill {
                rank: i + 1,
                skill: n.as_ref().trim().to_string(),
                key: skill_key(n.as_ref()),
                theta: None,
                seed: false,
                appearances: 0,
            })
            .collect::<Vec<_>>();
        Self {
            params: ExpansionParams {
                cutoff: skills.len().max(1),
                ..Default::default()
            },
            skills,
            seeds: Vec::new(),
            corpus_hash: None,
            warnings: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.skills.len()
    }

    pub fn is_empty(&self) -> bool {
        self.skills.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.skills.iter().map(|s| s.key.as_str())
    }

    /// Checks ranking order and length against the parameters.
    pub fn check_invariants(&self) -> Result<()> {
        if self.skills.len() > self.params.cutoff {
            return Err(Error::Invariant(format!(
                "skill set has {} entries, cutoff is {}",
                self.skills.len(),
                self.params.cutoff
            )));
        }
        let ranked: Vec<&RankedSkill> = self.skills.iter().filter(|s| !s.seed).collect();
        for w in ranked.windows(2) {
            let (a, b) = (w[0].theta.unwrap_or(0.0), w[1].theta.unwrap_or(0.0));
            if b > a || (a == b && w[1].skill < w[0].skill) {
                return Err(Error::Invariant(format!(
                    "skill ranking out of order at `{}`",
                    w[1].skill
                )));
            }
        }
        Ok(())
    }

    /// Writes the `rank,skill,theta` table.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["rank", "skill", "theta"])?;
        for s in &self.skills {
            w.write_record([
                s.rank.to_string(),
                s.skill.clone(),
                s.theta.map(|t| t.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a `rank,skill,theta` table. Seed flags and provenance are not
    /// part of the CSV layout and come back empty.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(input);
        let mut skills = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            if rec.len() != 3 {
                return Err(Error::MalformedMapping {
                    line,
                    reason: format!("expected 3 fields, found {}", rec.len()),
                });
            }
            let rank = rec[0].parse::<usize>().map_err(|_| Error::MalformedMapping {
                line,
                reason: format!("bad rank `{}`", &rec[0]),
            })?;
            let theta = if rec[2].is_empty() {
                None
            } else {
                Some(rec[2].parse::<f64>().map_err(|_| Error::MalformedMapping {
                    line,
                    reason: format!("bad theta `{}`", &rec[2]),
                })?)
            };
            skills.push(RankedSkill {
                rank,
                skill: rec[1].to_string(),
                key: skill_key(&rec[1]),
                theta,
                seed: false,
                appearances: 0,
            });
        }
        let n = skills.len();
        Ok(Self {
            skills,
            seeds: Vec::new(),
            params: ExpansionParams {
                cutoff: n.max(1),
                ..Default::default()
            },
            corpus_hash: None,
            warnings: Vec::new(),
        })
    }
}

/// Parses a newline-delimited seed list; blank lines and `#` comments are skipped.
pub fn parse_seed_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use chrono::NaiveDate;

    use super::*;
    use crate::corpus::{build_index, JobAd};
    use crate::skillmetrics::{compute_effective_use, compute_rca};

    fn corpus(spec: &[&[&str]]) -> (Vec<JobAd>, SkillVocabulary) {
        let ads: Vec<JobAd> = spec
            .iter()
            .enumerate()
            .map(|(i, skills)| JobAd {
                id: format!("J{}", i + 1),
                posted_date: NaiveDate::from_ymd_opt(2016, 3, 1).unwrap(),
                occupation: "occ".into(),
                skills: skills.iter().map(|s| s.to_string()).collect(),
                salary_min: None,
                salary_max: None,
                education_years: None,
                experience_years: None,
            })
            .collect();
        let vocab = SkillVocabulary::from_ads(&ads);
        (ads, vocab)
    }

    fn theta_of(ads: &[JobAd], vocab: &SkillVocabulary) -> ThetaMatrix {
        let rca = compute_rca(&build_index(ads, vocab).unwrap()).unwrap();
        compute_theta(&compute_effective_use(&rca))
    }

    #[test]
    fn worked_corpus_theta() {
        let (ads, vocab) = corpus(&[&["a", "b"], &["a"], &["b", "c"]]);
        let theta = theta_of(&ads, &vocab);
        let (a, b, c) = (0, 1, 2);
        assert_eq!(vocab.key(a), "a");
        assert!((theta.get(a, b) - 0.5).abs() < 1e-12);
        assert!((theta.get(b, a) - 0.5).abs() < 1e-12);
        assert_eq!(theta.get(a, c), 0.0);
        assert!((theta.get(b, c) - 0.5).abs() < 1e-12);
        assert_eq!(theta.n_pairs(), 2);
    }

    #[test]
    fn always_together_is_one() {
        let (ads, vocab) = corpus(&[&["p", "q"], &["p", "q"], &["x"], &["y"], &["x", "y"]]);
        let theta = theta_of(&ads, &vocab);
        let p = vocab.index_of("p").unwrap();
        let q = vocab.index_of("q").unwrap();
        let x = vocab.index_of("x").unwrap();
        assert_eq!(theta.get(p, q), 1.0);
        assert_eq!(theta.get(p, x), 0.0);
    }

    fn manual_theta(n: usize, pairs: &[(usize, usize, f64)]) -> ThetaMatrix {
        let mut neighbours = vec![Vec::new(); n];
        for &(a, b, t) in pairs {
            neighbours[a].push((b as u32, t));
            neighbours[b].push((a as u32, t));
        }
        for row in &mut neighbours {
            row.sort_by_key(|&(s, _)| s);
        }
        ThetaMatrix {
            neighbours,
            effective_counts: vec![1; n],
        }
    }

    fn vocab_of(names: &[&str]) -> SkillVocabulary {
        let mut v = SkillVocabulary::new();
        for n in names {
            v.insert(n);
        }
        v
    }

    #[test]
    fn single_seed_single_neighbour() {
        let vocab = vocab_of(&["S", "B"]);
        let theta = manual_theta(2, &[(0, 1, 0.4)]);
        let out = expand_seeds(&theta, &vocab, &["S".into()], &ExpansionParams::default()).unwrap();
        assert_eq!(out.skills.len(), 2);
        assert_eq!(out.skills[0].skill, "S");
        assert!(out.skills[0].seed);
        assert_eq!(out.skills[0].theta, None);
        assert_eq!(out.skills[1].skill, "B");
        assert_eq!(out.skills[1].theta, Some(0.4));
        out.check_invariants().unwrap();
    }

    #[test]
    fn merged_scores_average_over_appearances() {
        let vocab = vocab_of(&["S1", "S2", "X", "Y"]);
        let theta = manual_theta(4, &[(0, 2, 0.2), (1, 2, 0.4), (1, 3, 0.5)]);
        let seeds = vec!["S1".to_string(), "S2".to_string()];
        let out = expand_seeds(&theta, &vocab, &seeds, &ExpansionParams::default()).unwrap();
        let x = out.skills.iter().find(|s| s.skill == "X").unwrap();
        assert!((x.theta.unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(x.appearances, 2);
        // Y appears only for S2
        let y = out.skills.iter().find(|s| s.skill == "Y").unwrap();
        assert_eq!(y.theta, Some(0.5));
        assert_eq!(out.skills[2].skill, "Y");

        let all = ExpansionParams {
            averaging: Averaging::AllSeeds,
            ..Default::default()
        };
        let out = expand_seeds(&theta, &vocab, &seeds, &all).unwrap();
        let y = out.skills.iter().find(|s| s.skill == "Y").unwrap();
        assert!((y.theta.unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn seeds_lead_with_max_pairwise_theta() {
        let vocab = vocab_of(&["S1", "S2", "S3", "X"]);
        let theta = manual_theta(4, &[(0, 1, 0.3), (1, 2, 0.6), (0, 3, 0.9)]);
        let seeds: Vec<String> = ["S1", "S2", "S3"].iter().map(|s| s.to_string()).collect();
        let out = expand_seeds(&theta, &vocab, &seeds, &ExpansionParams::default()).unwrap();
        let names: Vec<&str> = out.skills.iter().map(|s| s.skill.as_str()).collect();
        assert_eq!(names, ["S2", "S3", "S1", "X"]);
        assert_eq!(out.skills[0].theta, Some(0.6));
        assert_eq!(out.skills[2].theta, Some(0.3));
        assert!(out.skills[..3].iter().all(|s| s.seed));
    }

    #[test]
    fn per_seed_k_cutoff_and_ties() {
        let vocab = vocab_of(&["S", "d", "c", "b", "a"]);
        let theta = manual_theta(5, &[(0, 1, 0.5), (0, 2, 0.5), (0, 3, 0.5), (0, 4, 0.9)]);
        let params = ExpansionParams {
            per_seed_k: 3,
            cutoff: 150,
            ..Default::default()
        };
        let out = expand_seeds(&theta, &vocab, &["S".into()], &params).unwrap();
        let names: Vec<&str> = out.skills.iter().map(|s| s.skill.as_str()).collect();
        assert_eq!(names, ["S", "a", "b", "c"]);

        let params = ExpansionParams {
            per_seed_k: 300,
            cutoff: 2,
            ..Default::default()
        };
        let out = expand_seeds(&theta, &vocab, &["S".into()], &params).unwrap();
        assert_eq!(out.skills.len(), 2);
        out.check_invariants().unwrap();
    }

    #[test]
    fn unknown_seed_and_isolated_seed() {
        let vocab = vocab_of(&["S", "B", "Lonely"]);
        let theta = manual_theta(3, &[(0, 1, 0.4)]);
        let err = expand_seeds(&theta, &vocab, &["Nope".into()], &ExpansionParams::default())
            .unwrap_err();
        assert!(matches!(err, Error::UnknownSeed(ref s) if s == "Nope"));

        let out = expand_seeds(
            &theta,
            &vocab,
            &["S".into(), "lonely".into()],
            &ExpansionParams::default(),
        )
        .unwrap();
        assert_eq!(out.warnings.len(), 1);
        assert!(out.warnings[0].contains("Lonely"));
        assert_eq!(out.skills.len(), 3);
    }

    #[test]
    fn csv_round_trip_keeps_table() {
        let vocab = vocab_of(&["S", "B"]);
        let theta = manual_theta(2, &[(0, 1, 0.4)]);
        let out = expand_seeds(&theta, &vocab, &["S".into()], &ExpansionParams::default()).unwrap();
        let mut buf = Vec::new();
        out.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "rank,skill,theta\n1,S,\n2,B,0.4\n");
        let back = SkillSetResult::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.keys().collect::<Vec<_>>(), ["s", "b"]);
    }

    #[test]
    fn seed_list_parsing() {
        let seeds = parse_seed_list("Machine Learning\n\n# comment\n  Big Data  \n");
        assert_eq!(seeds, ["Machine Learning", "Big Data"]);
    }
}
