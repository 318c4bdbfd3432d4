use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{skill_key, JobAd, SkillVocabulary};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Jsonl,
    Csv,
}

impl InputFormat {
    /// Guesses the format from a file extension, defaulting to JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => InputFormat::Csv,
            _ => InputFormat::Jsonl,
        }
    }
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(InputFormat::Jsonl),
            "csv" => Ok(InputFormat::Csv),
            other => Err(Error::InvalidInput(format!("unknown input format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestConfig {
    /// Fraction of rejected records above which ingestion fails.
    pub max_reject_fraction: f64,
    /// Inclusive range of accepted posting dates.
    pub date_range: Option<(NaiveDate, NaiveDate)>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            max_reject_fraction: 0.05,
            date_range: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    /// 1-based record number (line for JSONL, data row for CSV).
    pub record: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub accepted: usize,
    pub rejected: usize,
    pub reasons: BTreeMap<String, usize>,
    pub rejections: Vec<Rejection>,
}

impl IngestReport {
    fn reject(&mut self, record: usize, id: Option<String>, reason: &str, detail: Option<String>) {
        self.rejected += 1;
        *self.reasons.entry(reason.to_string()).or_default() += 1;
        self.rejections.push(Rejection {
            record,
            id,
            reason: reason.to_string(),
            detail,
        });
    }

    fn summary(&self) -> String {
        self.reasons
            .iter()
            .map(|(r, n)| format!("{r}: {n}"))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub ads: Vec<JobAd>,
    pub vocab: SkillVocabulary,
    pub report: IngestReport,
}

/// A record before validation. Every field is optional so that missing
/// fields become rejections rather than parse failures.
#[derive(Debug, Default, Deserialize)]
struct RawRecord {
    id: Option<String>,
    date: Option<String>,
    occupation: Option<String>,
    skills: Option<Vec<String>>,
    salary_min: Option<f64>,
    salary_max: Option<f64>,
    education_years: Option<f64>,
    experience_years: Option<f64>,
}

struct Rejected {
    reason: &'static str,
    detail: Option<String>,
}

fn rejected(reason: &'static str) -> Rejected {
    Rejected {
        reason,
        detail: None,
    }
}

/// Reads and validates a corpus file.
pub fn ingest(path: &Path, format: InputFormat, config: &IngestConfig) -> Result<Ingested> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ingest_reader(BufReader::new(file), format, config).map_err(|e| match e {
        Error::Write(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

pub fn ingest_reader<R: Read>(
    reader: R,
    format: InputFormat,
    config: &IngestConfig,
) -> Result<Ingested> {
    let raws = match format {
        InputFormat::Jsonl => read_jsonl(BufReader::new(reader))?,
        InputFormat::Csv => read_csv(reader)?,
    };

    let mut report = IngestReport::default();
    let mut vocab = SkillVocabulary::new();
    let mut ads = Vec::new();
    let mut seen_ids = HashSet::new();
    let total = raws.len();

    for (record, raw) in raws {
        let raw = match raw {
            Ok(raw) => raw,
            Err(detail) => {
                report.reject(record, None, "malformed record", Some(detail));
                continue;
            }
        };
        let id = raw.id.clone().filter(|s| !s.trim().is_empty());
        match validate(raw, config) {
            Ok((ad, raw_skills)) => {
                if !seen_ids.insert(ad.id.clone()) {
                    report.reject(record, id, "duplicate id", None);
                    continue;
                }
                for s in &raw_skills {
                    vocab.insert(s);
                }
                report.accepted += 1;
                ads.push(ad);
            }
            Err(r) => report.reject(record, id, r.reason, r.detail),
        }
    }

    if total > 0 {
        let fraction = report.rejected as f64 / total as f64;
        if fraction > config.max_reject_fraction {
            return Err(Error::TooManyRejects {
                rejected: report.rejected,
                total,
                threshold: config.max_reject_fraction,
                summary: report.summary(),
            });
        }
    }

    Ok(Ingested { ads, vocab, report })
}

type RawRows = Vec<(usize, std::result::Result<RawRecord, String>)>;

fn read_jsonl<R: BufRead>(reader: R) -> Result<RawRows> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<RawRecord>(&line).map_err(|e| e.to_string());
        rows.push((i + 1, parsed));
    }
    Ok(rows)
}

const REQUIRED_COLUMNS: [&str; 4] = ["id", "date", "occupation", "skills"];

fn read_csv<R: Read>(reader: R) -> Result<RawRows> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::Fields)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    for name in REQUIRED_COLUMNS {
        if column(name).is_none() {
            return Err(Error::InvalidInput(format!(
                "CSV header is missing required column `{name}`"
            )));
        }
    }
    let cols: Vec<Option<usize>> = [
        "id",
        "date",
        "occupation",
        "skills",
        "salary_min",
        "salary_max",
        "education_years",
        "experience_years",
    ]
    .iter()
    .map(|n| column(n))
    .collect();

    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let record = i + 1;
        let rec = match rec {
            Ok(rec) => rec,
            Err(e) => {
                rows.push((record, Err(e.to_string())));
                continue;
            }
        };
        let text = |c: Option<usize>| -> Option<String> {
            c.and_then(|c| rec.get(c))
                .filter(|s| !s.is_empty())
                .map(str::to_string)
        };
        let number = |c: Option<usize>, name: &str| -> std::result::Result<Option<f64>, String> {
            match text(c) {
                None => Ok(None),
                Some(s) => s
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| format!("`{name}` is not a number: {s}")),
            }
        };
        let parsed = (|| {
            Ok(RawRecord {
                id: text(cols[0]),
                date: text(cols[1]),
                occupation: text(cols[2]),
                skills: text(cols[3]).map(|s| s.split(';').map(str::to_string).collect()),
                salary_min: number(cols[4], "salary_min")?,
                salary_max: number(cols[5], "salary_max")?,
                education_years: number(cols[6], "education_years")?,
                experience_years: number(cols[7], "experience_years")?,
            })
        })();
        rows.push((record, parsed));
    }
    Ok(rows)
}

fn validate(
    raw: RawRecord,
    config: &IngestConfig,
) -> std::result::Result<(JobAd, Vec<String>), Rejected> {
    let id = raw
        .id
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .ok_or_else(|| rejected("missing id"))?;
    let date_text = raw.date.ok_or_else(|| rejected("missing date"))?;
    let posted_date = NaiveDate::parse_from_str(date_text.trim(), "%Y-%m-%d").map_err(|_| {
        Rejected {
            reason: "invalid date",
            detail: Some(date_text.clone()),
        }
    })?;
    if let Some((lo, hi)) = config.date_range {
        if posted_date < lo || posted_date > hi {
            return Err(Rejected {
                reason: "date out of range",
                detail: Some(posted_date.to_string()),
            });
        }
    }
    let occupation = raw
        .occupation
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .ok_or_else(|| rejected("missing occupation"))?;

    let raw_skills: Vec<String> = raw
        .skills
        .unwrap_or_default()
        .into_iter()
        .filter(|s| !skill_key(s).is_empty())
        .collect();
    let skills: BTreeSet<String> = raw_skills.iter().map(|s| skill_key(s)).collect();
    if skills.is_empty() {
        return Err(rejected("empty skills"));
    }

    for (name, value) in [
        ("salary_min", raw.salary_min),
        ("salary_max", raw.salary_max),
        ("education_years", raw.education_years),
        ("experience_years", raw.experience_years),
    ] {
        if let Some(v) = value {
            if !v.is_finite() || v < 0.0 {
                return Err(Rejected {
                    reason: "negative or non-finite value",
                    detail: Some(format!("{name} = {v}")),
                });
            }
        }
    }
    if let (Some(lo), Some(hi)) = (raw.salary_min, raw.salary_max) {
        if lo > hi {
            return Err(Rejected {
                reason: "salary_min > salary_max",
                detail: Some(format!("{lo} > {hi}")),
            });
        }
    }

    Ok((
        JobAd {
            id,
            posted_date,
            occupation,
            skills: skills.into_iter().collect(),
            salary_min: raw.salary_min,
            salary_max: raw.salary_max,
            education_years: raw.education_years,
            experience_years: raw.experience_years,
        },
        raw_skills,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jsonl(lines: &[&str]) -> Result<Ingested> {
        let text = lines.join("\n");
        let config = IngestConfig {
            max_reject_fraction: 1.0,
            ..Default::default()
        };
        ingest_reader(text.as_bytes(), InputFormat::Jsonl, &config)
    }

    #[test]
    fn three_clean_records() {
        let out = jsonl(&[
            r#"{"id":"1","date":"2015-01-01","occupation":"Data Scientist","skills":["Python","SQL"]}"#,
            r#"{"id":"2","date":"2015-01-02","occupation":"Data Scientist","skills":["R"]}"#,
            r#"{"id":"3","date":"2015-01-03","occupation":"Economist","skills":["Stata"],"salary_min":90000,"salary_max":110000}"#,
        ])
        .unwrap();
        assert_eq!(out.ads.len(), 3);
        assert_eq!(out.report.accepted, 3);
        assert_eq!(out.report.rejected, 0);
        assert_eq!(out.vocab.len(), 4);
        assert_eq!(out.ads[2].salary(), Some(100_000.0));
    }

    #[test]
    fn empty_skills_rejected() {
        let out = jsonl(&[
            r#"{"id":"1","date":"2015-01-01","occupation":"x","skills":[]}"#,
            r#"{"id":"2","date":"2015-01-01","occupation":"x","skills":["  "]}"#,
        ])
        .unwrap();
        assert_eq!(out.report.rejected, 2);
        assert_eq!(out.report.reasons["empty skills"], 2);
        assert_eq!(out.report.rejections[0].record, 1);
        assert_eq!(out.report.rejections[0].id.as_deref(), Some("1"));
    }

    #[test]
    fn skill_variants_collapse() {
        let out =
            jsonl(&[r#"{"id":"1","date":"2015-01-01","occupation":"x","skills":["SQL"," sql "]}"#])
                .unwrap();
        assert_eq!(out.ads[0].skills, vec!["sql".to_string()]);
        assert_eq!(out.vocab.len(), 1);
        assert_eq!(out.vocab.display(0), "SQL");
    }

    #[test]
    fn rejection_reasons() {
        let out = jsonl(&[
            r#"{"id":"1","date":"2015-13-01","occupation":"x","skills":["a"]}"#,
            r#"{"id":"2","date":"2015-01-01","skills":["a"]}"#,
            r#"{"id":"3","date":"2015-01-01","occupation":"x","skills":["a"],"salary_min":5,"salary_max":4}"#,
            r#"{"id":"4","date":"2015-01-01","occupation":"x","skills":["a"],"experience_years":-1}"#,
            r#"not json"#,
            r#"{"id":"6","date":"2015-01-01","occupation":"x","skills":["a"]}"#,
            r#"{"id":"6","date":"2015-01-02","occupation":"x","skills":["b"]}"#,
            r#"{"date":"2015-01-01","occupation":"x","skills":["a"]}"#,
        ])
        .unwrap();
        assert_eq!(out.report.accepted, 1);
        assert_eq!(out.report.rejected, 7);
        let r = &out.report.reasons;
        assert_eq!(r["invalid date"], 1);
        assert_eq!(r["missing occupation"], 1);
        assert_eq!(r["salary_min > salary_max"], 1);
        assert_eq!(r["negative or non-finite value"], 1);
        assert_eq!(r["malformed record"], 1);
        assert_eq!(r["duplicate id"], 1);
        assert_eq!(r["missing id"], 1);
        // vocabulary only holds skills of accepted ads
        assert_eq!(out.vocab.len(), 1);
    }

    #[test]
    fn reject_threshold_is_fatal() {
        let text = [
            r#"{"id":"1","date":"2015-01-01","occupation":"x","skills":["a"]}"#,
            r#"{"id":"2","date":"2015-01-01","occupation":"x","skills":[]}"#,
        ]
        .join("\n");
        let err = ingest_reader(text.as_bytes(), InputFormat::Jsonl, &IngestConfig::default())
            .unwrap_err();
        assert!(matches!(err, Error::TooManyRejects { rejected: 1, total: 2, .. }));
        assert!(err.to_string().contains("empty skills: 1"));
    }

    #[test]
    fn date_range_filter() {
        let config = IngestConfig {
            max_reject_fraction: 1.0,
            date_range: Some((
                NaiveDate::from_ymd_opt(2015, 1, 1).unwrap(),
                NaiveDate::from_ymd_opt(2015, 12, 31).unwrap(),
            )),
        };
        let text = [
            r#"{"id":"1","date":"2015-06-01","occupation":"x","skills":["a"]}"#,
            r#"{"id":"2","date":"2016-01-01","occupation":"x","skills":["a"]}"#,
        ]
        .join("\n");
        let out = ingest_reader(text.as_bytes(), InputFormat::Jsonl, &config).unwrap();
        assert_eq!(out.report.accepted, 1);
        assert_eq!(out.report.reasons["date out of range"], 1);
    }

    #[test]
    fn csv_input() {
        let text = "id,date,occupation,skills,salary_min,salary_max,education_years,experience_years\n\
                    1,2015-01-01,Data Scientist,Python; SQL ;sql,80000,100000,16,\n\
                    2,2015-01-02,Economist,Stata,,,,3\n\
                    3,2015-01-03,Economist,,,,,\n\
                    4,2015-01-03,Economist,R,abc,,,\n";
        let config = IngestConfig {
            max_reject_fraction: 1.0,
            ..Default::default()
        };
        let out = ingest_reader(text.as_bytes(), InputFormat::Csv, &config).unwrap();
        assert_eq!(out.report.accepted, 2);
        assert_eq!(out.ads[0].skills, vec!["python", "sql"]);
        assert_eq!(out.ads[0].education_years, Some(16.0));
        assert_eq!(out.ads[0].experience_years, None);
        assert_eq!(out.ads[1].experience_years, Some(3.0));
        assert_eq!(out.report.reasons["empty skills"], 1);
        assert_eq!(out.report.reasons["malformed record"], 1);
    }

    #[test]
    fn csv_missing_column_is_fatal() {
        let text = "id,date,skills\n1,2015-01-01,a\n";
        let err = ingest_reader(text.as_bytes(), InputFormat::Csv, &IngestConfig::default())
            .unwrap_err();
        assert!(err.to_string().contains("occupation"));
    }

    #[test]
    fn deterministic_report() {
        let lines = [
            r#"{"id":"1","date":"2015-01-01","occupation":"x","skills":["a","B"]}"#,
            r#"{"id":"2","date":"2015-01-01","occupation":"x","skills":[]}"#,
        ];
        let a = jsonl(&lines).unwrap();
        let b = jsonl(&lines).unwrap();
        assert_eq!(
            serde_json::to_vec(&a.report).unwrap(),
            serde_json::to_vec(&b.report).unwrap()
        );
        assert_eq!(a.ads, b.ads);
    }
}
