use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::Duration;
use serde::{Deserialize, Serialize};

use super::{mean_of, ShortageIndicators, YearIndicators};
use crate::occupations::OccupationProfile;
use crate::timeseries::{BacktestReport, DecompositionModel};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    PostingGrowth,
    Salary,
    Education,
    Experience,
    Predictability,
}

impl Indicator {
    pub const ALL: [Indicator; 5] = [
        Indicator::PostingGrowth,
        Indicator::Salary,
        Indicator::Education,
        Indicator::Experience,
        Indicator::Predictability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Indicator::PostingGrowth => "posting_growth",
            Indicator::Salary => "salary",
            Indicator::Education => "education",
            Indicator::Experience => "experience",
            Indicator::Predictability => "predictability",
        }
    }

    /// Low experience demands point to a shortage; every other indicator
    /// points to one when high.
    pub fn shortage_when_below(self) -> bool {
        self == Indicator::Experience
    }

    fn per_year(self, y: &YearIndicators) -> Option<f64> {
        match self {
            Indicator::Salary => y.median_salary,
            Indicator::Education => y.mean_education,
            Indicator::Experience => y.mean_experience,
            _ => None,
        }
    }

    /// Scalar compared against the baseline. Per-year indicators use the
    /// mean over years where both sides have a value.
    fn scalars(self, group: &ShortageIndicators, base: &ShortageIndicators) -> (Option<f64>, Option<f64>) {
        match self {
            Indicator::PostingGrowth => (group.mean_growth, base.mean_growth),
            Indicator::Predictability => (group.predictability, base.predictability),
            _ => {
                let pairs: Vec<(f64, f64)> = group
                    .years
                    .iter()
                    .filter_map(|y| {
                        let b = base.year(y.year)?;
                        Some((self.per_year(y)?, self.per_year(b)?))
                    })
                    .collect();
                (
                    mean_of(pairs.iter().map(|p| p.0)),
                    mean_of(pairs.iter().map(|p| p.1)),
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorComparison {
    pub indicator: Indicator,
    pub value: Option<f64>,
    pub baseline: Option<f64>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAssessment {
    pub label: String,
    pub comparisons: Vec<IndicatorComparison>,
    pub flags: usize,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShortageReport {
    pub baseline: ShortageIndicators,
    pub groups: Vec<ShortageIndicators>,
    pub assessments: Vec<GroupAssessment>,
    pub profiles: Vec<OccupationProfile>,
}

fn compare(group: &ShortageIndicators, base: &ShortageIndicators) -> GroupAssessment {
    let comparisons: Vec<IndicatorComparison> = Indicator::ALL
        .iter()
        .map(|&indicator| {
            let (value, baseline) = indicator.scalars(group, base);
            let flagged = match (value, baseline) {
                (Some(v), Some(b)) if indicator.shortage_when_below() => v < b,
                (Some(v), Some(b)) => v > b,
                _ => false,
            };
            IndicatorComparison {
                indicator,
                value,
                baseline,
                flagged,
            }
        })
        .collect();
    let flags = comparisons.iter().filter(|c| c.flagged).count();
    GroupAssessment {
        label: group.label.clone(),
        verdict: format!("shortage-consistent on {flags}/{}", Indicator::ALL.len()),
        comparisons,
        flags,
    }
}

/// Compares every group with the baseline group `baseline_label`, which
/// must be among `indicators`.
pub fn assemble_report(
    indicators: Vec<ShortageIndicators>,
    baseline_label: &str,
    profiles: Vec<OccupationProfile>,
) -> Result<ShortageReport> {
    let (mut base, groups): (Vec<_>, Vec<_>) =
        indicators.into_iter().partition(|i| i.label == baseline_label);
    let baseline = base
        .pop()
        .ok_or_else(|| Error::MissingBaseline(baseline_label.to_string()))?;
    if !base.is_empty() {
        return Err(Error::InvalidInput(format!(
            "baseline label `{baseline_label}` appears more than once"
        )));
    }
    let assessments = groups.iter().map(|g| compare(g, &baseline)).collect();
    Ok(ShortageReport {
        baseline,
        groups,
        assessments,
        profiles,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn create(dir: &Path, name: &str) -> Result<csv::Writer<BufWriter<File>>> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|source| Error::Io { path, source })?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

impl ShortageReport {
    pub fn assessment(&self, label: &str) -> Option<&GroupAssessment> {
        self.assessments.iter().find(|a| a.label == label)
    }

    /// Baseline first, then groups in order.
    fn rows(&self) -> impl Iterator<Item = &ShortageIndicators> {
        std::iter::once(&self.baseline).chain(&self.groups)
    }

    /// Writes the per-indicator tables, `flags.csv`, `report.json` and
    /// `boxplot.csv` into `dir`.
    pub fn write_dir(&self, dir: &Path, backtests: &[BacktestReport]) -> Result<()> {
        let mut w = create(dir, "indicators_posting.csv")?;
        w.write_record(["label", "year", "partial", "ads", "growth_pct"])?;
        for g in self.rows() {
            for y in &g.years {
                w.write_record([
                    g.label.as_str(),
                    &y.year.to_string(),
                    &y.partial.to_string(),
                    &y.ads.to_string(),
                    &opt(y.growth),
                ])?;
            }
        }
        w.flush()?;

        for (file, indicator) in [
            ("indicators_salary.csv", Indicator::Salary),
            ("indicators_education.csv", Indicator::Education),
            ("indicators_experience.csv", Indicator::Experience),
        ] {
            let mut w = create(dir, file)?;
            w.write_record(["label", "year", "partial", indicator.name()])?;
            for g in self.rows() {
                for y in &g.years {
                    w.write_record([
                        g.label.as_str(),
                        &y.year.to_string(),
                        &y.partial.to_string(),
                        &opt(indicator.per_year(y)),
                    ])?;
                }
            }
            w.flush()?;
        }

        let mut w = create(dir, "indicators_predictability.csv")?;
        w.write_record(["label", "min", "q1", "median", "q3", "max"])?;
        for g in self.rows() {
            let q = g.smape_summary;
            w.write_record([
                g.label.clone(),
                opt(q.map(|q| q.min)),
                opt(q.map(|q| q.q1)),
                opt(q.map(|q| q.median)),
                opt(q.map(|q| q.q3)),
                opt(q.map(|q| q.max)),
            ])?;
        }
        w.flush()?;

        let mut w = create(dir, "flags.csv")?;
        let mut header = vec!["label"];
        header.extend(Indicator::ALL.iter().map(|i| i.name()));
        header.extend(["flags", "verdict"]);
        w.write_record(&header)?;
        for a in &self.assessments {
            let mut row = vec![a.label.clone()];
            row.extend(a.comparisons.iter().map(|c| u8::from(c.flagged).to_string()));
            row.push(a.flags.to_string());
            row.push(a.verdict.clone());
            w.write_record(&row)?;
        }
        w.flush()?;

        let mut w = create(dir, "boxplot.csv")?;
        w.write_record(["label", "shift", "smape"])?;
        for b in backtests {
            b.write_boxplot_rows(&mut w)?;
        }
        w.flush()?;

        let path = dir.join("report.json");
        let file = File::create(&path).map_err(|source| Error::Io { path, source })?;
        let mut out = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }
}

/// Writes `label,date,trend`, evaluating each model's trend over its
/// training span.
pub fn write_trend_lines<W: Write>(models: &[(String, DecompositionModel)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["label", "date", "trend"])?;
    for (label, model) in models {
        for (i, v) in model
            .trend_range(model.train_start, model.train_days)
            .iter()
            .enumerate()
        {
            let date = model.train_start + Duration::days(i as i64);
            w.write_record([label.as_str(), &date.to_string(), &v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn indicators(label: &str, growth: f64, salary: f64, edu: f64, exp: f64, smape: f64) -> ShortageIndicators {
        ShortageIndicators {
            label: label.into(),
            years: (2015..=2016)
                .map(|year| YearIndicators {
                    year,
                    partial: false,
                    ads: 10,
                    growth: None,
                    median_salary: Some(salary),
                    mean_education: Some(edu),
                    mean_experience: Some(exp),
                })
                .collect(),
            mean_growth: Some(growth),
            predictability: Some(smape),
            smape_summary: None,
        }
    }

    #[test]
    fn flag_logic() {
        let report = assemble_report(
            vec![
                indicators("market", 10.0, 90e3, 14.0, 5.0, 20.0),
                indicators("hot", 28.0, 120e3, 18.0, 3.0, 40.0),
                indicators("cold", 2.0, 60e3, 12.0, 7.0, 10.0),
                indicators("same", 10.0, 90e3, 14.0, 5.0, 20.0),
            ],
            "market",
            Vec::new(),
        )
        .unwrap();
        assert_eq!(report.assessment("hot").unwrap().verdict, "shortage-consistent on 5/5");
        assert_eq!(report.assessment("cold").unwrap().verdict, "shortage-consistent on 0/5");
        // ties are not flagged
        assert_eq!(report.assessment("same").unwrap().flags, 0);
    }

    #[test]
    fn missing_values_are_not_flagged() {
        let mut g = indicators("g", 28.0, 120e3, 18.0, 3.0, 40.0);
        g.predictability = None;
        for y in &mut g.years {
            y.median_salary = None;
        }
        let report = assemble_report(
            vec![indicators("market", 10.0, 90e3, 14.0, 5.0, 20.0), g],
            "market",
            Vec::new(),
        )
        .unwrap();
        assert_eq!(report.assessments[0].flags, 3);
    }

    #[test]
    fn missing_baseline_is_fatal() {
        let err = assemble_report(vec![indicators("a", 0.0, 0.0, 0.0, 0.0, 0.0)], "market", Vec::new())
            .unwrap_err();
        assert!(matches!(err, Error::MissingBaseline(l) if l == "market"));
    }
}
