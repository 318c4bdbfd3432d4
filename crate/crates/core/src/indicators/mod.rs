//! Shortage indicators per group of ads, the comparison report against the
//! market baseline, and per-skill demand statistics.

mod report;

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

pub use report::{
    assemble_report, write_trend_lines, GroupAssessment, Indicator, IndicatorComparison,
    ShortageReport,
};

use crate::corpus::JobAd;
use crate::occupations::TargetSkills;
use crate::timeseries::{BacktestReport, DateSpan, Quantiles};
use crate::{Error, Result};

/// Year-on-year growth of one year, in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YearGrowth {
    pub year: i32,
    pub count: u64,
    /// `None` for the first year and wherever the previous count is zero.
    pub growth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostingGrowth {
    pub years: Vec<YearGrowth>,
    /// Mean over years with defined growth.
    pub mean: Option<f64>,
}

/// `growth_y = count_y / count_{y−1} − 1` in percent, for consecutive years.
pub fn posting_growth(counts: &[(i32, u64)]) -> Result<PostingGrowth> {
    if counts.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "posting growth needs at least 2 years, got {}",
            counts.len()
        )));
    }
    if counts.windows(2).any(|w| w[1].0 != w[0].0 + 1) {
        return Err(Error::InvalidInput("posting growth years must be consecutive".into()));
    }
    let mut years = Vec::with_capacity(counts.len());
    let mut prev: Option<u64> = None;
    for &(year, count) in counts {
        let growth = match prev {
            Some(p) if p > 0 => Some(100.0 * (count as f64 / p as f64 - 1.0)),
            _ => None,
        };
        years.push(YearGrowth { year, count, growth });
        prev = Some(count);
    }
    let mean = mean_of(years.iter().filter_map(|y| y.growth));
    Ok(PostingGrowth { years, mean })
}

/// Order-independent arithmetic mean.
fn mean_of(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some(v.iter().sum::<f64>() / v.len() as f64)
}

fn median_of(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Median salary of the ads posted in `year` that carry one.
pub fn median_salary<'a>(ads: impl IntoIterator<Item = &'a JobAd>, year: i32) -> Option<f64> {
    median_of(ads.into_iter().filter(|a| a.year() == year).filter_map(JobAd::salary))
}

/// Mean years of education over ads posted in `year` that state it.
pub fn mean_education<'a>(ads: impl IntoIterator<Item = &'a JobAd>, year: i32) -> Option<f64> {
    mean_of(
        ads.into_iter()
            .filter(|a| a.year() == year)
            .filter_map(|a| a.education_years),
    )
}

/// Mean minimum years of experience over ads posted in `year` that state it.
pub fn mean_experience<'a>(ads: impl IntoIterator<Item = &'a JobAd>, year: i32) -> Option<f64> {
    mean_of(
        ads.into_iter()
            .filter(|a| a.year() == year)
            .filter_map(|a| a.experience_years),
    )
}

/// Compound annual growth rate in percent.
pub fn cagr(first_year_count: u64, last_year_count: u64, years: u32) -> Result<f64> {
    if first_year_count == 0 {
        return Err(Error::Undefined("CAGR with zero first-year count".into()));
    }
    if years < 1 {
        return Err(Error::Undefined("CAGR over less than one year".into()));
    }
    let ratio = last_year_count as f64 / first_year_count as f64;
    Ok(100.0 * (ratio.powf(1.0 / years as f64) - 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearIndicators {
    pub year: i32,
    /// The analysed span does not cover the whole calendar year.
    pub partial: bool,
    pub ads: u64,
    pub growth: Option<f64>,
    pub median_salary: Option<f64>,
    pub mean_education: Option<f64>,
    pub mean_experience: Option<f64>,
}

/// The five indicators for one group of ads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShortageIndicators {
    pub label: String,
    pub years: Vec<YearIndicators>,
    /// Mean year-on-year growth over complete years, percent.
    pub mean_growth: Option<f64>,
    /// Median backtest SMAPE.
    pub predictability: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smape_summary: Option<Quantiles>,
}

impl ShortageIndicators {
    /// Per-year indicators of `ads` over `span`. Growth uses complete
    /// calendar years only; partial years are reported and flagged.
    pub fn compute<'a>(
        label: impl Into<String>,
        ads: impl IntoIterator<Item = &'a JobAd>,
        span: &DateSpan,
    ) -> Self {
        let mut by_year: BTreeMap<i32, Vec<&JobAd>> =
            span.years().map(|y| (y, Vec::new())).collect();
        for ad in ads.into_iter().filter(|a| span.contains(a.posted_date)) {
            by_year.entry(ad.year()).or_default().push(ad);
        }
        let complete: Vec<(i32, u64)> = by_year
            .iter()
            .filter(|(y, _)| span.covers_year(**y))
            .map(|(y, v)| (*y, v.len() as u64))
            .collect();
        let growth = posting_growth(&complete).ok();
        let growth_of = |year: i32| {
            growth
                .as_ref()
                .and_then(|g| g.years.iter().find(|y| y.year == year))
                .and_then(|y| y.growth)
        };
        let years = by_year
            .iter()
            .map(|(&year, group)| YearIndicators {
                year,
                partial: !span.covers_year(year),
                ads: group.len() as u64,
                growth: growth_of(year),
                median_salary: median_salary(group.iter().copied(), year),
                mean_education: mean_education(group.iter().copied(), year),
                mean_experience: mean_experience(group.iter().copied(), year),
            })
            .collect();
        Self {
            label: label.into(),
            years,
            mean_growth: growth.and_then(|g| g.mean),
            predictability: None,
            smape_summary: None,
        }
    }

    pub fn with_backtest(mut self, report: &BacktestReport) -> Self {
        self.predictability = Some(report.summary.median);
        self.smape_summary = Some(report.summary);
        self
    }

    pub fn year(&self, year: i32) -> Option<&YearIndicators> {
        self.years.iter().find(|y| y.year == year)
    }
}

/// Ad counts per target skill per year, with CAGR from each skill's first
/// year with postings to the last year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillDemandStats {
    pub years: Vec<i32>,
    pub skills: Vec<SkillDemand>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillDemand {
    pub skill: String,
    /// Aligned with [`SkillDemandStats::years`].
    pub counts: Vec<u64>,
    pub first_year: Option<i32>,
    pub cagr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SkillDemandStats {
    pub fn compute<'a>(
        ads: impl IntoIterator<Item = &'a JobAd>,
        skills: &TargetSkills,
        years: std::ops::RangeInclusive<i32>,
    ) -> Result<Self> {
        if years.is_empty() {
            return Err(Error::InvalidInput("empty year range".into()));
        }
        let year_list: Vec<i32> = years.clone().collect();
        let first = *years.start();
        let mut counts: BTreeMap<&str, Vec<u64>> = skills
            .iter()
            .map(|s| (s, vec![0u64; year_list.len()]))
            .collect();
        for ad in ads {
            if !years.contains(&ad.year()) {
                continue;
            }
            let slot = (ad.year() - first) as usize;
            for s in &ad.skills {
                if let Some(row) = counts.get_mut(s.as_str()) {
                    row[slot] += 1;
                }
            }
        }
        let last = *years.end();
        let skills = counts
            .into_iter()
            .map(|(skill, counts)| {
                let first_idx = counts.iter().position(|&c| c > 0);
                let first_year = first_idx.map(|i| year_list[i]);
                let (cagr, note) = match first_idx {
                    None => (None, Some("no postings".to_string())),
                    Some(i) => match cagr(counts[i], counts[counts.len() - 1], (last - year_list[i]) as u32) {
                        Ok(v) => (Some(v), None),
                        Err(e) => (None, Some(e.to_string())),
                    },
                };
                SkillDemand {
                    skill: skill.to_string(),
                    counts,
                    first_year,
                    cagr,
                    note,
                }
            })
            .collect();
        Ok(Self {
            years: year_list,
            skills,
        })
    }

    /// Writes `skill,<year>...,first_year,cagr,note`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["skill".to_string()];
        header.extend(self.years.iter().map(i32::to_string));
        header.extend(["first_year", "cagr", "note"].map(String::from));
        w.write_record(&header)?;
        for s in &self.skills {
            let mut row = vec![s.skill.clone()];
            row.extend(s.counts.iter().map(u64::to_string));
            row.push(s.first_year.map(|y| y.to_string()).unwrap_or_default());
            row.push(s.cagr.map(|c| c.to_string()).unwrap_or_default());
            row.push(s.note.clone().unwrap_or_default());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
