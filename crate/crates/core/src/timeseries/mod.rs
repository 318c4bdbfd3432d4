//! Daily posting series, the trend + seasonality + holiday decomposition,
//! SMAPE, and the sliding-window backtest.

mod backtest;
mod decomposition;
mod smape;

use std::collections::BTreeSet;
use std::io::Write;

use chrono::{Datelike, Duration, NaiveDate};
use serde::{Deserialize, Serialize};

pub use backtest::{
    sliding_window_backtest, sliding_window_backtest_with, BacktestConfig, BacktestReport,
    Forecaster, Quantiles,
};
pub use decomposition::{
    fit, forecast, Changepoint, DecompositionModel, FitConfig, HolidayCalendar, HolidayEffect,
    MIN_FIT_DAYS,
};
pub use smape::smape;

use crate::corpus::JobAd;
use crate::{Error, Result};

/// Inclusive calendar span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateSpan {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateSpan {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if end < start {
            return Err(Error::InvalidInput(format!("empty date span {start}..={end}")));
        }
        Ok(Self { start, end })
    }

    /// Smallest span covering every ad.
    pub fn covering(ads: &[JobAd]) -> Result<Self> {
        let start = ads.iter().map(|a| a.posted_date).min().ok_or(Error::EmptyCorpus)?;
        let end = ads.iter().map(|a| a.posted_date).max().ok_or(Error::EmptyCorpus)?;
        Self::new(start, end)
    }

    pub fn days(&self) -> usize {
        (self.end - self.start).num_days() as usize + 1
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        date >= self.start && date <= self.end
    }

    /// Whether the span covers all of `year`.
    pub fn covers_year(&self, year: i32) -> bool {
        let first = NaiveDate::from_ymd_opt(year, 1, 1).expect("valid year");
        let last = NaiveDate::from_ymd_opt(year, 12, 31).expect("valid year");
        self.start <= first && self.end >= last
    }

    pub fn years(&self) -> std::ops::RangeInclusive<i32> {
        self.start.year()..=self.end.year()
    }
}

/// Which ads contribute to a series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupSelector {
    /// Every ad.
    Market,
    /// Ads of any of the listed occupations.
    Occupations(BTreeSet<String>),
}

impl GroupSelector {
    pub fn occupation(name: impl Into<String>) -> Self {
        GroupSelector::Occupations([name.into()].into_iter().collect())
    }

    pub fn matches(&self, ad: &JobAd) -> bool {
        match self {
            GroupSelector::Market => true,
            GroupSelector::Occupations(set) => set.contains(&ad.occupation),
        }
    }
}

/// Contiguous daily counts; days without ads are zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailySeries {
    pub label: String,
    pub start: NaiveDate,
    pub values: Vec<f64>,
}

impl DailySeries {
    pub fn new(label: impl Into<String>, start: NaiveDate, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput("daily counts must be finite and non-negative".into()));
        }
        Ok(Self {
            label: label.into(),
            start,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn date(&self, offset: usize) -> NaiveDate {
        self.start + Duration::days(offset as i64)
    }

    pub fn end(&self) -> NaiveDate {
        self.date(self.values.len().saturating_sub(1))
    }

    /// Sub-series of `len` days starting at `offset`.
    pub fn window(&self, offset: usize, len: usize) -> DailySeries {
        DailySeries {
            label: self.label.clone(),
            start: self.date(offset),
            values: self.values[offset..offset + len].to_vec(),
        }
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Writes `date,value` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_date_values(self.start, &self.values, out)
    }
}

pub(crate) fn write_date_values<W: Write>(start: NaiveDate, values: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "value"])?;
    for (i, v) in values.iter().enumerate() {
        w.write_record([
            (start + Duration::days(i as i64)).to_string(),
            v.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Counts matching ads per day over `span`.
pub fn aggregate_daily(
    ads: &[JobAd],
    group: &GroupSelector,
    label: impl Into<String>,
    span: &DateSpan,
) -> DailySeries {
    let mut values = vec![0.0; span.days()];
    for ad in ads.iter().filter(|a| group.matches(a) && span.contains(a.posted_date)) {
        values[(ad.posted_date - span.start).num_days() as usize] += 1.0;
    }
    DailySeries {
        label: label.into(),
        start: span.start,
        values,
    }
}
