//! Sliding-window backtest: a fixed-length training window and the test
//! window right after it advance one day per iteration.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit, forecast, smape, DailySeries, FitConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BacktestConfig {
    pub train_days: usize,
    pub test_days: usize,
    pub iterations: usize,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        Self {
            train_days: 1186,
            test_days: 365,
            iterations: 365,
        }
    }
}

impl BacktestConfig {
    /// Shortest series the protocol can run on.
    pub fn required_len(&self) -> usize {
        (self.train_days + self.test_days + self.iterations).saturating_sub(1)
    }

    fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("train_days", self.train_days),
            ("test_days", self.test_days),
            ("iterations", self.iterations),
        ] {
            if v == 0 {
                return Err(Error::config(field, "must be at least 1"));
            }
        }
        Ok(())
    }
}

/// Anything that can be trained on a window and forecast ahead.
pub trait Forecaster: Sync {
    fn fit_forecast(&self, train: &DailySeries, horizon: usize) -> Result<Vec<f64>>;
}

impl Forecaster for FitConfig {
    fn fit_forecast(&self, train: &DailySeries, horizon: usize) -> Result<Vec<f64>> {
        forecast(&fit(train, self)?, horizon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Quantiles {
    /// Linear-interpolation quantiles of a non-empty sample.
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("no values to summarise".into()));
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let h = p * (v.len() - 1) as f64;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        };
        Ok(Self {
            min: v[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: v[v.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub label: String,
    pub train_days: usize,
    pub test_days: usize,
    pub iterations: usize,
    /// SMAPE per shift, in shift order.
    pub scores: Vec<f64>,
    pub summary: Quantiles,
}

impl BacktestReport {
    pub fn check_invariants(&self) -> Result<()> {
        if self.scores.len() != self.iterations {
            return Err(Error::Invariant(format!(
                "backtest produced {} scores for {} iterations",
                self.scores.len(),
                self.iterations
            )));
        }
        if let Some(s) = self.scores.iter().find(|s| !(0.0..=200.0).contains(*s)) {
            return Err(Error::Invariant(format!("SMAPE score {s} outside [0, 200]")));
        }
        Ok(())
    }

    /// Long-format `label,shift,smape` rows, no header.
    pub fn write_boxplot_rows<W: Write>(&self, w: &mut csv::Writer<W>) -> Result<()> {
        for (i, s) in self.scores.iter().enumerate() {
            w.write_record([self.label.as_str(), &i.to_string(), &s.to_string()])?;
        }
        Ok(())
    }
}

/// Runs the protocol with the decomposition model.
pub fn sliding_window_backtest(
    series: &DailySeries,
    config: &BacktestConfig,
    fit_config: &FitConfig,
) -> Result<BacktestReport> {
    sliding_window_backtest_with(series, config, fit_config)
}

/// Runs the protocol with any forecaster. Shifts run in parallel; scores are
/// collected in shift order.
pub fn sliding_window_backtest_with<F: Forecaster>(
    series: &DailySeries,
    config: &BacktestConfig,
    forecaster: &F,
) -> Result<BacktestReport> {
    config.validate()?;
    let required = config.required_len();
    if series.len() < required {
        return Err(Error::SeriesTooShort {
            required,
            actual: series.len(),
        });
    }
    let scores = (0..config.iterations)
        .into_par_iter()
        .map(|shift| {
            let train = series.window(shift, config.train_days);
            let test_start = shift + config.train_days;
            let actual = &series.values[test_start..test_start + config.test_days];
            let predicted = forecaster.fit_forecast(&train, config.test_days)?;
            smape(actual, &predicted)
        })
        .collect::<Result<Vec<f64>>>()?;
    let report = BacktestReport {
        label: series.label.clone(),
        train_days: config.train_days,
        test_days: config.test_days,
        iterations: config.iterations,
        summary: Quantiles::of(&scores)?,
        scores,
    };
    report.check_invariants()?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use chrono::NaiveDate;

    use super::*;

    struct MeanForecaster;

    impl Forecaster for MeanForecaster {
        fn fit_forecast(&self, train: &DailySeries, horizon: usize) -> Result<Vec<f64>> {
            Ok(vec![train.total() / train.len() as f64; horizon])
        }
    }

    fn series(values: Vec<f64>) -> DailySeries {
        DailySeries::new("s", NaiveDate::from_ymd_opt(2014, 1, 1).unwrap(), values).unwrap()
    }

    #[test]
    fn counting() {
        let cfg = BacktestConfig {
            train_days: 10,
            test_days: 5,
            iterations: 3,
        };
        let values: Vec<f64> = (0..17).map(|i| i as f64).collect();
        let report = sliding_window_backtest_with(&series(values), &cfg, &MeanForecaster).unwrap();
        assert_eq!(report.scores.len(), 3);
        // shift 0: mean of 0..10 is 4.5, actuals 10..15
        let expected = smape(&[10.0, 11.0, 12.0, 13.0, 14.0], &[4.5; 5]).unwrap();
        assert!((report.scores[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn too_short_reports_minimum() {
        let cfg = BacktestConfig {
            train_days: 10,
            test_days: 5,
            iterations: 3,
        };
        let err = sliding_window_backtest_with(&series(vec![1.0; 16]), &cfg, &MeanForecaster)
            .unwrap_err();
        assert!(matches!(err, Error::SeriesTooShort { required: 17, actual: 16 }));
    }

    #[test]
    fn decomposition_on_constant_series() {
        let cfg = BacktestConfig {
            train_days: 14,
            test_days: 5,
            iterations: 3,
        };
        let report =
            sliding_window_backtest(&series(vec![4.0; 21]), &cfg, &FitConfig::default()).unwrap();
        assert_eq!(report.scores.len(), 3);
        assert!(report.scores.iter().all(|&s| s == 0.0), "{:?}", report.scores);
    }

    #[test]
    fn quantiles_interpolate() {
        let q = Quantiles::of(&[4.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
        assert_eq!((q.min, q.q1, q.median, q.q3, q.max), (1.0, 2.0, 3.0, 4.0, 5.0));
        let q = Quantiles::of(&[1.0, 2.0]).unwrap();
        assert_eq!(q.median, 1.5);
        assert_eq!(q.q1, 1.25);
    }
}
