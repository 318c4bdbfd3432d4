//! Additive decomposition `y(t) = g(t) + s(t) + h(t) + ε_t` fitted as one
//! ridge-regularized linear regression.
//!
//! * `g` is a continuous piecewise-linear trend with hinge terms at evenly
//!   spaced changepoints over the first part of the training span.
//! * `s` is a sum of weekly and yearly Fourier series in absolute time, so the
//!   seasonal phase is the same for every training window.
//! * `h` has one indicator column per named holiday.
//!
//! Time is scaled to `τ ∈ [0, 1]` over the training window and `y` by its
//! maximum absolute value. The ridge penalty applies to the changepoint slope
//! deltas only, in those scaled units, and is weighted by the estimated noise
//! variance so that `λ` acts as the prior precision of each delta.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use chrono::{Duration, NaiveDate};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use tracing::warn;

use super::DailySeries;
use crate::{Error, Result};

/// Shortest series that can be fitted.
pub const MIN_FIT_DAYS: usize = 14;

const WEEKLY_PERIOD: f64 = 7.0;
const YEARLY_PERIOD: f64 = 365.25;
/// Yearly terms need at least two full periods of data.
const YEARLY_MIN_DAYS: usize = 730;
/// Noise variance floor in scaled units.
const SIGMA2_FLOOR: f64 = 1e-14;
const MAX_NOISE_ITERATIONS: usize = 200;
/// Slope deltas below this are reported as zero.
const DELTA_REPORT_EPS: f64 = 1e-8;

fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid date")
}

fn abs_day(date: NaiveDate) -> f64 {
    (date - epoch()).num_days() as f64
}

/// Named holiday dates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HolidayCalendar {
    pub holidays: BTreeMap<String, Vec<NaiveDate>>,
}

impl HolidayCalendar {
    pub fn is_empty(&self) -> bool {
        self.holidays.is_empty()
    }

    pub fn add(&mut self, name: impl Into<String>, date: NaiveDate) {
        let dates = self.holidays.entry(name.into()).or_default();
        if let Err(pos) = dates.binary_search(&date) {
            dates.insert(pos, date);
        }
    }

    /// Parses `date,name` lines (ISO dates); a header and blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cal = HolidayCalendar::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (date, name) = line.split_once(',').ok_or_else(|| Error::MalformedMapping {
                line: i + 1,
                reason: "expected `date,name`".into(),
            })?;
            let (date, name) = (date.trim(), name.trim());
            if i == 0 && date.eq_ignore_ascii_case("date") {
                continue;
            }
            let date = NaiveDate::parse_from_str(date, "%Y-%m-%d").map_err(|_| {
                Error::MalformedMapping {
                    line: i + 1,
                    reason: format!("bad date `{date}`"),
                }
            })?;
            if name.is_empty() {
                return Err(Error::MalformedMapping {
                    line: i + 1,
                    reason: "empty holiday name".into(),
                });
            }
            cal.add(name, date);
        }
        Ok(cal)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub n_changepoints: usize,
    /// Fraction of the training span over which changepoints are placed.
    pub changepoint_range: f64,
    /// Ridge weight on changepoint slope deltas.
    pub regularization: f64,
    pub weekly_order: usize,
    pub yearly_order: usize,
    #[serde(default)]
    pub holidays: HolidayCalendar,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            n_changepoints: 25,
            changepoint_range: 0.8,
            regularization: 1.0,
            weekly_order: 3,
            yearly_order: 10,
            holidays: HolidayCalendar::default(),
        }
    }
}

impl FitConfig {
    fn validate(&self) -> Result<()> {
        if !(self.changepoint_range > 0.0 && self.changepoint_range <= 1.0) {
            return Err(Error::config("changepoint_range", "must lie in (0, 1]"));
        }
        if !(self.regularization >= 0.0 && self.regularization.is_finite()) {
            return Err(Error::config("regularization", "must be finite and non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Changepoint {
    pub date: NaiveDate,
    /// Position in scaled time.
    pub position: f64,
    /// Slope change in scaled units.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolidayEffect {
    pub name: String,
    /// Additive effect in scaled units.
    pub effect: f64,
    pub dates: Vec<NaiveDate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionModel {
    pub train_start: NaiveDate,
    pub train_days: usize,
    /// Days per unit of scaled time.
    pub t_scale: f64,
    pub y_scale: f64,
    pub offset: f64,
    pub slope: f64,
    pub changepoints: Vec<Changepoint>,
    /// `[sin 1, cos 1, sin 2, cos 2, …]` weekly coefficients, scaled units.
    pub weekly: Vec<f64>,
    pub yearly: Vec<f64>,
    pub holidays: Vec<HolidayEffect>,
    /// Mean squared in-sample residual, original units.
    pub residual_variance: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn fourier(t: f64, period: f64, order: usize, out: &mut Vec<f64>) {
    for n in 1..=order {
        let x = 2.0 * PI * n as f64 * t / period;
        out.push(x.sin());
        out.push(x.cos());
    }
}

fn fourier_value(t: f64, period: f64, coefs: &[f64]) -> f64 {
    coefs
        .chunks_exact(2)
        .enumerate()
        .map(|(i, ab)| {
            let x = 2.0 * PI * (i + 1) as f64 * t / period;
            ab[0] * x.sin() + ab[1] * x.cos()
        })
        .sum()
}

/// Changepoint row indices: evenly spaced over the first
/// `floor(n · range)` days, excluding day 0.
fn changepoint_indices(n: usize, count: usize, range: f64) -> Vec<usize> {
    let hist = (n as f64 * range).floor() as usize;
    let count = count.min(hist.saturating_sub(1));
    if count == 0 {
        return Vec::new();
    }
    let last = (hist - 1) as f64;
    (1..=count)
        .map(|j| (j as f64 * last / count as f64).round() as usize)
        .collect()
}

/// Fits the decomposition to a daily series.
pub fn fit(series: &DailySeries, config: &FitConfig) -> Result<DecompositionModel> {
    config.validate()?;
    let n = series.len();
    if n < MIN_FIT_DAYS {
        return Err(Error::SeriesTooShort {
            required: MIN_FIT_DAYS,
            actual: n,
        });
    }
    let mut warnings = Vec::new();

    let t_scale = (n - 1) as f64;
    let y_max = series.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let y_scale = if y_max > 0.0 { y_max } else { 1.0 };

    let yearly_order = if config.yearly_order > 0 && n < YEARLY_MIN_DAYS {
        let msg = format!(
            "{}: {n} days is shorter than {YEARLY_MIN_DAYS}, yearly seasonality disabled",
            series.label
        );
        warn!("{msg}");
        warnings.push(msg);
        0
    } else {
        config.yearly_order
    };

    let cp_rows = changepoint_indices(n, config.n_changepoints, config.changepoint_range);
    let cp_pos: Vec<f64> = cp_rows.iter().map(|&i| i as f64 / t_scale).collect();

    let train_end = series.end();
    let mut holiday_cols: Vec<(String, Vec<NaiveDate>)> = Vec::new();
    for (name, dates) in &config.holidays.holidays {
        if dates.iter().any(|d| *d >= series.start && *d <= train_end) {
            holiday_cols.push((name.clone(), dates.clone()));
        } else {
            warnings.push(format!("holiday `{name}` does not occur in the training window"));
        }
    }

    let n_cp = cp_pos.len();
    let p = 2 + n_cp + 2 * config.weekly_order + 2 * yearly_order + holiday_cols.len();
    let mut x = DMatrix::<f64>::zeros(n, p);
    let y = DVector::from_iterator(n, series.values.iter().map(|v| v / y_scale));
    let mut row = Vec::with_capacity(p);
    let origin = abs_day(series.start);
    for i in 0..n {
        features(
            i as f64 / t_scale,
            origin + i as f64,
            series.date(i),
            &cp_pos,
            config.weekly_order,
            yearly_order,
            &holiday_cols,
            &mut row,
        );
        for (j, v) in row.iter().enumerate() {
            x[(i, j)] = *v;
        }
    }
    let xtx = x.tr_mul(&x);
    let xty = x.tr_mul(&y);

    // MAP fit with δ ~ N(0, 1/λ) and Gaussian noise of unknown variance:
    // alternate between solving with penalty λσ² and re-estimating σ².
    let mut sigma2 = 1.0;
    let mut beta = DVector::zeros(p);
    let constant = series.values.iter().all(|v| *v == series.values[0]);
    if constant {
        // flat trend, no seasonality; exact rather than solved
        beta[0] = series.values[0] / y_scale;
    }
    for _ in 0..if constant { 0 } else { MAX_NOISE_ITERATIONS } {
        let mut a = xtx.clone();
        for j in 0..n_cp {
            a[(2 + j, 2 + j)] += config.regularization * sigma2;
        }
        beta = solve(a, &xty)?;
        let next = ((&y - &x * &beta).norm_squared() / n as f64).max(SIGMA2_FLOOR);
        let done = (next - sigma2).abs() <= 1e-9 * sigma2 || next <= SIGMA2_FLOOR;
        sigma2 = next;
        if done || n_cp == 0 || config.regularization == 0.0 {
            break;
        }
    }

    let mut k = 2;
    let changepoints: Vec<Changepoint> = cp_rows
        .iter()
        .zip(&cp_pos)
        .map(|(&r, &pos)| {
            let cp = Changepoint {
                date: series.date(r),
                position: pos,
                delta: beta[k],
            };
            k += 1;
            cp
        })
        .collect();
    let weekly: Vec<f64> = beta.as_slice()[k..k + 2 * config.weekly_order].to_vec();
    k += 2 * config.weekly_order;
    let yearly: Vec<f64> = beta.as_slice()[k..k + 2 * yearly_order].to_vec();
    k += 2 * yearly_order;
    let holidays = holiday_cols
        .into_iter()
        .map(|(name, dates)| {
            let effect = beta[k];
            k += 1;
            HolidayEffect {
                name,
                effect,
                dates,
            }
        })
        .collect();

    let mut model = DecompositionModel {
        train_start: series.start,
        train_days: n,
        t_scale,
        y_scale,
        offset: beta[0],
        slope: beta[1],
        changepoints,
        weekly,
        yearly,
        holidays,
        residual_variance: 0.0,
        warnings,
    };
    let fitted = model.predict_range(series.start, n);
    model.residual_variance = series
        .values
        .iter()
        .zip(&fitted)
        .map(|(y, f)| (y - f).powi(2))
        .sum::<f64>()
        / n as f64;
    Ok(model)
}

#[allow(clippy::too_many_arguments)]
fn features(
    tau: f64,
    t_abs: f64,
    date: NaiveDate,
    cp_pos: &[f64],
    weekly_order: usize,
    yearly_order: usize,
    holidays: &[(String, Vec<NaiveDate>)],
    row: &mut Vec<f64>,
) {
    row.clear();
    row.push(1.0);
    row.push(tau);
    row.extend(cp_pos.iter().map(|&c| (tau - c).max(0.0)));
    fourier(t_abs, WEEKLY_PERIOD, weekly_order, row);
    fourier(t_abs, YEARLY_PERIOD, yearly_order, row);
    row.extend(
        holidays
            .iter()
            .map(|(_, dates)| if dates.binary_search(&date).is_ok() { 1.0 } else { 0.0 }),
    );
}

fn solve(a: DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if let Some(chol) = a.clone().cholesky() {
        return Ok(chol.solve(b));
    }
    // Rank-deficient system (e.g. λ = 0 with collinear columns): minimum-norm solution.
    let svd = a.svd(true, true);
    let tol = svd.singular_values.max() * 1e-12;
    svd.solve(b, tol)
        .map_err(|e| Error::Invariant(format!("least-squares solve failed: {e}")))
}

impl DecompositionModel {
    pub fn train_end(&self) -> NaiveDate {
        self.train_start + Duration::days(self.train_days as i64 - 1)
    }

    fn tau(&self, date: NaiveDate) -> f64 {
        (date - self.train_start).num_days() as f64 / self.t_scale
    }

    /// Trend `g` at `date`, original units.
    pub fn trend(&self, date: NaiveDate) -> f64 {
        let tau = self.tau(date);
        let hinge: f64 = self
            .changepoints
            .iter()
            .map(|c| c.delta * (tau - c.position).max(0.0))
            .sum();
        self.y_scale * (self.offset + self.slope * tau + hinge)
    }

    pub fn weekly_component(&self, date: NaiveDate) -> f64 {
        self.y_scale * fourier_value(abs_day(date), WEEKLY_PERIOD, &self.weekly)
    }

    pub fn yearly_component(&self, date: NaiveDate) -> f64 {
        self.y_scale * fourier_value(abs_day(date), YEARLY_PERIOD, &self.yearly)
    }

    /// Seasonality `s`: weekly plus yearly.
    pub fn seasonal(&self, date: NaiveDate) -> f64 {
        self.weekly_component(date) + self.yearly_component(date)
    }

    /// Holiday effect `h`.
    pub fn holiday(&self, date: NaiveDate) -> f64 {
        self.y_scale
            * self
                .holidays
                .iter()
                .filter(|h| h.dates.binary_search(&date).is_ok())
                .map(|h| h.effect)
                .sum::<f64>()
    }

    /// `g + s + h`, unclipped.
    pub fn predict(&self, date: NaiveDate) -> f64 {
        self.trend(date) + self.seasonal(date) + self.holiday(date)
    }

    pub fn predict_range(&self, start: NaiveDate, len: usize) -> Vec<f64> {
        (0..len)
            .map(|i| self.predict(start + Duration::days(i as i64)))
            .collect()
    }

    pub fn trend_range(&self, start: NaiveDate, len: usize) -> Vec<f64> {
        (0..len)
            .map(|i| self.trend(start + Duration::days(i as i64)))
            .collect()
    }

    /// In-sample fitted values.
    pub fn fitted(&self) -> Vec<f64> {
        self.predict_range(self.train_start, self.train_days)
    }

    /// Trend slope at `date`, original units per day.
    pub fn slope_at(&self, date: NaiveDate) -> f64 {
        let tau = self.tau(date);
        let k: f64 = self.slope
            + self
                .changepoints
                .iter()
                .filter(|c| c.position < tau)
                .map(|c| c.delta)
                .sum::<f64>();
        k * self.y_scale / self.t_scale
    }

    /// Trend segments as `(start, slope per day)`, merging changepoints whose
    /// delta is negligible.
    pub fn trend_segments(&self) -> Vec<(NaiveDate, f64)> {
        let per_day = self.y_scale / self.t_scale;
        let mut k = self.slope;
        let mut out = vec![(self.train_start, k * per_day)];
        for c in &self.changepoints {
            if c.delta.abs() < DELTA_REPORT_EPS {
                continue;
            }
            k += c.delta;
            out.push((c.date, k * per_day));
        }
        out
    }

    /// Half the peak-to-peak range of the weekly component.
    pub fn weekly_amplitude(&self) -> f64 {
        self.y_scale * half_range(WEEKLY_PERIOD, &self.weekly)
    }

    pub fn yearly_amplitude(&self) -> f64 {
        self.y_scale * half_range(YEARLY_PERIOD, &self.yearly)
    }
}

fn half_range(period: f64, coefs: &[f64]) -> f64 {
    if coefs.is_empty() {
        return 0.0;
    }
    const STEPS: usize = 20_000;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..STEPS {
        let v = fourier_value(period * i as f64 / STEPS as f64, period, coefs);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    0.5 * (hi - lo)
}

/// Forecasts `horizon` days past the end of training, clipped at zero.
pub fn forecast(model: &DecompositionModel, horizon: usize) -> Result<Vec<f64>> {
    if horizon == 0 {
        return Err(Error::InvalidInput("forecast horizon must be at least 1".into()));
    }
    let start = model.train_end() + Duration::days(1);
    Ok(model
        .predict_range(start, horizon)
        .into_iter()
        .map(|v| v.max(0.0))
        .collect())
}
