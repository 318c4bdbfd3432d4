//! Stage output files and `provenance.json`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use skillscope_core::indicators::write_trend_lines;
use skillscope_core::similarity::SkillSetResult;
use skillscope_core::timeseries::{BacktestReport, DailySeries};
use skillscope_core::Error;

use crate::config::RunConfig;
use crate::pipeline::{Corpus, InputDigest, ReportRun, Selection};
use crate::{require_file, Result};

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|source| Error::Io { path, source })?;
    Ok(BufWriter::new(file))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut out = create(dir, name)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(Error::from)?;
    out.write_all(b"\n").map_err(Error::from)?;
    out.flush().map_err(Error::from)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    require_file(path, what)?;
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(serde_json::from_reader(BufReader::new(file)).map_err(Error::from)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Effective configuration; the output directory is left out so that
    /// runs into different directories compare equal.
    pub config: RunConfig,
    pub inputs: Vec<InputDigest>,
    pub generated_at: String,
}

impl Provenance {
    pub fn new(command: &str, cfg: &RunConfig, inputs: Vec<InputDigest>) -> Self {
        let mut config = cfg.clone();
        config.output = None;
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            inputs,
            generated_at: DateTime::<Utc>::from(std::time::SystemTime::now())
                .to_rfc3339_opts(SecondsFormat::Secs, true),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_json(dir, "provenance.json", self)
    }
}

pub fn write_ingest(dir: &Path, corpus: &Corpus) -> Result<()> {
    write_json(dir, "ingest_report.json", &corpus.reports)
}

pub fn write_skills(dir: &Path, skills: &SkillSetResult) -> Result<()> {
    skills.write_csv(create(dir, "skills.csv")?)?;
    write_json(dir, "skills.json", skills)
}

pub fn write_selection(dir: &Path, sel: &Selection) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(dir, "occupations.csv")?);
    w.write_record(["occupation", "ads", "total_slots", "target_slots", "eta"])
        .map_err(Error::from)?;
    for p in &sel.profiles {
        w.write_record([
            p.occupation.clone(),
            p.ads.to_string(),
            p.total_slots.to_string(),
            p.target_slots.to_string(),
            p.eta.to_string(),
        ])
        .map_err(Error::from)?;
    }
    w.flush().map_err(Error::from)?;
    sel.selection.write_csv(create(dir, "selected_occupations.csv")?)?;
    write_json(dir, "selection.json", &sel.selection)
}

/// Long-format `label,date,count`.
pub fn write_series(dir: &Path, series: &[DailySeries]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(dir, "series.csv")?);
    w.write_record(["label", "date", "count"]).map_err(Error::from)?;
    for s in series {
        for (i, v) in s.values.iter().enumerate() {
            w.write_record([s.label.as_str(), &s.date(i).to_string(), &v.to_string()])
                .map_err(Error::from)?;
        }
    }
    w.flush().map_err(Error::from)?;
    Ok(())
}

pub fn write_backtests(dir: &Path, reports: &[BacktestReport]) -> Result<()> {
    write_json(dir, "backtest.json", reports)?;
    let mut w = csv::Writer::from_writer(create(dir, "boxplot.csv")?);
    w.write_record(["label", "shift", "smape"]).map_err(Error::from)?;
    for r in reports {
        r.write_boxplot_rows(&mut w)?;
    }
    w.flush().map_err(Error::from)?;
    Ok(())
}

/// Writes every artifact of a full report run.
pub fn write_report_run(dir: &Path, corpus: &Corpus, run: &ReportRun) -> Result<()> {
    write_ingest(dir, corpus)?;
    write_skills(dir, &run.skills)?;
    write_selection(dir, &run.selection)?;
    write_series(dir, &run.series)?;
    write_json(dir, "groups.json", &run.groups)?;
    write_json(dir, "backtest.json", &run.backtests)?;
    run.report.write_dir(dir, &run.backtests)?;
    write_trend_lines(&run.trends, create(dir, "trend_lines.csv")?)?;
    run.skill_demand.write_csv(create(dir, "skill_demand.csv")?)?;
    Ok(())
}
