//! In-memory pipeline stages. Each takes the run configuration and the
//! previous stage's output; file handling lives in `output`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use skillscope_core::corpus::{build_index, ingest, IngestConfig, IngestReport, JobAd, SkillVocabulary};
use skillscope_core::indicators::{assemble_report, ShortageIndicators, ShortageReport, SkillDemandStats};
use skillscope_core::occupations::{
    compute_intensity, select_occupations, CategoryMap, OccupationProfile, OccupationSelection,
    TargetSkills,
};
use skillscope_core::similarity::{compute_theta, expand_seeds, parse_seed_list, SkillSetResult};
use skillscope_core::skillmetrics::{compute_effective_use, compute_rca};
use skillscope_core::timeseries::{
    aggregate_daily, fit, sliding_window_backtest, BacktestReport, DailySeries, DateSpan,
    DecompositionModel, FitConfig, GroupSelector, HolidayCalendar,
};
use tracing::{info, warn};

use crate::config::{GroupBy, RunConfig};
use crate::output::sha256_file;
use crate::{require_file, CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileIngest {
    pub path: PathBuf,
    pub report: IngestReport,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub ads: Vec<JobAd>,
    pub vocab: SkillVocabulary,
    pub reports: Vec<FileIngest>,
    pub inputs: Vec<InputDigest>,
}

impl Corpus {
    /// Wraps ads that did not come from files.
    pub fn from_ads(ads: Vec<JobAd>) -> Self {
        Self {
            vocab: SkillVocabulary::from_ads(&ads),
            ads,
            reports: Vec::new(),
            inputs: Vec::new(),
        }
    }

    /// Combined digest of all input files, in the order given.
    pub fn hash(&self) -> Option<String> {
        match self.inputs.as_slice() {
            [] => None,
            [one] => Some(one.sha256.clone()),
            many => Some(
                many.iter()
                    .map(|d| d.sha256.as_str())
                    .collect::<Vec<_>>()
                    .join("+"),
            ),
        }
    }
}

pub fn load_corpus(cfg: &RunConfig) -> Result<Corpus> {
    if cfg.input.paths.is_empty() {
        return Err(CliError::Usage("no input files given (use --input)".into()));
    }
    let ingest_cfg = IngestConfig {
        max_reject_fraction: cfg.input.max_reject_fraction,
        date_range: None,
    };
    let mut ads = Vec::new();
    let mut reports = Vec::new();
    let mut inputs = Vec::new();
    for path in &cfg.input.paths {
        require_file(path, "input")?;
        let format = cfg.input.format_for(path)?;
        let got = ingest(path, format, &ingest_cfg)?;
        info!(
            path = %path.display(),
            accepted = got.report.accepted,
            rejected = got.report.rejected,
            "ingested"
        );
        ads.extend(got.ads);
        reports.push(FileIngest {
            path: path.clone(),
            report: got.report,
        });
        inputs.push(InputDigest {
            path: path.clone(),
            sha256: sha256_file(path)?,
        });
    }
    let mut seen = HashSet::new();
    if let Some(dup) = ads.iter().find(|a| !seen.insert(a.id.as_str())) {
        return Err(skillscope_core::Error::InvalidInput(format!(
            "ad id `{}` appears in more than one input file",
            dup.id
        ))
        .into());
    }
    Ok(Corpus {
        vocab: SkillVocabulary::from_ads(&ads),
        ads,
        reports,
        inputs,
    })
}

/// Seeds from the config list followed by the seed file, duplicates dropped.
pub fn load_seeds(cfg: &RunConfig) -> Result<Vec<String>> {
    let mut seeds = cfg.skills.seeds.clone();
    if let Some(path) = &cfg.skills.seeds_file {
        require_file(path, "seeds")?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read seeds file {}: {e}", path.display())))?;
        seeds.extend(parse_seed_list(&text));
    }
    let mut seen = BTreeSet::new();
    seeds.retain(|s| seen.insert(s.trim().to_lowercase()));
    if seeds.is_empty() {
        return Err(CliError::Usage("no seed skills given (use --seeds)".into()));
    }
    Ok(seeds)
}

pub fn expand(corpus: &Corpus, seeds: &[String], cfg: &RunConfig) -> Result<SkillSetResult> {
    let index = build_index(&corpus.ads, &corpus.vocab)?;
    index.check_invariants()?;
    let eff = compute_effective_use(&compute_rca(&index)?);
    let theta = compute_theta(&eff);
    let mut result = expand_seeds(&theta, &corpus.vocab, seeds, &cfg.skills.params())?;
    result.corpus_hash = corpus.hash();
    result.check_invariants()?;
    for w in &result.warnings {
        warn!("{w}");
    }
    Ok(result)
}

pub fn load_categories(cfg: &RunConfig) -> Result<CategoryMap> {
    match &cfg.occupations.categories {
        Some(path) => {
            require_file(path, "categories")?;
            Ok(CategoryMap::load(path)?)
        }
        None => Ok(CategoryMap::dsa_default()),
    }
}

pub struct Selection {
    pub profiles: Vec<OccupationProfile>,
    pub selection: OccupationSelection,
}

pub fn select(ads: &[JobAd], skills: &SkillSetResult, cfg: &RunConfig) -> Result<Selection> {
    let profiles = compute_intensity(ads, &TargetSkills::from(skills))?;
    let categories = load_categories(cfg)?;
    let selection = select_occupations(&profiles, &cfg.occupations.params(), Some(&categories))?;
    if selection.selected.is_empty() {
        warn!("no occupation exceeds the intensity threshold");
    }
    for p in selection.selected.iter().filter(|p| p.low_support) {
        warn!(occupation = %p.occupation, ads = p.ads, "selected occupation has low support");
    }
    Ok(Selection {
        profiles,
        selection,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub label: String,
    pub selector: GroupSelector,
}

/// The baseline (all ads) followed by one group per category or per
/// selected occupation.
pub fn groups(selection: &OccupationSelection, cfg: &RunConfig) -> Result<Vec<Group>> {
    let baseline = &cfg.report.baseline_label;
    let mut by_label: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for p in &selection.selected {
        let label = match cfg.report.group_by {
            GroupBy::Category => p
                .category
                .clone()
                .unwrap_or_else(|| skillscope_core::occupations::UNCATEGORIZED.to_string()),
            GroupBy::Occupation => p.occupation.clone(),
        };
        by_label.entry(label).or_default().insert(p.occupation.clone());
    }
    if by_label.contains_key(baseline) {
        return Err(CliError::Usage(format!(
            "group label `{baseline}` collides with the baseline label; set report.baseline_label"
        )));
    }
    let mut out = vec![Group {
        label: baseline.clone(),
        selector: GroupSelector::Market,
    }];
    out.extend(by_label.into_iter().map(|(label, occs)| Group {
        label,
        selector: GroupSelector::Occupations(occs),
    }));
    Ok(out)
}

pub fn fit_config(cfg: &RunConfig) -> Result<FitConfig> {
    let m = &cfg.model;
    let holidays = match &m.holidays {
        Some(path) => {
            require_file(path, "holidays")?;
            HolidayCalendar::load(path)?
        }
        None => HolidayCalendar::default(),
    };
    Ok(FitConfig {
        n_changepoints: m.n_changepoints,
        changepoint_range: m.changepoint_range,
        regularization: m.regularization,
        weekly_order: m.weekly_order,
        yearly_order: m.yearly_order,
        holidays,
    })
}

pub fn daily_series(ads: &[JobAd], groups: &[Group], span: &DateSpan) -> Vec<DailySeries> {
    groups
        .iter()
        .map(|g| aggregate_daily(ads, &g.selector, g.label.clone(), span))
        .collect()
}

pub fn backtests(series: &[DailySeries], cfg: &RunConfig, fit_cfg: &FitConfig) -> Result<Vec<BacktestReport>> {
    series
        .iter()
        .map(|s| {
            let report = sliding_window_backtest(s, &cfg.backtest, fit_cfg)?;
            info!(label = %s.label, median = report.summary.median, "backtest done");
            Ok(report)
        })
        .collect()
}

/// Fits each series over its whole span, for trend plots.
pub fn trends(series: &[DailySeries], fit_cfg: &FitConfig) -> Result<Vec<(String, DecompositionModel)>> {
    series
        .iter()
        .map(|s| {
            let model = fit(s, fit_cfg)?;
            for w in &model.warnings {
                warn!(label = %s.label, "{w}");
            }
            Ok((s.label.clone(), model))
        })
        .collect()
}

pub fn indicators(
    ads: &[JobAd],
    groups: &[Group],
    span: &DateSpan,
    backtests: &[BacktestReport],
    profiles: Vec<OccupationProfile>,
    cfg: &RunConfig,
) -> Result<ShortageReport> {
    let per_group = groups
        .iter()
        .map(|g| {
            let ind = ShortageIndicators::compute(
                g.label.clone(),
                ads.iter().filter(|a| g.selector.matches(a)),
                span,
            );
            match backtests.iter().find(|b| b.label == g.label) {
                Some(b) => ind.with_backtest(b),
                None => {
                    warn!(label = %g.label, "no backtest for group; predictability left empty");
                    ind
                }
            }
        })
        .collect();
    Ok(assemble_report(per_group, &cfg.report.baseline_label, profiles)?)
}

pub fn skill_demand(ads: &[JobAd], skills: &SkillSetResult, span: &DateSpan) -> Result<SkillDemandStats> {
    Ok(SkillDemandStats::compute(ads, &TargetSkills::from(skills), span.years())?)
}

/// Everything the `report` command produces.
pub struct ReportRun {
    pub skills: SkillSetResult,
    pub selection: Selection,
    pub groups: Vec<Group>,
    pub series: Vec<DailySeries>,
    pub backtests: Vec<BacktestReport>,
    pub trends: Vec<(String, DecompositionModel)>,
    pub report: ShortageReport,
    pub skill_demand: SkillDemandStats,
}

pub fn run_report(corpus: &Corpus, seeds: &[String], cfg: &RunConfig) -> Result<ReportRun> {
    let fit_cfg = fit_config(cfg)?;
    let skills = expand(corpus, seeds, cfg)?;
    let selection = select(&corpus.ads, &skills, cfg)?;
    let groups = groups(&selection.selection, cfg)?;
    let span = DateSpan::covering(&corpus.ads)?;
    let series = daily_series(&corpus.ads, &groups, &span);
    let backtests = backtests(&series, cfg, &fit_cfg)?;
    let trends = trends(&series, &fit_cfg)?;
    let report = indicators(
        &corpus.ads,
        &groups,
        &span,
        &backtests,
        selection.selection.selected.clone(),
        cfg,
    )?;
    let skill_demand = skill_demand(&corpus.ads, &skills, &span)?;
    Ok(ReportRun {
        skills,
        selection,
        groups,
        series,
        backtests,
        trends,
        report,
        skill_demand,
    })
}
