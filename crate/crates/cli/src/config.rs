//! `RunConfig`, read from a TOML file and overridden by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use skillscope_core::corpus::InputFormat;
use skillscope_core::occupations::SelectionParams;
use skillscope_core::similarity::{Averaging, ExpansionParams};
use skillscope_core::synthgen::SynthConfig;
use skillscope_core::timeseries::{BacktestConfig, FitConfig};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: InputSection,
    pub skills: SkillsSection,
    pub occupations: OccupationsSection,
    pub report: ReportSection,
    pub backtest: BacktestConfig,
    pub model: ModelSection,
    pub synth: SynthSection,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputSection {
    pub paths: Vec<PathBuf>,
    /// `jsonl` or `csv`; inferred from each file's extension when absent.
    pub format: Option<String>,
    pub max_reject_fraction: f64,
}

impl Default for InputSection {
    fn default() -> Self {
        Self {
            paths: Vec::new(),
            format: None,
            max_reject_fraction: 0.05,
        }
    }
}

impl InputSection {
    pub fn format_for(&self, path: &Path) -> Result<InputFormat, CliError> {
        match &self.format {
            Some(f) => f
                .parse()
                .map_err(|_| CliError::Usage(format!("unknown input format `{f}`"))),
            None => Ok(InputFormat::from_path(path)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SkillsSection {
    pub seeds: Vec<String>,
    pub seeds_file: Option<PathBuf>,
    pub per_seed_k: usize,
    pub cutoff: usize,
    /// Average merged scores over all seeds rather than over appearances.
    pub average_over_all_seeds: bool,
}

impl Default for SkillsSection {
    fn default() -> Self {
        let p = ExpansionParams::default();
        Self {
            seeds: Vec::new(),
            seeds_file: None,
            per_seed_k: p.per_seed_k,
            cutoff: p.cutoff,
            average_over_all_seeds: false,
        }
    }
}

impl SkillsSection {
    pub fn params(&self) -> ExpansionParams {
        ExpansionParams {
            per_seed_k: self.per_seed_k,
            cutoff: self.cutoff,
            averaging: if self.average_over_all_seeds {
                Averaging::AllSeeds
            } else {
                Averaging::Appearances
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OccupationsSection {
    pub threshold: f64,
    pub low_support_floor: usize,
    /// `occupation,category` file; the built-in data-occupation map when absent.
    pub categories: Option<PathBuf>,
}

impl Default for OccupationsSection {
    fn default() -> Self {
        let p = SelectionParams::default();
        Self {
            threshold: p.threshold,
            low_support_floor: p.low_support_floor,
            categories: None,
        }
    }
}

impl OccupationsSection {
    pub fn params(&self) -> SelectionParams {
        SelectionParams {
            threshold: self.threshold,
            low_support_floor: self.low_support_floor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    Category,
    Occupation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSection {
    pub group_by: GroupBy,
    pub baseline_label: String,
}

impl Default for ReportSection {
    fn default() -> Self {
        Self {
            group_by: GroupBy::Category,
            baseline_label: "market".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub n_changepoints: usize,
    pub changepoint_range: f64,
    pub regularization: f64,
    pub weekly_order: usize,
    pub yearly_order: usize,
    /// `date,name` holiday file.
    pub holidays: Option<PathBuf>,
}

impl Default for ModelSection {
    fn default() -> Self {
        let f = FitConfig::default();
        Self {
            n_changepoints: f.n_changepoints,
            changepoint_range: f.changepoint_range,
            regularization: f.regularization,
            weekly_order: f.weekly_order,
            yearly_order: f.yearly_order,
            holidays: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub seed: u64,
    pub n_days: usize,
}

impl Default for SynthSection {
    fn default() -> Self {
        Self {
            seed: 42,
            n_days: 1461,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Run settings matched to a generated corpus in `dir`: the target set is
    /// cut at the first cluster's size, groups are occupations, and the
    /// backtest is shortened when the corpus is too short for the default
    /// protocol.
    pub fn for_synthetic(dir: &Path, config: &SynthConfig) -> Self {
        let mut run = RunConfig::default();
        run.input.paths = vec![dir.join("ads.jsonl")];
        run.skills.seeds_file = Some(dir.join("seeds.txt"));
        if let Some(c) = config.clusters.first() {
            run.skills.cutoff = c.skills.len();
        }
        run.occupations.categories = Some(dir.join("categories.csv"));
        run.report.group_by = GroupBy::Occupation;
        if config.n_days < run.backtest.required_len() {
            run.backtest = BacktestConfig {
                train_days: config.n_days / 2,
                test_days: (config.n_days / 8).max(1),
                iterations: (config.n_days / 24).max(1),
            };
        }
        run.synth = SynthSection {
            seed: config.seed,
            n_days: config.n_days,
        };
        run
    }
}
