use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use skillscope_core::corpus::write_jsonl;
use skillscope_core::occupations::OccupationSelection;
use skillscope_core::similarity::SkillSetResult;
use skillscope_core::synthgen::{self, scenarios, SynthConfig};
use skillscope_core::timeseries::{BacktestReport, DateSpan};
use skillscope_core::Error;
use skillscope_cli::config::{GroupBy, RunConfig};
use skillscope_cli::output::{self, read_json, Provenance};
use skillscope_cli::pipeline::{self, Selection};
use skillscope_cli::{require_file, CliError, Result};
use tracing::info;

#[derive(Parser)]
#[command(name = "skillscope", version, about = "Skill-shortage indicators from job-ad corpora")]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Log more (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate input files and write a normalized corpus.
    Ingest(RunArgs),
    /// Generate a synthetic corpus with planted ground truth.
    Synth(SynthArgs),
    /// Expand seed skills into a ranked target skill set.
    Skills(RunArgs),
    /// Score occupations by target-skill intensity and select them.
    Occupations {
        #[command(flatten)]
        run: RunArgs,
        /// `skills.json` or `skills.csv` from the skills stage.
        #[arg(long)]
        skills: PathBuf,
    },
    /// Build daily series per group and run the sliding-window backtest.
    Backtest {
        #[command(flatten)]
        run: RunArgs,
        /// `selection.json` from the occupations stage.
        #[arg(long)]
        selection: PathBuf,
    },
    /// Compute the five indicators and flag groups against the baseline.
    Indicators {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        selection: PathBuf,
        /// `backtest.json` from the backtest stage; predictability is left empty without it.
        #[arg(long)]
        backtest: Option<PathBuf>,
        /// Target skill set, for per-skill demand counts.
        #[arg(long)]
        skills: Option<PathBuf>,
    },
    /// Run every stage end to end.
    Report(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Corpus file(s), JSONL or CSV.
    #[arg(long, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Input format; inferred from the extension when absent.
    #[arg(long)]
    format: Option<String>,
    /// Newline-delimited seed skill file.
    #[arg(long)]
    seeds: Option<PathBuf>,
    /// Seed skill given directly; repeatable.
    #[arg(long = "seed-skill")]
    seed_skill: Vec<String>,
    /// Neighbours taken per seed.
    #[arg(long)]
    per_seed_k: Option<usize>,
    /// Length of the final skill list, seeds included.
    #[arg(long)]
    cutoff: Option<usize>,
    /// Average merged similarity scores over all seeds instead of over appearances.
    #[arg(long)]
    avg_over_all_seeds: bool,
    /// Select occupations with intensity strictly above this.
    #[arg(long)]
    threshold: Option<f64>,
    /// `occupation,category` file.
    #[arg(long)]
    categories: Option<PathBuf>,
    /// Compare categories or individual occupations with the baseline.
    #[arg(long, value_enum)]
    group_by: Option<GroupBy>,
    /// Backtest training window.
    #[arg(long)]
    train_days: Option<usize>,
    /// Backtest forecast horizon.
    #[arg(long)]
    test_days: Option<usize>,
    /// Number of one-day shifts.
    #[arg(long)]
    iterations: Option<usize>,
    /// `date,name` holiday file.
    #[arg(long)]
    holidays: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                require_file(path, "config")?;
                RunConfig::load(path)?
            }
            None => RunConfig::default(),
        };
        if !self.input.is_empty() {
            cfg.input.paths = self.input.clone();
        }
        set(&mut cfg.input.format, self.format.clone().map(Some));
        set(&mut cfg.skills.seeds_file, self.seeds.clone().map(Some));
        if !self.seed_skill.is_empty() {
            cfg.skills.seeds = self.seed_skill.clone();
        }
        set(&mut cfg.skills.per_seed_k, self.per_seed_k);
        set(&mut cfg.skills.cutoff, self.cutoff);
        if self.avg_over_all_seeds {
            cfg.skills.average_over_all_seeds = true;
        }
        set(&mut cfg.occupations.threshold, self.threshold);
        set(&mut cfg.occupations.categories, self.categories.clone().map(Some));
        set(&mut cfg.report.group_by, self.group_by);
        set(&mut cfg.backtest.train_days, self.train_days);
        set(&mut cfg.backtest.test_days, self.test_days);
        set(&mut cfg.backtest.iterations, self.iterations);
        set(&mut cfg.model.holidays, self.holidays.clone().map(Some));
        set(&mut cfg.output, self.out.clone().map(Some));
        Ok(cfg)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Scenario {
    /// Four data occupations, one planted shortage-consistent on every indicator.
    Shortage,
    /// One cohesive eight-skill cluster among 50 background skills.
    Cluster,
    /// One planted high-intensity occupation among low-intensity ones.
    Selection,
}

#[derive(Args)]
struct SynthArgs {
    /// JSON generator configuration.
    #[arg(long, conflicts_with = "scenario")]
    config: Option<PathBuf>,
    /// Built-in scenario, used when no config is given.
    #[arg(long, value_enum, default_value = "shortage")]
    scenario: Scenario,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Length of the shortage scenario in days.
    #[arg(long, default_value_t = 1461)]
    days: usize,
    #[arg(long)]
    out: PathBuf,
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg
        .output
        .clone()
        .ok_or_else(|| CliError::Usage("no output directory given (use --out)".into()))?;
    output::ensure_dir(&dir)?;
    Ok(dir)
}

fn cmd_ingest(args: &RunArgs) -> Result<()> {
    let cfg = args.resolve()?;
    let corpus = pipeline::load_corpus(&cfg)?;
    let dir = out_dir(&cfg)?;
    write_jsonl(&corpus.ads, output::create(&dir, "ads.jsonl")?)?;
    output::write_ingest(&dir, &corpus)?;
    Provenance::new("ingest", &cfg, corpus.inputs.clone()).write(&dir)
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let config: SynthConfig = match &args.config {
        Some(path) => read_json(path, "synth config")?,
        None => match args.scenario {
            Scenario::Shortage => scenarios::shortage_scenario(args.seed, args.days),
            Scenario::Cluster => scenarios::cluster_recovery(args.seed),
            Scenario::Selection => scenarios::occupation_selection(args.seed),
        },
    };
    let (ads, truth) = synthgen::generate(&config)?;
    output::ensure_dir(&args.out)?;
    synthgen::write_outputs(&args.out, &ads, &truth)?;
    output::write_json(&args.out, "synth_config.json", &config)?;

    // seeds: the first two members of the first cluster
    let cluster = config.clusters.first();
    let seeds: Vec<&str> = cluster
        .map(|c| c.skills.iter().take(2).map(String::as_str).collect())
        .unwrap_or_default();
    std::fs::write(args.out.join("seeds.txt"), seeds.join("\n") + "\n").map_err(|source| {
        Error::Io {
            path: args.out.join("seeds.txt"),
            source,
        }
    })?;

    let run = RunConfig::for_synthetic(&args.out, &config);
    let text = toml::to_string(&run).map_err(|e| CliError::Invariant(format!("run config does not serialize: {e}")))?;
    std::fs::write(args.out.join("run.toml"), text).map_err(|source| Error::Io {
        path: args.out.join("run.toml"),
        source,
    })?;
    info!(ads = ads.len(), dir = %args.out.display(), "synthetic corpus written");
    Ok(())
}

fn load_skills(path: &Path) -> Result<SkillSetResult> {
    require_file(path, "skills")?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(SkillSetResult::read_csv(file)?)
    } else {
        read_json(path, "skills")
    }
}

fn cmd_skills(args: &RunArgs) -> Result<()> {
    let cfg = args.resolve()?;
    let seeds = pipeline::load_seeds(&cfg)?;
    let corpus = pipeline::load_corpus(&cfg)?;
    let dir = out_dir(&cfg)?;
    let skills = pipeline::expand(&corpus, &seeds, &cfg)?;
    output::write_skills(&dir, &skills)?;
    Provenance::new("skills", &cfg, corpus.inputs).write(&dir)
}

fn cmd_occupations(args: &RunArgs, skills: &Path) -> Result<()> {
    let cfg = args.resolve()?;
    let skills = load_skills(skills)?;
    let corpus = pipeline::load_corpus(&cfg)?;
    let dir = out_dir(&cfg)?;
    let sel = pipeline::select(&corpus.ads, &skills, &cfg)?;
    output::write_selection(&dir, &sel)?;
    Provenance::new("occupations", &cfg, corpus.inputs).write(&dir)
}

fn load_selection(path: &Path) -> Result<Selection> {
    let selection: OccupationSelection = read_json(path, "selection")?;
    Ok(Selection {
        profiles: selection.selected.clone(),
        selection,
    })
}

fn cmd_backtest(args: &RunArgs, selection: &Path) -> Result<()> {
    let cfg = args.resolve()?;
    let corpus = pipeline::load_corpus(&cfg)?;
    let sel = load_selection(selection)?;
    let dir = out_dir(&cfg)?;
    let fit_cfg = pipeline::fit_config(&cfg)?;
    let groups = pipeline::groups(&sel.selection, &cfg)?;
    let span = DateSpan::covering(&corpus.ads)?;
    let series = pipeline::daily_series(&corpus.ads, &groups, &span);
    let reports = pipeline::backtests(&series, &cfg, &fit_cfg)?;
    let trends = pipeline::trends(&series, &fit_cfg)?;
    output::write_series(&dir, &series)?;
    output::write_json(&dir, "groups.json", &groups)?;
    output::write_backtests(&dir, &reports)?;
    skillscope_core::indicators::write_trend_lines(&trends, output::create(&dir, "trend_lines.csv")?)?;
    Provenance::new("backtest", &cfg, corpus.inputs).write(&dir)
}

fn cmd_indicators(
    args: &RunArgs,
    selection: &Path,
    backtest: Option<&Path>,
    skills: Option<&Path>,
) -> Result<()> {
    let cfg = args.resolve()?;
    let corpus = pipeline::load_corpus(&cfg)?;
    let sel = load_selection(selection)?;
    let backtests: Vec<BacktestReport> = match backtest {
        Some(p) => read_json(p, "backtest")?,
        None => Vec::new(),
    };
    let skills = skills.map(load_skills).transpose()?;
    let dir = out_dir(&cfg)?;
    let groups = pipeline::groups(&sel.selection, &cfg)?;
    let span = DateSpan::covering(&corpus.ads)?;
    let report = pipeline::indicators(&corpus.ads, &groups, &span, &backtests, sel.profiles, &cfg)?;
    report.write_dir(&dir, &backtests)?;
    if let Some(skills) = skills {
        pipeline::skill_demand(&corpus.ads, &skills, &span)?
            .write_csv(output::create(&dir, "skill_demand.csv")?)?;
    }
    Provenance::new("indicators", &cfg, corpus.inputs).write(&dir)
}

fn cmd_report(args: &RunArgs) -> Result<()> {
    let cfg = args.resolve()?;
    let seeds = pipeline::load_seeds(&cfg)?;
    let corpus = pipeline::load_corpus(&cfg)?;
    let dir = out_dir(&cfg)?;
    let run = pipeline::run_report(&corpus, &seeds, &cfg)?;
    output::write_report_run(&dir, &corpus, &run)?;
    Provenance::new("report", &cfg, corpus.inputs.clone()).write(&dir)?;
    for a in &run.report.assessments {
        println!("{}: {}", a.label, a.verdict);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot set thread count: {e}")))?;
    }
    match &cli.command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Skills(a) => cmd_skills(a),
        Command::Occupations { run, skills } => cmd_occupations(run, skills),
        Command::Backtest { run, selection } => cmd_backtest(run, selection),
        Command::Indicators {
            run,
            selection,
            backtest,
            skills,
        } => cmd_indicators(run, selection, backtest.as_deref(), skills.as_deref()),
        Command::Report(a) => cmd_report(a),
    }
}

fn init_logging(verbose: u8) {
    let default = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let filter = tracing_subscriber::EnvFilter::try_from_default_env()
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(default));
    tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .init();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_logging(cli.verbose);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
