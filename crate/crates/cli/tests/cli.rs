//! Runs the `skillscope` binary: exit codes, stage files, and the staged
//! chain against the one-shot report.

use std::path::Path;
use std::process::{Command, Output};

use skillscope_core::synthgen::scenarios;

fn skillscope(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skillscope"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

fn flag_count(flags_csv: &str, label: &str) -> usize {
    let line = flags_csv
        .lines()
        .find(|l| l.starts_with(&format!("{label},")) || l.starts_with(&format!("\"{label}\",")))
        .unwrap_or_else(|| panic!("{label} not in flags.csv:\n{flags_csv}"));
    let fields: Vec<&str> = line.rsplitn(3, ',').collect();
    fields[1].parse().unwrap()
}

#[test]
fn missing_seed_file_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("ads.jsonl"), "").unwrap();
    let o = skillscope(
        &["skills", "--input", "ads.jsonl", "--seeds", "missing.txt", "--out", "out"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing.txt"), "{}", stderr(&o));
}

#[test]
fn bad_flag_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = skillscope(&["report", "--no-such-flag"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_seed_is_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("ads.jsonl"),
        "{\"id\":\"a\",\"date\":\"2020-01-01\",\"occupation\":\"o\",\"skills\":[\"x\",\"y\"]}\n",
    )
    .unwrap();
    let o = skillscope(
        &["skills", "--input", "ads.jsonl", "--seed-skill", "zzz", "--out", "out"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("zzz"));
}

#[test]
fn ingest_writes_normalized_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("ads.csv"),
        "id,date,occupation,skills\na,2020-01-01,o,\"SQL; Python\"\nb,2020-01-02,o,SQL\n",
    )
    .unwrap();
    let o = skillscope(&["ingest", "--input", "ads.csv", "--out", "out"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let ads = read(tmp.path().join("out/ads.jsonl"));
    assert_eq!(ads.lines().count(), 2);
    let prov = read(tmp.path().join("out/provenance.json"));
    assert!(prov.contains("sha256"));
}

/// The README walkthrough: a generator config file, then a full report.
#[test]
fn synth_config_then_report_flags_planted_occupation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = scenarios::shortage_scenario(5, 1461);
    std::fs::write(tmp.path().join("demo.json"), serde_json::to_string_pretty(&cfg).unwrap()).unwrap();

    let o = skillscope(&["synth", "--config", "demo.json", "--out", "demo"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["ads.jsonl", "ground_truth.json", "categories.csv", "seeds.txt", "run.toml"] {
        assert!(tmp.path().join("demo").join(f).is_file(), "{f}");
    }

    let o = skillscope(&["report", "--config", "demo/run.toml", "--out", "run1"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let flags = read(tmp.path().join("run1/flags.csv"));
    assert_eq!(flag_count(&flags, scenarios::SHORTAGE_OCCUPATION), 5, "{flags}");

    // the staged chain reproduces the one-shot report
    let run = ["--config", "demo/run.toml", "--out", "staged"];
    let stage = |extra: &[&str], cmd: &str| {
        let mut args = vec![cmd];
        args.extend(run);
        args.extend(extra);
        let o = skillscope(&args, tmp.path());
        assert!(o.status.success(), "{cmd}: {}", stderr(&o));
    };
    stage(&[], "skills");
    stage(&["--skills", "staged/skills.json"], "occupations");
    stage(&["--selection", "staged/selection.json"], "backtest");
    stage(
        &[
            "--selection",
            "staged/selection.json",
            "--backtest",
            "staged/backtest.json",
            "--skills",
            "staged/skills.json",
        ],
        "indicators",
    );
    for f in [
        "skills.csv",
        "selected_occupations.csv",
        "series.csv",
        "boxplot.csv",
        "trend_lines.csv",
        "flags.csv",
        "indicators_posting.csv",
        "indicators_predictability.csv",
        "skill_demand.csv",
        "report.json",
    ] {
        assert_eq!(
            read(tmp.path().join("run1").join(f)),
            read(tmp.path().join("staged").join(f)),
            "{f} differs between staged and one-shot runs"
        );
    }
}
