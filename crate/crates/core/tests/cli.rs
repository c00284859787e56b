use std::path::Path;
use std::process::{Command, Output};

fn costeval(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_costeval"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

const SMALL: &str = "synthetic.n = 200\nsynthetic.dim = 4\nexperiment.n_seeds = 2\nexperiment.methods = [\"standard\", \"weighted\", \"p_up\"]\n";

#[test]
fn run_prints_table_and_writes_reports() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("small.toml"), SMALL).unwrap();
    let text = stdout(&costeval(tmp.path(), &["--config", "small.toml", "--out", "a", "run"]));
    assert!(text.starts_with("method"), "{text}");
    assert_eq!(text.lines().count(), 4);
    for f in ["runs.csv", "aggregate.csv", "aggregate.txt", "histogram.csv", "manifest.toml"] {
        assert!(tmp.path().join("a").join(f).exists(), "{f}");
    }
    assert_eq!(std::fs::read_to_string(tmp.path().join("a/aggregate.txt")).unwrap(), text);

    // rerunning the manifest elsewhere reproduces every file
    stdout(&costeval(tmp.path(), &["--config", "a/manifest.toml", "--out", "b", "run"]));
    for f in ["runs.csv", "aggregate.csv", "aggregate.txt", "histogram.csv", "manifest.toml"] {
        assert_eq!(
            std::fs::read(tmp.path().join("a").join(f)).unwrap(),
            std::fs::read(tmp.path().join("b").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn seed_and_format_flags() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("small.toml"), SMALL).unwrap();
    let json = stdout(&costeval(
        tmp.path(),
        &["--config", "small.toml", "--out", "j", "--seed", "9", "--format", "json", "run", "--methods", "standard"],
    ));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert!(tmp.path().join("j/aggregate.json").exists());
    assert!(!tmp.path().join("j/aggregate.csv").exists());
    let manifest = std::fs::read_to_string(tmp.path().join("j/manifest.toml")).unwrap();
    assert!(manifest.contains("experiment.seeds = [9, 10]"), "{manifest}");
    assert!(manifest.contains("generator.rng = "));
}

#[test]
fn scale_writes_scaling_table() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("small.toml"), SMALL).unwrap();
    let csv = stdout(&costeval(
        tmp.path(),
        &["--config", "small.toml", "--out", "s", "--format", "csv", "scale", "--sizes", "40,160", "--methods", "standard,tdown50"],
    ));
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 5);
    assert!(rows[1].starts_with("standard,40,2,"));
    assert!(rows[4].starts_with("tdown50,160,2,"));
    assert!(tmp.path().join("s/scaling.csv").exists());
}

#[test]
fn gen_then_hist_then_eval() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let paths = stdout(&costeval(dir, &["--out", "g", "--seed", "3", "gen", "--n", "50", "--dim", "3"]));
    assert_eq!(paths.lines().count(), 2);
    let data = dir.join("g/synthetic-3.csv");
    let body = std::fs::read_to_string(&data).unwrap();
    assert!(body.starts_with("f0,f1,f2,delta\n"));
    assert_eq!(body.lines().count(), 51);
    let weights = std::fs::read_to_string(dir.join("g/synthetic-3.weights.txt")).unwrap();
    assert_eq!(weights.lines().count(), 3);

    let hist = stdout(&costeval(
        dir,
        &["--data", "g/synthetic-3.csv", "--schema", "precomputed_delta", "--out", "h", "hist", "--bins", "5"],
    ));
    let counts: usize = hist.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(counts, 50);

    // a perfect predictor, rows in reverse order
    let deltas: Vec<f64> = body.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    let mut preds = String::from("index,label,score\n");
    for (i, d) in deltas.iter().enumerate().rev() {
        preds.push_str(&format!("{i},{},{d}\n", if *d >= 0.0 { "+1" } else { "-1" }));
    }
    std::fs::write(dir.join("p.csv"), preds).unwrap();
    let out = stdout(&costeval(
        dir,
        &["--data", "g/synthetic-3.csv", "--schema", "precomputed_delta", "--format", "csv", "eval", "--predictions", "p.csv", "--score-kind", "delta"],
    ));
    assert_eq!(out.lines().nth(1).unwrap(), "50,0,0,,0");

    // everything +1
    let mut preds = String::from("index,label\n");
    for i in 0..deltas.len() {
        preds.push_str(&format!("{i},1\n"));
    }
    std::fs::write(dir.join("q.csv"), preds).unwrap();
    let out = stdout(&costeval(
        dir,
        &["--data", "g/synthetic-3.csv", "--schema", "precomputed_delta", "--format", "json", "eval", "--predictions", "q.csv"],
    ));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let negatives = deltas.iter().filter(|d| **d < 0.0).count() as f64;
    assert_eq!(v["error_rate"].as_f64().unwrap(), negatives / 50.0);
    assert!(v["delta_mae"].is_null());
}

#[test]
fn vote_fixture_runs_from_shipped_config() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy_votes.toml");
    let tmp = tempfile::tempdir().unwrap();
    let text = stdout(&costeval(
        tmp.path(),
        &["--config", config.to_str().unwrap(), "--out", "v", "run", "--methods", "standard,weighted", "--n-seeds", "3"],
    ));
    assert!(text.lines().nth(1).unwrap().starts_with("standard"));
}

#[test]
fn errors_exit_nonzero_with_message() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = costeval(dir, &["eval", "--predictions", "missing.csv"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("needs a dataset"));

    let out = costeval(dir, &["--data", "nope.csv", "--schema", "votes", "hist"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.csv"));

    std::fs::write(dir.join("bad.toml"), "train.l2 = 3\n").unwrap();
    let out = costeval(dir, &["--config", "bad.toml", "run"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("l2"));

    let out = costeval(dir, &["run", "--n-seeds", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 2 seeds"));
}
