use std::fs;
use std::path::Path;
use std::process::Command;

use propfair::fixtures::gen_incompatibility;
use propfair_cli::*;

fn propfair(args: &[&str]) -> std::process::Output {
    let out = Command::new(env!("CARGO_BIN_EXE_propfair")).args(args).output().unwrap();
    assert!(out.status.success(), "propfair {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

#[test]
fn fixture_cluster_audit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "line.txt");
    let clu = path(dir.path(), "c.txt");
    propfair(&["fixture", "tight-line", "--n", "16", "--eps", "0.001", "--output", &inst]);
    propfair(&["cluster", "--input", &inst, "--output", &clu]);
    assert_eq!(fs::read_to_string(&clu).unwrap(), "8 9 10 11 12 13 14 15\n0 1 2 3 4 5 6 7\n");

    let out = propfair(&[
        "audit",
        "--input",
        &inst,
        "--clustering",
        &clu,
        "--loss",
        "maximum",
        "--audit-mode",
        "exact",
        "--measure",
        "core",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,witness_members,kind,iterations"));
    let summary: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!((summary[0].parse::<f64>().unwrap() - 2.0).abs() < 0.01);
    assert_eq!(summary[1], "1 2 3 4 5 6 7 8");
    assert_eq!(&summary[2..], ["CORE", "0"]);

    let out = propfair(&["audit", "--input", &inst, "--clustering", &clu, "--loss", "maximum"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let iterations: usize = lines[1].rsplit(',').next().unwrap().parse().unwrap();
    assert_eq!(lines[2], "iteration,coalition,ratio,removed");
    assert_eq!(lines.len(), 3 + iterations);
    assert_eq!(iterations, 16 - 8 + 1);
}

#[test]
fn arbitrary_fixture_exports_a_loss_table() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "arb.txt");
    let clu = path(dir.path(), "c.txt");
    propfair(&["fixture", "arb-core-empty", "--output", &inst]);
    fs::write(&clu, "0 1\n2 3\n").unwrap();
    let out =
        propfair(&["audit", "--input", &inst, "--clustering", &clu, "--audit-mode", "exact", "--measure", "core"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("inf,"), "{text}");
}

#[test]
fn embedded_fixture_feeds_kmeans() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "emb.txt");
    propfair(&["fixture", "incompatibility", "--n", "12", "--k", "2", "--embedded", "--output", &inst]);
    let out = propfair(&["cluster", "--algo", "kmeans-pp", "--input", &inst, "--seed", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut clusters: Vec<&str> = text.lines().collect();
    clusters.sort();
    assert_eq!(clusters, ["0 1 2 3 4 5 6 7", "8 9 10 11"]);
}

#[test]
fn experiment_is_deterministic_and_writes_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "cfg.txt");
    fs::write(&cfg, "k = 2\ntrials = 3\nsample_size = 10\nseed = 5\nbaseline_runs = 4\n").unwrap();
    let a = path(dir.path(), "a.csv");
    let b = path(dir.path(), "b.csv");
    propfair(&["experiment", "--config", &cfg, "--output", &a]);
    propfair(&["experiment", "--config", &cfg, "--loss", "average,maximum", "--output", &b]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let meta = fs::read_to_string(format!("{a}.meta")).unwrap();
    assert!(meta.contains("standardization = z-score"));

    let rows = read_results(fs::File::open(&a).unwrap()).unwrap();
    // 3 algorithms x (3 trials + mean + std) x (3 objectives + 2 losses x 2 measures)
    assert_eq!(rows.len(), 3 * 5 * 7);
    let mut again = Vec::new();
    write_results(&rows, &mut again).unwrap();
    assert_eq!(again, fs::read(&a).unwrap());

    let c = path(dir.path(), "c.csv");
    propfair(&["experiment", "--config", &cfg, "--seed", "6", "--output", &c]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn zero_trials_give_a_header_only_table() {
    let ds = read_csv(BUNDLED_DATASET.as_bytes(), None, Some(BUNDLED_WEIGHT)).unwrap();
    let cfg = ExperimentConfig { num_trials: 0, ..Default::default() };
    let rows = run_experiment(&cfg, &ds).unwrap();
    assert!(rows.is_empty());
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("empty.csv");
    emit_results(&rows, &p).unwrap();
    assert_eq!(fs::read_to_string(&p).unwrap(), "algorithm,k,trial,loss,measure,value\n");
}

#[test]
fn interval_mode_bounds() {
    let ds = read_csv(BUNDLED_DATASET.as_bytes(), None, Some(BUNDLED_WEIGHT)).unwrap();
    let cfg = ExperimentConfig {
        audit_mode: AuditMode::Interval,
        sample_size: 40,
        num_trials: 3,
        k_values: vec![3, 5],
        baseline_runs: 3,
        ..Default::default()
    };
    let rows = run_experiment(&cfg, &ds).unwrap();
    let lower: Vec<&ResultRow> = rows.iter().filter(|r| r.measure == "fjr_lower").collect();
    assert!(!lower.is_empty());
    for lo in lower.iter().filter(|r| matches!(r.trial, Trial::Index(_))) {
        let hi = rows
            .iter()
            .find(|r| {
                r.measure == "fjr_upper"
                    && r.algorithm == lo.algorithm
                    && r.k == lo.k
                    && r.trial == lo.trial
                    && r.loss == lo.loss
            })
            .unwrap();
        let lambda = if lo.loss == "maximum" { 2.0 } else { 4.0 };
        assert!(lo.value >= 1.0 && lo.value <= hi.value && hi.value <= lambda * lo.value * (1.0 + 1e-12));
    }
    let check = qualitative_check(&rows);
    assert!(check.cap_violations.is_empty(), "{:?}", check.cap_violations);
}

#[test]
fn incompatibility_through_the_harness() {
    let f = gen_incompatibility(12, 2).unwrap();
    let ds = Dataset::from_rows(f.embedding.clone().unwrap());
    let base = ExperimentConfig { k_values: vec![2], sample_size: 12, num_trials: 1, ..Default::default() };
    let cfg = ExperimentConfig { algorithms: vec![Algorithm::GreedyCapture], ..base.clone() };
    let rows = run_experiment(&cfg, &ds).unwrap();
    let core = |rows: &[ResultRow]| {
        rows.iter().filter(|r| r.measure == "core" && r.trial == Trial::Index(0)).map(|r| r.value).collect::<Vec<_>>()
    };
    assert_eq!(core(&rows), vec![1.0, 1.0]);
    let cfg = ExperimentConfig { algorithms: vec![Algorithm::KmeansPp], ..base };
    let rows = run_experiment(&cfg, &ds).unwrap();
    assert!(core(&rows).iter().all(|&v| v > 1e3));
}

#[test]
fn bad_input_is_reported() {
    let out = Command::new(env!("CARGO_BIN_EXE_propfair"))
        .args(["experiment", "--sample-size", "30", "--audit-mode", "exact"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("exact audits need sample_size"));
}
