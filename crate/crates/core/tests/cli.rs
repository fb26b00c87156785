use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use snip::simgen::GeneratorConfig;

fn snip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snip"))
        .args(args)
        .output()
        .expect("running snip")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn dedup_config(dir: &Path, threshold: u8) -> std::path::PathBuf {
    let gen = GeneratorConfig::default();
    let (keys, female) = gen.key_variables();
    let fallbacks: Vec<String> = gen
        .key_fallbacks()
        .iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect();
    let path = dir.join("dedup.txt");
    fs::write(
        &path,
        format!(
            "# full-length key\nkeyVars = {}\nkeyFallbacks = {}\nfemaleOnlyVars = {}\nkeyLength = all\nwindow = 10\nthreshold = {threshold}\n",
            keys.join(","),
            fallbacks.join(","),
            female.join(",")
        ),
    )
    .unwrap();
    path
}

fn simulated(dir: &Path) -> std::path::PathBuf {
    let cfg = dir.join("gen.txt");
    fs::write(
        &cfg,
        "numFamilies = 60\nseed = 3\nduplicates = 1:4,2:2\nerrorRate = 1\n",
    )
    .unwrap();
    let out = dir.join("sim");
    let o = snip(&["simulate", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    out
}

#[test]
fn simulate_dedup_evaluate() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = simulated(tmp.path());
    let corpus = fs::read_to_string(sim.join("corpus.csv")).unwrap();
    let truth = fs::read_to_string(sim.join("truth.csv")).unwrap();
    // 60 originals plus 4 + 2 * 2 copies
    assert_eq!(truth.lines().count(), 1 + 68);
    assert!(corpus.starts_with("FamID,ID,MotherID,FatherID,"));

    let cfg = dedup_config(tmp.path(), 6);
    let out = tmp.path().join("dedup");
    let o = snip(&[
        "dedup",
        "--input",
        p(&sim.join("corpus.csv")),
        "--config",
        p(&cfg),
        "--seed",
        "11",
        "--out",
        p(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("inputFamilies = 68"));
    assert!(manifest.contains("seed = 11"), "flag overrides the file");

    let report = tmp.path().join("report");
    let o = snip(&[
        "evaluate",
        "--clusters",
        p(&out.join("clusters.csv")),
        "--truth",
        p(&sim.join("truth.csv")),
        "--out",
        p(&report),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(report.join("report.txt")).unwrap();
    assert!(text.starts_with("clusterCountGuard = pass"));
    assert!(report.join("report.csv").exists());
}

#[test]
fn evaluate_truth_against_itself() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = simulated(tmp.path());
    let truth = sim.join("truth.csv");
    let o = snip(&["evaluate", "--clusters", p(&truth), "--truth", p(&truth)]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("pairwiseF1 = 1.000000"), "{text}");
    assert!(text.contains("clusterF1 = 1.000000"), "{text}");
    assert!(text.contains("gmd = 0"), "{text}");
}

#[test]
fn inspect_candidates_to_stdout() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = simulated(tmp.path());
    let cfg = dedup_config(tmp.path(), 6);
    let o = snip(&[
        "inspect-candidates",
        "--input",
        p(&sim.join("corpus.csv")),
        "--config",
        p(&cfg),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("famID1,famID2,relativeType\n"));
    assert!(text.contains(",proband\n"));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = simulated(tmp.path());
    let corpus = sim.join("corpus.csv");
    let out = tmp.path().join("o");

    assert_eq!(snip(&["--help"]).status.code(), Some(0));
    assert_eq!(snip(&["dedup"]).status.code(), Some(1));
    assert_eq!(snip(&["frobnicate"]).status.code(), Some(1));

    let cfg = dedup_config(tmp.path(), 9);
    let o = snip(&[
        "dedup",
        "--input",
        p(&corpus),
        "--config",
        p(&cfg),
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(1), "threshold above 7");

    let cfg = dedup_config(tmp.path(), 6);
    let missing = tmp.path().join("nope.csv");
    let o = snip(&[
        "dedup",
        "--input",
        p(&missing),
        "--config",
        p(&cfg),
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(1), "unreadable input");

    let bad = tmp.path().join("bad.csv");
    let text = fs::read_to_string(&corpus).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let first = lines.next().unwrap();
    // the same member twice in one family
    fs::write(&bad, format!("{header}\n{first}\n{first}\n")).unwrap();
    let o = snip(&[
        "dedup",
        "--input",
        p(&bad),
        "--config",
        p(&cfg),
        "--out",
        p(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let no_proband = tmp.path().join("noproband.csv");
    fs::write(&no_proband, text.replace("isProband", "isCase")).unwrap();
    let o = snip(&[
        "dedup",
        "--input",
        p(&no_proband),
        "--config",
        p(&cfg),
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_simulation_warns() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sim");
    let o = snip(&["simulate", "--numFamilies", "0", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let truth = fs::read_to_string(out.join("truth.csv")).unwrap();
    assert_eq!(truth, "famID,originFamID\n");
}
