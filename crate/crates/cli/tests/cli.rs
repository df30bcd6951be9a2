use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn capdiag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capdiag"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures/reference")
        .join(name)
}

fn run_fixture(out: &Path) -> Output {
    let arg = |p: PathBuf| p.to_string_lossy().into_owned();
    capdiag(&[
        "run",
        "--dataset",
        &arg(fixture("dataset.tsv")),
        "--defs",
        &arg(fixture("defs.txt")),
        "--rules",
        &arg(fixture("rules.toml")),
        "--hypotheses",
        &arg(fixture("hypotheses.toml")),
        "--cfindex",
        &arg(fixture("cfindex.toml")),
        "--out",
        out.to_str().unwrap(),
    ])
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_succeeds_and_reports_verdicts() {
    let out = tempfile::tempdir().unwrap();
    let o = run_fixture(out.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("H2\tSupportedUnderProjection"), "{text}");
    assert!(text.contains("verified 44/44"), "{text}");
}

#[test]
fn two_runs_are_byte_identical_and_match_the_embedded_fixture() {
    let (a, b, c) = (
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
    );
    assert!(run_fixture(a.path()).status.success());
    assert!(run_fixture(b.path()).status.success());
    assert!(capdiag(&["run", "--fixture", "--out", c.path().to_str().unwrap()]).status.success());
    for f in ["indicators.tsv", "concentration.tsv", "hypotheses.tsv", "mapping.tsv", "vetting.tsv", "audit.log", "cfindex.tsv", "cfindex_validation.tsv"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(f)).unwrap(), "{f}");
        assert_eq!(x, std::fs::read(c.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn verify_passes_then_names_a_tampered_record() {
    let out = tempfile::tempdir().unwrap();
    assert!(run_fixture(out.path()).status.success());
    let log = out.path().join("audit.log");
    let o = capdiag(&["verify", log.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("failed 0"));

    let text = std::fs::read_to_string(&log).unwrap();
    let tampered: Vec<String> = text
        .lines()
        .map(|l| {
            if l.contains("\"result_id\":\"robot_sfr\"") {
                l.replace("\"recomputed\":8.6", "\"recomputed\":8.7")
            } else {
                l.to_string()
            }
        })
        .collect();
    assert_ne!(tampered.join("\n"), text.trim_end());
    std::fs::write(&log, tampered.join("\n")).unwrap();
    let o = capdiag(&["verify", log.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let report = stdout(&o);
    assert!(report.contains("failed 1"), "{report}");
    assert_eq!(report.lines().filter(|l| l.starts_with("FAIL")).count(), 1);
    assert!(report.contains("FAIL\trobot_sfr"), "{report}");
}

#[test]
fn explain_prints_lineage() {
    let out = tempfile::tempdir().unwrap();
    assert!(run_fixture(out.path()).status.success());
    let log = out.path().join("audit.log");
    let o = capdiag(&["explain", "robot_region_hhi", "--audit", log.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("0.5814"), "{text}");
    assert!(text.contains("robot_share_asia_2024"), "{text}");

    let o = capdiag(&["explain", "no_such_id", "--audit", log.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mismatch_exits_one_and_bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let defs = std::fs::read_to_string(fixture("defs.txt")).unwrap();
    let wrong = dir.path().join("defs.txt");
    std::fs::write(&wrong, defs.replace("=> 8.60", "=> 8.70")).unwrap();
    let out = dir.path().join("out");
    let arg = |p: PathBuf| p.to_string_lossy().into_owned();
    let o = capdiag(&[
        "run",
        "--dataset",
        &arg(fixture("dataset.tsv")),
        "--defs",
        &arg(wrong),
        "--rules",
        &arg(fixture("rules.toml")),
        "--hypotheses",
        &arg(fixture("hypotheses.toml")),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("robot_sfr"));

    let o = capdiag(&[
        "run",
        "--dataset",
        "/nonexistent.tsv",
        "--defs",
        "/nonexistent.txt",
        "--rules",
        "/nonexistent.toml",
        "--hypotheses",
        "/nonexistent.toml",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}
