use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sievelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sievelab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn out_in(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn help_exits_zero_and_bad_flags_exit_two() {
    assert_eq!(sievelab(&["--help"]).status.code(), Some(0));
    assert_eq!(sievelab(&["psd", "--help"]).status.code(), Some(0));
    assert_eq!(sievelab(&["psd", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(sievelab(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn every_selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let zeros = data("zeta_zeros.txt");
    let cases: Vec<Vec<&str>> = vec![
        vec!["constants"],
        vec!["large-sieve"],
        vec!["psd"],
        vec!["covers"],
        vec!["sieve-weights"],
        vec!["sifted"],
        vec!["residue"],
        vec!["mvt"],
        vec!["detect"],
        vec!["density"],
        vec!["count"],
        vec!["ingest", "--kind", "zeros", "--input", &zeros],
    ];
    for args in cases {
        let out = out_in(&dir, &format!("{}.csv", args[0]));
        let mut full = args.clone();
        full.extend(["--selftest", "--out", out.to_str().unwrap()]);
        let o = sievelab(&full);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("check,passed"));
        assert!(!text.contains(",false,"), "{args:?} reported a failed check");
    }
}

#[test]
fn corrupted_family_file_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = out_in(&dir, "bad.toml");
    std::fs::write(&bad, "[family]\nkind = \"characters\"\nqmax = ten\n").unwrap();
    let out = out_in(&dir, "psd.csv");
    let o = sievelab(&["psd", "--family", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert!(!out.exists());
}

#[test]
fn out_of_range_planted_theta_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = out_in(&dir, "bad.toml");
    std::fs::write(
        &bad,
        "[family]\nkind = \"synthetic\"\nn = 2\ncount = 5\nseed = 1\nmodel = \"planted\"\np = 3\ntheta = 0.45\n",
    )
    .unwrap();
    let o = sievelab(&["psd", "--family", bad.to_str().unwrap(), "--out", out_in(&dir, "x.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 8"));
}

#[test]
fn failed_checks_exit_three_after_writing_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_in(&dir, "psd.csv");
    let o = sievelab(&[
        "psd", "--gl1", "--qmax", "5", "--nmax", "10", "--tolerance=-1", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(std::fs::read_to_string(&out).unwrap().contains(",false"));
}

#[test]
fn unwritable_output_exits_four() {
    let o = sievelab(&["constants", "--out", "/nonexistent-dir/constants.csv"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn jsonl_reports_parse_and_echo_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_in(&dir, "ls.jsonl");
    let o = sievelab(&[
        "large-sieve", "--gl1", "--qmax", "5", "--n", "30,60", "--format", "jsonl", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    let run = &lines[0]["config"]["run"];
    assert_eq!(run["command"], "large-sieve");
    assert_eq!(run["family"]["qmax"], 5);
    assert_eq!(run["family"]["family_seed"], 1);
    assert_eq!(lines[1]["N"], 30);
    let c = lines[2]["measured_C"].as_f64().unwrap();
    assert!((60.0..=60.0 + 24.0).contains(&c));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let family = data("planted_gl2.toml");
    let args = ["covers", "--family", family.as_str(), "--nmax", "40", "--trials", "20", "--target", "log"];
    let mut reports = Vec::new();
    for (i, threads) in ["1", "4"].iter().enumerate() {
        let out = out_in(&dir, &format!("r{i}.csv"));
        let mut full = args.to_vec();
        full.extend(["--threads", threads, "--out", out.to_str().unwrap()]);
        assert_eq!(sievelab(&full).status.code(), Some(0));
        let text = std::fs::read_to_string(&out).unwrap();
        reports.push(text.lines().skip(1).collect::<Vec<_>>().join("\n"));
    }
    assert_eq!(reports[0], reports[1]);
}
