use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tight-storage")).args(args).env_remove("TIGHT_STORAGE_DATA").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn build_rejects_original_capacities_naming_the_parameter() {
    let o = run(&["build", "bo", "--params", &fixture("uc-original.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("P_C_max"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn build_accepts_adapted_capacities() {
    for family in ["bo", "to", "bor", "tor"] {
        let o = run(&["build", family, "--params", &fixture("uc-adapted.json")]);
        assert_eq!(o.status.code(), Some(0), "{family}: {}", stderr(&o));
    }
}

#[test]
fn build_row_count_and_relaxation() {
    let o = run(&["build", "to", "--params", &fixture("reference-unit.json"), "-T", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let m: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(m["constraints"].as_array().unwrap().len(), 10);

    let o = run(&["build", "tir", "--params", &fixture("reference-unit.json"), "-T", "2", "--relax"]);
    assert_eq!(o.status.code(), Some(0));
    let m: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(m["variables"].as_array().unwrap().iter().all(|v| v["integrality"] == "continuous"));
}

#[test]
fn solve_exit_codes() {
    let o = run(&["solve", &fixture("infeasible-model.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("Infeasible"));

    let o = run(&["solve", &fixture("knapsack-model.json"), "--node-limit", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));

    let o = run(&["solve", &fixture("knapsack-model.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["objective"], "6/1");
}

#[test]
fn solve_round_trips_a_built_model() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("to.json");
    let o = run(&["build", "to", "--params", &fixture("reference-unit.json"), "-T", "2", "-o", model.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["solve", model.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("status: Optimal"));
}

#[test]
fn bad_paths_fail_before_work() {
    let o = run(&["build", "bo", "--params", "/nonexistent/params.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["case", "uc", "-o", "/nonexistent/dir/report.md"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("does not exist"));
}

#[test]
fn certify_single_and_violating() {
    let o = run(&["certify", "bo", "--params", &fixture("reference-unit.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("seed: none\n"));
    assert!(stdout(&o).contains("equality: true"));

    let o = run(&["certify", "bo", "--params", &fixture("violating.json")]);
    assert_eq!(o.status.code(), Some(2), "validation runs by default");

    let o = run(&["certify", "bo", "--params", &fixture("violating.json"), "--no-validate", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let c: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(c["certificate"]["equality"], false);
    assert!(!c["certificate"]["witness"].is_null());
}

#[test]
fn certify_random_is_seeded_and_reproducible() {
    let args = ["certify", "bo", "--random", "5", "--seed", "11", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["seed"], 11);
    assert_eq!(v["passed"], 5);
    let idx: Vec<u64> = v["results"].as_array().unwrap().iter().map(|r| r["index"].as_u64().unwrap()).collect();
    assert_eq!(idx, vec![0, 1, 2, 3, 4]);
}

#[test]
fn replay_matches_golden_transcript() {
    let o = run(&["replay", "--params", &fixture("reference-unit.json")]);
    assert_eq!(o.status.code(), Some(0));
    let golden = std::fs::read_to_string(fixture("reference-unit-replay.golden.txt")).unwrap();
    assert_eq!(stdout(&o), golden);
}

#[test]
fn replay_of_empty_capacities_is_degenerate() {
    let o = run(&["replay", "--params", &fixture("empty-capacity.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(t["equals_tight"], true);
}

#[test]
fn case_formats_and_provenance() {
    let o = run(&["case", "uc", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("# case=uc,data=approximated"), "{}", stdout(&o));

    let o = run(&["case", "uc", "--data", "paper-faithful"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("incomplete"));
}

#[test]
fn case_data_directory_override() {
    let dir = tempfile::tempdir().unwrap();
    let bundled: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "data", "approximated.json"].iter().collect();
    std::fs::copy(bundled, dir.path().join("approximated.json")).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tight-storage"))
        .args(["case", "uc", "--format", "json"])
        .env("TIGHT_STORAGE_DATA", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    std::fs::write(dir.path().join("approximated.json"), "{").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tight-storage"))
        .args(["case", "uc"])
        .env("TIGHT_STORAGE_DATA", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flex_reports_reserve_gaps() {
    let o = run(&["flex", "--params", &fixture("flex-discharge.json"), "--soc", "50", "--pd", "8", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((r["bor_max_down"].as_str(), r["bof_max_down"].as_str()), (Some("8/1"), Some("18/1")));
}

#[test]
fn every_subcommand_speaks_json() {
    let p = fixture("reference-unit.json");
    for args in [
        vec!["build", "bo", "--params", &p],
        vec!["solve", &fixture("knapsack-model.json")],
        vec!["certify", "to", "--params", &p],
        vec!["replay", "--params", &p],
        vec!["case", "uc"],
        vec!["flex", "--params", &p, "--soc", "20"],
    ] {
        let mut a = args.clone();
        a.extend(["--format", "json"]);
        let o = run(&a);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        serde_json::from_str::<serde_json::Value>(&stdout(&o)).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    }
}
