use std::process::Command;

fn fences(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fences"))
        .args(args)
        .env_remove("FENCES_CACHE_DIR")
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn orbit_prints_the_cycle() {
    let (code, out) = fences(&["orbit", "--fence", "F(3,3,2)", "--ideal", "{1,5,6}", "--map", "rowmotion"]);
    assert_eq!(code, 0);
    assert_eq!(out, "{1,5,6}\n{1,2,4,5,6,7}\n{1,2,3,4,5,6}\n{6,7}\n");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(fences(&["orbit", "--fence", "F(1,2)", "--ideal", "{}"]).0, 2);
    assert_eq!(fences(&["orbit", "--fence", "F(2,2)", "--ideal", "{2}"]).0, 2);
    assert_eq!(fences(&["scan", "--conj", "c7_2", "--max-apt", "8"]).0, 2);
    assert_eq!(fences(&["frobnicate"]).0, 2);
}

#[test]
fn dims_output_is_deterministic_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("dims.csv");
    let cache = dir.path().join("cache");
    let args = [
        "dims",
        "--t",
        "3",
        "--max-n",
        "9",
        "--out",
        csv.to_str().unwrap(),
        "--cache-dir",
        cache.to_str().unwrap(),
    ];
    let (code, summary) = fences(&args);
    assert_eq!(code, 0);
    assert!(summary.starts_with("t=3, n<=9: "), "{summary}");
    let first = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(fences(&args).0, 0);
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), first);
    assert!(cache.join("results.jsonl").exists());
}

#[test]
fn saved_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let (code, direct) = fences(&[
        "lifted",
        "--fence",
        "F(2,2)",
        "--realm",
        "birational",
        "--seed",
        "7",
        "--steps",
        "100",
        "--save-config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let (code, replay) = fences(&["run", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(direct, replay);
    let last = direct.lines().last().unwrap();
    assert!(last.contains(r#""fence":"F(2,2)""#), "{last}");
}

#[test]
fn scan_reports_each_fence() {
    let (code, out) = fences(&["scan", "--conj", "c5_1", "--max-apt", "6"]);
    assert_eq!(code, 0);
    assert_eq!(out, "C5_1 F(2,2,2) holds (2 orbits)\nC5_1 F(3,3,3) holds (5 orbits)\n");
}
