use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dp-minimax"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn audit_constant_channel_holds() {
    let out = run(bin()
        .arg("audit")
        .arg(fixture("constant.json"))
        .args(["--def", "dp=0.1"]));
    assert_eq!(out.status.code(), Some(0));
    let verdicts: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(verdicts[0]["definition"], "dp");
    assert_eq!(verdicts[0]["holds"], true);
    assert_eq!(verdicts[0]["tight_param"], 0.0);
}

#[test]
fn audit_release_one_fails_chtp_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let verdict_file = dir.path().join("verdicts.json");
    let out = run(bin()
        .arg("audit")
        .arg(fixture("release_one.json"))
        .args(["--def", "chtp=0.5,0.0", "--def", "tv=0.5", "--out"])
        .arg(&verdict_file));
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(verdict_file).unwrap()).unwrap();
    assert_eq!(v[0]["definition"], "chtp");
    assert_eq!(v[0]["holds"], false);
    assert!(v[0]["witness"]["outputs"].as_array().unwrap().len() >= 2);
    assert_eq!(v[1]["holds"], true);
}

#[test]
fn audit_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"input_alphabet\": [");
    assert_eq!(
        run(bin().arg("audit").arg(&bad).args(["--def", "dp=1"]))
            .status
            .code(),
        Some(2)
    );
    let rr = fixture("randomized_response.json");
    assert_eq!(
        run(bin().arg("audit").arg(&rr).args(["--def", "renyi=2"]))
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(bin().arg("audit").arg(&rr)).status.code(), Some(2));
    let unnormalized = write(
        dir.path(),
        "unnormalized.json",
        r#"{"input_alphabet": ["0", "1"], "n": 1, "output_set": ["a", "b"], "rows": {"0": [0.5, 0.6], "1": [0.5, 0.5]}}"#,
    );
    assert_eq!(
        run(bin()
            .arg("audit")
            .arg(&unnormalized)
            .args(["--def", "dp=1"]))
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(bin()
            .arg("audit")
            .arg(&rr)
            .args(["--def", "dp=1", "--cap", "1000000"]))
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn audit_cap_exceeded_exits_3() {
    let out = run(bin()
        .arg("audit")
        .arg(fixture("release_one.json"))
        .args(["--def", "dp=1", "--cap", "4"]));
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn audit_randomized_response_is_tight() {
    let out = run(bin()
        .arg("audit")
        .arg(fixture("randomized_response.json"))
        .args(["--def", "dp=1", "--def", "dp=0.99", "--def", "smooth_dp=1"]));
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["holds"], true);
    assert_eq!(v[1]["holds"], false);
    assert_eq!(v[2]["definition"], "smooth_dp");
}

const SMALL_BENCH: &str = r#"{
  "command": "bench",
  "sweeps": [
    {
      "mechanism": {"truncated-mean": {"variant": "kl-gaussian", "r": 1.0, "k_moments": "inf", "d": 4, "n": 8, "eps": 0.5, "eps_kl": 0.5}},
      "family": {"family": "bounded-ball", "r": 1.0, "d": 4},
      "axis": "n",
      "values": [8, 16, 32, 64],
      "reps": 200,
      "fit_window": [8, 64]
    },
    {
      "mechanism": {"histogram": {"d": 1, "k_bins": 4, "eps": 1.0}},
      "family": {"family": "lipschitz-density", "a": 0.8},
      "axis": "eps",
      "values": [0.5, 1.0],
      "reps": 100,
      "n": 500
    }
  ]
}"#;

#[test]
fn bench_is_deterministic_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bench.json", SMALL_BENCH);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let first = run(bin()
        .arg("bench")
        .arg(&cfg)
        .args(["--seed", "9", "--jobs", "1", "--out"])
        .arg(&a));
    assert_eq!(
        first.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let second = run(bin()
        .arg("bench")
        .arg(&cfg)
        .args(["--seed", "9", "--jobs", "3", "--out"])
        .arg(&b));
    assert_eq!(second.status.code(), Some(0));
    for file in ["risk.csv", "report.json"] {
        assert_eq!(
            std::fs::read(a.join(file)).unwrap(),
            std::fs::read(b.join(file)).unwrap(),
            "{file}"
        );
    }
    let csv = std::fs::read_to_string(a.join("risk.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4 + 2);
    assert!(csv.starts_with("mechanism,variant,family"));

    let c = dir.path().join("c");
    run(bin()
        .arg("bench")
        .arg(&cfg)
        .args(["--seed", "10", "--out"])
        .arg(&c));
    assert_ne!(
        std::fs::read(a.join("risk.csv")).unwrap(),
        std::fs::read(c.join("risk.csv")).unwrap()
    );
}

#[test]
fn bench_rejects_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let zero_reps = write(
        dir.path(),
        "zero.json",
        &SMALL_BENCH.replace("\"reps\": 200", "\"reps\": 0"),
    );
    let out = run(bin()
        .arg("bench")
        .arg(&zero_reps)
        .args(["--seed", "1", "--out"])
        .arg(&out_dir));
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.join("risk.csv").exists());

    let unknown = write(
        dir.path(),
        "unknown.json",
        &SMALL_BENCH.replace("\"reps\": 200", "\"reps\": 200, \"colour\": 1"),
    );
    assert_eq!(
        run(bin()
            .arg("bench")
            .arg(&unknown)
            .args(["--seed", "1", "--out"])
            .arg(&out_dir))
        .status
        .code(),
        Some(2)
    );

    let wrong_command = write(dir.path(), "wrong.json", r#"{"command": "bounds"}"#);
    assert_eq!(
        run(bin()
            .arg("bench")
            .arg(&wrong_command)
            .args(["--seed", "1", "--out"])
            .arg(&out_dir))
        .status
        .code(),
        Some(2)
    );

    let zero_table = write(
        dir.path(),
        "table.json",
        r#"{"command": "bench", "table1": {"reps": 0}}"#,
    );
    assert_eq!(
        run(bin()
            .arg("bench")
            .arg(&zero_table)
            .args(["--seed", "1", "--out"])
            .arg(&out_dir))
        .status
        .code(),
        Some(2)
    );

    let cfg = write(dir.path(), "bench.json", SMALL_BENCH);
    assert_eq!(
        run(bin().arg("bench").arg(&cfg).arg("--out").arg(&out_dir))
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bounds_default_sweep_has_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let report_file = dir.path().join("bounds.json");
    let out = run(bin()
        .arg("bounds")
        .arg(config("bounds.json"))
        .args(["--seed", "5", "--out"])
        .arg(&report_file));
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_file).unwrap()).unwrap();
    for check in ["contraction", "mass_everywhere", "estimation_testing_chain"] {
        assert_eq!(
            r[check]["violations"].as_array().unwrap().len(),
            0,
            "{check}"
        );
        assert!(r[check]["instances"].as_u64().unwrap() > 0);
    }
    let rows = r["evaluators"].as_array().unwrap();
    let uniform = rows
        .iter()
        .find(|row| row["request"]["bound"] == "uniform-support")
        .unwrap();
    assert!((uniform["value"].as_f64().unwrap() - 0.003125).abs() < 1e-15);

    let minimal = write(
        dir.path(),
        "min.json",
        r#"{"command": "bounds", "contraction": {"instances": 5}}"#,
    );
    assert_eq!(
        run(bin().arg("bounds").arg(&minimal).args(["--seed", "5"]))
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn bounds_bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"command": "bounds", "contraction": {"alphabet": 1}}"#,
    );
    assert_eq!(
        run(bin().arg("bounds").arg(&bad).args(["--seed", "1"]))
            .status
            .code(),
        Some(2)
    );
    let typo = write(
        dir.path(),
        "typo.json",
        r#"{"command": "bounds", "evaluator": []}"#,
    );
    assert_eq!(
        run(bin().arg("bounds").arg(&typo).args(["--seed", "1"]))
            .status
            .code(),
        Some(2)
    );
    let bad_eval = write(
        dir.path(),
        "eval.json",
        r#"{"command": "bounds", "evaluators": [{"bound": "packing", "m": 1, "np_ceil": 0, "eps": 1, "delta": 0}]}"#,
    );
    assert_eq!(
        run(bin().arg("bounds").arg(&bad_eval).args(["--seed", "1"]))
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(bin().arg("bounds").arg(config("bounds.json")))
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn selftest_passes_and_detects_injected_fault() {
    let out = run(bin().arg("selftest"));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    for name in [
        "testing_bound_equivalence",
        "chtp_forward",
        "chtp_converse",
        "pinsker",
        "contraction_sweep",
        "mass_everywhere",
        "lemma_suite",
        "closed_form_evaluators",
    ] {
        assert!(
            stdout.contains(&format!("PASS {name}")),
            "{name} missing from\n{stdout}"
        );
    }
    let faulty = run(bin().args(["selftest", "--inject-fault"]));
    assert_ne!(faulty.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&faulty.stdout).contains("FAIL testing_bound_equivalence"));
}
