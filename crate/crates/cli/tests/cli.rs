use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_contact-thermo"));
    cmd.env_remove("THERMO_OUT_DIR");
    cmd
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn sorted_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn gas_chord_example() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["chord", "gas", "--t0", "1", "--t1", "5", "--c", "2", "--out-dir", "out"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o);
    assert!(line.contains("P0=0.5 v=2 "), "{line}");
    assert_eq!(line.lines().count(), 1);
    let out = tmp.path().join("out");
    for f in ["fig1_lambda0.csv", "fig1_lambda1.csv", "fig1_chord.csv", "fig3_f0.csv", "fig3_psi.csv", "chord.csv"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let marker = fs::read_to_string(out.join("fig1_chord.csv")).unwrap();
    let fields: Vec<f64> = marker.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(&fields[..2], &[-0.5, 2.0]);
    assert!((fields[4] - 4.0 * 2f64.ln()).abs() < 1e-12);
}

#[test]
fn cw_chord_example() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["chord", "cw", "--t0", "2", "--t1", "3.3333333", "--c", "1", "--b", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o);
    assert!(line.contains("Q*=1.5 p=tanh(0.75)="), "{line}");
    assert!(tmp.path().join("thermo_out/fig4_psi.csv").is_file());
}

#[test]
fn unknown_subcommand_prints_usage() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage:"));
    let o = run_in(tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn validation_failures_write_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["chord", "gas", "--t0", "5", "--t1", "1", "--c", "2"],
        &["chord", "cw", "--t0", "1", "--t1", "2", "--c", "1"],
        &["stirling", "--v-min", "3", "--v-max", "2"],
        &["gibbs", "-T", "1"],
    ];
    for args in cases {
        let o = run_in(tmp.path(), args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        assert!(stdout(&o).is_empty());
    }
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn lost_branch_is_a_numerical_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(
        tmp.path(),
        &["isotopy", "cw", "--b", "1", "--t0", "0.5", "--t1", "2", "--back0", "0", "--back1", "0", "--x-grid", "0.05"],
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("branch lost"));
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn config_overrides_flags_and_rejects_unknown_keys() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.json");
    fs::write(&cfg, r#"{"t0": 1, "t1": 5, "c": 2, "out_dir": "from_config"}"#).unwrap();
    let o = run_in(
        tmp.path(),
        &["chord", "gas", "--t0", "2", "--t1", "9", "--c", "1", "--config", "run.json", "--out-dir", "from_flag"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("P0=0.5 v=2 "));
    assert!(tmp.path().join("from_config/chord.csv").is_file());
    assert!(!tmp.path().join("from_flag").exists());

    fs::write(&cfg, r#"{"t0": 1, "t1": 5, "c": 2, "temperature": 3}"#).unwrap();
    let o = run_in(tmp.path(), &["chord", "gas", "--config", "run.json", "--out-dir", "rejected"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown field"), "{}", stderr(&o));
    assert!(!tmp.path().join("rejected").exists());

    fs::write(&cfg, r#"{"model": "cw", "T": 0.8, "H_back": 0.1, "b": 1}"#).unwrap();
    let o = run_in(tmp.path(), &["gibbs", "--config", "run.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let header = fs::read_to_string(tmp.path().join("thermo_out/legendrian.csv")).unwrap();
    assert_eq!(header.lines().next(), Some("q,p,z,S"));
}

#[test]
fn env_sets_default_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin()
        .current_dir(tmp.path())
        .env("THERMO_OUT_DIR", "env_out")
        .args(["stirling"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(tmp.path().join("env_out/stirling_manifest.json").is_file());
}

#[test]
fn identical_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let system = tmp.path().join("sys.json");
    fs::write(
        &system,
        r#"{"labels": ["a", "b", "c"], "weights": [1, 1, 2], "v_int": [0, 0.5, 1], "v_bar": [[1, 0, -1]]}"#,
    )
    .unwrap();
    for dir in ["a", "b"] {
        let o = run_in(
            tmp.path(),
            &["relax", "--system", "sys.json", "--q", "-0.3", "--t-init", "1", "-T", "2", "--background-jump", "0.5", "--out-dir", dir],
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let (a, b) = (sorted_files(&tmp.path().join("a")), sorted_files(&tmp.path().join("b")));
    assert_eq!(a.len(), 6);
    assert_eq!(a, b);
}

#[test]
fn json_format_and_reduce_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["chord", "gas", "--t0", "1", "--t1", "5", "--c", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let chords: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("thermo_out/chord.json")).unwrap()).unwrap();
    assert_eq!(chords[0]["p"], 2.0);
    assert_eq!(chords[0]["direction"], 1);
    let table: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("thermo_out/fig1_lambda0.json")).unwrap()).unwrap();
    assert_eq!(table["columns"], serde_json::json!(["q", "p", "z"]));

    fs::write(
        tmp.path().join("sys.json"),
        r#"{"labels": ["a", "b"], "weights": [1, 1], "v_int": [0, 1], "v_bar": [[1, -1], [0, 0]]}"#,
    )
    .unwrap();
    let o = run_in(
        tmp.path(),
        &["relax", "--system", "sys.json", "--q", "0.2,0.0", "-T", "1.5", "--t-init", "1", "--ramp", "2", "--t-end", "10", "--out-dir", "r"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run_in(
        tmp.path(),
        &["reduce", "--input", "r/relax_extended.csv", "--k", "1", "--frozen", "2=0", "--out-dir", "red"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("reduced min form="));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("red/reduce_report.json")).unwrap()).unwrap();
    assert_eq!(report["reduced"]["verdict"], "nonnegative");
    assert_eq!(report["n"], 2);

    let o = run_in(tmp.path(), &["reduce", "--input", "r/relax_extended.csv", "--k", "1", "--frozen", "2=0.5"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn verify_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("verify: 10/10 checks passed"));
}
