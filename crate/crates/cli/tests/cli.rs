use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const REFERENCE: &str = r#"{
  "spec": {"nu": 1.0, "lambda": 1.0, "r1": 2.0, "r2": 1.0, "n": 2},
  "load": {"type": "linear", "amplitude": 0.2},
  "grid": {"nodes": 2001},
  "stability": {"max_mode": 8, "elements": 400},
  "oracle": {"enabled": true, "starts": 3, "seed": 17},
  "output": {"directory": "out", "formats": ["modes", "text"]}
}"#;

fn dualwell(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dualwell"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn solve(dir: &Path, config: &str, out_dir: &str) -> Output {
    let path = write_config(dir, &format!("{out_dir}.json"), config);
    dualwell(&["solve", path.to_str().unwrap(), "--output-dir", out_dir, "--quiet"], dir)
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn reference_run_has_no_gap() {
    let tmp = tempfile::tempdir().unwrap();
    let out = solve(tmp.path(), REFERENCE, "ref");
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());

    let dir = tmp.path().join("ref");
    for file in ["fields.csv", "report.json", "modes.csv", "report.txt"] {
        assert!(dir.join(file).exists(), "{file}");
    }
    let report = report(&dir);
    let branches = report["branches"].as_array().unwrap();
    assert_eq!(branches.len(), 3);
    let verdicts: Vec<&str> = branches
        .iter()
        .map(|b| b["stability"]["verdict"].as_str().unwrap())
        .collect();
    assert_eq!(verdicts, ["local-min", "radial-min-but-angular-unstable", "local-max"]);
    for b in branches {
        assert!(b["energies"]["gap"].as_f64().unwrap() <= 1e-8);
        assert!(b["residuals"]["constitutive"].as_f64().unwrap() <= 1e-9);
        assert_eq!(b["stability"]["modes"].as_array().unwrap().len(), 9);
    }
    assert_eq!(report["oracle"]["descents"].as_array().unwrap().len(), 3);

    let header = fs::read_to_string(dir.join("fields.csv")).unwrap();
    assert_eq!(
        header.lines().next().unwrap(),
        "r,f,G,F,sigma_norm_sq,zeta1,zeta2,zeta3,u1,u2,u3,strain1,strain2,strain3"
    );
    assert_eq!(header.lines().count(), 2002);
}

#[test]
fn huge_load_fails_the_hypotheses() {
    let tmp = tempfile::tempdir().unwrap();
    let config = REFERENCE.replace("\"amplitude\": 0.2", "\"amplitude\": 1e6");
    let out = solve(tmp.path(), &config, "huge");
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("L1 bound"), "{}", stderr(&out));

    let path = write_config(tmp.path(), "huge_validate.json", &config);
    let out = dualwell(&["validate", path.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reversed_radii_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let config = REFERENCE.replace("\"r1\": 2.0", "\"r1\": 0.5");
    let out = solve(tmp.path(), &config, "reversed");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("spec.r1"), "{}", stderr(&out));
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let unknown = REFERENCE.replace("\"seed\": 17", "\"seed\": 17, \"sead\": 3");
    let out = solve(tmp.path(), &unknown, "unknown");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("oracle"), "{}", stderr(&out));

    let wrong_type = REFERENCE.replace("\"nodes\": 2001", "\"nodes\": \"many\"");
    let out = solve(tmp.path(), &wrong_type, "wrong_type");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("grid.nodes"), "{}", stderr(&out));

    let bad_table = REFERENCE.replace(
        r#"{"type": "linear", "amplitude": 0.2}"#,
        r#"{"type": "table", "points": [[1.0, 0.1], [1.5, 0.0], [1.4, -0.1], [2.0, -0.1]]}"#,
    );
    let out = solve(tmp.path(), &bad_table, "bad_table");
    assert_eq!(out.status.code(), Some(2));

    let out = dualwell(&["solve", "does-not-exist.json"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_accepts_the_reference() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(tmp.path(), "ref.json", REFERENCE);
    let out = dualwell(&["validate", path.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("L1 bound"));
    assert!(!tmp.path().join("out").exists());
}

fn without_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn identical_configs_give_identical_reports() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(solve(tmp.path(), REFERENCE, "a").status.code(), Some(0));
    assert_eq!(solve(tmp.path(), REFERENCE, "b").status.code(), Some(0));
    let read = |d: &str, f: &str| fs::read_to_string(tmp.path().join(d).join(f)).unwrap();
    assert_eq!(without_timestamp(&read("a", "report.json")), without_timestamp(&read("b", "report.json")));
    assert_eq!(read("a", "fields.csv"), read("b", "fields.csv"));
    assert_eq!(read("a", "modes.csv"), read("b", "modes.csv"));
}

#[test]
fn fields_round_trip_reproduces_energies() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(solve(tmp.path(), REFERENCE, "first").status.code(), Some(0));
    let first = report(&tmp.path().join("first"));

    let mut reader = csv::Reader::from_path(tmp.path().join("first").join("fields.csv")).unwrap();
    let points: Vec<[f64; 2]> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            [r[0].parse().unwrap(), r[1].parse().unwrap()]
        })
        .collect();
    let mut config = first["config"].clone();
    config["load"] = serde_json::json!({"type": "table", "points": points});
    config["oracle"]["enabled"] = Value::Bool(false);
    let out = solve(tmp.path(), &config.to_string(), "second");
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let second = report(&tmp.path().join("second"));

    for (a, b) in first["branches"]
        .as_array()
        .unwrap()
        .iter()
        .zip(second["branches"].as_array().unwrap())
    {
        for key in ["primal", "dual", "total_complementary"] {
            let (x, y) = (
                a["energies"][key].as_f64().unwrap(),
                b["energies"][key].as_f64().unwrap(),
            );
            assert!((x - y).abs() <= 1e-10, "{key}: {x} against {y}");
        }
    }
}

#[test]
fn plot_writes_three_files() {
    let tmp = tempfile::tempdir().unwrap();
    let config = REFERENCE.replace("\"nodes\": 2001", "\"nodes\": 201");
    assert_eq!(solve(tmp.path(), &config, "run").status.code(), Some(0));
    let out = dualwell(&["plot", "run/fields.csv", "--output-dir", "plots"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let mut files: Vec<String> = fs::read_dir(tmp.path().join("plots"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(files, ["displacements.svg", "dual_fields.svg", "stress.svg"]);

    let plotted = config.replace("[\"modes\", \"text\"]", "[\"plots\"]");
    assert_eq!(solve(tmp.path(), &plotted, "inline").status.code(), Some(0));
    for f in &files {
        assert_eq!(
            fs::read(tmp.path().join("plots").join(f)).unwrap(),
            fs::read(tmp.path().join("inline").join(f)).unwrap()
        );
    }
}

#[test]
fn plot_rejects_bad_input() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = write_config(tmp.path(), "empty.csv", "");
    let out = dualwell(&["plot", empty.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));

    let partial = write_config(tmp.path(), "partial.csv", "r,u1\n1.0,0.0\n2.0,1.0\n");
    let out = dualwell(&["plot", partial.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing columns"), "{}", stderr(&out));

    let header = "r,f,G,F,sigma_norm_sq,zeta1,zeta2,zeta3,u1,u2,u3,strain1,strain2,strain3";
    let row = vec!["1.0"; 14].join(",");
    let bad = row.replacen("1.0", "NaN", 10).replacen("NaN", "1.0", 9);
    let text = format!("{header}\n{row}\n{row}\n{bad}\n");
    let nan = write_config(tmp.path(), "nan.csv", &text);
    let out = dualwell(&["plot", nan.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("row 3"), "{}", stderr(&out));
}
