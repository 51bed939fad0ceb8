use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tlm_core::io::write_grid_function;
use tlm_core::{morrey_norm, random_bandlimited, BallSampler, GridSpec, LebesguePair, WindowShape};

fn tlmcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tlmcheck"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn has_runtime_key(v: &Value) -> bool {
    match v {
        Value::Object(map) => map
            .iter()
            .any(|(k, v)| k.ends_with("runtime_s") || has_runtime_key(v)),
        Value::Array(items) => items.iter().any(has_runtime_key),
        _ => false,
    }
}

#[test]
fn morrey_norm_of_ball_indicator() {
    let out = tlmcheck(&["morrey-norm", "--p", "4", "--q", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let value = v["value"].as_f64().unwrap();
    let want = 2f64.powf(0.25);
    assert!((value - want).abs() <= 0.05 * want, "{value}");
    assert!(v["witness"]["radius"].as_f64().unwrap() > 0.0);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&a, &b] {
        let out = tlmcheck(&["scalar-suite", "--out", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!has_runtime_key(&json_file(&a)));

    let timed = dir.path().join("t.json");
    tlmcheck(&["scalar-suite", "--timing", "--out", timed.to_str().unwrap()]);
    assert!(has_runtime_key(&json_file(&timed)));
}

#[test]
fn calibrate_refuses_to_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("baseline.toml");
    std::fs::write(&path, "keep me").unwrap();
    let out = tlmcheck(&["calibrate", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "keep me");
}

#[test]
fn invalid_arguments_exit_two() {
    for args in [
        vec!["tlm-norm", "--p", "2", "--q", "4"],
        vec!["morrey-norm", "--p", "4", "--q", "2", "--radii", "0.5,abc"],
        vec![
            "morrey-norm",
            "--p",
            "4",
            "--q",
            "2",
            "--grid-points",
            "100",
        ],
        vec!["interp-demo", "--theta", "1.5"],
        vec!["no-such-command"],
    ] {
        let out = tlmcheck(&args);
        assert_eq!(
            code(&out),
            2,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn missing_input_file_exits_three() {
    let out = tlmcheck(&[
        "morrey-norm",
        "--p",
        "4",
        "--q",
        "2",
        "--input",
        "/nonexistent/f.csv",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn persistent_block_is_not_decided() {
    let out = tlmcheck(&[
        "diamond-check",
        "--p",
        "4",
        "--q",
        "2",
        "--sample",
        "persistent-block",
    ]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.to_string().contains("not-decided"), "{v}");
}

#[test]
fn band_limited_sample_passes_diamond_check() {
    let out = tlmcheck(&["diamond-check", "--p", "4", "--q", "2", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("a,j,norm"));
}

#[test]
fn input_file_matches_library_value() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let spec = GridSpec::standard(1, 256).unwrap();
    let f = random_bandlimited(spec, 4, 77, false).unwrap();
    write_grid_function(&path, &f).unwrap();
    let out = tlmcheck(&[
        "morrey-norm",
        "--p",
        "3",
        "--q",
        "2",
        "--input",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let want = morrey_norm(
        &f,
        LebesguePair::new(3.0, 2.0).unwrap(),
        &BallSampler::linear(&spec, WindowShape::Ball),
    )
    .unwrap();
    let got = v["value"].as_f64().unwrap();
    assert!((got - want).abs() <= 1e-12 * want, "{got} vs {want}");
}

#[test]
fn tlm_norm_csv_lists_every_block() {
    let out = tlmcheck(&[
        "tlm-norm",
        "--p",
        "4",
        "--q",
        "2",
        "--jmax",
        "5",
        "--grid-points",
        "128",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "j,norm");
    assert_eq!(lines.len(), 1 + 6);
}

#[test]
fn interp_demo_reconstructs() {
    let out = tlmcheck(&["interp-demo", "--family", "rho"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.to_string().contains("reconstruction"));
}
