use std::process::{Command, Output};

fn weakseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakseq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = weakseq(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn csv_headers() {
    let header = |cmd| stdout(&[cmd]).lines().next().unwrap().to_owned();
    assert_eq!(header("exact"), "step,history,eta,alpha,beta,theta,mu,s_chsh,witness");
    assert_eq!(header("simulate"), "step,history,quantity,value,sd,significance");
    assert_eq!(
        header("tree"),
        "step,history,probability,outcome_probability,eta,alpha,beta,theta,mu,mu_max,amplifies"
    );
}

#[test]
fn default_exact_has_one_row_per_node() {
    assert_eq!(stdout(&["exact"]).lines().count(), 1 + 21);
}

#[test]
fn json_uses_the_csv_field_names() {
    let rows: serde_json::Value = serde_json::from_str(&stdout(&["simulate", "--format", "json"])).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 21);
    let keys: Vec<&str> = rows[0].as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["step", "history", "quantity", "value", "sd", "significance"] {
        assert!(keys.contains(&k), "{keys:?}");
    }
    assert_eq!(rows[0]["quantity"], "chsh");
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let a = stdout(&["simulate", "--seed", "5"]);
    assert_eq!(a, stdout(&["simulate", "--seed", "5"]));
    assert_ne!(a, stdout(&["simulate", "--seed", "6"]));
}

#[test]
fn explicit_schedule() {
    let out = stdout(&["exact", "--steps", "2", "--mu", "0.13,0"]);
    assert_eq!(out.lines().count(), 1 + 1 + 4);
    let out = stdout(&["exact", "--steps", "1", "--mu", "0"]);
    let fields: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    // sharp measurement on the Bell state reaches Tsirelson's bound
    assert!((fields[7].parse::<f64>().unwrap() - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
}

/// Numeric columns of the first data row.
fn numeric_fields(csv: &str) -> Vec<f64> {
    let row = csv.lines().nth(1).unwrap();
    row.split(',').skip(2).map(|x| x.parse().unwrap()).collect()
}

#[test]
fn degrees_only_changes_angles() {
    let rad = stdout(&["exact", "--steps", "1", "--mu", "0.34"]);
    let deg = stdout(&["exact", "--steps", "1", "--mu", "0.34", "--degrees"]);
    let (r, d) = (numeric_fields(&rad), numeric_fields(&deg));
    assert!((d[0] - 45.0).abs() < 1e-12);
    assert!((d[4] - 0.34_f64.to_degrees()).abs() < 1e-12);
    assert_eq!(r[5..], d[5..]);
}

#[test]
fn out_writes_file() {
    let path = std::env::temp_dir().join(format!("weakseq-tree-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let out = weakseq(&["tree", "--out", p]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(written, stdout(&["tree"]));
}

#[test]
fn invalid_input_fails_with_one_line() {
    for args in [
        &["exact", "--steps", "3", "--mu", "0.1,0"][..],
        &["exact", "--mu", "0,0.1"],
        &["exact", "--mu", "-0.1"],
        &["simulate", "--pairs", "0"],
        &["simulate", "--visibility-z", "1.5"],
    ] {
        let out = weakseq(args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(out.stdout.is_empty());
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
    }
}
