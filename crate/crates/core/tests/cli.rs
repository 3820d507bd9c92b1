//! Exit codes and round trips of the command-line tool.

use std::process::Command;

fn greenplan(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_greenplan")).args(args).current_dir(env!("CARGO_MANIFEST_DIR")).output().unwrap();
    let text = format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr));
    (out.status.code().unwrap(), text)
}

#[test]
fn solve_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let lp = dir.path().join("m.lp");
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"workload": {"regular_gbps": [0, 0]}}"#).unwrap();
    let (code, text) = greenplan(&[
        "solve", "--topology", "data/desk6.json", "--beta", "1", "--seed", "2", "--mode", "classical", "--config",
        config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--export-lp", lp.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{text}");
    assert!(lp.exists());
    let (code, text) = greenplan(&[
        "verify", "--model", out.join("instance.json").to_str().unwrap(), "--solution",
        out.join("solution.json").to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{text}");
}

#[test]
fn solver_limit_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"solver": {"node_limit": 1}}"#).unwrap();
    let (code, text) = greenplan(&[
        "solve", "--topology", "data/desk6.json", "--beta", "4", "--mode", "green", "--backup", "on", "--config",
        config.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(code, 3, "{text}");
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().join("o");
    let o = o.to_str().unwrap();
    assert_eq!(greenplan(&["solve", "--topology", "missing.json", "--beta", "1", "--out", o]).0, 2);
    assert_eq!(greenplan(&["solve", "--topology", "data/nsfnet.json", "--beta", "1", "--out", o]).0, 2);
    assert_eq!(greenplan(&["solve", "--topology", "data/desk6.json", "--beta", "11", "--out", o]).0, 2);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"topolgy": "x"}"#).unwrap();
    assert_eq!(greenplan(&["sweep", "--config", bad.to_str().unwrap(), "--out", o]).0, 2);
    assert_eq!(greenplan(&["solve", "--topology", "data/desk6.json", "--beta", "1", "--renewable", "a,b", "--out", o]).0, 2);
}

#[test]
fn infeasible_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"dc_excluded": [1, 2, 3, 4, 5]}"#).unwrap();
    let (code, text) = greenplan(&[
        "solve", "--topology", "data/desk6.json", "--beta", "1", "--config", config.to_str().unwrap(), "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(code, 1, "{text}");
}
