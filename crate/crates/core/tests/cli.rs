//! Exit codes, manifests and trace tampering through the compiled binary.

use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypdeform")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn exit_codes_by_outcome_class() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["--help"])), 0);
    assert_eq!(code(&run(d, &["--version"])), 0);
    assert_eq!(code(&run(d, &["gen", "--bogus"])), 64);
    assert_eq!(code(&run(d, &["interp"])), 64);
    assert_eq!(code(&run(d, &["check", "--arrangement", "missing.json"])), 1);

    std::fs::write(d.join("broken.json"), "{\"n\": 2, \"q\": 4, \"hyperplanes\": [").unwrap();
    assert_eq!(code(&run(d, &["check", "--arrangement", "broken.json"])), 65);

    // Three concurrent diagonal points lie on z0 + z1 = 0.
    std::fs::write(
        d.join("frame.json"),
        r#"{"n": 2, "q": 6, "hyperplanes": [["1","0","0"],["0","1","0"],["0","0","1"],["1","1","1"],["1","3","2"],["2","5","3"]]}"#,
    )
    .unwrap();
    let o = run(d, &["check", "--arrangement", "frame.json", "--out", "frame_check.json"]);
    assert_eq!(code(&o), 3);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("frame_check.json")).unwrap()).unwrap();
    let text = v.to_string();
    assert!(text.contains("\"I\":[0,1]") && text.contains("\"J\":[4,5]"), "{text}");
    assert_eq!(code(&run(d, &["check", "--arrangement", "frame.json", "--mode", "general"])), 0);

    assert_eq!(code(&run(d, &["interp", "--m", "4"])), 3);
    assert_eq!(code(&run(d, &["interp", "--m", "5"])), 0);
    assert_eq!(code(&run(d, &["gen", "--n", "2", "--q", "7", "--bound", "1", "--max-tries", "20", "--out", "x.json"])), 2);
    assert_eq!(code(&run(d, &["--max-coeff-bits", "8", "build", "--n", "3", "--out", "t.json"])), 4);

    std::fs::write(d.join("pts.json"), "[[1,0,0],[0,1,0],[0,0,1],[1,1,1]]").unwrap();
    assert_eq!(code(&run(d, &["conic", "--points", "pts.json", "--tangent", "0,0,1", "--at", "0"])), 3);
    let o = run(d, &["conic", "--points", "pts.json", "--tangent", "0,1,1", "--at", "0"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("\"-2\""));
}

#[test]
fn manifests_record_inputs_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["gen", "--n", "3", "--seed", "4", "--out", "a.json"])), 0);
    assert_eq!(code(&run(d, &["--threads", "2", "build", "--n", "3", "--arrangement", "a.json", "--out", "t.json"])), 0);
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("t.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "build");
    assert_eq!(m["exit_code"], 0);
    assert!(m["inputs"]["a.json"].as_str().is_some_and(|s| s.len() == 64));
    let argv: Vec<&str> = m["argv"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert!(!argv.contains(&"--out") && !argv.contains(&"--threads"), "{argv:?}");
    let o = run(d, &["--threads", "1", "replay", "--manifest", "t.json.manifest.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    // A changed input is detected by digest.
    assert_eq!(code(&run(d, &["gen", "--n", "3", "--seed", "9", "--out", "a.json"])), 0);
    assert_ne!(code(&run(d, &["replay", "--manifest", "t.json.manifest.json"])), 0);
}

#[test]
fn tampered_trace_fails_verification_at_the_step() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["build", "--n", "3", "--seed", "1", "--out", "t.json"])), 0);
    assert_eq!(code(&run(d, &["verify", "--trace", "t.json"])), 0);

    let mut tr: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("t.json")).unwrap()).unwrap();
    let step = &mut tr["steps"][6];
    assert_eq!(step["index"], 7);
    let before = step["step"]["epsilon"].clone();
    step["step"]["epsilon"] = serde_json::Value::String("1/7".into());
    assert_ne!(before, step["step"]["epsilon"]);
    std::fs::write(d.join("bad.json"), serde_json::to_vec(&tr).unwrap()).unwrap();
    let o = run(d, &["verify", "--trace", "bad.json", "--out", "bad_report.json"]);
    assert_eq!(code(&o), 3);
    let report = std::fs::read_to_string(d.join("bad_report.json")).unwrap();
    assert!(report.contains("\"step\": 7") || report.contains("\"step\":7"), "{report}");
    assert!(stderr(&o).contains("step 7"), "{}", stderr(&o));
}
