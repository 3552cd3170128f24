//! End-to-end tests against the compiled binary: the documented output
//! values, exit codes, and JSON determinism.

use std::process::{Command, Output};

fn ncx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_tmp(name: &str, contents: &str) -> String {
    let path = std::env::temp_dir().join(format!("ncx-cli-test-{name}"));
    std::fs::write(&path, contents).expect("tmp file");
    path.to_string_lossy().into_owned()
}

#[test]
fn pentagon_hierarchy_row() {
    let out = ncx(&["bounds", "--builtin", "ncycle:5", "--which", "all"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("alpha"), "{text}");
    assert!(text.contains('2'), "{text}");
    assert!(text.contains("2.23606798"), "{text}");
    assert!(text.contains("2.5"), "{text}");
}

#[test]
fn chsh_values() {
    let out = ncx(&["bounds", "--builtin", "chsh", "--which", "classical,ns,qm1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("classical") && lines[0].contains('3'));
    assert!(lines[1].starts_with("ns") && lines[1].contains('4'));
    assert!(lines[2].starts_with("qm1") && lines[2].contains("3.41421356"));
}

#[test]
fn graph_file_input() {
    let path = write_tmp(
        "c7.json",
        r#"{"n": 7, "edges": [[0,1],[1,2],[2,3],[3,4],[4,5],[5,6],[6,0]]}"#,
    );
    let out = ncx(&["bounds", "--graph", &path, "--which", "theta"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("3.31766721"), "{}", stdout(&out));
}

#[test]
fn json_output_is_deterministic() {
    let run = || {
        let out = ncx(&[
            "bounds",
            "--builtin",
            "ncycle:7",
            "--which",
            "all",
            "--json",
        ]);
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn json_reports_carry_certificates() {
    let out = ncx(&[
        "bounds",
        "--builtin",
        "ncycle:5",
        "--which",
        "theta",
        "--json",
    ]);
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    let report = &parsed[0];
    assert_eq!(report["quantity"], "theta");
    assert_eq!(report["certificate"]["type"], "sdp");
    assert!(report["certificate"]["rel_gap"].as_f64().unwrap() <= 1e-8);
    assert!(report["input_digest"].is_string());
    assert!(
        report.get("wall_time_ms").is_none(),
        "timing must stay out of JSON"
    );
}

#[test]
fn membership_examples() {
    let half = write_tmp("half.json", r#"{"p": [0.5, 0.5, 0.5, 0.5, 0.5]}"#);
    let c5 = write_tmp(
        "c5.json",
        r#"{"n": 5, "edges": [[0,1],[1,2],[2,3],[3,4],[4,0]]}"#,
    );
    for (set, verdict) in [("GPT", "true"), ("QM", "false"), ("C", "false")] {
        let out = ncx(&["membership", "--point", &half, "--graph", &c5, "--set", set]);
        assert!(out.status.success());
        assert!(
            stdout(&out).contains(&format!("inside({set}): {verdict}")),
            "{set}: {}",
            stdout(&out)
        );
    }
    let zero = write_tmp("zero.json", r#"{"p": [0, 0, 0, 0, 0]}"#);
    for set in ["GPT", "QM", "C"] {
        let out = ncx(&["membership", "--point", &zero, "--graph", &c5, "--set", set]);
        assert!(stdout(&out).contains("true"));
    }
}

#[test]
fn pr_box_membership_through_the_cli() {
    // the PR box written out in the (a fastest, then b, x, y) event order
    let mut p = vec![0.0; 16];
    for y in 0..2 {
        for x in 0..2 {
            for b in 0..2 {
                for a in 0..2 {
                    if a ^ b == x & y {
                        p[a + 2 * (b + 2 * (x + 2 * y))] = 0.5;
                    }
                }
            }
        }
    }
    let pr = write_tmp("pr.json", &format!("{{\"p\": {p:?}}}"));
    let out = ncx(&[
        "membership",
        "--point",
        &pr,
        "--builtin",
        "chsh",
        "--set",
        "NS",
    ]);
    assert!(
        stdout(&out).contains("inside(NS): true"),
        "{}",
        stdout(&out)
    );
    let out = ncx(&[
        "membership",
        "--point",
        &pr,
        "--builtin",
        "chsh",
        "--set",
        "QM",
    ]);
    assert!(
        stdout(&out).contains("inside(QM): false"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn scenario_file_with_negative_coefficients() {
    // -p(00|00): the normalization identity trades it for the three
    // complementary events minus 1, so the hidden-variable optimum is 0
    let mut lambda = vec![0.0; 16];
    lambda[0] = -1.0;
    let scenario = write_tmp(
        "neg.json",
        &format!(
            "{{\"nA\": 2, \"nB\": 2, \"nX\": 2, \"nY\": 2, \"lambda\": {lambda:?}, \"offset\": 0.0}}"
        ),
    );
    let out = ncx(&[
        "bounds",
        "--scenario",
        &scenario,
        "--which",
        "classical",
        "--json",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed[0]["value"].as_f64().unwrap(), 0.0);
}

#[test]
fn exit_codes() {
    // parse error -> 2
    let bad = write_tmp("bad.json", "{ not json");
    let out = ncx(&["bounds", "--graph", &bad]);
    assert_eq!(out.status.code(), Some(2));

    // out-of-range edge -> 2
    let oob = write_tmp("oob.json", r#"{"n": 3, "edges": [[0, 7]]}"#);
    let out = ncx(&["bounds", "--graph", &oob]);
    assert_eq!(out.status.code(), Some(2));

    // duplicate edge -> 2, message names the field
    let dup = write_tmp("dup.json", r#"{"n": 3, "edges": [[0,1],[1,0]]}"#);
    let out = ncx(&["bounds", "--graph", &dup]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("edges[1]"));

    // unknown builtin -> 2
    let out = ncx(&["bounds", "--builtin", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));

    // scenario-only quantity on a graph input -> 2
    let out = ncx(&["bounds", "--builtin", "ncycle:5", "--which", "qm1"]);
    assert_eq!(out.status.code(), Some(2));

    // missing input -> 2
    let out = ncx(&["bounds"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reproduce_filter_and_exit() {
    let out = ncx(&["reproduce", "--only", "kcbs"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("[PASS] kcbs"));
    assert!(!text.contains("chsh"));

    let out = ncx(&["reproduce", "--only", "no-such-group"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reproduce_json_shape() {
    let out = ncx(&["reproduce", "--only", "pentagon", "--json"]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(parsed[0]["name"], "pentagon");
    assert_eq!(parsed[0]["pass"], true);
    assert!(parsed[0]["rows"].as_array().unwrap().len() >= 3);
}
