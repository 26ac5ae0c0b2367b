use std::process::{Command, Output};

use serde_json::Value;

fn bubblefield(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bubblefield")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn check_exit_codes() {
    assert_eq!(bubblefield(&["check", "--h", "sin_power:3", "--eps", "0.2"]).status.code(), Some(0));
    assert_eq!(bubblefield(&["check", "--h", "zero", "--eps", "0.5"]).status.code(), Some(0));

    let bad = bubblefield(&["check", "--h", "sin_power:3", "--eps", "1.0"]);
    assert_eq!(bad.status.code(), Some(1));
    let report = json_of(&bad);
    let failed: Vec<&str> = report["report"]["conditions"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"plane_curvature_positive"), "{failed:?}");
}

#[test]
fn check_interval_brackets_the_example() {
    let out = bubblefield(&["check", "--eps", "0.1", "--grid", "1024", "--interval=-0.5,0.6,1e-3"]);
    assert_eq!(out.status.code(), Some(0));
    let est = &json_of(&out)["interval"];
    let lo = est["eps_min"].as_f64().unwrap();
    let hi = est["eps_max"].as_f64().unwrap();
    assert!(lo <= -1.0 / 7.0 + 1e-3 && hi >= 0.4 - 1e-3, "[{lo}, {hi}]");
    assert!(est["anomalies"].as_array().unwrap().is_empty());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(bubblefield(&["check", "--h", "sin_power:2", "--eps", "0.1"]).status.code(), Some(2));
    assert_eq!(bubblefield(&["check", "--norm", "loose"]).status.code(), Some(2));
    assert_eq!(bubblefield(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"h":{"kind":"zero"},"epsilon":0.0,"colour":"red"}"#).unwrap();
    assert_eq!(bubblefield(&["check", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&cfg, "{not json").unwrap();
    assert_eq!(bubblefield(&["check", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn config_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"h":{"kind":"sin_power","m":3},"epsilon":1.0}"#).unwrap();
    let out = bubblefield(&["check", "--eps", "0.2", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn field_examples() {
    let out = bubblefield(&["field", "--h", "zero", "--eps", "0", "--grid", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,x3,H"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 125);
    assert!(rows.iter().all(|r| r.rsplit(',').next().unwrap().parse::<f64>().unwrap() == 1.0));

    let out = bubblefield(&["field", "--eps", "0.2", "--radii", "1.5620499351813308"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let value: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((value - 1.25).abs() < 1e-10);

    assert_eq!(bubblefield(&["field", "--eps", "0.2", "--lattice", "3.9,1"]).status.code(), Some(1));
    assert_eq!(bubblefield(&["field", "--eps", "1.0"]).status.code(), Some(1));
    assert_eq!(bubblefield(&["field", "--eps", "0.2", "--n", "3"]).status.code(), Some(2));
    assert_eq!(bubblefield(&["field", "--eps", "0.2", "--n", "3", "--radial", "--grid", "11"]).status.code(), Some(0));
}

#[test]
fn field_output_file_round_trips_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    let res = bubblefield(&["field", "--eps", "0.2", "--radial", "--grid", "21", "--box", "2.5", "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("r,H\n") && text.ends_with('\n') && !text.contains('\r'));
    for line in text.lines().skip(1) {
        for cell in line.split(',') {
            let mantissa = cell.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.len(), 18, "{cell}");
        }
    }
}

#[test]
fn mesh_examples() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("sphere.obj");
    let out = bubblefield(&["mesh", "--h", "zero", "--eps", "0", "--res", "16", "--out", obj.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let summary = json_of(&out);
    assert!((summary["max_vertex_norm"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let text = std::fs::read_to_string(&obj).unwrap();
    assert!(text.lines().all(|l| l.starts_with("v ") || l.starts_with("f ")));
    assert!(dir.path().join("sphere_curvature.csv").exists());

    let obj = dir.path().join("s.obj");
    let out = bubblefield(&["mesh", "--eps", "0.2", "--res", "64", "--out", obj.to_str().unwrap()]);
    let summary = json_of(&out);
    let c2 = summary["field_bounds"][1].as_f64().unwrap();
    let max = summary["curvature_max"].as_f64().unwrap();
    assert!(max <= c2 + 1e-6 && c2 - max < 1e-3, "{max} vs {c2}");

    assert_eq!(bubblefield(&["mesh", "--res", "4", "--out", obj.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(bubblefield(&["mesh", "--res", "16"]).status.code(), Some(2));
    assert_eq!(bubblefield(&["mesh", "--n", "3", "--res", "16", "--out", obj.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn verify_examples() {
    let out = bubblefield(&["verify", "--h", "zero", "--eps", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json_of(&out)["shooting"]["closure_gap"]["value"].as_f64().unwrap() <= 1e-7);

    let out = bubblefield(&["verify", "--eps", "0.2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json_of(&out)["shooting"]["hausdorff"]["value"].as_f64().unwrap() <= 1e-5);

    let out = bubblefield(&["verify", "--h", "cosine_series:0,-0.46875,0,0.1875,0,-0.03125", "--eps", "0.2", "--norm", "paper"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("g(0)"));
}

#[test]
fn fill_examples() {
    let out = bubblefield(&["fill", "--no-blocks", "--point", "0,0,0"]);
    let v = json_of(&out);
    assert_eq!(v["bubble"]["kind"], "round_sphere");
    assert_eq!(v["bubble"]["radius"], 1.0);

    let out = bubblefield(&["fill", "--eps", "0.2", "--point", "1.2,0,1.0"]);
    let v = json_of(&out);
    assert_eq!(v["bubble"]["kind"], "rotated_reference");
    assert!(v["bubble"]["residual"].as_f64().unwrap() <= 1e-9);
    assert!((v["bubble_mean_curvature"].as_f64().unwrap() - 1.25).abs() < 1e-9);

    let out = bubblefield(&["fill", "--eps", "0.2", "--lattice", "4,1", "--point", "9,0.5,0"]);
    let v = json_of(&out);
    assert_eq!(v["bubble"]["kind"], "round_sphere");
    assert_eq!(v["bubble"]["radius"], 1.0);

    assert_eq!(bubblefield(&["fill", "--eps", "0.2", "--point", "1,2"]).status.code(), Some(2));
    assert_eq!(bubblefield(&["fill", "--eps", "0.2"]).status.code(), Some(2));
    // lattice gap where two balls touch
    assert_eq!(bubblefield(&["fill", "--eps", "0.2", "--lattice", "4,1", "--point", "2,0.1,0"]).status.code(), Some(1));
}

#[test]
fn config_file_drives_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"h":{"kind":"sin_power","m":3},"epsilon":0.2,"blocks":[{"center":[0.0,0.0,0.0],"epsilon":0.2,"h":{"kind":"sin_power","m":3}},{"center":[5.0,0.0,0.0],"epsilon":0.1,"h":{"kind":"bump","support":[0.8,2.3]}}]}"#,
    )
    .unwrap();
    let out = bubblefield(&["fill", "--config", cfg.to_str().unwrap(), "--point", "5.3,0.2,0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["bubble"]["block_index"], 1);
}
