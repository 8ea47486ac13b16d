//! End-to-end tests driving the compiled binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ricci-uniform"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is a JSON document")
}

#[test]
fn info_reports_summary_classification_and_certificate() {
    let doc = stdout_json(&run(&["info", "--builtin", "d6_6"]));
    assert_eq!(doc["graph"]["vertices"], 12);
    assert_eq!(doc["graph"]["edges"], 13);
    assert_eq!(doc["graph"]["girth"], 6);
    let avg = doc["average_curvature"].as_f64().unwrap();
    assert!((avg + 2.0 / 13.0).abs() < 1e-12);
    assert_eq!(doc["classification"], "neither");
    assert_eq!(doc["certificate"]["satisfied"], true);
    assert_eq!(doc["certificate"]["global_density"]["num"], 13);
    assert_eq!(doc["certificate"]["global_density"]["den"], 12);
    assert_eq!(doc["certificate"]["witness"], Value::Null);

    let doc = stdout_json(&run(&["info", "--builtin", "tadpole_6_1"]));
    assert_eq!(doc["certificate"]["satisfied"], false);
    let witness: Vec<u64> = doc["certificate"]["witness"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(witness, vec![0, 1, 2, 3, 4, 5]);

    let doc = stdout_json(&run(&["info", "--builtin", "gp_8_3"]));
    assert_eq!(doc["classification"], json_regular(3));
    let avg = doc["average_curvature"].as_f64().unwrap();
    assert!((avg + 2.0 / 3.0).abs() < 1e-12);
}

fn json_regular(k: u64) -> Value {
    serde_json::json!({ "regular": k })
}

#[test]
fn info_handles_trees_without_average_curvature_confusion() {
    let doc = stdout_json(&run(&["info", "--builtin", "star_1_3"]));
    assert_eq!(doc["graph"]["girth"], Value::Null);
    // Trees have "girth infinity": the average-curvature formula applies.
    assert!(doc["average_curvature"].as_f64().is_some());
    assert_eq!(
        doc["classification"],
        serde_json::json!({ "semi_regular_bipartite": [3, 1] })
    );
}

#[test]
fn curvature_closed_form_with_cross_check() {
    let doc = stdout_json(&run(&["curvature", "--builtin", "gp_8_3", "--verify"]));
    assert_eq!(doc["method"], "closed_form");
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 24);
    for row in rows {
        let kappa = row["curvature"].as_f64().unwrap();
        assert!((kappa + 2.0 / 3.0).abs() < 1e-12);
    }
    assert_eq!(doc["verification"]["reference_method"], "lipschitz_lp");
    assert!(doc["verification"]["max_delta"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn curvature_falls_back_to_lp_below_girth_six() {
    let doc = stdout_json(&run(&["curvature", "--builtin", "triangle"]));
    assert_eq!(doc["method"], "lipschitz_lp");
    for row in doc["rows"].as_array().unwrap() {
        assert!((row["curvature"].as_f64().unwrap() - 1.5).abs() < 1e-8);
    }
    assert_eq!(doc.get("verification"), None);
}

#[test]
fn flow_writes_csv_svg_and_report_and_stratifies_the_bridge() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    let svg = dir.path().join("run.svg");
    let report = dir.path().join("run.json");
    let output = run(&[
        "flow",
        "--builtin",
        "d6_6",
        "--target",
        "average",
        "--t-max",
        "30",
        "--stratify",
        "2.0",
        "--csv",
        csv.to_str().unwrap(),
        "--plot",
        svg.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(output.status.success());

    let csv_text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = csv_text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("t,omega_0,"));
    assert!(header.ends_with(",lyapunov"));
    assert_eq!(header.split(',').count(), 1 + 13 + 13 + 1);
    assert!(lines.count() >= 100, "expected a sampled trajectory");

    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<svg"));
    assert!(svg_text.contains("polyline"));
    assert!(svg_text.contains("edge curvatures"));
    assert!(svg_text.contains("stroke-dasharray"), "asymptote line");

    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let heavy = doc["stratify"]["edges"].as_array().unwrap();
    assert_eq!(heavy.len(), 1, "threshold 2.0 isolates the bridge");
    assert_eq!(heavy[0]["edge"], 12);
    assert_eq!(heavy[0]["endpoints"][0], "0");
    assert_eq!(heavy[0]["endpoints"][1], "6");
    assert!(heavy[0]["weight"].as_f64().unwrap() > 2.5);
    assert!(doc["convergence"]["fit_r_squared"].as_f64().unwrap() > 0.98);
}

#[test]
fn identical_configs_produce_byte_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let mut artifacts: Vec<(Vec<u8>, Vec<u8>, Vec<u8>)> = Vec::new();
    for run_id in 0..2 {
        let csv = dir.path().join(format!("{run_id}.csv"));
        let svg = dir.path().join(format!("{run_id}.svg"));
        let report = dir.path().join(format!("{run_id}.json"));
        let output = run(&[
            "flow",
            "--builtin",
            "gp_8_3",
            "--random-init",
            "--seed",
            "7",
            "--t-max",
            "5",
            "--csv",
            csv.to_str().unwrap(),
            "--plot",
            svg.to_str().unwrap(),
            "--report",
            report.to_str().unwrap(),
        ]);
        assert!(output.status.success());
        artifacts.push((
            std::fs::read(&csv).unwrap(),
            std::fs::read(&svg).unwrap(),
            std::fs::read(&report).unwrap(),
        ));
    }
    assert_eq!(artifacts[0].0, artifacts[1].0, "CSV not deterministic");
    assert_eq!(artifacts[0].1, artifacts[1].1, "SVG not deterministic");
    assert_eq!(artifacts[0].2, artifacts[1].2, "report not deterministic");
}

#[test]
fn different_seeds_draw_different_initial_weights() {
    let doc7 = stdout_json(&run(&[
        "flow", "--builtin", "c6", "--random-init", "--seed", "7", "--t-max", "1",
    ]));
    let doc8 = stdout_json(&run(&[
        "flow", "--builtin", "c6", "--random-init", "--seed", "8", "--t-max", "1",
    ]));
    assert_ne!(doc7["initial_weights"], doc8["initial_weights"]);
    for w in doc7["initial_weights"].as_array().unwrap() {
        let w = w.as_f64().unwrap();
        assert!((0.5..1.5).contains(&w));
    }
}

#[test]
fn uniformize_solves_the_dumbbell() {
    let doc = stdout_json(&run(&["uniformize", "--builtin", "d6_6"]));
    assert_eq!(doc["certificate"]["satisfied"], true);
    let solution = &doc["solution"];
    let kappa = solution["constant_curvature"].as_f64().unwrap();
    assert!((kappa + 2.0 / 13.0).abs() < 1e-12);
    assert!(solution["curvature_residual"].as_f64().unwrap() <= 1e-8);
    assert!(solution["gradient_norm"].as_f64().unwrap() <= 1e-10);
    assert_eq!(solution["weights"].as_array().unwrap().len(), 13);
}

#[test]
fn uniformize_failed_condition_prints_report_and_exits_3() {
    let output = run(&["uniformize", "--builtin", "tadpole_6_1"]);
    assert_eq!(output.status.code(), Some(3));
    let doc: Value = serde_json::from_slice(&output.stdout).expect("report still emitted");
    assert_eq!(doc["certificate"]["satisfied"], false);
    assert_eq!(doc["solution"], Value::Null);
    assert!(doc["certificate"]["witness"].as_array().is_some());
}

#[test]
fn input_errors_exit_1() {
    // Unknown builtin, with the available names in the message.
    let output = run(&["info", "--builtin", "nonsense"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("d6_6"));

    // Unreadable graph file.
    let output = run(&["info", "--graph", "/nonexistent/graph.txt"]);
    assert_eq!(output.status.code(), Some(1));

    // Missing source entirely (clap usage error).
    let output = run(&["info"]);
    assert_eq!(output.status.code(), Some(1));

    // Short girth under an average target.
    let output = run(&["flow", "--builtin", "triangle", "--target", "average"]);
    assert_eq!(output.status.code(), Some(1));

    // Non-positive integrator options.
    let output = run(&["flow", "--builtin", "c6", "--dt", "-0.1"]);
    assert_eq!(output.status.code(), Some(1));

    // Uniformize on short girth.
    let output = run(&["uniformize", "--builtin", "triangle"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn graph_files_roundtrip_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();

    let edge_list = dir.path().join("hexagon.txt");
    std::fs::write(
        &edge_list,
        "# weighted hexagon\na b 1.0\nb c 1.0\nc d 1.0\nd e 1.0\ne f 1.0\nf a 1.0\n",
    )
    .unwrap();
    let doc = stdout_json(&run(&["info", "--graph", edge_list.to_str().unwrap()]));
    assert_eq!(doc["graph"]["vertices"], 6);
    assert_eq!(doc["graph"]["girth"], 6);
    assert_eq!(doc["graph"]["edge_list"][0][0], "a");

    let json_file = dir.path().join("path.json");
    std::fs::write(
        &json_file,
        r#"{"vertices": ["x", "y", "z"], "edges": [{"u": "x", "v": "y"}, {"u": "y", "v": "z", "w": 2.0}]}"#,
    )
    .unwrap();
    let doc = stdout_json(&run(&[
        "curvature",
        "--graph",
        json_file.to_str().unwrap(),
    ]));
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    // File weights are used as-is.
    assert_eq!(rows[1]["weight"].as_f64().unwrap(), 2.0);

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "a b\nc d\n").unwrap(); // disconnected
    let output = run(&["info", "--graph", bad.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn custom_target_files_are_parsed_and_validated() {
    let dir = tempfile::tempdir().unwrap();

    // A consistent custom target: the exact curvatures of unit weights on
    // the path, so the flow starts converged.
    let target = dir.path().join("target.txt");
    std::fs::write(&target, "0 1.0\n1 1.0\n").unwrap();
    let doc = stdout_json(&run(&[
        "flow",
        "--builtin",
        "p3",
        "--target",
        target.to_str().unwrap(),
        "--t-max",
        "2",
    ]));
    assert_eq!(doc["target"]["kind"], "custom");
    assert_eq!(doc["termination"]["kind"], "converged");
    assert_eq!(doc["termination"]["t"], 0.0);

    // Missing an edge.
    let incomplete = dir.path().join("incomplete.txt");
    std::fs::write(&incomplete, "0 1.0\n").unwrap();
    let output = run(&[
        "flow",
        "--builtin",
        "p3",
        "--target",
        incomplete.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));

    // Out-of-range edge index.
    let out_of_range = dir.path().join("oor.txt");
    std::fs::write(&out_of_range, "0 1.0\n1 1.0\n9 0.5\n").unwrap();
    let output = run(&[
        "flow",
        "--builtin",
        "p3",
        "--target",
        out_of_range.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn zero_target_flows_the_hexagon_nowhere() {
    // The hexagon has curvature identically zero at unit weights.
    let doc = stdout_json(&run(&[
        "flow", "--builtin", "c6", "--target", "zero", "--t-max", "1",
    ]));
    assert_eq!(doc["termination"]["kind"], "converged");
    for w in doc["final_weights"].as_array().unwrap() {
        assert_eq!(w.as_f64().unwrap(), 1.0);
    }
}

#[test]
fn help_and_version_exit_zero() {
    let output = run(&["--help"]);
    assert!(output.status.success());
    assert!(String::from_utf8_lossy(&output.stdout).contains("ricci-uniform"));
    let output = run(&["--version"]);
    assert!(output.status.success());
}

#[test]
fn report_flag_redirects_stdout_document() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("info.json");
    let output = run(&["info", "--builtin", "c6", "--report", path.to_str().unwrap()]);
    assert!(output.status.success());
    assert!(output.stdout.is_empty(), "document went to the file");
    assert!(Path::new(&path).exists());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["command"], "info");
}
