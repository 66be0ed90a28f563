use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nas-landscape")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = cli(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn error_json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr.clone()).unwrap();
    serde_json::from_str(stderr.lines().last().unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A design of `n` rows with a smooth synthetic accuracy and CPU time.
fn evaluated(dir: &Path, n: usize, seed: u64, dataset: Option<&str>) -> std::path::PathBuf {
    let design = dir.join(format!("design-{seed}.csv"));
    ok(&["doe", "--n", &n.to_string(), "--seed", &seed.to_string(), "--out", s(&design)]);
    let text = fs::read_to_string(&design).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let mut csv = match dataset {
        Some(_) => format!("{header},accuracy,cpu_time,dataset\n"),
        None => format!("{header},accuracy,cpu_time\n"),
    };
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let z: f64 = v.iter().enumerate().map(|(i, x)| (x * (i + 1) as f64 * 0.37).sin()).sum();
        let acc = 1.0 / (1.0 + (-z / 4.0).exp());
        let cpu = 10.0 + v[0] + v[1];
        match dataset {
            Some(d) => csv.push_str(&format!("{line},{acc},{cpu},{d}\n")),
            None => csv.push_str(&format!("{line},{acc},{cpu}\n")),
        }
    }
    let out = dir.join(format!("evaluated-{seed}.csv"));
    fs::write(&out, csv).unwrap();
    out
}

#[test]
fn doe_writes_design_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    let stdout = ok(&["doe", "--n", "50", "--seed", "3", "--out", s(&out)]);
    assert!(stdout.contains("stratification: ok"));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 51);
    assert_eq!(text.lines().next().unwrap().split(',').count(), 23);
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("d.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "doe");
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["parameters"]["n"], 50);
    assert_eq!(manifest["parameters"]["space"], "initial");
}

#[test]
fn missing_accuracy_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("d.csv");
    ok(&["doe", "--n", "20", "--out", s(&design)]);
    let out = cli(&["features", "--input", s(&design), "--out", s(&dir.path().join("f.csv"))]);
    let e = error_json(&out);
    assert_eq!(e["error"], "Schema");
    assert_eq!(e["column"], "accuracy");
}

#[test]
fn out_of_range_value_reports_row_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let input = evaluated(dir.path(), 30, 1, None);
    let text = fs::read_to_string(&input).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let column = lines[0].split(',').next().unwrap().to_string();
    let mut cells: Vec<&str> = lines[4].split(',').collect();
    cells[0] = "1e9";
    lines[4] = cells.join(",");
    fs::write(&input, lines.join("\n") + "\n").unwrap();
    let e = error_json(&cli(&["features", "--input", s(&input), "--out", s(&dir.path().join("f.csv"))]));
    assert_eq!(e["error"], "OutOfBounds");
    assert_eq!(e["row"], 3);
    assert_eq!(e["column"], column.as_str());
}

#[test]
fn too_few_rows_name_the_failing_families() {
    let dir = tempfile::tempdir().unwrap();
    let input = evaluated(dir.path(), 150, 2, None);
    let e = error_json(&cli(&["features", "--input", s(&input), "--out", s(&dir.path().join("f.csv"))]));
    assert_eq!(e["error"], "InsufficientData");
    assert_eq!(e["families"], serde_json::json!(["meta_model"]));
}

#[test]
fn features_rows_and_failed_replicates() {
    let dir = tempfile::tempdir().unwrap();
    let input = evaluated(dir.path(), 400, 3, None);
    let out = dir.path().join("f.csv");
    ok(&["features", "--input", s(&input), "--bootstrap", "300x3", "--dataset", "toy", "--out", s(&out)]);
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert!(rows[0].starts_with("dataset,replicate,disp.diff_mean_02"));
    assert_eq!(rows.len(), 5);
    assert!(rows[1].starts_with("toy,0,"));

    let failing = dir.path().join("g.csv");
    let run = cli(&["features", "--input", s(&input), "--bootstrap", "250x2", "--out", s(&failing)]);
    assert!(run.status.success());
    let stderr = String::from_utf8(run.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 2, "{stderr}");
    assert_eq!(fs::read_to_string(&failing).unwrap().lines().count(), 2);
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("g.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["notes"]["failed_replicates"].as_array().unwrap().len(), 2);
}

#[test]
fn analysis_commands_on_one_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let input = evaluated(dir.path(), 120, 4, Some("toy"));
    let p = |n: &str| dir.path().join(n);

    ok(&["correlate", "--input", s(&input), "--out", s(&p("c.csv"))]);
    let c = fs::read_to_string(p("c.csv")).unwrap();
    assert_eq!(c.lines().count(), 24);

    ok(&["mds", "--input", s(&input), "--out", s(&p("m.csv"))]);
    let m = fs::read_to_string(p("m.csv")).unwrap();
    assert!(m.starts_with("label,mds_1,mds_2,accuracy"));
    assert_eq!(m.lines().count(), 121);

    ok(&["reduce", "--input", s(&input), "--k", "20", "--out", s(&p("r.json"))]);
    let space: Value = serde_json::from_str(&fs::read_to_string(p("r.json")).unwrap()).unwrap();
    assert!(space.to_string().contains("filters_0"));

    ok(&["densities", "--input", s(&input), "--k", "20", "--out", s(&p("dens.json"))]);
    let dens: Value = serde_json::from_str(&fs::read_to_string(p("dens.json")).unwrap()).unwrap();
    assert_eq!(dens.as_array().unwrap().len(), 23);
}

#[test]
fn cluster_and_knn_over_feature_tables() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    ok(&["bbob", "--dim", "3", "--instances", "4", "--n", "60", "--fids", "1,5,20", "--out", s(&p("b.csv"))]);
    let b = fs::read_to_string(p("b.csv")).unwrap();
    assert!(b.starts_with("fid,instance,"));
    assert_eq!(b.lines().count(), 13);

    let stdout = ok(&["cluster", s(&p("b.csv")), "--cut", "3", "--out", s(&p("t.json"))]);
    assert!(stdout.contains("purity"));
    let tree: Value = serde_json::from_str(&fs::read_to_string(p("t.json")).unwrap()).unwrap();
    assert_eq!(tree["merges"].as_array().unwrap().len(), 11);
    let labels = fs::read_to_string(p("t.json.labels.csv")).unwrap();
    assert!(labels.starts_with("id,group,cluster"));

    ok(&["knn", s(&p("b.csv")), "--k", "2", "--out", s(&p("k.json"))]);
    let knn: Value = serde_json::from_str(&fs::read_to_string(p("k.json")).unwrap()).unwrap();
    let groups: Vec<&String> = knn.as_object().unwrap().keys().collect();
    assert_eq!(groups, ["bbob-f1", "bbob-f20", "bbob-f5"]);
    assert!(knn["bbob-f5"]["neighbour_self_knn"]["mean"].as_f64().unwrap() > 0.0);
}

#[test]
fn unknown_function_id_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let e = error_json(&cli(&["bbob", "--fids", "25", "--out", s(&dir.path().join("b.csv"))]));
    assert_eq!(e["error"], "UnknownFunction");
}

#[test]
fn space_json_round_trips_through_doe() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("s.json");
    ok(&["space", "reduced", "--out", s(&space)]);
    let out = dir.path().join("d.csv");
    ok(&["doe", "--space", s(&space), "--n", "40", "--out", s(&out)]);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 41);
}
