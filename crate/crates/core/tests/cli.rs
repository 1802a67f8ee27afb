use std::process::{Command, Output};

fn wg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wg")).args(args).env_remove("WG_QUAD_ORDER").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn example8_prints_both_values() {
    let o = wg(&["example8"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "hdg=0.6931471806\nwg=0.7206795209\nNOT EQUAL\n");
}

#[test]
fn convergence_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = wg(&[
            "convergence",
            "--scheme",
            "primal-wg",
            "--problem",
            "sinsin",
            "--meshes",
            "grid:2,grid:4,grid:8",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("h,dofs_total,dofs_trace,err_l2_u,rate_l2_u"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn run_on_mesh_file_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("mesh.json");
    std::fs::write(
        &mesh,
        r#"{"vertices":[[0,0],[0.5,0],[1,0],[1,1],[0.5,1],[0,1]],"cells":[[0,1,4,5],[1,2,3,4]]}"#,
    )
    .unwrap();
    let spec = format!("file:{}", mesh.display());
    let o = wg(&["run", "--scheme", "hdg", "--problem", "sinsin", "--meshes", &spec, "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["scheme"], "hdg");
    assert_eq!(v["levels"].as_array().unwrap().len(), 1);
    assert!(v["levels"][0]["err_energy"].is_null());
}

#[test]
fn compare_reports_verdict() {
    let o = wg(&["compare", "--scheme", "mixed-wg", "--against", "hybrid-mixed-wg", "--k", "1", "--r", "1", "--meshes", "grid:2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("EQUIVALENT"));
    assert!(!stdout(&o).contains("NOT EQUIVALENT"));
}

#[test]
fn bad_input_exits_2() {
    assert_eq!(wg(&["run", "--scheme", "nope", "--problem", "sinsin"]).status.code(), Some(2));
    assert_eq!(wg(&["run", "--scheme", "hdg", "--problem", "sinsin", "--meshes", "hex:3"]).status.code(), Some(2));
    let o = wg(&["compare", "--scheme", "primal-wg", "--against", "mixed-wg", "--meshes", "grid:2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = wg(&["run", "--scheme", "hdg", "--problem", "sinsin", "--meshes", "file:/nonexistent/mesh.json"]);
    assert_ne!(o.status.code(), Some(0));
}
