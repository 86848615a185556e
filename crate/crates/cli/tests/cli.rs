use std::process::{Command, Output};

fn percolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_percolab")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = percolab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn access_is_identical_across_worker_counts() {
    let base = ["access", "--graph", "hypercube:n=8,oriented=false", "--apriori-max", "--reps", "600", "--seed", "4"];
    let one = stdout(&[&base[..], &["--threads", "1"]].concat());
    let three = stdout(&[&base[..], &["--threads", "3"]].concat());
    let seq = stdout(&[&base[..], &["--sequential"]].concat());
    assert_eq!(one, three);
    assert_eq!(one, seq);
    assert!(one.starts_with("schema_version,graph,alpha,target,apriori_max,path,value,"));
    let slow = stdout(&[&base[..], &["--path", "slow"]].concat());
    assert_eq!(one.replace(",fast,", ",slow,"), slow);
}

#[test]
fn sweep_writes_deterministic_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    std::fs::write(
        &config,
        r#"[
            {"graph": "hypercube:n=6", "observables": ["accessibility", "path_count"], "reps": 200, "seed": 3},
            {"graph": "tree:degree=3,height=3", "target": "7", "alpha": "0.25", "reps": 200},
            {"graph": "hypercube:n=5", "observables": ["reduced_fpp_threshold"], "thresholds": [0.5, 1.0],
             "distribution": "exp", "reps": 200}
        ]"#,
    )
    .unwrap();
    let config = config.to_str().unwrap();
    for format in ["csv", "json"] {
        let a = dir.path().join(format!("a.{format}"));
        let b = dir.path().join(format!("b.{format}"));
        stdout(&["sweep", "--config", config, "--format", format, "--out", a.to_str().unwrap(), "--threads", "2"]);
        stdout(&["sweep", "--config", config, "--format", format, "--out", b.to_str().unwrap(), "--sequential"]);
        let a = std::fs::read(a).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, std::fs::read(b).unwrap());
    }
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["kind"], "sweep");
    assert_eq!(json["data"].as_array().unwrap().len(), 5);
}

#[test]
fn verify_coupling_passes_and_reports_errors() {
    let ok = percolab(&["verify-coupling", "--graph", "hypercube:n=5", "--reps", "50", "--apriori-target", "ones"]);
    assert_eq!(ok.status.code(), Some(0));
    let text = String::from_utf8(ok.stdout).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.lines().skip(1).all(|l| l.contains(",50,0,")));
    let bad = percolab(&["verify-coupling", "--alpha", "1.5", "--reps", "3"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn landscape_files_round_trip_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("l.json");
    stdout(&["fpp", "--graph", "hypercube:n=4", "--landscape-out", path.to_str().unwrap(), "--alpha", "0.3"]);
    let l: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(l["n"], 4);
    assert_eq!(l["oriented"], false);
    assert_eq!(l["alpha"], 0.3);
    assert_eq!(l["fitness"].as_array().unwrap().len(), 16);
    let set = stdout(&["access", "--landscape", path.to_str().unwrap()]);
    assert_eq!(set.lines().count(), 17);
}

#[test]
fn edge_list_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    std::fs::write(&path, "# diamond\n0 1 u\n0 2 u\n1 3 d\n2 3 d\n").unwrap();
    let spec = format!("file:{}", path.display());
    let times = stdout(&["fpp", "--graph", &spec, "--kind", "bond"]);
    assert_eq!(times.lines().count(), 5);
    let exact = stdout(&["exact", "--graph", &spec, "--target", "3"]);
    assert!(exact.lines().nth(1).unwrap().contains(",1,4,"), "{exact}");
}

#[test]
fn numerics_commands() {
    let theta = stdout(&["theta", "--x", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&theta).unwrap();
    assert!((v["data"][0]["theta"].as_f64().unwrap() - 2f64.sqrt().ln_1p()).abs() < 1e-12);
    let xstar = stdout(&["xstar"]);
    assert!(xstar.contains("0.0897"));
    let curve = stdout(&["curve", "--what", "theta", "--from", "0", "--to", "1", "--points", "200"]);
    assert_eq!(curve.lines().count(), 201);
    let curve = stdout(&["curve", "--what", "bastardized", "--points", "50"]);
    assert_eq!(curve.lines().count(), 51);
    assert!(percolab(&["theta"]).status.code() == Some(2));
}

#[test]
fn ctp_reports_selected_statistics() {
    let out = stdout(&["ctp", "--n", "5", "--reps", "100", "--stats", "S,B,P,bound", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v["data"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["statistic"], "S");
    let again = stdout(&["ctp", "--n", "5", "--reps", "100", "--stats", "S,B,P,bound", "--format", "json", "--threads", "1"]);
    assert_eq!(out, again);
    assert_eq!(percolab(&["ctp", "--stats", "Q", "--reps", "5"]).status.code(), Some(2));
}
