use std::path::PathBuf;
use std::process::{Command, Output};

fn khtool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_khtool")).args(args).output().expect("run khtool")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(rel).display().to_string()
}

#[test]
fn kh_json_for_trefoil() {
    let o = khtool(&["kh", "--catalog", "trefoil_r", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let cells: Vec<(i64, i64, u64)> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["i"].as_i64().unwrap(), c["j"].as_i64().unwrap(), c["dim"].as_u64().unwrap()))
        .collect();
    assert_eq!(cells, vec![(0, 1, 1), (0, 3, 1), (2, 5, 1), (3, 9, 1)]);
}

#[test]
fn braid_input_matches_catalog() {
    let a = khtool(&["kh", "--braid", "1,1,1", "--strands", "2", "--format", "csv"]);
    let b = khtool(&["kh", "--catalog", "trefoil_r", "--format", "csv"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn scan_path_agrees_with_direct_cube() {
    let direct = khtool(&["kh", "--catalog", "8_19", "--format", "csv"]);
    let scanned = khtool(&["kh", "--catalog", "8_19", "--format", "csv", "--max-direct", "1"]);
    assert_eq!(stdout(&direct), stdout(&scanned));
}

#[test]
fn lee_reports_s_and_d1() {
    let out = stdout(&khtool(&["lee", "--catalog", "trefoil_r"]));
    assert!(out.contains("d1: (2,5) -> (3,9) rank 1"), "{out}");
    assert!(out.contains("s = 2"), "{out}");
}

#[test]
fn audit_imported_table() {
    let t = data("table1.json");
    let o = khtool(&["audit", "--table", &t, "--s", "0"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("knight move: fails at (1, 1)"), "{out}");
    assert!(out.contains("E2 survivors: (0,-1)x1 (0,1)x1 (1,1)x1 (2,9)x1"), "{out}");
    assert!(out.contains("forced d2: (1,1) -> (2,9)"), "{out}");
    assert!(out.contains("unknotting number >= 3"), "{out}");
}

#[test]
fn alexander_and_jones() {
    let out = stdout(&khtool(&["alexander", "--catalog", "6_1"]));
    assert!(out.contains("Delta(t) = -2t^-1 + 5 - 2t"), "{out}");
    assert!(out.contains("Fox-Milnor: passes"), "{out}");
    let out = stdout(&khtool(&["jones", "--catalog", "trefoil_r"]));
    assert_eq!(out.trim(), "q + q^3 + q^5 - q^9");
}

#[test]
fn batch_writes_csv_with_error_rows() {
    let dir = std::env::temp_dir().join(format!("khtool-batch-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::copy(data("catalog/figure8.pd"), dir.join("figure8.pd")).unwrap();
    std::fs::write(dir.join("bad.pd"), "X[1,2").unwrap();
    let o = khtool(&["batch", dir.to_str().unwrap(), "--threads", "1"]);
    std::fs::remove_dir_all(&dir).ok();
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("knot,crossings,s,s_source,verdict,witness,forced,unknotting_bound,flag"));
    let rest: Vec<&str> = lines.collect();
    assert!(rest.contains(&"figure8,4,0,lee,holds,,,0,"), "{out}");
    assert!(rest.iter().any(|l| l.starts_with("bad,") && l.contains("error")), "{out}");
}

#[test]
fn exit_codes() {
    let t = data("table1.json");
    assert_eq!(khtool(&["audit", "--table", &t]).status.code(), Some(4));
    assert_eq!(khtool(&["kh", "--catalog", "nope"]).status.code(), Some(4));
    assert_eq!(khtool(&["kh", "--pd", "/nonexistent/file.pd"]).status.code(), Some(1));
    assert_eq!(khtool(&["kh", "--bogus"]).status.code(), Some(2));
    let bad = std::env::temp_dir().join(format!("khtool-bad-{}.pd", std::process::id()));
    std::fs::write(&bad, "X[1,1,2]").unwrap();
    let code = khtool(&["kh", "--pd", bad.to_str().unwrap()]).status.code();
    std::fs::remove_file(&bad).ok();
    assert_eq!(code, Some(3));
}
