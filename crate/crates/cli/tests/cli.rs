use std::path::Path;
use std::process::{Command, Output};

fn suq2(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_suq2"))
        .args(args)
        .env_remove("SUQ2_OUTPUT_DIR")
        .env_remove("SUQ2_PRECISION")
        .current_dir(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn spectrum_table_for_dlssv() {
    let dir = tempfile::tempdir().unwrap();
    let o = suq2(&["spectrum", "--triple", "dlssv", "--nmax", "2", "--format", "csv"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,eigenvalue,multiplicity,expected"));
    assert_eq!(lines.next(), Some("0,1.0,2,2"));
    // 2n = 3: 4 with multiplicity 4·5, −3 with 4·3
    assert!(text.contains("3/2,4.0,20,20"));
    assert!(text.contains("3/2,-3.0,12,12"));
    assert_eq!(text.lines().count(), 1 + 1 + 2 * 4);
}

#[test]
fn op_dump_echoes_conventions() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("a.mtx");
    let o =
        suq2(&["op", "dump", "--name", "pi_prime_alpha", "--nmax", "1", "--out", file.to_str().unwrap()], dir.path());
    assert!(o.status.success());
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.starts_with("%%MatrixMarket matrix coordinate real general\n"));
    for field in ["% operator: pi_prime_alpha", "% space: dlssv", "% nmax: 1", "% q: 0.5", "% convention: "] {
        assert!(text.contains(field), "missing {field}");
    }
    let m = suq2_core::export::parse_dump(&text).unwrap();
    assert_eq!(m.dim_source(), 28);
}

#[test]
fn check_writes_reports_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let args = ["check", "--nmax", "2", "--only", "dimensions", "--only", "relations", "--out", out.to_str().unwrap()];
    let a = suq2(&args, dir.path());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let first = std::fs::read(out.join("report.json")).unwrap();
    let b = suq2(&args, dir.path());
    assert!(b.status.success());
    assert_eq!(first, std::fs::read(out.join("report.json")).unwrap());
    assert_eq!(stdout(&a), stdout(&b));
    let report: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["checks"][0]["name"], "dimensions");
    assert!(std::fs::read_to_string(out.join("report.csv")).unwrap().starts_with("check,status,kind,quantity,value\n"));
}

#[test]
fn failed_check_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = suq2(
        &["check", "--nmax", "1", "--only", "relations_mutation", "--tol", "mutation=1e6", "--out", "r"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "mutation check is skipped below 2n = 4");
    let o = suq2(
        &["check", "--nmax", "2", "--only", "relations_mutation", "--tol", "mutation=1e6", "--out", "r"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL relations_mutation"));
}

#[test]
fn usage_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["frobnicate"],
        vec!["check", "--q", "1.5"],
        vec!["check", "--tol", "nonsense=1"],
        vec!["check", "--tol", "relations"],
        vec!["check", "--nmax", "0.3"],
        vec!["op", "dump", "--name", "pi_prime_gamma"],
        vec!["spectrum", "--triple", "other"],
        vec!["check", "--only", "no_such_check"],
    ] {
        let o = suq2(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn index_for_both_triples() {
    let dir = tempfile::tempdir().unwrap();
    let o = suq2(&["index", "--nmax", "2", "--threshold", "1e-4"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["triple"], "cp");
    assert_eq!(rows[0]["index"], rows[1]["index"]);
}

#[test]
fn env_overrides_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_suq2"))
        .args(["check", "--nmax", "1", "--only", "dimensions"])
        .env("SUQ2_OUTPUT_DIR", &target)
        .env("SUQ2_PRECISION", "4")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(target.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["precision"], 4);
}
