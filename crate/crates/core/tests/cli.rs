use std::path::PathBuf;
use std::process::Command;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dwork-zeta"))
}

#[test]
fn elliptic_report() {
    let out = bin().arg(data("elliptic_p7.json")).args(["--verify", "2"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["numerator"], serde_json::json!([1, -3, 7]));
    assert_eq!(v["verification"]["agrees"], true);
}

#[test]
fn expansions_give_identical_bytes() {
    let a = bin().arg(data("toric_f9.json")).output().unwrap();
    let b = bin().arg("compute").arg(data("toric_f9.json")).args(["--expansion", "dense"]).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn not_full_dimensional_exit_code() {
    let out = bin().arg(data("segment.json")).args(["--mode", "toric"]).output().unwrap();
    assert_eq!(out.status.code(), Some(14));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("NotFullDimensional"));
    assert!(err.contains("hint:"));
}

#[test]
fn oracle_count_subcommand() {
    let out = bin().args(["oracle", "count"]).arg(data("fermat_cubic.json")).args(["-r", "2"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["counts"], serde_json::json!([12, 48]));
}

#[test]
fn degeneracy_witness_flag() {
    let dir = std::env::temp_dir().join(format!("dwork-zeta-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("degenerate.json");
    std::fs::write(
        &path,
        r#"{"p":5,"n":1,"mode":"toric","terms":[{"exp":[2],"coeff":[1]},{"exp":[1],"coeff":[2]},{"exp":[0],"coeff":[1]}]}"#,
    )
    .unwrap();
    let out = bin().arg(&path).args(["--check-nondegenerate", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(16));
    assert!(String::from_utf8_lossy(&out.stderr).contains("singular"));
    std::fs::remove_dir_all(&dir).unwrap();
}
