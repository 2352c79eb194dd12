use std::path::Path;
use std::process::{Command, Output};

use vsc_core::pipeline::{parse_tsv, records_from_json, GwTablesJson};
use vsc_core::rational::fmt_q;

fn vsc(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vsc"));
    cmd.args(args).env_remove("VSC_CACHE");
    match cache {
        Some(dir) => cmd.arg("--cache-dir").arg(dir),
        None => cmd.arg("--no-cache"),
    };
    cmd.output().expect("run vsc")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn elliptic_constant_of_the_plane() {
    assert_eq!(stdout(&vsc(&["g1", "--N", "4", "--k", "1", "--d", "1", "--ins", "2:3"], None)), "-3/8\n");
    let out = stdout(&vsc(&["g1", "--N", "4", "--k", "1", "--d", "1", "--ins", "2:3", "--breakdown"], None));
    assert_eq!(out, "graph\ttype\tresidue\nstar(1)\ti\t1/8\npoint(1)\tiv\t-1/2\ntotal\t-\t-3/8\n");
}

#[test]
fn genus_zero_constant() {
    // t^1 of the plane carries (1/2)(x^2)^3 e^x, i.e. w(O_h O_1 | (O_{h^2})^3)_{0,1} / (1 * 3!) = 1/2
    let out = stdout(&vsc(&["g0", "--N", "4", "--k", "1", "--d", "1", "--a", "1", "--b", "0", "--ins", "2:3"], None));
    assert_eq!(out, "3\n");
    let out = stdout(&vsc(&["g0", "--N", "4", "--k", "1", "--d", "1", "--a", "1", "--b", "0", "--ins", "2:2"], None));
    assert_eq!(out, "0\n");
}

#[test]
fn catalog_lists_graphs() {
    let out = stdout(&vsc(&["catalog", "--d", "2"], None));
    assert_eq!(out.lines().count(), 6);
    let out = stdout(&vsc(&["catalog", "--d", "3", "--format", "json"], None));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], 8);
}

#[test]
fn quintic_identities() {
    let out = stdout(&vsc(&["bcov", "--k", "5", "--dmax", "3", "--check"], None));
    assert_eq!(out, "d=1 OK\nd=2 OK\nd=3 OK\nall identities hold\n");
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        &["g1", "--N", "4", "--k", "1", "--d", "1", "--ins", "2:x"][..],
        &["g1", "--N", "3", "--k", "4", "--d", "1"],
        &["g1", "--N", "4", "--k", "1", "--d", "1", "--ins", "3:1"],
        &["gw", "--N", "6", "--k", "1", "--dmax", "1"],
        &["catalog", "--d", "2", "--bogus"],
    ] {
        let o = vsc(args, None);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let o = vsc(&["catalog", "--bogus"], None);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--bogus"));
}

#[test]
fn output_is_deterministic_with_and_without_cache() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gw", "--N", "5", "--k", "3", "--dmax", "2"];
    let cold = stdout(&vsc(&args, Some(dir.path())));
    assert!(std::fs::read_dir(dir.path()).unwrap().count() > 0);
    let warm = stdout(&vsc(&args, Some(dir.path())));
    let none = stdout(&vsc(&args, None));
    assert_eq!(cold, warm);
    assert_eq!(cold, none);
}

#[test]
fn cache_env_overrides_flag() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_vsc"))
        .args(["g1", "--N", "4", "--k", "1", "--d", "2", "--ins", "2:6", "--cache-dir"])
        .arg(flag_dir.path())
        .env("VSC_CACHE", env_dir.path())
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "-63\n");
    assert_eq!(std::fs::read_dir(flag_dir.path()).unwrap().count(), 0);
    assert_eq!(std::fs::read_dir(env_dir.path()).unwrap().count(), 5);
}

#[test]
fn json_and_tsv_tables_agree() {
    let tsv = stdout(&vsc(&["gw", "--N", "5", "--k", "2", "--dmax", "2"], None));
    let json = stdout(&vsc(&["gw", "--N", "5", "--k", "2", "--dmax", "2", "--format", "json"], None));
    let rows = parse_tsv(&tsv).unwrap();
    let tables: GwTablesJson = serde_json::from_str(&json).unwrap();
    let records = records_from_json(&tables).unwrap();
    assert_eq!(rows.len(), records.len());
    assert_eq!(rows.len(), 6);
    for (row, rec) in rows.iter().zip(&records) {
        assert_eq!(row[0], rec.d.to_string());
        assert_eq!(row[1], rec.ins.get(2).to_string());
        assert_eq!(row[2], rec.ins.get(3).to_string());
        assert_eq!(row[3], fmt_q(rec.n0.as_ref().unwrap()));
        assert_eq!(row[4], fmt_q(&rec.n1));
        assert_eq!(row[5], fmt_q(rec.combo.as_ref().unwrap()));
        assert_eq!(row[6], fmt_q(&rec.w));
    }
    assert_eq!(rows[5], ["2", "6", "0", "320", "-160/3", "0", "-5956/3"]);
}

#[test]
fn mirror_map_rows() {
    let out = stdout(&vsc(&["mirror", "--N", "4", "--k", "1", "--dmax", "1"], None));
    assert!(out.lines().any(|l| l == "t1\t1\t2:3\t1/2"), "{out}");
    assert!(out.lines().any(|l| l == "x1\t1\t2:3\t-1/2"), "{out}");
    assert!(out.lines().any(|l| l == "x2\t1\t2:4\t-1/4"), "{out}");
}

#[test]
fn integrality_check_passes() {
    let o = vsc(&["gw", "--N", "5", "--k", "1", "--dmax", "2", "--check"], None);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("0 non-integral"));
}
