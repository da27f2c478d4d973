use std::process::Command;

fn blendfv() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blendfv"))
}

#[test]
fn run_writes_profile_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("so.csv");
    let status = blendfv()
        .args(["run", "--scheme", "palft", "--testcase", "shu-osher", "--cells", "100", "--t-end", "0.2", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,rho,v,p,alpha"));
    assert_eq!(lines.count(), 100);
}

#[test]
fn convergence_prints_table() {
    let out = blendfv().args(["convergence", "--scheme", "delft", "--levels", "4..5", "--t-end", "0.1"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "N,steps,l1_rho,l1_total,eoc_rho");
    assert!(rows[1].starts_with("16,") && rows[2].starts_with("32,"));
}

#[test]
fn gen_data_then_train() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    let weights = dir.path().join("w.json");
    let status = blendfv()
        .args(["gen-data", "--n-ics", "1", "--fine-cells", "200", "--coarse-cells", "20", "--n-times", "5", "--out"])
        .arg(&data)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("d.csv.manifest.json").exists());
    let status = blendfv()
        .args(["train", "--schedule", "quick", "--loss", "mse", "--data"])
        .arg(&data)
        .arg("--out")
        .arg(&weights)
        .status()
        .unwrap();
    assert!(status.success());
    let status = blendfv()
        .args(["run", "--scheme", "ddlft", "--testcase", "smooth-transport", "--cells", "32", "--t-end", "0.05", "--out"])
        .arg(dir.path().join("r.csv"))
        .arg("--weights")
        .arg(&weights)
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn exit_codes() {
    assert_eq!(blendfv().args(["run", "--scheme", "weno"]).status().unwrap().code(), Some(2));
    assert_eq!(blendfv().args(["frobnicate"]).status().unwrap().code(), Some(2));
    let missing = blendfv().args(["train", "--data", "/nonexistent/d.csv", "--out", "/tmp/w.json"]).status().unwrap();
    assert_eq!(missing.code(), Some(4));
    assert_eq!(blendfv().args(["run", "--cfl", "0.9", "--out", "/dev/null"]).status().unwrap().code(), Some(2));
    // An all-zero network never limits, and the pure high-order scheme
    // loses positivity behind the shock.
    let dir = tempfile::tempdir().unwrap();
    let zero = dir.path().join("zero.json");
    blendfv::MlpModel::zeros(&blendfv::nn::NETWORK_DIMS).unwrap().save(&zero).unwrap();
    let broken = blendfv()
        .args(["run", "--scheme", "ddlft", "--out", "/dev/null", "--weights"])
        .arg(&zero)
        .status()
        .unwrap();
    assert_eq!(broken.code(), Some(3));
}

#[test]
fn entropy_report_lists_every_cell() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.csv");
    let status = blendfv()
        .args(["entropy-report", "--scheme", "delft", "--cells", "50", "--t-end", "0.05", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("step,time,cell,x,alpha_left,production"));
    assert_eq!((text.lines().count() - 1) % 50, 0);
}
