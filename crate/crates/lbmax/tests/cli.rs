use std::path::Path;
use std::process::{Command, Output};

use lbmax::io::{parse_spectrum_csv, parse_sweep_csv};

fn lbmax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lbmax")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn sig4(x: f64) -> String {
    format!("{:.*}", (3 - x.abs().log10().floor() as i32).max(0) as usize, x)
}

#[test]
fn flat_torus_spectrum_rows() {
    let o = lbmax(&["spectrum", "flat-torus", "--a", "0.5", "--b", "0.8660254", "--k", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = parse_spectrum_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 9);
    let got: Vec<String> = rows[1..].iter().map(|r| sig4(r.normalized)).collect();
    assert_eq!(got, ["45.59", "45.59", "45.59", "45.59", "45.59", "45.59", "136.8", "136.8"]);
}

#[test]
fn analytic_sphere_and_single_row() {
    let o = lbmax(&["spectrum", "sphere", "--analytic", "--k", "3"]);
    let rows = parse_spectrum_csv(&stdout(&o)).unwrap();
    assert!(rows[1..].iter().all(|r| sig4(r.normalized) == "25.13"));
    let o = lbmax(&["spectrum", "flat-torus", "--a", "0", "--b", "1", "--k", "0"]);
    assert_eq!(stdout(&o), "k,lambda,Lambda,multiplicity_note\n0,0,0,constant\n");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["spectrum", "flat-torus", "--a", "0", "--b", "-1", "--k", "2"],
        vec!["spectrum", "flat-torus", "--a", "0", "--k", "2"],
        vec!["no-such-command"],
        vec!["optimize", "/nonexistent/config.json"],
    ] {
        let o = lbmax(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn help_exits_with_zero() {
    assert_eq!(lbmax(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_bounds = dir.path().join("bounds.json");
    std::fs::write(&bad_bounds, r#"{"experiment": "x", "surface": {"kind": "sphere", "subdivisions": 1}, "optim": {"omega_lo": 2.0, "omega_hi": 1.0}}"#).unwrap();
    let o = lbmax(&["optimize", bad_bounds.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("omega_lo"));
    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"experiment": "x", "surface": {"kind": "sphere", "subdivisions": 1}, "extra": 1}"#).unwrap();
    let o = lbmax(&["optimize", unknown.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown field"));
}

#[test]
fn numerical_failures_exit_with_one() {
    // a closed surface with a zero-area triangle
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.off");
    std::fs::write(&path, "OFF\n4 4 0\n0 0 0\n1 0 0\n2 0 0\n0 1 1\n3 0 1 2\n3 0 3 1\n3 1 3 2\n3 2 3 0\n").unwrap();
    let o = lbmax(&["spectrum", "mesh", path.to_str().unwrap(), "--k", "2"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn thread_cap_is_validated() {
    let run = |v: &str| Command::new(env!("CARGO_BIN_EXE_lbmax")).env("LBMAX_THREADS", v).args(["reference", "kissing-spheres", "--k", "2"]).output().unwrap();
    assert_eq!(run("0").status.code(), Some(2));
    assert_eq!(run("many").status.code(), Some(2));
    let o = run("2");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("kissing_spheres,2,50.2654824574"));
}

#[test]
fn project_point() {
    let o = lbmax(&["project", "point", "--theta", "3.141592653589793", "--phi", "0"]);
    assert_eq!(stdout(&o), "x,y\n2.82842712475,0\n");
}

#[test]
fn project_sphere_field_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let values = dir.path().join("v.csv");
    let text: String = (0..42).map(|i| format!("{}\n", 1.0 + i as f64)).collect();
    std::fs::write(&values, text).unwrap();
    let out = dir.path().join("s.svg");
    let o = lbmax(&["project", "sphere", values.to_str().unwrap(), "--subdivisions", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    roxmltree::Document::parse(&std::fs::read_to_string(out).unwrap()).unwrap();
    let o = lbmax(&["project", "sphere", values.to_str().unwrap(), "--subdivisions", "2", "--out", "/dev/null"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweeps_write_csv_and_heatmaps() {
    let dir = tempfile::tempdir().unwrap();
    let o = lbmax(&["sweep", "flat-torus", "--k", "1,4", "--na", "11", "--nb", "11", "--b-max", "2.5", "--svg-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows = parse_sweep_csv(&stdout(&o)).unwrap();
    assert!(rows.iter().any(|r| r.k == 4));
    let corner = rows.iter().find(|r| r.k == 1 && r.a == 0.5 && (r.b.unwrap() - 0.75f64.sqrt()).abs() < 1e-11).unwrap();
    assert_eq!(sig4(corner.normalized), "45.59");
    for k in [1, 4] {
        assert!(dir.path().join(format!("landscape_k{k}.svg")).is_file());
    }
    let o = lbmax(&["sweep", "embedded", "--k", "1", "--a-min", "1", "--a-max", "1", "--steps", "1"]);
    let rows = parse_sweep_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 1);
    assert!((rows[0].normalized - 23.2006).abs() < 1e-3);
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("run.json");
    std::fs::write(
        &path,
        r#"{
  "experiment": "cli",
  "surface": {"kind": "flat_torus", "a": 0.1, "b": 1.2, "n": 8, "solver": "dense"},
  "optim": {"k": 1, "max_outer": 1, "max_inner": 8, "snapshot_interval": 4},
  "init": {"kind": "gaussians", "count": 2, "width": 0.8, "amplitude": 0.5, "base": 1.0}
}"#,
    )
    .unwrap();
    path
}

#[test]
fn optimize_writes_reproducible_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let (o1, o2) = (dir.path().join("o1"), dir.path().join("o2"));
    for out in [&o1, &o2] {
        let o = lbmax(&["optimize", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("\"final_lambda_k\""));
    }
    for f in ["summary.json", "trace.csv", "omega.csv", "omega.svg"] {
        assert_eq!(std::fs::read(o1.join(f)).unwrap(), std::fs::read(o2.join(f)).unwrap(), "{f} differs");
    }
    assert!(std::fs::read_dir(o1.join("snapshots")).unwrap().count() >= 2);
}
