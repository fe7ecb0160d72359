use std::fs;
use std::path::{Path, PathBuf};

use migr_scatter::cli::run_command;
use migr_scatter::rsgf::read_field;
use migr_scatter::scatter::FarFieldSet;
use migr_scatter::GridSpec;

fn small() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/small.ini")
}

fn run(args: &[&str]) -> i32 {
    run_command(std::iter::once("migr").chain(args.iter().copied()))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_writes_a_readable_field() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("f.rsgf");
    let log = tmp.path().join("run.log");
    assert_eq!(run(&["synth", "--config", s(&small()), "--out", s(&out), "--log", s(&log)]), 0);
    let field = read_field(&out).unwrap().into_real().unwrap();
    assert_eq!(field.grid(), &GridSpec::centered_cube(16, 2.0).unwrap());
    assert!(field.data().iter().any(|&v| v != 0.0));
    let line = fs::read_to_string(&log).unwrap();
    assert!(line.contains("command=synth") && line.contains("seed=7") && line.contains("exit=0"));
    assert!(line.contains("config_sha256=") && line.contains("version="));
}

#[test]
fn sweep_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let log = tmp.path().join("run.log");
    for dir in [&a, &b] {
        assert_eq!(run(&["sweep", "--config", s(&small()), "--out", s(dir), "--log", s(&log)]), 0);
    }
    for file in ["manifest.txt", "farfield.csv"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file} differs");
    }
    let set = FarFieldSet::read(&a).unwrap();
    assert_eq!(set.dirs().len(), 8);
    assert_eq!(set.delta(), 0.25);
}

#[test]
fn recover_writes_report_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let sweep = tmp.path().join("sweep");
    let rec = tmp.path().join("rec");
    let log = tmp.path().join("run.log");
    assert_eq!(run(&["sweep", "--config", s(&small()), "--out", s(&sweep), "--log", s(&log)]), 0);
    let code = run(&["recover-source", "--config", s(&small()), "--data", s(&sweep), "--out", s(&rec), "--log", s(&log)]);
    assert_eq!(code, 0);
    for f in ["mu_rec.rsgf", "mu_rec_unclipped.rsgf", "mu_hat.csv", "summary.txt"] {
        assert!(rec.join(f).exists(), "missing {f}");
    }
    let summary = fs::read_to_string(rec.join("summary.txt")).unwrap();
    for key in ["kind=passive", "mode=full-sphere", "rel_l2_error=", "spectral_rel_error=", "seed=7"] {
        assert!(summary.contains(key), "summary lacks {key}");
    }
    let clipped = read_field(rec.join("mu_rec.rsgf")).unwrap().into_real().unwrap();
    assert!(clipped.data().iter().all(|&v| v >= 0.0));
}

#[test]
fn mesh_mismatch_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let sweep = tmp.path().join("sweep");
    let log = tmp.path().join("run.log");
    assert_eq!(run(&["sweep", "--config", s(&small()), "--out", s(&sweep), "--log", s(&log)]), 0);
    let text = fs::read_to_string(small()).unwrap().replace("delta = 0.25", "delta = 0.125");
    let cfg = tmp.path().join("other.ini");
    fs::write(&cfg, text).unwrap();
    let code = run(&["recover-source", "--config", s(&cfg), "--data", s(&sweep), "--out", s(&tmp.path().join("r")), "--log", s(&log)]);
    assert_eq!(code, 2);
    assert!(fs::read_to_string(&log).unwrap().lines().last().unwrap().contains("exit=2"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(small()).unwrap().replace("width = 0.1", "widht = 0.1");
    let cfg = tmp.path().join("typo.ini");
    fs::write(&cfg, text).unwrap();
    let log = tmp.path().join("run.log");
    assert_eq!(run(&["synth", "--config", s(&cfg), "--log", s(&log)]), 2);
}

#[test]
fn wrong_kind_of_data_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let sweep = tmp.path().join("sweep");
    let log = tmp.path().join("run.log");
    assert_eq!(run(&["sweep", "--config", s(&small()), "--out", s(&sweep), "--log", s(&log)]), 0);
    let code = run(&["recover-potential", "--config", s(&small()), "--data", s(&sweep), "--out", s(&tmp.path().join("r")), "--log", s(&log)]);
    assert_eq!(code, 2);
}

#[test]
fn nearfield_emits_one_row_per_point() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("nf.csv");
    let log = tmp.path().join("run.log");
    assert_eq!(run(&["nearfield", "--config", s(&small()), "--out", s(&out), "--log", s(&log)]), 0);
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,y,z,estimate,kernel_integral,ratio");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!(r[3] > 0.0 && r[4] > 0.0);
        assert!((r[5] - r[3] / r[4]).abs() <= 1e-12 * r[5]);
    }
}

#[test]
fn validate_filter_and_usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let log = tmp.path().join("run.log");
    let table = tmp.path().join("table.txt");
    assert_eq!(run(&["validate", "--filter", "rsgf", "--out", s(&table), "--log", s(&log)]), 0);
    assert!(fs::read_to_string(&table).unwrap().contains("PASS"));
    assert_eq!(run(&["validate", "--filter", "no-such-check", "--log", s(&log)]), 2);
    assert_eq!(run(&["sweep", "--log", s(&log)]), 2);
}

#[test]
fn synthetic_ergodic_diagnostic_writes_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("ergodic.csv");
    let log = tmp.path().join("run.log");
    let code = run(&["diagnose-ergodic", "--synthetic", "--bands", "4,8,16", "--reps", "20", "--out", s(&out), "--log", s(&log)]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 4);
}
