use std::path::{Path, PathBuf};
use std::process::Command;

use gframekit::generators::{identity_frame, mercedes_benz};
use gframekit::gframe::{frame_operator_matrix, optimal_bounds};
use gframekit::io;
use gframekit::linalg::ComplexMatrix;
use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn run_in(dir: &Path, args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_gframekit"))
        .args(args)
        .current_dir(dir)
        .env_remove("GFRAMEKIT_TOL")
        .output()
        .unwrap();
    let code = out.status.code().unwrap();
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, report)
}

fn run(args: &[&str]) -> (i32, Value) {
    run_in(&fixtures(), args)
}

fn read_frame(path: &Path) -> gframekit::GFrame {
    io::parse_gframe(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn check_identity_reports_unit_bounds() {
    let (code, r) = run(&["check", "identity2.json"]);
    assert_eq!(code, 0);
    let c = &r["results"]["classification"];
    assert_eq!(c["is_frame"], true);
    assert_eq!(c["is_orthonormal"], true);
    assert_eq!(c["frame_bounds"]["lower"], 1.0);
    assert_eq!(c["frame_bounds"]["upper"], 1.0);
    assert_eq!(r["tolerances"]["frame"], 1e-10);
}

#[test]
fn check_report_snapshot() {
    let (code, mut r) = run(&["check", "partition_121.json"]);
    assert_eq!(code, 0);
    assert!(r["wall_time_ms"].as_f64().unwrap() >= 0.0);
    r.as_object_mut().unwrap().remove("wall_time_ms");
    let expected: Value = serde_json::from_str(
        &std::fs::read_to_string(
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/snapshots/check_partition_121.json"),
        )
        .unwrap(),
    )
    .unwrap();
    assert_eq!(r, expected);
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let (_, mut a) = run(&["exact", "redundant.json"]);
    let (_, mut b) = run(&["exact", "redundant.json", "--threads", "3"]);
    for r in [&mut a, &mut b] {
        let o = r.as_object_mut().unwrap();
        for key in ["wall_time_ms", "threads", "arguments"] {
            o.remove(key);
        }
    }
    assert_eq!(a, b);
}

#[test]
fn dual_of_identity_is_identity_and_mercedes_benz_scales() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.json");
    let input = fixtures().join("identity2.json");
    let (code, r) = run(&["dual", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["round_trip_exact"], true);
    assert_eq!(read_frame(&out), identity_frame(2));

    let input = fixtures().join("mercedes_benz.json");
    let (code, _) = run(&["dual", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let d = read_frame(&out);
    let expected = mercedes_benz().scale(2.0 / 3.0);
    for (a, b) in d.elements().iter().zip(expected.elements()) {
        assert!((&a.block - &b.block).max_abs() < 1e-15);
    }
}

#[test]
fn random_dual_verifies_after_reading_back() {
    let dir = tempfile::tempdir().unwrap();
    let frame = dir.path().join("f.json");
    let dual = dir.path().join("d.json");
    let (code, _) = run_in(
        dir.path(),
        &["gen", "random", "--dim", "5", "--dims", "2,3,2", "--seed", "11", "--conditioning", "20", "--out", "f.json"],
    );
    assert_eq!(code, 0);
    assert_eq!(run_in(dir.path(), &["dual", "f.json", "--out", "d.json"]).0, 0);
    let (code, r) = run_in(dir.path(), &["verify-pair", "f.json", "d.json"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["is_canonical"], true);
    assert!(r["results"]["dual_residual"]["value"].as_f64().unwrap() <= 1e-9);
    assert_eq!(r["inputs"].as_array().unwrap().len(), 2);
    assert!(frame.exists() && dual.exists());
}

#[test]
fn tight_output_is_parseval() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q.json");
    let (code, r) = run(&["tight", "redundant.json", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let s = frame_operator_matrix(&read_frame(&out));
    assert!((&s - &ComplexMatrix::identity(3)).max_abs() <= 1e-9);
    assert!(r["results"]["parseval_residual"]["within"].as_bool().unwrap());
}

#[test]
fn removal_from_orthonormal_functionals_certifies_incompleteness() {
    for (file, index) in [("identity2.json", "1"), ("padded_functionals.json", "2")] {
        let (code, r) = run(&["remove", file, "--index", index]);
        assert_eq!(code, 2);
        let v = &r["results"]["removal"];
        assert_eq!(v["verdict"], "not-g-complete");
        assert!(v["certificate"]["eigenvector"].is_array());
        assert!(r["results"]["certificate_residual"]["within"].as_bool().unwrap());
    }
    let (code, r) = run(&["remove", "redundant.json", "--index", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["removal"]["verdict"], "still-g-frame");
    assert!(r["results"]["removal"]["new_bounds"]["lower"].as_f64().unwrap() > 0.0);
}

#[test]
fn resolve_identity_has_one_exact_atom() {
    let (code, r) = run(&["resolve", "identity2.json", "--operator", "operator_identity2.json"]);
    assert_eq!(code, 0);
    let atoms = r["results"]["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 1);
    assert_eq!(atoms[0]["rank"], 2);
    assert_eq!(r["results"]["residual"]["value"], 0.0);
}

#[test]
fn splitting_constants_match_frame_bounds_and_scale_inversely() {
    let dir = tempfile::tempdir().unwrap();
    let write_forms = |c: f64| {
        let path = dir.path().join(format!("forms_{c}.json"));
        let f = mercedes_benz();
        let fam = gframekit::splitting::BilinearFormFamily::scaled_identity(
            &f,
            c,
            &gframekit::Tolerances::default(),
        )
        .unwrap();
        std::fs::write(&path, io::write_forms(&fam)).unwrap();
        path
    };
    let frame = fixtures().join("mercedes_benz.json");
    let b = optimal_bounds(&mercedes_benz()).unwrap();
    let mut lowers = Vec::new();
    for c in [1.0, 4.0] {
        let forms = write_forms(c);
        let (code, r) = run(&["splitting", frame.to_str().unwrap(), "--forms", forms.to_str().unwrap()]);
        assert_eq!(code, 0);
        let k = &r["results"]["sandwich"]["constants"];
        let (lo, hi) = (k["lower"].as_f64().unwrap(), k["upper"].as_f64().unwrap());
        if c == 1.0 {
            assert!((lo - 1.0 / b.upper).abs() <= 1e-12 && (hi - 1.0 / b.lower).abs() <= 1e-12);
        }
        lowers.push(lo);
    }
    assert!((lowers[1] / lowers[0] - 4.0).abs() <= 1e-12);
}

#[test]
fn gen_partition_gives_the_diagonal_example() {
    let (code, r) = run(&["bounds", "partition_121.json"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["spectrum"], serde_json::json!([1.0, 1.0, 2.0]));
    let f = read_frame(&fixtures().join("partition_121.json"));
    let s = frame_operator_matrix(&f);
    assert_eq!(s, ComplexMatrix::from_real_diag(&[1.0, 2.0, 1.0]));
}

#[test]
fn gen_is_deterministic_and_canonical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen", "gabor", "--length", "12", "--time-step", "3", "--freq-step", "4"];
    let a = Command::new(env!("CARGO_BIN_EXE_gframekit")).args(args).current_dir(dir.path()).output().unwrap();
    let b = Command::new(env!("CARGO_BIN_EXE_gframekit")).args(args).current_dir(dir.path()).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(io::write_gframe(&io::parse_gframe(&text).unwrap()), text);
    let (code, r) = run_in(
        dir.path(),
        &["gen", "grouped", "--dim", "6", "--group", "3", "--overlap", "1", "--seed", "2", "--out", "g.json"],
    );
    assert_eq!(code, 0);
    assert_eq!(r["results"]["spec"]["kind"], "grouped");
    assert_eq!(run_in(dir.path(), &["exact", "g.json"]).0, 0);
}

#[test]
fn induced_writes_a_vector_frame() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("vf.json");
    let (code, r) = run(&["induced", "partition_121.json", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["statuses_agree"], true);
    let vf = io::parse_vector_frame(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(vf.len(), 4);
}
