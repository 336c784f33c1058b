use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use phicalc::index_algebra::IndexSet;
use phicalc::split::ParametrixReport;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn phicalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phicalc")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Re-parsing emitted JSON and serializing it again reproduces the bytes.
fn assert_round_trip(file: &Path) {
    let text = std::fs::read_to_string(file).unwrap();
    let v: serde_json::Value = phicalc::json::parse_str(&text, "out").unwrap();
    assert_eq!(phicalc::json::to_canonical_string(&v).unwrap(), text);
}

#[test]
fn idx_union_writes_the_extended_union() {
    let out = scratch("union.json");
    let o = phicalc(&["idx", "union", path(&data("zero.json")), path(&data("one.json")), "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let set: IndexSet = phicalc::json::read_file(&out).unwrap();
    assert_eq!(set, IndexSet::real(0.0).extended_union(&IndexSet::real(1.0)));
    assert_round_trip(&out);
}

#[test]
fn parametrix_report_passes_for_gauss_bonnet_data() {
    let out = scratch("gb_report.json");
    let o = phicalc(&["parametrix", "--op", path(&data("gb.json")), "--alpha", "0.5", "--report", path(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep: ParametrixReport = phicalc::json::read_file(&out).unwrap();
    assert!(rep.pass && rep.steps().all(|s| s.pass));
    assert_round_trip(&out);

    let gated = phicalc(&["parametrix", "--op", path(&data("gb.json")), "--alpha", "0", "--report", path(&scratch("gated.json"))]);
    assert_eq!(code(&gated), 1);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let runs: Vec<(&str, Vec<String>)> = vec![
        ("imspec", vec!["imspec".into(), "--model".into(), path(&data("torus11.json")).into()]),
        ("verify", vec!["verify".into(), "--model".into(), path(&data("torus11.json")).into()]),
        ("laplacian", vec!["parametrix".into(), "--op".into(), path(&data("laplacian.json")).into(), "--alpha".into(), "1.3".into()]),
    ];
    for (name, args) in runs {
        let mut outputs = Vec::new();
        for i in 0..2 {
            let out = scratch(&format!("{name}-{i}.json"));
            let mut a: Vec<&str> = args.iter().map(String::as_str).collect();
            a.extend(["--out", path(&out)]);
            assert_eq!(code(&phicalc(&a)), 0, "{name}");
            assert_round_trip(&out);
            outputs.push(std::fs::read(&out).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{name} output differs between runs");
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_phicalc"))
            .args(["verify", "--model", path(&data("torus11.json"))])
            .env("PHICALC_THREADS", threads)
            .output()
            .unwrap()
    };
    let (one, four) = (run("1"), run("4"));
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(code(&run("zero")), 2);
}

#[test]
fn malformed_json_is_a_usage_error_with_position() {
    let bad = scratch("bad.json");
    std::fs::write(&bad, "{\"a\": 1,\n  \"base\": [}\n").unwrap();
    let o = phicalc(&["gap", "--model", path(&bad)]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json:2:12"), "{err}");
}

#[test]
fn usage_errors_and_failed_checks_have_distinct_codes() {
    assert_eq!(code(&phicalc(&["frobnicate"])), 2);
    assert_eq!(code(&phicalc(&["imspec"])), 2);
    assert_eq!(code(&phicalc(&["gap", "--model", path(&data("torus11.json")), "--tol", "-1"])), 2);
    assert_eq!(code(&phicalc(&["gap", "--model", path(&data("torus11.json")), "--tol", "1e-30"])), 1);
    assert_eq!(code(&phicalc(&["gap", "--model", path(&data("torus11.json"))])), 0);
    assert_eq!(code(&phicalc(&["--help"])), 0);
}

#[test]
fn csv_outputs_follow_the_extension() {
    let spec = scratch("spectrum.csv");
    assert_eq!(code(&phicalc(&["imspec", "--model", path(&data("torus11.json")), "--out", path(&spec)])), 0);
    assert!(std::fs::read_to_string(&spec).unwrap().starts_with("mode,lambda_root,pole_order_k"));
    let fits = scratch("fits.csv");
    assert_eq!(code(&phicalc(&["verify", "--model", path(&data("torus11.json")), "--out", path(&fits)])), 0);
    assert!(std::fs::read_to_string(&fits).unwrap().starts_with("mode,exponent,log_power,residual,superpoly"));
    let sol = scratch("sol.csv");
    assert_eq!(code(&phicalc(&["solve", "--model", path(&data("torus11.json")), "--base", "1", "--out", path(&sol)])), 0);
    assert!(std::fs::read_to_string(&sol).unwrap().starts_with("x,u"));
    assert_eq!(code(&phicalc(&["gap", "--model", path(&data("torus11.json")), "--out", path(&scratch("gap.csv"))])), 2);
}

#[test]
fn verify_paper_passes_on_the_reference_model() {
    let out = scratch("suite.json");
    let o = phicalc(&["verify-paper", "--model", path(&data("torus11.json")), "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep: phicalc::cli::SuiteReport = phicalc::json::read_file(&out).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.checks.len(), 6);
    assert_round_trip(&out);
}

#[test]
fn compose_and_lift_run_on_class_files() {
    let out = scratch("compose.json");
    let c = data("phi_weight.json");
    assert_eq!(code(&phicalc(&["compose", path(&c), path(&c), "--a", "1", "--out", path(&out)])), 0);
    assert_round_trip(&out);
    assert_eq!(code(&phicalc(&["lift", path(&data("b_family.json")), "--a", "2", "--out", path(&scratch("lift.json"))])), 0);
    assert_eq!(code(&phicalc(&["lift", path(&c), "--a", "2"])), 2);
}
