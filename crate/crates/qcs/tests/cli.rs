use std::process::Command;

use qcs::cli::run_with;
use qcs::LaurentPoly;

fn fx(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qcs").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn expand_prints_canonical_polynomial() {
    let (code, out, _) = run(&["expand", &fx("mobius4.qcs"), "--curve=alpha"]);
    assert_eq!(code, 0);
    let p = LaurentPoly::parse(out.trim()).unwrap();
    assert_eq!(p.canonical_string(), out.trim());
    assert_eq!(p.len(), 6);
}

#[test]
fn verify_reports_agreement() {
    let (code, out, _) = run(&["verify", &fx("annulus.qcs"), "--curve=gamma"]);
    assert_eq!(code, 0);
    assert_eq!(out, "gamma: OK: methods agree\n");
}

#[test]
fn skein_exit_codes() {
    assert_eq!(run(&["skein", &fx("mobius4.qcs")]).0, 0);
    assert_eq!(run(&["skein", &fx("m2.qcs")]).0, 0);
    let (code, out, _) = run(&["skein", &fx("negative_control.qcs")]);
    assert_eq!(code, 1);
    assert!(out.contains("residual"));
}

#[test]
fn input_errors_exit_two_with_location() {
    let dir = std::env::temp_dir().join(format!("qcs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.qcs");
    std::fs::write(&bad, "lamination p=+1\ncurve g kind=spiral\nend\n").unwrap();
    let (code, _, err) = run(&["expand", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("bad.qcs:2:9"), "{err}");
    assert_eq!(run(&["expand", "/nonexistent.qcs"]).0, 2);
    assert_eq!(run(&["expand", &fx("mobius4.qcs"), "--mode=weird"]).0, 2);
    assert_eq!(run(&["bogus"]).0, 2);
    assert_eq!(run(&["matchings", &fx("m2.qcs")]).0, 2);
}

#[test]
fn json_outputs_parse() {
    for args in [
        vec!["expand", "--json"],
        vec!["matchings", "--json", "--curve=alpha"],
        vec!["mpath", "--json", "--curve=alpha", "--mode=sqrt"],
        vec!["verify", "--json"],
        vec!["skein", "--json"],
    ] {
        let mut a = args.clone();
        let path = fx("mobius4.qcs");
        a.insert(1, &path);
        let (code, out, err) = run(&a);
        assert_eq!(code, 0, "{args:?}: {err}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.is_object());
    }
    let (_, out, _) = run(&["expand", &fx("mobius4.qcs"), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let alpha = v["expansions"]["alpha"].as_str().unwrap();
    assert_eq!(LaurentPoly::parse(alpha).unwrap().canonical_string(), alpha);
}

#[test]
fn output_is_identical_across_runs_and_threads() {
    let path = fx("annulus.qcs");
    let one = run(&["matchings", &path, "--threads=1"]).1;
    let four = run(&["matchings", &path, "--threads=4"]).1;
    assert_eq!(one, four);
    assert_eq!(one, run(&["matchings", &path]).1);
    let dot = run(&["matchings", &path, "--dot"]).1;
    assert!(dot.starts_with("graph \"gamma\" {"));
    assert_eq!(dot, run(&["matchings", &path, "--dot", "--threads=3"]).1);
}

#[test]
fn mpath_lists_every_step() {
    let (code, out, _) = run(&["mpath", &fx("mobius4.qcs")]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("product =").count(), 13);
    assert!(out.contains("type3' z right"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_qcs");
    let ok = Command::new(bin).args(["verify", &fx("mobius4.qcs")]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let fail = Command::new(bin).args(["skein", &fx("negative_control.qcs")]).output().unwrap();
    assert_eq!(fail.status.code(), Some(1));
    let bad = Command::new(bin).args(["expand", "missing.qcs"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
