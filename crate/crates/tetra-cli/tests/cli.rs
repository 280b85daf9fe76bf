use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::tempdir;

fn tetra(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tetra")).args(args).current_dir(dir).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("report is not JSON ({e}); stderr: {}", String::from_utf8_lossy(&out.stderr)))
}

fn observed<'a>(rep: &'a Value, key: &str) -> &'a Value {
    &rep["counts"][key]["observed"]
}

fn strip_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings_ms");
    v
}

#[test]
fn sample_is_deterministic() {
    let d = tempdir().unwrap();
    let a = tetra(&["sample", "--seed", "1", "--count", "3", "--out", "a.json", "--report", "ra.json"], d.path());
    let b = tetra(&["sample", "--seed", "1", "--count", "3", "--out", "b.json", "--report", "rb.json"], d.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let fa = std::fs::read(d.path().join("a.json")).unwrap();
    assert_eq!(fa, std::fs::read(d.path().join("b.json")).unwrap());
    let v: Value = serde_json::from_slice(&fa).unwrap();
    assert_eq!(v["configs"].as_array().unwrap().len(), 3);

    let read = |p: &str| -> Value { serde_json::from_slice(&std::fs::read(d.path().join(p)).unwrap()).unwrap() };
    let (mut ra, rb) = (strip_timings(read("ra.json")), strip_timings(read("rb.json")));
    ra["artifacts"] = rb["artifacts"].clone();
    assert_eq!(ra, rb);

    let c = tetra(&["sample", "--seed", "2", "--count", "3", "--out", "c.json"], d.path());
    assert_eq!(c.status.code(), Some(0));
    assert_ne!(fa, std::fs::read(d.path().join("c.json")).unwrap());
}

#[test]
fn usage_errors_exit_two() {
    let d = tempdir().unwrap();
    for args in [
        vec!["sample", "--count", "0", "--out", "x.json"],
        vec!["verify", "--level", "w"],
        vec!["degenerate", "--seed", "1"],
        vec!["degenerate", "--weights", "1,2,3"],
        vec!["degenerate", "--target-split", "22,42"],
        vec!["certify", "--only-type", "XYZ"],
        vec!["export"],
        vec!["check", "--catalog", "missing.json"],
    ] {
        assert_eq!(tetra(&args, d.path()).status.code(), Some(2), "{args:?}");
    }
    std::fs::write(d.path().join("junk.json"), "[{\"type\": 1}]").unwrap();
    assert_eq!(tetra(&["check", "--catalog", "junk.json"], d.path()).status.code(), Some(2));
}

#[test]
fn verify_u_with_symbolic() {
    let d = tempdir().unwrap();
    let out = tetra(&["verify", "--level", "u", "--samples", "100", "--symbolic"], d.path());
    let rep = report(&out);
    assert_eq!(out.status.code(), Some(0), "{rep}");
    assert_eq!(observed(&rep, "points"), 100);
    assert_eq!(observed(&rep, "nonzero_evaluations"), 0);
    assert_eq!(observed(&rep, "jacobian_rank_18"), 10);
    assert_eq!(observed(&rep, "symbolic_identities"), 47);
}

#[test]
fn verify_z() {
    let d = tempdir().unwrap();
    let out = tetra(&["verify", "--level", "z", "--samples", "100", "--seed", "7"], d.path());
    let rep = report(&out);
    assert_eq!(out.status.code(), Some(0), "{rep}");
    assert_eq!(observed(&rep, "nonzero_evaluations"), 0);
    assert_eq!(observed(&rep, "jacobian_corank_3"), 10);
    assert_eq!(observed(&rep, "relations_by_family")["quartic"], 147);
}

#[test]
fn injected_fault_is_reported() {
    let d = tempdir().unwrap();
    for level in ["u", "z"] {
        let out = tetra(&["verify", "--level", level, "--samples", "3", "--inject-fault"], d.path());
        assert_eq!(out.status.code(), Some(1), "{level}");
        let rep = report(&out);
        let fails = rep["failures"].as_array().unwrap();
        assert!(!fails.is_empty());
        assert!(fails.iter().all(|f| f.as_str().unwrap().contains("point 0")), "{fails:?}");
    }
}

#[test]
fn export_formats() {
    let d = tempdir().unwrap();
    let out = tetra(&["export", "--gamma", "dot", "--relations", "txt"], d.path());
    assert_eq!(out.status.code(), Some(0));
    let dot = std::fs::read_to_string(d.path().join("gamma.dot")).unwrap();
    assert_eq!(dot.matches("subgraph").count(), 19);
    let txt = std::fs::read_to_string(d.path().join("relations_z.txt")).unwrap();
    assert_eq!(txt.lines().count(), 395);

    let out = tetra(&["export", "--gamma", "json", "--relations", "json", "--level", "u"], d.path());
    assert_eq!(out.status.code(), Some(0));
    let g: Value = serde_json::from_slice(&std::fs::read(d.path().join("gamma.json")).unwrap()).unwrap();
    assert_eq!(g["edges"], 72);
    assert_eq!(g["components"], 19);
    let r: Value = serde_json::from_slice(&std::fs::read(d.path().join("relations_u.json")).unwrap()).unwrap();
    assert_eq!(r.as_array().unwrap().len(), 47);

    let out = tetra(&["export", "--gamma", "dot", "--out-dir", "no/such/dir"], d.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_only_dde() {
    let d = tempdir().unwrap();
    let out = tetra(&["certify", "--only-type", "DDE"], d.path());
    let rep = report(&out);
    assert_eq!(out.status.code(), Some(0), "{rep}");
    assert_eq!(observed(&rep, "certificates"), 6);
    assert_eq!(observed(&rep, "smooth"), 6);
    assert_eq!(observed(&rep, "propagation_agrees"), 6);
}

/// One full certification, then replays and degenerations against the
/// written catalog.
#[test]
fn certify_check_and_degenerate() {
    let d = tempdir().unwrap();
    let out = tetra(&["certify", "--out", "catalog.json"], d.path());
    let rep = report(&out);
    assert_eq!(out.status.code(), Some(0), "{rep}");
    assert_eq!(observed(&rep, "isolated"), 66);
    assert_eq!(observed(&rep, "families"), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("66 isolated, 4 families, all smooth"));

    let ok = tetra(&["check", "--catalog", "catalog.json"], d.path());
    assert_eq!(ok.status.code(), Some(0), "{}", report(&ok));

    // Change one nonzero core value of the first representative.
    let mut cat: Value = serde_json::from_slice(&std::fs::read(d.path().join("catalog.json")).unwrap()).unwrap();
    let y = cat[0]["representatives"][0]["y"].as_object_mut().unwrap();
    let (_, face) =
        y.iter_mut().find(|(_, f)| f.as_object().unwrap().values().filter(|v| *v != "0").count() >= 2).unwrap();
    let (_, v) = face.as_object_mut().unwrap().iter_mut().filter(|(_, v)| *v != "0").nth(1).unwrap();
    *v = Value::String("7/3".into());
    std::fs::write(d.path().join("tampered.json"), serde_json::to_vec(&cat).unwrap()).unwrap();
    let bad = tetra(&["check", "--catalog", "tampered.json"], d.path());
    assert_eq!(bad.status.code(), Some(1));
    assert!(!report(&bad)["failures"].as_array().unwrap().is_empty());

    let out = tetra(&["degenerate", "--weights", "0,0,0,0", "--catalog", "catalog.json"], d.path());
    let rep = report(&out);
    assert_eq!(out.status.code(), Some(0), "{rep}");
    assert_eq!(observed(&rep, "limit_equals_seed"), true);
    assert!(observed(&rep, "catalog_match").is_null());

    // All lines collapse onto e1: n_1 = 1, so not split.
    let out = tetra(&["degenerate", "--weights=-1,0,0,0", "--catalog", "catalog.json"], d.path());
    let rep = report(&out);
    assert_eq!(out.status.code(), Some(0), "{rep}");
    assert_eq!(observed(&rep, "n_k")[0], 1);
    assert_eq!(observed(&rep, "split"), false);

    for (target, ty) in [("22,51,22", "DDE"), ("31,42,31", "CC*_nopD"), ("31,33,31", "CC*_opD")] {
        let out = tetra(
            &["degenerate", "--seed", "1", "--target-split", target, "--catalog", "catalog.json", "--out", "d.json"],
            d.path(),
        );
        let rep = report(&out);
        assert_eq!(out.status.code(), Some(0), "{rep}");
        assert_eq!(observed(&rep, "n_k"), &serde_json::json!([2, 2, 2]));
        assert_eq!(observed(&rep, "catalog_match")["type"], ty);
        let art: Value = serde_json::from_slice(&std::fs::read(d.path().join("d.json")).unwrap()).unwrap();
        assert_eq!(art["split_type"], target);
    }

    let out = tetra(
        &["degenerate", "--target-split", "22,42,22", "--max-trials", "2000", "--catalog", "catalog.json"],
        d.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(report(&out)["failures"][0].as_str().unwrap().contains("22,42,22"));
}
