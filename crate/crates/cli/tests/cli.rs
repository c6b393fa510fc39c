use std::path::PathBuf;
use std::process::{Command, Output};

use atf_core::atf::Mutation;
use atf_core::hull::Distinction;
use atf_core::verify::Report;
use atf_core::{BaseDiagram, BoundaryHull, MarkovTriple, MutationPath, WeightedPolytope};

fn atf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atf"))
        .args(args)
        .env_remove("ATF_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_kind(o: &Output) -> String {
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).expect("JSON error on stderr");
    v["error"]["kind"].as_str().unwrap().to_string()
}

/// parse(print(x)) = x, compared through a second print.
fn round_trip<T: serde::de::DeserializeOwned + serde::Serialize>(line: &str) -> T {
    let v: T = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(serde_json::to_string(&v).unwrap(), line.trim());
    v
}

#[test]
fn enumerate_json_lines() {
    let out = stdout(&atf(&["markov", "enumerate", "--max-entry", "34"]));
    let ts: Vec<MarkovTriple> = out.lines().map(round_trip).collect();
    assert_eq!(ts.len(), 6);
    assert_eq!(ts[5], MarkovTriple::new(2, 5, 29).unwrap());
    let text = stdout(&atf(&["markov", "enumerate", "--max-entry", "5", "--format", "text"]));
    assert_eq!(text, "(1,1,1)\n(1,1,2)\n(1,2,5)\n");
}

#[test]
fn hull_compare_certificate() {
    let out = stdout(&atf(&["hull", "compare", "1,1,2", "1,2,5"]));
    assert_eq!(out, "{\"distinct\":true,\"certificate\":{\"lengths\":[[1,1,2],[1,2,5]]}}\n");
    let same: Distinction = round_trip(&stdout(&atf(&["hull", "compare", "1,2,5", "5,2,1"])));
    assert!(!same.distinct);
}

#[test]
fn verify_all_passes() {
    let out = stdout(&atf(&["verify", "all", "--max-entry", "100"]));
    assert!(out.lines().skip(2).all(|l| l.ends_with("PASS")), "{out}");
    let with_env = Command::new(env!("CARGO_BIN_EXE_atf"))
        .args(["verify", "all", "--max-entry", "100", "--format", "json"])
        .env("ATF_WORKERS", "3")
        .output()
        .unwrap();
    let report: Report = round_trip(&stdout(&with_env));
    assert!(report.passed());
    assert_eq!(report.triples, 7);
}

#[test]
fn exit_codes() {
    assert_eq!(error_kind(&atf(&["hull", "build", "1,1,3"])), "NotMarkov");
    assert_eq!(atf(&["hull", "build", "1,x,3"]).status.code(), Some(2));
    assert_eq!(atf(&["markov", "mutate", "1,2,5", "--slot", "d"]).status.code(), Some(2));
    assert_eq!(atf(&["verify", "all", "--max-entry", "10", "--workers", "0"]).status.code(), Some(2));
    assert_eq!(atf(&["frobnicate"]).status.code(), Some(2));
    let fiber = atf(&["atf", "slide", "--triple", "1,1,1", "--node", "0", "--cut-length", "1/3"]);
    assert_eq!(error_kind(&fiber), "SlideThroughFiber");
    let orbifold = atf(&["atf", "trade", "--triple", "1,2,5", "--vertex", "1"]);
    assert_eq!(error_kind(&orbifold), "NotSmoothCorner");
    assert_eq!(error_kind(&atf(&["atf", "transfer", "--input", "/nonexistent.json", "--node", "0", "--side", "left"])), "Io");
}

#[test]
fn unsorted_input_is_noted() {
    let o = atf(&["hull", "lengths", "5,1,2"]);
    assert_eq!(stdout(&o), "[\"1\",\"2\",\"5\"]\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("(1,2,5)"));
}

#[test]
fn json_round_trips() {
    let _: WeightedPolytope = round_trip(&stdout(&atf(&["polytope", "build", "2,5,29"])));
    let _: WeightedPolytope = round_trip(&stdout(&atf(&["polytope", "build", "1,2,5", "--shift", "-2"])));
    let h: BoundaryHull = round_trip(&stdout(&atf(&["hull", "build", "1,2,5"])));
    assert_eq!(h.provenance, MarkovTriple::new(1, 2, 5).unwrap());
    let p: MutationPath = round_trip(&stdout(&atf(&["markov", "reduce", "2,5,29"])));
    assert_eq!(p.len(), 3);
    let m: MarkovTriple = round_trip(&stdout(&atf(&["markov", "mutate", "1,2,5", "--slot", "c"])));
    assert_eq!(m, MarkovTriple::new(1, 2, 1).unwrap());
    let d: BaseDiagram = round_trip(&stdout(&atf(&["atf", "diagram", "1,2,5"])));
    assert_eq!(d.nodes.len(), 3);
    let mm: Mutation = round_trip(&stdout(&atf(&["atf", "mutate", "1,2,5", "--slot", "c"])));
    assert_eq!(mm.certificate.triple, MarkovTriple::new(1, 1, 2).unwrap());
}

#[test]
fn surgery_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = |n: &str| dir.path().join(n).to_string_lossy().into_owned();
    stdout(&atf(&["atf", "diagram", "1,1,2", "--out", &path("d.json")]));
    stdout(&atf(&["atf", "transfer", "--input", &path("d.json"), "--node", "0", "--side", "left", "--out", &path("t.json")]));
    let back = stdout(&atf(&["atf", "transfer", "--input", &path("t.json"), "--node", "0", "--side", "right"]));
    assert_eq!(back, std::fs::read_to_string(path("d.json")).unwrap());
    stdout(&atf(&["atf", "diagram", "1,1,1", "--toric", "--out", &path("toric.json")]));
    let traded: BaseDiagram =
        round_trip(&stdout(&atf(&["atf", "trade", "--input", &path("toric.json"), "--vertex", "2", "--cut-length", "1/5"])));
    assert_eq!(traded.nodes.len(), 1);
    stdout(&atf(&["render", "diagram", "--input", &path("t.json"), "--out", &path("t.svg")]));
    assert!(std::fs::read_to_string(path("t.svg")).unwrap().contains("stroke-dasharray"));
}

#[test]
fn chain_matches_golden() {
    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden/chain_1_2_5.svg");
    let first = atf(&["render", "chain", "1,2,5"]);
    let second = atf(&["render", "chain", "1,2,5"]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, std::fs::read(golden).unwrap());
}
