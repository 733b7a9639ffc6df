mod common;

use std::collections::BTreeSet;

use common::network_path;
use crn_siphons::cli::{parse_c0_list, run_with, CliError, EXIT_BUDGET, EXIT_INVARIANT, EXIT_OK, EXIT_PARSE, EXIT_USAGE};
use crn_siphons::relevance::RelevanceError;
use crn_siphons::set::IndexSet;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("siphons").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = run(args);
    assert_eq!(code, EXIT_OK, "{args:?}: {err}");
    out
}

fn path(name: &str) -> String {
    network_path(name)
}

fn write_temp(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("crn-siphons-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn lists_minimal_siphons() {
    assert_eq!(ok(&["siphons", &path("receptor_ligand.crn")]), "A B E\nA C E\nC D E\n");
    assert_eq!(ok(&["siphons", "--brute-force", &path("receptor_ligand.crn")]), "A B E\nA C E\nC D E\n");
}

#[test]
fn counts_the_long_chain() {
    let out = ok(&["siphons", "--count-only", "--histogram", &path("chain50.crn")]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("total 1221537"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0], "25 26");
    assert_eq!(rows[8], "33 18");
}

#[test]
fn parse_echoes_canonical_text() {
    let out = ok(&["parse", &path("enzyme_inhibitor.crn")]);
    assert!(out.starts_with("species S, E, Q, P, I, R\n"));
    assert_eq!(out.lines().count(), 7);
    let again = write_temp("echo.crn", &out);
    assert_eq!(ok(&["parse", &again]), out);
}

#[test]
fn analyze_json_at_all_ones() {
    let out = ok(&["analyze", "--c0", "1,1,1,1,1", &path("receptor_ligand.crn")]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema_version"], 1);
    let members = |pred: &dyn Fn(&Value) -> bool| -> BTreeSet<String> {
        v["minimal_siphons"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|s| pred(s))
            .map(|s| {
                let m: Vec<&str> = s["members"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
                m.join(" ")
            })
            .collect()
    };
    assert_eq!(
        members(&|s| s["relevant"] == true),
        BTreeSet::from(["A B E".to_string(), "A C E".to_string()])
    );
    assert_eq!(members(&|s| s["c0_relevant"] == true), BTreeSet::from(["A C E".to_string()]));
    assert_eq!(v["c0"], serde_json::json!(["1", "1", "1", "1", "1"]));
    assert!(v.get("timing").is_none());
    assert_eq!(v["verdicts"]["all_non_relevant"], false);
}

#[test]
fn analyze_is_deterministic() {
    let args = ["analyze", "--c0", "1/10,1/10,1,1/10,1/10", &path("receptor_ligand.crn")];
    assert_eq!(ok(&args), ok(&args));
    let text = ["analyze", "--format", "text", &path("futile_cycle.crn")];
    let out = ok(&text);
    assert_eq!(out, ok(&text));
    assert!(out.contains("certificate: "));
}

#[test]
fn analyze_with_symmetries_reports_orbits() {
    let out = ok(&["analyze", "--symmetry", &path("minors5x5.sym"), &path("minors5x5.crn")]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let orbits = v["orbits"].as_array().unwrap();
    let covered: usize = orbits.iter().map(|o| o.as_array().unwrap().len()).sum();
    assert_eq!(covered, v["minimal_siphons"].as_array().unwrap().len());
}

#[test]
fn timing_is_opt_in() {
    let out = ok(&["analyze", "--timing", &path("receptor_ligand.crn")]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["timing"]["total_ms"].is_number());
}

#[test]
fn facets_vertices_and_face_dimension() {
    let facets = ok(&["facets", &path("receptor_ligand.crn")]);
    assert!(facets.contains("complement A B D E"));
    assert!(facets.contains("complement C D E"));
    let vertices = ok(&["vertices", "--c0", "1,1,1,1,1", &path("receptor_ligand.crn")]);
    let got: BTreeSet<&str> = vertices.lines().collect();
    assert_eq!(got, BTreeSet::from(["E", "A C", "A D", "B C", "B D"]));
    let assigned = ok(&[
        "vertices", "--assign", "A=1", "--assign", "B=1", "--assign", "C=1", "--assign", "D=1", "--assign", "E=1",
        &path("receptor_ligand.crn"),
    ]);
    assert_eq!(assigned, vertices);
    assert_eq!(ok(&["face-dim", "--c0", "1,1,1,1,1", "--siphon", "A C E", &path("receptor_ligand.crn")]), "0\n");
    assert_eq!(ok(&["face-dim", "--c0", "1,1,1,1,1", "--siphon", "A B E", &path("receptor_ligand.crn")]), "empty\n");
}

#[test]
fn relevance_over_samples() {
    let out = ok(&["relevance", "--omega", &path("receptor_ligand.omega"), &path("receptor_ligand.crn")]);
    assert!(out.contains("A B E: relevant"));
    assert!(out.contains("A C E: relevant"));
    assert!(out.contains("C D E: not relevant"));
    let global = ok(&["relevance", &path("receptor_ligand.crn")]);
    assert!(global.contains("C D E: not relevant (law 0 0 1 1 1)"));
    let enzyme = ok(&["relevance", &path("enzyme_inhibitor.crn")]);
    assert!(!enzyme.contains(": relevant"));
}

#[test]
fn ode_and_invariance() {
    let ode = ok(&["ode", "--kappa", &path("receptor_ligand.kappa"), &path("receptor_ligand.crn")]);
    assert_eq!(ode.lines().count(), 5);
    assert!(ode.starts_with("dA/dt = "));
    let inv = ok(&["invariance-check", "--siphon", "A,B,E", "--seed", "3", &path("receptor_ligand.crn")]);
    assert!(inv.contains("pass"));
    assert_eq!(inv, ok(&["invariance-check", "--siphon", "A,B,E", "--seed", "3", &path("receptor_ligand.crn")]));
    let steady = ok(&["invariance-check", "--steady", "--siphon", "A B E", &path("receptor_ligand.crn")]);
    assert!(steady.contains("pass"));
}

#[test]
fn exports_macaulay_scripts() {
    let ig = ok(&["export-cas", &path("receptor_ligand.crn")]);
    assert!(ig.contains("ringG = QQ[A,B,C,D,E];"));
    assert!(ig.contains("A^2*C*(A*D-A^2*C)"));
    let mg = ok(&["export-cas", "--flavor", "mg", &path("receptor_ligand.crn")]);
    assert!(mg.contains("idealG = ideal(A^2*C, A*D, E, B*C);"));
    let jg = ok(&["export-cas", "--flavor", "jg", "--lowercase", &path("enzyme_inhibitor.crn")]);
    assert!(jg.contains("ringG = QQ[s,e,q,p,i,r];"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).0, EXIT_OK);
    assert_eq!(run(&["bogus"]).0, EXIT_USAGE);
    assert_eq!(run(&["siphons"]).0, EXIT_USAGE);
    assert_eq!(run(&["vertices", "--c0", "0.1,1,1,1,1", &path("receptor_ligand.crn")]).0, EXIT_USAGE);
    assert_eq!(run(&["vertices", "--c0", "1,1", &path("receptor_ligand.crn")]).0, EXIT_USAGE);
    assert_eq!(run(&["invariance-check", "--siphon", "E", &path("receptor_ligand.crn")]).0, EXIT_USAGE);
    let bad = write_temp("bad.crn", "A + -> B\n");
    let (code, _, err) = run(&["siphons", &bad]);
    assert_eq!(code, EXIT_PARSE);
    assert!(err.contains("bad.crn"));
    assert_eq!(run(&["--budget-ms", "0", "siphons", &path("chain50.crn")]).0, EXIT_BUDGET);
    let disagreement: CliError = RelevanceError::RouteDisagreement(IndexSet::singleton(0)).into();
    assert_eq!(disagreement.exit_code(), EXIT_INVARIANT);
}

#[test]
fn c0_lists_are_exact() {
    assert_eq!(parse_c0_list("1/10, 2, 3/4", 3).unwrap().len(), 3);
    assert!(parse_c0_list("0.5,1,1", 3).is_err());
    assert!(parse_c0_list("1,1", 3).is_err());
}
