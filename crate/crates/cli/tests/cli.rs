use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel).display().to_string()
}

fn run_in(cache: Option<&Path>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hocomp"));
    cmd.args(args).env_remove("HOCOMP_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("HOCOMP_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_in(None, args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Rank column of a homology table, by degree.
fn ranks(text: &str) -> Vec<(i32, usize)> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("degree"))
        .map(|l| {
            let mut w = l.split_whitespace();
            (w.next().unwrap().parse().unwrap(), w.next().unwrap().parse().unwrap())
        })
        .collect()
}

#[test]
fn quillen_homology_of_trivial_generator() {
    let o = run(&["tq", "--operad", "as", "--ring", "Q", "--algebra", "trivial:deg1", "--window", "0:6"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = ranks(&stdout(&o));
    assert_eq!(r.iter().find(|(d, _)| *d == 1).unwrap().1, 1);
    assert_eq!(r.iter().find(|(d, _)| *d == 0).unwrap().1, 0);
}

#[test]
fn convergence_of_free_commutative() {
    let o = run(&["verify", "convergence", "--operad", "com", "--ring", "Q", "--algebra", "free:deg2", "--Kmax", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "pass");
}

#[test]
fn acyclic_example_has_no_homology() {
    let o = run(&["homology", &data("complexes/acyclic.chain")]);
    assert_eq!(o.status.code(), Some(0));
    let r = ranks(&stdout(&o));
    assert!(!r.is_empty());
    assert!(r.iter().all(|&(_, k)| k == 0), "{r:?}");
    let p = run(&["homology", &data("complexes/projective_plane.chain"), "--window", "0:3", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&p.stdout).unwrap();
    assert_eq!(v["exact_through"], 3);
}

#[test]
fn exit_status_follows_verdict() {
    let fail = run(&["verify", "whitehead", "--map", &data("maps/free_to_trivial.json"), "--window", "0:4"]);
    assert_eq!(fail.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&fail.stdout).unwrap();
    assert_eq!(v["status"], "fail");
    let pass = run(&["verify", "whitehead", "--map", &data("maps/identity_free_as.json"), "--window", "0:4"]);
    assert_eq!(pass.status.code(), Some(0));
    let err = run(&["tq", "--algebra", "no/such/file.json"]);
    assert_eq!(err.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&err.stderr).contains("no/such/file.json"));
    let bad = run(&["tq", "--algebra", "trivial:deg1", "--window", "4:2"]);
    assert_ne!(bad.status.code(), Some(0));
}

#[test]
fn outputs_are_byte_identical() {
    let jobs: [&[&str]; 3] = [
        &["ss", "--algebra", "trivial:deg1", "--window", "0:4"],
        &["tower", "--operad", "com", "--algebra", &data("algebras/exterior_com.json"), "--window", "0:4", "--json"],
        &["pushout", &data("pushouts/kill_square.json"), "--window", "0:4", "--json"],
    ];
    for args in jobs {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn cache_hits_reproduce_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["circle", "--module", "tau:2", "--algebra", "free:deg1", "--window", "0:4"];
    let cold = run_in(Some(dir.path()), &args);
    let files: Vec<PathBuf> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 1);
    let warm = run_in(Some(dir.path()), &args);
    let none = run(&args);
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(cold.stdout, none.stdout);
    // A corrupt entry is ignored, not trusted.
    std::fs::write(&files[0], "garbage").unwrap();
    assert_eq!(run_in(Some(dir.path()), &args).stdout, cold.stdout);
}

#[test]
fn spectral_sequence_csv() {
    let o = run(&["ss", "--algebra", "free:deg1", "--window", "0:4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,s,t,rank,torsion"));
    assert!(text.lines().any(|l| l.starts_with("inf,")));
    let report = run(&["ss", "--format", "report", "--algebra", "free:deg1", "--window", "0:4"]);
    assert!(stdout(&report).contains("converges strongly: yes"));
}

#[test]
fn pushout_and_bar_dump() {
    let o = run(&["pushout", &data("pushouts/kill_square.json"), "--window", "0:4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("direct and filtered agree"));
    let b = run(&["bar-dump", "--algebra", "trivial:deg1", "--window", "0:2", "--json"]);
    assert_eq!(b.status.code(), Some(0), "{}", String::from_utf8_lossy(&b.stderr));
    let v: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    assert!(v["summary"].as_array().unwrap().len() >= 2);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("axioms.json");
    let o = run(&["verify", "axioms", "--operad", &data("operads/comNonunital.json"), "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["status"], "pass");
}

#[test]
fn algebra_axioms_checked_on_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    // (a·a)·a = b·a = 0 but a·(a·a) = a·b = c.
    let doc = r#"{"format": "algebra", "name": "bad", "ring": "Q", "operad": "assocNonunital", "kind": "product",
        "carrier": {"ring": "Q", "cells": [["a", 1], ["b", 2], ["c", 3]], "diff": []},
        "product": [{"a": 0, "b": 0, "value": [[1, 1]]}, {"a": 0, "b": 1, "value": [[2, 1]]}]}"#;
    std::fs::write(&path, doc).unwrap();
    let o = run(&["tq", "--algebra", path.to_str().unwrap(), "--window", "0:3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not associative"));
}
