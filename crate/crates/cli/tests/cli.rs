mod common;

use common::{json, microcalc, schema, INVOCATIONS};
use std::process::Command;

use serde_json::Value;

#[test]
fn every_subcommand_matches_the_schema() {
    let schema = schema();
    for args in INVOCATIONS {
        let v = json(args);
        if let Err(errors) = schema.validate(&v) {
            let msgs: Vec<String> = errors.map(|e| format!("{e} at {}", e.instance_path)).collect();
            panic!("{args:?}: {msgs:?}");
        }
        assert_eq!(v["command"], args[0]);
    }
}

#[test]
fn json_output_is_deterministic() {
    for args in [INVOCATIONS[0], INVOCATIONS[9], INVOCATIONS[11]] {
        let mut all = args.to_vec();
        all.push("--json");
        assert_eq!(microcalc(&all).stdout, microcalc(&all).stdout, "{args:?}");
    }
}

#[test]
fn text_and_json_report_the_same_fields() {
    for args in INVOCATIONS {
        let v = json(args);
        let out = microcalc(args);
        let text = String::from_utf8(out.stdout).unwrap();
        let lines: Vec<(&str, &str)> = text.lines().filter_map(|l| l.split_once(": ")).collect();
        let obj = v.as_object().unwrap();
        assert_eq!(lines.len(), obj.len(), "{args:?}");
        for (k, t) in lines {
            let expected = match &obj[k] {
                Value::String(s) => s.clone(),
                Value::Null => "none".into(),
                other if k == "config" => {
                    let mut c = other.clone();
                    c["output"] = "text".into();
                    c.to_string()
                }
                other => other.to_string(),
            };
            assert_eq!(t, expected, "{args:?} field {k}");
        }
    }
}

#[test]
fn documented_examples() {
    let v = json(&["order", "--expr", "exp(-1/i)"]);
    assert_eq!((v["order"].as_str(), v["grade"].as_str()), (Some("infinity"), Some("symbolic")));
    let out = microcalc(&["st", "--lc", "3 + 5*eps - eps^2"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("standard_part: 3\n"));
    let v = json(&["sumthm", "--term", "sin(k*x)/k", "--xseq", "1/n"]);
    assert_eq!(v["null"], Value::Bool(false));
    assert_eq!(v["verdict1853"], "violated");
    let limit: f64 = v["diagonal_limit"].as_str().unwrap().parse().unwrap();
    assert!((limit - 0.6247).abs() < 1e-3);
}

#[test]
fn exit_codes() {
    assert_eq!(microcalc(&["limit", "--germ", "sin(n)"]).status.code(), Some(0));
    assert_eq!(microcalc(&["order", "--bogus"]).status.code(), Some(2));
    assert_eq!(microcalc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(microcalc(&["st", "--lc", "3 +"]).status.code(), Some(2));
    assert_eq!(microcalc(&["limit", "--germ", "1/x"]).status.code(), Some(2));
    assert_eq!(microcalc(&["uniform", "--expr", "x", "--domain", "(1,0)"]).status.code(), Some(2));
    assert_eq!(microcalc(&["st", "--lc", "1/0"]).status.code(), Some(3));
    assert_eq!(microcalc(&["st", "--lc", "sin(1/eps)"]).status.code(), Some(3));
    let out = microcalc(&["st", "--lc", "3 +"]);
    assert!(String::from_utf8(out.stderr).unwrap().contains("offset 3"));
}

#[test]
fn config_file_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("microcalc.toml");
    std::fs::write(&path, "trunc = 12\noutput = \"json\"\nhorizons = [1024, 4096, 16384, 65536, 262144]\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_microcalc"))
        .args(["limit", "--germ", "(-1)^n/n"])
        .env("MICROCALC_CONFIG", &path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["trunc"], "12");
    assert_eq!(v["config"]["horizons"][0], "1024");
    assert_eq!(v["witness"].as_array().unwrap().len(), 5);

    std::fs::write(&path, "trunc = 1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_microcalc"))
        .args(["st", "--lc", "eps"])
        .env("MICROCALC_CONFIG", &path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
