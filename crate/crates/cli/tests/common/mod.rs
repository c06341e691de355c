#![allow(dead_code)]

use std::process::{Command, Output};

use jsonschema::{Draft, JSONSchema};
use serde_json::Value;

pub fn microcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_microcalc"))
        .args(args)
        .env_remove("MICROCALC_CONFIG")
        .output()
        .expect("binary runs")
}

pub fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let out = microcalc(&all);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

pub fn schema() -> JSONSchema {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/output.schema.json")).unwrap();
    let value: Value = serde_json::from_str(&text).unwrap();
    JSONSchema::options().with_draft(Draft::Draft7).compile(&value).expect("schema compiles")
}

/// One invocation per subcommand, including undecided and non-differentiable outcomes.
pub const INVOCATIONS: &[&[&str]] = &[
    &["order", "--expr", "exp(-1/i)"],
    &["order", "--expr", "i^(3/2)"],
    &["st", "--lc", "3 + 5*eps - eps^2"],
    &["deriv", "--expr", "exp(x)", "--at", "1", "--method", "both"],
    &["deriv", "--expr", "abs(x)", "--at", "0"],
    &["microcont", "--expr", "sin(1/x)", "--probe", "boundary:0+"],
    &["microcont", "--expr", "x^2", "--probe", "standard:3"],
    &["uniform", "--expr", "x^2", "--domain", "[0,1]", "--grid", "11"],
    &["uniform", "--expr", "sin(1/x)", "--domain", "(0,1)"],
    &["sumthm", "--term", "1/(k*(k+1))", "--xseq", "1/n"],
    &["euler", "--v", "1", "--kmax", "4", "--horizon", "1000000"],
    &["compare", "--lhs", "n^(1/10)", "--rhs", "log(n)^3"],
    &["compare", "--lhs", "(-1)^n/n", "--rhs", "0"],
    &["limit", "--germ", "(n+1)/n"],
    &["limit", "--germ", "sin(n)"],
];
