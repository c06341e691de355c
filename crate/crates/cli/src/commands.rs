use std::cmp::Ordering;
use std::fmt::Display;

use microcalc::analysis::{
    classify_uniform, derivative_st, euler_cosine, microcontinuity_at, sum_theorem_diagonal, DomainSpec, MicroOptions,
    MicroOutcome, ProbeEntry, ProbePoint, Refutation, SeriesOptions, SumOptions, SumTheoremReport,
};
use microcalc::dual::derivative_dual;
use microcalc::expr::{eval, parse, parse_with_vars, ScalarBackend};
use microcalc::germ::{cauchy_order, germ_compare, germ_limit, Germ, Limit, OrderOptions};
use microcalc::levicivita::{parse_lc, LcClass};
use microcalc::numeric::{Rational, Scalar};
use microcalc::{Error, Grade, Result, Witness};
use serde_json::{json, Map, Value};

use crate::config::Config;
use crate::Command;

pub type Fields = Map<String, Value>;

fn text(x: impl Display) -> Value {
    Value::String(x.to_string())
}

fn real(x: f64) -> Value {
    Value::String(if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "infinity" } else { "-infinity" }.into()
    } else {
        format!("{x:?}")
    })
}

fn witness(w: &Witness) -> Value {
    Value::Array(
        w.samples
            .iter()
            .map(|(n, v)| json!({ "n": text(n), "value": real(*v) }))
            .collect(),
    )
}

fn constant(text: &str) -> Result<Scalar> {
    let e = parse(text)?;
    if !e.variables().is_empty() {
        return Err(Error::usage(format!("expected a constant, got {text:?}")));
    }
    eval(&e, &ScalarBackend::default(), &[])
}

fn series_options(c: &Config) -> SeriesOptions {
    SeriesOptions {
        trunc: c.trunc(),
        precision: c.precision,
    }
}

fn micro_options(c: &Config) -> MicroOptions {
    MicroOptions {
        series: series_options(c),
        schedule: c.schedule(),
        ..MicroOptions::default()
    }
}

pub fn run(cmd: &Command, c: &Config) -> Result<Fields> {
    let mut out = Fields::new();
    match cmd {
        Command::Order { expr, var } => {
            let e = parse_with_vars(expr, &[var.as_str()])?;
            let opts = OrderOptions {
                r_max: Rational::from_integer(c.r_max),
                schedule: c.schedule(),
                ..OrderOptions::default()
            };
            let r = cauchy_order(&e, var, &opts);
            out.insert("expr".into(), text(expr));
            out.insert("order".into(), r.order.map_or(text("unknown"), text));
            out.insert("grade".into(), text(r.grade));
            out.insert(
                "bracket".into(),
                r.bracket.map_or(Value::Null, |(lo, hi)| json!([text(lo), text(hi)])),
            );
            out.insert("iterations".into(), text(r.iterations));
            out.insert("non_regular".into(), Value::Bool(r.non_regular));
            out.insert("note".into(), r.note.map_or(Value::Null, Value::String));
        }
        Command::St { lc } => {
            let x = parse_lc(lc, &c.trunc(), c.precision)?;
            out.insert("lc".into(), text(&x));
            out.insert(
                "class".into(),
                text(match x.class() {
                    LcClass::Zero => "zero",
                    LcClass::Infinitesimal => "infinitesimal",
                    LcClass::AppreciableFinite => "appreciable",
                    LcClass::Infinite => "infinite",
                }),
            );
            out.insert("standard_part".into(), text(x.standard_part()?));
            out.insert("order".into(), x.order().map_or(text("undefined"), text));
        }
        Command::Deriv { expr, at, method } => {
            let e = parse(expr)?;
            let x0 = constant(at)?;
            out.insert("expr".into(), text(expr));
            out.insert("at".into(), text(&x0));
            out.insert("method".into(), text(method));
            let lc = (method != "dual").then(|| derivative_st(&e, &x0, &series_options(c)));
            let dual = (method != "lc").then(|| derivative_dual(&e, &x0, c.precision));
            let mut differentiable = true;
            for (key, result) in [("lc", &lc), ("dual", &dual)] {
                match result {
                    None => {}
                    Some(Ok(v)) => {
                        out.insert(key.into(), text(v));
                    }
                    Some(Err(Error::NonDifferentiable { reason, .. })) => {
                        differentiable = false;
                        out.insert(key.into(), Value::Null);
                        out.insert(format!("{key}_reason"), text(reason));
                    }
                    Some(Err(e)) => return Err(e.clone()),
                }
            }
            out.insert("differentiable".into(), Value::Bool(differentiable));
            if let (Some(Ok(a)), Some(Ok(b))) = (&lc, &dual) {
                out.insert("agree".into(), Value::Bool(a == b));
            }
        }
        Command::Microcont { expr, probe, domain } => {
            let e = parse(expr)?;
            let p = ProbePoint::parse(probe)?;
            let d = domain.as_deref().map(DomainSpec::parse).transpose()?;
            let v = microcontinuity_at(&e, &p, d.as_ref(), &micro_options(c))?;
            out.insert("expr".into(), text(expr));
            out.insert("probe".into(), text(&p));
            let (verdict, refutation) = match &v.outcome {
                MicroOutcome::Microcontinuous => ("microcontinuous", None),
                MicroOutcome::Refuted(r) => ("refuted", Some(r.as_ref())),
                MicroOutcome::Unknown => ("unknown", None),
            };
            out.insert("verdict".into(), text(verdict));
            out.insert("witness".into(), refutation.map_or(Value::Null, refutation_json));
            out.insert("probes".into(), probes_json(&v.log));
        }
        Command::Uniform { expr, domain, grid } => {
            let e = parse(expr)?;
            let d = DomainSpec::parse(domain)?;
            let r = classify_uniform(&e, &d, *grid, &micro_options(c))?;
            out.insert("expr".into(), text(expr));
            out.insert("domain".into(), text(&d));
            out.insert("grid".into(), text(grid));
            out.insert("class".into(), text(r.class));
            out.insert("witness".into(), r.refutation.as_ref().map_or(Value::Null, refutation_json));
            out.insert("probes".into(), probes_json(&r.log));
        }
        Command::Sumthm { term, xseq } => {
            let e = parse_with_vars(term, &["k", "x"])?;
            let g = Germ::parse(xseq)?;
            let mut opts = SumOptions::default();
            if let Some(h) = &c.horizons {
                opts.horizons = h.clone();
            }
            let r = sum_theorem_diagonal(&e, &g, &opts)?;
            out.insert("term".into(), text(term));
            out.insert("xseq".into(), text(xseq));
            sumthm_fields(&r, &mut out);
        }
        Command::Euler { v, kmax, horizon } => {
            let v = constant(v)?;
            let r = euler_cosine(&v, *kmax, *horizon)?;
            out.insert("v".into(), text(&r.v));
            out.insert("horizon".into(), text(r.horizon));
            out.insert(
                "terms".into(),
                Value::Array(
                    r.terms
                        .iter()
                        .map(|t| {
                            json!({
                                "k": text(t.k),
                                "value": text(&t.value),
                                "target": text(&t.target),
                                "error": real((t.value.to_f64() - t.target.to_f64()).abs()),
                            })
                        })
                        .collect(),
                ),
            );
            out.insert("partial_sum".into(), text(&r.partial_sum));
            out.insert("cosine".into(), text(&r.cosine));
            out.insert(
                "error".into(),
                real((r.partial_sum.to_f64() - r.cosine.to_f64()).abs()),
            );
        }
        Command::Compare { lhs, rhs } => {
            let (a, b) = (Germ::parse(lhs)?, Germ::parse(rhs)?);
            let v = germ_compare(&a, &b, &c.schedule());
            out.insert("lhs".into(), text(lhs));
            out.insert("rhs".into(), text(rhs));
            let ordering = match v.answer {
                Some(Ordering::Less) => "less",
                Some(Ordering::Equal) => "equal",
                Some(Ordering::Greater) => "greater",
                None => "unknown",
            };
            out.insert("ordering".into(), text(ordering));
            out.insert("grade".into(), grade(v.answer.is_some(), v.grade));
            out.insert("witness".into(), witness(&v.witness));
            out.insert("note".into(), v.witness.note.clone().map_or(Value::Null, Value::String));
        }
        Command::Limit { germ } => {
            let g = Germ::parse(germ)?;
            let v = germ_limit(&g, &c.schedule());
            out.insert("germ".into(), text(germ));
            out.insert(
                "limit".into(),
                match &v.answer {
                    Some(Limit::Finite(s)) => text(s),
                    Some(l) => text(l),
                    None => text("unknown"),
                },
            );
            out.insert("grade".into(), grade(v.answer.is_some(), v.grade));
            out.insert("witness".into(), witness(&v.witness));
            out.insert("note".into(), v.witness.note.clone().map_or(Value::Null, Value::String));
        }
    }
    Ok(out)
}

fn grade(decided: bool, g: Grade) -> Value {
    if decided { text(g) } else { Value::Null }
}

fn limit_json(l: &Limit) -> Value {
    text(l)
}

fn refutation_json(r: &Refutation) -> Value {
    json!({
        "probe": text(&r.probe),
        "family": text(r.family),
        "x": text(&r.x),
        "x_prime": text(&r.x_prime),
        "gap": r.gap.as_ref().map_or(Value::Null, limit_json),
        "certificate": text(&r.certificate),
        "resample": r.resample.map_or(Value::Null, |(n, v)| json!({ "n": text(n), "value": real(v) })),
    })
}

fn probes_json(log: &[ProbeEntry]) -> Value {
    Value::Array(
        log.iter()
            .map(|e| {
                json!({
                    "probe": text(&e.probe),
                    "status": text(e.status),
                    "delta_order": e.delta_order.as_ref().map_or(Value::Null, text),
                    "detail": text(&e.detail),
                })
            })
            .collect(),
    )
}

fn sumthm_fields(r: &SumTheoremReport, out: &mut Fields) {
    out.insert(
        "diagonal".into(),
        Value::Array(
            r.diagonal
                .iter()
                .map(|p| {
                    json!({
                        "n": text(p.n),
                        "x": real(p.x),
                        "remainder": real(p.tail.value),
                        "terms": text(p.tail.terms),
                        "capped": p.tail.capped,
                    })
                })
                .collect(),
        ),
    );
    out.insert("null".into(), r.null.answer.map_or(Value::Null, Value::Bool));
    out.insert("null_grade".into(), grade(r.null.answer.is_some(), r.null.grade));
    out.insert("diagonal_limit".into(), r.limit.map_or(Value::Null, |(l, _)| real(l)));
    out.insert("limit_error".into(), r.limit.map_or(Value::Null, |(_, e)| real(e)));
    out.insert(
        "pointwise".into(),
        Value::Array(
            r.pointwise
                .iter()
                .map(|(x, t)| json!({ "x": real(*x), "remainder": real(t.value), "capped": t.capped }))
                .collect(),
        ),
    );
    out.insert("verdict1821".into(), text(r.verdict1821));
    out.insert("verdict1853".into(), text(r.verdict1853));
    out.insert("notes".into(), json!(r.notes));
}
