//! Microcontinuity: does an infinitesimal change of the argument always
//! produce an infinitesimal change of the value?
//!
//! Standard points are settled in the Levi-Civita field. Boundary and
//! infinite points are attacked with witness pairs of germs `(x_n, x'_n)`
//! that are infinitely close; a pair whose gap `f(x_n) - f(x'_n)` is
//! certified non-null by the dominance rules refutes microcontinuity.

use std::fmt;

use rayon::prelude::*;

use super::derivative::{free_variable, SeriesOptions};
use super::domain::{DomainSpec, ProbePoint, Side};
use crate::error::{Error, Result};
use crate::expr::{eval, BinOp, Elementary, Expr};
use crate::germ::{germ_is_null, germ_limit, normalize, Germ, HorizonSchedule, Limit, INDEX};
use crate::levicivita::LeviCivita;
use crate::numeric::ExtOrder;

#[derive(Clone, Debug)]
pub struct MicroOptions {
    pub series: SeriesOptions,
    pub schedule: HorizonSchedule,
    /// Index at which a refuting gap is re-evaluated as a check.
    pub resample_horizon: u64,
}

impl Default for MicroOptions {
    fn default() -> Self {
        MicroOptions {
            series: SeriesOptions::default(),
            schedule: HorizonSchedule::default(),
            resample_horizon: 1 << 20,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `x` and `x + ε` in the series field.
    Increment,
    /// `u⁻¹(2πn)` and `u⁻¹(2πn + π/2)` for a trigonometric argument `u`.
    Oscillation,
    /// `n` against `n + 1/n` or `n + n^(-1/2)`.
    InfinitePoint,
    /// `a + 1/n` against `a + 2/n`.
    Boundary,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Increment => "increment",
            Family::Oscillation => "oscillation",
            Family::InfinitePoint => "infinite-point",
            Family::Boundary => "boundary",
        })
    }
}

/// A certified failure of microcontinuity.
#[derive(Clone, Debug, PartialEq)]
pub struct Refutation {
    pub probe: ProbePoint,
    pub family: Family,
    pub x: String,
    pub x_prime: String,
    /// Limit of `|f(x) - f(x')|`, when it exists.
    pub gap: Option<Limit>,
    pub certificate: String,
    /// `(n, |f(x_n) - f(x'_n)|)` evaluated directly.
    pub resample: Option<(u64, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeStatus {
    Passed,
    Refuted,
    Unknown,
}

impl fmt::Display for ProbeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProbeStatus::Passed => "microcontinuous",
            ProbeStatus::Refuted => "refuted",
            ProbeStatus::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeEntry {
    pub probe: ProbePoint,
    pub status: ProbeStatus,
    /// Order of `f(x + ε) - f(x)` when the series certificate applies.
    pub delta_order: Option<ExtOrder>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MicroOutcome {
    Microcontinuous,
    Refuted(Box<Refutation>),
    Unknown,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MicroVerdict {
    pub outcome: MicroOutcome,
    pub log: Vec<ProbeEntry>,
}

/// Tests microcontinuity of `e` at one probe point.
pub fn microcontinuity_at(
    e: &Expr,
    p: &ProbePoint,
    domain: Option<&DomainSpec>,
    opts: &MicroOptions,
) -> Result<MicroVerdict> {
    if let Some(d) = domain {
        if !d.admits(p) {
            return Err(Error::usage(format!("probe {p} is not admissible for the domain {d}")));
        }
    }
    let var = free_variable(e)?;
    let (entry, refutation) = run_probe(e, &var, p, opts);
    let outcome = match (entry.status, refutation) {
        (ProbeStatus::Refuted, Some(r)) => MicroOutcome::Refuted(Box::new(r)),
        (ProbeStatus::Passed, _) => MicroOutcome::Microcontinuous,
        _ => MicroOutcome::Unknown,
    };
    Ok(MicroVerdict {
        outcome,
        log: vec![entry],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UniformClass {
    NotUniform,
    /// Every probe passed. Evidence only: the probe set is finite.
    UniformOnProbes,
    Unknown,
}

impl fmt::Display for UniformClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UniformClass::NotUniform => "not-uniform",
            UniformClass::UniformOnProbes => "uniform-on-probes",
            UniformClass::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniformReport {
    pub class: UniformClass,
    pub refutation: Option<Refutation>,
    pub log: Vec<ProbeEntry>,
}

/// Probes a standard grid (pointwise continuity) and every boundary and
/// infinite point the domain admits (the uniform layer).
pub fn classify_uniform(e: &Expr, d: &DomainSpec, grid_size: usize, opts: &MicroOptions) -> Result<UniformReport> {
    let var = free_variable(e)?;
    let probes: Vec<ProbePoint> = d
        .grid(grid_size)?
        .into_iter()
        .map(ProbePoint::Standard)
        .chain(d.germ_probes())
        .collect();
    let results: Vec<(ProbeEntry, Option<Refutation>)> =
        probes.par_iter().map(|p| run_probe(e, &var, p, opts)).collect();
    let refutation = results.iter().find_map(|(_, r)| r.clone());
    let class = if refutation.is_some() {
        UniformClass::NotUniform
    } else if results.iter().all(|(entry, _)| entry.status == ProbeStatus::Passed) {
        UniformClass::UniformOnProbes
    } else {
        UniformClass::Unknown
    };
    Ok(UniformReport {
        class,
        refutation,
        log: results.into_iter().map(|(entry, _)| entry).collect(),
    })
}

fn run_probe(e: &Expr, var: &str, p: &ProbePoint, opts: &MicroOptions) -> (ProbeEntry, Option<Refutation>) {
    match p {
        ProbePoint::Standard(x0) => {
            let base = LeviCivita::constant(x0.clone(), opts.series.trunc.clone());
            let eps = LeviCivita::eps(opts.series.trunc.clone());
            series_probe(e, var, p, base, eps, opts)
        }
        ProbePoint::Boundary { endpoint, side } => {
            let Some(a) = endpoint.as_rational().map(|r| Expr::rat(r.clone())) else {
                return (
                    unknown(p, "witness germs need an exact endpoint".into()),
                    None,
                );
            };
            let near = |k: i64| {
                let step = Expr::div(Expr::int(k), Expr::var(INDEX));
                match side {
                    Side::Above => Expr::add(a.clone(), step),
                    Side::Below => Expr::sub(a.clone(), step),
                }
            };
            let mut pairs = oscillation_pairs(e, var);
            pairs.push((Family::Boundary, near(1), near(2)));
            if let Some(r) = refute(e, var, p, pairs, opts) {
                return refuted(p, r);
            }
            let note = "boundary points are the germs a ± 1/n; whether they or atomic \
                        infinitesimals model points indefinitely close to a is left open";
            let base = LeviCivita::constant(endpoint.clone(), opts.series.trunc.clone());
            let eps = LeviCivita::eps(opts.series.trunc.clone());
            let eps = if *side == Side::Above { eps } else { eps.neg() };
            let (mut entry, _) = series_probe(e, var, p, base, eps, opts);
            if entry.status == ProbeStatus::Refuted {
                entry.status = ProbeStatus::Unknown;
            }
            entry.detail = format!("no witness pair refutes; {}; {note}", entry.detail);
            (entry, None)
        }
        ProbePoint::Infinite { sign } => {
            let n = if *sign < 0 { Expr::neg(Expr::var(INDEX)) } else { Expr::var(INDEX) };
            let shift = |step: Expr| {
                if *sign < 0 { Expr::sub(n.clone(), step) } else { Expr::add(n.clone(), step) }
            };
            let mut pairs = vec![
                (Family::InfinitePoint, n.clone(), shift(Expr::div(Expr::int(1), Expr::var(INDEX)))),
                (
                    Family::InfinitePoint,
                    n.clone(),
                    shift(Expr::pow(Expr::var(INDEX), Expr::rat(crate::numeric::Rational::frac(-1, 2)))),
                ),
            ];
            pairs.extend(oscillation_pairs(e, var));
            if let Some(r) = refute(e, var, p, pairs, opts) {
                return refuted(p, r);
            }
            let trunc = opts.series.trunc.clone();
            let eps = LeviCivita::eps(trunc.clone());
            let base = match eps.invert() {
                Ok(big) if *sign < 0 => big.neg(),
                Ok(big) => big,
                Err(err) => return (unknown(p, err.to_string()), None),
            };
            let (mut entry, _) = series_probe(e, var, p, base, eps, opts);
            if entry.status == ProbeStatus::Refuted {
                entry.status = ProbeStatus::Unknown;
            }
            entry.detail = format!("no witness pair refutes; {}", entry.detail);
            (entry, None)
        }
    }
}

fn unknown(p: &ProbePoint, detail: String) -> ProbeEntry {
    ProbeEntry {
        probe: p.clone(),
        status: ProbeStatus::Unknown,
        delta_order: None,
        detail,
    }
}

fn refuted(p: &ProbePoint, r: Refutation) -> (ProbeEntry, Option<Refutation>) {
    let detail = format!(
        "{} pair x = {}, x' = {}: {}",
        r.family, r.x, r.x_prime, r.certificate
    );
    (
        ProbeEntry {
            probe: p.clone(),
            status: ProbeStatus::Refuted,
            delta_order: None,
            detail,
        },
        Some(r),
    )
}

/// `Δ = f(base + h) - f(base)` in the series field; microcontinuous when
/// `Δ` is zero or of positive order.
fn series_probe(
    e: &Expr,
    var: &str,
    p: &ProbePoint,
    base: LeviCivita,
    h: LeviCivita,
    opts: &MicroOptions,
) -> (ProbeEntry, Option<Refutation>) {
    let backend = opts.series.backend();
    let delta = base
        .add(&h)
        .and_then(|moved| eval(e, &backend, &[(var, moved)]))
        .and_then(|moved| Ok((moved, eval(e, &backend, &[(var, base.clone())])?)))
        .and_then(|(moved, fixed)| moved.sub(&fixed));
    let delta = match delta {
        Ok(d) => d,
        Err(err) => return (unknown(p, format!("series evaluation failed: {err}")), None),
    };
    let order = if delta.is_zero() {
        ExtOrder::PositiveInfinity
    } else {
        match delta.order() {
            Ok(o) => o,
            Err(err) => return (unknown(p, err.to_string()), None),
        }
    };
    let detail = format!("Δ = {delta}, order {order}");
    if order > ExtOrder::Finite(crate::numeric::Rational::zero()) {
        return (
            ProbeEntry {
                probe: p.clone(),
                status: ProbeStatus::Passed,
                delta_order: Some(order),
                detail,
            },
            None,
        );
    }
    let gap = match delta.standard_part() {
        Ok(s) => Limit::Finite(s.abs()),
        Err(_) => Limit::Infinite(1),
    };
    let refutation = Refutation {
        probe: p.clone(),
        family: Family::Increment,
        x: format!("{base}"),
        x_prime: format!("{}", base.add(&h).map(|v| v.to_string()).unwrap_or_default()),
        gap: Some(gap),
        certificate: detail.clone(),
        resample: None,
    };
    (
        ProbeEntry {
            probe: p.clone(),
            status: ProbeStatus::Refuted,
            delta_order: Some(order),
            detail,
        },
        Some(refutation),
    )
}

/// Pairs `u⁻¹(±2πn)`, `u⁻¹(±2πn + π/2)` for every trigonometric argument `u`
/// that can be inverted in closed form.
fn oscillation_pairs(e: &Expr, var: &str) -> Vec<(Family, Expr, Expr)> {
    let mut args = Vec::new();
    trig_arguments(e, var, &mut args);
    let two_pi_n = Expr::mul(Expr::mul(Expr::int(2), Expr::pi()), Expr::var(INDEX));
    let quarter = Expr::div(Expr::pi(), Expr::int(2));
    let mut out = Vec::new();
    for u in args {
        for y in [two_pi_n.clone(), Expr::neg(two_pi_n.clone())] {
            let y2 = Expr::add(y.clone(), quarter.clone());
            for (x, x2) in invert(&u, var, y).into_iter().zip(invert(&u, var, y2)) {
                out.push((Family::Oscillation, x, x2));
            }
        }
    }
    out
}

fn trig_arguments(e: &Expr, var: &str, out: &mut Vec<Expr>) {
    match e {
        Expr::Call(Elementary::Sin | Elementary::Cos, a) if a.contains_var(var) => {
            if !out.contains(a) {
                out.push((**a).clone());
            }
            trig_arguments(a, var, out);
        }
        Expr::Call(_, a) | Expr::Neg(a) => trig_arguments(a, var, out),
        Expr::Binary(_, a, b) => {
            trig_arguments(a, var, out);
            trig_arguments(b, var, out);
        }
        _ => {}
    }
}

/// Solves `u(x) = y` for `x` when `u` is built from one occurrence of `x`
/// by affine maps, rational powers, `exp` and `log`. Even powers give two branches.
fn invert(u: &Expr, var: &str, y: Expr) -> Vec<Expr> {
    match u {
        Expr::Var(v) if v == var => vec![y],
        Expr::Neg(a) => invert(a, var, Expr::neg(y)),
        Expr::Call(Elementary::Log, a) => invert(a, var, Expr::call(Elementary::Exp, y)),
        Expr::Call(Elementary::Exp, a) => invert(a, var, Expr::call(Elementary::Log, y)),
        Expr::Binary(op, a, b) => {
            let (fa, fb) = (a.contains_var(var), b.contains_var(var));
            let (a, b) = ((**a).clone(), (**b).clone());
            match (op, fa, fb) {
                (BinOp::Add, true, false) => invert(&a, var, Expr::sub(y, b)),
                (BinOp::Add, false, true) => invert(&b, var, Expr::sub(y, a)),
                (BinOp::Sub, true, false) => invert(&a, var, Expr::add(y, b)),
                (BinOp::Sub, false, true) => invert(&b, var, Expr::sub(a, y)),
                (BinOp::Mul, true, false) => invert(&a, var, Expr::div(y, b)),
                (BinOp::Mul, false, true) => invert(&b, var, Expr::div(y, a)),
                (BinOp::Div, true, false) => invert(&a, var, Expr::mul(y, b)),
                (BinOp::Div, false, true) => invert(&b, var, Expr::div(a, y)),
                (BinOp::Pow, true, false) => {
                    let Some(p) = b.constant_value().filter(|p| !p.is_zero()) else {
                        return Vec::new();
                    };
                    let Ok(inv) = p.recip() else { return Vec::new() };
                    let root = Expr::pow(y, Expr::rat(inv));
                    let even = p.numer() % 2 == 0.into();
                    let mut out = invert(&a, var, root.clone());
                    if even {
                        out.extend(invert(&a, var, Expr::neg(root)));
                    }
                    out
                }
                _ => Vec::new(),
            }
        }
        _ => Vec::new(),
    }
}

fn symbolic_null(g: &Germ, schedule: &HorizonSchedule) -> Option<bool> {
    let v = germ_is_null(g, schedule);
    if v.is_symbolic() { v.answer } else { None }
}

/// Whether the germ `x` approaches the probe point.
fn tends_to(x: &Expr, p: &ProbePoint, schedule: &HorizonSchedule) -> bool {
    match p {
        ProbePoint::Standard(_) => false,
        ProbePoint::Boundary { endpoint, side } => {
            let Some(a) = endpoint.as_rational() else { return false };
            let Ok(d) = Germ::from_expr(Expr::sub(x.clone(), Expr::rat(a.clone()))) else {
                return false;
            };
            symbolic_null(&d, schedule) == Some(true)
                && d.normal_form().and_then(|nf| nf.sign()) == Some(side.sign())
        }
        ProbePoint::Infinite { sign } => Germ::from_expr(x.clone()).is_ok_and(|g| {
            let v = germ_limit(&g, schedule);
            v.is_symbolic() && v.is(&Limit::Infinite(*sign))
        }),
    }
}

fn refute(
    e: &Expr,
    var: &str,
    p: &ProbePoint,
    pairs: Vec<(Family, Expr, Expr)>,
    opts: &MicroOptions,
) -> Option<Refutation> {
    let schedule = &opts.schedule;
    pairs.into_iter().find_map(|(family, x, x2)| {
        if !tends_to(&x, p, schedule) || !tends_to(&x2, p, schedule) {
            return None;
        }
        let close = Germ::from_expr(Expr::sub(x.clone(), x2.clone())).ok()?;
        if symbolic_null(&close, schedule) != Some(true) {
            return None;
        }
        let gap = Germ::from_expr(Expr::sub(e.substitute(var, &x), e.substitute(var, &x2))).ok()?;
        if symbolic_null(&gap, schedule) != Some(false) {
            return None;
        }
        let nf = normalize(gap.body(), INDEX)?;
        let limit = germ_limit(&gap, schedule);
        let gap_value = limit.is_symbolic().then_some(limit.answer).flatten().map(|l| match l {
            Limit::Finite(s) => Limit::Finite(s.abs()),
            Limit::Infinite(_) => Limit::Infinite(1),
        });
        let n = opts.resample_horizon;
        let resample = gap.sample(n).ok().map(|v| (n, v.to_f64().abs()));
        Some(Refutation {
            probe: p.clone(),
            family,
            x: x.to_string(),
            x_prime: x2.to_string(),
            gap: gap_value,
            certificate: format!("f(x) - f(x') = {nf}, not null"),
            resample,
        })
    })
}
