//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::cmp::Ordering;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use microcalc::analysis::{
    classify_uniform, derivative_st, euler_cosine, sum_theorem_diagonal, DomainSpec, Family, Hypothesis,
    MicroOptions, ProbePoint, SeriesOptions, SumOptions, UniformClass,
};
use microcalc::dual::derivative_dual;
use microcalc::expr::{eval_at, parse, parse_with_vars, Expr, F64Backend};
use microcalc::germ::{cauchy_order, germ_compare, numeric_compare, Germ, HorizonSchedule, Limit, OrderOptions};
use microcalc::levicivita::LeviCivita;
use microcalc::numeric::{ExtOrder, Rational, Scalar};
use microcalc::Grade;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("orders of infinitesimals", orders),
        ("order laws on random series", order_laws),
        ("standard part is a homomorphism", standard_part),
        ("derivative agreement", derivatives),
        ("microcontinuity and uniformity", microcontinuity),
        ("diagonal remainder of a sum", sum_theorem),
        ("cosine from its multiple-angle expansion", euler),
        ("reduced-power comparisons", reduced_power),
        ("parser and CLI output", parser_and_cli),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {} {name} ... PASS ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name} ... FAIL ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::frac(n, d)
}

fn trunc() -> Rational {
    Rational::from_integer(8)
}

fn timed<T>(limit: Duration, label: &str, f: impl FnOnce() -> T) -> Result<T, String> {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    ensure!(took < limit, "{label} took {took:?}, limit {limit:?}");
    Ok(out)
}

fn orders() -> Check {
    let opts = OrderOptions::default();
    let width_limit = Rational::new(1, 1 << 20).unwrap();
    let order_of = |text: &str| {
        timed(Duration::from_secs(5), text, || cauchy_order(&parse(text).unwrap(), "i", &opts))
    };

    let r = order_of("exp(-1/i)")?;
    ensure!(r.order == Some(ExtOrder::PositiveInfinity), "exp(-1/i): {:?}", r.order);
    ensure!(r.grade == Grade::Symbolic, "exp(-1/i) grade {:?}", r.grade);
    let r = order_of("1/log(i)")?;
    ensure!(r.order == Some(ExtOrder::Finite(Rational::zero())), "1/log(i): {:?}", r.order);

    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    for _ in 0..20 {
        let d = rng.gen_range(1..=12i64);
        let n = rng.gen_range(1..=8 * d);
        let expected = q(n, d);
        let text = format!("i^({n}/{d})");
        let r = order_of(&text)?;
        ensure!(r.order == Some(ExtOrder::Finite(expected.clone())), "{text}: {:?}", r.order);
        let (lo, hi) = r.bracket.clone().ok_or(format!("{text}: no bracket"))?;
        ensure!(&hi - &lo <= width_limit, "{text}: bracket [{lo}, {hi}] too wide");
        ensure!(lo <= expected && expected <= hi, "{text}: bracket [{lo}, {hi}] misses {expected}");
    }
    Ok(())
}

/// A random series with distinct exponents `k/6` in `[lo/6, hi/6)`, returned
/// with its smallest exponent and its `ε^0` coefficient.
fn random_series(rng: &mut StdRng, lo: i64, hi: i64) -> (LeviCivita, Rational, Rational) {
    let count = rng.gen_range(1..=3);
    let mut exps: Vec<i64> = Vec::new();
    while exps.len() < count {
        let k = rng.gen_range(lo..hi);
        if !exps.contains(&k) {
            exps.push(k);
        }
    }
    let mut constant = Rational::zero();
    let terms: Vec<(Rational, Scalar)> = exps
        .iter()
        .map(|&k| {
            let mut c = 0;
            while c == 0 {
                c = rng.gen_range(-9..=9i64);
            }
            let c = q(c, rng.gen_range(1..=5));
            if k == 0 {
                constant = c.clone();
            }
            (q(k, 6), Scalar::Exact(c))
        })
        .collect();
    let min = q(*exps.iter().min().unwrap(), 6);
    (LeviCivita::from_terms(terms, trunc()).unwrap(), min, constant)
}

fn order_laws() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    for case in 0..1000 {
        let (a, oa, _) = random_series(&mut rng, -12, 18);
        let (b, ob, _) = random_series(&mut rng, -12, 18);
        let order = |x: &LeviCivita| x.order().map_err(|e| format!("case {case}: {e}"));
        ensure!(order(&a)? == ExtOrder::Finite(oa.clone()), "case {case}: order of {a}");
        let product = a.mul(&b).map_err(|e| e.to_string())?;
        ensure!(
            order(&product)? == ExtOrder::Finite(&oa + &ob),
            "case {case}: order({a} * {b}) = {:?}",
            order(&product)?
        );
        if oa != ob {
            let sum = a.add(&b).map_err(|e| e.to_string())?;
            let min = if oa < ob { oa.clone() } else { ob.clone() };
            ensure!(order(&sum)? == ExtOrder::Finite(min), "case {case}: order({a} + {b})");
        }
        let ea = LeviCivita::monomial(Scalar::one(), oa.clone(), trunc());
        let eb = LeviCivita::monomial(Scalar::one(), ob.clone(), trunc());
        let cmp = ea.compare(&eb).map_err(|e| e.to_string())?;
        ensure!((cmp == Ordering::Less) == (oa > ob), "case {case}: cmp(eps^{oa}, eps^{ob}) = {cmp:?}");
        ensure!((cmp == Ordering::Equal) == (oa == ob), "case {case}: cmp(eps^{oa}, eps^{ob}) = {cmp:?}");
    }
    Ok(())
}

fn standard_part() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let st = |x: &LeviCivita| match x.standard_part() {
        Ok(Scalar::Exact(r)) => Ok(r),
        other => Err(format!("st({x}) = {other:?}")),
    };
    for case in 0..1000 {
        let (a, _, ca) = random_series(&mut rng, 0, 18);
        let (b, _, cb) = random_series(&mut rng, 0, 18);
        let sum = a.add(&b).map_err(|e| e.to_string())?;
        let product = a.mul(&b).map_err(|e| e.to_string())?;
        ensure!(st(&a)? == ca, "case {case}: st({a})");
        ensure!(st(&sum)? == &ca + &cb, "case {case}: st({a} + {b})");
        ensure!(st(&product)? == &ca * &cb, "case {case}: st({a} * {b})");

        let k = rng.gen_range(1..=12);
        let infinite = LeviCivita::monomial(Scalar::one(), q(-k, 6), trunc());
        let bad = a.add(&infinite).map_err(|e| e.to_string())?;
        ensure!(bad.standard_part().is_err(), "case {case}: st({bad}) should fail");
    }
    Ok(())
}

fn derivatives() -> Check {
    let catalog: [(&str, fn(f64) -> f64); 10] = [
        ("x^2", |x| x * x),
        ("x^3", |x| x * x * x),
        ("exp(x)", f64::exp),
        ("sin(x)", f64::sin),
        ("cos(x)", f64::cos),
        ("log(1+x)", |x| (1.0 + x).ln()),
        ("sqrt(1+x)", |x| (1.0 + x).sqrt()),
        ("sin(x)*exp(x)", |x| x.sin() * x.exp()),
        ("1/(1+x^2)", |x| 1.0 / (1.0 + x * x)),
        ("x^(5/2)", |x| x.powf(2.5)),
    ];
    let points = [q(1, 4), q(1, 2), q(1, 1), q(3, 2), q(2, 1)];
    let opts = SeriesOptions::default();
    let h = 1e-6;
    for (text, f) in catalog {
        let e = parse(text).unwrap();
        for p in &points {
            let x0 = Scalar::Exact(p.clone());
            let lc = derivative_st(&e, &x0, &opts).map_err(|err| format!("{text} at {p}: {err}"))?;
            let dual = derivative_dual(&e, &x0, opts.precision).map_err(|err| format!("{text} at {p}: {err}"))?;
            ensure!(lc == dual, "{text} at {p}: series {lc} vs dual {dual}");
            let x = p.to_f64();
            let central = (f(x + h) - f(x - h)) / (2.0 * h);
            let rel = (lc.to_f64() - central).abs() / central.abs().max(1e-300);
            ensure!(rel <= 1e-5, "{text} at {p}: {lc} vs central difference {central} (rel {rel:e})");
            if text == "exp(x)" {
                let err = (lc.to_f64() - x.exp()).abs();
                ensure!(err <= 1e-12, "exp at {p}: {lc} vs {} ({err:e})", x.exp());
            }
        }
    }
    Ok(())
}

fn microcontinuity() -> Check {
    let start = Instant::now();
    let opts = MicroOptions::default();
    let classify = |f: &str, d: &str| {
        classify_uniform(&parse(f).unwrap(), &DomainSpec::parse(d).unwrap(), 11, &opts).map_err(|e| e.to_string())
    };
    let gap = |l: &Option<Limit>| match l {
        Some(Limit::Finite(s)) => s.to_f64(),
        _ => f64::NAN,
    };

    let r = classify("sin(1/x)", "(0,1)")?;
    ensure!(r.class == UniformClass::NotUniform, "sin(1/x) on (0,1): {}", r.class);
    let w = r.refutation.ok_or("sin(1/x): no witness")?;
    ensure!(w.family == Family::Oscillation, "sin(1/x): witness family {}", w.family);
    ensure!((gap(&w.gap) - 1.0).abs() <= 1e-6, "sin(1/x): gap {:?}", w.gap);
    let (_, resampled) = w.resample.ok_or("sin(1/x): no resample")?;
    ensure!((resampled - 1.0).abs() <= 1e-6, "sin(1/x): resampled gap {resampled}");

    let r = classify("x^2", "(-inf,inf)")?;
    ensure!(r.class == UniformClass::NotUniform, "x^2 on the line: {}", r.class);
    let w = r.refutation.ok_or("x^2: no witness")?;
    ensure!(w.family == Family::InfinitePoint, "x^2: witness family {}", w.family);
    ensure!(matches!(w.probe, ProbePoint::Infinite { .. }), "x^2: probe {}", w.probe);
    ensure!((gap(&w.gap) - 2.0).abs() <= 1e-6, "x^2: gap {:?}", w.gap);
    let (_, resampled) = w.resample.ok_or("x^2: no resample")?;
    ensure!((resampled - 2.0).abs() <= 1e-6, "x^2: resampled gap {resampled}");

    let r = classify("x^2", "[0,1]")?;
    ensure!(r.class == UniformClass::UniformOnProbes, "x^2 on [0,1]: {}", r.class);
    let standard: Vec<_> = r.log.iter().filter(|e| matches!(e.probe, ProbePoint::Standard(_))).collect();
    ensure!(standard.len() == 11, "x^2 on [0,1]: {} standard probes", standard.len());
    for entry in standard {
        let ok = match &entry.delta_order {
            Some(ExtOrder::Finite(o)) => *o >= Rational::one(),
            Some(ExtOrder::PositiveInfinity) => true,
            None => false,
        };
        ensure!(ok, "x^2 at {}: delta order {:?}", entry.probe, entry.delta_order);
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(10), "took {took:?}");
    Ok(())
}

/// Adaptive Simpson quadrature.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rule(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn go(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64, m: f64, fm: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let (lm, flm, left) = rule(f, a, fa, m, fm);
        let (rm, frm, right) = rule(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        go(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) + go(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = rule(f, a, fa, b, fb);
    go(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

fn sum_theorem() -> Check {
    let sinc = |t: f64| if t == 0.0 { 1.0 } else { t.sin() / t };
    let oracle = std::f64::consts::FRAC_PI_2 - simpson(&sinc, 0.0, 1.0, 1e-13);
    ensure!((oracle - 0.624713).abs() < 1e-6, "quadrature oracle {oracle}");

    let opts = SumOptions::default();
    let term = |t: &str| parse_with_vars(t, &["k", "x"]).unwrap();
    let xseq = Germ::parse("1/n").map_err(|e| e.to_string())?;

    let r = sum_theorem_diagonal(&term("sin(k*x)/k"), &xseq, &opts).map_err(|e| e.to_string())?;
    let (limit, _) = r.limit.ok_or("no diagonal limit")?;
    ensure!((limit - oracle).abs() <= 0.01, "diagonal limit {limit} vs {oracle}");
    ensure!(r.null.answer == Some(false), "diagonal null: {:?}", r.null.answer);
    ensure!(r.verdict1853 == Hypothesis::Violated, "strong hypothesis: {}", r.verdict1853);
    ensure!(r.verdict1821 == Hypothesis::Satisfied, "pointwise hypothesis: {}", r.verdict1821);

    let c = sum_theorem_diagonal(&term("1/(k*(k+1))"), &xseq, &opts).map_err(|e| e.to_string())?;
    ensure!(c.null.answer == Some(true), "control diagonal null: {:?}", c.null.answer);
    ensure!(c.verdict1821 == Hypothesis::Satisfied, "control pointwise: {}", c.verdict1821);
    ensure!(c.verdict1853 == Hypothesis::Satisfied, "control strong: {}", c.verdict1853);

    for rep in [&r, &c] {
        ensure!(
            rep.verdict1853 != Hypothesis::Satisfied || rep.verdict1821 == Hypothesis::Satisfied,
            "strong hypothesis holds without the pointwise one"
        );
    }
    Ok(())
}

fn euler() -> Check {
    let factorial = |m: u32| (1..=m).map(f64::from).product::<f64>();
    let worst = |v: i64, horizon: u64| -> Result<f64, String> {
        let rep = euler_cosine(&Scalar::int(v), 4, horizon).map_err(|e| e.to_string())?;
        let mut worst = 0.0f64;
        for t in &rep.terms {
            let oracle = (v as f64).powi(2 * t.k as i32) / factorial(2 * t.k);
            ensure!((t.target.to_f64() - oracle).abs() <= 1e-12 * oracle, "v={v} k={}: target {}", t.k, t.target);
            worst = worst.max((t.value.to_f64() - oracle).abs());
        }
        Ok(worst)
    };
    for v in [1i64, 2] {
        let coarse = worst(v, 1_000_000)?;
        ensure!(coarse <= 1e-4, "v={v}: term error {coarse:e} at 10^6");
        let fine = worst(v, 10_000_000)?;
        ensure!(fine < coarse, "v={v}: term error {fine:e} at 10^7 not below {coarse:e}");

        let rep = euler_cosine(&Scalar::int(v), 8, 1_000_000).map_err(|e| e.to_string())?;
        let err = (rep.partial_sum.to_f64() - (v as f64).cos()).abs();
        ensure!(err <= 1e-6, "v={v}: partial sum {} vs cos {} ({err:e})", rep.partial_sum, (v as f64).cos());
    }
    Ok(())
}

fn reduced_power() -> Check {
    let schedule = HorizonSchedule::default();
    let g = |t: &str| Germ::parse(t).unwrap();

    let modified = g("1/n").with_override(3, Scalar::int(100)).with_override(1000, Scalar::int(-7));
    let v = germ_compare(&modified, &g("1/n"), &schedule);
    ensure!(v.answer == Some(Ordering::Equal), "finite modification: {:?}", v.answer);

    let v = germ_compare(&g("(-1)^n/n"), &g("0"), &schedule);
    ensure!(v.answer.is_none(), "(-1)^n/n vs 0: {:?}", v.answer);

    // log-space oracle: n^(1/10) > log(n)^3 iff t/10 > 3 ln t with t = ln n
    let favours_power = |t: f64| t / 10.0 > 3.0 * t.ln();
    for &h in schedule.horizons() {
        ensure!(!favours_power((h as f64).ln()), "oracle: power already ahead at {h}");
    }
    ensure!(favours_power(1000.0), "oracle: power never ahead");

    let (a, b) = (g("n^(1/10)"), g("log(n)^3"));
    let v = germ_compare(&a, &b, &schedule);
    ensure!(v.answer == Some(Ordering::Greater), "n^(1/10) vs log(n)^3: {:?}", v.answer);
    ensure!(v.grade == Grade::Symbolic, "n^(1/10) vs log(n)^3 grade {}", v.grade);
    let sampled = numeric_compare(&a, &b, &schedule);
    ensure!(sampled.answer == Some(Ordering::Less), "sampling alone: {:?}", sampled.answer);
    Ok(())
}

const CORPUS: [&str; 50] = [
    "x", "42", "-7", "3/4", "0.125", "pi", "e", "x+1", "x-1", "1-x",
    "2*x", "x/3", "x^2", "x^(1/2)", "x^(-3/2)", "-x^2", "(-x)^2", "x^2^3", "(x^2)^3", "1/(1+x^2)",
    "(x+1)*(x-1)", "x-(1-x)", "x-1-x", "x/(2/x)", "x/2/x", "sin(x)", "cos(2*pi*x)", "exp(-1/x)", "log(1+x)", "sqrt(1+x)",
    "abs(x)", "sin(1/x)", "exp(x)*sin(x)", "x^(5/2)", "sin(x)^2+cos(x)^2", "log(log(x))", "exp(exp(x))", "(-1)^n/n",
    "n^(1/10)-log(n)^3", "sqrt(n^2+1)-n",
    "(n+1)/n", "2^n", "e^x", "pi*x^2", "-(x+1)", "--x", "x*-1", "3*eps^2-eps+5", "abs(sin(x))/x", "1/(2*pi*n+pi/2)",
];

const MALFORMED: [(&str, usize); 20] = [
    ("", 0),
    ("2*+3", 2),
    ("sin x", 4),
    ("(1+2", 4),
    ("1+2)", 3),
    ("x^", 2),
    ("3 $ 4", 2),
    ("sin(x", 5),
    ("x y", 2),
    ("()", 1),
    ("x*/2", 2),
    ("exp()", 4),
    ("2 3", 2),
    ("log(x))", 6),
    ("x + y", 4),
    ("abs(,x)", 4),
    ("cos(x)(", 6),
    ("^2", 0),
    ("sqrt(x", 6),
    ("pi pi", 3),
];

fn parser_and_cli() -> Check {
    for text in CORPUS {
        let e: Expr = parse(text).map_err(|err| format!("{text:?}: {err}"))?;
        let printed = e.to_string();
        let again = parse(&printed).map_err(|err| format!("{text:?} printed as {printed:?}: {err}"))?;
        ensure!(again == e, "{text:?} printed as {printed:?} reparses differently");
        ensure!(again.to_string() == printed, "{text:?}: printing is not stable");
        if e.variables().len() == 1 {
            let v = e.variables().into_iter().next().unwrap();
            let x = 0.7;
            let (a, b) = (eval_at(&e, &F64Backend, x), eval_at(&again, &F64Backend, x));
            if let (Ok(a), Ok(b)) = (a, b) {
                ensure!(a.to_bits() == b.to_bits() || (a - b).abs() <= 1e-15 * a.abs(), "{text:?} at {v}={x}");
            }
        }
    }
    for (text, offset) in MALFORMED {
        match parse(text) {
            Ok(e) => return Err(format!("{text:?} parsed as {e}")),
            Err(err) => ensure!(err.offset == offset, "{text:?}: offset {} ({err}), expected {offset}", err.offset),
        }
    }
    let schema = common::schema();
    let mut seen = std::collections::BTreeSet::new();
    for args in common::INVOCATIONS {
        let v = common::json(args);
        if let Err(errors) = schema.validate(&v) {
            let msgs: Vec<String> = errors.map(|e| format!("{e} at {}", e.instance_path)).collect();
            return Err(format!("{args:?}: {msgs:?}"));
        }
        seen.insert(args[0]);
    }
    let all = ["order", "st", "deriv", "microcont", "uniform", "sumthm", "euler", "compare", "limit"];
    ensure!(all.iter().all(|c| seen.contains(c)), "subcommands covered: {seen:?}");
    Ok(())
}
