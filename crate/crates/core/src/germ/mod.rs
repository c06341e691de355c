//! Sequence germs: expressions in the index `n` identified when they agree
//! for all sufficiently large `n`.
//!
//! Questions about a germ (sign, nullness, limit, order) are first put to the
//! dominance normal form in [`asym`], whose answers are `Symbolic`. Germs
//! outside that grammar fall back to sampling, whose answers are `Numeric`
//! evidence or `Unknown`.

mod asym;
mod coef;
mod numeric;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

pub use asym::{normalize, AsymSeries, Scale};
pub use coef::Coef;
pub use numeric::{aitken, sample_expr, HorizonSchedule, NumericLimit, Row, Samples, LIMIT_TOL, WINDOW};

use crate::error::{Error, Result};
use crate::expr::{eval, eval_at, parse, Backend, Elementary, Expr, NamedConst, ScalarBackend};
use crate::numeric::{ExtOrder, Rational, Scalar};
use crate::verdict::{Grade, Verdict, Witness};

/// The index variable of germ bodies.
pub const INDEX: &str = "n";

#[derive(Clone, Debug, PartialEq)]
pub struct Germ {
    body: Expr,
    oscillatory: bool,
    /// Finitely many indices whose value differs from the body.
    overrides: BTreeMap<u64, Scalar>,
}

impl Germ {
    pub fn from_expr(body: Expr) -> Result<Germ> {
        if let Some(v) = body.variables().into_iter().find(|v| v != INDEX) {
            return Err(Error::usage(format!(
                "germ bodies are expressions in {INDEX}, found variable {v:?}"
            )));
        }
        let oscillatory = has_unbounded_trig(&body);
        Ok(Germ {
            body,
            oscillatory,
            overrides: BTreeMap::new(),
        })
    }

    pub fn parse(text: &str) -> Result<Germ> {
        Germ::from_expr(parse(text)?)
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    /// Set when some `sin`/`cos` has an argument that grows without bound.
    pub fn is_oscillatory(&self) -> bool {
        self.oscillatory
    }

    pub fn overrides(&self) -> &BTreeMap<u64, Scalar> {
        &self.overrides
    }

    /// The same germ with its value at index `n` replaced.
    pub fn with_override(mut self, n: u64, value: Scalar) -> Germ {
        self.overrides.insert(n, value);
        self
    }

    /// Value at index `n`, exact where the body allows.
    pub fn sample(&self, n: u64) -> Result<Scalar> {
        if n == 0 {
            return Err(Error::usage("germ indices start at 1"));
        }
        if let Some(v) = self.overrides.get(&n) {
            return Ok(v.clone());
        }
        eval_at(&self.body, &ScalarBackend::default(), Scalar::int(n as i64))
    }

    pub fn normal_form(&self) -> Option<AsymSeries> {
        normalize(&self.body, INDEX)
    }

    pub fn samples(&self, schedule: &HorizonSchedule) -> Samples {
        sample_expr(&self.body, &self.overrides, schedule)
    }

    /// `self - other`; the exceptional indices of both carry over.
    pub fn sub(&self, other: &Germ) -> Germ {
        let body = Expr::sub(self.body.clone(), other.body.clone());
        let mut overrides = BTreeMap::new();
        for &k in self.overrides.keys().chain(other.overrides.keys()) {
            if let (Ok(a), Ok(b)) = (self.sample(k), other.sample(k)) {
                if let Ok(d) = a.sub(&b) {
                    overrides.insert(k, d);
                }
            }
        }
        Germ {
            oscillatory: has_unbounded_trig(&body),
            body,
            overrides,
        }
    }

    /// `|self|` as a germ.
    pub fn abs(&self) -> Germ {
        let body = Expr::call(Elementary::Abs, self.body.clone());
        Germ {
            oscillatory: self.oscillatory,
            body,
            overrides: self.overrides.iter().map(|(k, v)| (*k, v.abs())).collect(),
        }
    }

    /// `e(x)` evaluated at the germ `x`, by substitution.
    pub fn compose(e: &Expr, x: &Germ) -> Result<Germ> {
        let vars = e.variables();
        let body = match vars.len() {
            0 => e.clone(),
            1 => eval(e, &GermBackend, &[(vars.iter().next().expect("one").as_str(), x.body.clone())])?,
            _ => return Err(Error::usage("expected a single-variable expression")),
        };
        Germ::from_expr(body)
    }
}

impl fmt::Display for Germ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.body)
    }
}

fn has_unbounded_trig(e: &Expr) -> bool {
    match e {
        Expr::Call(Elementary::Sin | Elementary::Cos, a) if a.contains_var(INDEX) => {
            normalize(a, INDEX).map_or(true, |s| s.top().is_some_and(|t| t.growth() > 0))
                || has_unbounded_trig(a)
        }
        Expr::Call(_, a) | Expr::Neg(a) => has_unbounded_trig(a),
        Expr::Binary(_, a, b) => has_unbounded_trig(a) || has_unbounded_trig(b),
        _ => false,
    }
}

/// Germ arithmetic as symbolic substitution into the body.
///
/// `abs` needs a decided sign; with an undecided sign it is not representable.
#[derive(Clone, Copy, Debug, Default)]
pub struct GermBackend;

impl Backend for GermBackend {
    type Value = Expr;

    fn constant(&self, c: &Rational) -> Result<Expr> {
        Ok(Expr::Const(c.clone()))
    }

    fn named(&self, c: NamedConst) -> Result<Expr> {
        Ok(Expr::Named(c))
    }

    fn add(&self, a: &Expr, b: &Expr) -> Result<Expr> {
        Ok(Expr::add(a.clone(), b.clone()))
    }

    fn sub(&self, a: &Expr, b: &Expr) -> Result<Expr> {
        Ok(Expr::sub(a.clone(), b.clone()))
    }

    fn mul(&self, a: &Expr, b: &Expr) -> Result<Expr> {
        Ok(Expr::mul(a.clone(), b.clone()))
    }

    fn div(&self, a: &Expr, b: &Expr) -> Result<Expr> {
        Ok(Expr::div(a.clone(), b.clone()))
    }

    fn neg(&self, a: &Expr) -> Result<Expr> {
        Ok(Expr::neg(a.clone()))
    }

    fn pow_rational(&self, base: &Expr, p: &Rational) -> Result<Expr> {
        Ok(Expr::pow(base.clone(), Expr::Const(p.clone())))
    }

    fn pow(&self, base: &Expr, exponent: &Expr) -> Result<Expr> {
        Ok(Expr::pow(base.clone(), exponent.clone()))
    }

    fn call(&self, f: Elementary, a: &Expr) -> Result<Expr> {
        if f != Elementary::Abs {
            return Ok(Expr::call(f, a.clone()));
        }
        match normalize(a, INDEX).and_then(|s| s.sign()) {
            Some(s) if s < 0 => Ok(Expr::neg(a.clone())),
            Some(_) => Ok(a.clone()),
            None => Err(Error::not_representable(format!(
                "abs of a germ with undecided sign: {a}"
            ))),
        }
    }
}

/// Standard part at infinity.
#[derive(Clone, Debug, PartialEq)]
pub enum Limit {
    Finite(Scalar),
    /// `+1` or `-1`.
    Infinite(i32),
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Finite(s) => write!(f, "{s}"),
            Limit::Infinite(s) if *s < 0 => f.write_str("-infinity"),
            Limit::Infinite(_) => f.write_str("infinity"),
        }
    }
}

/// Eventual ordering of two germs.
pub fn germ_compare(a: &Germ, b: &Germ, schedule: &HorizonSchedule) -> Verdict<Ordering> {
    if a.body == b.body {
        return Verdict::symbolic(Ordering::Equal)
            .with_witness(Witness::note("bodies agree except at finitely many indices"));
    }
    let d = a.sub(b);
    if let Some(nf) = d.normal_form() {
        if let Some(s) = nf.sign() {
            return Verdict::symbolic(s.cmp(&0)).with_witness(Witness::note(format!("{a} - {b} = {nf}")));
        }
    }
    numeric_compare(a, b, schedule)
}

/// Sampling-only comparison. Evidence, never proof: it can be wrong at
/// every feasible horizon when the dominance crossover lies beyond them.
pub fn numeric_compare(a: &Germ, b: &Germ, schedule: &HorizonSchedule) -> Verdict<Ordering> {
    let samples = a.sub(b).samples(schedule);
    let witness = samples.witness();
    match samples.sign() {
        Some(o) => Verdict::numeric(o, witness),
        None => Verdict::unknown(witness),
    }
}

/// Whether `|g|` eventually drops below every positive rational.
pub fn germ_is_null(g: &Germ, schedule: &HorizonSchedule) -> Verdict<bool> {
    if let Some(nf) = g.normal_form() {
        if let Some(null) = series_null(&nf) {
            return Verdict::symbolic(null).with_witness(Witness::note(format!("{g} = {nf}")));
        }
    }
    let samples = g.samples(schedule);
    let witness = samples.witness();
    match samples.null() {
        Some(v) => Verdict::numeric(v, witness),
        None => Verdict::unknown(witness),
    }
}

fn series_null(nf: &AsymSeries) -> Option<bool> {
    if nf.is_exact_zero() {
        return Some(true);
    }
    match nf.leading() {
        Some((s, _)) if s.growth() >= 0 => Some(false),
        _ => nf.top().map(|t| t.growth() < 0).filter(|v| *v),
    }
}

/// The standard part of a germ at infinity.
pub fn germ_limit(g: &Germ, schedule: &HorizonSchedule) -> Verdict<Limit> {
    let null = germ_is_null(g, schedule);
    if null.is(&true) {
        return null.map(|_| Limit::Finite(Scalar::zero()));
    }
    if let Some(nf) = g.normal_form() {
        if let Some((s, c)) = nf.leading() {
            let note = Witness::note(format!("{g} = {nf}"));
            match (s.growth(), c.signum()) {
                (1, Some(sign)) if sign != 0 => {
                    return Verdict::symbolic(Limit::Infinite(sign)).with_witness(note)
                }
                (0, _) => return Verdict::symbolic(Limit::Finite(c.to_scalar())).with_witness(note),
                _ => {}
            }
        }
    }
    let samples = g.samples(schedule);
    let witness = samples.witness();
    match samples.limit() {
        Some(NumericLimit::Finite(v)) => match Scalar::approx(v, crate::numeric::DEFAULT_PRECISION) {
            Ok(s) => Verdict::numeric(Limit::Finite(s), witness),
            Err(_) => Verdict::unknown(witness),
        },
        Some(NumericLimit::Infinite(s)) => Verdict::numeric(Limit::Infinite(s), witness),
        None => Verdict::unknown(witness),
    }
}

/// Search settings for [`cauchy_order`].
#[derive(Clone, Debug)]
pub struct OrderOptions {
    pub r_max: Rational,
    /// Bisection stops once the bracket is narrower than `2^-tol_log2`.
    pub tol_log2: u32,
    pub schedule: HorizonSchedule,
}

impl Default for OrderOptions {
    fn default() -> Self {
        OrderOptions {
            r_max: Rational::from_integer(64),
            tol_log2: 20,
            schedule: HorizonSchedule::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderReport {
    /// `None` when the order could not be determined.
    pub order: Option<ExtOrder>,
    pub grade: Grade,
    /// Final bisection bracket `[lo, hi]`: `f/i^r` is null below, not above.
    pub bracket: Option<(Rational, Rational)>,
    pub iterations: u32,
    /// The ratio `f/i^a` oscillates instead of settling at the order `a`.
    pub non_regular: bool,
    pub note: Option<String>,
}

/// Slope band inside which a sampled envelope counts as neither decaying nor growing.
const SLOPE_BAND: f64 = 0.005;

struct OrderProbe {
    normal: Option<AsymSeries>,
    samples: Option<Samples>,
    numeric_used: bool,
}

impl OrderProbe {
    /// Is `|f(1/n)| · n^r` null? `None` when undecided.
    fn null_at(&mut self, r: &Rational) -> Option<bool> {
        if let Some(nf) = &self.normal {
            let scaled = nf.mul(&AsymSeries::monomial(Coef::int(1), Scale::n_pow(r.clone())));
            if let Some(v) = series_null(&scaled) {
                return Some(v);
            }
            if scaled.leading().is_some() {
                return Some(false);
            }
        }
        self.numeric_used = true;
        let samples = self.samples.as_ref()?;
        let scaled = samples.rescaled(r.to_f64());
        if scaled.rows.iter().all(|row| row.points.iter().all(|p| p.1 == 0.0)) {
            return Some(true);
        }
        let slope = scaled.envelope_slope()?;
        if slope < -SLOPE_BAND {
            Some(true)
        } else if slope > SLOPE_BAND {
            Some(false)
        } else {
            None
        }
    }
}

/// Cauchy's order of the infinitesimal `f(i)` as `i → 0+`: the `a` with
/// `f/i^r → 0` for `r < a` and `→ ∞` for `r > a`.
///
/// Works on `|f(1/n)|` and bisects `r` over `[-r_max, r_max]`.
pub fn cauchy_order(f: &Expr, var: &str, opts: &OrderOptions) -> OrderReport {
    let inverse_n = Expr::div(Expr::int(1), Expr::var(INDEX));
    let body = Expr::call(Elementary::Abs, f.substitute(var, &inverse_n));
    let germ = Germ {
        oscillatory: has_unbounded_trig(&body),
        body,
        overrides: BTreeMap::new(),
    };
    let normal = germ.normal_form();
    let mut probe = OrderProbe {
        samples: Some(germ.samples(&opts.schedule)),
        normal,
        numeric_used: false,
    };
    let mut report = OrderReport {
        order: None,
        grade: Grade::Symbolic,
        bracket: None,
        iterations: 0,
        non_regular: false,
        note: None,
    };
    let r_max = opts.r_max.clone();
    let tol = Rational::new(1, num_bigint::BigInt::from(1u8) << opts.tol_log2).expect("nonzero");
    let grade = |p: &OrderProbe| if p.numeric_used { Grade::Numeric } else { Grade::Symbolic };

    match probe.null_at(&r_max) {
        Some(true) => {
            report.order = Some(ExtOrder::PositiveInfinity);
            report.grade = grade(&probe);
            report.note = Some(format!("f/i^r is null for every r up to {r_max}"));
            return report;
        }
        Some(false) => {}
        None => {
            report.grade = Grade::Numeric;
            report.note = Some(format!("nullness undecided at r = {r_max}"));
            return report;
        }
    }
    if probe.null_at(&-r_max.clone()) != Some(true) {
        report.grade = grade(&probe);
        report.note = Some(format!("f/i^r is not null even at r = -{r_max}"));
        return report;
    }

    let (mut lo, mut hi) = (-r_max, opts.r_max.clone());
    let half = Rational::frac(1, 2);
    let mut undecided = false;
    while &hi - &lo > tol {
        report.iterations += 1;
        let mid = &(&lo + &hi) * &half;
        match probe.null_at(&mid) {
            Some(true) => lo = mid,
            Some(false) => hi = mid,
            None => {
                // undecided band around the order: locate both of its edges
                undecided = true;
                let (mut a, mut b) = (lo.clone(), mid.clone());
                while &b - &a > tol {
                    report.iterations += 1;
                    let m = &(&a + &b) * &half;
                    if probe.null_at(&m) == Some(true) { a = m } else { b = m }
                }
                let (mut c, mut d) = (mid.clone(), hi.clone());
                while &d - &c > tol {
                    report.iterations += 1;
                    let m = &(&c + &d) * &half;
                    if probe.null_at(&m) == Some(false) { d = m } else { c = m }
                }
                lo = a;
                hi = d;
                break;
            }
        }
    }

    // the dichotomy must hold on both sides of the bracket
    let one = Rational::one();
    let below = &lo - &one;
    let above = &hi + &one;
    if (below > -opts.r_max.clone() && probe.null_at(&below) != Some(true))
        || (above < opts.r_max && probe.null_at(&above) != Some(false))
    {
        report.grade = Grade::Numeric;
        report.bracket = Some((lo, hi));
        report.note = Some("nullness verdicts are not monotone in r".into());
        return report;
    }

    let symbolic_order = probe
        .normal
        .as_ref()
        .and_then(|nf| nf.leading().map(|(s, _)| s.clone()))
        .filter(|s| s.r.is_zero())
        .map(|s| -s.p);
    let a = match symbolic_order {
        Some(a) if lo <= a && a <= hi => a,
        _ => Rational::simplest_between(&lo, &hi),
    };
    report.grade = grade(&probe);
    if undecided {
        if let Some(samples) = &probe.samples {
            let spread = samples.rescaled(a.to_f64()).last_window_spread().unwrap_or(1.0);
            report.non_regular = spread > 1.01;
        }
        report.note = Some(format!(
            "sampled envelope is flat for r in [{}, {}]",
            lo.to_f64(),
            hi.to_f64()
        ));
    }
    report.order = Some(ExtOrder::Finite(a));
    report.bracket = Some((lo, hi));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(text: &str) -> Germ {
        Germ::parse(text).unwrap()
    }

    fn sched() -> HorizonSchedule {
        HorizonSchedule::default()
    }

    fn order(text: &str) -> OrderReport {
        cauchy_order(&parse(text).unwrap(), "i", &OrderOptions::default())
    }

    #[test]
    fn construction() {
        assert!(!g("1/n").is_oscillatory());
        assert!(g("sin(n)").is_oscillatory());
        assert!(g("sin(2*pi*n)").is_oscillatory());
        assert!(!g("sin(1/n)").is_oscillatory());
        assert!(matches!(Germ::parse("1/x"), Err(Error::Usage(_))));
    }

    #[test]
    fn sampling() {
        assert_eq!(g("1/n").sample(4).unwrap(), Scalar::Exact(Rational::frac(1, 4)));
        assert_eq!(g("(-1)^n/n").sample(3).unwrap(), Scalar::Exact(Rational::frac(-1, 3)));
        assert_eq!(g("log(n)").sample(1).unwrap(), Scalar::zero());
        assert!(g("1/(n-2)").sample(2).is_err());
    }

    #[test]
    fn composition_by_substitution() {
        let x = g("1/(2*pi*n)");
        let y = Germ::compose(&parse("sin(1/x)").unwrap(), &x).unwrap();
        assert!(germ_is_null(&y, &sched()).is_symbolic());
        assert!(y.normal_form().unwrap().is_exact_zero());
        assert!(matches!(
            Germ::compose(&parse("abs(x)").unwrap(), &g("(-1)^n/n")),
            Err(Error::NotRepresentable(_))
        ));
        let z = Germ::compose(&parse("abs(x)").unwrap(), &g("-1/n")).unwrap();
        assert_eq!(z.normal_form().unwrap().sign(), Some(1));
    }

    #[test]
    fn comparisons() {
        let v = germ_compare(&g("n^(1/10)"), &g("log(n)^3"), &sched());
        assert_eq!(v.answer, Some(Ordering::Greater));
        assert_eq!(v.grade, Grade::Symbolic);
        assert!(numeric_compare(&g("n^(1/10)"), &g("log(n)^3"), &sched()).is(&Ordering::Less));

        assert!(germ_compare(&g("1/n"), &g("0"), &sched()).is_symbolic());
        let v = germ_compare(&g("(-1)^n/n"), &g("0"), &sched());
        assert_eq!(v.answer, None);
    }

    #[test]
    fn finite_modification_compares_equal() {
        for body in ["sin(n)", "1/n", "(-1)^n"] {
            let a = g(body);
            let b = a.clone().with_override(5, Scalar::int(7)).with_override(1 << 20, Scalar::int(-3));
            assert!(germ_compare(&a, &b, &sched()).is(&Ordering::Equal), "{body}");
        }
    }

    #[test]
    fn nullness() {
        assert!(germ_is_null(&g("1/n"), &sched()).is_symbolic());
        assert!(germ_is_null(&g("1/n"), &sched()).is(&true));
        assert!(germ_is_null(&g("1/log(n)"), &sched()).is(&true));
        assert!(germ_is_null(&g("(n+1)/n"), &sched()).is(&false));
        let v = germ_is_null(&g("(-1)^n/n"), &sched());
        assert_eq!((v.answer, v.grade), (Some(true), Grade::Numeric));
    }

    #[test]
    fn limits() {
        assert_eq!(
            germ_limit(&g("(n+1)/n"), &sched()).answer,
            Some(Limit::Finite(Scalar::one()))
        );
        assert_eq!(germ_limit(&g("n"), &sched()).answer, Some(Limit::Infinite(1)));
        assert_eq!(germ_limit(&g("sin(n)"), &sched()).answer, None);
        assert_eq!(
            germ_limit(&g("(-1)^n/n"), &sched()).answer,
            Some(Limit::Finite(Scalar::zero()))
        );
    }

    #[test]
    fn cauchy_orders() {
        let r = order("exp(-1/i)");
        assert_eq!((r.order, r.grade), (Some(ExtOrder::PositiveInfinity), Grade::Symbolic));
        let r = order("1/log(i)");
        assert_eq!(r.order, Some(ExtOrder::Finite(Rational::zero())));
        let r = order("i^(3/2)");
        assert_eq!(r.order, Some(ExtOrder::Finite(Rational::frac(3, 2))));
        let (lo, hi) = r.bracket.unwrap();
        assert!((&hi - &lo).to_f64() <= 2f64.powi(-20));
        assert_eq!(order("3*i^2 + i^5").order, Some(ExtOrder::Finite(Rational::from_integer(2))));
        assert_eq!(order("sin(i)").order, Some(ExtOrder::Finite(Rational::one())));
        assert_eq!(order("1 - cos(i)").order, Some(ExtOrder::Finite(Rational::from_integer(2))));
    }

    #[test]
    fn oscillating_factor_is_flagged_non_regular() {
        let r = order("i*(2 + sin(1/i))");
        assert_eq!(r.order, Some(ExtOrder::Finite(Rational::one())));
        assert_eq!(r.grade, Grade::Numeric);
        assert!(r.non_regular);
    }

    fn monomial_sum() -> impl Strategy<Value = Vec<(i64, i64, i64)>> {
        // exponents stay below the series cutoff
    prop::collection::vec(
        (1i64..=9, 0i64..32, 1i64..=4).prop_map(|(c, num, den)| (c, num % (8 * den), den)),
        1..4,
    )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn order_agrees_with_series_order(terms in monomial_sum()) {
            use crate::levicivita::{parse_lc, DEFAULT_TRUNC};
            let render = |var: &str| terms
                .iter()
                .map(|(c, num, den)| format!("{c}*{var}^({num}/{den})"))
                .collect::<Vec<_>>()
                .join(" + ");
            let lc = parse_lc(&render("eps"), &Rational::from_integer(DEFAULT_TRUNC), 15).unwrap();
            let r = order(&render("i"));
            prop_assert_eq!(r.order.unwrap(), lc.order().unwrap());
        }
    }
}
