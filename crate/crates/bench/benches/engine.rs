use criterion::{black_box, criterion_group, criterion_main, Criterion};

use microcalc::analysis::{classify_uniform, derivative_st, DomainSpec, MicroOptions, SeriesOptions};
use microcalc::dual::derivative_dual;
use microcalc::expr::parse;
use microcalc::germ::{cauchy_order, germ_compare, Germ, HorizonSchedule, OrderOptions};
use microcalc::levicivita::parse_lc;
use microcalc::numeric::{Rational, Scalar};

fn series(c: &mut Criterion) {
    let trunc = Rational::from_integer(8);
    let a = parse_lc("3 + 5*eps - eps^(1/2) + 2*eps^3", &trunc, 15).unwrap();
    let b = parse_lc("1 - eps^(1/3) + 7*eps^2", &trunc, 15).unwrap();
    c.bench_function("lc_mul", |bench| bench.iter(|| black_box(&a).mul(black_box(&b)).unwrap()));
    c.bench_function("lc_invert", |bench| bench.iter(|| black_box(&b).invert().unwrap()));
}

fn derivatives(c: &mut Criterion) {
    let e = parse("sin(x)*exp(x)/(1+x^2)").unwrap();
    let x0 = Scalar::Exact(Rational::frac(3, 2));
    let opts = SeriesOptions::default();
    c.bench_function("derivative_series", |bench| bench.iter(|| derivative_st(&e, black_box(&x0), &opts).unwrap()));
    c.bench_function("derivative_dual", |bench| bench.iter(|| derivative_dual(&e, black_box(&x0), 15).unwrap()));
}

fn germs(c: &mut Criterion) {
    let schedule = HorizonSchedule::default();
    let (a, b) = (Germ::parse("n^(1/10)").unwrap(), Germ::parse("log(n)^3").unwrap());
    c.bench_function("germ_compare", |bench| bench.iter(|| germ_compare(&a, &b, &schedule)));
    let f = parse("i^(7/3)*(2+i)").unwrap();
    let opts = OrderOptions::default();
    c.bench_function("cauchy_order", |bench| bench.iter(|| cauchy_order(&f, "i", &opts)));
}

fn uniformity(c: &mut Criterion) {
    let e = parse("sin(1/x)").unwrap();
    let d = DomainSpec::parse("(0,1)").unwrap();
    let opts = MicroOptions::default();
    let mut group = c.benchmark_group("uniform");
    group.sample_size(10);
    group.bench_function("sin_inverse", |bench| bench.iter(|| classify_uniform(&e, &d, 11, &opts).unwrap()));
    group.finish();
}

criterion_group!(benches, series, derivatives, germs, uniformity);
criterion_main!(benches);
