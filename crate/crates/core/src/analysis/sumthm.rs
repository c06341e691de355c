//! Tails of a series of functions along a diagonal sequence `x_n`.
//!
//! Pointwise convergence at standard `x` is compared with convergence
//! "always", i.e. also at the variable point `x_n`: the remainder
//! `r_n(x_n)` must then be a null sequence.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{eval, Expr, F64Backend};
use crate::germ::{Germ, Samples};
use crate::verdict::{Verdict, Witness};

#[derive(Clone, Debug)]
pub struct SumOptions {
    pub horizons: Vec<u64>,
    /// Standard points where pointwise convergence is checked.
    pub grid: Vec<f64>,
    pub tol: f64,
    /// Tails stop at `cap_factor · n` terms.
    pub cap_factor: u64,
}

impl Default for SumOptions {
    fn default() -> Self {
        SumOptions {
            horizons: vec![16, 32, 64, 128, 256, 512],
            grid: (1..=5).map(|j| j as f64 / 6.0).collect(),
            tol: 1e-9,
            cap_factor: 10_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tail {
    pub value: f64,
    /// Index of the last term summed.
    pub terms: u64,
    pub capped: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    Satisfied,
    Violated,
    Unknown,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::Satisfied => "satisfied",
            Hypothesis::Violated => "violated",
            Hypothesis::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalPoint {
    pub n: u64,
    pub x: f64,
    pub tail: Tail,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SumTheoremReport {
    /// `r_n(x_n)` at each horizon.
    pub diagonal: Vec<DiagonalPoint>,
    pub null: Verdict<bool>,
    /// Richardson estimate of `lim r_n(x_n)` and the size of its last correction.
    pub limit: Option<(f64, f64)>,
    /// Tails at the standard grid, taken at the first horizon.
    pub pointwise: Vec<(f64, Tail)>,
    /// Convergence at every standard grid point.
    pub verdict1821: Hypothesis,
    /// Convergence at the grid and along `x_n`.
    pub verdict1853: Hypothesis,
    pub notes: Vec<String>,
}

struct Term<'a> {
    e: &'a Expr,
}

impl Term<'_> {
    fn at(&self, k: u64, x: f64) -> f64 {
        eval(self.e, &F64Backend, &[("k", k as f64), ("x", x)]).unwrap_or(f64::NAN)
    }
}

/// Compensated running sum.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    carry: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `Σ_{k>n} term(k, x)`, from Hann-weighted averages of partial sums over
/// doubling windows `[K, 2K]` and Richardson extrapolation of those averages.
pub fn tail(term: &Expr, n: u64, x: f64, opts: &SumOptions) -> Tail {
    let term = Term { e: term };
    let cap = opts.cap_factor.saturating_mul(n);
    let mut partial = Neumaier::default();
    let mut k = n;
    let mut window = (2 * n).max(8);
    while k < window {
        k += 1;
        partial.add(term.at(k, x));
    }
    let mut averages: Vec<f64> = Vec::new();
    let mut accelerated: Vec<f64> = Vec::new();
    loop {
        let (mut weighted, mut weights) = (0.0, 0.0);
        for j in 0..=window {
            if j > 0 {
                k += 1;
                partial.add(term.at(k, x));
            }
            let w = (std::f64::consts::PI * j as f64 / window as f64).sin().powi(2);
            weighted += w * partial.value();
            weights += w;
        }
        let t = weighted / weights;
        if !t.is_finite() {
            return Tail { value: f64::NAN, terms: k, capped: true };
        }
        averages.push(t);
        let s = averages.len();
        if s >= 3 {
            if let Some((a, _)) = richardson(&averages[s.saturating_sub(4)..]) {
                accelerated.push(a);
            }
        }
        if s >= 3 && (averages[s - 1] - averages[s - 2]).abs() < opts.tol {
            return Tail { value: t, terms: k, capped: false };
        }
        let a = accelerated.len();
        if a >= 2 && (accelerated[a - 1] - accelerated[a - 2]).abs() < opts.tol {
            return Tail { value: accelerated[a - 1], terms: k, capped: false };
        }
        window *= 2;
        if k + window > cap {
            return Tail { value: t, terms: k, capped: true };
        }
    }
}

/// Richardson extrapolation for values at doubling `n` with error in powers of `1/n`.
fn richardson(values: &[f64]) -> Option<(f64, f64)> {
    if values.len() < 2 {
        return None;
    }
    let mut level = values.to_vec();
    let mut previous = *level.last()?;
    let mut factor = 2.0;
    while level.len() > 1 && factor <= 8.0 {
        let next: Vec<f64> = level.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        previous = *level.last()?;
        level = next;
        factor *= 2.0;
    }
    let best = *level.last()?;
    Some((best, (best - previous).abs()))
}

/// Remainders `r_n(x_n) = Σ_{k>n} term(k, x_n)` and both readings of the
/// convergence hypothesis.
pub fn sum_theorem_diagonal(term: &Expr, x_seq: &Germ, opts: &SumOptions) -> Result<SumTheoremReport> {
    if let Some(v) = term.variables().into_iter().find(|v| v != "k" && v != "x") {
        return Err(Error::usage(format!("series terms use k and x, found {v:?}")));
    }
    if opts.horizons.len() < 2 || opts.horizons.windows(2).any(|w| w[0] >= w[1]) || opts.horizons[0] == 0 {
        return Err(Error::usage("horizons must be positive and strictly increasing"));
    }
    let points: Vec<(u64, f64)> = opts
        .horizons
        .iter()
        .map(|&n| Ok((n, x_seq.sample(n)?.to_f64())))
        .collect::<Result<_>>()?;
    let diagonal: Vec<DiagonalPoint> = points
        .par_iter()
        .map(|&(n, x)| DiagonalPoint { n, x, tail: tail(term, n, x, opts) })
        .collect();
    let first = opts.horizons[0];
    let pointwise: Vec<(f64, Tail)> = opts
        .grid
        .par_iter()
        .map(|&x| (x, tail(term, first, x, opts)))
        .collect();

    let mut notes = vec![
        "both readings of the hypothesis are reported; neither is taken as the intended one".to_string(),
    ];
    let diagonal_capped = diagonal.iter().any(|p| p.tail.capped || p.tail.value.is_nan());
    let values: Vec<(u64, f64)> = diagonal.iter().map(|p| (p.n, p.tail.value)).collect();
    let samples = Samples::from_values(&values);
    let null = if diagonal_capped {
        notes.push("a diagonal tail hit the term cap without converging".into());
        Verdict::unknown(samples.witness())
    } else {
        match samples.null() {
            Some(v) => Verdict::numeric(v, samples.witness()),
            None => Verdict::unknown(samples.witness()),
        }
    };
    let limit = if diagonal_capped {
        None
    } else {
        richardson(&values.iter().map(|p| p.1).collect::<Vec<_>>())
    };

    let verdict1821 = if pointwise.iter().all(|(_, t)| !t.capped && t.value.is_finite()) {
        Hypothesis::Satisfied
    } else {
        notes.push("a pointwise tail hit the term cap without converging".into());
        Hypothesis::Unknown
    };
    let verdict1853 = match (verdict1821, null.answer) {
        (Hypothesis::Satisfied, Some(true)) => Hypothesis::Satisfied,
        (_, Some(false)) => Hypothesis::Violated,
        _ => Hypothesis::Unknown,
    };
    Ok(SumTheoremReport {
        diagonal,
        null: null.with_witness(Witness {
            samples: values,
            note: None,
        }),
        limit,
        pointwise,
        verdict1821,
        verdict1853,
        notes,
    })
}
