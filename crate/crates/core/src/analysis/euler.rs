use crate::error::{Error, Result};
use crate::numeric::{Elementary, Rational, Scalar, DEFAULT_PRECISION};

/// One term of the expansion of `cos(n z)` with `n z = v`.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerTerm {
    pub k: u32,
    /// `C(n, 2k) · cos(v/n)^(n-2k) · sin(v/n)^(2k)` at `n = horizon`.
    pub value: Scalar,
    /// `v^(2k) / (2k)!`
    pub target: Scalar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EulerReport {
    pub v: Scalar,
    pub horizon: u64,
    pub terms: Vec<EulerTerm>,
    /// `Σ (-1)^k T_k`
    pub partial_sum: Scalar,
    pub cosine: Scalar,
}

/// Evaluates the de Moivre expansion of `cos v = cos(n · v/n)` term by term
/// at a large `n`, next to the power series coefficients it tends to.
pub fn euler_cosine(v: &Scalar, k_max: u32, horizon: u64) -> Result<EulerReport> {
    if horizon < 10 * u64::from(k_max).max(1) {
        return Err(Error::usage(format!("horizon must be at least 10·k_max = {}", 10 * k_max)));
    }
    let p = DEFAULT_PRECISION;
    let mut terms = Vec::with_capacity(k_max as usize + 1);
    let mut partial = Scalar::zero();
    for k in 0..=k_max {
        let target = v
            .pow_rational(&Rational::from_integer(2 * k), p)?
            .mul(&Scalar::Exact(Rational::factorial_recip(2 * k)))?;
        let value = term(v, k, horizon)?;
        let signed = if k % 2 == 0 { value.clone() } else { value.neg() };
        partial = partial.add(&signed)?;
        terms.push(EulerTerm { k, value, target });
    }
    Ok(EulerReport {
        v: v.clone(),
        horizon,
        terms,
        partial_sum: partial,
        cosine: v.apply(Elementary::Cos, p)?,
    })
}

fn term(v: &Scalar, k: u32, n: u64) -> Result<Scalar> {
    if k == 0 && v.is_zero() {
        return Ok(Scalar::one());
    }
    if v.is_zero() {
        return Ok(Scalar::zero());
    }
    let (vf, nf) = (v.to_f64(), n as f64);
    let z = vf / nf;
    let two_k = 2 * k as u64;
    // n(n-1)...(n-2k+1) / n^(2k) as a sum of logarithms
    let falling: f64 = (0..two_k).map(|j| (-(j as f64) / nf).ln_1p()).sum();
    let half = (z / 2.0).sin();
    let log_cos = (-2.0 * half * half).ln_1p();
    let log_nsin = (nf * z.sin().abs()).ln();
    let log_fact: f64 = (1..=two_k).map(|j| (j as f64).ln()).sum();
    let log_t = falling + two_k as f64 * log_nsin - log_fact + (nf - two_k as f64) * log_cos;
    Scalar::approx(log_t.exp(), DEFAULT_PRECISION)
}
