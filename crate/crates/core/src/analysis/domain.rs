use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{eval, parse, ScalarBackend};
use crate::numeric::{Rational, Scalar};

/// An interval of the real line; `None` marks an infinite end.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    pub lower: Option<Scalar>,
    pub upper: Option<Scalar>,
    pub lower_open: bool,
    pub upper_open: bool,
}

impl DomainSpec {
    pub fn new(lower: Option<Scalar>, upper: Option<Scalar>, lower_open: bool, upper_open: bool) -> Result<Self> {
        if let (Some(a), Some(b)) = (&lower, &upper) {
            if a.compare(b) != Some(Ordering::Less) {
                return Err(Error::usage(format!("empty domain: {a} is not below {b}")));
            }
        }
        Ok(DomainSpec {
            lower_open: lower_open || lower.is_none(),
            upper_open: upper_open || upper.is_none(),
            lower,
            upper,
        })
    }

    pub fn real_line() -> Self {
        DomainSpec {
            lower: None,
            upper: None,
            lower_open: true,
            upper_open: true,
        }
    }

    /// Parses interval notation such as `(0,1)`, `[0,1]`, `(a,inf)`, `(-inf,inf)`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = || Error::usage(format!("expected an interval like \"(0,1)\" or \"[0,inf)\", got {text:?}"));
        let lower_open = match t.chars().next() {
            Some('(') => true,
            Some('[') => false,
            _ => return Err(bad()),
        };
        let upper_open = match t.chars().last() {
            Some(')') => true,
            Some(']') => false,
            _ => return Err(bad()),
        };
        let inner = &t[1..t.len() - 1];
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let lower = parse_end(a, -1)?;
        let upper = parse_end(b, 1)?;
        if (lower.is_none() && !lower_open) || (upper.is_none() && !upper_open) {
            return Err(Error::usage("infinite ends must be open"));
        }
        DomainSpec::new(lower, upper, lower_open, upper_open)
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        let above = match &self.lower {
            None => true,
            Some(a) => match x.compare(a) {
                Some(Ordering::Greater) => true,
                Some(Ordering::Equal) => !self.lower_open,
                _ => false,
            },
        };
        let below = match &self.upper {
            None => true,
            Some(b) => match x.compare(b) {
                Some(Ordering::Less) => true,
                Some(Ordering::Equal) => !self.upper_open,
                _ => false,
            },
        };
        above && below
    }

    /// `size` equally spaced standard points; endpoints only when closed.
    /// Unbounded sides are stepped in unit increments.
    pub fn grid(&self, size: usize) -> Result<Vec<Scalar>> {
        if size < 3 {
            return Err(Error::usage("the standard grid needs at least 3 points"));
        }
        let m = size as i64;
        let points = match (&self.lower, &self.upper) {
            (Some(a), Some(b)) => {
                let (first, slots) = match (self.lower_open, self.upper_open) {
                    (false, false) => (0, m - 1),
                    (false, true) => (0, m),
                    (true, false) => (1, m),
                    (true, true) => (1, m + 1),
                };
                let width = b.sub(a)?;
                (first..first + m)
                    .map(|j| a.add(&width.mul(&Scalar::Exact(Rational::frac(j, slots)))?))
                    .collect::<Result<Vec<_>>>()?
            }
            (Some(a), None) => {
                let first = i64::from(self.lower_open);
                (first..first + m).map(|j| a.add(&Scalar::int(j))).collect::<Result<_>>()?
            }
            (None, Some(b)) => {
                let first = i64::from(self.upper_open);
                let mut v = (first..first + m).map(|j| b.sub(&Scalar::int(j))).collect::<Result<Vec<_>>>()?;
                v.reverse();
                v
            }
            (None, None) => (0..m)
                .map(|j| Scalar::Exact(Rational::frac(2 * j - (m - 1), 2)))
                .collect(),
        };
        Ok(points)
    }

    /// Infinitesimal and infinite probes the domain admits.
    pub fn germ_probes(&self) -> Vec<ProbePoint> {
        let mut out = Vec::new();
        match &self.lower {
            Some(a) if self.lower_open => out.push(ProbePoint::Boundary {
                endpoint: a.clone(),
                side: Side::Above,
            }),
            None => out.push(ProbePoint::Infinite { sign: -1 }),
            _ => {}
        }
        match &self.upper {
            Some(b) if self.upper_open => out.push(ProbePoint::Boundary {
                endpoint: b.clone(),
                side: Side::Below,
            }),
            None => out.push(ProbePoint::Infinite { sign: 1 }),
            _ => {}
        }
        out
    }

    /// Whether `p` is a legal probe for this domain.
    pub fn admits(&self, p: &ProbePoint) -> bool {
        match p {
            ProbePoint::Standard(x) => self.contains(x),
            _ => self.germ_probes().contains(p),
        }
    }
}

fn parse_end(text: &str, default_sign: i32) -> Result<Option<Scalar>> {
    let t = text.trim();
    let infinite = |s: &str| matches!(s, "inf" | "infinity" | "oo");
    if let Some(rest) = t.strip_prefix('-') {
        if infinite(rest.trim()) {
            return if default_sign < 0 { Ok(None) } else { Err(Error::usage("upper end cannot be -inf")) };
        }
    }
    if infinite(t.trim_start_matches('+')) {
        return if default_sign > 0 { Ok(None) } else { Err(Error::usage("lower end cannot be +inf")) };
    }
    let e = parse(t)?;
    if !e.variables().is_empty() {
        return Err(Error::usage(format!("interval ends must be constants, got {t:?}")));
    }
    Ok(Some(eval(&e, &ScalarBackend::default(), &[])?))
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let end = |x: &Option<Scalar>, inf: &str| x.as_ref().map_or(inf.to_string(), |s| s.to_string());
        write!(
            f,
            "{}{},{}{}",
            if self.lower_open { '(' } else { '[' },
            end(&self.lower, "-inf"),
            end(&self.upper, "inf"),
            if self.upper_open { ')' } else { ']' }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `a + 1/n`
    Above,
    /// `a - 1/n`
    Below,
}

impl Side {
    pub fn sign(self) -> i32 {
        match self {
            Side::Above => 1,
            Side::Below => -1,
        }
    }
}

/// Where continuity is tested.
#[derive(Clone, Debug, PartialEq)]
pub enum ProbePoint {
    Standard(Scalar),
    /// The germ `endpoint ± 1/n`.
    Boundary { endpoint: Scalar, side: Side },
    /// The germ `n` or `-n`.
    Infinite { sign: i32 },
}

impl ProbePoint {
    /// Parses `standard:X0`, `boundary:A+`, `boundary:A-`, `infinite`, `infinite:-`.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, arg) = text.split_once(':').unwrap_or((text, ""));
        let constant = |s: &str| -> Result<Scalar> {
            let e = parse(s)?;
            if !e.variables().is_empty() {
                return Err(Error::usage(format!("probe points must be constants, got {s:?}")));
            }
            eval(&e, &ScalarBackend::default(), &[])
        };
        match kind.trim() {
            "standard" => Ok(ProbePoint::Standard(constant(arg)?)),
            "boundary" => {
                let arg = arg.trim();
                let (point, side) = if let Some(a) = arg.strip_suffix('+') {
                    (a, Side::Above)
                } else if let Some(a) = arg.strip_suffix('-') {
                    (a, Side::Below)
                } else {
                    return Err(Error::usage("boundary probes end in + or -, e.g. boundary:0+"));
                };
                Ok(ProbePoint::Boundary {
                    endpoint: constant(point)?,
                    side,
                })
            }
            "infinite" => match arg.trim() {
                "" | "+" => Ok(ProbePoint::Infinite { sign: 1 }),
                "-" => Ok(ProbePoint::Infinite { sign: -1 }),
                other => Err(Error::usage(format!("infinite probes take + or -, got {other:?}"))),
            },
            other => Err(Error::usage(format!(
                "unknown probe kind {other:?}; expected standard, boundary or infinite"
            ))),
        }
    }
}

impl fmt::Display for ProbePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbePoint::Standard(x) => write!(f, "standard:{x}"),
            ProbePoint::Boundary { endpoint, side } => {
                write!(f, "boundary:{endpoint}{}", if *side == Side::Above { '+' } else { '-' })
            }
            ProbePoint::Infinite { sign } => write!(f, "infinite:{}", if *sign < 0 { '-' } else { '+' }),
        }
    }
}
