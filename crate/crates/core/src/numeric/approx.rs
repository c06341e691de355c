use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of decimal digits claimed by an [`Approx`].
pub const DEFAULT_PRECISION: u32 = 15;

/// Elementary functions understood by every backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Elementary {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Elementary {
    pub const ALL: [Elementary; 6] = [
        Elementary::Sin,
        Elementary::Cos,
        Elementary::Exp,
        Elementary::Log,
        Elementary::Sqrt,
        Elementary::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Exp => "exp",
            Elementary::Log => "log",
            Elementary::Sqrt => "sqrt",
            Elementary::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Elementary::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Plain `f64` evaluation, `None` outside the domain.
    pub fn eval_f64(self, x: f64) -> Option<f64> {
        let y = match self {
            Elementary::Sin => x.sin(),
            Elementary::Cos => x.cos(),
            Elementary::Exp => x.exp(),
            Elementary::Log if x > 0.0 => x.ln(),
            Elementary::Sqrt if x >= 0.0 => x.sqrt(),
            Elementary::Abs => x.abs(),
            Elementary::Log | Elementary::Sqrt => return None,
        };
        Some(y)
    }
}

impl fmt::Display for Elementary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A finite double-precision value tagged with the number of decimal digits
/// it claims to carry.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Approx {
    value: f64,
    precision: u32,
}

impl Approx {
    pub fn new(value: f64, precision: u32) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::domain("approx", format!("non-finite value {value}")));
        }
        Ok(Approx {
            value,
            precision: precision.max(DEFAULT_PRECISION),
        })
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn precision(self) -> u32 {
        self.precision
    }

    fn combine(self, other: Approx, value: f64, op: &str) -> Result<Approx> {
        Approx::new(value, self.precision.min(other.precision))
            .map_err(|_| Error::domain(op, format!("{} {op} {} overflowed", self.value, other.value)))
    }

    pub fn add(self, other: Approx) -> Result<Approx> {
        self.combine(other, self.value + other.value, "add")
    }

    pub fn sub(self, other: Approx) -> Result<Approx> {
        self.combine(other, self.value - other.value, "sub")
    }

    pub fn mul(self, other: Approx) -> Result<Approx> {
        self.combine(other, self.value * other.value, "mul")
    }

    pub fn div(self, other: Approx) -> Result<Approx> {
        if other.value == 0.0 {
            return Err(Error::domain("div", format!("{} / 0", self.value)));
        }
        self.combine(other, self.value / other.value, "div")
    }

    pub fn neg(self) -> Approx {
        Approx {
            value: -self.value,
            precision: self.precision,
        }
    }

    pub fn powf(self, p: f64) -> Result<Approx> {
        if self.value < 0.0 && p.fract() != 0.0 {
            return Err(Error::domain("pow", format!("{}^{p}", self.value)));
        }
        if self.value == 0.0 && p < 0.0 {
            return Err(Error::domain("pow", format!("0^{p}")));
        }
        Approx::new(self.value.powf(p), self.precision)
            .map_err(|_| Error::domain("pow", format!("{}^{p} overflowed", self.value)))
    }

    /// Applies an elementary function; domain violations carry the tag and argument.
    pub fn apply(self, f: Elementary) -> Result<Approx> {
        let y = f
            .eval_f64(self.value)
            .ok_or_else(|| Error::domain(f.name(), format!("argument {}", self.value)))?;
        Approx::new(y, self.precision)
            .map_err(|_| Error::domain(f.name(), format!("argument {} overflowed", self.value)))
    }
}

impl fmt::Display for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.value)
    }
}
