use std::fmt;

use serde::Serialize;

/// How a verdict was reached. Only the dominance rules and exact identities
/// produce `Symbolic`; sampling produces `Numeric` evidence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Grade {
    Symbolic,
    Numeric,
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Grade::Symbolic => "symbolic",
            Grade::Numeric => "numeric",
        })
    }
}

/// Samples backing a numeric verdict: `(index, value)` pairs in horizon order.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Witness {
    pub samples: Vec<(u64, f64)>,
    pub note: Option<String>,
}

impl Witness {
    pub fn note(text: impl Into<String>) -> Self {
        Witness {
            samples: Vec::new(),
            note: Some(text.into()),
        }
    }
}

/// A three-valued answer: decided with a grade, or unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict<T> {
    pub answer: Option<T>,
    pub grade: Grade,
    pub witness: Witness,
}

impl<T> Verdict<T> {
    pub fn symbolic(answer: T) -> Self {
        Verdict {
            answer: Some(answer),
            grade: Grade::Symbolic,
            witness: Witness::default(),
        }
    }

    pub fn numeric(answer: T, witness: Witness) -> Self {
        Verdict {
            answer: Some(answer),
            grade: Grade::Numeric,
            witness,
        }
    }

    pub fn unknown(witness: Witness) -> Self {
        Verdict {
            answer: None,
            grade: Grade::Numeric,
            witness,
        }
    }

    pub fn is_decided(&self) -> bool {
        self.answer.is_some()
    }

    pub fn is_symbolic(&self) -> bool {
        self.answer.is_some() && self.grade == Grade::Symbolic
    }

    pub fn with_witness(mut self, witness: Witness) -> Self {
        self.witness = witness;
        self
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Verdict<U> {
        Verdict {
            answer: self.answer.map(f),
            grade: self.grade,
            witness: self.witness,
        }
    }
}

impl<T: PartialEq> Verdict<T> {
    pub fn is(&self, value: &T) -> bool {
        self.answer.as_ref() == Some(value)
    }
}
