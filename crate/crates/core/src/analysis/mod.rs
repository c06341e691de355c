//! Applications: derivatives as standard parts, microcontinuity probes,
//! the diagonal check of the sum theorem and the infinite-`n` cosine.

mod derivative;
mod domain;
mod euler;
mod micro;
mod sumthm;

pub use derivative::{derivative_st, free_variable, increment, SeriesOptions};
pub use domain::{DomainSpec, ProbePoint, Side};
pub use euler::{euler_cosine, EulerReport, EulerTerm};
pub use micro::{
    classify_uniform, microcontinuity_at, Family, MicroOptions, MicroOutcome, MicroVerdict, ProbeEntry,
    ProbeStatus, Refutation, UniformClass, UniformReport,
};
pub use sumthm::{sum_theorem_diagonal, tail, DiagonalPoint, Hypothesis, SumOptions, SumTheoremReport, Tail};
