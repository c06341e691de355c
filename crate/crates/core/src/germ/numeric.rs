//! Sampling tier: evidence from evaluating a germ at a ladder of horizons.
//!
//! Each horizon contributes a window of consecutive indices so that parity
//! oscillation such as `(-1)^n` is always visible.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{eval_at, Expr, F64Backend};
use crate::numeric::Scalar;
use crate::verdict::Witness;

/// Consecutive indices sampled at each horizon.
pub const WINDOW: u64 = 16;

/// Horizons used by the decisions below; earlier ones only feed slope fits.
const TAIL: usize = 4;

/// Relative agreement required for a numeric limit.
pub const LIMIT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorizonSchedule(Vec<u64>);

impl HorizonSchedule {
    pub fn new(horizons: Vec<u64>) -> Result<Self> {
        if horizons.len() < 2 {
            return Err(Error::usage("a horizon schedule needs at least two entries"));
        }
        if horizons.windows(2).any(|w| w[0] >= w[1]) || horizons[0] == 0 {
            return Err(Error::usage(format!(
                "horizons must be positive and strictly increasing, got {horizons:?}"
            )));
        }
        Ok(HorizonSchedule(horizons))
    }

    pub fn horizons(&self) -> &[u64] {
        &self.0
    }
}

impl Default for HorizonSchedule {
    /// `2^10, 2^14, ..., 2^46`.
    fn default() -> Self {
        HorizonSchedule((10..=46).step_by(4).map(|k| 1u64 << k).collect())
    }
}

/// Samples at one horizon: `(index, value)` for every index where the body is defined.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub horizon: u64,
    pub points: Vec<(u64, f64)>,
}

impl Row {
    fn max_abs(&self) -> f64 {
        self.points.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max)
    }

    fn min_abs(&self) -> f64 {
        self.points.iter().map(|(_, v)| v.abs()).fold(f64::INFINITY, f64::min)
    }

    fn mean(&self) -> f64 {
        self.points.iter().map(|(_, v)| v).sum::<f64>() / self.points.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    pub rows: Vec<Row>,
}

/// Evaluates `body` at each horizon window, skipping indices where it is
/// undefined or overridden (finitely many exceptions never change a germ).
pub fn sample_expr(
    body: &Expr,
    skip: &BTreeMap<u64, Scalar>,
    schedule: &HorizonSchedule,
) -> Samples {
    let rows = schedule
        .horizons()
        .par_iter()
        .map(|&h| {
            let points = (h..h.saturating_add(WINDOW))
                .filter(|k| !skip.contains_key(k))
                .filter_map(|k| {
                    eval_at(body, &F64Backend, k as f64)
                        .ok()
                        .map(|v| (k, v))
                })
                .collect();
            Row { horizon: h, points }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .filter(|r: &Row| !r.points.is_empty())
        .collect();
    Samples { rows }
}

impl Samples {
    /// One value per horizon, for sequences computed outside the expression engine.
    pub fn from_values(values: &[(u64, f64)]) -> Self {
        Samples {
            rows: values
                .iter()
                .filter(|(_, v)| !v.is_nan())
                .map(|&(h, v)| Row {
                    horizon: h,
                    points: vec![(h, v)],
                })
                .collect(),
        }
    }

    fn tail(&self) -> Option<&[Row]> {
        (self.rows.len() >= TAIL).then(|| &self.rows[self.rows.len() - TAIL..])
    }

    pub fn witness(&self) -> Witness {
        Witness {
            samples: self
                .rows
                .iter()
                .filter_map(|r| r.points.first().copied())
                .collect(),
            note: None,
        }
    }

    /// `|v| · n^r` computed in log space, for order searches.
    pub fn rescaled(&self, r: f64) -> Samples {
        Samples {
            rows: self
                .rows
                .iter()
                .map(|row| Row {
                    horizon: row.horizon,
                    points: row
                        .points
                        .iter()
                        .map(|&(k, v)| (k, (v.abs().ln() + r * (k as f64).ln()).exp()))
                        .collect(),
                })
                .collect(),
        }
    }

    /// Eventual sign: every sample in the last horizons shares one sign and
    /// the magnitudes trend monotonically.
    pub fn sign(&self) -> Option<Ordering> {
        let tail = self.tail()?;
        let values: Vec<f64> = tail.iter().flat_map(|r| r.points.iter().map(|p| p.1)).collect();
        if values.iter().all(|v| *v == 0.0) {
            return Some(Ordering::Equal);
        }
        let positive = values.iter().all(|v| *v > 0.0);
        let negative = values.iter().all(|v| *v < 0.0);
        if !(positive || negative) {
            return None;
        }
        let mags: Vec<f64> = tail.iter().map(Row::max_abs).collect();
        if !(non_decreasing(&mags) || non_increasing(&mags)) {
            return None;
        }
        Some(if positive { Ordering::Greater } else { Ordering::Less })
    }

    /// Nullness from the decay of the window maxima and an Aitken estimate
    /// of their limit.
    pub fn null(&self) -> Option<bool> {
        let tail = self.tail()?;
        let a: Vec<f64> = tail.iter().map(Row::max_abs).collect();
        let last = a[TAIL - 1];
        if a.iter().all(|v| *v == 0.0) {
            return Some(true);
        }
        if !last.is_finite() {
            return Some(false);
        }
        let decreasing = a.windows(2).all(|w| w[1] < w[0]);
        if !decreasing {
            return (non_decreasing(&a) && last > 0.0).then_some(false);
        }
        let limit = aitken(a[TAIL - 3], a[TAIL - 2], a[TAIL - 1]).unwrap_or(last);
        if limit <= 0.05 * last {
            Some(true)
        } else if limit >= 0.5 * last {
            Some(false)
        } else {
            None
        }
    }

    /// Value the samples settle on within [`LIMIT_TOL`], or `±∞` for
    /// monotone growth whose increments do not shrink.
    pub fn limit(&self) -> Option<NumericLimit> {
        let tail = self.tail()?;
        let last = tail[TAIL - 1].mean();
        let scale = last.abs().max(f64::MIN_POSITIVE);
        if tail
            .iter()
            .flat_map(|r| r.points.iter())
            .all(|(_, v)| (v - last).abs() <= LIMIT_TOL * scale)
        {
            return Some(NumericLimit::Finite(last));
        }
        let sign = self.sign()?;
        let a: Vec<f64> = tail.iter().map(Row::min_abs).collect();
        let increments: Vec<f64> = a.windows(2).map(|w| w[1] - w[0]).collect();
        let growing = increments.iter().all(|d| *d > 0.0)
            && increments.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9));
        match (growing, sign) {
            (true, Ordering::Greater) => Some(NumericLimit::Infinite(1)),
            (true, Ordering::Less) => Some(NumericLimit::Infinite(-1)),
            _ => None,
        }
    }

    /// Least-squares slope of `ln max|v|` against `ln n` over all horizons.
    pub fn envelope_slope(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .map(|r| ((r.horizon as f64).ln(), r.max_abs().ln()))
            .filter(|(_, y)| y.is_finite())
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        Some(sxy / sxx)
    }

    /// Spread `max|v| / min|v|` inside the last window.
    pub fn last_window_spread(&self) -> Option<f64> {
        let r = self.rows.last()?;
        Some(r.max_abs() / r.min_abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NumericLimit {
    Finite(f64),
    Infinite(i32),
}

fn non_decreasing(a: &[f64]) -> bool {
    a.windows(2).all(|w| w[1] >= w[0])
}

fn non_increasing(a: &[f64]) -> bool {
    a.windows(2).all(|w| w[1] <= w[0])
}

/// Aitken's Δ² extrapolation of three successive terms.
pub fn aitken(a0: f64, a1: f64, a2: f64) -> Option<f64> {
    let d1 = a1 - a0;
    let d2 = a2 - a1;
    let denom = d2 - d1;
    (denom != 0.0 && denom.is_finite()).then(|| a2 - d2 * d2 / denom)
}
