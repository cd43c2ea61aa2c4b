//! The lower rate operator on a finite count window and the extreme-point
//! structure that dominates it.
//!
//! On a window `{base..top}` the operator acts as
//! `[Qg](x) = min over rates in the interval of rate * (g(x+1) - g(x))`
//! for `x < top`, with the top row forced to zero. Every linear operator
//! built from a per-state rate selection inside the interval dominates it;
//! the lower operator is their pointwise minimum.

use crate::error::{Error, Result};
use crate::Count;

/// A closed interval of admissible event rates, `0 <= lower <= upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateInterval {
    lower: f64,
    upper: f64,
}

impl RateInterval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rates must be finite, got [{lower}, {upper}]"
            )));
        }
        if lower < 0.0 || lower > upper {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= lower <= upper, got [{lower}, {upper}]"
            )));
        }
        Ok(RateInterval { lower, upper })
    }

    /// Degenerate interval `[rate, rate]`.
    pub fn degenerate(rate: f64) -> Result<Self> {
        RateInterval::new(rate, rate)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Operator norm of the lower rate operator: `2 * upper`.
    pub fn operator_norm(&self) -> f64 {
        2.0 * self.upper
    }
}

/// A real-valued function on the count window `{base..base + len - 1}`,
/// extended by a constant `tail` above the window.
///
/// When the window represents a truncation of some `f` at the window top,
/// the convention is `tail = values[last]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowFunction {
    base: Count,
    values: Vec<f64>,
    tail: f64,
}

impl WindowFunction {
    pub fn new(base: Count, values: Vec<f64>, tail: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(
                "window must contain at least one state".into(),
            ));
        }
        if !tail.is_finite() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "window values must be finite".into(),
            ));
        }
        Ok(WindowFunction { base, values, tail })
    }

    /// Restriction of `f` to `{base..top}` with tail `f(top)`, the truncation
    /// used by the recursion engines.
    pub fn restrict<F: Fn(Count) -> f64>(base: Count, top: Count, f: F) -> Result<Self> {
        if top < base {
            return Err(Error::InvalidParameter(format!(
                "window top {top} below base {base}"
            )));
        }
        let values: Vec<f64> = (base..=top).map(&f).collect();
        let tail = *values.last().unwrap();
        WindowFunction::new(base, values, tail)
    }

    pub fn base(&self) -> Count {
        self.base
    }

    pub fn top(&self) -> Count {
        self.base + (self.values.len() as Count - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Value at any count: window entry inside, tail constant above.
    /// Counts below the window base are outside the function's domain.
    pub fn value_at(&self, y: Count) -> Result<f64> {
        if y < self.base {
            return Err(Error::InvalidParameter(format!(
                "count {y} below window base {}",
                self.base
            )));
        }
        let idx = (y - self.base) as usize;
        Ok(self.values.get(idx).copied().unwrap_or(self.tail))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .fold(self.tail.abs(), |acc, v| acc.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(self.tail, |acc, v| acc.min(*v))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(self.tail, |acc, v| acc.max(*v))
    }

    /// The pointwise negation.
    pub fn negated(&self) -> WindowFunction {
        WindowFunction {
            base: self.base,
            values: self.values.iter().map(|v| -v).collect(),
            tail: -self.tail,
        }
    }
}

/// A per-state rate assignment on a window, one rate for every state below
/// the top, each inside the interval. Characterizes the linear operators
/// dominating the lower one.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSelection {
    rates: Vec<f64>,
}

impl RateSelection {
    pub fn new(interval: &RateInterval, rates: Vec<f64>) -> Result<Self> {
        for &r in &rates {
            if !(r >= interval.lower() && r <= interval.upper()) {
                return Err(Error::InvalidParameter(format!(
                    "rate {r} outside [{}, {}]",
                    interval.lower(),
                    interval.upper()
                )));
            }
        }
        Ok(RateSelection { rates })
    }

    /// Constant selection, the linear generator of a single rate.
    pub fn constant(interval: &RateInterval, rate: f64, len: usize) -> Result<Self> {
        RateSelection::new(interval, vec![rate; len])
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }
}

/// One backward Euler update `v <- v + dt * Qv` with the lower operator,
/// in place. The top entry is left untouched (zeroed top row).
///
/// Ascending order is safe: entry `x` is rewritten only after `x` and
/// `x + 1` have been read.
#[inline]
pub(crate) fn lower_step_in_place(interval: &RateInterval, dt: f64, v: &mut [f64]) {
    let (lo, hi) = (interval.lower(), interval.upper());
    for x in 0..v.len().saturating_sub(1) {
        let d = v[x + 1] - v[x];
        let rate = if d >= 0.0 { lo } else { hi };
        v[x] += dt * (rate * d);
    }
}

/// As [`lower_step_in_place`], with a fixed per-state rate assignment.
#[inline]
pub(crate) fn selected_step_in_place(rates: &[f64], dt: f64, v: &mut [f64]) {
    debug_assert_eq!(rates.len() + 1, v.len().max(1));
    for x in 0..v.len().saturating_sub(1) {
        let d = v[x + 1] - v[x];
        v[x] += dt * (rates[x] * d);
    }
}

/// Apply the lower rate operator to a window function.
///
/// The difference `d = g(x+1) - g(x)` picks the lower rate when `d >= 0`
/// (ties at `d = 0` resolve to the lower rate) and the upper rate otherwise;
/// the top row and the tail are zero.
pub fn apply_lower_generator(interval: &RateInterval, g: &WindowFunction) -> WindowFunction {
    let (lo, hi) = (interval.lower(), interval.upper());
    let v = g.values();
    let mut out = vec![0.0; v.len()];
    for x in 0..v.len().saturating_sub(1) {
        let d = v[x + 1] - v[x];
        let rate = if d >= 0.0 { lo } else { hi };
        out[x] = rate * d;
    }
    WindowFunction {
        base: g.base(),
        values: out,
        tail: 0.0,
    }
}

/// Apply the linear operator of a per-state rate selection.
pub fn apply_selected_generator(
    selection: &RateSelection,
    g: &WindowFunction,
) -> Result<WindowFunction> {
    let v = g.values();
    if selection.len() + 1 != v.len() {
        return Err(Error::DimensionMismatch {
            expected: v.len().saturating_sub(1),
            got: selection.len(),
        });
    }
    let mut out = vec![0.0; v.len()];
    for x in 0..v.len() - 1 {
        out[x] = selection.rates()[x] * (v[x + 1] - v[x]);
    }
    Ok(WindowFunction {
        base: g.base(),
        values: out,
        tail: 0.0,
    })
}
