//! Brute-force verifiers, independent of the engine they check.
//!
//! The recursion's lower operator is the pointwise minimum over all linear
//! operators built from per-state rate selections inside the interval; on a
//! per-step basis the minimized quantity is linear in each rate, so interior
//! rates never beat the endpoints and enumerating endpoint assignments per
//! step and state is exhaustive. That enumeration, and a compensated-sum
//! series, reproduce the engine's answers from first principles on small
//! instances.

use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::generator::{selected_step_in_place, RateInterval, WindowFunction};
use crate::semigroup::TimeGrid;
use crate::Count;

/// Enumeration limits: window length, step count, and implicitly the
/// assignment count `2^((window - 1) * steps) <= 2^16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    max_window: usize,
    max_steps: usize,
}

impl OracleBudget {
    pub fn new(max_window: usize, max_steps: usize) -> Result<Self> {
        if max_window == 0 || max_window > 5 {
            return Err(Error::OracleBudget(format!(
                "window budget must be 1..=5, got {max_window}"
            )));
        }
        if max_steps > 4 {
            return Err(Error::OracleBudget(format!(
                "step budget must be <= 4, got {max_steps}"
            )));
        }
        if (max_window - 1) * max_steps > 16 {
            return Err(Error::OracleBudget(format!(
                "2^({} * {}) assignments exceed 2^16",
                max_window - 1,
                max_steps
            )));
        }
        Ok(OracleBudget {
            max_window,
            max_steps,
        })
    }

    pub fn max_window(&self) -> usize {
        self.max_window
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_window: 4,
            max_steps: 3,
        }
    }
}

/// Componentwise minimum of the backward product over every per-step,
/// per-state assignment of endpoint rates.
///
/// Dominates the engine's product by construction and coincides with it on
/// every in-budget instance.
pub fn brute_force_phi(
    interval: &RateInterval,
    grid: &TimeGrid,
    g: &WindowFunction,
    budget: &OracleBudget,
) -> Result<WindowFunction> {
    let w = g.len();
    let n = grid.steps() as usize;
    if w > budget.max_window || n > budget.max_steps {
        return Err(Error::OracleBudget(format!(
            "instance (window {w}, steps {n}) exceeds budget \
             (window {}, steps {})",
            budget.max_window, budget.max_steps
        )));
    }
    if grid.sigma() * interval.operator_norm() > 2.0 {
        return Err(Error::StepTooLarge {
            dt: grid.sigma(),
            norm: interval.operator_norm(),
        });
    }
    if n == 0 || w == 1 {
        return Ok(g.clone());
    }

    let dt = grid.sigma();
    let states = w - 1;
    let bits = states * n;
    let mut min_values = vec![f64::INFINITY; w];
    let mut rates = vec![0.0f64; states];
    let mut scratch;
    for mask in 0u32..(1u32 << bits) {
        scratch = g.values().to_vec();
        for step in 0..n {
            for (state, rate) in rates.iter_mut().enumerate() {
                let bit = step * states + state;
                *rate = if mask >> bit & 1 == 1 {
                    interval.upper()
                } else {
                    interval.lower()
                };
            }
            selected_step_in_place(&rates, dt, &mut scratch);
        }
        for (m, v) in min_values.iter_mut().zip(&scratch) {
            *m = m.min(*v);
        }
    }
    WindowFunction::new(g.base(), min_values, g.tail())
}

/// Plain compensated (Kahan) sum of the first `terms` series terms
/// `f(x + k) * pmf(rate * (s - t), k)`, with the pmf built by the
/// multiplicative recurrence rather than the log-space route the engine
/// uses. Cross-checks the engine's series on modest means.
pub fn series_expectation_oracle(
    rate: f64,
    t: f64,
    s: f64,
    x: Count,
    f: &FunctionSpec,
    terms: u64,
) -> Result<f64> {
    if terms == 0 {
        return Err(Error::InvalidParameter(
            "need at least one series term".into(),
        ));
    }
    if !rate.is_finite() || rate < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "rate must be finite and >= 0, got {rate}"
        )));
    }
    if !(t.is_finite() && s.is_finite() && 0.0 <= t && t <= s) {
        return Err(Error::InvalidParameter(format!(
            "times must be finite with 0 <= t <= s, got t = {t}, s = {s}"
        )));
    }
    let mean = rate * (s - t);
    let mut weight = (-mean).exp();
    let mut sum = 0.0;
    let mut carry = 0.0;
    for k in 0..terms {
        let term = f.eval(x + k) * weight;
        let y = term - carry;
        let tmp = sum + y;
        carry = (tmp - sum) - y;
        sum = tmp;
        weight *= mean / (k + 1) as f64;
    }
    Ok(sum)
}
