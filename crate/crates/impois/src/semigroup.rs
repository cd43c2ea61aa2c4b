//! The backward-recursion engine behind the consistent-set bounds.
//!
//! The lower transition operator over `[t, s]` is the limit of products
//! `(I + dt * Q)^n` over ever finer uniform grids. On a finite window the
//! product is computed by backward recursion; the grid is selected a priori
//! from the operator-norm error bound
//!
//! ```text
//! |limit - product| <= sigma * (s - t) * (2 * upper_rate)^2 * ||g||
//! ```
//!
//! valid whenever `sigma * 2 * upper_rate <= 2`. Three entry points cover
//! eventually constant, bounded, and growth-bounded functions.

use crate::error::{Error, Result};
use crate::exact;
use crate::function::FunctionSpec;
use crate::generator::{lower_step_in_place, RateInterval, WindowFunction};
use crate::Count;

/// Default cap on the number of grid steps a single query may request.
pub const DEFAULT_MAX_STEPS: u64 = 100_000_000;

/// Cap on grid steps; the `IMPOIS_MAX_STEPS` environment variable overrides
/// the default, checked at every grid selection.
fn max_steps_cap() -> u64 {
    std::env::var("IMPOIS_MAX_STEPS")
        .ok()
        .and_then(|v| v.parse::<u64>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_MAX_STEPS)
}

/// A uniform partition of `[start, end]` into `steps` pieces. `steps = 0`
/// only for the degenerate single-point grid `start = end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    start: f64,
    end: f64,
    steps: u64,
}

impl TimeGrid {
    pub fn uniform(start: f64, end: f64, steps: u64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && 0.0 <= start && start <= end) {
            return Err(Error::InvalidParameter(format!(
                "need finite 0 <= start <= end, got [{start}, {end}]"
            )));
        }
        if steps == 0 && start < end {
            return Err(Error::InvalidParameter(
                "a grid over a nonempty interval needs at least one step".into(),
            ));
        }
        Ok(TimeGrid { start, end, steps })
    }

    /// The single-point grid at `t`.
    pub fn point(t: f64) -> Self {
        TimeGrid {
            start: t,
            end: t,
            steps: 0,
        }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    /// The grid granularity `(end - start) / steps`, zero for a point grid.
    pub fn sigma(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.duration() / self.steps as f64
        }
    }
}

/// A window image together with the a-priori sup-norm error of the grid
/// that produced it.
#[derive(Debug, Clone)]
pub struct ApproxResult {
    pub values: WindowFunction,
    pub a_priori_error: f64,
    pub grid: TimeGrid,
}

impl ApproxResult {
    /// The count window the recursion ran on.
    pub fn window(&self) -> (Count, Count) {
        (self.values.base(), self.values.top())
    }
}

/// A computed lower/upper pair with its a-priori error bound and the window
/// and grid actually used. Each of `lower` and `upper` is within
/// `error_bound` of the exact quantity it approximates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    pub lower: f64,
    pub upper: f64,
    pub error_bound: f64,
    pub truncation_top: Count,
    pub steps: u64,
}

impl BoundResult {
    fn exact(value: f64, top: Count) -> Self {
        BoundResult {
            lower: value,
            upper: value,
            error_bound: 0.0,
            truncation_top: top,
            steps: 0,
        }
    }
}

fn validate_times(t: f64, s: f64) -> Result<()> {
    if !(t.is_finite() && s.is_finite() && 0.0 <= t && t <= s) {
        return Err(Error::InvalidParameter(format!(
            "times must be finite with 0 <= t <= s, got t = {t}, s = {s}"
        )));
    }
    Ok(())
}

fn validate_eps(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {eps}"
        )));
    }
    Ok(())
}

/// Sup-norm bound on the distance between the exact operator over the grid's
/// interval and the grid's backward product, for inputs of the given norm.
pub fn a_priori_error(interval: &RateInterval, grid: &TimeGrid, g_norm: f64) -> f64 {
    let nrm = interval.operator_norm();
    grid.sigma() * grid.duration() * nrm * nrm * g_norm
}

/// One Euler step `g + dt * Qg` with the lower rate operator.
///
/// Refuses `dt * 2 * upper_rate > 2` (the product would leave the class of
/// transition operators); never clamps. Each output entry is a convex
/// combination of two input entries, so the result stays inside
/// `[min g, max g]`.
pub fn euler_step(interval: &RateInterval, g: &WindowFunction, dt: f64) -> Result<WindowFunction> {
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step size must be finite and >= 0, got {dt}"
        )));
    }
    if dt * interval.operator_norm() > 2.0 {
        return Err(Error::StepTooLarge {
            dt,
            norm: interval.operator_norm(),
        });
    }
    let mut values = g.values().to_vec();
    lower_step_in_place(interval, dt, &mut values);
    WindowFunction::new(g.base(), values, g.tail())
}

/// The backward product of `grid.steps` Euler steps applied to `g`
/// (rightmost factor first). A point grid is the identity.
pub fn phi_apply(
    interval: &RateInterval,
    grid: &TimeGrid,
    g: &WindowFunction,
) -> Result<WindowFunction> {
    if grid.steps() == 0 {
        return Ok(g.clone());
    }
    let dt = grid.sigma();
    if dt * interval.operator_norm() > 2.0 {
        return Err(Error::StepTooLarge {
            dt,
            norm: interval.operator_norm(),
        });
    }
    let mut values = g.values().to_vec();
    for _ in 0..grid.steps() {
        lower_step_in_place(interval, dt, &mut values);
    }
    WindowFunction::new(g.base(), values, g.tail())
}

/// The backward product evaluated only at the window base.
///
/// Identical arithmetic to [`phi_apply`] restricted to the dependency cone
/// of the base entry: after step `k` only the first `steps - k + 1` entries
/// feed later steps, so the update range shrinks by one per step. Halves the
/// quadratic cost of wide truncation windows.
fn phi_value_at_base(interval: &RateInterval, grid: &TimeGrid, g: &WindowFunction) -> Result<f64> {
    let n = grid.steps() as usize;
    if n == 0 || g.len() == 1 {
        return Ok(g.values()[0]);
    }
    let dt = grid.sigma();
    if dt * interval.operator_norm() > 2.0 {
        return Err(Error::StepTooLarge {
            dt,
            norm: interval.operator_norm(),
        });
    }
    let mut v = g.values().to_vec();
    let top = v.len() - 1;
    for k in 1..=n {
        let hi = (n - k).min(top - 1);
        lower_step_in_place(interval, dt, &mut v[..=hi + 1]);
    }
    Ok(v[0])
}

/// Smallest uniform grid over `[t, s]` whose a-priori error for inputs of
/// norm `g_norm` is at most `eps` and whose granularity satisfies
/// `sigma * 2 * upper_rate <= 1`.
///
/// Requests beyond the step cap (10^8, overridable via `IMPOIS_MAX_STEPS`)
/// are refused with the tolerance achievable at the cap.
pub fn choose_grid(
    interval: &RateInterval,
    t: f64,
    s: f64,
    g_norm: f64,
    eps: f64,
) -> Result<TimeGrid> {
    validate_times(t, s)?;
    validate_eps(eps)?;
    if !(g_norm.is_finite() && g_norm >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "norm must be finite and >= 0, got {g_norm}"
        )));
    }
    if t == s {
        return Ok(TimeGrid::point(t));
    }
    let dur = s - t;
    let nrm = interval.operator_norm();
    let n_error = (dur * dur * nrm * nrm * g_norm / eps).ceil();
    let n_validity = (dur * nrm).ceil();
    let n = n_error.max(n_validity).max(1.0);
    let cap = max_steps_cap();
    if n > cap as f64 {
        return Err(Error::ToleranceTooTight {
            requested: n as u128,
            cap,
            achievable: dur * dur * nrm * nrm * g_norm / cap as f64,
        });
    }
    TimeGrid::uniform(t, s, n as u64)
}

/// Select a grid for `g` and apply the backward product, reporting the
/// a-priori error alongside the window image.
pub fn approx_lower_transition(
    interval: &RateInterval,
    t: f64,
    s: f64,
    g: &WindowFunction,
    eps: f64,
) -> Result<ApproxResult> {
    let norm = g.sup_norm();
    let grid = choose_grid(interval, t, s, norm, eps)?;
    let values = phi_apply(interval, &grid, g)?;
    Ok(ApproxResult {
        values,
        a_priori_error: a_priori_error(interval, &grid, norm),
        grid,
    })
}

/// Both ends of the prevision of a window function at its base state.
fn window_pair_at_base(
    interval: &RateInterval,
    t: f64,
    s: f64,
    g: &WindowFunction,
    eps: f64,
) -> Result<(f64, f64, f64, TimeGrid)> {
    let norm = g.sup_norm();
    let grid = choose_grid(interval, t, s, norm, eps)?;
    let lower = phi_value_at_base(interval, &grid, g)?;
    let upper = -phi_value_at_base(interval, &grid, &g.negated())?;
    Ok((lower, upper, a_priori_error(interval, &grid, norm), grid))
}

/// Lower and upper prevision of an eventually constant function.
///
/// For a start state at or above the constant index the value is exact.
/// Otherwise the recursion runs on the window from the start state to the
/// constant index, which the theory makes exact up to the grid error.
pub fn lower_prevision_ev_const(
    interval: &RateInterval,
    t: f64,
    s: f64,
    x: Count,
    f: &FunctionSpec,
    eps: f64,
) -> Result<BoundResult> {
    validate_times(t, s)?;
    validate_eps(eps)?;
    let xbar = f.eventual_constant_at().ok_or_else(|| {
        Error::UnsupportedFunction("this path needs an eventual-constant index".into())
    })?;
    if x >= xbar {
        let v = f.eval(xbar);
        if !v.is_finite() {
            return Err(Error::ContractViolation(format!("f({xbar}) is not finite")));
        }
        return Ok(BoundResult::exact(v, xbar));
    }
    let g = WindowFunction::restrict(x, xbar, |y| f.eval(y))?;
    let (lower, upper, err, grid) = window_pair_at_base(interval, t, s, &g, eps)?;
    Ok(BoundResult {
        lower,
        upper,
        error_bound: err,
        truncation_top: xbar,
        steps: grid.steps(),
    })
}

/// Lower and upper prevision of a bounded function.
///
/// Two passes: a provisional step count from the global sup-norm bound fixes
/// the truncation window at `x + n`, on which the product of that many steps
/// ignores all values of `f` above the window top; the grid is then re-chosen
/// from the (never larger) window norm. The truncation is exact for the
/// final grid because its step count never exceeds the provisional one.
pub fn lower_prevision_bounded(
    interval: &RateInterval,
    t: f64,
    s: f64,
    x: Count,
    f: &FunctionSpec,
    eps: f64,
) -> Result<BoundResult> {
    validate_times(t, s)?;
    validate_eps(eps)?;
    let global = f.global_bound().ok_or_else(|| {
        Error::UnsupportedFunction("this path needs a finite sup-norm certificate".into())
    })?;
    if t == s {
        let v = f.eval(x);
        if !v.is_finite() {
            return Err(Error::ContractViolation(format!("f({x}) is not finite")));
        }
        return Ok(BoundResult::exact(v, x));
    }
    let provisional = choose_grid(interval, t, s, global, eps)?.steps();
    let xbar = x + provisional;
    let g = WindowFunction::restrict(x, xbar, |y| f.eval(y))?;
    let (lower, upper, err, grid) = window_pair_at_base(interval, t, s, &g, eps)?;
    debug_assert!(grid.steps() <= provisional);
    Ok(BoundResult {
        lower,
        upper,
        error_bound: err,
        truncation_top: xbar,
        steps: grid.steps(),
    })
}

/// Lower and upper prevision of a bounded-below function with a declared
/// growth envelope `f(y) <= a + b * y^p`.
///
/// Evaluates the truncations at the window tops `x + 16, x + 32, x + 64, ...`
/// and stops once two successive values agree within `eps / 2` on both ends
/// and the envelope bound on the discarded tail drops below `eps / 2`.
pub fn lower_prevision_growth(
    interval: &RateInterval,
    t: f64,
    s: f64,
    x: Count,
    f: &FunctionSpec,
    eps: f64,
) -> Result<BoundResult> {
    validate_times(t, s)?;
    validate_eps(eps)?;
    if f.envelope().is_none() {
        return Err(Error::UnsupportedFunction(
            "this path needs a growth envelope".into(),
        ));
    }
    if f.inf_certificate().is_none() {
        return Err(Error::UnsupportedFunction(
            "this path needs an inf-f certificate".into(),
        ));
    }
    if t == s {
        let v = f.eval(x);
        exact::check_point(f, x, v)?;
        return Ok(BoundResult::exact(v, x));
    }
    let mean = interval.upper() * (s - t);
    // Inner tolerance eps/4 leaves the successive-difference test room under
    // its eps/2 threshold once the truncations have converged.
    let inner_eps = eps / 4.0;
    let mut prev: Option<(f64, f64)> = None;
    let mut offset: Count = 16;
    for _ in 0..60 {
        let xbar = x + offset;
        let g = WindowFunction::restrict(x, xbar, |y| f.eval(y))?;
        for y in x..=xbar {
            exact::check_point(f, y, g.value_at(y)?)?;
        }
        let (lower, upper, err, grid) = window_pair_at_base(interval, t, s, &g, inner_eps)?;
        let tail = exact::envelope_tail_bound(f, mean, x, xbar)?;
        if let Some((prev_lower, prev_upper)) = prev {
            let settled = (lower - prev_lower).abs() <= eps / 2.0
                && (upper - prev_upper).abs() <= eps / 2.0
                && tail <= eps / 2.0;
            if settled {
                return Ok(BoundResult {
                    lower,
                    upper,
                    error_bound: err + tail,
                    truncation_top: xbar,
                    steps: grid.steps(),
                });
            }
        }
        prev = Some((lower, upper));
        offset *= 2;
    }
    Err(Error::ToleranceTooTight {
        requested: offset as u128,
        cap: max_steps_cap(),
        achievable: eps,
    })
}

/// Conjugate entry point: the upper prevision of `f` is `-` the lower
/// prevision of `-f`, and every engine here already reports both ends of
/// the pair, so this dispatches on the same metadata as the lower paths.
pub fn upper_prevision(
    interval: &RateInterval,
    t: f64,
    s: f64,
    x: Count,
    f: &FunctionSpec,
    eps: f64,
) -> Result<BoundResult> {
    prevision_by_metadata(interval, t, s, x, f, eps)
}

/// Route a function to the cheapest admissible engine: eventually constant,
/// then bounded, then growth-enveloped.
pub(crate) fn prevision_by_metadata(
    interval: &RateInterval,
    t: f64,
    s: f64,
    x: Count,
    f: &FunctionSpec,
    eps: f64,
) -> Result<BoundResult> {
    if f.eventual_constant_at().is_some() {
        lower_prevision_ev_const(interval, t, s, x, f, eps)
    } else if f.global_bound().is_some() {
        lower_prevision_bounded(interval, t, s, x, f, eps)
    } else if f.envelope().is_some() {
        lower_prevision_growth(interval, t, s, x, f, eps)
    } else {
        Err(Error::UnsupportedFunction(
            "function carries no bound, eventual-constant index, or growth \
             envelope"
                .into(),
        ))
    }
}
