//! High-level lower/upper expectations for the two process sets described
//! by a rate interval: the Poisson processes with a rate in the interval,
//! and the strictly larger family of all counting processes whose
//! instantaneous rates stay inside it.
//!
//! Declared-monotone functions collapse to a single precise Poisson
//! expectation at an interval endpoint, for either set. Otherwise the
//! Poisson set is handled by one-parameter optimization over the rate and
//! the consistent set by the backward-recursion engine.

use crate::error::{Error, Result};
use crate::exact::{poisson_expectation_with_cutoff, poisson_tail_cutoff};
use crate::function::{FunctionSpec, Monotonicity};
use crate::generator::RateInterval;
use crate::semigroup::{prevision_by_metadata, BoundResult};
use crate::Count;

/// Which set of processes the expectation ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    /// All Poisson processes with rate inside the interval.
    PoissonSet,
    /// All counting processes consistent with the interval.
    ConsistentSet,
}

impl std::fmt::Display for SetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SetKind::PoissonSet => write!(f, "poisson"),
            SetKind::ConsistentSet => write!(f, "consistent"),
        }
    }
}

fn validate_query(t: f64, s: f64, eps: f64) -> Result<()> {
    if !(t.is_finite() && s.is_finite() && 0.0 <= t && t <= s) {
        return Err(Error::InvalidParameter(format!(
            "times must be finite with 0 <= t <= s, got t = {t}, s = {s}"
        )));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {eps}"
        )));
    }
    Ok(())
}

/// Lower expectation of `f` of the count at `s`, given count `x` at `t`,
/// over the chosen set. The result carries both ends of the interval of
/// expectations, each within `error_bound` of its exact value.
pub fn lower_expectation(
    set: SetKind,
    interval: &RateInterval,
    t: f64,
    s: f64,
    x: Count,
    f: &FunctionSpec,
    eps: f64,
) -> Result<BoundResult> {
    validate_query(t, s, eps)?;
    f.validate()?;
    if let Some(r) = monotone_shortcut(interval, t, s, x, f, eps)? {
        return Ok(r);
    }
    match set {
        SetKind::PoissonSet => poisson_set_bounds(interval, t, s, x, f, eps),
        SetKind::ConsistentSet => prevision_by_metadata(interval, t, s, x, f, eps),
    }
}

/// Upper expectation over the chosen set: for functions with a sup-norm
/// certificate, the conjugate of [`lower_expectation`] on `-f`; for
/// bounded-below unbounded functions, the growth engine's upper limit.
/// Returns the same lower/upper pair as [`lower_expectation`].
pub fn upper_expectation(
    set: SetKind,
    interval: &RateInterval,
    t: f64,
    s: f64,
    x: Count,
    f: &FunctionSpec,
    eps: f64,
) -> Result<BoundResult> {
    validate_query(t, s, eps)?;
    f.validate()?;
    if let Some(r) = monotone_shortcut(interval, t, s, x, f, eps)? {
        return Ok(r);
    }
    if f.global_bound().is_some() {
        let conjugate = lower_expectation(set, interval, t, s, x, &f.negated_bounded()?, eps)?;
        return Ok(BoundResult {
            lower: -conjugate.upper,
            upper: -conjugate.lower,
            ..conjugate
        });
    }
    lower_expectation(set, interval, t, s, x, f, eps)
}

/// Closed-form bounds on the expected count: `(x + lower * (s - t),
/// x + upper * (s - t))`. No recursion, no tolerance.
pub fn expected_count_bounds(
    interval: &RateInterval,
    t: f64,
    s: f64,
    x: Count,
) -> Result<(f64, f64)> {
    if !(t.is_finite() && s.is_finite() && 0.0 <= t && t <= s) {
        return Err(Error::InvalidParameter(format!(
            "times must be finite with 0 <= t <= s, got t = {t}, s = {s}"
        )));
    }
    let dur = s - t;
    Ok((
        x as f64 + interval.lower() * dur,
        x as f64 + interval.upper() * dur,
    ))
}

/// For declared-monotone functions both sets share their bounds with the
/// precise Poisson processes at the interval endpoints: the lower rate is
/// extremal for non-decreasing functions and the upper rate for
/// non-increasing ones.
fn monotone_shortcut(
    interval: &RateInterval,
    t: f64,
    s: f64,
    x: Count,
    f: &FunctionSpec,
    eps: f64,
) -> Result<Option<BoundResult>> {
    let (rate_for_lower, rate_for_upper) = match f.monotonicity() {
        Monotonicity::NonDecreasing => (interval.lower(), interval.upper()),
        Monotonicity::NonIncreasing => (interval.upper(), interval.lower()),
        Monotonicity::NoneDeclared => return Ok(None),
    };
    let (lower, cut_lo) = poisson_expectation_with_cutoff(rate_for_lower, t, s, x, f, eps)?;
    let (upper, cut_hi) = poisson_expectation_with_cutoff(rate_for_upper, t, s, x, f, eps)?;
    Ok(Some(BoundResult {
        lower,
        upper,
        error_bound: eps,
        truncation_top: cut_lo.max(cut_hi),
        steps: 0,
    }))
}

/// Bounds over the Poisson set by one-parameter optimization of the rate:
/// a 129-point scan of the interval followed by golden-section refinement
/// around the best bracket.
///
/// The rate-to-expectation map is not guaranteed unimodal; the reported
/// error adds a crude Lipschitz slack `M * h` (h the scan spacing,
/// `M = 2 * (s - t) * scale(f)`) on top of the series tolerance.
fn poisson_set_bounds(
    interval: &RateInterval,
    t: f64,
    s: f64,
    x: Count,
    f: &FunctionSpec,
    eps: f64,
) -> Result<BoundResult> {
    poisson_set_bounds_scan(interval, t, s, x, f, eps, 129)
}

fn poisson_set_bounds_scan(
    interval: &RateInterval,
    t: f64,
    s: f64,
    x: Count,
    f: &FunctionSpec,
    eps: f64,
    scan_points: usize,
) -> Result<BoundResult> {
    // tolerance split: half to the series, half to the optimizer slack
    let tol = eps / 2.0;
    if interval.is_degenerate() {
        let (v, cut) = poisson_expectation_with_cutoff(interval.lower(), t, s, x, f, tol)?;
        return Ok(BoundResult {
            lower: v,
            upper: v,
            error_bound: tol,
            truncation_top: cut,
            steps: 0,
        });
    }

    let lo = interval.lower();
    let width = interval.width();
    let h = width / (scan_points - 1) as f64;
    let mut evals = Vec::with_capacity(scan_points);
    let mut max_cut = x;
    for i in 0..scan_points {
        let rate = lo + h * i as f64;
        let (v, cut) = poisson_expectation_with_cutoff(rate, t, s, x, f, tol)?;
        max_cut = max_cut.max(cut);
        evals.push((rate, v));
    }
    let imin = argbest(&evals, |a, b| a < b);
    let imax = argbest(&evals, |a, b| a > b);

    let objective = |rate: f64| poisson_expectation_with_cutoff(rate, t, s, x, f, tol);
    let refine_width = 1e-8 * width;
    let (refined_min, cut1) = golden_refine(&evals, imin, refine_width, false, &objective)?;
    let (refined_max, cut2) = golden_refine(&evals, imax, refine_width, true, &objective)?;
    max_cut = max_cut.max(cut1).max(cut2);

    let lower = refined_min.min(evals[imin].1);
    let upper = refined_max.max(evals[imax].1);
    let slack = lipschitz_scale(interval, t, s, x, f, tol)? * h;
    Ok(BoundResult {
        lower,
        upper,
        error_bound: tol + slack,
        truncation_top: max_cut,
        steps: 0,
    })
}

fn argbest(evals: &[(f64, f64)], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &(_, v)) in evals.iter().enumerate() {
        if better(v, evals[best].1) {
            best = i;
        }
    }
    best
}

/// Crude Lipschitz constant for the rate-to-expectation map:
/// `|dE/d(rate)| <= (s - t) * 2 * scale(f)`, with scale(f) the sup-norm
/// certificate, or the largest magnitude over the effective series range
/// for enveloped functions.
fn lipschitz_scale(
    interval: &RateInterval,
    t: f64,
    s: f64,
    x: Count,
    f: &FunctionSpec,
    tol: f64,
) -> Result<f64> {
    let scale = if let Some(b) = f.global_bound() {
        b
    } else {
        let reach = poisson_tail_cutoff(interval.upper() * (s - t), tol);
        (x..=x + reach).fold(0.0f64, |acc, y| acc.max(f.eval(y).abs()))
    };
    Ok(2.0 * (s - t) * scale)
}

/// Golden-section search inside the scan bracket around index `best`,
/// shrinking it to `target_width`. Returns the refined optimum.
fn golden_refine(
    evals: &[(f64, f64)],
    best: usize,
    target_width: f64,
    maximize: bool,
    objective: &dyn Fn(f64) -> Result<(f64, Count)>,
) -> Result<(f64, Count)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut a = evals[best.saturating_sub(1)].0;
    let mut b = evals[(best + 1).min(evals.len() - 1)].0;
    let sign = if maximize { -1.0 } else { 1.0 };
    let mut max_cut = 0;
    let mut eval = |rate: f64| -> Result<f64> {
        let (v, cut) = objective(rate)?;
        max_cut = max_cut.max(cut);
        Ok(sign * v)
    };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b - a > target_width {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2)?;
        }
    }
    let v = f1.min(f2);
    Ok((sign * v, max_cut))
}
