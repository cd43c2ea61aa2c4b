//! Exact quantities of the precise Poisson process: pmf, transition
//! probabilities and conditional expectations of functions of the count.
//!
//! These serve both as the building block for the rate-interval optimization
//! over Poisson processes and as ground truth for degenerate rate intervals.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::Count;

/// The dimensionless Poisson parameter `rate * duration`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonMean(f64);

impl PoissonMean {
    pub fn new(mean: f64) -> Result<Self> {
        if !mean.is_finite() || mean < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Poisson mean must be finite and >= 0, got {mean}"
            )));
        }
        Ok(PoissonMean(mean))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

#[inline]
fn ln_factorial(k: Count) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

/// Probability of observing `k` events under a Poisson distribution with the
/// given mean: `exp(-mean) * mean^k / k!`.
///
/// Computed in log space so that counts up to 10^6 and large means neither
/// overflow nor underflow prematurely. `mean = 0` is exact: 1 at `k = 0`,
/// 0 elsewhere.
pub fn pmf(mean: PoissonMean, k: Count) -> f64 {
    let m = mean.value();
    if m == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * m.ln() - m - ln_factorial(k)).exp()
}

/// Probability that the count moves from `x` to `y` over `duration` at the
/// given rate: the Poisson pmf of `y - x` when `y >= x`, zero otherwise.
/// `duration = 0` is the exact Kronecker delta.
pub fn transition_probability(rate: f64, duration: f64, x: Count, y: Count) -> Result<f64> {
    if !rate.is_finite() || rate < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "rate must be finite and >= 0, got {rate}"
        )));
    }
    if !duration.is_finite() || duration < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "duration must be finite and >= 0, got {duration}"
        )));
    }
    if y < x {
        return Ok(0.0);
    }
    if duration == 0.0 {
        return Ok(if y == x { 1.0 } else { 0.0 });
    }
    Ok(pmf(PoissonMean::new(rate * duration)?, y - x))
}

/// Chernoff-style bound on the Poisson upper tail:
/// `P(Y >= m) <= exp(-mean) * (e * mean / m)^m` for `m > mean`.
pub(crate) fn poisson_tail_mass_bound(mean: f64, m: Count) -> f64 {
    debug_assert!(m as f64 > mean);
    if mean == 0.0 {
        return 0.0;
    }
    let mf = m as f64;
    (-mean + mf * (1.0 + mean.ln() - mf.ln())).exp()
}

/// Smallest `m > mean` such that the Chernoff bound on `P(Y >= m)` drops
/// below `tol`.
pub fn poisson_tail_cutoff(mean: f64, tol: f64) -> Count {
    let mut m = (mean.floor() as Count + 1).max(1);
    while poisson_tail_mass_bound(mean, m) > tol {
        m += 1 + m / 8;
    }
    m
}

/// Per-tail-term envelope `c0 + c1 * y^p` on `|f(y)|`, derived from the
/// function's certificates.
struct AbsEnvelope {
    c0: f64,
    c1: f64,
    p: u32,
}

fn abs_envelope(f: &FunctionSpec) -> Result<AbsEnvelope> {
    if let Some(b) = f.global_bound() {
        return Ok(AbsEnvelope {
            c0: b,
            c1: 0.0,
            p: 0,
        });
    }
    if let Some(env) = f.envelope() {
        let lo = f.inf_certificate().ok_or_else(|| {
            Error::UnsupportedFunction(
                "growth-enveloped function needs an inf-f certificate".into(),
            )
        })?;
        // |f(y)| <= max(|a + b*y^p|, |lo|) <= (|a| + |lo|) + |b|*y^p
        return Ok(AbsEnvelope {
            c0: env.a.abs() + lo.abs(),
            c1: env.b.abs(),
            p: env.p,
        });
    }
    Err(Error::UnsupportedFunction(
        "series needs a sup-norm bound, an eventual-constant index, \
         or a growth envelope"
            .into(),
    ))
}

/// Truncation index `m` such that the absolute series tail beyond `m` terms
/// is provably below `tol`.
///
/// For `p = 0` the tail is at most `(c0 + c1) * P(Y >= m)` with the Chernoff
/// bound. For `p >= 1`, once `m >= 2^(p+1) * mean` the term ratio stays
/// below 1/2, so the tail is at most twice its first term.
fn series_cutoff(mean: f64, x: Count, env: &AbsEnvelope, tol: f64) -> Count {
    if mean == 0.0 {
        return 1;
    }
    let scale = |m: Count| {
        if env.p == 0 {
            env.c0 + env.c1
        } else {
            2.0 * (env.c0 + env.c1 * ((x + m) as f64).powi(env.p as i32))
        }
    };
    let geometric_from = ((2.0f64.powi(env.p as i32 + 1) * mean).ceil() as Count).max(1);
    let mut m = (mean.floor() as Count + 1)
        .max(1)
        .max(if env.p == 0 { 1 } else { geometric_from });
    while scale(m) * poisson_tail_mass_bound(mean, m) > tol {
        m += 1 + m / 8;
    }
    m
}

/// Conditional expectation of `f` of the count at time `s` given count `x`
/// at time `t`, under the precise Poisson process with the given rate:
/// the series `sum_y f(y) * pmf(rate * (s - t), y - x)`.
///
/// The truncation index is chosen a priori from the function's certificates
/// so that the absolute truncation error is at most `tol`.
pub fn poisson_expectation(
    rate: f64,
    t: f64,
    s: f64,
    x: Count,
    f: &FunctionSpec,
    tol: f64,
) -> Result<f64> {
    Ok(poisson_expectation_with_cutoff(rate, t, s, x, f, tol)?.0)
}

/// As [`poisson_expectation`], also reporting the first count excluded from
/// the truncated series.
pub(crate) fn poisson_expectation_with_cutoff(
    rate: f64,
    t: f64,
    s: f64,
    x: Count,
    f: &FunctionSpec,
    tol: f64,
) -> Result<(f64, Count)> {
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
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mean = rate * (s - t);
    if mean == 0.0 {
        return Ok((f.eval(x), x));
    }
    let env = abs_envelope(f)?;
    let m = series_cutoff(mean, x, &env, tol);
    let mean = PoissonMean::new(mean)?;
    let mut total = 0.0;
    for k in 0..m {
        let y = x + k;
        let v = f.eval(y);
        check_point(f, y, v)?;
        total += v * pmf(mean, k);
    }
    Ok((total, x + m))
}

/// Reject evaluations that contradict the declared envelope or lower bound.
pub(crate) fn check_point(f: &FunctionSpec, y: Count, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::ContractViolation(format!("f({y}) is not finite")));
    }
    if let Some(env) = f.envelope() {
        if v > env.eval(y) {
            return Err(Error::ContractViolation(format!(
                "envelope violated at {y}: f = {v} > {}",
                env.eval(y)
            )));
        }
    }
    if let Some(lo) = f.lower_bound() {
        if v < lo {
            return Err(Error::ContractViolation(format!(
                "lower bound violated at {y}: f = {v} < {lo}"
            )));
        }
    }
    Ok(())
}

/// Upper bound on `sum_{y > xbar} (fmax(y) - inf f) * pmf(mean, y - x)`,
/// where `fmax(y) <= a + max(b, 0) * y^p` comes from the declared envelope.
/// Used by the growth path to certify its truncation error.
pub(crate) fn envelope_tail_bound(
    f: &FunctionSpec,
    mean: f64,
    x: Count,
    xbar: Count,
) -> Result<f64> {
    debug_assert!(xbar >= x);
    if mean == 0.0 {
        return Ok(0.0);
    }
    let env = f
        .envelope()
        .ok_or_else(|| Error::UnsupportedFunction("tail bound needs a growth envelope".into()))?;
    let lo = f.inf_certificate().ok_or_else(|| {
        Error::UnsupportedFunction("tail bound needs an inf-f certificate".into())
    })?;
    let (c0, c1, p) = if env.p == 0 {
        (env.a + env.b - lo, 0.0, 0)
    } else {
        (env.a - lo, env.b.max(0.0), env.p)
    };
    let mean_checked = PoissonMean::new(mean)?;
    let term = |k: Count| {
        let y = (x + k) as f64;
        (c0 + c1 * y.powi(p as i32)) * pmf(mean_checked, k)
    };
    // Sum terms until the geometric regime, then close with the factor-2
    // remainder bound (term ratio <= 1/2 from there on).
    let geometric_from = ((2.0f64.powi(p as i32 + 1) * mean).ceil() as Count).max(1);
    let start = xbar - x + 1;
    let mut total = 0.0;
    let mut k = start;
    while k < geometric_from.max(start) {
        total += term(k);
        k += 1;
    }
    total += 2.0 * term(k);
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::FunctionSpec;

    const E_M1: f64 = 0.36787944117144233; // exp(-1)
    const E_M2: f64 = 0.1353352832366127; // exp(-2)

    #[test]
    fn pmf_zero_mean_is_exact() {
        let m = PoissonMean::new(0.0).unwrap();
        assert_eq!(pmf(m, 0), 1.0);
        assert_eq!(pmf(m, 3), 0.0);
    }

    #[test]
    fn pmf_closed_form() {
        let m = PoissonMean::new(2.0).unwrap();
        assert!((pmf(m, 1) - 2.0 * E_M2).abs() < 1e-12);
        assert!((pmf(m, 0) - E_M2).abs() < 1e-12);
    }

    #[test]
    fn pmf_normalizes() {
        let m = PoissonMean::new(5.0).unwrap();
        let total: f64 = (0..=200).map(|k| pmf(m, k)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pmf_normalization_up_to_cutoff() {
        for mean in [0.1, 1.0, 7.5, 20.0, 50.0] {
            let cut = poisson_tail_cutoff(mean, 1e-12);
            let m = PoissonMean::new(mean).unwrap();
            let total: f64 = (0..cut).map(|k| pmf(m, k)).sum();
            assert!(total >= 1.0 - 1e-10, "mean {mean}: total {total}");
            // the exact partial sum is below 1; the log-space pmf terms
            // carry a few ulps each
            assert!(total <= 1.0 + 1e-13, "mean {mean}: total {total}");
        }
    }

    #[test]
    fn pmf_large_count_no_overflow() {
        let m = PoissonMean::new(1_000_000.0).unwrap();
        let v = pmf(m, 1_000_000);
        assert!(v.is_finite() && v > 0.0 && v < 1.0);
    }

    #[test]
    fn invalid_mean_rejected() {
        assert!(PoissonMean::new(-1.0).is_err());
        assert!(PoissonMean::new(f64::NAN).is_err());
        assert!(PoissonMean::new(f64::INFINITY).is_err());
    }

    #[test]
    fn transition_backward_is_zero() {
        assert_eq!(transition_probability(1.0, 1.0, 5, 4).unwrap(), 0.0);
    }

    #[test]
    fn transition_zero_duration_is_identity() {
        assert_eq!(transition_probability(7.0, 0.0, 3, 3).unwrap(), 1.0);
        assert_eq!(transition_probability(7.0, 0.0, 3, 4).unwrap(), 0.0);
    }

    #[test]
    fn transition_closed_form() {
        let p = transition_probability(2.0, 1.0, 0, 0).unwrap();
        assert!((p - E_M2).abs() < 1e-12);
    }

    #[test]
    fn transition_is_state_homogeneous() {
        for y in 4..12 {
            let a = transition_probability(1.3, 0.7, 4, y).unwrap();
            let b = transition_probability(1.3, 0.7, 0, y - 4).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn transition_composes_over_durations() {
        // sum_z P(d1, x -> z) P(d2, z -> y) = P(d1 + d2, x -> y)
        let (rate, d1, d2) = (1.7, 0.4, 1.1);
        for (x, y) in [(0u64, 0u64), (0, 3), (2, 7), (1, 1)] {
            let mut acc = 0.0;
            for z in x..=y {
                acc += transition_probability(rate, d1, x, z).unwrap()
                    * transition_probability(rate, d2, z, y).unwrap();
            }
            let direct = transition_probability(rate, d1 + d2, x, y).unwrap();
            assert!((acc - direct).abs() < 1e-12, "x={x}, y={y}");
        }
    }

    #[test]
    fn expectation_of_constant() {
        let f = FunctionSpec::constant(4.25);
        let v = poisson_expectation(1.5, 0.0, 2.0, 3, &f, 1e-10).unwrap();
        assert!((v - 4.25).abs() < 1e-10);
    }

    #[test]
    fn expectation_of_identity_is_mean_shift() {
        let f = FunctionSpec::identity();
        let v = poisson_expectation(1.5, 0.5, 2.5, 4, &f, 1e-10).unwrap();
        assert!((v - (4.0 + 1.5 * 2.0)).abs() < 1e-9);
    }

    #[test]
    fn expectation_of_indicator_zero() {
        let f = FunctionSpec::indicator_eq(0);
        let v = poisson_expectation(1.0, 0.0, 1.0, 0, &f, 1e-12).unwrap();
        assert!((v - E_M1).abs() < 1e-12);
    }

    #[test]
    fn expectation_zero_duration() {
        let f = FunctionSpec::indicator_eq(2);
        let v = poisson_expectation(3.0, 1.0, 1.0, 2, &f, 1e-10).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn expectation_tolerances_consistent() {
        let f = FunctionSpec::polynomial(1.0, 0.5, 2).unwrap();
        for tol in [1e-6, 1e-8, 1e-10] {
            let a = poisson_expectation(2.0, 0.0, 1.5, 1, &f, tol).unwrap();
            let b = poisson_expectation(2.0, 0.0, 1.5, 1, &f, tol / 10.0).unwrap();
            assert!((a - b).abs() <= tol);
        }
    }

    #[test]
    fn flat_envelope_without_bound_is_fully_summed() {
        // constant 1 certified only through a degree-zero envelope: the
        // series must still be summed far enough to see the whole mass
        let f = FunctionSpec::new(|_| 1.0)
            .with_envelope(0.0, 1.0, 0)
            .with_lower_bound(0.0);
        let v = poisson_expectation(2.0, 0.0, 1.0, 0, &f, 1e-9).unwrap();
        assert!((v - 1.0).abs() <= 1e-9, "{v}");
    }

    #[test]
    fn expectation_requires_certificate() {
        let f = FunctionSpec::new(|y| (y as f64).exp());
        assert!(matches!(
            poisson_expectation(1.0, 0.0, 1.0, 0, &f, 1e-6),
            Err(Error::UnsupportedFunction(_))
        ));
    }

    #[test]
    fn expectation_rejects_bad_tol() {
        let f = FunctionSpec::constant(1.0);
        assert!(poisson_expectation(1.0, 0.0, 1.0, 0, &f, 0.0).is_err());
        assert!(poisson_expectation(1.0, 0.0, 1.0, 0, &f, -1.0).is_err());
    }

    #[test]
    fn envelope_violation_detected_during_series() {
        // claims f <= y but spikes above the probe range used by validate()
        let f = FunctionSpec::new(|y| if y == 70 { 1e6 } else { y as f64 })
            .with_envelope(0.0, 1.0, 1)
            .with_lower_bound(0.0);
        let r = poisson_expectation(30.0, 0.0, 2.0, 0, &f, 1e-8);
        assert!(matches!(r, Err(Error::ContractViolation(_))));
    }

    proptest::proptest! {
        #[test]
        fn normalization_for_any_mean(mean in 1e-6f64..50.0) {
            let cut = poisson_tail_cutoff(mean, 1e-12);
            let m = PoissonMean::new(mean).unwrap();
            let total: f64 = (0..cut).map(|k| pmf(m, k)).sum();
            proptest::prop_assert!(total >= 1.0 - 1e-10, "total {total}");
            proptest::prop_assert!(total <= 1.0 + 1e-13, "total {total}");
        }

        #[test]
        fn transition_shift_for_any_state(
            rate in 0.0f64..4.0,
            duration in 0.0f64..3.0,
            x in 0u64..40,
            k in 0u64..20,
        ) {
            let a = transition_probability(rate, duration, x, x + k).unwrap();
            let b = transition_probability(rate, duration, 0, k).unwrap();
            proptest::prop_assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn tail_bound_dominates_true_tail() {
        let f = FunctionSpec::identity();
        let mean = 2.0;
        for xbar in [4u64, 8, 16] {
            let bound = envelope_tail_bound(&f, mean, 0, xbar).unwrap();
            let m = PoissonMean::new(mean).unwrap();
            let true_tail: f64 = (xbar + 1..xbar + 200).map(|y| y as f64 * pmf(m, y)).sum();
            assert!(bound >= true_tail);
            assert!(bound.is_finite());
        }
        // decays with the threshold
        let b1 = envelope_tail_bound(&f, mean, 0, 8).unwrap();
        let b2 = envelope_tail_bound(&f, mean, 0, 16).unwrap();
        assert!(b2 < b1);
    }
}
