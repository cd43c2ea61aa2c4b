//! User-facing function descriptions: an evaluator on counts plus the
//! metadata certificates (monotonicity, eventual-constant index, sup-norm
//! bound, growth envelope) that select and justify a computation path.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::Count;

/// Declared monotonicity of a function on counts.
///
/// Monotonicity is trusted from this declaration (after spot checks); it is
/// never inferred, since the domain is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    NonDecreasing,
    NonIncreasing,
    NoneDeclared,
}

/// Certificate `f(y) <= a + b * y^p` for all counts `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthEnvelope {
    pub a: f64,
    pub b: f64,
    pub p: u32,
}

impl GrowthEnvelope {
    pub fn eval(&self, y: Count) -> f64 {
        self.a + self.b * (y as f64).powi(self.p as i32)
    }
}

/// A real-valued function of the event count, together with the metadata
/// the engines rely on.
///
/// All certificates are promises about the evaluator; they are spot-checked
/// by [`FunctionSpec::validate`] and, on the growth path, at every evaluated
/// point. A detected violation is a [`Error::ContractViolation`].
#[derive(Clone)]
pub struct FunctionSpec {
    eval: Arc<dyn Fn(Count) -> f64 + Send + Sync>,
    monotonicity: Monotonicity,
    eventual_constant_at: Option<Count>,
    bound: Option<f64>,
    envelope: Option<GrowthEnvelope>,
    lower_bound: Option<f64>,
}

impl fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("monotonicity", &self.monotonicity)
            .field("eventual_constant_at", &self.eventual_constant_at)
            .field("bound", &self.bound)
            .field("envelope", &self.envelope)
            .field("lower_bound", &self.lower_bound)
            .finish_non_exhaustive()
    }
}

impl FunctionSpec {
    /// A bare spec with no metadata. Attach certificates with the `with_*`
    /// methods; without any, only constant-free paths reject it.
    pub fn new<F>(eval: F) -> Self
    where
        F: Fn(Count) -> f64 + Send + Sync + 'static,
    {
        FunctionSpec {
            eval: Arc::new(eval),
            monotonicity: Monotonicity::NoneDeclared,
            eventual_constant_at: None,
            bound: None,
            envelope: None,
            lower_bound: None,
        }
    }

    pub fn with_monotonicity(mut self, m: Monotonicity) -> Self {
        self.monotonicity = m;
        self
    }

    /// Declare `f(y) = f(xbar)` for all `y >= xbar`.
    pub fn with_eventual_constant_at(mut self, xbar: Count) -> Self {
        self.eventual_constant_at = Some(xbar);
        self
    }

    /// Declare `|f| <= bound` everywhere.
    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self
    }

    /// Declare `f(y) <= a + b * y^p` everywhere.
    pub fn with_envelope(mut self, a: f64, b: f64, p: u32) -> Self {
        self.envelope = Some(GrowthEnvelope { a, b, p });
        self
    }

    /// Declare `f >= lower` everywhere.
    pub fn with_lower_bound(mut self, lower: f64) -> Self {
        self.lower_bound = Some(lower);
        self
    }

    // ---- ready-made functions -------------------------------------------

    /// The constant function `y -> c`.
    pub fn constant(c: f64) -> Self {
        FunctionSpec::new(move |_| c)
            .with_monotonicity(Monotonicity::NonDecreasing)
            .with_eventual_constant_at(0)
            .with_bound(c.abs())
            .with_lower_bound(c)
    }

    /// Indicator of `{k}`. Non-increasing when `k = 0`, non-monotone otherwise.
    pub fn indicator_eq(k: Count) -> Self {
        let spec = FunctionSpec::new(move |y| if y == k { 1.0 } else { 0.0 })
            .with_eventual_constant_at(k + 1)
            .with_bound(1.0)
            .with_lower_bound(0.0);
        if k == 0 {
            spec.with_monotonicity(Monotonicity::NonIncreasing)
        } else {
            spec
        }
    }

    /// Indicator of `{y >= k}`: non-decreasing, constant 1 from `k` on.
    pub fn indicator_ge(k: Count) -> Self {
        FunctionSpec::new(move |y| if y >= k { 1.0 } else { 0.0 })
            .with_monotonicity(Monotonicity::NonDecreasing)
            .with_eventual_constant_at(k)
            .with_bound(1.0)
            .with_lower_bound(0.0)
    }

    /// Indicator of `{y <= k}`: non-increasing, constant 0 from `k + 1` on.
    pub fn indicator_le(k: Count) -> Self {
        FunctionSpec::new(move |y| if y <= k { 1.0 } else { 0.0 })
            .with_monotonicity(Monotonicity::NonIncreasing)
            .with_eventual_constant_at(k + 1)
            .with_bound(1.0)
            .with_lower_bound(0.0)
    }

    /// The identity `y -> y`, with the linear growth envelope.
    pub fn identity() -> Self {
        FunctionSpec::new(|y| y as f64)
            .with_monotonicity(Monotonicity::NonDecreasing)
            .with_envelope(0.0, 1.0, 1)
            .with_lower_bound(0.0)
    }

    /// The polynomial `y -> a + b * y^p`. Rejects `b < 0` with `p >= 1`
    /// (not bounded below, so no engine accepts it).
    pub fn polynomial(a: f64, b: f64, p: u32) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(
                "polynomial coefficients must be finite".into(),
            ));
        }
        if b < 0.0 && p >= 1 {
            return Err(Error::UnsupportedFunction(
                "polynomial with b < 0 and p >= 1 is not bounded below".into(),
            ));
        }
        let env = GrowthEnvelope { a, b, p };
        let spec = FunctionSpec::new(move |y| env.eval(y));
        Ok(if p == 0 || b == 0.0 {
            let c = if p == 0 { a + b } else { a };
            FunctionSpec::constant(c)
        } else {
            spec.with_monotonicity(Monotonicity::NonDecreasing)
                .with_envelope(a, b, p)
                .with_lower_bound(a)
        })
    }

    /// A function given by explicit values for counts `0..values.len()` and
    /// a constant tail beyond.
    pub fn from_values(values: Vec<f64>, tail: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(
                "value table must not be empty".into(),
            ));
        }
        if !tail.is_finite() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "value table entries must be finite".into(),
            ));
        }
        let bound = values.iter().fold(tail.abs(), |acc, v| acc.max(v.abs()));
        let lower = values.iter().fold(tail, |acc, v| acc.min(*v));
        let xbar = if *values.last().unwrap() == tail {
            values.len() as Count - 1
        } else {
            values.len() as Count
        };
        let table = values;
        Ok(
            FunctionSpec::new(move |y| table.get(y as usize).copied().unwrap_or(tail))
                .with_eventual_constant_at(xbar)
                .with_bound(bound)
                .with_lower_bound(lower),
        )
    }

    // ---- accessors -------------------------------------------------------

    pub fn eval(&self, y: Count) -> f64 {
        (self.eval)(y)
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    pub fn eventual_constant_at(&self) -> Option<Count> {
        self.eventual_constant_at
    }

    pub fn bound(&self) -> Option<f64> {
        self.bound
    }

    pub fn envelope(&self) -> Option<GrowthEnvelope> {
        self.envelope
    }

    pub fn lower_bound(&self) -> Option<f64> {
        self.lower_bound
    }

    /// A sup-norm certificate, derived when not declared outright: an
    /// eventually constant function is bounded by its values up to the
    /// constant index, and a non-increasing bounded-below function by
    /// `max(|f(0)|, |inf f|)`.
    pub fn global_bound(&self) -> Option<f64> {
        if let Some(b) = self.bound {
            return Some(b);
        }
        if let Some(xbar) = self.eventual_constant_at {
            let mut b: f64 = 0.0;
            for y in 0..=xbar {
                b = b.max(self.eval(y).abs());
            }
            return Some(b);
        }
        if self.monotonicity == Monotonicity::NonIncreasing {
            if let Some(lo) = self.lower_bound {
                return Some(self.eval(0).abs().max(lo.abs()));
            }
        }
        None
    }

    /// An inf-f certificate, derived from the sup-norm bound when absent.
    pub fn inf_certificate(&self) -> Option<f64> {
        self.lower_bound.or(self.bound.map(|b| -b))
    }

    /// Spot-check the declared metadata on a fixed set of counts.
    ///
    /// Monotonicity, bound, envelope and lower bound are checked on
    /// `{0..=64}`; the eventual-constant claim on a spread of points above
    /// the declared index. Exactness of later computations still rests on
    /// the certificates being true everywhere.
    pub fn validate(&self) -> Result<()> {
        let probe: Vec<Count> = (0..=64).collect();
        match self.monotonicity {
            Monotonicity::NonDecreasing => {
                for w in probe.windows(2) {
                    if self.eval(w[1]) < self.eval(w[0]) {
                        return Err(Error::ContractViolation(format!(
                            "declared non-decreasing but f({}) > f({})",
                            w[0], w[1]
                        )));
                    }
                }
            }
            Monotonicity::NonIncreasing => {
                for w in probe.windows(2) {
                    if self.eval(w[1]) > self.eval(w[0]) {
                        return Err(Error::ContractViolation(format!(
                            "declared non-increasing but f({}) < f({})",
                            w[0], w[1]
                        )));
                    }
                }
            }
            Monotonicity::NoneDeclared => {}
        }
        for &y in &probe {
            let v = self.eval(y);
            if !v.is_finite() {
                return Err(Error::ContractViolation(format!("f({y}) is not finite")));
            }
            if let Some(b) = self.bound {
                if v.abs() > b {
                    return Err(Error::ContractViolation(format!(
                        "declared |f| <= {b} but |f({y})| = {}",
                        v.abs()
                    )));
                }
            }
            if let Some(env) = self.envelope {
                if v > env.eval(y) {
                    return Err(Error::ContractViolation(format!(
                        "declared envelope violated at {y}: f = {v} > {}",
                        env.eval(y)
                    )));
                }
            }
            if let Some(lo) = self.lower_bound {
                if v < lo {
                    return Err(Error::ContractViolation(format!(
                        "declared f >= {lo} but f({y}) = {v}"
                    )));
                }
            }
        }
        if let Some(xbar) = self.eventual_constant_at {
            let fx = self.eval(xbar);
            for j in 1..=16u64 {
                let y = xbar + j;
                if self.eval(y) != fx {
                    return Err(Error::ContractViolation(format!(
                        "declared constant from {xbar} but f({y}) != f({xbar})"
                    )));
                }
            }
            for j in [32u64, 64, 256, 1024] {
                if self.eval(xbar + j) != fx {
                    return Err(Error::ContractViolation(format!(
                        "declared constant from {xbar} but f({}) != f({xbar})",
                        xbar + j
                    )));
                }
            }
        }
        Ok(())
    }

    /// The conjugate `-f` for functions with a sup-norm certificate.
    /// Monotonicity flips; the eventual-constant index is preserved.
    pub fn negated_bounded(&self) -> Result<FunctionSpec> {
        let b = self.global_bound().ok_or_else(|| {
            Error::UnsupportedFunction("conjugation requires a sup-norm certificate".into())
        })?;
        let inner = Arc::clone(&self.eval);
        let mono = match self.monotonicity {
            Monotonicity::NonDecreasing => Monotonicity::NonIncreasing,
            Monotonicity::NonIncreasing => Monotonicity::NonDecreasing,
            Monotonicity::NoneDeclared => Monotonicity::NoneDeclared,
        };
        Ok(FunctionSpec {
            eval: Arc::new(move |y| -(inner)(y)),
            monotonicity: mono,
            eventual_constant_at: self.eventual_constant_at,
            bound: Some(b),
            envelope: None,
            lower_bound: Some(-b),
        })
    }
}
