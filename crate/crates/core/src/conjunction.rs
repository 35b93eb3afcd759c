//! Soft conjunction operations on probabilities.
//!
//! The central object is the one-parameter family
//!
//! ```text
//! and(p_1, ..., p_n) = max(c1 * sum(p_i) - (n * c1 - 1), 0),   c1 in [1/n, 1]
//! ```
//!
//! whose endpoints are the Łukasiewicz t-norm (`c1 = 1`) and the arithmetic
//! average (`c1 = 1/n`). A single arity-independent [`SoftConjunction::blend`]
//! selects the member for every arity at once.

use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance for exact algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Absolute tolerance for sampled inequalities.
pub const SAMPLE_TOL: f64 = 1e-9;

/// A non-empty vector of probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_probabilities(&values)?;
        Ok(Self(values))
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl TryFrom<Vec<f64>> for ProbabilityVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl TryFrom<&[f64]> for ProbabilityVector {
    type Error = Error;

    fn try_from(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }
}

impl AsRef<[f64]> for ProbabilityVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Rejects empty input and anything outside `[0, 1]` (including NaN).
pub fn check_probabilities(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidArity { arity: 0 });
    }
    for (index, &value) in values.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Domain { index, value });
        }
    }
    Ok(())
}

/// An n-ary operation on `[0, 1]^n`.
///
/// `apply` receives inputs that have already been validated as
/// probabilities; it is free to return anything, and callers that need a
/// probability check the result themselves.
pub trait ConjunctionOp {
    fn name(&self) -> String;
    fn apply(&self, p: &[f64]) -> f64;
}

impl<T: ConjunctionOp + ?Sized> ConjunctionOp for &T {
    fn name(&self) -> String {
        (**self).name()
    }

    fn apply(&self, p: &[f64]) -> f64 {
        (**self).apply(p)
    }
}

impl<T: ConjunctionOp + ?Sized> ConjunctionOp for Box<T> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn apply(&self, p: &[f64]) -> f64 {
        (**self).apply(p)
    }
}

/// Evaluates `op` and insists that the result is a probability.
pub fn apply_checked<O: ConjunctionOp + ?Sized>(op: &O, p: &[f64]) -> Result<f64> {
    let value = op.apply(p);
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::OperationRange { op: op.name(), value })
    }
}

fn lukasiewicz_kernel(p: &[f64]) -> f64 {
    let sum: f64 = p.iter().sum();
    (sum - (p.len() - 1) as f64).max(0.0)
}

fn average_kernel(p: &[f64]) -> f64 {
    let sum: f64 = p.iter().sum();
    sum / p.len() as f64
}

/// `max(sum(p) - (n - 1), 0)`.
pub fn eval_lukasiewicz(p: &ProbabilityVector) -> f64 {
    lukasiewicz_kernel(p.as_slice())
}

/// `sum(p) / n`.
pub fn eval_average(p: &ProbabilityVector) -> f64 {
    average_kernel(p.as_slice())
}

/// The Łukasiewicz t-norm as a [`ConjunctionOp`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Lukasiewicz;

impl ConjunctionOp for Lukasiewicz {
    fn name(&self) -> String {
        "lukasiewicz".to_string()
    }

    fn apply(&self, p: &[f64]) -> f64 {
        lukasiewicz_kernel(p)
    }
}

/// The arithmetic average as a [`ConjunctionOp`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Average;

impl ConjunctionOp for Average {
    fn name(&self) -> String {
        "average".to_string()
    }

    fn apply(&self, p: &[f64]) -> f64 {
        average_kernel(p)
    }
}

/// A member of the soft-conjunction family.
///
/// `blend = 1` is Łukasiewicz and `blend = 0` is the arithmetic average at
/// every arity; in between, the per-arity slope is interpolated affinely,
/// `c1(n) = 1/n + blend * (1 - 1/n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftConjunction {
    blend: f64,
}

impl SoftConjunction {
    pub fn new(blend: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&blend) {
            Ok(Self { blend })
        } else {
            Err(Error::InvalidBlend(blend))
        }
    }

    pub const fn lukasiewicz() -> Self {
        Self { blend: 1.0 }
    }

    pub const fn average() -> Self {
        Self { blend: 0.0 }
    }

    pub fn blend(&self) -> f64 {
        self.blend
    }

    /// Whether this member is a logical conjunction at every arity, i.e. it
    /// never leaves the Frechet interval. Only the Łukasiewicz endpoint is.
    pub fn is_logical(&self) -> bool {
        self.blend == 1.0
    }

    /// Evaluates on already-validated, non-empty input.
    pub(crate) fn apply_unchecked(&self, p: &[f64]) -> f64 {
        let n = p.len();
        if n == 1 || self.blend == 1.0 {
            return lukasiewicz_kernel(p);
        }
        if self.blend == 0.0 {
            return average_kernel(p);
        }
        // c1 * sum(p) - (n * c1 - 1) == 1 - (n * c1) * (deficit / n), written
        // so that all-zeros and all-ones land exactly on 0 and 1.
        let slope_times_n = 1.0 + self.blend * (n - 1) as f64;
        let deficit: f64 = p.iter().map(|x| 1.0 - x).sum();
        (1.0 - slope_times_n * (deficit / n as f64)).max(0.0)
    }
}

impl Default for SoftConjunction {
    fn default() -> Self {
        Self::lukasiewicz()
    }
}

impl fmt::Display for SoftConjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "family:{}", self.blend)
    }
}

impl ConjunctionOp for SoftConjunction {
    fn name(&self) -> String {
        self.to_string()
    }

    fn apply(&self, p: &[f64]) -> f64 {
        self.apply_unchecked(p)
    }
}

/// Per-arity slope `c1` of the family member selected by `op`.
pub fn resolve_c1(op: SoftConjunction, arity: usize) -> Result<f64> {
    if arity == 0 {
        return Err(Error::InvalidArity { arity });
    }
    if op.blend == 1.0 {
        return Ok(1.0);
    }
    let floor = 1.0 / arity as f64;
    Ok(floor + op.blend * (1.0 - floor))
}

pub fn eval_family(op: SoftConjunction, p: &ProbabilityVector) -> f64 {
    op.apply_unchecked(p.as_slice())
}

/// The closed interval of conjunction probabilities compatible with given
/// marginals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrechetInterval {
    pub lower: f64,
    pub upper: f64,
}

impl FrechetInterval {
    pub fn contains(&self, value: f64, tol: f64) -> bool {
        value >= self.lower - tol && value <= self.upper + tol
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// `[max(sum - (n - 1), 0), min(p)]`.
///
/// The lower end is capped at the upper end: in floating point the sum can
/// overshoot by an ulp (e.g. `1 + 0.3 - 1 > 0.3`).
pub fn frechet_bounds(p: &ProbabilityVector) -> FrechetInterval {
    let upper = p.as_slice().iter().copied().fold(f64::INFINITY, f64::min);
    let lower = eval_lukasiewicz(p).min(upper);
    FrechetInterval { lower, upper }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSide {
    Lower,
    Upper,
}

impl fmt::Display for BoundSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundSide::Lower => f.write_str("lower"),
            BoundSide::Upper => f.write_str("upper"),
        }
    }
}

/// Outcome of a single logical-conjunction check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundCheck {
    Within { value: f64 },
    Violated { value: f64, side: BoundSide, gap: f64 },
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        matches!(self, BoundCheck::Within { .. })
    }
}

/// Checks `lower <= op(p) <= upper` at one point, within [`SAMPLE_TOL`].
pub fn check_frechet<O: ConjunctionOp + ?Sized>(op: &O, p: &ProbabilityVector) -> Result<BoundCheck> {
    let value = apply_checked(op, p.as_slice())?;
    let bounds = frechet_bounds(p);
    Ok(if value > bounds.upper + SAMPLE_TOL {
        BoundCheck::Violated { value, side: BoundSide::Upper, gap: value - bounds.upper }
    } else if value < bounds.lower - SAMPLE_TOL {
        BoundCheck::Violated { value, side: BoundSide::Lower, gap: bounds.lower - value }
    } else {
        BoundCheck::Within { value }
    })
}
