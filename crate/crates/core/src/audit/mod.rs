//! Sampled checks of the uniqueness claim: a convex operation that stays
//! inside the Frechet interval must coincide with the Łukasiewicz t-norm.
//!
//! Nothing here is a proof. Convexity is falsified by Jensen
//! counterexamples and corroborated by their absence; bound compliance is
//! checked on every cube vertex plus seeded random points.

mod decompose;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::binary::BinaryVector;
use crate::conjunction::{apply_checked, frechet_bounds, BoundSide, ConjunctionOp, ProbabilityVector, SAMPLE_TOL};
use crate::error::{Error, Result};

pub use decompose::{decompose, decompose_boundary, decompose_interior, decompose_upper, Regime, VertexCombination};

/// How many individual bound failures and inconsistencies an
/// [`AuditReport`] keeps; the counts are always complete.
pub const RECORD_LIMIT: usize = 16;

/// Largest arity whose cube vertices are enumerated as bound probes.
pub const MAX_VERTEX_PROBE_ARITY: usize = 16;

const BOUND_STREAM: u64 = 1;

/// `min(p)`; within the Frechet interval but concave.
#[derive(Debug, Clone, Copy, Default)]
pub struct Min;

impl ConjunctionOp for Min {
    fn name(&self) -> String {
        "min".to_string()
    }

    fn apply(&self, p: &[f64]) -> f64 {
        p.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `prod(p)`; within the Frechet interval but not convex.
#[derive(Debug, Clone, Copy, Default)]
pub struct Product;

impl ConjunctionOp for Product {
    fn name(&self) -> String {
        "product".to_string()
    }

    fn apply(&self, p: &[f64]) -> f64 {
        p.iter().product()
    }
}

/// A Jensen violation: `op(lambda x + (1 - lambda) y)` exceeds
/// `lambda op(x) + (1 - lambda) op(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityCounterexample {
    pub x: ProbabilityVector,
    pub y: ProbabilityVector,
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    /// Index of the random sample, or `None` for a deterministic probe.
    pub sample_index: Option<usize>,
}

/// Deterministic probes tried before random sampling: midpoints of pairs of
/// opposing vertices, first unit vectors `e_i, e_j`, then the co-unit
/// vectors `t_i, t_j`, then all-zeros against all-ones.
fn vertex_probes(arity: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut probes = Vec::new();
    for i in 0..arity {
        for j in i + 1..arity {
            probes.push((BinaryVector::unit(arity, i).to_f64(), BinaryVector::unit(arity, j).to_f64()));
        }
    }
    if arity > 2 {
        for i in 0..arity {
            for j in i + 1..arity {
                probes.push((BinaryVector::all_but(arity, i).to_f64(), BinaryVector::all_but(arity, j).to_f64()));
            }
        }
    }
    probes.push((vec![0.0; arity], vec![1.0; arity]));
    probes
}

fn jensen_check<O: ConjunctionOp + ?Sized>(
    op: &O,
    x: &[f64],
    y: &[f64],
    lambda: f64,
    sample_index: Option<usize>,
) -> Result<Option<ConvexityCounterexample>> {
    let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| (lambda * a + (1.0 - lambda) * b).clamp(0.0, 1.0)).collect();
    let lhs = apply_checked(op, &mid)?;
    let rhs = lambda * apply_checked(op, x)? + (1.0 - lambda) * apply_checked(op, y)?;
    if lhs > rhs + SAMPLE_TOL {
        Ok(Some(ConvexityCounterexample {
            x: ProbabilityVector::new(x.to_vec())?,
            y: ProbabilityVector::new(y.to_vec())?,
            lambda,
            lhs,
            rhs,
            gap: lhs - rhs,
            sample_index,
        }))
    } else {
        Ok(None)
    }
}

fn uniform_point(rng: &mut ChaCha8Rng, arity: usize) -> Vec<f64> {
    (0..arity).map(|_| rng.gen::<f64>()).collect()
}

/// Result of a convexity search together with the number of random samples
/// it consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub counterexample: Option<ConvexityCounterexample>,
    pub samples_drawn: usize,
    pub probes_checked: usize,
}

/// Convexity search with explicit control over the deterministic probe set.
pub fn convexity_search_with<O: ConjunctionOp + ?Sized>(
    op: &O,
    arity: usize,
    samples: usize,
    seed: u64,
    use_probes: bool,
) -> Result<SearchOutcome> {
    if arity == 0 {
        return Err(Error::InvalidArity { arity });
    }
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be at least 1".into()));
    }

    let mut probes_checked = 0;
    if use_probes {
        for (x, y) in vertex_probes(arity) {
            probes_checked += 1;
            if let Some(found) = jensen_check(op, &x, &y, 0.5, None)? {
                return Ok(SearchOutcome { counterexample: Some(found), samples_drawn: 0, probes_checked });
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for index in 0..samples {
        let x = uniform_point(&mut rng, arity);
        let y = uniform_point(&mut rng, arity);
        let lambda = rng.gen::<f64>();
        if let Some(found) = jensen_check(op, &x, &y, lambda, Some(index))? {
            return Ok(SearchOutcome { counterexample: Some(found), samples_drawn: index + 1, probes_checked });
        }
    }
    Ok(SearchOutcome { counterexample: None, samples_drawn: samples, probes_checked })
}

/// Searches for a Jensen violation: deterministic vertex probes first, then
/// `samples` seeded uniform triples `(x, y, lambda)`. Returns the first one
/// found.
pub fn convexity_search<O: ConjunctionOp + ?Sized>(
    op: &O,
    arity: usize,
    samples: usize,
    seed: u64,
) -> Result<Option<ConvexityCounterexample>> {
    Ok(convexity_search_with(op, arity, samples, seed, true)?.counterexample)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ConvexAndLogical,
    ConvexNotLogical,
    LogicalNotConvex,
    Neither,
}

impl Verdict {
    pub fn from_findings(convex: bool, logical: bool) -> Self {
        match (convex, logical) {
            (true, true) => Verdict::ConvexAndLogical,
            (true, false) => Verdict::ConvexNotLogical,
            (false, true) => Verdict::LogicalNotConvex,
            (false, false) => Verdict::Neither,
        }
    }

    pub fn is_convex(&self) -> bool {
        matches!(self, Verdict::ConvexAndLogical | Verdict::ConvexNotLogical)
    }

    pub fn is_logical(&self) -> bool {
        matches!(self, Verdict::ConvexAndLogical | Verdict::LogicalNotConvex)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ConvexAndLogical => "convex-and-logical",
            Verdict::ConvexNotLogical => "convex-not-logical",
            Verdict::LogicalNotConvex => "logical-not-convex",
            Verdict::Neither => "neither",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundFailure {
    pub point: ProbabilityVector,
    pub side: BoundSide,
    pub gap: f64,
}

/// A point where an operation judged convex and logical nonetheless
/// differs from the Łukasiewicz t-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Inconsistency {
    pub point: ProbabilityVector,
    pub value: f64,
    pub lukasiewicz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub op: String,
    pub arity: usize,
    pub seed: u64,
    /// Random points drawn across both checks.
    pub samples_drawn: usize,
    /// Convexity violations; the search stops at the first one.
    pub violations: Vec<ConvexityCounterexample>,
    /// First [`RECORD_LIMIT`] Frechet-bound failures.
    pub bound_failures: Vec<BoundFailure>,
    pub bound_failure_count: usize,
    pub bound_points_checked: usize,
    /// Largest `|op(p) - lukasiewicz(p)|` over the bound-check points.
    pub max_lukasiewicz_gap: f64,
    pub inconsistencies: Vec<Inconsistency>,
    pub inconsistency_count: usize,
    pub verdict: Verdict,
}

impl AuditReport {
    pub fn is_consistent(&self) -> bool {
        self.inconsistency_count == 0
    }
}

/// Runs the convexity search and Frechet-bound sampling together and
/// classifies `op`.
///
/// When the verdict is convex-and-logical, every bound-check point is also
/// compared with the Łukasiewicz t-norm; a difference above the sampling
/// tolerance is recorded as an inconsistency.
pub fn uniqueness_audit<O: ConjunctionOp + ?Sized>(
    op: &O,
    arity: usize,
    samples: usize,
    seed: u64,
) -> Result<AuditReport> {
    if arity < 2 {
        return Err(Error::InvalidArity { arity });
    }
    let search = convexity_search_with(op, arity, samples, seed, true)?;

    let mut points: Vec<Vec<f64>> = Vec::new();
    if arity <= MAX_VERTEX_PROBE_ARITY {
        // all-ones first, counting down
        let top = (1u64 << arity) - 1;
        points.extend((0..=top).rev().map(|code| BinaryVector::from_code(arity, code).to_f64()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(BOUND_STREAM);
    points.extend((0..samples).map(|_| uniform_point(&mut rng, arity)));

    let mut bound_failures = Vec::new();
    let mut bound_failure_count = 0;
    let mut max_gap: f64 = 0.0;
    let mut evaluated = Vec::with_capacity(points.len());
    for point in points {
        let p = ProbabilityVector::new(point)?;
        let value = apply_checked(op, p.as_slice())?;
        let bounds = frechet_bounds(&p);
        let luk = crate::conjunction::eval_lukasiewicz(&p);
        max_gap = max_gap.max((value - luk).abs());
        let failure = if value > bounds.upper + SAMPLE_TOL {
            Some((BoundSide::Upper, value - bounds.upper))
        } else if value < bounds.lower - SAMPLE_TOL {
            Some((BoundSide::Lower, bounds.lower - value))
        } else {
            None
        };
        if let Some((side, gap)) = failure {
            bound_failure_count += 1;
            if bound_failures.len() < RECORD_LIMIT {
                bound_failures.push(BoundFailure { point: p.clone(), side, gap });
            }
        }
        evaluated.push((p, value, luk));
    }

    let verdict = Verdict::from_findings(search.counterexample.is_none(), bound_failure_count == 0);

    let mut inconsistencies = Vec::new();
    let mut inconsistency_count = 0;
    if verdict == Verdict::ConvexAndLogical {
        for (point, value, lukasiewicz) in evaluated {
            if (value - lukasiewicz).abs() > SAMPLE_TOL {
                inconsistency_count += 1;
                if inconsistencies.len() < RECORD_LIMIT {
                    inconsistencies.push(Inconsistency { point, value, lukasiewicz });
                }
            }
        }
    }

    Ok(AuditReport {
        op: op.name(),
        arity,
        seed,
        samples_drawn: search.samples_drawn + samples,
        violations: search.counterexample.into_iter().collect(),
        bound_failures,
        bound_failure_count,
        bound_points_checked: count_points(arity, samples),
        max_lukasiewicz_gap: max_gap,
        inconsistencies,
        inconsistency_count,
        verdict,
    })
}

fn count_points(arity: usize, samples: usize) -> usize {
    let vertices = if arity <= MAX_VERTEX_PROBE_ARITY { 1usize << arity } else { 0 };
    vertices + samples
}
