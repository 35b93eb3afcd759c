//! Convex combinations of binary vertices that reproduce a probability
//! vector.
//!
//! Three regimes, split on `s = sum(p)` against `n - 1`:
//!
//! * `s == n - 1`: `p = sum_i (1 - p_i) * t_i`, where `t_i` is all ones but
//!   a zero at `i`.
//! * `s > n - 1`: as above plus weight `s - (n - 1)` on the all-ones vertex.
//! * `s < n - 1`: only vertices with at least one zero bit are used, so the
//!   Łukasiewicz value vanishes on every one of them.

use std::collections::BTreeMap;

use crate::binary::BinaryVector;
use crate::conjunction::{ProbabilityVector, IDENTITY_TOL, SAMPLE_TOL};
use crate::error::{Error, Result};

/// A convex combination of binary vertices of a common arity.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexCombination {
    arity: usize,
    terms: Vec<(BinaryVector, f64)>,
}

impl VertexCombination {
    fn from_terms(arity: usize, terms: Vec<(BinaryVector, f64)>) -> Self {
        debug_assert!(terms.iter().all(|(v, _)| v.arity() == arity));
        Self { arity, terms }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &[(BinaryVector, f64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|(_, w)| w).sum()
    }

    /// Total weight placed on `vertex` (duplicates are summed).
    pub fn weight_on(&self, vertex: &BinaryVector) -> f64 {
        self.terms.iter().filter(|(v, _)| v == vertex).map(|(_, w)| w).sum()
    }

    /// `sum_j weight_j * vertex_j`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.arity];
        for (vertex, weight) in &self.terms {
            for (slot, &bit) in out.iter_mut().zip(vertex.bits()) {
                if bit {
                    *slot += weight;
                }
            }
        }
        out
    }

    /// Nonnegative weights summing to one within `tol`.
    pub fn is_convex(&self, tol: f64) -> bool {
        self.terms.iter().all(|(_, w)| *w >= 0.0) && (self.total_weight() - 1.0).abs() <= tol
    }

    /// Merges duplicate vertices, drops zero weights and sorts vertices.
    pub fn merged(&self) -> Self {
        let mut acc: BTreeMap<BinaryVector, f64> = BTreeMap::new();
        for (vertex, weight) in &self.terms {
            *acc.entry(vertex.clone()).or_insert(0.0) += weight;
        }
        let terms = acc.into_iter().filter(|(_, w)| *w > 0.0).collect();
        Self::from_terms(self.arity, terms)
    }
}

fn excess(p: &[f64]) -> f64 {
    p.iter().sum::<f64>() - (p.len() - 1) as f64
}

fn boundary_terms(p: &[f64]) -> Vec<(BinaryVector, f64)> {
    let n = p.len();
    p.iter().enumerate().map(|(i, &pi)| (BinaryVector::all_but(n, i), 1.0 - pi)).collect()
}

/// Weights `1 - p_i` on the vertices `t_i`, for `sum(p) = n - 1`.
pub fn decompose_boundary(p: &ProbabilityVector) -> Result<VertexCombination> {
    let values = p.as_slice();
    let n = values.len();
    let sum: f64 = values.iter().sum();
    if (sum - (n - 1) as f64).abs() > SAMPLE_TOL {
        return Err(Error::BoundarySum { sum, expected: (n - 1) as f64 });
    }
    Ok(VertexCombination::from_terms(n, boundary_terms(values)))
}

/// Weight `sum(p) - (n - 1)` on the all-ones vertex and `1 - p_i` on each
/// `t_i`, for `sum(p) > n - 1`.
pub fn decompose_upper(p: &ProbabilityVector) -> Result<VertexCombination> {
    let values = p.as_slice();
    let n = values.len();
    let top = excess(values);
    if top <= 0.0 {
        return Err(Error::UpperSum { sum: top + (n - 1) as f64, limit: (n - 1) as f64 });
    }
    let mut terms = Vec::with_capacity(n + 1);
    terms.push((BinaryVector::ones(n), top));
    terms.extend(boundary_terms(values));
    Ok(VertexCombination::from_terms(n, terms))
}

/// Staircase decomposition of an arbitrary point of the cube: sort the
/// coordinates descending, use top-k indicator vectors, weight them by
/// consecutive gaps.
fn staircase(values: &[f64]) -> Vec<(Vec<bool>, f64)> {
    let m = values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let mut out = Vec::with_capacity(m + 1);
    let mut bits = vec![false; m];
    let mut above = 1.0;
    for &idx in &order {
        out.push((bits.clone(), above - values[idx]));
        bits[idx] = true;
        above = values[idx];
    }
    out.push((bits, above));
    out
}

/// Decomposes `v` with coordinate `zero_at` forced to 0 into vertices that
/// all carry a zero there, scaled by `mass`.
fn push_zero_branch(v: &[f64], zero_at: usize, mass: f64, out: &mut Vec<(BinaryVector, f64)>) {
    let rest: Vec<f64> = v.iter().enumerate().filter(|&(i, _)| i != zero_at).map(|(_, &x)| x).collect();
    for (mut bits, weight) in staircase(&rest) {
        bits.insert(zero_at, false);
        out.push((BinaryVector::new(bits), mass * weight));
    }
}

/// Decomposes `p` with `sum(p) <= n - 1` into vertices that each contain a
/// zero bit.
///
/// Walks the coordinates left to right. At coordinate `k` (earlier ones
/// already promoted to 1) let `q` be the value it would need to bring the
/// sum to exactly `n - 1`. If `q <= 1` the current vector splits between a
/// copy with coordinate `k` at 0 and the boundary vector with coordinate
/// `k` at `q`; otherwise it splits between coordinate `k` at 0 and at 1 and
/// the walk continues on the latter.
pub fn decompose_interior(p: &ProbabilityVector) -> Result<VertexCombination> {
    let values = p.as_slice();
    let n = values.len();
    let sum: f64 = values.iter().sum();
    if sum > (n - 1) as f64 + SAMPLE_TOL {
        return Err(Error::InteriorSum { sum, limit: (n - 1) as f64 });
    }

    let mut terms = Vec::new();
    let mut current = values.to_vec();
    let mut mass = 1.0;
    for k in 0..n {
        let pk = current[k];
        let rest: f64 = current[k + 1..].iter().sum();
        let needed = (n - 1 - k) as f64 - rest;
        if needed <= 1.0 {
            let share = if needed > 0.0 && pk > 0.0 { (pk / needed).min(1.0) } else { 0.0 };
            if share > 0.0 {
                let mut boundary = current.clone();
                boundary[k] = needed;
                for (vertex, weight) in boundary_terms(&boundary) {
                    terms.push((vertex, mass * share * weight));
                }
            }
            if share < 1.0 {
                push_zero_branch(&current, k, mass * (1.0 - share), &mut terms);
            }
            break;
        }
        push_zero_branch(&current, k, mass * (1.0 - pk), &mut terms);
        mass *= pk;
        current[k] = 1.0;
        if mass == 0.0 {
            break;
        }
    }
    Ok(VertexCombination::from_terms(n, terms).merged())
}

/// Which formula [`decompose`] dispatched to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Interior,
    Boundary,
    Upper,
}

impl Regime {
    pub fn of(p: &ProbabilityVector) -> Self {
        let top = excess(p.as_slice());
        if top.abs() <= IDENTITY_TOL {
            Regime::Boundary
        } else if top > 0.0 {
            Regime::Upper
        } else {
            Regime::Interior
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Interior => "interior",
            Regime::Boundary => "boundary",
            Regime::Upper => "upper",
        }
    }
}

/// Dispatches on `sum(p)` versus `n - 1`; exact ties go to the boundary
/// formula.
pub fn decompose(p: &ProbabilityVector) -> Result<VertexCombination> {
    match Regime::of(p) {
        Regime::Boundary => decompose_boundary(p),
        Regime::Upper => decompose_upper(p),
        Regime::Interior => decompose_interior(p),
    }
}
