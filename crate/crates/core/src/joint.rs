//! Explicit joint distributions that hit any conjunction probability inside
//! the Frechet interval.
//!
//! Both extremes come from a single latent uniform `u` on the unit circle.
//! In the comonotone coupling event `i` occurs iff `u < m_i`, so the
//! conjunction has probability `min(m)`. In the stacked coupling the
//! complement of event `i` is the arc of length `1 - m_i` that starts where
//! the previous complement ended; the arcs cover as much of the circle as
//! they can, so the conjunction has probability `max(sum(m) - (n - 1), 0)`.
//! A mixture of the two interpolates any target in between while keeping
//! every marginal fixed.

use std::collections::BTreeMap;

use crate::binary::BinaryVector;
use crate::conjunction::{frechet_bounds, ProbabilityVector, IDENTITY_TOL, SAMPLE_TOL};
use crate::error::{Error, Result};

/// Largest number of events a joint distribution may describe.
pub const MAX_EVENTS: usize = 16;

/// Probability mass on binary outcome patterns of `n` events.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    arity: usize,
    atoms: BTreeMap<BinaryVector, f64>,
}

impl JointDistribution {
    /// Builds a distribution from `(pattern, mass)` pairs, summing duplicate
    /// patterns. Masses must be nonnegative and sum to one.
    pub fn new(arity: usize, atoms: impl IntoIterator<Item = (BinaryVector, f64)>) -> Result<Self> {
        Self::with_tolerance(arity, atoms, IDENTITY_TOL)
    }

    fn with_tolerance(arity: usize, atoms: impl IntoIterator<Item = (BinaryVector, f64)>, tol: f64) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidArity { arity });
        }
        if arity > MAX_EVENTS {
            return Err(Error::ArityTooLarge { arity, max: MAX_EVENTS });
        }
        let mut merged = BTreeMap::new();
        for (index, (pattern, mass)) in atoms.into_iter().enumerate() {
            if pattern.arity() != arity {
                return Err(Error::InvalidArity { arity: pattern.arity() });
            }
            if !(mass >= 0.0 && mass.is_finite()) {
                return Err(Error::Domain { index, value: mass });
            }
            *merged.entry(pattern).or_insert(0.0) += mass;
        }
        let joint = Self { arity, atoms: merged };
        let total = joint.total_mass();
        if (total - 1.0).abs() > tol {
            return Err(Error::Domain { index: 0, value: total });
        }
        Ok(joint)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn atoms(&self) -> &BTreeMap<BinaryVector, f64> {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.values().sum()
    }

    pub fn mass_of(&self, pattern: &BinaryVector) -> f64 {
        self.atoms.get(pattern).copied().unwrap_or(0.0)
    }

    /// Serializes as `pattern,mass` CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["pattern", "mass"]).expect("writing to memory");
        for (pattern, mass) in &self.atoms {
            w.write_record([pattern.to_string(), crate::fmt::sig12(*mass)]).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("CSV of ASCII fields")
    }

    /// Parses the output of [`to_csv`](Self::to_csv). Masses printed at 12
    /// digits need only sum to one within the sampling tolerance.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut atoms = Vec::new();
        let mut arity = None;
        for record in reader.records() {
            let record = record.map_err(|e| Error::Format {
                line: e.position().map_or(0, |p| p.line() as usize),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let bad = |message: &str| Error::Format { line, message: message.to_string() };
            let [pattern, mass] = [0, 1].map(|i| record.get(i));
            let (Some(pattern), Some(mass), 2) = (pattern, mass, record.len()) else {
                return Err(bad("expected `pattern,mass`"));
            };
            let pattern: BinaryVector = pattern.parse().map_err(|_| bad("pattern must be a 0/1 string"))?;
            let mass: f64 = mass.parse().map_err(|_| bad("mass must be a number"))?;
            arity.get_or_insert(pattern.arity());
            atoms.push((pattern, mass));
        }
        Self::with_tolerance(arity.unwrap_or(0), atoms, SAMPLE_TOL)
    }
}

/// Probability that event `index` (zero-based) occurs.
pub fn joint_marginal(joint: &JointDistribution, index: usize) -> Result<f64> {
    if index >= joint.arity {
        return Err(Error::IndexOutOfRange { index, arity: joint.arity });
    }
    Ok(joint.atoms.iter().filter(|(pattern, _)| pattern.get(index)).map(|(_, mass)| mass).sum())
}

/// Mass of the all-ones pattern.
pub fn joint_conjunction_prob(joint: &JointDistribution) -> f64 {
    joint.mass_of(&BinaryVector::ones(joint.arity))
}

/// Splits the circle at `cuts`, tags each piece with the pattern produced
/// by `pattern_at` at its midpoint, and accumulates the piece lengths.
fn discretize(mut cuts: Vec<f64>, pattern_at: impl Fn(f64) -> BinaryVector) -> BTreeMap<BinaryVector, f64> {
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut atoms = BTreeMap::new();
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b > a {
            *atoms.entry(pattern_at(0.5 * (a + b))).or_insert(0.0) += b - a;
        }
    }
    atoms
}

fn comonotone(marginals: &[f64]) -> BTreeMap<BinaryVector, f64> {
    discretize(marginals.to_vec(), |u| BinaryVector::new(marginals.iter().map(|&m| u < m).collect()))
}

fn stacked(marginals: &[f64]) -> BTreeMap<BinaryVector, f64> {
    let mut arcs = Vec::with_capacity(marginals.len());
    let mut start = 0.0;
    for &m in marginals {
        let len = 1.0 - m;
        arcs.push((start, len));
        start = (start + len).rem_euclid(1.0);
    }
    let cuts = arcs.iter().flat_map(|&(s, len)| [s, (s + len).rem_euclid(1.0)]).collect();
    discretize(cuts, |u| {
        BinaryVector::new(
            arcs.iter()
                .map(|&(s, len)| {
                    let inside = len >= 1.0 || (u - s).rem_euclid(1.0) < len;
                    !inside
                })
                .collect(),
        )
    })
}

/// Builds a joint distribution with the given marginals whose conjunction
/// probability equals `target`.
///
/// Fails with [`Error::InfeasibleTarget`] when `target` lies outside the
/// Frechet interval of `marginals` by more than [`IDENTITY_TOL`].
pub fn construct_joint(marginals: &ProbabilityVector, target: f64) -> Result<JointDistribution> {
    let n = marginals.arity();
    if n > MAX_EVENTS {
        return Err(Error::ArityTooLarge { arity: n, max: MAX_EVENTS });
    }
    let bounds = frechet_bounds(marginals);
    if !target.is_finite() || !bounds.contains(target, IDENTITY_TOL) {
        return Err(Error::InfeasibleTarget { target, lower: bounds.lower, upper: bounds.upper });
    }
    let target = target.clamp(bounds.lower, bounds.upper);
    let m = marginals.as_slice();

    let upper = comonotone(m);
    if bounds.upper == bounds.lower {
        return JointDistribution::new(n, upper);
    }
    let lower = stacked(m);
    let theta = (bounds.upper - target) / bounds.width();

    let mut atoms: BTreeMap<BinaryVector, f64> = BTreeMap::new();
    for (pattern, mass) in lower {
        *atoms.entry(pattern).or_insert(0.0) += theta * mass;
    }
    for (pattern, mass) in upper {
        *atoms.entry(pattern).or_insert(0.0) += (1.0 - theta) * mass;
    }
    atoms.retain(|_, mass| *mass > 0.0);
    JointDistribution::new(n, atoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(values: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(values.to_vec()).unwrap()
    }

    fn bv(s: &str) -> BinaryVector {
        s.parse().unwrap()
    }

    fn assert_masses(joint: &JointDistribution, expected: &[(&str, f64)]) {
        assert_eq!(joint.atoms().len(), expected.len(), "{joint:?}");
        for (pattern, mass) in expected {
            assert!((joint.mass_of(&bv(pattern)) - mass).abs() < 1e-12, "{pattern}: {joint:?}");
        }
    }

    #[test]
    fn independent_case() {
        let joint = construct_joint(&pv(&[0.5, 0.5]), 0.25).unwrap();
        assert_masses(&joint, &[("11", 0.25), ("10", 0.25), ("01", 0.25), ("00", 0.25)]);
        assert_eq!(joint_conjunction_prob(&joint), 0.25);
        assert_eq!(joint_marginal(&joint, 0).unwrap(), 0.5);
    }

    #[test]
    fn equivalent_case() {
        let joint = construct_joint(&pv(&[0.5, 0.5]), 0.5).unwrap();
        assert_masses(&joint, &[("11", 0.5), ("00", 0.5)]);
        assert_eq!(joint_conjunction_prob(&joint), 0.5);
    }

    #[test]
    fn complementary_case() {
        let joint = construct_joint(&pv(&[0.5, 0.5]), 0.0).unwrap();
        assert_masses(&joint, &[("10", 0.5), ("01", 0.5)]);
        assert_eq!(joint_marginal(&joint, 1).unwrap(), 0.5);
        assert_eq!(joint_conjunction_prob(&joint), 0.0);
    }

    #[test]
    fn point_mass_marginals() {
        let joint = JointDistribution::new(3, [(bv("111"), 1.0)]).unwrap();
        for i in 0..3 {
            assert_eq!(joint_marginal(&joint, i).unwrap(), 1.0);
        }
        assert!(matches!(joint_marginal(&joint, 3), Err(Error::IndexOutOfRange { index: 3, arity: 3 })));
    }

    #[test]
    fn infeasible_targets() {
        assert!(matches!(construct_joint(&pv(&[0.5, 0.5]), 0.6), Err(Error::InfeasibleTarget { .. })));
        assert!(matches!(construct_joint(&pv(&[0.9, 0.8]), 0.6), Err(Error::InfeasibleTarget { .. })));
        assert!(matches!(construct_joint(&pv(&[0.9, 0.8]), f64::NAN), Err(Error::InfeasibleTarget { .. })));
    }

    #[test]
    fn degenerate_interval() {
        let joint = construct_joint(&pv(&[1.0, 0.4, 1.0]), 0.4).unwrap();
        assert_masses(&joint, &[("111", 0.4), ("101", 0.6)]);
    }

    #[test]
    fn stacked_arcs_wrap_around() {
        let m = [0.2, 0.3, 0.9, 0.6];
        let joint = construct_joint(&pv(&m), 0.0).unwrap();
        for (i, &mi) in m.iter().enumerate() {
            assert!((joint_marginal(&joint, i).unwrap() - mi).abs() < 1e-12);
        }
        assert_eq!(joint_conjunction_prob(&joint), 0.0);
    }

    #[test]
    fn csv_round_trip() {
        let joint = construct_joint(&pv(&[0.5, 0.5]), 0.25).unwrap();
        let csv = joint.to_csv();
        assert_eq!(csv, "pattern,mass\n00,0.25\n01,0.25\n10,0.25\n11,0.25\n");
        assert_eq!(JointDistribution::from_csv(&csv).unwrap(), joint);
    }

    #[test]
    fn malformed_csv_reports_the_line() {
        let bad = "pattern,mass\n00,0.5\n1x,0.5\n";
        assert!(matches!(JointDistribution::from_csv(bad), Err(Error::Format { line: 3, .. })));
        let short = "pattern,mass\n00,0.5\n11\n";
        assert!(matches!(JointDistribution::from_csv(short), Err(Error::Format { line: 3, .. })));
        assert!(JointDistribution::from_csv("pattern,mass\n00,0.5\n11,0.4\n").is_err());
    }

    #[test]
    fn rejects_bad_masses() {
        assert!(JointDistribution::new(2, [(bv("11"), 0.5)]).is_err());
        assert!(JointDistribution::new(2, [(bv("11"), 1.5), (bv("00"), -0.5)]).is_err());
        assert!(JointDistribution::new(2, [(bv("111"), 1.0)]).is_err());
        assert!(construct_joint(&pv(&[0.5; 17]), 0.0).is_err());
    }
}
