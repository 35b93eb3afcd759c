//! Weighted hinge-loss objective over ground rules and its minimization.
//!
//! For ground rules `r` with body atoms `a_{r,i}`, head `b_r` and weight
//! `w_r`, the objective is
//!
//! ```text
//! sum_r w_r * max(and(x[a_{r,1}], ..., x[a_{r,n_r}]) - x[b_r], 0)^p
//! ```
//!
//! with `and` a member of the soft-conjunction family and `p >= 1`. Every
//! term is convex, so projected subgradient descent on the box `[0, 1]` over
//! the free atoms converges to the minimum.

mod lp;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conjunction::{resolve_c1, SoftConjunction};
use crate::error::{Error, Result};
use crate::lang::{GroundModel, GroundRule};

pub use lp::{export_lp, LinearProgram, LpRow};

/// Largest number of free atoms [`grid_oracle`] will enumerate.
pub const ORACLE_MAX_FREE: usize = 4;

/// Per-rule loss `w * d^exponent` on the hinge distance `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSpec {
    exponent: f64,
}

impl LossSpec {
    pub fn new(exponent: f64) -> Result<Self> {
        if exponent >= 1.0 && exponent.is_finite() {
            Ok(Self { exponent })
        } else {
            Err(Error::NonConvexLoss(exponent))
        }
    }

    pub const fn linear() -> Self {
        Self { exponent: 1.0 }
    }

    pub const fn squared() -> Self {
        Self { exponent: 2.0 }
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn is_linear(&self) -> bool {
        self.exponent == 1.0
    }

    fn value(&self, weight: f64, distance: f64) -> f64 {
        if self.exponent == 1.0 {
            weight * distance
        } else {
            weight * distance.powf(self.exponent)
        }
    }

    /// Derivative of `value` in the distance, for `distance > 0`.
    fn slope(&self, weight: f64, distance: f64) -> f64 {
        if self.exponent == 1.0 {
            weight
        } else {
            weight * self.exponent * distance.powf(self.exponent - 1.0)
        }
    }
}

impl Default for LossSpec {
    fn default() -> Self {
        Self::linear()
    }
}

/// A probability for every ground atom, with evidence atoms pinned.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpretation {
    values: Vec<f64>,
    evidence: Vec<bool>,
}

impl Interpretation {
    /// Checks coverage, ranges and that evidence atoms carry their declared
    /// values.
    pub fn new(model: &GroundModel, values: Vec<f64>) -> Result<Self> {
        if values.len() != model.num_atoms() {
            return Err(Error::Interpretation(format!("{} values for {} atoms", values.len(), model.num_atoms())));
        }
        for (i, (&v, fixed)) in values.iter().zip(model.evidence()).enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain { index: i, value: v });
            }
            if let Some(e) = fixed {
                if v != *e {
                    return Err(Error::Interpretation(format!(
                        "evidence atom `{}` must stay at {e}, got {v}",
                        model.atoms()[i]
                    )));
                }
            }
        }
        let evidence = model.evidence().iter().map(Option::is_some).collect();
        Ok(Self { values, evidence })
    }

    /// Evidence at its value and every free atom at `fill`.
    pub fn filled(model: &GroundModel, fill: f64) -> Result<Self> {
        let values = model.evidence().iter().map(|e| e.unwrap_or(fill)).collect();
        Self::new(model, values)
    }

    /// Sets the free atoms, in index order, to `free_values`.
    pub fn with_free_values(model: &GroundModel, free_values: &[f64]) -> Result<Self> {
        let mut values: Vec<f64> = model.evidence().iter().map(|e| e.unwrap_or(0.0)).collect();
        let free = model.free_atoms();
        if free.len() != free_values.len() {
            return Err(Error::Interpretation(format!(
                "{} free values for {} free atoms",
                free_values.len(),
                free.len()
            )));
        }
        for (&i, &v) in free.iter().zip(free_values) {
            values[i] = v;
        }
        Self::new(model, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, atom: usize) -> f64 {
        self.values[atom]
    }

    pub fn is_evidence(&self, atom: usize) -> bool {
        self.evidence[atom]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn covers(&self, model: &GroundModel) -> Result<()> {
        if self.values.len() == model.num_atoms() {
            Ok(())
        } else {
            Err(Error::Interpretation(format!(
                "interpretation has {} atoms, model has {}",
                self.values.len(),
                model.num_atoms()
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    /// Every free atom starts at 0.5.
    #[default]
    Center,
    /// Free atoms start at seeded uniform values.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub seed: u64,
    pub max_iterations: usize,
    /// `eta_0` in the step schedule `eta_t = eta_0 / sqrt(t)`.
    pub initial_step: f64,
    /// Minimum best-objective improvement over `stall_window` iterations.
    pub tolerance: f64,
    pub stall_window: usize,
    pub init: InitMode,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            max_iterations: 10_000,
            initial_step: 0.5,
            tolerance: 1e-9,
            stall_window: 100,
            init: InitMode::Center,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(Error::InvalidConfig(format!("initial step must be positive, got {}", self.initial_step)));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.stall_window < 1 {
            return Err(Error::InvalidConfig("stall window must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub interpretation: Interpretation,
    pub objective: f64,
    pub iterations: usize,
    /// Penalty of each ground rule at `interpretation`, in rule order.
    pub penalties: Vec<f64>,
}

fn body_conjunction(rule: &GroundRule, values: &[f64], op: SoftConjunction, scratch: &mut Vec<f64>) -> f64 {
    scratch.clear();
    scratch.extend(rule.body.iter().map(|&i| values[i]));
    op.apply_unchecked(scratch)
}

fn penalty_at(rule: &GroundRule, values: &[f64], op: SoftConjunction, loss: LossSpec, scratch: &mut Vec<f64>) -> f64 {
    let distance = body_conjunction(rule, values, op, scratch) - values[rule.head];
    if distance > 0.0 {
        loss.value(rule.weight, distance)
    } else {
        0.0
    }
}

/// `w * max(and(body) - head, 0)^p` for one ground rule.
pub fn rule_penalty(rule: &GroundRule, x: &Interpretation, op: SoftConjunction, loss: LossSpec) -> f64 {
    penalty_at(rule, x.values(), op, loss, &mut Vec::with_capacity(rule.body.len()))
}

fn objective_at(model: &GroundModel, values: &[f64], op: SoftConjunction, loss: LossSpec) -> f64 {
    let mut scratch = Vec::new();
    model.rules().iter().map(|r| penalty_at(r, values, op, loss, &mut scratch)).sum()
}

/// Sum of all rule penalties, accumulated in rule order.
pub fn evaluate_objective(model: &GroundModel, x: &Interpretation, op: SoftConjunction, loss: LossSpec) -> Result<f64> {
    x.covers(model)?;
    Ok(objective_at(model, x.values(), op, loss))
}

/// Per-rule penalties, in rule order.
pub fn rule_penalties(
    model: &GroundModel,
    x: &Interpretation,
    op: SoftConjunction,
    loss: LossSpec,
) -> Result<Vec<f64>> {
    x.covers(model)?;
    Ok(model.rules().iter().map(|r| rule_penalty(r, x, op, loss)).collect())
}

/// One subgradient of the objective, with evidence coordinates zeroed.
/// Satisfied rules (hinge argument `<= 0`) contribute nothing.
fn subgradient(model: &GroundModel, values: &[f64], op: SoftConjunction, loss: LossSpec, grad: &mut [f64]) {
    grad.iter_mut().for_each(|g| *g = 0.0);
    let mut scratch = Vec::new();
    for rule in model.rules() {
        let distance = body_conjunction(rule, values, op, &mut scratch) - values[rule.head];
        if distance <= 0.0 {
            continue;
        }
        // distance > 0 with head >= 0 means the conjunction is on its
        // linear piece, whose slope in each body atom is c1.
        let outer = loss.slope(rule.weight, distance);
        let c1 = resolve_c1(op, rule.body.len()).expect("ground rule bodies are nonempty");
        for &i in &rule.body {
            grad[i] += outer * c1;
        }
        grad[rule.head] -= outer;
    }
    for (i, fixed) in model.evidence().iter().enumerate() {
        if fixed.is_some() {
            grad[i] = 0.0;
        }
    }
}

fn build_solution(
    model: &GroundModel,
    values: Vec<f64>,
    op: SoftConjunction,
    loss: LossSpec,
    iterations: usize,
) -> Result<Solution> {
    let interpretation = Interpretation::new(model, values)?;
    let objective = evaluate_objective(model, &interpretation, op, loss)?;
    let penalties = rule_penalties(model, &interpretation, op, loss)?;
    Ok(Solution { interpretation, objective, iterations, penalties })
}

/// Projected subgradient descent on the free atoms with step
/// `eta_0 / sqrt(t)`, returning the best iterate seen.
///
/// Stops after `max_iterations`, when the best objective improved by less
/// than `tolerance` over the last `stall_window` iterations, or when a zero
/// subgradient certifies optimality.
pub fn solve_subgradient(
    model: &GroundModel,
    op: SoftConjunction,
    loss: LossSpec,
    cfg: &SolveConfig,
) -> Result<Solution> {
    LossSpec::new(loss.exponent())?;
    cfg.validate()?;

    let free = model.free_atoms();
    let mut x: Vec<f64> = model.evidence().iter().map(|e| e.unwrap_or(0.5)).collect();
    if cfg.init == InitMode::Random {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for &i in &free {
            x[i] = rng.gen::<f64>();
        }
    }
    if free.is_empty() {
        return build_solution(model, x, op, loss, 0);
    }

    let mut best = x.clone();
    let mut best_obj = objective_at(model, &x, op, loss);
    let mut history = Vec::with_capacity(cfg.max_iterations.min(1 << 16) + 1);
    history.push(best_obj);
    let mut grad = vec![0.0; x.len()];
    let mut iterations = 0;

    for t in 1..=cfg.max_iterations {
        if best_obj == 0.0 {
            break;
        }
        subgradient(model, &x, op, loss, &mut grad);
        if free.iter().all(|&i| grad[i] == 0.0) {
            break;
        }
        let step = cfg.initial_step / (t as f64).sqrt();
        for &i in &free {
            x[i] = (x[i] - step * grad[i]).clamp(0.0, 1.0);
        }
        iterations = t;

        let obj = objective_at(model, &x, op, loss);
        if obj < best_obj {
            best_obj = obj;
            best.copy_from_slice(&x);
        }
        history.push(best_obj);
        if t >= cfg.stall_window && history[t - cfg.stall_window] - best_obj < cfg.tolerance {
            break;
        }
    }
    build_solution(model, best, op, loss, iterations)
}

fn grid_values(resolution: f64) -> Vec<f64> {
    let inverse = 1.0 / resolution;
    let steps = inverse.round();
    if (inverse - steps).abs() < 1e-9 {
        let steps = steps as usize;
        (0..=steps).map(|i| i as f64 / steps as f64).collect()
    } else {
        let mut vals: Vec<f64> = (0..=inverse.floor() as usize).map(|i| i as f64 * resolution).collect();
        vals.push(1.0);
        vals
    }
}

/// Exhaustive search over `{0, r, 2r, ..., 1}` for every free atom.
///
/// Grid points are visited in lexicographic order (first free atom
/// slowest) and only a strictly better objective replaces the incumbent,
/// so ties resolve to the lexicographically smallest point.
pub fn grid_oracle(model: &GroundModel, op: SoftConjunction, loss: LossSpec, resolution: f64) -> Result<Solution> {
    LossSpec::new(loss.exponent())?;
    if !(resolution > 0.0 && resolution <= 1.0) {
        return Err(Error::InvalidConfig(format!("grid resolution must be in (0, 1], got {resolution}")));
    }
    let free = model.free_atoms();
    if free.len() > ORACLE_MAX_FREE {
        return Err(Error::OracleScale { free: free.len(), max: ORACLE_MAX_FREE });
    }
    let grid = grid_values(resolution);
    let mut x: Vec<f64> = model.evidence().iter().map(|e| e.unwrap_or(0.0)).collect();
    let mut best = x.clone();
    let mut best_obj = f64::INFINITY;
    let mut odometer = vec![0usize; free.len()];
    let mut visited = 0usize;
    'points: loop {
        for (&i, &k) in free.iter().zip(&odometer) {
            x[i] = grid[k];
        }
        visited += 1;
        let obj = objective_at(model, &x, op, loss);
        if obj < best_obj {
            best_obj = obj;
            best.copy_from_slice(&x);
        }
        let mut k = free.len();
        loop {
            if k == 0 {
                break 'points;
            }
            k -= 1;
            odometer[k] += 1;
            if odometer[k] < grid.len() {
                break;
            }
            odometer[k] = 0;
        }
    }
    build_solution(model, best, op, loss, visited)
}
