//! Linear-program form of the objective under the linear hinge.
//!
//! Each ground rule `r` gets a slack `u_r >= 0` with
//! `u_r >= c1 * sum(body) - (n * c1 - 1) - head`; minimizing `sum w_r u_r`
//! over the box then reproduces the hinge objective exactly.

use std::collections::BTreeMap;
use std::fmt;

use crate::conjunction::{resolve_c1, SoftConjunction};
use crate::error::{Error, Result};
use crate::fmt::sig12;
use crate::lang::GroundModel;

use super::LossSpec;

/// `slack >= sum(coef * var) + constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub slack: String,
    pub terms: Vec<(f64, String)>,
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    /// Variable name and the ground atom it stands for.
    pub labels: Vec<(String, String)>,
    pub objective: Vec<(f64, String)>,
    pub rows: Vec<LpRow>,
    /// Variables constrained to `[0, 1]`.
    pub unit_box: Vec<String>,
    /// Variables constrained to be nonnegative.
    pub nonnegative: Vec<String>,
    pub fixed: Vec<(String, f64)>,
}

fn atom_var(i: usize) -> String {
    format!("p{i}")
}

fn slack_var(r: usize) -> String {
    format!("u{r}")
}

/// Builds the LP for `model` under `op`. Only the linear hinge is
/// piecewise linear, so any other exponent is refused.
pub fn export_lp(model: &GroundModel, op: SoftConjunction, loss: LossSpec) -> Result<LinearProgram> {
    if !loss.is_linear() {
        return Err(Error::NotPiecewiseLinear(loss.exponent()));
    }
    let mut lp = LinearProgram {
        labels: model.atoms().iter().enumerate().map(|(i, a)| (atom_var(i), a.to_string())).collect(),
        ..LinearProgram::default()
    };
    for (r, rule) in model.rules().iter().enumerate() {
        let n = rule.body.len();
        let c1 = resolve_c1(op, n)?;
        let mut coefs: BTreeMap<usize, f64> = BTreeMap::new();
        for &i in &rule.body {
            *coefs.entry(i).or_default() += c1;
        }
        *coefs.entry(rule.head).or_default() -= 1.0;
        lp.objective.push((rule.weight, slack_var(r)));
        lp.rows.push(LpRow {
            slack: slack_var(r),
            terms: coefs.into_iter().filter(|(_, c)| *c != 0.0).map(|(i, c)| (c, atom_var(i))).collect(),
            constant: 1.0 - n as f64 * c1,
        });
    }
    for (i, e) in model.evidence().iter().enumerate() {
        lp.unit_box.push(atom_var(i));
        if let Some(v) = e {
            lp.fixed.push((atom_var(i), *v));
        }
    }
    lp.nonnegative = (0..model.rules().len()).map(slack_var).collect();
    Ok(lp)
}

fn write_expr(f: &mut fmt::Formatter<'_>, terms: &[(f64, String)], constant: f64) -> fmt::Result {
    let mut first = true;
    for (c, v) in terms {
        if first {
            write!(f, "{} {v}", sig12(*c))?;
            first = false;
        } else if *c < 0.0 {
            write!(f, " - {} {v}", sig12(-c))?;
        } else {
            write!(f, " + {} {v}", sig12(*c))?;
        }
    }
    if first {
        write!(f, "{}", sig12(constant))?;
    } else if constant < 0.0 {
        write!(f, " - {}", sig12(-constant))?;
    } else if constant > 0.0 {
        write!(f, " + {}", sig12(constant))?;
    }
    Ok(())
}

impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# minimize weighted rule slacks; {} atoms, {} rules", self.labels.len(), self.rows.len())?;
        for (v, label) in &self.labels {
            writeln!(f, "# {v} = {label}")?;
        }
        f.write_str("objective:")?;
        if !self.objective.is_empty() {
            f.write_str(" ")?;
            write_expr(f, &self.objective, 0.0)?;
        }
        writeln!(f)?;
        for row in &self.rows {
            write!(f, "row: {} >= ", row.slack)?;
            write_expr(f, &row.terms, row.constant)?;
            writeln!(f)?;
        }
        for v in &self.unit_box {
            writeln!(f, "bound: 0 <= {v} <= 1")?;
        }
        for v in &self.nonnegative {
            writeln!(f, "bound: {v} >= 0")?;
        }
        for (v, value) in &self.fixed {
            writeln!(f, "fix: {v} = {}", sig12(*value))?;
        }
        Ok(())
    }
}

fn number(token: &str, line: usize) -> Result<f64> {
    token.parse().map_err(|_| Error::Format { line, message: format!("expected a number, got `{token}`") })
}

fn is_name(token: &str) -> bool {
    token.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
}

fn parse_expr(text: &str, line: usize) -> Result<(Vec<(f64, String)>, f64)> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let mut terms = Vec::new();
    let mut constant = 0.0;
    let mut sign = 1.0;
    let mut i = 0;
    while i < tokens.len() {
        match tokens[i] {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            tok => {
                let value = sign * number(tok, line)?;
                match tokens.get(i + 1) {
                    Some(next) if is_name(next) => {
                        terms.push((value, next.to_string()));
                        i += 1;
                    }
                    _ => constant += value,
                }
                sign = 1.0;
            }
        }
        i += 1;
    }
    Ok((terms, constant))
}

fn value_of(assignment: &BTreeMap<String, f64>, var: &str) -> Result<f64> {
    assignment.get(var).copied().ok_or_else(|| Error::Interpretation(format!("no value for LP variable `{var}`")))
}

impl LinearProgram {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lp = LinearProgram::default();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                if let Some((v, label)) = comment.trim().split_once(" = ") {
                    if is_name(v) && !v.contains(' ') {
                        lp.labels.push((v.to_string(), label.to_string()));
                    }
                }
                continue;
            }
            let bad = |message: &str| Error::Format { line, message: message.to_string() };
            let (kind, rest) = trimmed.split_once(':').ok_or_else(|| bad("expected `kind: ...`"))?;
            let rest = rest.trim();
            match kind {
                "objective" => {
                    let (terms, constant) = parse_expr(rest, line)?;
                    if constant != 0.0 {
                        return Err(bad("objective has a constant term"));
                    }
                    lp.objective = terms;
                }
                "row" => {
                    let (slack, expr) = rest.split_once(">=").ok_or_else(|| bad("row needs `>=`"))?;
                    let (terms, constant) = parse_expr(expr, line)?;
                    lp.rows.push(LpRow { slack: slack.trim().to_string(), terms, constant });
                }
                "bound" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    match parts.as_slice() {
                        ["0", "<=", v, "<=", "1"] => lp.unit_box.push(v.to_string()),
                        [v, ">=", "0"] => lp.nonnegative.push(v.to_string()),
                        _ => return Err(bad("unrecognized bound")),
                    }
                }
                "fix" => {
                    let (v, value) = rest.split_once('=').ok_or_else(|| bad("fix needs `=`"))?;
                    lp.fixed.push((v.trim().to_string(), number(value.trim(), line)?));
                }
                _ => return Err(bad("unknown statement")),
            }
        }
        Ok(lp)
    }

    /// Right-hand side of `row` under `assignment`.
    pub fn row_rhs(row: &LpRow, assignment: &BTreeMap<String, f64>) -> Result<f64> {
        let mut total = row.constant;
        for (c, v) in &row.terms {
            total += c * value_of(assignment, v)?;
        }
        Ok(total)
    }

    pub fn objective_value(&self, assignment: &BTreeMap<String, f64>) -> Result<f64> {
        let mut total = 0.0;
        for (c, v) in &self.objective {
            total += c * value_of(assignment, v)?;
        }
        Ok(total)
    }

    /// Assigns `p_i = values[i]` and each slack its smallest feasible value.
    pub fn tight_assignment(&self, values: &[f64]) -> Result<BTreeMap<String, f64>> {
        let mut assignment: BTreeMap<String, f64> = values.iter().enumerate().map(|(i, v)| (atom_var(i), *v)).collect();
        for row in &self.rows {
            let rhs = Self::row_rhs(row, &assignment)?;
            assignment.insert(row.slack.clone(), rhs.max(0.0));
        }
        Ok(assignment)
    }

    /// Whether `assignment` satisfies every row, bound and fix within `tol`.
    pub fn is_feasible(&self, assignment: &BTreeMap<String, f64>, tol: f64) -> Result<bool> {
        for row in &self.rows {
            if value_of(assignment, &row.slack)? < Self::row_rhs(row, assignment)? - tol {
                return Ok(false);
            }
        }
        for v in &self.unit_box {
            let x = value_of(assignment, v)?;
            if x < -tol || x > 1.0 + tol {
                return Ok(false);
            }
        }
        for v in &self.nonnegative {
            if value_of(assignment, v)? < -tol {
                return Ok(false);
            }
        }
        for (v, value) in &self.fixed {
            if (value_of(assignment, v)? - value).abs() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
