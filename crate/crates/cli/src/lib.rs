//! Command-line front end: inference, audits, decompositions, joint
//! construction and LP export, each printing a JSON report.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use softconj::audit::{decompose, uniqueness_audit, AuditReport, ConvexityCounterexample, Min, Product, Verdict};
use softconj::fmt::round12;
use softconj::inference::{export_lp, grid_oracle, solve_subgradient, InitMode, LossSpec, Solution, SolveConfig};
use softconj::lang::{ground, parse_program, GroundModel};
use softconj::{
    construct_joint, frechet_bounds, joint_conjunction_prob, ConjunctionOp, Error, ProbabilityVector, SoftConjunction,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "softconj", version, about = "Soft conjunctions: inference, audits and constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Init {
    Center,
    Random,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ground a rule program and minimize its hinge objective.
    Infer {
        model: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        blend: f64,
        #[arg(long, default_value_t = 1.0)]
        exponent: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        max_iterations: usize,
        /// Initial step size; step t is step / sqrt(t).
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[arg(long, value_enum, default_value_t = Init::Center)]
        init: Init,
        /// Also run the grid oracle and report the gap.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 0.01)]
        resolution: f64,
    },
    /// Classify a conjunction operation by sampled convexity and bound checks.
    Audit {
        /// `family:<blend>`, `min` or `product`.
        op: String,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a probability vector as a convex combination of cube vertices.
    Decompose {
        #[arg(required = true, allow_negative_numbers = true)]
        vector: Vec<f64>,
    },
    /// Build a joint distribution with given marginals and conjunction probability.
    Joint {
        #[arg(required = true, allow_negative_numbers = true)]
        marginals: Vec<f64>,
        #[arg(long, allow_negative_numbers = true)]
        target: f64,
        /// Write the CSV here and print a report instead.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the linear program for a rule program.
    ExportLp {
        model: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        blend: f64,
        #[arg(long, default_value_t = 1.0)]
        exponent: f64,
        /// Write the LP here and print a report instead.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Reportable failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn solver(e: Error) -> Self {
        Self { code: EXIT_SOLVER, message: e.to_string() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::usage(e.to_string())
    }
}

struct Outcome {
    /// Printed verbatim; reports end with a newline.
    text: String,
    code: i32,
}

fn num(x: f64) -> Value {
    json!(round12(x))
}

fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn report(mut value: Value, started: Instant) -> String {
    value["elapsed_ms"] = json!(started.elapsed().as_millis() as u64);
    let mut text = serde_json::to_string_pretty(&value).expect("reports are plain JSON");
    text.push('\n');
    text
}

fn blend_op(blend: f64) -> Result<SoftConjunction, Failure> {
    SoftConjunction::new(blend).map_err(Failure::from)
}

fn load_model(path: &Path) -> Result<GroundModel, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let program = parse_program(&text).map_err(|e| {
        let lines: Vec<String> = e.diagnostics.iter().map(|d| format!("{}:{d}", path.display())).collect();
        Failure::usage(lines.join("\n"))
    })?;
    ground(&program).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn solution_atoms(model: &GroundModel, s: &Solution) -> Value {
    let map = model
        .atoms()
        .iter()
        .zip(s.interpretation.values())
        .map(|(a, v)| (a.to_string(), num(*v)))
        .collect::<serde_json::Map<_, _>>();
    Value::Object(map)
}

#[allow(clippy::too_many_arguments)]
fn cmd_infer(
    model_path: &Path,
    blend: f64,
    exponent: f64,
    seed: u64,
    max_iterations: usize,
    step: f64,
    tolerance: f64,
    init: Init,
    oracle: bool,
    resolution: f64,
) -> Result<Outcome, Failure> {
    let started = Instant::now();
    let op = blend_op(blend)?;
    let model = load_model(model_path)?;
    let loss = LossSpec::new(exponent).map_err(Failure::solver)?;
    let cfg = SolveConfig {
        seed,
        max_iterations,
        initial_step: step,
        tolerance,
        init: match init {
            Init::Center => InitMode::Center,
            Init::Random => InitMode::Random,
        },
        ..SolveConfig::default()
    };
    let solution = solve_subgradient(&model, op, loss, &cfg).map_err(Failure::solver)?;

    let mut value = json!({
        "command": "infer",
        "inputs": {
            "file": model_path.display().to_string(),
            "blend": num(blend),
            "exponent": num(exponent),
            "seed": seed,
            "init": match init { Init::Center => "center", Init::Random => "random" },
            "max_iterations": max_iterations,
            "step": num(step),
            "tolerance": num(tolerance),
        },
        "atoms": solution_atoms(&model, &solution),
        "free_atoms": model.free_atoms().len(),
        "ground_rules": model.rules().len(),
        "objective": num(solution.objective),
        "iterations": solution.iterations,
        "penalties": nums(&solution.penalties),
    });
    if oracle {
        let o = grid_oracle(&model, op, loss, resolution).map_err(Failure::solver)?;
        value["oracle"] = json!({
            "resolution": num(resolution),
            "objective": num(o.objective),
            "atoms": solution_atoms(&model, &o),
            "gap": num(solution.objective - o.objective),
        });
    }
    Ok(Outcome { text: report(value, started), code: EXIT_OK })
}

enum AuditOp {
    Family(SoftConjunction),
    Min,
    Product,
}

impl AuditOp {
    fn parse(name: &str) -> Result<Self, Failure> {
        match name {
            "min" => Ok(AuditOp::Min),
            "product" => Ok(AuditOp::Product),
            _ => {
                let blend = name.strip_prefix("family:").and_then(|b| b.parse::<f64>().ok()).ok_or_else(|| {
                    Failure::usage(format!("unknown operation `{name}`; use family:<blend>, min or product"))
                })?;
                Ok(AuditOp::Family(blend_op(blend)?))
            }
        }
    }

    fn expected(&self) -> Verdict {
        match self {
            AuditOp::Family(op) if op.is_logical() => Verdict::ConvexAndLogical,
            AuditOp::Family(_) => Verdict::ConvexNotLogical,
            AuditOp::Min | AuditOp::Product => Verdict::LogicalNotConvex,
        }
    }

    fn as_op(&self) -> &dyn ConjunctionOp {
        match self {
            AuditOp::Family(op) => op,
            AuditOp::Min => &Min,
            AuditOp::Product => &Product,
        }
    }
}

fn counterexample_json(c: &ConvexityCounterexample) -> Value {
    json!({
        "x": nums(c.x.as_slice()),
        "y": nums(c.y.as_slice()),
        "lambda": num(c.lambda),
        "lhs": num(c.lhs),
        "rhs": num(c.rhs),
        "gap": num(c.gap),
        "source": if c.sample_index.is_some() { "sample" } else { "probe" },
        "sample_index": c.sample_index,
    })
}

fn audit_json(r: &AuditReport, name: &str, samples: usize, expected: Verdict) -> Value {
    json!({
        "command": "audit",
        "inputs": { "op": name, "arity": r.arity, "samples": samples, "seed": r.seed },
        "verdict": r.verdict.as_str(),
        "expected_verdict": expected.as_str(),
        "counterexample": r.violations.first().map(counterexample_json),
        "bound_failures": r.bound_failures.iter().map(|f| json!({
            "point": nums(f.point.as_slice()),
            "side": f.side.to_string(),
            "gap": num(f.gap),
        })).collect::<Vec<_>>(),
        "bound_failure_count": r.bound_failure_count,
        "bound_points_checked": r.bound_points_checked,
        "max_lukasiewicz_gap": num(r.max_lukasiewicz_gap),
        "inconsistency_count": r.inconsistency_count,
        "samples_drawn": r.samples_drawn,
    })
}

fn cmd_audit(name: &str, arity: usize, samples: usize, seed: u64) -> Result<Outcome, Failure> {
    let started = Instant::now();
    let op = AuditOp::parse(name)?;
    let result = uniqueness_audit(op.as_op(), arity, samples, seed)?;
    let expected = op.expected();
    let code = if result.verdict == expected && result.is_consistent() { EXIT_OK } else { EXIT_MISMATCH };
    Ok(Outcome { text: report(audit_json(&result, name, samples, expected), started), code })
}

fn cmd_decompose(vector: &[f64]) -> Result<Outcome, Failure> {
    let started = Instant::now();
    let p = ProbabilityVector::new(vector.to_vec())?;
    let combination = decompose(&p)?;
    let top = combination.weight_on(&softconj::BinaryVector::ones(p.arity()));
    let value = json!({
        "command": "decompose",
        "inputs": { "vector": nums(vector) },
        "regime": softconj::audit::Regime::of(&p).as_str(),
        "terms": combination.terms().iter().map(|(v, w)| json!({
            "vertex": v.to_string(),
            "weight": num(*w),
        })).collect::<Vec<_>>(),
        "top_weight": num(top),
    });
    Ok(Outcome { text: report(value, started), code: EXIT_OK })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn cmd_joint(marginals: &[f64], target: f64, out: Option<&Path>) -> Result<Outcome, Failure> {
    let started = Instant::now();
    let p = ProbabilityVector::new(marginals.to_vec())?;
    let joint = construct_joint(&p, target)?;
    let csv = joint.to_csv();
    let Some(path) = out else {
        return Ok(Outcome { text: csv, code: EXIT_OK });
    };
    write_file(path, &csv)?;
    let bounds = frechet_bounds(&p);
    let value = json!({
        "command": "joint",
        "inputs": { "marginals": nums(marginals), "target": num(target), "out": path.display().to_string() },
        "lower": num(bounds.lower),
        "upper": num(bounds.upper),
        "conjunction": num(joint_conjunction_prob(&joint)),
        "patterns": joint.atoms().len(),
    });
    Ok(Outcome { text: report(value, started), code: EXIT_OK })
}

fn cmd_export_lp(model_path: &Path, blend: f64, exponent: f64, out: Option<&Path>) -> Result<Outcome, Failure> {
    let started = Instant::now();
    let op = blend_op(blend)?;
    let model = load_model(model_path)?;
    let loss = LossSpec::new(exponent)?;
    let lp = export_lp(&model, op, loss)?;
    let text = lp.to_string();
    let Some(path) = out else {
        return Ok(Outcome { text, code: EXIT_OK });
    };
    write_file(path, &text)?;
    let value = json!({
        "command": "export-lp",
        "inputs": { "file": model_path.display().to_string(), "blend": num(blend), "out": path.display().to_string() },
        "variables": lp.unit_box.len() + lp.nonnegative.len(),
        "rows": lp.rows.len(),
        "fixed": lp.fixed.len(),
    });
    Ok(Outcome { text: report(value, started), code: EXIT_OK })
}

fn dispatch(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Infer { model, blend, exponent, seed, max_iterations, step, tolerance, init, oracle, resolution } => {
            cmd_infer(&model, blend, exponent, seed, max_iterations, step, tolerance, init, oracle, resolution)
        }
        Command::Audit { op, arity, samples, seed } => cmd_audit(&op, arity, samples, seed),
        Command::Decompose { vector } => cmd_decompose(&vector),
        Command::Joint { marginals, target, out } => cmd_joint(&marginals, target, out.as_deref()),
        Command::ExportLp { model, blend, exponent, out } => cmd_export_lp(&model, blend, exponent, out.as_deref()),
    }
}

/// Runs the command line `args` (program name first), writing the report
/// to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command) {
        Ok(outcome) => {
            let _ = out.write_all(outcome.text.as_bytes());
            outcome.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
