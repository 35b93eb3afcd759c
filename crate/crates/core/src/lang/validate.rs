use std::collections::{BTreeMap, HashMap, HashSet};

use super::ast::{AtomTemplate, Program, Term};
use super::diag::{DiagCode, Diagnostic};

/// Checks every program invariant. An empty result means the program can
/// be grounded.
pub fn validate(program: &Program) -> Vec<Diagnostic> {
    let mut diags = Vec::new();

    let mut seen = HashSet::new();
    for d in &program.domains {
        if !seen.insert(d.name.as_str()) {
            diags.push(Diagnostic::new(
                DiagCode::DuplicateDeclaration,
                d.loc,
                format!("domain `{}` is declared more than once", d.name),
            ));
        }
        let mut members = HashSet::new();
        for c in &d.constants {
            if !members.insert(c.as_str()) {
                diags.push(Diagnostic::new(
                    DiagCode::DuplicateDeclaration,
                    d.loc,
                    format!("constant `{c}` is listed twice in domain `{}`", d.name),
                ));
            }
        }
    }

    let mut seen = HashSet::new();
    for p in &program.predicates {
        if !seen.insert(p.name.as_str()) {
            diags.push(Diagnostic::new(
                DiagCode::DuplicateDeclaration,
                p.loc,
                format!("predicate `{}` is declared more than once", p.name),
            ));
        }
        for dom in &p.signature {
            if program.domain(dom).is_none() {
                diags.push(Diagnostic::new(
                    DiagCode::UnknownDomain,
                    p.loc,
                    format!("predicate `{}` uses undeclared domain `{dom}`", p.name),
                ));
            }
        }
    }

    let mut evidence_seen: HashMap<String, ()> = HashMap::new();
    for e in &program.evidence {
        let sig_ok = check_atom(program, &e.atom, &mut diags);
        if let Some(v) = e.atom.args.iter().find(|t| t.is_var()) {
            diags.push(Diagnostic::new(
                DiagCode::NonGroundEvidence,
                e.atom.loc.or(e.loc),
                format!("evidence must be ground, but `{}` is a variable", v.name()),
            ));
        } else if sig_ok && evidence_seen.insert(e.atom.to_string(), ()).is_some() {
            diags.push(Diagnostic::new(
                DiagCode::DuplicateEvidence,
                e.loc,
                format!("evidence for `{}` is given more than once", e.atom),
            ));
        }
        if !(0.0..=1.0).contains(&e.value) {
            diags.push(Diagnostic::new(
                DiagCode::EvidenceRange,
                e.loc,
                format!("evidence value {} for `{}` is not in [0, 1]", e.value, e.atom),
            ));
        }
    }

    for r in &program.rules {
        if !(r.weight > 0.0 && r.weight.is_finite()) {
            diags.push(Diagnostic::new(
                DiagCode::NonPositiveWeight,
                r.loc,
                format!("rule weight must be a positive number, got {}", r.weight),
            ));
        }
        if r.body.is_empty() {
            diags.push(Diagnostic::new(DiagCode::EmptyBody, r.loc, "rule body must contain at least one atom"));
        }
        let mut all_ok = true;
        for atom in r.body.iter().chain(std::iter::once(&r.head)) {
            all_ok &= check_atom(program, atom, &mut diags);
        }
        if all_ok {
            if let Err(d) = variable_domains(program, r.body.iter().chain(std::iter::once(&r.head))) {
                diags.push(d);
            }
        }
        let body_vars: HashSet<&str> = r.body.iter().flat_map(|a| a.variables()).collect();
        for v in r.head.variables() {
            if !body_vars.contains(v) {
                diags.push(Diagnostic::new(
                    DiagCode::UnboundHeadVariable,
                    r.head.loc.or(r.loc),
                    format!("head variable `{v}` does not appear in the rule body"),
                ));
            }
        }
    }

    diags
}

/// Checks predicate, arity and constant membership. Returns whether the
/// atom's shape matched its signature.
fn check_atom(program: &Program, atom: &AtomTemplate, diags: &mut Vec<Diagnostic>) -> bool {
    let Some(decl) = program.predicate(&atom.predicate) else {
        diags.push(Diagnostic::new(
            DiagCode::UnknownPredicate,
            atom.loc,
            format!("predicate `{}` is not declared", atom.predicate),
        ));
        return false;
    };
    if decl.signature.len() != atom.args.len() {
        diags.push(Diagnostic::new(
            DiagCode::ArityMismatch,
            atom.loc,
            format!(
                "predicate `{}` takes {} argument(s), got {}",
                atom.predicate,
                decl.signature.len(),
                atom.args.len()
            ),
        ));
        return false;
    }
    for (term, dom) in atom.args.iter().zip(&decl.signature) {
        if let Term::Const(c) = term {
            let member = program.domain(dom).is_some_and(|d| d.constants.iter().any(|x| x == c));
            if !member && program.domain(dom).is_some() {
                diags.push(Diagnostic::new(
                    DiagCode::DomainMismatch,
                    atom.loc,
                    format!("constant `{c}` is not in domain `{dom}` expected by `{}`", atom.predicate),
                ));
            }
        }
    }
    true
}

/// Infers each variable's domain from the argument positions it occupies.
pub(crate) fn variable_domains<'a>(
    program: &Program,
    atoms: impl Iterator<Item = &'a AtomTemplate>,
) -> Result<BTreeMap<String, String>, Diagnostic> {
    let mut domains: BTreeMap<String, String> = BTreeMap::new();
    for atom in atoms {
        let decl = program.predicate(&atom.predicate).ok_or_else(|| {
            Diagnostic::new(
                DiagCode::VariableDomain,
                atom.loc,
                format!("cannot infer variable domains: predicate `{}` is not declared", atom.predicate),
            )
        })?;
        for (term, dom) in atom.args.iter().zip(&decl.signature) {
            if let Term::Var(v) = term {
                match domains.get(v) {
                    Some(prev) if prev != dom => {
                        return Err(Diagnostic::new(
                            DiagCode::VariableDomain,
                            atom.loc,
                            format!("variable `{v}` is used with both domain `{prev}` and `{dom}`"),
                        ))
                    }
                    Some(_) => {}
                    None => {
                        domains.insert(v.clone(), dom.clone());
                    }
                }
            }
        }
    }
    Ok(domains)
}
